from __future__ import annotations

from copy import deepcopy

import networkx as nx  # type: ignore
import pydot  # type: ignore


class CoverGraph:
    """
    The vertex set base × G of a voltage cover. Nodes are integers
    x·|G| + γ with attributes base and fiber; horizontal edges carry the
    base edge index and weight, vertical edges the fiber generator.
    """

    graph: nx.MultiGraph
    n_base: int
    order: int

    def __init__(self, n_base: int = 0, order: int = 1) -> None:
        self.graph = nx.MultiGraph()
        self.n_base = n_base
        self.order = order
        for x in range(n_base):
            for g in range(order):
                self.graph.add_node(self.index(x, g), base=x, fiber=g)

    def index(self, x: int, g: int) -> int:
        return x * self.order + g

    def empty(self) -> bool:
        return self.graph.number_of_nodes() == 0  # type: ignore

    def number_of_nodes(self) -> int:
        return self.graph.number_of_nodes()  # type: ignore

    def add_horizontal(self, u: int, v: int, edge: int, weight: float) -> None:
        self.graph.add_edge(u, v, kind="horizontal", edge=edge, weight=weight)

    def add_vertical(self, u: int, v: int, generator: int, weight: float) -> None:
        self.graph.add_edge(u, v, kind="vertical", generator=generator, weight=weight)

    def horizontal_edges(self) -> list[tuple[int, int, float]]:
        return sorted(
            (min(u, v), max(u, v), float(d["weight"]))
            for u, v, d in self.graph.edges(data=True)
            if d["kind"] == "horizontal"
        )

    def horizontal_subgraph(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.number_of_nodes()))
        g.add_edges_from((u, v) for u, v, _ in self.horizontal_edges())
        return g

    def fiber(self, x: int) -> list[int]:
        return [self.index(x, g) for g in range(self.order)]

    def components(self) -> int:
        return nx.number_connected_components(self.horizontal_subgraph())  # type: ignore

    def to_dot_str(self) -> str:
        G = deepcopy(self.graph)
        for u, v, k, d in G.edges(data=True, keys=True):
            G.edges[u, v, k]["label"] = (
                f'"e{d["edge"]}"' if d["kind"] == "horizontal" else f'"s{d["generator"]}"'
            )
        G.graph["graph"] = {"n_base": self.n_base, "order": self.order}
        dot = nx.nx_pydot.to_pydot(G)
        return dot.to_string()  # type: ignore

    @staticmethod
    def from_dot_str(dot: str) -> CoverGraph:
        parsed = pydot.graph_from_dot_data(dot)[0]
        G = nx.drawing.nx_pydot.from_pydot(parsed)
        attrs = G.graph.get("graph", {})
        n_base = int(str(attrs.get("n_base", 0)).strip('"'))
        order = int(str(attrs.get("order", 1)).strip('"'))
        cg = CoverGraph(n_base, order)
        for u, v, d in G.edges(data=True):
            kind = str(d["kind"]).strip('"')
            weight = float(str(d["weight"]).strip('"'))
            if kind == "horizontal":
                cg.add_horizontal(int(u), int(v), int(str(d["edge"]).strip('"')), weight)
            else:
                cg.add_vertical(
                    int(u), int(v), int(str(d["generator"]).strip('"')), weight
                )
        return cg
