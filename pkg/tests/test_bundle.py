from __future__ import annotations

import networkx as nx
import numpy as np
import pytest

from kkspectra.core.bundle import (
    CurvatureField,
    bianchi_defect,
    chart_ricci_frame,
    conjugacy_class,
    connection_from_flux,
    connection_from_gauge_field,
    connection_from_holonomy,
    connection_from_json,
    connection_from_links,
    connection_to_json,
    covariant_derivative_F,
    cycle_base,
    face_holonomies,
    gauge_transform,
    graph_base,
    heisenberg_chart,
    kk_metric,
    plaquette_curvature,
    plaquette_holonomies,
    random_connection,
    random_gauge,
    ricci_blocks_at,
    ricci_fd_oracle,
    ricci_h,
    sphere_chart,
    su2_fiber_chart,
    torus_grid,
    trivial_connection,
)
from kkspectra.core.group_rep import (
    cyclic_group,
    dihedral_group,
    levi_civita,
    su2_group,
    u1_group,
)
from kkspectra.scenarios import ricci_crosscheck
from kkspectra.utils.errors import ModelError


class TestBase:
    def test_torus_grid_layout(self):
        base = torus_grid([4, 3])
        assert base.n_vertices == 12
        assert base.n_edges == 24
        assert base.cell_volume() == pytest.approx((2 * np.pi) ** 2 / 12)
        assert base.volume() == pytest.approx((2 * np.pi) ** 2)
        assert base.edges[base.edge_index(1, 0)].tolist() == [0, 1]

    def test_grid_too_small(self):
        with pytest.raises(ModelError, match="at least 2"):
            torus_grid([1, 4])

    def test_graph_base_sorted_edges(self):
        base = graph_base(nx.cycle_graph(4))
        assert base.edges.tolist() == [[0, 1], [0, 3], [1, 2], [2, 3]]
        assert base.lookup[(3, 0)] == (1, False)


class TestConnections:
    def test_links_must_be_group_elements(self):
        with pytest.raises(ModelError, match="not a group element"):
            connection_from_links(cycle_base(3), cyclic_group(2), [0, 1, 2])

    def test_transport_reverses(self):
        conn = connection_from_links(cycle_base(3), cyclic_group(3), [1, 0, 0])
        assert conn.transport(0, 1) == 1
        assert conn.transport(1, 0) == 2
        with pytest.raises(ModelError, match="not adjacent"):
            connection_from_links(cycle_base(4), cyclic_group(3), [0] * 4).transport(0, 2)

    def test_cycle_holonomy(self):
        conn = connection_from_holonomy(cycle_base(5), u1_group(), [0.5])
        total = sum(conn.transport(x, (x + 1) % 5) for x in range(5))
        assert np.mod(total, 2 * np.pi) == pytest.approx(0.5)

    def test_json(self):
        conn = random_connection(torus_grid([3, 3]), u1_group(), seed=4)
        back = connection_from_json(connection_to_json(conn), u1_group())
        assert np.allclose(back.links, conn.links)
        with pytest.raises(ModelError, match="another group"):
            connection_from_json(connection_to_json(conn), cyclic_group(2))


class TestCurvature:
    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_flux_is_constant(self, k):
        conn = connection_from_flux(torus_grid([8, 8]), u1_group(), k)
        curv = plaquette_curvature(conn)
        assert curv.is_constant(1e-12)
        assert curv.values[0, 0, 1, 0] == pytest.approx(2 * np.pi * k / conn.base.volume())
        assert np.sum(curv.plaquette[:, 0, 1, 0]) * conn.base.cell_volume() == pytest.approx(
            2 * np.pi * k
        )

    def test_flux_needs_u1(self):
        with pytest.raises(ModelError, match="need U\\(1\\)"):
            connection_from_flux(torus_grid([4, 4]), su2_group(4), 1)

    def test_plaquette_too_coarse(self):
        base = torus_grid([2, 2])
        conn = connection_from_flux(base, u1_group(), 2)
        with pytest.raises(ModelError, match="plaquette too coarse"):
            plaquette_curvature(conn)

    def test_gauge_invariance_u1(self):
        conn = connection_from_flux(torus_grid([6, 6]), u1_group(), 1)
        moved = gauge_transform(conn, random_gauge(conn.base, conn.group, 7))
        a = plaquette_curvature(conn).plaquette
        b = plaquette_curvature(moved).plaquette
        assert np.max(np.abs(a - b)) < 1e-12

    def test_face_classes_under_gauge(self):
        s3 = dihedral_group(3)
        base = graph_base(nx.petersen_graph())
        conn = random_connection(base, s3, seed=1)
        moved = gauge_transform(conn, random_gauge(base, s3, 2))
        before = [conjugacy_class(s3, h) for _, h in face_holonomies(conn)]
        after = [conjugacy_class(s3, h) for _, h in face_holonomies(moved)]
        assert before == after

    def test_flat_su2_holonomies(self):
        conn = trivial_connection(torus_grid([3, 3]), su2_group(4))
        for hols in plaquette_holonomies(conn).values():
            assert all(np.allclose(h, [1, 0, 0, 0]) for h in hols)

    def test_bianchi_on_smooth_field(self):
        base = torus_grid([16, 16, 16])

        def field(p):
            out = np.zeros((p.shape[0], 3, 1))
            out[:, 1, 0] = np.sin(p[:, 0])
            out[:, 2, 0] = np.cos(p[:, 1])
            return out

        curv = plaquette_curvature(connection_from_gauge_field(base, u1_group(), field))
        assert bianchi_defect(covariant_derivative_F(curv)) < 1e-12

    def test_constant_field_must_be_antisymmetric(self):
        with pytest.raises(ModelError, match="antisymmetric"):
            CurvatureField.constant(torus_grid([3, 3]), np.ones((2, 2)), [[1.0]])


class TestRicci:
    @pytest.mark.parametrize("b", [0.5, 1.0, 2.0])
    def test_heisenberg_blocks(self, b):
        F = np.zeros((2, 2, 1))
        F[0, 1, 0], F[1, 0, 0] = -b, b
        hh, hv, vv = ricci_blocks_at(F, np.zeros((2, 1)), np.eye(1), np.zeros((1, 1, 1)))
        assert np.allclose(np.linalg.eigvalsh(hh), [-b * b / 2] * 2, atol=1e-12)
        assert np.allclose(hv, 0)
        assert vv[0, 0] == pytest.approx(b * b / 2)
        full = np.block([[hh, hv], [hv.T, vv]])
        assert np.max(np.abs(chart_ricci_frame(heisenberg_chart(b)) - full)) < 1e-5

    def test_su2_fiber(self):
        _, _, vv = ricci_blocks_at(
            np.zeros((0, 0, 3)), np.zeros((0, 3)), np.eye(3), levi_civita()
        )
        assert np.allclose(vv, np.eye(3) / 2)
        assert np.max(np.abs(chart_ricci_frame(su2_fiber_chart()) - vv)) < 1e-5

    def test_sphere_oracle(self):
        ric = ricci_fd_oracle(sphere_chart(2.0).metric, [1.0, 0.4])
        assert ric[0, 0] == pytest.approx(1.0, abs=1e-5)

    def test_singular_metric(self):
        with pytest.raises(ModelError, match="singular metric"):
            ricci_fd_oracle(lambda p: np.zeros((2, 2)), [0.0, 0.0])

    def test_lattice_flux(self):
        base = torus_grid([16, 16])
        conn = connection_from_flux(base, u1_group(), 1)
        blocks = ricci_h(base, plaquette_curvature(conn), np.eye(1), conn.group)
        f = 2 * np.pi / base.volume()
        assert np.allclose(blocks.hh, -f * f / 2 * np.eye(2), atol=1e-12)
        assert np.allclose(blocks.vv, f * f / 2, atol=1e-12)
        assert blocks.kappa == pytest.approx(-f * f / 2)

    def test_nonabelian_needs_constant_curvature(self):
        su2 = su2_group(4)
        conn = random_connection(torus_grid([4, 4]), su2, seed=3, scale=0.2)
        with pytest.raises(ModelError, match="unsupported"):
            ricci_h(conn.base, plaquette_curvature(conn), np.eye(3), su2)

    def test_graph_base_rejected(self):
        curv = CurvatureField.constant(torus_grid([3, 3]), np.zeros((2, 2)), [[1.0]])
        with pytest.raises(ModelError, match="missing ∇F"):
            ricci_h(cycle_base(4), curv, np.eye(1), u1_group())

    def test_crosscheck_bianchi_runs_in_three_dimensions(self):
        params = {**ricci_crosscheck.DEFAULTS, "grid": 16, "grid3": 8}
        checks = {c.name: c for c in ricci_crosscheck.run(params, 0).checks}
        assert checks["lattice_nabla_F_3d"].ok
        assert checks["lattice_bianchi_3d"].ok
        assert checks["lattice_nabla_F_3d"].value > 1e6 * checks["lattice_bianchi_3d"].value



class TestKKMetric:
    def test_volume(self):
        base = torus_grid([4, 4])
        metric = kk_metric(base, None, [[4.0]])
        group = u1_group(16, 4.0)
        assert metric.total_space_volume(group) == pytest.approx(
            base.volume() * 2 * np.pi * 2
        )

    def test_sigma_positive(self):
        with pytest.raises(ModelError, match="positive definite"):
            kk_metric(torus_grid([3, 3]), None, [[-1.0]])
