from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from kkspectra.utils.errors import ModelError

# finite: int index, u1: angle, su2: unit quaternion (w, x, y, z)
GroupElement = Any

FloatArray = NDArray[np.float64]

J2 = np.array([[0.0, -1.0], [1.0, 0.0]])


##############
# QUATERNION #
##############


def qmul(a: FloatArray, b: FloatArray) -> FloatArray:
    a0, a1, a2, a3 = a
    b0, b1, b2, b3 = b
    return np.array(
        [
            a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
            a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
            a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
            a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
        ]
    )


def qconj(q: FloatArray) -> FloatArray:
    return np.array([q[0], -q[1], -q[2], -q[3]])


def quaternion_rotation(q: FloatArray) -> FloatArray:
    a, b, c, d = q
    return np.array(
        [
            [1 - 2 * (c * c + d * d), 2 * (b * c - a * d), 2 * (b * d + a * c)],
            [2 * (b * c + a * d), 1 - 2 * (b * b + d * d), 2 * (c * d - a * b)],
            [2 * (b * d - a * c), 2 * (c * d + a * b), 1 - 2 * (b * b + c * c)],
        ]
    )


def quaternion_left(q: FloatArray) -> FloatArray:
    a, b, c, d = q
    return np.array(
        [
            [a, -b, -c, -d],
            [b, a, -d, c],
            [c, d, a, -b],
            [d, -c, b, a],
        ]
    )


def rotation2(theta: float) -> FloatArray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def levi_civita() -> FloatArray:
    eps = np.zeros((3, 3, 3))
    for a, b, c in itertools.permutations(range(3)):
        eps[a, b, c] = np.linalg.det(np.eye(3)[[a, b, c]])
    return eps


##########
# GROUPS #
##########


@dataclass(frozen=True, eq=False)
class CompactGroupModel:
    """
    A compact group with the data needed by the workbench.

    Finite groups are exact: elements are indices into a multiplication
    table, Haar weights are 1 (so the total mass is the order). Lie groups
    carry quadrature nodes with Haar weights summing to the σ-volume of the
    group, the structure constants c[α, β, γ] = c^γ_{αβ} and the
    Ad-invariant metric σ.
    """

    kind: str
    name: str
    nodes: Sequence[GroupElement]
    haar_weights: FloatArray
    structure_constants: FloatArray
    sigma: FloatArray
    table: NDArray[np.int64] | None = None
    family: str = "generic"
    params: dict[str, Any] = field(default_factory=dict)

    @property
    def order(self) -> int:
        return len(self.nodes)

    @property
    def lie_dim(self) -> int:
        return int(self.sigma.shape[0])

    @property
    def is_lie(self) -> bool:
        return self.kind in ("u1", "su2")

    @property
    def is_abelian(self) -> bool:
        if self.table is not None:
            return bool(np.array_equal(self.table, self.table.T))
        return bool(np.all(self.structure_constants == 0))

    def total_mass(self) -> float:
        return float(self.haar_weights.sum())

    def identity(self) -> GroupElement:
        if self.kind == "finite":
            assert self.table is not None
            rng = np.arange(self.order)
            for e in range(self.order):
                if np.array_equal(self.table[e], rng):
                    return e
            raise ModelError(f"group {self.name} has no identity")
        if self.kind == "u1":
            return 0.0
        return np.array([1.0, 0.0, 0.0, 0.0])

    def multiply(self, a: GroupElement, b: GroupElement) -> GroupElement:
        if self.kind == "finite":
            assert self.table is not None
            return int(self.table[a, b])
        if self.kind == "u1":
            return float(np.mod(a + b, 2 * np.pi))
        return qmul(a, b)

    def inverse(self, a: GroupElement) -> GroupElement:
        if self.kind == "finite":
            assert self.table is not None
            e = self.identity()
            return int(np.flatnonzero(self.table[a] == e)[0])
        if self.kind == "u1":
            return float(np.mod(-a, 2 * np.pi))
        return qconj(a)

    def node_product(self, i: int, j: int) -> int:
        """Index of nodes[i]·nodes[j]; only for node sets closed under
        multiplication (finite groups, the Z_m nodes of U(1))."""
        if self.kind == "finite":
            return self.multiply(i, j)  # type: ignore
        if self.kind == "u1":
            return (i + j) % self.order
        raise ModelError("SU(2) quadrature nodes are not closed under products")

    def exp(self, t: ArrayLike) -> GroupElement:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        if self.kind == "u1":
            return float(np.mod(t[0], 2 * np.pi))
        if self.kind == "su2":
            v = t / 2
            n = float(np.linalg.norm(v))
            if n == 0.0:
                return self.identity()
            return np.concatenate([[np.cos(n)], np.sin(n) * v / n])
        raise ModelError("exp requires a Lie group model")

    def log(self, g: GroupElement) -> FloatArray:
        if self.kind == "u1":
            theta = float(np.mod(g + np.pi, 2 * np.pi) - np.pi)
            return np.array([theta])
        if self.kind == "su2":
            w = np.asarray(g[1:], dtype=float)
            n = float(np.linalg.norm(w))
            if n == 0.0:
                return np.zeros(3)
            phi = np.arctan2(n, g[0])
            return 2 * phi * w / n
        raise ModelError("log requires a Lie group model")

    def log_norm(self, g: GroupElement) -> float:
        """Principal angle of g: |θ| for U(1), the quaternion angle for SU(2).
        Equals π exactly on the cut locus of exp."""
        if self.kind == "u1":
            return float(abs(self.log(g)[0]))
        if self.kind == "su2":
            return float(np.arctan2(np.linalg.norm(g[1:]), g[0]))
        raise ModelError("log_norm requires a Lie group model")

    def bracket(self, x: FloatArray, y: FloatArray) -> FloatArray:
        return np.einsum("a,b,abc->c", x, y, self.structure_constants)  # type: ignore

    def ad(self, alpha: int) -> FloatArray:
        # (ad e_α)_{γβ} = c^γ_{αβ}
        return self.structure_constants[alpha].T.copy()

    def adjoint(self, g: GroupElement) -> FloatArray:
        if self.kind == "u1":
            return np.eye(1)
        if self.kind == "su2":
            return quaternion_rotation(g)
        raise ModelError("adjoint requires a Lie group model")

    def average(self, fn: Callable[[GroupElement], ArrayLike]) -> Any:
        return haar_average(self, [(i, fn(g)) for i, g in enumerate(self.nodes)])

    def structure_defects(self) -> tuple[float, float]:
        """(antisymmetry defect, Jacobi defect) of the structure constants."""
        c = self.structure_constants
        if c.size == 0:
            return 0.0, 0.0
        anti = float(np.max(np.abs(c + c.transpose(1, 0, 2))))
        # [[e_a,e_b],e_d] + cyclic
        jac = (
            np.einsum("abe,edf->abdf", c, c)
            + np.einsum("bde,eaf->abdf", c, c)
            + np.einsum("dae,ebf->abdf", c, c)
        )
        return anti, float(np.max(np.abs(jac)))


def cyclic_group(m: int) -> CompactGroupModel:
    assert m >= 1, "cyclic group needs a positive order"
    idx = np.arange(m)
    table = (idx[:, None] + idx[None, :]) % m
    return _finite(f"Z{m}", table, "cyclic", {"m": m})


def dihedral_group(n: int) -> CompactGroupModel:
    """D_n of order 2n, element r^k s^f encoded as k + n·f."""
    assert n >= 2, "dihedral group needs n >= 2"
    order = 2 * n
    table = np.zeros((order, order), dtype=np.int64)
    for a in range(order):
        k1, f1 = a % n, a // n
        for b in range(order):
            k2, f2 = b % n, b // n
            k = (k1 + (k2 if f1 == 0 else -k2)) % n
            table[a, b] = k + n * (f1 ^ f2)
    name = "S3" if n == 3 else f"D{n}"
    return _finite(name, table, "dihedral", {"n": n})


def finite_group_from_table(table: ArrayLike, name: str = "G") -> CompactGroupModel:
    t = np.asarray(table, dtype=np.int64)
    n = t.shape[0]
    if t.shape != (n, n):
        raise ModelError("multiplication table must be square")
    for row in itertools.chain(t, t.T):
        if sorted(row.tolist()) != list(range(n)):
            raise ModelError("multiplication table is not a latin square")
    # associativity: (ab)c = a(bc)
    left = t[t[:, :, None], np.arange(n)[None, None, :]]
    right = t[np.arange(n)[:, None, None], t[None, :, :]]
    if not np.array_equal(left, right):
        raise ModelError("multiplication table is not associative")
    group = _finite(name, t, "generic", {})
    group.identity()
    return group


def _finite(
    name: str, table: NDArray[np.int64], family: str, params: dict[str, Any]
) -> CompactGroupModel:
    n = table.shape[0]
    return CompactGroupModel(
        kind="finite",
        name=name,
        nodes=list(range(n)),
        haar_weights=np.ones(n),
        structure_constants=np.zeros((0, 0, 0)),
        sigma=np.zeros((0, 0)),
        table=np.asarray(table, dtype=np.int64),
        family=family,
        params=params,
    )


def u1_group(m: int = 64, sigma: float = 1.0) -> CompactGroupModel:
    """U(1) with m uniform trapezoid nodes θ_k = 2πk/m; the trapezoid rule is
    exact on Fourier modes |n| < m. Total mass 2π√σ."""
    assert m >= 1 and sigma > 0
    mass = 2 * np.pi * np.sqrt(sigma)
    return CompactGroupModel(
        kind="u1",
        name=f"U1[{m}]",
        nodes=list(2 * np.pi * np.arange(m) / m),
        haar_weights=np.full(m, mass / m),
        structure_constants=np.zeros((1, 1, 1)),
        sigma=np.array([[float(sigma)]]),
        family="u1",
        params={"m": m, "sigma": float(sigma)},
    )


def su2_group(order: int = 8, sigma: ArrayLike | None = None) -> CompactGroupModel:
    """
    SU(2) with basis e_a = −iτ_a/2, i.e. the quaternion units divided by two,
    so that [e_a, e_b] = ε_{abc} e_c.

    Haar quadrature over Euler ZYZ angles q = exp(αe_3)exp(βe_2)exp(γe_3):
    trapezoid in α ∈ [0,2π) (order nodes) and γ ∈ [0,4π) (2·order nodes),
    Gauss–Legendre in cos β (order nodes). Polynomials in the matrix
    coefficients of degree below the order are integrated exactly.
    Total mass 16π²√det σ.
    """
    s = np.eye(3) if sigma is None else np.asarray(sigma, dtype=float)
    if s.shape != (3, 3):
        raise ModelError("su(2) metric must be 3x3")
    x, wx = np.polynomial.legendre.leggauss(order)
    alphas = 2 * np.pi * np.arange(order) / order
    gammas = 4 * np.pi * np.arange(2 * order) / (2 * order)
    group = CompactGroupModel(
        kind="su2",
        name=f"SU2[{order}]",
        nodes=[],
        haar_weights=np.zeros(0),
        structure_constants=levi_civita(),
        sigma=s,
        family="su2",
        params={"order": order},
    )
    nodes = []
    weights = []
    for a in alphas:
        for xb, w in zip(x, wx):
            b = float(np.arccos(xb))
            for c in gammas:
                q = qmul(
                    qmul(group.exp([0.0, 0.0, a]), group.exp([0.0, b, 0.0])),
                    group.exp([0.0, 0.0, c]),
                )
                nodes.append(q)
                weights.append(w)
    wts = np.asarray(weights)
    det = np.linalg.det(s)
    if det <= 0:
        raise ModelError("degenerate metric")
    wts = wts / wts.sum() * 16 * np.pi**2 * np.sqrt(det)
    object.__setattr__(group, "nodes", nodes)
    object.__setattr__(group, "haar_weights", wts)
    return group


def with_sigma(group: CompactGroupModel, sigma: ArrayLike) -> CompactGroupModel:
    """Same group with another Ad-invariant metric; the Haar mass rescales
    with √det σ."""
    s = np.atleast_2d(np.asarray(sigma, dtype=float))
    if s.shape != group.sigma.shape:
        raise ModelError("inconsistent dimensions")
    old = float(np.sqrt(np.linalg.det(group.sigma)))
    new = float(np.sqrt(abs(np.linalg.det(s))))
    return CompactGroupModel(
        kind=group.kind,
        name=group.name,
        nodes=group.nodes,
        haar_weights=group.haar_weights * (new / old),
        structure_constants=group.structure_constants,
        sigma=s,
        table=group.table,
        family=group.family,
        params=group.params,
    )


###################
# REPRESENTATIONS #
###################


@dataclass(frozen=True, eq=False)
class RepresentationModel:
    name: str
    dim: int
    rho_star: tuple[FloatArray, ...] = ()
    irreducible: bool = True
    matrices: FloatArray | None = None
    generator: Callable[[GroupElement], FloatArray] | None = None

    def rho(self, g: GroupElement) -> FloatArray:
        if self.matrices is not None:
            return self.matrices[int(g)]  # type: ignore
        assert self.generator is not None, f"representation {self.name} has no data"
        return self.generator(g)

    def is_trivial(self) -> bool:
        return self.name == "trivial"


def trivial_rep(group: CompactGroupModel) -> RepresentationModel:
    k = group.lie_dim
    return RepresentationModel(
        name="trivial",
        dim=1,
        rho_star=tuple(np.zeros((1, 1)) for _ in range(k)),
        generator=lambda g: np.eye(1),
    )


def u1_rep(n: int) -> RepresentationModel:
    """ρ_n(θ) = rotation by nθ on R², ρ_*(e_1) = n·J."""
    if n == 0:
        return RepresentationModel(
            name="trivial", dim=1, rho_star=(np.zeros((1, 1)),), generator=lambda g: np.eye(1)
        )
    return RepresentationModel(
        name=f"rho{n}",
        dim=2,
        rho_star=(n * J2,),
        generator=lambda g: rotation2(n * g),
    )


def su2_adjoint_rep() -> RepresentationModel:
    eps = levi_civita()
    return RepresentationModel(
        name="adjoint",
        dim=3,
        rho_star=tuple(eps[a].T.copy() for a in range(3)),
        generator=quaternion_rotation,
    )


def su2_quaternion_rep() -> RepresentationModel:
    """SU(2) acting on H = R⁴ by left multiplication."""
    units = np.eye(4)[1:]
    return RepresentationModel(
        name="quaternion",
        dim=4,
        rho_star=tuple(quaternion_left(u) / 2 for u in units),
        generator=quaternion_left,
    )


def matrix_rep(
    name: str, matrices: ArrayLike, irreducible: bool = True
) -> RepresentationModel:
    mats = np.asarray(matrices, dtype=float)
    if mats.ndim != 3 or mats.shape[1] != mats.shape[2]:
        raise ModelError("inconsistent dimensions")
    return RepresentationModel(
        name=name, dim=int(mats.shape[1]), irreducible=irreducible, matrices=mats
    )


def cyclic_irreps(group: CompactGroupModel) -> list[RepresentationModel]:
    """All real irreps of Z_m: trivial, sign (m even) and the rotation
    representations by 2πn/m for 0 < n < m/2."""
    assert group.family == "cyclic"
    m = group.order
    ks = np.arange(m)
    reps = [matrix_rep("trivial", np.ones((m, 1, 1)))]
    if m % 2 == 0:
        reps.append(matrix_rep("sign", ((-1.0) ** ks)[:, None, None]))
    for n in range(1, (m + 1) // 2):
        reps.append(
            matrix_rep(f"rot{n}", np.stack([rotation2(2 * np.pi * n * k / m) for k in ks]))
        )
    return reps


def dihedral_irreps(group: CompactGroupModel) -> list[RepresentationModel]:
    assert group.family == "dihedral"
    n = group.params["n"]
    order = group.order
    ks = np.array([a % n for a in range(order)])
    fs = np.array([a // n for a in range(order)])
    one = [("trivial", 1.0, 1.0), ("det", 1.0, -1.0)]
    if n % 2 == 0:
        one += [("alt_r", -1.0, 1.0), ("alt_rs", -1.0, -1.0)]
    reps = []
    for name, a, b in one:
        vals = (a**ks) * (b**fs)
        reps.append(matrix_rep(name, vals[:, None, None]))
    refl = np.diag([1.0, -1.0])
    for j in range(1, (n + 1) // 2):
        mats = [
            rotation2(2 * np.pi * j * k / n) @ (refl if f else np.eye(2))
            for k, f in zip(ks, fs)
        ]
        reps.append(matrix_rep(f"std{j}", np.stack(mats)))
    return reps


def irreps(group: CompactGroupModel) -> list[RepresentationModel]:
    if group.family == "cyclic":
        return cyclic_irreps(group)
    if group.family == "dihedral":
        return dihedral_irreps(group)
    raise ModelError(f"no irrep catalog for group {group.name}")


def representation_defects(
    group: CompactGroupModel, rep: RepresentationModel
) -> dict[str, float]:
    """Homomorphism, orthogonality and Lie-bracket defects over the node set."""
    homo = 0.0
    ortho = 0.0
    nodes = list(group.nodes)
    for g in nodes:
        r = rep.rho(g)
        ortho = max(ortho, float(np.max(np.abs(r.T @ r - np.eye(rep.dim)))))
    # products of a node sample; the full square for finite groups
    sample = nodes if group.kind == "finite" else nodes[:: max(1, len(nodes) // 16)]
    for g in sample:
        for h in sample:
            lhs = rep.rho(group.multiply(g, h))
            rhs = rep.rho(g) @ rep.rho(h)
            homo = max(homo, float(np.max(np.abs(lhs - rhs))))
    anti = 0.0
    brk = 0.0
    c = group.structure_constants
    for a, ra in enumerate(rep.rho_star):
        anti = max(anti, float(np.max(np.abs(ra + ra.T))))
        for b, rb in enumerate(rep.rho_star):
            lhs = sum(c[a, b, g] * rep.rho_star[g] for g in range(len(rep.rho_star)))
            brk = max(brk, float(np.max(np.abs(lhs - (ra @ rb - rb @ ra)))))
    return {
        "homomorphism": homo,
        "orthogonality": ortho,
        "antisymmetry": anti,
        "bracket": brk,
    }


##############
# INVARIANTS #
##############


@dataclass(frozen=True)
class CasimirResult:
    chi: float
    residual: float
    matrix: FloatArray


def casimir(
    rep: RepresentationModel, group: CompactGroupModel, tol: float = 1e-9
) -> CasimirResult:
    """σ^{αβ}ρ_*(e_α)ρ_*(e_β) = −χ·I; χ is the negated mean diagonal, then
    checked by residual."""
    if not group.is_lie:
        raise ModelError("casimir requires a Lie group model")
    if not rep.irreducible:
        raise ModelError("casimir requires an irreducible representation")
    sigma = group.sigma
    if abs(np.linalg.det(sigma)) < 1e-14 or np.linalg.cond(sigma) > 1e12:
        raise ModelError("degenerate metric")
    if len(rep.rho_star) != group.lie_dim:
        raise ModelError("inconsistent dimensions")
    inv = np.linalg.inv(sigma)
    mat = np.zeros((rep.dim, rep.dim))
    for a, ra in enumerate(rep.rho_star):
        for b, rb in enumerate(rep.rho_star):
            mat += inv[a, b] * ra @ rb
    chi = float(-np.mean(np.diag(mat)))
    residual = float(np.max(np.abs(mat + chi * np.eye(rep.dim))))
    if residual > tol:
        raise ModelError(
            "not scalar: representation not (absolutely) irreducible or data inconsistent"
        )
    return CasimirResult(chi=chi, residual=residual, matrix=mat)


def check_ad_invariance(group: CompactGroupModel) -> float:
    """max |σ([e_γ,e_α],e_β) + σ(e_α,[e_γ,e_β])| over basis triples."""
    if not group.is_lie:
        raise ModelError("ad-invariance requires a Lie group model")
    c = group.structure_constants
    s = group.sigma
    defect = np.einsum("gad,db->gab", c, s) + np.einsum("ad,gbd->gab", s, c)
    return float(np.max(np.abs(defect)))


def haar_average(
    group: CompactGroupModel, samples: Sequence[tuple[int, ArrayLike]]
) -> Any:
    """Weighted mean Σ w_γ v_γ / Σ w_γ over (node index, value) samples."""
    if len(samples) == 0:
        raise ModelError("empty sample set")
    weights = group.haar_weights
    total = 0.0
    acc: Any = None
    for idx, value in samples:
        w = float(weights[idx])
        if w < 0:
            raise ModelError("negative Haar weight")
        v = np.asarray(value, dtype=float)
        acc = w * v if acc is None else acc + w * v
        total += w
    return acc / total


def action_matrix(perm: ArrayLike) -> FloatArray:
    """(R f)(u) = f(perm[u]) for the permutation u ↦ u·γ."""
    p = np.asarray(perm, dtype=np.int64)
    n = p.shape[0]
    r = np.zeros((n, n))
    r[np.arange(n), p] = 1.0
    return r


def isotypic_projector(
    group: CompactGroupModel,
    rep: RepresentationModel,
    action: Sequence[FloatArray],
    carrier_dimension: int,
) -> FloatArray:
    """
    Π = (1/μ(G)) Σ_γ w_γ R(γ) ⊗ ρ(γ), the orthogonal projector onto the
    G-invariant V-valued functions F(uγ) = ρ(γ)⁻¹F(u). Index order of the
    carrier is point·dim V + component.
    """
    if len(action) != group.order:
        raise ModelError("inconsistent dimensions: one action matrix per group node")
    for r in action:
        if r.shape != (carrier_dimension, carrier_dimension):
            raise ModelError("inconsistent dimensions")
    size = carrier_dimension * rep.dim
    proj = np.zeros((size, size))
    for w, g, r in zip(group.haar_weights, group.nodes, action):
        rg = rep.rho(g)
        if rg.shape != (rep.dim, rep.dim):
            raise ModelError("inconsistent dimensions")
        proj += w * np.kron(r, rg)
    return proj / group.total_mass()  # type: ignore


def fixed_space(
    group: CompactGroupModel,
    rep: RepresentationModel,
    elements: Sequence[int] | None = None,
    tol: float = 1e-6,
) -> FloatArray:
    """Orthonormal basis (columns) of V^H, H given by node indices."""
    idx = list(range(group.order)) if elements is None else list(elements)
    avg = sum(rep.rho(group.nodes[i]) for i in idx) / len(idx)
    sym = (avg + avg.T) / 2
    vals, vecs = np.linalg.eigh(sym)
    return vecs[:, vals > 1 - tol]  # type: ignore


def commutant_dimension(
    group: CompactGroupModel, rep: RepresentationModel, tol: float = 1e-8
) -> int:
    """dim End_G(V): rank of the Haar average of ρ⊗ρ."""
    avg = group.average(lambda g: np.kron(rep.rho(g), rep.rho(g)))
    return int(np.linalg.matrix_rank(avg, tol=tol))


def default_generators(group: CompactGroupModel) -> list[int]:
    """Conjugation-invariant symmetric generating set for the fiber Cayley
    graph: {1, m−1} for Z_m, the reflections for D_n, otherwise every
    non-identity element."""
    if group.kind != "finite":
        raise ModelError("fiber generators need a finite group")
    if group.family == "cyclic":
        m = group.order
        return sorted({1 % m, (m - 1) % m} - {0})
    if group.family == "dihedral":
        n = group.params["n"]
        return list(range(n, 2 * n))
    e = group.identity()
    return [g for g in range(group.order) if g != e]


def discrete_casimir(
    group: CompactGroupModel,
    rep: RepresentationModel,
    generators: Sequence[int] | None = None,
    weight: float = 1.0,
    tol: float = 1e-10,
) -> float:
    """Eigenvalue of the weighted fiber Cayley Laplacian
    f ↦ w Σ_s (f − f(s·)) on the ρ-isotypic part of L²(G):
    χ = w(|S| − tr Σ_s ρ(s) / dim ρ)."""
    gens = default_generators(group) if generators is None else list(generators)
    c = sum((rep.rho(s) for s in gens), np.zeros((rep.dim, rep.dim)))
    mat = weight * (len(gens) * np.eye(rep.dim) - c)
    chi = float(np.mean(np.diag(mat)))
    residual = float(np.max(np.abs(mat - chi * np.eye(rep.dim))))
    if residual > tol:
        raise ModelError(
            "not scalar: representation not (absolutely) irreducible or data inconsistent"
        )
    return chi


def u1_fiber_weight(m: int, sigma: float = 1.0) -> float:
    """Edge weight (m/c)² of the Z_m ⊂ U(1) fiber circle of circumference
    c = 2π√σ; w(2 − 2cos(2πn/m)) → n²/σ."""
    return float((m / (2 * np.pi * np.sqrt(sigma))) ** 2)


###########
# LOADING #
###########


def group_from_json(
    doc: dict[str, Any]
) -> tuple[CompactGroupModel, list[RepresentationModel]]:
    """
    {"kind": "finite"|"u1"|"su2", "table"|"nodes", "sigma",
     "reps": [{"name", "dim", "matrices"|"weight"}]}

    For U(1) the weight is the charge n; for SU(2) weights 0, 1, 2 select the
    trivial, quaternion (R⁴) and adjoint representations.
    """
    kind = doc.get("kind")
    sigma = doc.get("sigma")
    group: CompactGroupModel
    if kind == "finite":
        if "table" not in doc:
            raise ModelError("finite group needs a table")
        group = finite_group_from_table(doc["table"], doc.get("name", "G"))
    elif kind == "u1":
        s = 1.0 if sigma is None else float(np.asarray(sigma, dtype=float).reshape(-1)[0])
        group = u1_group(int(doc.get("nodes", 64)), s)
    elif kind == "su2":
        group = su2_group(int(doc.get("nodes", 8)), sigma)
    else:
        raise ModelError(f"unknown group kind {kind!r}")

    reps: list[RepresentationModel] = []
    for entry in doc.get("reps", []):
        if "matrices" in entry:
            rep = matrix_rep(entry.get("name", "rep"), entry["matrices"])
            if "dim" in entry and entry["dim"] != rep.dim:
                raise ModelError("inconsistent dimensions")
            if rep.matrices is not None and rep.matrices.shape[0] != group.order:
                raise ModelError("one matrix per group element required")
        elif "weight" in entry:
            w = int(entry["weight"])
            if kind == "u1":
                rep = u1_rep(w)
            elif kind == "su2":
                table = {0: trivial_rep(group), 1: su2_quaternion_rep(), 2: su2_adjoint_rep()}
                if w not in table:
                    raise ModelError(f"unsupported SU(2) weight {w}")
                rep = table[w]
            else:
                raise ModelError("weights only describe U(1)/SU(2) representations")
        else:
            raise ModelError("representation needs matrices or a weight")
        reps.append(rep)
    return group, reps
