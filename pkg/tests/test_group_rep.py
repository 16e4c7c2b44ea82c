from __future__ import annotations

import numpy as np
import pytest

from kkspectra.core.group_rep import (
    J2,
    RepresentationModel,
    casimir,
    check_ad_invariance,
    commutant_dimension,
    cyclic_group,
    cyclic_irreps,
    dihedral_group,
    dihedral_irreps,
    discrete_casimir,
    finite_group_from_table,
    fixed_space,
    group_from_json,
    isotypic_projector,
    representation_defects,
    su2_adjoint_rep,
    su2_group,
    su2_quaternion_rep,
    u1_fiber_weight,
    u1_group,
    u1_rep,
    with_sigma,
)
from kkspectra.core.mm_space import regular_action
from kkspectra.utils.errors import ModelError


class TestGroups:
    def test_cyclic_table(self):
        g = cyclic_group(5)
        assert g.order == 5
        assert g.identity() == 0
        assert g.multiply(3, 4) == 2
        assert g.inverse(2) == 3
        assert g.total_mass() == 5

    def test_dihedral_is_nonabelian(self):
        s3 = dihedral_group(3)
        assert s3.name == "S3"
        assert s3.order == 6
        assert not s3.is_abelian
        assert cyclic_group(4).is_abelian

    def test_table_must_be_latin(self):
        with pytest.raises(ModelError, match="latin square"):
            finite_group_from_table([[0, 1], [0, 1]])

    def test_u1_mass(self):
        g = u1_group(32, sigma=4.0)
        assert g.total_mass() == pytest.approx(4 * np.pi)
        assert g.log(g.exp([0.3]))[0] == pytest.approx(0.3)

    def test_su2_quadrature(self):
        g = su2_group()
        assert g.total_mass() == pytest.approx(16 * np.pi**2)
        avg = g.average(g.adjoint)
        assert np.max(np.abs(avg)) < 1e-12

    def test_su2_exp_log(self):
        g = su2_group(4)
        v = np.array([0.3, -0.2, 0.5])
        assert np.allclose(g.log(g.exp(v)), v, atol=1e-14)
        assert g.structure_defects() == (0.0, 0.0)


class TestCasimir:
    @pytest.mark.parametrize("n", range(1, 7))
    def test_u1_charge(self, n):
        assert casimir(u1_rep(n), u1_group()).chi == pytest.approx(n * n, abs=1e-12)

    @pytest.mark.parametrize(
        "rep, expected", [(su2_adjoint_rep(), 2.0), (su2_quaternion_rep(), 0.75)]
    )
    def test_su2(self, rep, expected):
        assert casimir(rep, su2_group(4)).chi == pytest.approx(expected, abs=1e-12)

    @pytest.mark.parametrize("c", [2.0, 0.5, 3.0])
    def test_scaling(self, c):
        g = with_sigma(su2_group(4), c * np.eye(3))
        assert casimir(su2_adjoint_rep(), g).chi == pytest.approx(2.0 / c, abs=1e-12)

    def test_degenerate_metric(self):
        g = with_sigma(u1_group(), [[0.0]])
        with pytest.raises(ModelError, match="degenerate metric"):
            casimir(u1_rep(1), g)

    def test_reducible_is_not_scalar(self):
        mixed = RepresentationModel(
            name="mixed",
            dim=3,
            rho_star=(np.block([[J2, np.zeros((2, 1))], [np.zeros((1, 3))]]),),
            generator=lambda g: np.eye(3),
        )
        with pytest.raises(ModelError, match="not scalar"):
            casimir(mixed, u1_group())

    def test_finite_group_rejected(self):
        with pytest.raises(ModelError, match="Lie group"):
            casimir(cyclic_irreps(cyclic_group(3))[0], cyclic_group(3))

    def test_ad_invariance(self):
        assert check_ad_invariance(su2_group(4)) < 1e-14
        skew = with_sigma(su2_group(4), np.diag([1.0, 2.0, 3.0]))
        assert check_ad_invariance(skew) == pytest.approx(2.0)

    def test_representation_defects(self):
        defects = representation_defects(su2_group(4), su2_adjoint_rep())
        assert max(defects.values()) < 1e-12


class TestDiscreteCasimir:
    def test_z4_values(self):
        g = cyclic_group(4)
        chis = {r.name: discrete_casimir(g, r) for r in cyclic_irreps(g)}
        assert chis == pytest.approx({"trivial": 0.0, "sign": 4.0, "rot1": 2.0})

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_converges_to_u1(self, n):
        errors = []
        for m in (8, 16, 32, 64):
            g = cyclic_group(m)
            rep = next(r for r in cyclic_irreps(g) if r.name == f"rot{n}")
            errors.append(abs(discrete_casimir(g, rep, weight=u1_fiber_weight(m)) - n * n))
        assert all(a / b >= 3 for a, b in zip(errors, errors[1:]))

    def test_fiber_weight(self):
        assert u1_fiber_weight(16, 1.0) == pytest.approx((16 / (2 * np.pi)) ** 2)


class TestIrreps:
    def test_catalog(self):
        assert [r.name for r in cyclic_irreps(cyclic_group(6))] == [
            "trivial",
            "sign",
            "rot1",
            "rot2",
        ]
        assert [r.name for r in dihedral_irreps(dihedral_group(3))] == [
            "trivial",
            "det",
            "std1",
        ]

    def test_commutant(self):
        z3 = cyclic_group(3)
        rot = cyclic_irreps(z3)[1]
        assert commutant_dimension(z3, rot) == 2
        s3 = dihedral_group(3)
        assert commutant_dimension(s3, dihedral_irreps(s3)[2]) == 1

    def test_dimensions_exhaust_regular_rep(self):
        s3 = dihedral_group(3)
        total = sum(
            r.dim * r.dim // commutant_dimension(s3, r) for r in dihedral_irreps(s3)
        )
        assert total == 6

    def test_fixed_space(self):
        z4 = cyclic_group(4)
        sign = cyclic_irreps(z4)[1]
        assert fixed_space(z4, sign, [0, 2]).shape == (1, 1)
        assert fixed_space(z4, sign).shape == (1, 0)

    def test_isotypic_projector(self):
        z3 = cyclic_group(3)
        act = regular_action(z3)
        proj = isotypic_projector(z3, cyclic_irreps(z3)[0], act.matrices(), 3)
        assert np.allclose(proj @ proj, proj)
        assert np.linalg.matrix_rank(proj) == 1

    def test_isotypic_projector_rotation_rank(self):
        z3 = cyclic_group(3)
        act = regular_action(z3)
        proj = isotypic_projector(z3, cyclic_irreps(z3)[1], act.matrices(), 3)
        assert np.allclose(proj @ proj, proj)
        assert np.linalg.matrix_rank(proj) == 2

    def test_isotypic_projector_sign(self):
        z2 = cyclic_group(2)
        act = regular_action(z2)
        proj = isotypic_projector(z2, cyclic_irreps(z2)[1], act.matrices(), 2)
        assert np.allclose(proj, [[0.5, -0.5], [-0.5, 0.5]])

    @pytest.mark.parametrize("m", [3, 4])
    def test_isotypic_projector_symmetric_and_equivariant(self, m):
        group = cyclic_group(m)
        act = regular_action(group)
        for rep in cyclic_irreps(group):
            proj = isotypic_projector(group, rep, act.matrices(), m)
            assert np.allclose(proj, proj.T)
            for g in range(m):
                t = np.kron(act.matrix(g), rep.rho(group.nodes[g]))
                assert np.allclose(t @ proj, proj @ t)
                assert np.allclose(t @ proj, proj)

    def test_isotypic_projector_dimensions(self):
        z3 = cyclic_group(3)
        act = regular_action(z3)
        with pytest.raises(ModelError, match="one action matrix per group node"):
            isotypic_projector(z3, cyclic_irreps(z3)[0], act.matrices()[:2], 3)



class TestLoading:
    def test_u1_document(self):
        group, reps = group_from_json({"kind": "u1", "nodes": 16, "reps": [{"weight": 2}]})
        assert casimir(reps[0], group).chi == pytest.approx(4.0)

    def test_finite_matrices_must_match_order(self):
        doc = {"kind": "finite", "table": [[0, 1], [1, 0]], "reps": [{"matrices": [[[1.0]]]}]}
        with pytest.raises(ModelError, match="one matrix per group element"):
            group_from_json(doc)

    def test_unknown_kind(self):
        with pytest.raises(ModelError, match="unknown group kind"):
            group_from_json({"kind": "so3"})
