from __future__ import annotations

import json

import networkx as nx
import numpy as np
import pytest

from kkspectra.core.group_rep import cyclic_group, cyclic_irreps, dihedral_group
from kkspectra.core.mm_space import (
    FiniteMMSpace,
    IsometricAction,
    PointMap,
    SeparationError,
    ball_truncation,
    bump_dimension_bound,
    cayley_circle,
    check_submetry,
    delta_V,
    equivariance_defect,
    graph_metric_space,
    induced_quotient_map,
    isometry_defect,
    quotient,
    regular_action,
    space_from_json,
    load_distance_csv,
    space_to_json,
    subgroups,
    vague_gap,
)
from kkspectra.scenarios.delta_v_bump import orbit_space
from kkspectra.utils.errors import ModelError


def rotation_action(n: int, step: int, order: int) -> IsometricAction:
    perms = np.array([(np.arange(n) + step * g) % n for g in range(order)], dtype=np.int64)
    return IsometricAction(cyclic_group(order), perms)


def reflection_action(n: int) -> IsometricAction:
    perms = np.array([np.arange(n), (-np.arange(n)) % n], dtype=np.int64)
    return IsometricAction(cyclic_group(2), perms)


class TestSpaces:
    def test_cycle_distances(self):
        space = cayley_circle(6)
        assert space.dist[0].tolist() == [0, 1, 2, 3, 2, 1]
        assert space.diameter() == 3
        space.validate()

    def test_disconnected_pairs_are_infinite(self):
        g = nx.Graph()
        g.add_nodes_from(range(3))
        g.add_edge(0, 1)
        space = graph_metric_space(g)
        assert np.isinf(space.dist[0, 2])

    def test_asymmetric_rejected(self):
        space = FiniteMMSpace(dist=np.array([[0.0, 1.0], [2.0, 0.0]]), measure=np.ones(2))
        with pytest.raises(ModelError, match="not symmetric"):
            space.validate()

    def test_triangle_rejected(self):
        d = np.array([[0.0, 1.0, 5.0], [1.0, 0.0, 1.0], [5.0, 1.0, 0.0]])
        with pytest.raises(ModelError, match="triangle inequality"):
            FiniteMMSpace(dist=d, measure=np.ones(3)).validate()

    def test_distance_csv(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("0,1,2\n1,0,1\n2,1,0\n")
        space = load_distance_csv(str(path), measure=[1, 2, 1])
        space.validate()
        assert space.dist[0, 2] == 2
        assert space.measure.tolist() == [1.0, 2.0, 1.0]

    def test_ball_truncation(self):
        sub, inclusion = ball_truncation(cayley_circle(8), 0, 2)
        assert sub.n_points == 5
        assert inclusion.mapping.tolist() == [0, 1, 2, 6, 7]

    def test_json_keeps_action(self):
        space = cayley_circle(6)
        act = rotation_action(6, 2, 3)
        loaded, loaded_act = space_from_json(json.loads(space_to_json(space, act)))
        assert np.array_equal(loaded.dist, space.dist)
        assert loaded_act is not None
        assert np.array_equal(loaded_act.perms, act.perms)


class TestActions:
    def test_validate(self):
        rotation_action(6, 2, 3).validate(cayley_circle(6))

    def test_non_isometry_rejected(self):
        perms = np.array([[0, 1, 2, 3], [1, 0, 2, 3]], dtype=np.int64)
        act = IsometricAction(cyclic_group(2), perms)
        with pytest.raises(ModelError, match="not an isometry"):
            act.validate(cayley_circle(4))

    def test_orbits(self):
        assert rotation_action(6, 2, 3).orbits().tolist() == [0, 1, 0, 1, 0, 1]

    def test_subgroups(self):
        assert len(subgroups(cyclic_group(4))) == 3
        assert len(subgroups(dihedral_group(3))) == 6


class TestQuotient:
    def test_circle_mod_rotation(self):
        space = cayley_circle(6)
        q, pi = quotient(space, rotation_action(6, 2, 3))
        assert q.dist.tolist() == [[0, 1], [1, 0]]
        assert q.measure.tolist() == [3, 3]
        assert pi.mapping.tolist() == [0, 1, 0, 1, 0, 1]

    def test_submetry(self):
        space = cayley_circle(12)
        assert check_submetry(space, rotation_action(12, 3, 4)).ok

    def test_half_turn_quotient(self):
        space = cayley_circle(4)
        act = rotation_action(4, 2, 2)
        q, pi = quotient(space, act)
        assert q.dist.tolist() == [[0, 1], [1, 0]]
        assert q.measure.tolist() == [2, 2]
        assert check_submetry(space, act, q, pi).ok

    def test_stretched_quotient_fails(self):
        space = cayley_circle(4)
        act = rotation_action(4, 2, 2)
        q, pi = quotient(space, act)
        stretched = FiniteMMSpace(dist=q.dist * 2, measure=q.measure)
        report = check_submetry(space, act, stretched, PointMap(space, stretched, pi.mapping))
        assert not report.ok
        assert report.witness == (0, 1.0, 1)

    def test_reflection_with_fixed_points(self):
        space = cayley_circle(4)
        act = reflection_action(4)
        act.validate(space)
        assert act.stabilizer(0) == [0, 1] and act.stabilizer(1) == [0]
        q, pi = quotient(space, act)
        assert pi.mapping.tolist() == [0, 1, 2, 1]
        assert q.dist.tolist() == [[0, 1, 2], [1, 0, 1], [2, 1, 0]]
        assert q.measure.tolist() == [1, 2, 1]
        assert check_submetry(space, act).ok


    def test_identity_is_exact(self):
        space = cayley_circle(6)
        phi = PointMap(space, space, np.arange(6))
        act = rotation_action(6, 2, 3)
        assert isometry_defect(phi) == 0
        assert equivariance_defect(phi, act, act) == 0

    def test_induced_map_within_bound(self):
        space = cayley_circle(12)
        act = rotation_action(12, 3, 4)
        mapping = np.arange(12)
        mapping[5] = 6
        phi = PointMap(space, space, mapping)
        report = induced_quotient_map(phi, act, act, test_functions=[np.arange(3.0)])
        assert report.eps_equivariance == 1
        assert report.defect <= report.bound
        for lhs, rhs in report.measure_rows:
            assert lhs <= rhs + 1e-12

    def test_vague_gap(self):
        space = cayley_circle(6)
        assert vague_gap(PointMap(space, space, np.arange(6)), [np.arange(6.0)]) == 0
        collapsed = PointMap(space, space, np.array([0, 0, 2, 3, 4, 5]))
        assert vague_gap(collapsed, [np.eye(6)[0], np.eye(6)[1]]) == pytest.approx(1.0)

    def test_invalid_section(self):
        space = cayley_circle(6)
        act = rotation_action(6, 2, 3)
        phi = PointMap(space, space, np.arange(6))
        with pytest.raises(ModelError, match="invalid section"):
            induced_quotient_map(phi, act, act, section=[0, 2])


class TestBumps:
    @pytest.mark.parametrize("q", [1, 3, 6])
    def test_gram_rank(self, q):
        space, act = orbit_space(4, q, 10.0)
        for rep in cyclic_irreps(act.group):
            bump = bump_dimension_bound(space, act, rep, [o * 4 for o in range(q)], 0.4)
            assert bump.count == q

    def test_separation(self):
        space, act = orbit_space(4, 3, 10.0)
        rep = cyclic_irreps(act.group)[0]
        with pytest.raises(SeparationError, match="4δ-separated"):
            bump_dimension_bound(space, act, rep, [0, 4, 8], 3.0)

    def test_delta_v(self):
        space, act = orbit_space(4, 2, 10.0)
        trivial, sign, rot = cyclic_irreps(act.group)
        candidates = subgroups(act.group)
        assert np.all(np.isinf(delta_V(space, act, trivial, candidates).values))
        assert np.all(delta_V(space, act, sign, candidates).values == 1)
        assert np.all(delta_V(space, act, rot, candidates).values == 1)

    def test_delta_v_cayley_circle(self):
        space = cayley_circle(4)
        z4 = cyclic_group(4)
        act = regular_action(z4)
        rot = cyclic_irreps(z4)[2]
        report = delta_V(space, act, rot, subgroups(z4))
        assert [h.name for h in report.admissible] == ["<0,2>", "<0,1>"]
        assert report.values.tolist() == [2, 2, 2, 2]

    def test_delta_v_vanishes_at_fixed_points(self):
        space = cayley_circle(4)
        act = reflection_action(4)
        sign = cyclic_irreps(act.group)[1]
        report = delta_V(space, act, sign, subgroups(act.group))
        assert report.values.tolist() == [0, 2, 0, 2]

