"""Correspondence assignments: construction, totalisation, residuals."""

import itertools
import random

import pytest

from sparsecolour.correspondence import (
    AssignmentError,
    CorrespondenceAssignment,
    from_json_dict,
    from_lists,
    is_total,
    is_valid_colouring,
    residual_assignment,
    to_json_dict,
    totalize,
    truncate,
    uniform_lists,
    validate_assignment,
)
from sparsecolour.generators import complete_graph, cycle_graph, gnp_graph, path_graph


def all_total_colourings(c):
    return itertools.product(*c.colour_sets)


def enumerate_valid(g, c):
    return [
        f1
        for f1 in all_total_colourings(c)
        if is_valid_colouring(g, c, dict(enumerate(f1)))
    ]


def random_bijection_assignment(g, k, seed):
    rng = random.Random(seed)
    sets = tuple(tuple(range(k)) for _ in range(g.n))
    maps = {}
    for u, v in g.edges():
        perm = list(range(k))
        rng.shuffle(perm)
        maps[(u, v)] = {i: perm[i] for i in range(k)}
    return CorrespondenceAssignment(sets, maps)


class TestFromLists:
    def test_identity_on_shared_colours(self):
        g = complete_graph(2)
        c = from_lists(g, [{1, 2}, {1, 2}])
        assert c.edge_maps[(0, 1)] == {1: 1, 2: 2}
        assert is_valid_colouring(g, c, {0: 1, 1: 2})
        assert not is_valid_colouring(g, c, {0: 1, 1: 1})

    def test_disjoint_lists_give_empty_map(self):
        g = complete_graph(2)
        c = from_lists(g, [{1}, {2}])
        assert c.edge_maps[(0, 1)] == {}
        assert is_valid_colouring(g, c, {0: 1, 1: 2})

    def test_triangle_with_two_colours_not_colourable(self):
        g = complete_graph(3)
        c = from_lists(g, [{1, 2}] * 3)
        assert enumerate_valid(g, c) == []

    def test_empty_list_rejected(self):
        with pytest.raises(AssignmentError):
            from_lists(complete_graph(2), [{1}, set()])

    @pytest.mark.parametrize("seed", range(12))
    def test_round_trip_with_proper_list_colouring(self, seed):
        # validity under the embedded assignment <=> proper list colouring
        rng = random.Random(seed)
        n = rng.randint(2, 4)
        g = gnp_graph(n, 0.6, seed=seed)
        lists = [
            set(rng.sample(range(5), rng.randint(1, 3))) for _ in range(n)
        ]
        c = from_lists(g, lists)
        for f1 in itertools.product(*[sorted(l) for l in lists]):
            f = dict(enumerate(f1))
            proper = all(f[u] != f[v] for u, v in g.edges())
            assert is_valid_colouring(g, c, f) == proper


class TestTotalize:
    def test_completes_partial_map(self):
        g = complete_graph(2)
        c = CorrespondenceAssignment(((1, 2), (1, 2)), {(0, 1): {1: 2}})
        t = totalize(g, c)
        assert t.edge_maps[(0, 1)] == {1: 2, 2: 1}

    def test_empty_map_pairs_ascending(self):
        g = complete_graph(2)
        c = CorrespondenceAssignment(((1, 2), (1, 2)), {(0, 1): {}})
        t = totalize(g, c)
        assert t.edge_maps[(0, 1)] == {1: 1, 2: 2}

    def test_validity_implication_on_triangle(self):
        g = complete_graph(3)
        c = CorrespondenceAssignment(
            ((0, 1, 2),) * 3,
            {(0, 1): {0: 1}, (0, 2): {2: 2}, (1, 2): {1: 0, 2: 1}},
        )
        t = totalize(g, c)
        assert is_total(g, t)
        validate_assignment(g, t)
        for f1 in all_total_colourings(c):
            f = dict(enumerate(f1))
            if is_valid_colouring(g, t, f):
                assert is_valid_colouring(g, c, f)

    def test_unequal_sizes_rejected(self):
        g = complete_graph(2)
        c = CorrespondenceAssignment(((1, 2), (1, 2, 3)), {(0, 1): {}})
        with pytest.raises(AssignmentError):
            totalize(g, c)

    def test_idempotent_on_total_assignments(self):
        g = cycle_graph(4)
        c = totalize(g, uniform_lists(g, 3))
        again = totalize(g, c)
        assert again.edge_maps == c.edge_maps
        assert again.colour_sets == c.colour_sets


class TestTruncate:
    def test_keeps_smallest(self):
        g = complete_graph(2)
        c = from_lists(g, [{1, 2, 3}, {1, 2, 3}])
        t = truncate(c, 2)
        assert t.colour_sets == ((1, 2), (1, 2))

    def test_only_larger_sets_shrink(self):
        g = complete_graph(2)
        c = from_lists(g, [{1, 2}, {1, 2, 3}])
        t = truncate(c, 2)
        assert t.colour_sets == ((1, 2), (1, 2))

    def test_undersized_rejected(self):
        c = from_lists(complete_graph(2), [{1}, {1, 2}])
        with pytest.raises(AssignmentError):
            truncate(c, 2)

    def test_validity_monotone_under_truncation(self):
        g = complete_graph(2)
        c = from_lists(g, [{1, 2, 3}, {1, 2, 3}])
        t = truncate(c, 2)
        for f1 in all_total_colourings(t):
            f = dict(enumerate(f1))
            if is_valid_colouring(g, t, f):
                assert is_valid_colouring(g, c, f)


class TestIsValidColouring:
    def test_empty_colouring_valid(self):
        g = complete_graph(2)
        c = uniform_lists(g, 2)
        assert is_valid_colouring(g, c, {})

    def test_identity_map_equal_colours_invalid(self):
        g = complete_graph(2)
        c = from_lists(g, [{1, 2}, {1, 2}])
        assert not is_valid_colouring(g, c, {0: 1, 1: 1})

    def test_conflict_is_correspondence_not_equality(self):
        g = complete_graph(2)
        c = CorrespondenceAssignment(((1, 2), (1, 2)), {(0, 1): {1: 2, 2: 1}})
        assert not is_valid_colouring(g, c, {0: 1, 1: 2})
        assert is_valid_colouring(g, c, {0: 1, 1: 1})

    def test_orientation_independence(self):
        # matched colours agree regardless of which endpoint asks
        g = path_graph(3)
        c = random_bijection_assignment(g, 3, seed=9)
        for u, v in g.edges():
            for cu in c.colour_sets[u]:
                for cv in c.colour_sets[v]:
                    assert c.corresponds(u, v, cu, cv) == c.corresponds(
                        v, u, cv, cu
                    )

    @pytest.mark.parametrize("seed", range(6))
    def test_inversion_consistency(self, seed):
        g = gnp_graph(6, 0.6, seed=seed)
        c = random_bijection_assignment(g, 3, seed=seed)
        for (u, v), mp in c.edge_maps.items():
            back = c.map_between(v, u)
            for c1, c2 in mp.items():
                assert back[c2] == c1


class TestResidualAssignment:
    def test_all_coloured_gives_empty_instance(self):
        g = complete_graph(2)
        c = from_lists(g, [{1, 2}, {1, 2}])
        res = residual_assignment(g, c, {0: 1, 1: 2})
        assert res.graph.n == 0
        assert res.vertices == ()

    def test_single_colour_removed(self):
        g = complete_graph(2)
        c = from_lists(g, [{1, 2}, {1, 2}])
        res = residual_assignment(g, c, {0: 1})
        assert res.vertices == (1,)
        assert res.assignment.colour_sets == ((2,),)

    def test_path_middle_coloured(self):
        g = path_graph(3)
        c = uniform_lists(g, 2)
        res = residual_assignment(g, c, {1: 0})
        assert res.vertices == (0, 2)
        assert res.assignment.colour_sets == ((1,), (1,))
        # extension property by full enumeration of residual colourings
        for f1 in all_total_colourings(res.assignment):
            phi = {res.vertices[i]: col for i, col in enumerate(f1)}
            if is_valid_colouring(res.graph, res.assignment, dict(enumerate(f1))):
                assert is_valid_colouring(g, c, {**phi, 1: 0})

    def test_invalid_partial_rejected(self):
        g = complete_graph(2)
        c = from_lists(g, [{1}, {1}])
        with pytest.raises(AssignmentError):
            residual_assignment(g, c, {0: 1, 1: 1})

    @pytest.mark.parametrize("seed", range(15))
    def test_extension_property_exhaustive_small(self, seed):
        rng = random.Random(seed)
        n = rng.randint(2, 5)
        g = gnp_graph(n, 0.6, seed=seed)
        k = rng.randint(1, 3)
        c = (
            uniform_lists(g, k)
            if seed % 2
            else totalize(g, random_bijection_assignment(g, k, seed))
        )
        # pick a valid partial colouring by throwing darts
        f = {}
        for v in range(n):
            if rng.random() < 0.5:
                col = rng.choice(c.colour_sets[v])
                trial = {**f, v: col}
                if is_valid_colouring(g, c, trial):
                    f = trial
        res = residual_assignment(g, c, f)
        for f1 in itertools.product(*res.assignment.colour_sets):
            sub_col = dict(enumerate(f1))
            if is_valid_colouring(res.graph, res.assignment, sub_col):
                merged = dict(f)
                merged.update(
                    {res.vertices[i]: col for i, col in sub_col.items()}
                )
                assert is_valid_colouring(g, c, merged)


class TestJson:
    def test_round_trip(self):
        g = cycle_graph(4)
        c = totalize(g, uniform_lists(g, 3))
        again = from_json_dict(to_json_dict(c))
        assert again.colour_sets == c.colour_sets
        assert again.edge_maps == {k: dict(v) for k, v in c.edge_maps.items()}
