"""Graph type, sparsity instrumentation, and the pure graph procedures."""

import itertools

import pytest

from sparsecolour.generators import (
    complete_graph,
    cycle_graph,
    empty_graph,
    gnp_graph,
    path_graph,
    petersen_graph,
    random_regular_graph,
    star_graph,
)
from sparsecolour.graph import (
    DimacsError,
    Graph,
    GraphError,
    complement_matching,
    from_json_dict,
    greedy_colour,
    list_chromatic_upper,
    local_sparsity,
    min_degree_ordering,
    parse_dimacs,
    regularize,
    to_dimacs,
    to_json_dict,
    triangle_count,
)


def brute_neighbourhood_edges(g, v):
    # Independent recount: iterate all vertex pairs inside the neighbourhood.
    nbrs = list(g.neighbours(v))
    count = 0
    for i, a in enumerate(nbrs):
        for b in nbrs[i + 1 :]:
            if g.has_edge(a, b):
                count += 1
    return count


class TestGraphType:
    def test_rejects_self_loop(self):
        with pytest.raises(GraphError):
            Graph.from_edges(2, [(0, 0)])

    def test_rejects_asymmetry_and_unsorted(self):
        with pytest.raises(GraphError):
            Graph([[1], []])
        with pytest.raises(GraphError):
            Graph([[2, 1], [0, 2], [0, 1]])

    def test_duplicate_edges_collapse(self):
        g = Graph.from_edges(3, [(0, 1), (1, 0), (0, 1)])
        assert g.m == 1

    def test_induced_subgraph(self):
        g = cycle_graph(5)
        sub, old = g.induced([1, 2, 3])
        assert old == (1, 2, 3)
        assert list(sub.edges()) == [(0, 1), (1, 2)]

    def test_complement(self):
        g = cycle_graph(5)
        comp = g.complement()
        assert comp.m == 5
        for u, v in g.edges():
            assert not comp.has_edge(u, v)


class TestLocalSparsity:
    def test_complete_graph_is_fully_dense(self):
        report = local_sparsity(complete_graph(4))
        assert report.neighbourhood_edges == (3, 3, 3, 3)
        assert report.delta == 0.0

    def test_five_cycle_triangle_free(self):
        report = local_sparsity(cycle_graph(5))
        assert report.neighbourhood_edges == (0,) * 5
        assert report.delta == 1.0

    def test_random_cubic_matches_direct_recount(self):
        g = random_regular_graph(8, 3, seed=1)
        report = local_sparsity(g)
        counts = [brute_neighbourhood_edges(g, v) for v in range(8)]
        assert report.neighbourhood_edges == tuple(counts)
        assert report.delta == 1.0 - max(counts) / 3

    def test_degenerate_graph_rejected(self):
        with pytest.raises(GraphError, match="sparsity undefined"):
            local_sparsity(path_graph(2))

    def test_per_vertex_variant(self):
        g = star_graph(3)
        report = local_sparsity(g, per_vertex=True)
        assert report.per_vertex_delta[0] == 1.0
        assert report.per_vertex_delta[1] is None  # leaves have degree 1


class TestRegularize:
    def test_already_regular_unchanged(self):
        g = complete_graph(3)
        assert regularize(g) == g

    def test_path_doubles_to_six_cycle(self):
        g = path_graph(3)
        reg = regularize(g)
        assert reg.n == 6
        assert reg.is_regular() and reg.max_degree() == 2
        sub, _ = reg.induced(range(3))
        assert sub == g

    def test_star_iterates_doubling(self):
        g = star_graph(3)
        reg = regularize(g)
        assert reg.is_regular() and reg.max_degree() == 3
        assert reg.n == 4 * 2**2  # two doubling steps
        assert local_sparsity(reg).delta >= local_sparsity(g).delta

    @pytest.mark.parametrize("seed", range(5))
    def test_random_graphs_properties(self, seed):
        g = gnp_graph(9, 0.4, seed=seed)
        if g.max_degree() < 2:
            pytest.skip("degenerate sample")
        reg = regularize(g)
        assert reg.is_regular()
        assert reg.max_degree() == g.max_degree()
        sub, _ = reg.induced(range(g.n))
        assert sub == g
        assert local_sparsity(reg).delta >= local_sparsity(g).delta - 1e-12


def brute_force_max_matching(g):
    # Exponential oracle: maximum matching by trying all edge subsets.
    edges = list(g.edges())
    best = 0
    for r in range(len(edges), 0, -1):
        for combo in itertools.combinations(edges, r):
            seen = set()
            ok = True
            for u, v in combo:
                if u in seen or v in seen:
                    ok = False
                    break
                seen.add(u)
                seen.add(v)
            if ok:
                return r
    return best


class TestComplementMatching:
    def test_complete_graph_allows_empty(self):
        assert complement_matching(complete_graph(4), 4) == []

    def test_five_cycle(self):
        g = cycle_graph(5)
        matching = complement_matching(g, 2)
        assert len(matching) >= 2
        assert brute_force_max_matching(g.complement()) == 2

    def test_empty_graph_perfect_matching(self):
        matching = complement_matching(empty_graph(6), 1)
        assert len(matching) == 3

    @pytest.mark.parametrize("seed", range(8))
    def test_certificate_on_random_graphs(self, seed):
        from sparsecolour.cliques import clique_info

        g = gnp_graph(8, 0.5, seed=seed)
        omega = clique_info(g).omega
        matching = complement_matching(g, omega)
        matched = {v for e in matching for v in e}
        unmatched = [v for v in range(g.n) if v not in matched]
        for i, u in enumerate(unmatched):
            for v in unmatched[i + 1 :]:
                assert g.has_edge(u, v)
        assert len(matching) >= -((omega - g.n) // 2)


class TestMinDegreeOrdering:
    def test_triangle_ties_by_id(self):
        assert min_degree_ordering(complete_graph(3), [0, 1, 2]) == [0, 1, 2]

    def check_defining_property(self, g, order):
        remaining = set(order)
        for v in order:
            deg_v = len(g.neighbour_set(v) & remaining)
            assert all(
                deg_v <= len(g.neighbour_set(w) & remaining) for w in remaining
            )
            remaining.remove(v)

    def test_star_leaf_first(self):
        g = star_graph(3)
        order = min_degree_ordering(g, range(4))
        assert order[0] != 0
        self.check_defining_property(g, order)

    def test_path_endpoint_first(self):
        g = path_graph(4)
        order = min_degree_ordering(g, range(4))
        assert order[0] in (0, 3)
        self.check_defining_property(g, order)

    @pytest.mark.parametrize("seed", range(5))
    def test_property_on_random_graphs(self, seed):
        g = gnp_graph(9, 0.5, seed=seed)
        order = min_degree_ordering(g, range(9))
        self.check_defining_property(g, order)


class TestListChromaticUpper:
    @pytest.mark.parametrize("n,omega,expected", [(4, 2, 3), (5, 2, 3), (7, 7, 7)])
    def test_values(self, n, omega, expected):
        assert list_chromatic_upper(n, omega) == expected

    def test_domain(self):
        with pytest.raises(GraphError):
            list_chromatic_upper(3, 4)
        with pytest.raises(GraphError):
            list_chromatic_upper(3, 0)


def assert_proper(g, colouring):
    for u, v in g.edges():
        if u in colouring and v in colouring:
            assert colouring[u] != colouring[v]


class TestGreedyColour:
    def test_triangle_with_three_colours(self):
        g = complete_graph(3)
        result = greedy_colour(g, [0, 1, 2], [{1, 2, 3}] * 3)
        assert result.complete
        assert_proper(g, result.colouring)

    def test_forced_palettes_on_path(self):
        g = path_graph(3)
        result = greedy_colour(g, [0, 1, 2], [{1}, {2}, {1}])
        assert result.colouring == {0: 1, 1: 2, 2: 1}

    def test_tree_with_two_colours_bfs(self):
        g = Graph.from_edges(7, [(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (2, 6)])
        bfs = [0, 1, 2, 3, 4, 5, 6]
        result = greedy_colour(g, bfs, [{0, 1}] * 7)
        assert result.complete
        assert_proper(g, result.colouring)

    def test_exhausted_palette_reports_failure(self):
        g = complete_graph(3)
        result = greedy_colour(g, [0, 1, 2], [{1, 2}] * 3)
        assert not result.complete
        assert result.failed == (2,)
        assert_proper(g, result.colouring)

    @pytest.mark.parametrize("seed", range(5))
    def test_degree_plus_one_always_succeeds(self, seed):
        g = gnp_graph(10, 0.5, seed=seed)
        palettes = [set(range(g.degree(v) + 1)) for v in range(10)]
        result = greedy_colour(g, list(range(10)), palettes)
        assert result.complete
        assert_proper(g, result.colouring)


class TestTriangleCount:
    @pytest.mark.parametrize("seed", range(4))
    def test_matches_brute_force(self, seed):
        g = gnp_graph(9, 0.5, seed=seed)
        brute = sum(
            1
            for a, b, c in itertools.combinations(range(9), 3)
            if g.has_edge(a, b) and g.has_edge(a, c) and g.has_edge(b, c)
        )
        assert triangle_count(g) == brute


class TestDimacs:
    def test_round_trip(self):
        g = petersen_graph()
        assert parse_dimacs(to_dimacs(g)) == g

    def test_comments_and_format(self):
        g = parse_dimacs("c hello\np edge 3 2\ne 1 2\ne 2 3\n")
        assert list(g.edges()) == [(0, 1), (1, 2)]

    def test_rejects_self_loop_with_line(self):
        with pytest.raises(DimacsError, match="line 2"):
            parse_dimacs("p edge 3 1\ne 2 2\n")

    def test_rejects_duplicate_with_line(self):
        with pytest.raises(DimacsError, match="line 3"):
            parse_dimacs("p edge 3 2\ne 1 2\ne 2 1\n")

    def test_rejects_range_violation(self):
        with pytest.raises(DimacsError, match="line 2"):
            parse_dimacs("p edge 3 1\ne 1 4\n")

    def test_missing_problem_line(self):
        with pytest.raises(DimacsError):
            parse_dimacs("e 1 2\n")

    def test_json_round_trip(self):
        g = petersen_graph()
        assert from_json_dict(to_json_dict(g)) == g

    @pytest.mark.parametrize("seed", range(6))
    def test_round_trip_random_graphs(self, seed):
        g = gnp_graph(15, 0.3, seed=seed)
        assert parse_dimacs(to_dimacs(g)) == g
        assert from_json_dict(to_json_dict(g)) == g
