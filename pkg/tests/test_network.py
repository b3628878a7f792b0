import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from forkjoin_bounds.maxplus import EPS, mat_power
from forkjoin_bounds.network import (
    ParseError,
    Topology,
    TopologyError,
    fig1,
    format_topology,
    load_topology,
    longest_path_length,
    parse_topology,
    sinks,
    sources,
    standard_adjacency,
    tandem,
    validate_acyclic,
)

from oracles import longest_path_by_enumeration, paths_of_length, random_dag

FIG1_EDGES = [(1, 3), (1, 4), (2, 4), (3, 5), (4, 5)]


class TestValidation:
    def test_fig1_acyclic(self):
        assert validate_acyclic(5, FIG1_EDGES) == (True, [])

    def test_two_cycle(self):
        assert validate_acyclic(2, [(1, 2), (2, 1)]) == (False, [1, 2])

    def test_longer_cycle_reported_in_edge_order(self):
        ok, cycle = validate_acyclic(4, [(1, 2), (2, 4), (4, 3), (3, 2)])
        assert not ok
        assert cycle == [2, 4, 3]

    def test_edgeless(self):
        assert validate_acyclic(3, []) == (True, [])

    @pytest.mark.parametrize(
        "n, edges",
        [
            (2, [(1, 2), (2, 1)]),
            (2, [(1, 1)]),
            (3, [(1, 2), (1, 2)]),
            (3, [(1, 4)]),
            (0, []),
        ],
    )
    def test_invalid_topologies_rejected(self, n, edges):
        with pytest.raises(TopologyError):
            Topology(n, tuple(edges))


class TestDerived:
    def test_fig1_adjacency(self):
        g = standard_adjacency(fig1())
        zeros = {(i + 1, j + 1) for i in range(5) for j in range(5) if g[i, j] == 0}
        assert zeros == set(FIG1_EDGES)
        assert all(g[i, j] in (0.0, EPS) for i in range(5) for j in range(5))

    def test_edgeless_adjacency_is_null(self):
        assert standard_adjacency(Topology(4)).is_null()

    def test_tandem_adjacency(self):
        g = standard_adjacency(tandem(5))
        zeros = {(i + 1, j + 1) for i in range(5) for j in range(5) if g[i, j] == 0}
        assert zeros == {(1, 2), (2, 3), (3, 4), (4, 5)}

    @pytest.mark.parametrize("topology, p", [(fig1(), 2), (tandem(7), 6), (tandem(1), 0), (Topology(3), 0)])
    def test_longest_path(self, topology, p):
        assert longest_path_length(topology) == p

    def test_sources_and_sinks(self):
        assert sources(fig1()) == {1, 2}
        assert sinks(fig1()) == {5}
        assert sources(tandem(5)) == {1} and sinks(tandem(5)) == {5}
        assert sources(Topology(1)) == sinks(Topology(1)) == {1}

    def test_isolated_node_is_source_and_sink(self):
        t = Topology(3, ((1, 2),))
        assert 3 in sources(t) and 3 in sinks(t)

    def test_topological_order_respects_edges(self):
        t = Topology(4, ((4, 1), (3, 1), (1, 2)))
        order = t.topological_order()
        pos = {v: i for i, v in enumerate(order)}
        assert all(pos[i] < pos[j] for i, j in t.edges)


dags = st.integers(0, 2**32 - 1).map(lambda s: random_dag(random.Random(s), n_max=8))


@settings(max_examples=60)
@given(dags)
def test_power_support_matches_path_enumeration(dag):
    n, edges = dag
    t = Topology(n, tuple(edges))
    g = standard_adjacency(t)
    for q in range(1, n + 1):
        gq = mat_power(g, q)
        support = {(i + 1, j + 1) for i in range(n) for j in range(n) if gq[i, j] != EPS}
        assert support == paths_of_length(n, edges, q)
        assert all(gq[i, j] in (0.0, EPS) for i in range(n) for j in range(n))


@settings(max_examples=60)
@given(st.integers(0, 2**32 - 1).map(lambda s: random_dag(random.Random(s), n_max=12)))
def test_nilpotency_index_is_longest_path(dag):
    n, edges = dag
    t = Topology(n, tuple(edges))
    p = longest_path_length(t)
    assert p == longest_path_by_enumeration(n, edges)
    g = standard_adjacency(t)
    assert not mat_power(g, p).is_null()
    assert mat_power(g, p + 1).is_null()


class TestTextFormat:
    def test_parse_fig1(self):
        text = "# Fig 1\nnodes 5\nedge 1 3\nedge 1 4  # fork\nedge 2 4\n\nedge 3 5\nedge 4 5\n"
        assert parse_topology(text) == fig1()

    @given(st.integers(0, 2**32 - 1).map(lambda s: random_dag(random.Random(s), n_max=10)))
    def test_round_trip(self, dag):
        t = Topology(dag[0], tuple(dag[1]))
        text = format_topology(t)
        again = parse_topology(text)
        assert again == t
        assert format_topology(again) == text

    @pytest.mark.parametrize(
        "text, lineno",
        [
            ("edge 1 2\nnodes 2\n", 1),
            ("nodes 2\nedge 1\n", 2),
            ("nodes x\n", 1),
            ("nodes 2\nedge 1 3\n", 2),
            ("nodes 2\nedge 1 2\nedge 1 2\n", 3),
            ("nodes 3\n# c\nvertex 1\n", 3),
            ("nodes 2\nedge 1 2\nedge 2 1\n", 2),
            ("nodes 2\nnodes 3\n", 2),
            ("nodes 2\nedge 2 2\n", 2),
        ],
    )
    def test_parse_errors_carry_line_numbers(self, text, lineno):
        with pytest.raises(ParseError) as info:
            parse_topology(text, source="t.txt")
        assert info.value.lineno == lineno
        assert f"t.txt:{lineno}:" in str(info.value)

    def test_missing_header(self):
        with pytest.raises(ParseError) as info:
            parse_topology("# nothing\n")
        assert info.value.lineno is None

    def test_load_from_file(self, tmp_path):
        path = tmp_path / "tandem.txt"
        path.write_text(format_topology(tandem(4)))
        assert load_topology(path) == tandem(4)
