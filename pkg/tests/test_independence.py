import random
from fractions import Fraction as F
from itertools import product

from hypothesis import given, settings
from hypothesis import strategies as st

from ergodograph.builders import build_example_63, build_tree_type, example_circuits
from ergodograph.flows import Circulation, circuit_vector
from ergodograph.graph import Chain, Graph, enumerate_circuits
from ergodograph.independence import (circuit_basis, express_dependency, format_coefficient_sum,
                                      independence_rows, is_extremal, private_edge_report,
                                      rational_rank)

from oracles import names, random_valid_graph, rank_oracle


def ex63():
    g = build_example_63(1, []).level(1)
    return g, example_circuits(g)


def test_figure_eight_is_independent():
    g = Graph(["h"], [Chain("p", "h", "h", 3), Chain("q", "h", "h", 2)])
    r = private_edge_report(g)
    assert r.independent
    assert dict((c.label, e) for c, e in r.items()) == {"p": ("h", "p.1"), "q": ("h", "q.1")}


def test_tree_type_level_is_independent():
    t = build_tree_type([3, 3], [])
    assert private_edge_report(t.level(1)).independent


def test_example_level_has_no_private_edges():
    g, cs = ex63()
    r = private_edge_report(g)
    assert not r.independent
    assert all(e is None for _, e in r.items())
    for e in g.edges:
        assert sum(e in c.edge_set() for c in cs) >= 2


def test_ranks():
    g, cs = ex63()
    assert rational_rank([circuit_vector(c) for c in cs]) == 3
    assert rational_rank([circuit_vector(cs[0])]) == 1
    assert rational_rank([]) == 0


def test_a_equals_c_plus_c_prime_minus_b():
    g, (a, b, c, c2) = ex63()
    assert express_dependency(g, a) == {c: 1, c2: 1, b: -1}


def test_private_edge_means_independent():
    g = Graph(["h"], [Chain("p", "h", "h", 3), Chain("q", "h", "h", 2)])
    assert express_dependency(g, enumerate_circuits(g)[0]) is None


def test_report_rows():
    g, _ = ex63()
    _, rows = independence_rows(g)
    assert rows[0] == ("a1+a2+d", "dependent", "-",
                       "(a1+a2+d) = (a1+b2+d) + (b1+a2+d) - (b1+b2+d)")


def test_format_coefficient_sum():
    assert format_coefficient_sum([("x", F(1)), ("y", F(2)), ("z", F(-1, 2))]) == \
        "(x) + 2 (y) - 1/2 (z)"
    assert format_coefficient_sum([("x", F(-1))]) == "-(x)"
    assert format_coefficient_sum([]) == "0"


def test_basis_is_maximal_and_independent():
    g, cs = ex63()
    basis = circuit_basis(g)
    assert len(basis) == 3
    assert rational_rank([circuit_vector(c) for c in basis]) == 3


def test_no_nonnegative_dependency_on_small_grid():
    # no combination with coefficients in {0, 1/2, ..., 2} reproduces a circuit
    g, cs = ex63()
    grid = [F(k, 2) for k in range(5)]
    for c0 in cs:
        others = [c for c in cs if c != c0]
        target = circuit_vector(c0)
        for coeffs in product(grid, repeat=len(others)):
            acc = sum((s * circuit_vector(c) for s, c in zip(coeffs, others)), Circulation(g))
            assert acc != target


def test_normalized_circuits_are_extremal():
    g, cs = ex63()
    assert all(is_extremal(g, c) for c in cs)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5), st.integers(0, 10**6))
def test_dependencies_reconstruct_and_have_a_negative_coefficient(n, seed):
    g = Graph.from_edges(map(str, range(n)), names(random_valid_graph(random.Random(seed), n, 0.5)))
    for c0 in enumerate_circuits(g):
        coeffs = express_dependency(g, c0)
        if coeffs is None:
            continue
        acc = sum((s * circuit_vector(c) for c, s in coeffs.items()), Circulation(g))
        assert acc == circuit_vector(c0)
        assert any(s < 0 for s in coeffs.values())


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6), st.integers(0, 10**6))
def test_criterion_agrees_with_sympy_rank(n, seed):
    g = Graph.from_edges(map(str, range(n)), names(random_valid_graph(random.Random(seed), n)))
    cs = enumerate_circuits(g)
    rank = rank_oracle([circuit_vector(c).as_vector() for c in cs])
    assert private_edge_report(g).independent == (rank == len(cs))
