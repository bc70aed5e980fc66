from fractions import Fraction as F

import pytest

from ergodograph.builders import (build_example_63, build_odometer, build_tree_type,
                                  integer_windings)
from ergodograph.errors import InvalidSchedule, UnroutableRequest
from ergodograph.flows import Circulation, circuit_vector
from ergodograph.graph import enumerate_circuits
from ergodograph.tower import minimality_scan, validate_tower
from ergodograph.winding import compute_winding


def test_odometer_lengths_and_circuits():
    t = build_odometer(2, base=2)
    assert [g.num_edges for g in t.levels] == [1, 2, 4]
    assert validate_tower(t)
    t3 = build_odometer(3, base=3)
    assert all(len(t3.circuits(n)) == 1 for n in range(4))
    assert compute_winding(t3, 2)[0].entries == ((3,),)


def test_odometer_minimality_everywhere():
    t = build_odometer(4)
    for n in range(4):
        assert all(r.passed for r in minimality_scan(t, n, 4).rows)


def test_example_first_level():
    g = build_example_63(1, []).level(1)
    assert (g.num_vertices, g.num_edges) == (7, 9)
    cs = enumerate_circuits(g)
    assert len(cs) == 4 and {c.period for c in cs} == {5}


def test_example_identity_and_lengths_at_every_level():
    t = build_example_63(5, [2, 4, 8, 16])
    L, D = 2, 1
    for n in range(1, 6):
        g = t.level(n)
        a, b, c, c2 = (circuit_vector(x) for x in t.systems[n])
        assert a + b - c - c2 == Circulation(g)
        lengths = {ch.name: ch.length for ch in g.chains}
        assert lengths == {"a1": L, "b1": L, "a2": L, "b2": L, "d": D}
        if n < 5:
            p = 2 ** n
            L, D = (p + 1) * (2 * L + D), 2 * (2 * L + D)


def test_example_first_edges_share_a_direction():
    t = build_example_63(4, [2, 4, 8])
    for n in range(1, 4):
        c = t.cover(n)
        up = t.level(n + 1)
        for a, b in (("a1", "b1"), ("a2", "b2")):
            ia, ib = up.chain_index(a), up.chain_index(b)
            assert c.hom.chain_image(ia, 1) == c.hom.chain_image(ib, 1)


def test_example_validates_at_four_levels():
    assert validate_tower(build_example_63(4, [2, 4, 8]))


def test_bad_schedules():
    with pytest.raises(InvalidSchedule):
        build_example_63(3, [2])
    with pytest.raises(InvalidSchedule):
        build_example_63(2, [0])
    with pytest.raises(InvalidSchedule):
        build_example_63(2, [2], L1=1)


def test_tree_type_two_circuits():
    t = build_tree_type([3, 3], [[[2, 1], [1, 2]]])
    assert validate_tower(t)
    assert compute_winding(t, 1)[0].entries == ((2, 1), (1, 2))


def test_tree_type_single_circuit_is_an_odometer():
    t = build_tree_type([2], [[[3]], [[3]]])
    assert [g.num_edges for g in t.levels] == [1, 2, 6, 18]
    assert validate_tower(t)


def test_tree_type_circuits_are_exactly_the_declared_ones():
    t = build_tree_type([3, 3, 1, 2], [[[1, 2, 1, 1], [2, 1, 1, 3], [1, 1, 1, 1]],
                                       [[1, 1, 2], [3, 1, 1]]],
                        parents=[None, 0, 1, 0], shapes=[[None, 0, 1]])
    assert validate_tower(t)
    for n in range(1, 4):
        assert set(t.circuits(n)) == set(t.systems[n])
    w, _ = compute_winding(t, 1)
    assert w.entries == ((1, 2, 1, 1), (2, 1, 1, 3), (1, 1, 1, 1))


def test_tree_type_hits_a_stochastic_target():
    target = [[F(1, 3), F(2, 3)], [F(1, 2), F(1, 2)]]
    req = integer_windings(target)
    assert req == [[2, 4], [3, 3]]
    t = build_tree_type([5, 5], [req])
    _, nw = compute_winding(t, 1)
    assert [list(r) for r in nw.entries] == target


def test_tree_type_unroutable():
    with pytest.raises(UnroutableRequest) as exc:
        build_tree_type([1], [[[1]] * 3])
    assert exc.value.vertex == "x1"
    with pytest.raises(UnroutableRequest):
        build_tree_type([1, 1], [])


def test_integer_windings_rejects_bad_rows():
    with pytest.raises(ValueError):
        integer_windings([[F(1, 2), F(1, 3)]])
    with pytest.raises(ValueError):
        integer_windings([[F(1), F(0)]])
