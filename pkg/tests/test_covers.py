import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ergodograph.builders import build_example_63, build_odometer
from ergodograph.covers import (Cover, GraphHom, compose_covers, map_walk, projected_walks,
                                validate_cover)
from ergodograph.errors import CoverError, EndpointMismatch
from ergodograph.graph import Graph, walks_from

from oracles import line_graph, names, random_valid_graph

TARGET = Graph.from_edges("01", [("0", "0"), ("0", "1"), ("1", "0")])


def hom(src_edges, vmap):
    src = Graph.from_edges(vmap, src_edges)
    return GraphHom.from_vertex_map(src, TARGET, vmap)


def test_identity_of_a_branching_graph_is_not_plus_directional():
    h = hom([("x", "x"), ("x", "y"), ("y", "x")], {"x": "0", "y": "1"})
    r = validate_cover(h)
    assert r.homomorphism and r.edge_surjective and not r.plus_directional
    assert r.direction_conflicts == ((("x", "x"), ("x", "y")),)


def test_valid_cover():
    verts, edges, vmap = line_graph({("0", "0"), ("0", "1"), ("1", "0")})
    h = GraphHom.from_vertex_map(Graph.from_edges(verts, edges), TARGET, vmap)
    r = validate_cover(h)
    assert r.valid and r.cover is not None
    assert r.summary().startswith("cover")


def test_not_a_homomorphism():
    h = hom([("x", "y"), ("y", "x"), ("y", "y")], {"x": "0", "y": "1"})
    r = validate_cover(h)
    assert not r.homomorphism
    assert r.non_edges == (("y", "y"),)
    with pytest.raises(CoverError):
        Cover.from_hom(h)


def test_not_edge_surjective():
    h = hom([("x", "y"), ("y", "x")], {"x": "0", "y": "1"})
    r = validate_cover(h)
    assert r.homomorphism and not r.edge_surjective
    assert r.uncovered == (("0", "0"),) and r.uncovered_count == 1


def test_not_plus_directional():
    edges = [("u", "v"), ("v", "u"), ("u", "w"), ("w", "u")]
    h = hom(edges, {"u": "0", "v": "0", "w": "1"})
    r = validate_cover(h)
    assert r.homomorphism and r.edge_surjective and not r.plus_directional
    assert "+directional" in r.summary()


def test_vertex_map_must_be_total():
    src = Graph.from_edges("xy", [("x", "y"), ("y", "x")])
    with pytest.raises(ValueError):
        GraphHom.from_vertex_map(src, TARGET, {"x": "0"})


def test_routes_are_checked():
    t = build_odometer(2)
    g2, g1 = t.level(2), t.level(1)
    with pytest.raises(ValueError):
        GraphHom.from_routes(g2, g1, {"v": "v"}, {"c": [(0, 0, 2)]})
    with pytest.raises(ValueError):
        GraphHom.from_routes(g2, g1, {"v": "v"}, {"c": [(0, 0, 1), (0, 0, 2), (0, 1, 2)]})


def test_compressed_image_of_interior_vertices():
    t = build_odometer(3)
    c = t.cover(2)
    assert [c.image(f"c.{k}") for k in range(1, 8)] == ["c.1", "c.2", "c.3", "v", "c.1", "c.2", "c.3"]


def test_composition_matches_stepwise_images():
    t = build_example_63(3, [2, 3])
    whole = compose_covers([t.cover(1), t.cover(2)])
    g3 = t.level(3)
    for v in list(g3.iter_vertices())[::97]:
        assert whole.image(v) == t.cover(1).image(t.cover(2).image(v))
    assert validate_cover(whole.hom).valid


def test_composition_checks_endpoints():
    t = build_odometer(3)
    with pytest.raises(EndpointMismatch):
        compose_covers([t.cover(2), t.cover(1)])


def test_projected_walks_collapse_at_depth():
    t = build_example_63(4, [2, 2, 2])
    for length in (1, 2, 3):
        g = t.level(1 + length)
        for v in list(g.iter_vertices())[::7]:
            assert len(projected_walks(t.chain(1 + length, 1), v, length)) == 1


def test_projected_walk_counterexample_shallow():
    t = build_example_63(2, [2])
    ws = projected_walks(t.chain(2, 1), "v1", 8)
    assert len(ws) >= 2


def test_map_walk():
    t = build_odometer(2)
    (w,) = walks_from(t.level(2), "v", 3)
    assert str(map_walk(t.cover(1), w)) == "v c.1 v c.1"


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 5), st.integers(0, 10**6))
def test_line_graph_is_a_cover(n, seed):
    edges = random_valid_graph(random.Random(seed), n)
    verts, new, vmap = line_graph(edges)
    src = Graph.from_edges(verts, new)
    tgt = Graph.from_edges(map(str, range(n)), names(edges))
    assert validate_cover(GraphHom.from_vertex_map(src, tgt, vmap)).valid


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 5), st.integers(0, 10**6))
def test_collapsing_a_vertex_pair_usually_breaks_the_cover(n, seed):
    # the report must agree with a direct check of the three conditions
    rng = random.Random(seed)
    edges = random_valid_graph(rng, n)
    verts, new, vmap = line_graph(edges)
    v = rng.choice(verts)
    vmap = dict(vmap, **{v: str(rng.randrange(n))})
    src = Graph.from_edges(verts, new)
    tgt = Graph.from_edges(map(str, range(n)), names(edges))
    r = validate_cover(GraphHom.from_vertex_map(src, tgt, vmap))
    images = {(vmap[a], vmap[b]) for a, b in new}
    tgt_edges = set(tgt.edges)
    assert r.homomorphism == images.issubset(tgt_edges)
    if r.homomorphism:
        assert r.edge_surjective == (images == tgt_edges)
        plus = all(len({vmap[b] for a2, b in new if a2 == a}) <= 1 for a in verts)
        assert r.plus_directional == plus
