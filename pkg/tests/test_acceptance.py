"""Exit criteria.  Each test prints one PASS/FAIL line; the lines are also
collected in the "acceptance criteria" section of the terminal summary.

Run just these with ``pytest -m acceptance``.
"""

import random
from fractions import Fraction as F

import pytest

from ergodograph.builders import build_example_63, build_odometer, build_tree_type
from ergodograph.covers import GraphHom, compose_covers, projected_walks, validate_cover
from ergodograph.errors import UnroutableRequest
from ergodograph.flows import (Circulation, circuit_vector, decompose_circulation,
                               pushforward)
from ergodograph.graph import Graph, enumerate_circuits
from ergodograph.independence import private_edge_report, rational_rank
from ergodograph.tower import (MeasurePrefix, ergodic_candidates, ergodic_mass_ratio,
                               minimality_scan, simplex_diameter, validate_tower)
from ergodograph.winding import certify_unique_ergodicity, compute_winding, contraction_step

from oracles import (all_valid_graphs, l1, line_graph, names, random_stochastic,
                     random_valid_graph)

pytestmark = pytest.mark.acceptance


def explicit(n, edges):
    return Graph.from_edges(map(str, range(n)), names(edges))


def random_tree(rng, size):
    return [None] + [rng.randrange(j) for j in range(1, size)]


def random_tree_tower(rng, levels, max_d=4, max_wind=3):
    """Tree-type tower with ``levels`` graphs above the head and positive windings."""
    while True:
        d = [rng.randint(1, max_d) for _ in range(levels)]
        parents = random_tree(rng, d[0])
        kids = [parents[1:].count(j) for j in range(d[0])]
        lengths = [k + rng.randint(1, 3) for k in kids]
        windings = [[[rng.randint(1, max_wind) for _ in range(d[k])] for _ in range(d[k + 1])]
                    for k in range(levels - 1)]
        shapes = [random_tree(rng, d[k + 1]) for k in range(levels - 1)]
        try:
            return build_tree_type(lengths, windings, parents, shapes)
        except UnroutableRequest:
            continue


def test_criterion_1_example_reproduction(criterion):
    with criterion(1, "two-measure example, 6 levels, exact", 60) as bad:
        t = build_example_63(6, [2, 4, 8, 16, 32], L1=2, D1=1)
        if not validate_tower(t):
            bad.append("tower does not validate")
        for n in range(1, 7):
            cs = t.circuits(n)
            if len(cs) != 4:
                bad.append(f"level {n}: {len(cs)} circuits")
                continue
            a, b, c, c2 = t.systems[n]
            if set(t.systems[n]) != set(cs):
                bad.append(f"level {n}: declared system differs from the circuits")
            if circuit_vector(a) + circuit_vector(b) != circuit_vector(c) + circuit_vector(c2):
                bad.append(f"level {n}: a+b != c+c'")
            if rational_rank([circuit_vector(x) for x in cs]) != 3:
                bad.append(f"level {n}: rank is not 3")
            rep = private_edge_report(t.level(n))
            if rep.independent or any(e is not None for e in rep.private_edges):
                bad.append(f"level {n}: some circuit has a private edge")
        for n in range(1, 6):
            scan = minimality_scan(t, n, 6, "edges")
            failed = [r.m for r in scan.rows if not r.passed]
            if failed:
                bad.append(f"edges minimality fails at n={n}, m={failed}")

        clusters = ergodic_candidates(t, 1, 2, 6, F(1, 10))
        if len(clusters) != 3:
            bad.append(f"{len(clusters)} clusters at tol 1/10, expected 3")
        else:
            by_label = {m[0].label: i for i, cl in enumerate(clusters) for m in cl.members}
            cc = {by_label[c.label] for c in t.systems[6][2:]}
            ends = [by_label[x.label] for x in t.systems[6][:2]]
            if len(cc) != 1 or len(set(ends)) != 2 or cc & set(ends):
                bad.append("clusters do not separate a, b and {c, c'}")
            else:
                pts = {x.label: p for x, p in (m for cl in clusters for m in cl.members)}
                a, b, c, c2 = (pts[x.label] for x in t.systems[6])
                mid = F(1, 2) * (a + b)
                if max(l1(dict(x.edge_items()), dict(mid.edge_items())) for x in (c, c2)) > F(1, 10):
                    bad.append("c/c' cluster is farther than 1/10 from the midpoint")

        a, b, c, c2 = t.systems[6]
        mid_cc = MeasurePrefix.from_expression(t, 6, {c: F(1, 2), c2: F(1, 2)})
        r_cc = ergodic_mass_ratio(t, mid_cc, 1, 6, F(1, 5))
        if not r_cc > F(99, 100):
            bad.append(f"mass ratio for s(c)=s(c')=1/2 is {r_cc}")
        mid_ab = MeasurePrefix.from_expression(t, 6, {a: F(1, 2), b: F(1, 2)})
        r_ab = ergodic_mass_ratio(t, mid_ab, 1, 6, F(1, 5))
        if r_ab != 0:
            bad.append(f"mass ratio for s(a)=s(b)=1/2 is {r_ab}, expected 0")


def test_criterion_2_contraction(criterion):
    rng = random.Random(2)
    with criterion(2, "contraction of mean-zero vectors, 1000 matrices", 10) as bad:
        for trial in range(1000):
            rows, cols = rng.randint(1, 6), rng.randint(1, 6)
            m = random_stochastic(rng, rows, cols, F(1, 20))
            x = [F(rng.randint(-20, 20), rng.randint(1, 9)) for _ in range(rows)]
            x[-1] -= sum(x)
            y, check = contraction_step(x, m)
            eps = min(v for r in m for v in r)
            norm_x = sum(abs(v) for v in x)
            norm_y = sum(abs(v) for v in y)
            if not (norm_y <= (1 - cols * eps) * norm_x and sum(y) == 0 and check.holds):
                bad.append(f"trial {trial}: |y|={norm_y}, |x|={norm_x}, eps={eps}")
                break


def test_criterion_3_certificate_bounds_measured_diameter(criterion):
    rng = random.Random(3)
    with criterion(3, "certificate bounds measured diameter, 50 tree towers", 300) as bad:
        for k in range(50):
            t = random_tree_tower(rng, 6)
            nw = {i: compute_winding(t, i)[1] for i in range(t.top)}
            for n in range(t.top):
                for m in range(n + 1, t.top + 1):
                    cert = certify_unique_ergodicity(t, n, m)
                    prod = F(1)
                    for i in range(n, m):
                        prod *= 1 - nw[i].shape[1] * nw[i].epsilon
                    measured = simplex_diameter(t, m, n)
                    if not measured <= cert.diam_n * prod or cert.bound != cert.diam_n * prod:
                        bad.append(f"tower {k}, n={n}, m={m}: {measured} > {cert.diam_n * prod}")
        odo = build_odometer(3)
        for n in (0, 1, 2):
            if certify_unique_ergodicity(odo, n, n + 1).bound != 0:
                bad.append(f"odometer bound at n={n}, depth 1 is not 0")


def test_criterion_4_decomposition(criterion):
    rng = random.Random(4)
    with criterion(4, "decomposition reconstructs circuit combinations, 1000 trials", 30) as bad:
        for trial in range(1000):
            n = rng.randint(1, 7)
            g = explicit(n, random_valid_graph(rng, n, density=0.3))
            cs = enumerate_circuits(g)
            picked = rng.sample(cs, rng.randint(1, min(len(cs), 6)))
            x = Circulation(g)
            for c in picked:
                x = x + rng.randint(1, 5) * circuit_vector(c)
            terms = decompose_circulation(x)
            back = Circulation(g)
            for c, s in terms:
                back = back + s * circuit_vector(c)
            if back != x or any(s <= 0 for _, s in terms) or len(terms) > len(x.support()):
                bad.append(f"trial {trial}: {x!r} -> {terms!r}")
                break


def _agrees(g):
    cs = enumerate_circuits(g)
    return private_edge_report(g).independent == (rational_rank([circuit_vector(c) for c in cs]) == len(cs))


def test_criterion_5_private_edges_match_rank(criterion):
    rng = random.Random(5)
    with criterion(5, "private-edge criterion matches rank", 300) as bad:
        for n in range(1, 5):
            for edges in all_valid_graphs(n):
                if not _agrees(explicit(n, edges)):
                    bad.append(f"disagreement on {sorted(edges)}")
                    break
        for _ in range(500):
            n = rng.randint(5, 6)
            edges = random_valid_graph(rng, n, density=rng.choice([0.2, 0.3, 0.4]))
            if not _agrees(explicit(n, edges)):
                bad.append(f"disagreement on {sorted(edges)}")
                break


def _walk_images_are_singletons(t, bad, tag):
    for m in range(1, t.top + 1):
        for n in range(m):
            chain = t.chain(m, n)
            for v in t.level(m).iter_vertices():
                k = len(projected_walks(chain, v, m - n))
                if k != 1:
                    bad.append(f"{tag}: {k} images from {v} at m={m}, n={n}")
                    return


def test_criterion_6_projective_walks(criterion):
    rng = random.Random(6)
    with criterion(6, "deep projections of walks are singletons", 60) as bad:
        ex = build_example_63(4, [2, 4, 8])
        _walk_images_are_singletons(ex, bad, "example")
        for k in range(10):
            _walk_images_are_singletons(random_tree_tower(rng, 4, max_wind=2), bad, f"tree {k}")
        shallow = projected_walks(ex.chain(2, 1), "v1", 8)
        if len(shallow) < 2:
            bad.append(f"shallow chain gave {len(shallow)} image, expected at least 2")


def _edge_oracle(vmap, x):
    out = {}
    for (u, w), s in x.edge_items():
        e = (vmap[u], vmap[w])
        out[e] = out.get(e, 0) + s
    return {e: s for e, s in out.items() if s}


def _random_vector(rng, g):
    return Circulation(g, {ci: F(rng.randint(-6, 6), rng.randint(1, 4)) for ci in range(len(g.chains))})


def _signed_invariant(rng, cs):
    # arbitrary vectors on compressed graphs can push to weights that vary along a chain
    x = Circulation(cs[0].graph)
    for c in cs:
        x = x + F(rng.randint(-5, 5), rng.randint(1, 3)) * circuit_vector(c)
    return x


def _random_invariant(rng, cs):
    x = Circulation(cs[0].graph)
    for c in rng.sample(cs, rng.randint(1, min(4, len(cs)))):
        x = x + F(rng.randint(1, 5), rng.randint(1, 3)) * circuit_vector(c)
    return x


def _laws(rng, cover, x, y, cs, bad, tag):
    al, be = F(rng.randint(-5, 5), rng.randint(1, 5)), F(rng.randint(-5, 5), rng.randint(1, 5))
    if pushforward(cover, al * x + be * y) != al * pushforward(cover, x) + be * pushforward(cover, y):
        bad.append(f"{tag}: not linear")
    z = _random_invariant(rng, cs)
    pz = pushforward(cover, z)
    if not (pz.is_invariant() and pz.is_nonnegative()):
        bad.append(f"{tag}: invariance lost")
    p = z * (1 / z.total())
    if not (p.is_probability() and pushforward(cover, p).is_probability()):
        bad.append(f"{tag}: probability lost")


def test_criterion_7_pushforward_laws(criterion):
    rng = random.Random(7)
    with criterion(7, "pushforward laws, 500 pairs", 30) as bad:
        for trial in range(300):
            n = rng.randint(1, 5)
            base_edges = random_valid_graph(rng, n, density=0.35)
            base = explicit(n, base_edges)
            verts, edges, vmap = line_graph(names(base_edges))
            top = Graph.from_edges(verts, edges)
            cover = validate_cover(GraphHom.from_vertex_map(top, base, vmap)).cover
            x, y = _random_vector(rng, top), _random_vector(rng, top)
            if dict(pushforward(cover, x).edge_items()) != _edge_oracle(vmap, x):
                bad.append(f"line graph {trial}: pushforward differs from edge sums")
            _laws(rng, cover, x, y, enumerate_circuits(top), bad, f"line graph {trial}")
        for trial in range(200):
            t = (random_tree_tower(rng, 4, max_wind=2) if trial % 2
                 else build_example_63(4, [rng.randint(1, 4) for _ in range(3)]))
            i, k = sorted(rng.sample(range(t.top + 1), 2))
            j = rng.randint(i, k)
            x, y = _signed_invariant(rng, t.circuits(k)), _signed_invariant(rng, t.circuits(k))
            _laws(rng, t.cover(k - 1), x, y, t.circuits(k), bad, f"tower {trial}")
            direct = pushforward(compose_covers(t.chain(k, i)), x)
            if t.push(t.push(x, k, j), j, i) != direct:
                bad.append(f"tower {trial}: xi({j},{i}) o xi({k},{j}) != xi({k},{i})")
