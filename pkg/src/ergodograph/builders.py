"""Ready-made towers: odometers, the two-measure example, and tree-type towers.

All graphs are built chain-compressed, so deep levels with millions of
vertices stay cheap.  Every builder's output passes :func:`validate_tower`.
"""

from __future__ import annotations

from bisect import bisect_right
from fractions import Fraction
from itertools import accumulate
from math import lcm
from typing import Sequence

from .covers import GraphHom, Leg
from .errors import InvalidSchedule, UnroutableRequest
from .graph import Chain, Circuit, Graph
from .tower import CoverTower


def build_odometer(levels: int, base: int = 2) -> CoverTower:
    """Cycles of length ``base**n`` for ``n = 0..levels``, each wrapping ``base`` times."""
    if levels < 1:
        raise ValueError("need at least one level")
    if base < 2:
        raise ValueError("base must be at least 2")
    graphs, maps = [], []
    for n in range(1, levels + 1):
        g = Graph(["v"], [Chain("c", "v", "v", base ** n)], name=f"G{n}")
        if graphs:
            maps.append(GraphHom.from_routes(g, graphs[-1], {"v": "v"},
                                             {"c": [(0, 0, base ** (n - 1))] * base}))
        graphs.append(g)
    return CoverTower.from_sequence(graphs, maps)


# -- two ergodic measures ---------------------------------------------------------

_LOOPS = {
    "a": ("a1", "a2", "d"),
    "b": ("b1", "b2", "d"),
    "c": ("a1", "b2", "d"),
    "c'": ("b1", "a2", "d"),
}


def _example_level(n: int, L: int, D: int) -> Graph:
    chains = [Chain("a1", "v1", "v2", L), Chain("b1", "v1", "v2", L),
              Chain("a2", "v2", "v3", L), Chain("b2", "v2", "v3", L),
              Chain("d", "v3", "v1", D)]
    return Graph(["v1", "v2", "v3"], chains, name=f"G{n}")


def example_circuits(g: Graph) -> tuple[Circuit, ...]:
    """The circuits ``a, b, c, c'`` of an example level, in that order."""
    return tuple(Circuit.canonical(g, [g.chain_index(x) for x in _LOOPS[k]]) for k in _LOOPS)


def build_example_63(levels: int, p: Sequence[int], L1: int = 2, D1: int = 1) -> CoverTower:
    """Three hubs, four parallel segments and a return path, with two ergodic measures.

    ``p[k]`` is the winding exponent of the cover from level ``k + 2`` to
    level ``k + 1``.  Segment ``a1`` of the new level treads ``a`` ``p``
    times then ``b`` once, ``b1`` treads ``a`` once then ``b`` ``p`` times
    (likewise ``a2``, ``b2``), and ``d`` treads ``c`` then ``c'``.
    """
    if levels < 1:
        raise InvalidSchedule("need at least one level")
    if L1 < 2:
        raise InvalidSchedule("L1 must be at least 2 so parallel segments have interior vertices")
    if D1 < 1:
        raise InvalidSchedule("D1 must be at least 1")
    p = list(p)
    if len(p) < levels - 1:
        raise InvalidSchedule(f"{levels} levels need {levels - 1} schedule entries, got {len(p)}")
    if any(not isinstance(x, int) or x < 1 for x in p):
        raise InvalidSchedule("schedule entries must be positive integers")

    L, D = L1, D1
    graphs = [_example_level(1, L, D)]
    maps = []
    for n in range(1, levels):
        lower = graphs[-1]
        loop = {k: [(lower.chain_index(x), 0, lower.chains[lower.chain_index(x)].length)
                    for x in names] for k, names in _LOOPS.items()}
        pn = p[n - 1]
        L, D = (pn + 1) * (2 * L + D), 2 * (2 * L + D)
        g = _example_level(n + 1, L, D)
        first = loop["a"] * pn + loop["b"]
        second = loop["a"] + loop["b"] * pn
        routes = {"a1": first, "a2": first, "b1": second, "b2": second,
                  "d": loop["c"] + loop["c'"]}
        maps.append(GraphHom.from_routes(g, lower, {h: "v1" for h in g.hubs}, routes))
        graphs.append(g)
    systems = {n: example_circuits(g) for n, g in enumerate(graphs, start=1)}
    return CoverTower.from_sequence(graphs, maps, systems)


# -- tree-type towers ----------------------------------------------------------------------

def _check_tree(parents: Sequence[int | None], what: str) -> None:
    if not parents or parents[0] is not None:
        raise ValueError(f"{what}: circuit 0 is the root and has no parent")
    for j, q in enumerate(parents[1:], start=1):
        if q is None or not 0 <= q < j:
            raise ValueError(f"{what}: parent of circuit {j} must be an earlier circuit")


def _hub_name(j: int) -> str:
    return "r" if j == 0 else f"x{j}"


def _cactus(periods, parents, attach, name):
    """Circuits joined at single vertices along a tree.

    Circuit ``j`` starts at its connection to ``parents[j]`` (the base hub
    ``r`` for the root); child ``k`` hangs off position ``attach[k]`` of its
    parent.  Returns the graph and, per circuit, its hub positions and
    segment chain names.
    """
    stops = {j: {0: _hub_name(j)} for j in range(len(periods))}
    for k, q in enumerate(parents):
        if q is not None:
            stops[q][attach[k]] = _hub_name(k)
    chains, layout = [], []
    for j, P in enumerate(periods):
        marks = sorted(stops[j])
        segs = []
        for s, a in enumerate(marks):
            b = marks[s + 1] if s + 1 < len(marks) else P
            nm = f"s{j}_{s}"
            chains.append(Chain(nm, stops[j][a], stops[j][b % P], b - a))
            segs.append((nm, a, b))
        layout.append(segs)
    hubs = [_hub_name(j) for j in range(len(periods))]
    return Graph(hubs, chains, name=name), layout


def _tree_circuits(g: Graph, layout) -> tuple[Circuit, ...]:
    return tuple(Circuit.canonical(g, [g.chain_index(nm) for nm, _, _ in segs]) for segs in layout)


def _tour(g, layout, parents, row):
    """Closed walk (as full legs) treading circuit ``j`` ``row[j]`` times.

    Depth-first from the root's base hub; a child's tour is spliced in the
    first time its parent passes the connecting vertex.
    """
    children = {j: [] for j in range(len(layout))}
    for k, q in enumerate(parents):
        if q is not None:
            children[q].append(k)

    def walk(j):
        legs = []
        at = {_hub_name(k): k for k in children[j]}
        for lap in range(row[j]):
            for nm, _, _ in layout[j]:
                ci = g.chain_index(nm)
                c = g.chains[ci]
                if lap == 0 and c.src in at:
                    legs += walk(at[c.src])
                legs.append((ci, 0, c.length))
        return legs

    return walk(0)


def _candidate_edges(g: Graph):
    # chain-initial edges first, then the rest in offset order
    longest = max(c.length for c in g.chains)
    for k in range(longest):
        for ci, c in enumerate(g.chains):
            if k < c.length:
                yield ci, k


def _cyclic_slice(legs, cum, a, b) -> list[Leg]:
    """Legs for offsets ``a..b`` of a closed walk, wrapping past its end."""
    total = cum[-1]
    out = []
    while a < b:
        lo = a % total
        j = bisect_right(cum, lo) - 1
        ci, la, lb = legs[j]
        take = min(cum[j + 1] - lo, b - a)
        start = la + lo - cum[j]
        if out and out[-1][0] == ci and out[-1][2] == start:
            out[-1] = (ci, out[-1][1], start + take)
        else:
            out.append((ci, start, start + take))
        a += take
    return out


def build_tree_type(lengths: Sequence[int], windings: Sequence[Sequence[Sequence[int]]],
                    parents: Sequence[int | None] | None = None,
                    shapes: Sequence[Sequence[int | None]] | None = None) -> CoverTower:
    """A tower whose level graphs are trees of circuits.

    ``lengths`` are the periods of the level-1 circuits and ``parents`` their
    tree (``parents[0] is None``, every other parent an earlier index;
    default: a star on circuit 0).  ``windings[k][i][j]`` is how often
    circuit ``i`` of level ``k + 2`` treads circuit ``j`` of level ``k + 1``.
    ``shapes[k]`` is the tree of level ``k + 2`` (default: a star).

    Each connecting vertex gets its own alignment edge of the level below:
    both circuits through it start their image walks on that edge, which
    makes the cover +directional.  When the level below has too few edges
    for that, :class:`UnroutableRequest` names the vertex.
    """
    lengths = list(lengths)
    if parents is None:
        parents = [None] + [0] * (len(lengths) - 1)
    _check_tree(parents, "level 1")
    kids = [0] * len(lengths)
    for q in parents[1:]:
        kids[q] += 1
    for j, P in enumerate(lengths):
        if P < 1:
            raise ValueError(f"circuit {j} has non-positive length {P}")
        if P <= kids[j]:
            raise UnroutableRequest(
                f"circuit {j} of length {P} cannot host {kids[j]} connecting vertices",
                _hub_name(j))
    attach, used = {}, {j: 0 for j in range(len(lengths))}
    for k, q in enumerate(parents):
        if q is not None:
            used[q] += 1
            attach[k] = used[q]
    g, layout = _cactus(lengths, parents, attach, "G1")
    graphs, maps = [g], []
    systems = {1: _tree_circuits(g, layout)}

    for k, matrix in enumerate(windings):
        n = k + 1
        lower, low_layout, low_parents = graphs[-1], layout, parents
        rows = [list(r) for r in matrix]
        if any(len(r) != len(low_layout) for r in rows):
            raise ValueError(f"winding {n + 1}->{n} needs {len(low_layout)} columns")
        if any(x < 1 for r in rows for x in r):
            raise ValueError(f"winding {n + 1}->{n} has a non-positive entry")
        shape = list(shapes[k]) if shapes is not None and k < len(shapes) else None
        if shape is None:
            shape = [None] + [0] * (len(rows) - 1)
        _check_tree(shape, f"level {n + 1}")
        if len(shape) != len(rows):
            raise ValueError(f"level {n + 1} tree has {len(shape)} circuits, winding has {len(rows)} rows")

        tours = [_tour(lower, low_layout, low_parents, r) for r in rows]
        cums = [[0, *accumulate(b - a for _, a, b in t)] for t in tours]

        # alignment edge for each connecting vertex, plus the root's base edge
        base_edge = (tours[0][0][0], 0)
        pool = (e for e in _candidate_edges(lower) if e != base_edge)
        align = {0: base_edge}
        for j in range(1, len(rows)):
            e = next(pool, None)
            if e is None:
                raise UnroutableRequest(
                    f"level {n} has too few edges to align {len(rows) - 1} connecting vertices",
                    _hub_name(j))
            align[j] = e

        def first_at(i, e):
            ci, off = e
            for idx, (tci, _, _) in enumerate(tours[i]):
                if tci == ci:
                    return cums[i][idx] + off
            raise AssertionError("positive windings tread every edge")

        rot = {j: first_at(j, align[j]) for j in range(len(rows))}
        periods = [c[-1] for c in cums]
        pos = {}
        for j, q in enumerate(shape):
            if q is not None:
                pos[j] = (first_at(q, align[j]) - rot[q]) % periods[q]
        up, up_layout = _cactus(periods, shape, pos, f"G{n + 1}")

        hub_map = {}
        for j in range(len(rows)):
            ci, off = align[j]
            hub_map[_hub_name(j)] = lower.vertex_at(ci, off)
        routes = {}
        for j, segs in enumerate(up_layout):
            for nm, a, b in segs:
                routes[nm] = _cyclic_slice(tours[j], cums[j], rot[j] + a, rot[j] + b)
        maps.append(GraphHom.from_routes(up, lower, hub_map, routes))
        graphs.append(up)
        layout, parents = up_layout, shape
        systems[n + 1] = _tree_circuits(up, up_layout)
    return CoverTower.from_sequence(graphs, maps, systems)


def integer_windings(target: Sequence[Sequence[Fraction]]) -> list[list[int]]:
    """Integer requests realizing a row-stochastic matrix over equal periods.

    With every lower circuit of the same period, ``m(i, j) / sum_j m(i, j)``
    is the normalized entry, so scaling by the common denominator of the
    whole matrix works and keeps the upper periods equal as well.
    """
    rows = [[Fraction(x) for x in r] for r in target]
    for i, r in enumerate(rows):
        if sum(r) != 1 or any(x <= 0 for x in r):
            raise ValueError(f"row {i} is not a positive probability vector")
    den = lcm(*(x.denominator for r in rows for x in r))
    return [[int(x * den) for x in r] for r in rows]
