"""Graph homomorphisms, the cover property, composition and projected walks.

A homomorphism is stored as the images of the source hubs plus, for every
source chain, the *route* its image walk takes in the target: a sequence of
legs ``(target_chain, a, b)`` covering offsets ``a..b`` of that chain.  Only
the first leg may start inside a chain and only the last may end inside one.
"""

from __future__ import annotations

from bisect import bisect_right
from collections import defaultdict
from dataclasses import dataclass, field
from itertools import accumulate
from typing import Mapping, Sequence

from .errors import CapExceeded, CoverError, EndpointMismatch
from .graph import Edge, Graph, Walk

Leg = tuple[int, int, int]

_MAX_EXAMPLES = 20


def merge_legs(legs) -> list[Leg]:
    out: list[Leg] = []
    for leg in legs:
        if out and out[-1][0] == leg[0] and out[-1][2] == leg[1]:
            out[-1] = (leg[0], out[-1][1], leg[2])
        else:
            out.append(tuple(leg))
    return out


def route_from_sequence(target: Graph, seq: Sequence[str]) -> list[Leg] | None:
    """Route of a vertex sequence, or None if some step is not an edge."""
    legs: list[Leg] = []
    for u, v in zip(seq, seq[1:]):
        pos = target.edge_position(u, v)
        if pos is None:
            return None
        ci, k = pos
        if legs and legs[-1][0] == ci and legs[-1][2] == k:
            legs[-1] = (ci, legs[-1][1], k + 1)
        else:
            legs.append((ci, k, k + 1))
    return legs


class GraphHom:
    """A vertex map ``source -> target``; not necessarily a homomorphism.

    Build one with :meth:`from_vertex_map` (any total map) or
    :meth:`from_routes` (compact form, a homomorphism by construction).
    """

    def __init__(self, source: Graph, target: Graph, hub_map: Mapping[str, str],
                 routes: Sequence[Sequence[Leg] | None],
                 images: Sequence[Sequence[str] | None] | None = None):
        self.source = source
        self.target = target
        self.hub_map = dict(hub_map)
        self._routes = [tuple(r) if r is not None else None for r in routes]
        self._images = list(images) if images is not None else [None] * len(self._routes)
        self._cum: dict[int, list[int]] = {}

    @classmethod
    def from_vertex_map(cls, source: Graph, target: Graph, vmap: Mapping[str, str]) -> GraphHom:
        missing = [h for h in source.hubs if h not in vmap]
        if missing:
            raise ValueError(f"vertex map is not total: no image for {missing[0]!r}")
        routes, images = [], []
        for ci, c in enumerate(source.chains):
            try:
                seq = [vmap[source.vertex_at(ci, k)] for k in range(c.length + 1)]
            except KeyError as exc:
                raise ValueError(f"vertex map is not total: no image for {exc.args[0]!r}") from None
            r = route_from_sequence(target, seq)
            routes.append(r)
            images.append(None if r is not None else tuple(seq))
        return cls(source, target, {h: vmap[h] for h in source.hubs}, routes, images)

    @classmethod
    def from_routes(cls, source: Graph, target: Graph, hub_map: Mapping[str, str],
                    routes: Mapping[str, Sequence[Leg]]) -> GraphHom:
        """Compact constructor; ``routes`` maps source chain names to legs."""
        missing = [h for h in source.hubs if h not in hub_map]
        if missing:
            raise ValueError(f"vertex map is not total: no image for {missing[0]!r}")
        ordered = []
        for ci, c in enumerate(source.chains):
            if c.name not in routes:
                raise ValueError(f"no route for chain {c.name!r}")
            legs = merge_legs(routes[c.name])
            _check_route(target, legs, hub_map[c.src], hub_map[c.dst], c)
            ordered.append(legs)
        return cls(source, target, hub_map, ordered)

    def route(self, ci: int) -> tuple[Leg, ...] | None:
        return self._routes[ci]

    def _offsets(self, ci: int) -> list[int]:
        cum = self._cum.get(ci)
        if cum is None:
            cum = [0, *accumulate(b - a for _, a, b in self._routes[ci])]
            self._cum[ci] = cum
        return cum

    def chain_image(self, ci: int, k: int) -> str:
        """Image of the vertex at offset ``k`` of source chain ``ci``."""
        if self._images[ci] is not None:
            return self._images[ci][k]
        legs = self._routes[ci]
        cum = self._offsets(ci)
        j = min(bisect_right(cum, k) - 1, len(legs) - 1)
        tci, a, _ = legs[j]
        return self.target.vertex_at(tci, a + k - cum[j])

    def image(self, v: str) -> str:
        pos = self.source.locate(v)
        if pos is None:
            return self.hub_map[v]
        return self.chain_image(*pos)

    def vmap(self) -> dict[str, str]:
        return {v: self.image(v) for v in self.source.iter_vertices()}

    def subroute(self, ci: int, a: int, b: int) -> list[Leg]:
        """Legs of the image of offsets ``a..b`` of source chain ``ci``."""
        legs = self._routes[ci]
        cum = self._offsets(ci)
        out = []
        j = bisect_right(cum, a) - 1
        while j < len(legs) and cum[j] < b:
            tci, la, lb = legs[j]
            lo = max(a, cum[j]) - cum[j] + la
            hi = min(b, cum[j + 1]) - cum[j] + la
            if hi > lo:
                out.append((tci, lo, hi))
            j += 1
        return out


def _check_route(target: Graph, legs, start: str, end: str, chain) -> None:
    if not legs:
        raise ValueError(f"empty route for chain {chain.name!r}")
    total = 0
    here = start
    for i, (tci, a, b) in enumerate(legs):
        if not 0 <= tci < len(target.chains):
            raise ValueError(f"route of {chain.name!r} uses unknown chain index {tci}")
        length = target.chains[tci].length
        if not 0 <= a < b <= length:
            raise ValueError(f"leg {tci}[{a}:{b}] out of range in route of {chain.name!r}")
        if (a > 0 and i > 0) or (b < length and i < len(legs) - 1):
            raise ValueError(f"route of {chain.name!r} leaves a chain midway")
        if target.vertex_at(tci, a) != here:
            raise ValueError(f"route of {chain.name!r} is disconnected at leg {i}")
        here = target.vertex_at(tci, b)
        total += b - a
    if here != end:
        raise ValueError(f"route of {chain.name!r} ends at {here!r}, expected {end!r}")
    if total != chain.length:
        raise ValueError(f"route of {chain.name!r} has length {total}, chain has {chain.length}")


@dataclass(frozen=True)
class CoverReport:
    homomorphism: bool
    edge_surjective: bool
    plus_directional: bool
    non_edges: tuple[Edge, ...] = ()
    uncovered: tuple[Edge, ...] = ()
    uncovered_count: int = 0
    direction_conflicts: tuple[tuple[Edge, Edge], ...] = ()
    cover: Cover | None = field(default=None, compare=False, repr=False)

    @property
    def valid(self) -> bool:
        return self.homomorphism and self.edge_surjective and self.plus_directional

    def __bool__(self):
        return self.valid

    def summary(self) -> str:
        if self.valid:
            return "cover: homomorphism, edge-surjective, +directional"
        parts = []
        if not self.homomorphism:
            parts.append("not a homomorphism (e.g. image of %s %s is not an edge)" % self.non_edges[0])
        if not self.edge_surjective:
            parts.append(f"not edge-surjective ({self.uncovered_count} target edges missed,"
                         f" e.g. {self.uncovered[0][0]} {self.uncovered[0][1]})")
        if not self.plus_directional:
            (u, v), (_, w) = self.direction_conflicts[0]
            parts.append(f"not +directional (edges {u} {v} and {u} {w})")
        return "; ".join(parts)


class Cover:
    """A validated cover; obtain one through :func:`validate_cover`."""

    def __init__(self, hom: GraphHom):
        self.hom = hom

    @property
    def source(self) -> Graph:
        return self.hom.source

    @property
    def target(self) -> Graph:
        return self.hom.target

    def image(self, v: str) -> str:
        return self.hom.image(v)

    def route(self, ci: int) -> tuple[Leg, ...]:
        return self.hom.route(ci)

    @classmethod
    def from_hom(cls, hom: GraphHom) -> Cover:
        report = validate_cover(hom)
        if report.cover is None:
            raise CoverError(report)
        return report.cover

    def __repr__(self):
        return f"Cover({self.source.name} -> {self.target.name})"


def validate_cover(h: GraphHom) -> CoverReport:
    """Check the homomorphism law, edge-surjectivity and +directionality."""
    src, tgt = h.source, h.target

    non_edges = []
    intervals: dict[int, list[tuple[int, int]]] = defaultdict(list)
    for ci, c in enumerate(src.chains):
        legs = h.route(ci)
        if legs is not None:
            for tci, a, b in legs:
                intervals[tci].append((a, b))
            continue
        seq = h._images[ci]
        for k, (u, v) in enumerate(zip(seq, seq[1:])):
            pos = tgt.edge_position(u, v)
            if pos is None:
                non_edges.append(src.edge_at(ci, k))
            else:
                intervals[pos[0]].append((pos[1], pos[1] + 1))

    uncovered, uncovered_count = [], 0
    for tci, c in enumerate(tgt.chains):
        reach = 0
        for a, b in sorted(intervals.get(tci, ())):
            if a > reach:
                uncovered_count += a - reach
                uncovered.extend(tgt.edge_at(tci, k) for k in range(reach, min(a, reach + _MAX_EXAMPLES)))
            reach = max(reach, b)
        if reach < c.length:
            uncovered_count += c.length - reach
            uncovered.extend(tgt.edge_at(tci, k)
                             for k in range(reach, min(c.length, reach + _MAX_EXAMPLES)))

    conflicts = []
    for u in src.hubs:
        outs = src.out_chains(u)
        if len(outs) < 2:
            continue
        first = outs[0]
        img = h.chain_image(first, 1)
        for ci in outs[1:]:
            if h.chain_image(ci, 1) != img:
                conflicts.append((src.edge_at(first, 0), src.edge_at(ci, 0)))

    report = CoverReport(
        homomorphism=not non_edges,
        edge_surjective=uncovered_count == 0,
        plus_directional=not conflicts,
        non_edges=tuple(non_edges),
        uncovered=tuple(uncovered[:_MAX_EXAMPLES]),
        uncovered_count=uncovered_count,
        direction_conflicts=tuple(conflicts),
    )
    if report.valid:
        object.__setattr__(report, "cover", Cover(h))
    return report


def _compose_pair(outer: Cover, inner: Cover) -> GraphHom:
    src = inner.source
    hub_map = {v: outer.image(inner.image(v)) for v in src.hubs}
    routes = []
    for ci in range(len(src.chains)):
        legs = []
        for tci, a, b in inner.route(ci):
            legs.extend(outer.hom.subroute(tci, a, b))
        routes.append(tuple(merge_legs(legs)))
    return GraphHom(src, outer.target, hub_map, routes)


def compose_covers(covers: Sequence[Cover]) -> Cover:
    """``covers[0] o covers[1] o ... o covers[-1]``.

    ``covers[i]`` maps ``G_{n+i+1}`` onto ``G_{n+i}``, so the composite maps
    the source of the last cover onto the target of the first.
    """
    if not covers:
        raise ValueError("nothing to compose")
    for outer, inner in zip(covers, covers[1:]):
        if inner.target != outer.source:
            raise EndpointMismatch(
                f"{inner!r} does not land on the source of {outer!r}")
    result = covers[-1]
    for outer in reversed(covers[:-1]):
        result = Cover.from_hom(_compose_pair(outer, result))
    return result


def map_walk(c: Cover | GraphHom, w: Walk) -> Walk:
    return Walk(tuple(c.image(v) for v in w.vertices))


def projected_walks(covers: Sequence[Cover], v: str, length: int,
                    cap: int = 100_000) -> tuple[Walk, ...]:
    """``phi_{m,n}(W_v(G_m, length))`` for ``covers = [phi_n, ..., phi_{m-1}]``.

    Walks are extended one step at a time; two partial walks ending at the
    same vertex with the same image are merged, since their extensions have
    the same images.  For a chain of covers with ``m >= n + length`` the
    result is a singleton.
    """
    if not covers:
        raise ValueError("need at least one cover")
    source = covers[-1].source
    cache: dict[str, str] = {}

    def project(x):
        y = cache.get(x)
        if y is None:
            y = x
            for c in reversed(covers):
                y = c.image(y)
            cache[x] = y
        return y

    states = {((project(v),), v)}
    for _ in range(length):
        nxt = set()
        for prefix, u in states:
            for w in source.successors(u):
                nxt.add((prefix + (project(w),), w))
            if len(nxt) > cap:
                raise CapExceeded("projected walk states", cap, len(nxt))
        states = nxt
    return tuple(Walk(p) for p in sorted({p for p, _ in states}))
