"""Exact rational edge weights: circulations, circuits and pushforwards.

Weights live on chains and are constant along each chain.  On an explicit
graph that is no restriction.  On a compressed graph every invariant vector
is chain-constant anyway, since Kirchhoff balance at an interior vertex
forces its in- and out-weight to agree.
"""

from __future__ import annotations

from collections import defaultdict
from fractions import Fraction
from typing import Iterator, Mapping

from .covers import Cover, GraphHom
from .errors import CapExceeded, NegativeWeight, NotChainConstant, NotInvariant
from .graph import Circuit, Edge, Graph

ZERO = Fraction(0)


class Circulation:
    """A weight vector on the edges of ``host`` (not necessarily invariant)."""

    __slots__ = ("host", "_w")

    def __init__(self, host: Graph, chain_weights: Mapping[int, Fraction] = ()):
        self.host = host
        self._w = {ci: Fraction(w) for ci, w in dict(chain_weights).items() if w != 0}

    @classmethod
    def from_edges(cls, host: Graph, weights: Mapping[Edge, Fraction]) -> Circulation:
        """Build from per-edge weights; omitted edges weigh zero."""
        per_chain: dict[int, dict[int, Fraction]] = defaultdict(dict)
        for (u, v), w in weights.items():
            pos = host.edge_position(u, v)
            if pos is None:
                raise KeyError(f"({u}, {v}) is not an edge of {host.name}")
            per_chain[pos[0]][pos[1]] = Fraction(w)
        out = {}
        for ci, ws in per_chain.items():
            length = host.chains[ci].length
            values = set(ws.values())
            if len(ws) < length:
                values.add(ZERO)
            if len(values) > 1:
                raise NotChainConstant(
                    f"weights vary along chain {host.chains[ci].name!r}; use an explicit graph")
            out[ci] = values.pop()
        return cls(host, out)

    @classmethod
    def from_chains(cls, host: Graph, weights: Mapping[str, Fraction]) -> Circulation:
        return cls(host, {host.chain_index(name): w for name, w in weights.items()})

    # -- access ---------------------------------------------------------------

    def chain_weight(self, ci: int) -> Fraction:
        return self._w.get(ci, ZERO)

    def weight(self, u: str, v: str) -> Fraction:
        pos = self.host.edge_position(u, v)
        if pos is None:
            raise KeyError(f"({u}, {v}) is not an edge of {self.host.name}")
        return self.chain_weight(pos[0])

    def support(self) -> tuple[int, ...]:
        return tuple(sorted(self._w))

    def chain_items(self) -> Iterator[tuple[int, Fraction]]:
        for ci in sorted(self._w):
            yield ci, self._w[ci]

    def edge_items(self) -> Iterator[tuple[Edge, Fraction]]:
        """Nonzero ``(edge, weight)`` pairs in edge order."""
        g = self.host
        pairs = []
        for ci, w in self._w.items():
            for k in range(g.chains[ci].length):
                pairs.append((g.edge_at(ci, k), w))
        yield from sorted(pairs)

    def as_vector(self) -> list[Fraction]:
        return [self.chain_weight(ci) for ci in range(len(self.host.chains))]

    def total(self) -> Fraction:
        chains = self.host.chains
        return sum((w * chains[ci].length for ci, w in self._w.items()), ZERO)

    def l1_norm(self) -> Fraction:
        chains = self.host.chains
        return sum((abs(w) * chains[ci].length for ci, w in self._w.items()), ZERO)

    # -- membership -------------------------------------------------------------

    def is_nonnegative(self) -> bool:
        return all(w > 0 for w in self._w.values())

    def is_invariant(self) -> bool:
        return not any(kirchhoff_residual(self).values())

    def is_probability(self) -> bool:
        return self.is_nonnegative() and self.total() == 1 and self.is_invariant()

    # -- arithmetic -------------------------------------------------------------

    def _check(self, other):
        if not isinstance(other, Circulation):
            return NotImplemented
        if other.host != self.host:
            raise ValueError("circulations live on different graphs")
        return other

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        out = dict(self._w)
        for ci, w in other._w.items():
            out[ci] = out.get(ci, ZERO) + w
        return Circulation(self.host, out)

    def __neg__(self):
        return Circulation(self.host, {ci: -w for ci, w in self._w.items()})

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __mul__(self, scalar):
        if not isinstance(scalar, (int, Fraction)):
            return NotImplemented
        return Circulation(self.host, {ci: w * scalar for ci, w in self._w.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Circulation):
            return NotImplemented
        return self.host == other.host and self._w == other._w

    def __hash__(self):
        return hash(frozenset(self._w.items()))

    def __repr__(self):
        body = ", ".join(f"{self.host.chains[ci].name}: {w}" for ci, w in self.chain_items())
        return f"Circulation({self.host.name}; {body})"


def kirchhoff_residual(x: Circulation) -> dict[str, Fraction]:
    """Inflow minus outflow at every hub.

    Interior chain vertices always balance because weights are constant
    along chains, so on an explicit graph this covers every vertex.
    """
    g = x.host
    res = {h: ZERO for h in g.hubs}
    for ci, w in x._w.items():
        c = g.chains[ci]
        res[c.dst] = res.get(c.dst, ZERO) + w
        res[c.src] = res.get(c.src, ZERO) - w
    return res


def circuit_vector(c: Circuit) -> Circulation:
    return Circulation(c.graph, {ci: Fraction(1) for ci in c.chains})


def normalized_circuit(c: Circuit) -> Circulation:
    """Weight ``1/Per(c)`` on every edge of ``c``."""
    w = Fraction(1, c.period)
    return Circulation(c.graph, {ci: w for ci in c.chains})


def l1_distance(x: Circulation, y: Circulation) -> Fraction:
    return (x - y).l1_norm()


def _edge_key(g: Graph, ci: int):
    return g.edge_at(ci, 0)


def decompose_circulation(x: Circulation, cap: int = 100_000) -> list[tuple[Circuit, Fraction]]:
    """Write a nonnegative invariant vector as a positive sum of circuits.

    Repeatedly: take the lightest positive edge, follow positive out-edges
    until a hub repeats, peel off the circuit so found with its smallest
    weight.  Ties go to the lexicographically smallest edge.  Each step
    zeroes at least one edge, so at most ``len(support)`` circuits appear.
    """
    if any(w < 0 for w in x._w.values()):
        raise NegativeWeight("decomposition needs nonnegative weights")
    if not x.is_invariant():
        raise NotInvariant("decomposition needs an invariant vector")
    g = x.host
    rem = dict(x._w)
    out: list[tuple[Circuit, Fraction]] = []
    while rem:
        e0 = min(rem, key=lambda ci: (rem[ci], _edge_key(g, ci)))
        path = [e0]
        seen = {g.chains[e0].src: 0}
        hub = g.chains[e0].dst
        while hub not in seen:
            seen[hub] = len(path)
            nxt = min((ci for ci in g.out_chains(hub) if ci in rem),
                      key=lambda ci: _edge_key(g, ci))
            path.append(nxt)
            hub = g.chains[nxt].dst
        cyc = path[seen[hub]:]
        alpha = min(rem[ci] for ci in cyc)
        for ci in cyc:
            rem[ci] -= alpha
            if rem[ci] == 0:
                del rem[ci]
        out.append((Circuit.canonical(g, cyc), alpha))
        if len(out) > cap:
            raise CapExceeded("decomposition circuits", cap, len(out))
    return out


def recombine(terms, host: Graph) -> Circulation:
    """``sum s(c) * c`` for ``(circuit, coefficient)`` pairs."""
    acc: dict[int, Fraction] = defaultdict(Fraction)
    for c, s in terms:
        for ci in c.chains:
            acc[ci] += s
    return Circulation(host, acc)


def pushforward(cover: Cover | GraphHom, x: Circulation) -> Circulation:
    """``(phi_* x)(e') = sum of x(e) over edges e with phi(e) = e'``."""
    tgt = cover.target
    if x.host != cover.source:
        raise ValueError("circulation does not live on the cover's source")
    full: dict[int, Fraction] = defaultdict(Fraction)
    partial: dict[int, list] = defaultdict(list)
    for ci, w in x._w.items():
        legs = cover.route(ci)
        if legs is None:
            raise ValueError("pushforward needs a homomorphism")
        for tci, a, b in legs:
            if a == 0 and b == tgt.chains[tci].length:
                full[tci] += w
            else:
                partial[tci].append((a, b, w))
    for tci, segs in partial.items():
        length = tgt.chains[tci].length
        delta: dict[int, Fraction] = defaultdict(Fraction)
        for a, b, w in segs:
            delta[a] += w
            delta[b] -= w
        run, values = ZERO, set()
        marks = sorted(delta) + [length]
        prev = 0
        for pos in marks:
            if pos > prev:
                values.add(run)
            if pos < length:
                run += delta[pos]
            prev = pos
        if len(values) > 1:
            raise NotChainConstant(
                f"pushforward varies along chain {tgt.chains[tci].name!r}")
        full[tci] += values.pop()
    return Circulation(tgt, full)
