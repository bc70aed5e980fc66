"""Finite directed graphs whose edge relation is surjective.

A graph is stored as a set of *hub* vertices joined by *chains*: directed
paths whose interior vertices have exactly one in-edge and one out-edge.
An explicit graph has every vertex as a hub and every edge as a chain of
length 1.  Towers of covers grow geometrically, so deep levels are built
with long chains and never expanded vertex by vertex.

The interior vertices of chain ``name`` are ``name.1``, ..., ``name.(L-1)``.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator

from .errors import CapExceeded

Edge = tuple[str, str]


@dataclass(frozen=True)
class Chain:
    name: str
    src: str
    dst: str
    length: int

    def __post_init__(self):
        if self.length < 1:
            raise ValueError(f"chain {self.name!r} has length {self.length}")


def edge_chain_name(u: str, v: str) -> str:
    return f"{u}>{v}"


class Graph:
    """A finite graph stored as hubs and chains.

    Construction is lenient: undeclared endpoints or missing in/out edges
    are reported by :func:`validate_graph`, not raised here.  Duplicate
    chain names are rejected because chains are addressed by name.
    """

    def __init__(self, hubs: Iterable[str], chains: Iterable[Chain] = (), name: str = "G"):
        self.name = name
        self.hubs: tuple[str, ...] = tuple(sorted(set(hubs)))
        self.chains: tuple[Chain, ...] = tuple(
            sorted(chains, key=lambda c: (c.src, c.dst, c.length, c.name))
        )
        self._hub_set = frozenset(self.hubs)
        self._chain_index: dict[str, int] = {}
        for i, c in enumerate(self.chains):
            if c.name in self._chain_index:
                raise ValueError(f"duplicate chain name {c.name!r}")
            self._chain_index[c.name] = i
        out: dict[str, list[int]] = defaultdict(list)
        inc: dict[str, list[int]] = defaultdict(list)
        for i, c in enumerate(self.chains):
            out[c.src].append(i)
            inc[c.dst].append(i)
        self._out = {h: tuple(sorted(v, key=self._first_step_key)) for h, v in out.items()}
        self._in = {h: tuple(v) for h, v in inc.items()}

    @classmethod
    def from_edges(cls, vertices: Iterable[str], edges: Iterable[Edge], name: str = "G") -> Graph:
        """Explicit graph: every vertex a hub, every edge its own chain."""
        vertices = list(vertices)
        chains = [Chain(edge_chain_name(u, v), u, v, 1) for u, v in edges]
        return cls(vertices, chains, name=name)

    @classmethod
    def singleton(cls, name: str = "G0") -> Graph:
        return cls.from_edges(["0"], [("0", "0")], name=name)

    # -- structure ---------------------------------------------------------

    def _first_step_key(self, ci: int):
        c = self.chains[ci]
        return (self.vertex_at(ci, 1), c.name)

    @property
    def is_explicit(self) -> bool:
        return all(c.length == 1 for c in self.chains)

    @cached_property
    def num_vertices(self) -> int:
        return len(self.hubs) + sum(c.length - 1 for c in self.chains)

    @cached_property
    def num_edges(self) -> int:
        return sum(c.length for c in self.chains)

    def chain_index(self, name: str) -> int:
        return self._chain_index[name]

    def out_chains(self, hub: str) -> tuple[int, ...]:
        return self._out.get(hub, ())

    def in_chains(self, hub: str) -> tuple[int, ...]:
        return self._in.get(hub, ())

    def is_hub(self, v: str) -> bool:
        return v in self._hub_set

    def vertex_at(self, ci: int, k: int) -> str:
        c = self.chains[ci]
        if k == 0:
            return c.src
        if k == c.length:
            return c.dst
        if not 0 < k < c.length:
            raise IndexError(f"offset {k} outside chain {c.name!r}")
        return f"{c.name}.{k}"

    def edge_at(self, ci: int, k: int) -> Edge:
        return (self.vertex_at(ci, k), self.vertex_at(ci, k + 1))

    def locate(self, v: str) -> tuple[int, int] | None:
        """Chain position ``(ci, k)`` of an interior vertex; None for a hub."""
        if v in self._hub_set:
            return None
        name, dot, k = v.rpartition(".")
        if dot and k.isdigit() and name in self._chain_index:
            ci = self._chain_index[name]
            k = int(k)
            if 0 < k < self.chains[ci].length and str(k) == v[len(name) + 1:]:
                return ci, k
        raise KeyError(v)

    def has_vertex(self, v: str) -> bool:
        try:
            self.locate(v)
        except KeyError:
            return False
        return True

    def successors(self, v: str) -> list[str]:
        pos = self.locate(v)
        if pos is None:
            return sorted({self.vertex_at(ci, 1) for ci in self.out_chains(v)})
        ci, k = pos
        return [self.vertex_at(ci, k + 1)]

    def predecessors(self, v: str) -> list[str]:
        pos = self.locate(v)
        if pos is None:
            return sorted({self.vertex_at(ci, self.chains[ci].length - 1) for ci in self.in_chains(v)})
        ci, k = pos
        return [self.vertex_at(ci, k - 1)]

    def edge_position(self, u: str, v: str) -> tuple[int, int] | None:
        """Chain position ``(ci, k)`` with ``edge_at(ci, k) == (u, v)``, if any."""
        try:
            pos = self.locate(u)
        except KeyError:
            return None
        if pos is None:
            for ci in self.out_chains(u):
                if self.vertex_at(ci, 1) == v:
                    return ci, 0
            return None
        ci, k = pos
        return (ci, k) if self.vertex_at(ci, k + 1) == v else None

    def has_edge(self, u: str, v: str) -> bool:
        return self.edge_position(u, v) is not None

    def iter_vertices(self) -> Iterator[str]:
        yield from self.hubs
        for ci, c in enumerate(self.chains):
            for k in range(1, c.length):
                yield self.vertex_at(ci, k)

    def iter_edges(self) -> Iterator[Edge]:
        for ci, c in enumerate(self.chains):
            for k in range(c.length):
                yield self.edge_at(ci, k)

    @property
    def vertices(self) -> tuple[str, ...]:
        return tuple(sorted(self.iter_vertices()))

    @property
    def edges(self) -> tuple[Edge, ...]:
        return tuple(sorted(self.iter_edges()))

    def explicit(self) -> Graph:
        """The same graph with every vertex promoted to a hub."""
        if self.is_explicit:
            return self
        return Graph.from_edges(self.iter_vertices(), self.iter_edges(), name=self.name)

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Graph):
            return NotImplemented
        return self.hubs == other.hubs and self.chains == other.chains

    def __hash__(self):
        return hash((self.hubs, self.chains))

    def __repr__(self):
        return (f"Graph({self.name!r}, {self.num_vertices} vertices, "
                f"{self.num_edges} edges, {len(self.chains)} chains)")

    # -- skeleton used by circuit enumeration -------------------------------

    @cached_property
    def _reduced(self):
        """Skeleton with pass-through hubs merged away.

        Returns ``(nodes, arcs)`` where ``arcs`` maps a kept hub to a list of
        ``(tuple of chain indices, target hub)``.
        """
        passthrough = {
            h for h in self.hubs
            if len(self.out_chains(h)) == 1 and len(self.in_chains(h)) == 1
        }
        keep = set(self.hubs) - passthrough
        # cycles made only of pass-through hubs keep their smallest hub
        seen = set()
        for h in self.hubs:
            if h not in passthrough or h in seen:
                continue
            run, x = [], h
            while x in passthrough and x not in seen:
                seen.add(x)
                run.append(x)
                x = self.chains[self.out_chains(x)[0]].dst
            if x in run:
                keep.add(min(run[run.index(x):]))
        arcs = {}
        for h in sorted(keep):
            arcs[h] = []
            for ci in self.out_chains(h):
                path = [ci]
                x = self.chains[ci].dst
                while x not in keep:
                    nxt = self.out_chains(x)[0]
                    path.append(nxt)
                    x = self.chains[nxt].dst
                arcs[h].append((tuple(path), x))
        return tuple(sorted(keep)), arcs


@dataclass(frozen=True)
class Walk:
    """A walk ``(v_0, ..., v_l)`` of length ``l >= 1``."""

    vertices: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        if len(self.vertices) < 2:
            raise ValueError("a walk has length at least 1")

    @property
    def length(self) -> int:
        return len(self.vertices) - 1

    @property
    def initial(self) -> str:
        return self.vertices[0]

    @property
    def terminal(self) -> str:
        return self.vertices[-1]

    def edges(self) -> list[Edge]:
        return list(zip(self.vertices, self.vertices[1:]))

    def is_valid_in(self, g: Graph) -> bool:
        return all(g.has_edge(u, v) for u, v in self.edges())

    def __add__(self, other: Walk) -> Walk:
        if self.terminal != other.initial:
            raise ValueError("walks do not connect")
        return Walk(self.vertices + other.vertices[1:])

    def __str__(self):
        return " ".join(self.vertices)


@dataclass(frozen=True)
class Circuit:
    """A circuit of ``graph`` as its cyclic sequence of chains.

    The rotation is canonical: the first chain leaves the smallest hub on
    the circuit.  In an explicit graph that is the smallest vertex.
    """

    graph: Graph = field(repr=False)
    chains: tuple[int, ...]

    def __hash__(self):
        return hash(self.chains)

    @classmethod
    def canonical(cls, graph: Graph, chains: Iterable[int]) -> Circuit:
        chains = tuple(chains)
        srcs = [graph.chains[ci].src for ci in chains]
        i = srcs.index(min(srcs))
        return cls(graph, chains[i:] + chains[:i])

    @cached_property
    def period(self) -> int:
        return sum(self.graph.chains[ci].length for ci in self.chains)

    @property
    def hub_sequence(self) -> tuple[str, ...]:
        return tuple(self.graph.chains[ci].src for ci in self.chains)

    @property
    def label(self) -> str:
        """Vertices joined by ``>`` on explicit graphs, chain names by ``+`` otherwise."""
        if self.graph.is_explicit:
            return ">".join(self.hub_sequence)
        return "+".join(self.graph.chains[ci].name for ci in self.chains)

    def sort_key(self):
        return (self.hub_sequence, tuple(self.graph.chains[ci].name for ci in self.chains))

    def iter_vertices(self) -> Iterator[str]:
        g = self.graph
        for ci in self.chains:
            for k in range(g.chains[ci].length):
                yield g.vertex_at(ci, k)

    @property
    def vertices(self) -> tuple[str, ...]:
        """``(v_0, ..., v_l)`` with ``v_l == v_0``."""
        vs = tuple(self.iter_vertices())
        return vs + vs[:1]

    def iter_edges(self) -> Iterator[Edge]:
        g = self.graph
        for ci in self.chains:
            for k in range(g.chains[ci].length):
                yield g.edge_at(ci, k)

    def vertex_set(self) -> frozenset[str]:
        return frozenset(self.iter_vertices())

    def edge_set(self) -> frozenset[Edge]:
        return frozenset(self.iter_edges())

    def walk(self) -> Walk:
        return Walk(self.vertices)

    def __str__(self):
        return self.label


def circuit_from_vertices(g: Graph, vertices: Iterable[str]) -> Circuit:
    """Canonical circuit through a cyclic vertex sequence.

    Accepts ``(v_0, ..., v_l)`` with ``v_l == v_0`` or the sequence without
    the repeated endpoint.
    """
    seq = list(vertices)
    if len(seq) > 1 and seq[0] == seq[-1]:
        seq.pop()
    if not seq or len(set(seq)) != len(seq):
        raise ValueError("not a circuit: repeated or missing vertices")
    hub_at = [i for i, v in enumerate(seq) if g.is_hub(v)]
    if not hub_at:
        raise ValueError("circuit passes through no hub")
    seq = seq[hub_at[0]:] + seq[:hub_at[0]]
    n = len(seq)
    chains, i = [], 0
    while i < n:
        u = seq[i]
        nxt = seq[(i + 1) % n]
        pos = g.edge_position(u, nxt)
        if pos is None or pos[1] != 0:
            raise ValueError(f"({u}, {nxt}) is not an edge leaving a hub")
        ci = pos[0]
        length = g.chains[ci].length
        for k in range(1, length + 1):
            if seq[(i + k) % n] != g.vertex_at(ci, k) or (k < length and i + k >= n):
                raise ValueError(f"sequence leaves chain {g.chains[ci].name!r}")
        chains.append(ci)
        i += length
    if i != n:
        raise ValueError("sequence does not close up")
    return Circuit.canonical(g, chains)


# -- validation ---------------------------------------------------------------

@dataclass(frozen=True)
class ValidationReport:
    missing_in: tuple[str, ...] = ()
    missing_out: tuple[str, ...] = ()
    undeclared: tuple[str, ...] = ()
    duplicate_edges: tuple[Edge, ...] = ()
    name_clashes: tuple[str, ...] = ()

    @property
    def valid(self) -> bool:
        return not (self.missing_in or self.missing_out or self.undeclared
                    or self.duplicate_edges or self.name_clashes)

    def __bool__(self):
        return self.valid

    def problems(self) -> list[str]:
        out = []
        out += [f"vertex {v} has no in-edge" for v in self.missing_in]
        out += [f"vertex {v} has no out-edge" for v in self.missing_out]
        out += [f"undeclared endpoint {v}" for v in self.undeclared]
        out += [f"duplicate edge {u} {v}" for u, v in self.duplicate_edges]
        out += [f"interior vertex name clashes with hub {v}" for v in self.name_clashes]
        return out


def _is_interior_name(g: Graph, v: str) -> bool:
    name, _, k = v.rpartition(".")
    if name not in g._chain_index or not k.isdigit():
        return False
    return 0 < int(k) < g.chains[g._chain_index[name]].length


def validate_graph(g: Graph) -> ValidationReport:
    """Check that every vertex has an in-edge and an out-edge.

    Interior chain vertices always do, so only hubs are inspected.
    """
    missing_in = tuple(h for h in g.hubs if not g.in_chains(h))
    missing_out = tuple(h for h in g.hubs if not g.out_chains(h))
    undeclared = sorted({x for c in g.chains for x in (c.src, c.dst) if not g.is_hub(x)})
    first_edges = defaultdict(int)
    for ci, c in enumerate(g.chains):
        first_edges[g.edge_at(ci, 0)] += 1
    dup = tuple(sorted(e for e, k in first_edges.items() if k > 1))
    clashes = tuple(h for h in g.hubs if _is_interior_name(g, h))
    return ValidationReport(missing_in, missing_out, tuple(undeclared), dup, clashes)


# -- circuits -------------------------------------------------------------------

def _cycles_through_start(start, allowed, arcs):
    """Johnson's search for elementary cycles through ``start``.

    ``arcs[v]`` lists ``(label, w)`` pairs; parallel arcs are distinct.
    Yields lists of arc labels.
    """
    def nbrs(v):
        return [(lab, w) for lab, w in arcs[v] if w in allowed]

    path_nodes = [start]
    path_labels = []
    blocked = {start}
    closed = set()
    B = defaultdict(set)
    stack = [(start, nbrs(start))]
    while stack:
        node, pending = stack[-1]
        if pending:
            lab, nxt = pending.pop()
            if nxt == start:
                yield path_labels + [lab]
                closed.update(path_nodes)
            elif nxt not in blocked:
                path_nodes.append(nxt)
                path_labels.append(lab)
                stack.append((nxt, nbrs(nxt)))
                closed.discard(nxt)
                blocked.add(nxt)
                continue
        if not pending:
            if node in closed:
                todo = {node}
                while todo:
                    x = todo.pop()
                    if x in blocked:
                        blocked.discard(x)
                        todo.update(B[x])
                        B[x].clear()
            else:
                for _, w in nbrs(node):
                    B[w].add(node)
            stack.pop()
            path_nodes.pop()
            if path_labels:
                path_labels.pop()


def _strong_component(start, allowed, arcs, rarcs):
    def reach(adj):
        seen = {start}
        todo = [start]
        while todo:
            v = todo.pop()
            for _, w in adj.get(v, ()):
                if w in allowed and w not in seen:
                    seen.add(w)
                    todo.append(w)
        return seen
    return reach(arcs) & reach(rarcs)


def iter_circuits(g: Graph) -> Iterator[Circuit]:
    """Every elementary cycle of ``g`` once, in no particular order."""
    nodes, arcs = g._reduced
    rarcs = defaultdict(list)
    for v, lst in arcs.items():
        for lab, w in lst:
            rarcs[w].append((lab, v))
    remaining = set(nodes)
    for s in nodes:
        comp = _strong_component(s, remaining, arcs, rarcs)
        for labels in _cycles_through_start(s, comp, arcs):
            yield Circuit.canonical(g, [ci for lab in labels for ci in lab])
        remaining.discard(s)


def enumerate_circuits(g: Graph, cap: int = 100_000) -> tuple[Circuit, ...]:
    """All circuits of ``g`` in deterministic order.

    Raises :class:`CapExceeded` when more than ``cap`` circuits exist.
    """
    found = []
    for c in iter_circuits(g):
        found.append(c)
        if len(found) > cap:
            raise CapExceeded("circuits", cap, len(found))
    found.sort(key=Circuit.sort_key)
    return tuple(found)


# -- walks ----------------------------------------------------------------------

def walks_from(g: Graph, v: str, length: int, cap: int = 100_000) -> tuple[Walk, ...]:
    """All walks of the given length starting at ``v``, in lexicographic order."""
    if length < 1:
        raise ValueError("walk length must be at least 1")
    if not g.has_vertex(v):
        raise KeyError(v)
    paths = [(v,)]
    for _ in range(length):
        nxt = []
        for p in paths:
            for w in g.successors(p[-1]):
                nxt.append(p + (w,))
                if len(nxt) > cap:
                    raise CapExceeded("walks", cap, len(nxt))
        paths = nxt
    return tuple(Walk(p) for p in paths)


def walk_image_sets(w: Walk | Circuit) -> tuple[frozenset[str], frozenset[Edge]]:
    """``(V(w), E(w))`` with duplicates collapsed."""
    if isinstance(w, Circuit):
        return w.vertex_set(), w.edge_set()
    return frozenset(w.vertices), frozenset(w.edges())
