"""Line-oriented text formats for graphs, towers, circulations and measure prefixes.

Graph blocks::

    vertex <id>
    edge <src> <dst>
    path <name> <src> <dst> <length>     # chain with interior vertices <name>.1 ...

Tower files hold ``level <k> { ... }`` graph blocks and map lines::

    map <k+1> <src-vertex> <dst-vertex>
    route <k+1> <chain> <leg> ...        # leg: <chain> or <chain>[a:b]

Level 0 and the map onto it may be omitted; they are forced.  Rationals are
written ``p/q``; ``p`` alone is accepted on input.
"""

from __future__ import annotations

import re
from fractions import Fraction
from pathlib import Path
from typing import Iterable

from .covers import GraphHom, _check_route, route_from_sequence
from .errors import InvalidTower, ParseError
from .flows import Circulation
from .graph import Chain, Circuit, Graph, circuit_from_vertices, edge_chain_name
from .tower import CoverTower, MeasurePrefix, head_map

_LEG = re.compile(r"^(?P<name>[^\[\]]+)(?:\[(?P<a>\d+):(?P<b>\d+)\])?$")


def format_q(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_q(tok: str, line: int | None = None) -> Fraction:
    try:
        if not re.fullmatch(r"[+-]?\d+(/\d+)?", tok):
            raise ValueError
        return Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"expected a rational p/q, got {tok!r}", line) from None


def _lines(text: str):
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line.split()


def _int(tok: str, line: int) -> int:
    if not re.fullmatch(r"\d+", tok):
        raise ParseError(f"expected a nonnegative integer, got {tok!r}", line)
    return int(tok)


# -- graphs ------------------------------------------------------------------------

class _GraphBuilder:
    def __init__(self, name):
        self.name = name
        self.hubs: list[str] = []
        self.chains: list[Chain] = []
        self.names: set[str] = set()

    def feed(self, no, toks):
        kw = toks[0]
        if kw == "vertex" and len(toks) == 2:
            self.hubs.append(toks[1])
        elif kw == "edge" and len(toks) == 3:
            self._add(Chain(edge_chain_name(toks[1], toks[2]), toks[1], toks[2], 1), no, "edge")
        elif kw == "path" and len(toks) == 5:
            n = _int(toks[4], no)
            if n < 1:
                raise ParseError("path length must be positive", no)
            self._add(Chain(toks[1], toks[2], toks[3], n), no, "path")
        else:
            raise ParseError(f"unrecognized line: {' '.join(toks)}", no)

    def _add(self, chain, no, what):
        if chain.name in self.names:
            raise ParseError(f"duplicate {what} {chain.name}", no)
        self.names.add(chain.name)
        self.chains.append(chain)

    def build(self) -> Graph:
        return Graph(self.hubs, self.chains, name=self.name)


def parse_graph(text: str, name: str = "G") -> Graph:
    b = _GraphBuilder(name)
    for no, toks in _lines(text):
        b.feed(no, toks)
    return b.build()


def _graph_lines(g: Graph) -> list[str]:
    out = [f"vertex {h}" for h in g.hubs]
    for c in sorted(g.chains, key=lambda c: (c.src, c.dst, c.name)):
        if c.length == 1 and c.name == edge_chain_name(c.src, c.dst):
            out.append(f"edge {c.src} {c.dst}")
        else:
            out.append(f"path {c.name} {c.src} {c.dst} {c.length}")
    return out


def format_graph(g: Graph) -> str:
    return "\n".join(_graph_lines(g)) + "\n"


# -- towers -------------------------------------------------------------------------

def _parse_leg(target: Graph, tok: str, no: int):
    m = _LEG.match(tok)
    if not m or m["name"] not in target._chain_index:
        raise ParseError(f"unknown leg {tok!r}", no)
    ci = target.chain_index(m["name"])
    if m["a"] is None:
        return ci, 0, target.chains[ci].length
    return ci, int(m["a"]), int(m["b"])


def _format_leg(target: Graph, leg) -> str:
    ci, a, b = leg
    c = target.chains[ci]
    return c.name if (a, b) == (0, c.length) else f"{c.name}[{a}:{b}]"


def parse_tower(text: str) -> CoverTower:
    blocks: dict[int, _GraphBuilder] = {}
    vmaps: dict[int, dict[str, str]] = {}
    routes: dict[int, dict[str, list[str]]] = {}
    route_lines: dict[int, dict[str, int]] = {}
    current = None
    for no, toks in _lines(text):
        if current is not None:
            if toks == ["}"]:
                current = None
            else:
                current.feed(no, toks)
            continue
        kw = toks[0]
        if kw == "level":
            if len(toks) != 3 or toks[2] != "{":
                raise ParseError("expected 'level <k> {'", no)
            k = _int(toks[1], no)
            if k in blocks:
                raise ParseError(f"level {k} defined twice", no)
            current = blocks[k] = _GraphBuilder(f"G{k}")
        elif kw == "map":
            if len(toks) != 4:
                raise ParseError("expected 'map <level> <src> <dst>'", no)
            k = _int(toks[1], no)
            vm = vmaps.setdefault(k, {})
            if toks[2] in vm:
                raise ParseError(f"vertex {toks[2]} mapped twice at level {k}", no)
            vm[toks[2]] = toks[3]
        elif kw == "route":
            if len(toks) < 4:
                raise ParseError("expected 'route <level> <chain> <leg> ...'", no)
            k = _int(toks[1], no)
            routes.setdefault(k, {})[toks[2]] = toks[3:]
            route_lines.setdefault(k, {})[toks[2]] = no
        else:
            raise ParseError(f"unrecognized line: {' '.join(toks)}", no)
    if current is not None:
        raise ParseError("unterminated level block")
    if not blocks:
        raise ParseError("no levels")
    top = max(blocks)
    if 0 not in blocks:
        blocks[0] = None
    missing = [k for k in range(top + 1) if k not in blocks]
    if missing:
        raise ParseError(f"level {missing[0]} is missing")
    levels = [Graph.singleton() if blocks[0] is None else blocks[0].build()]
    levels += [blocks[k].build() for k in range(1, top + 1)]
    for k in sorted(set(vmaps) | set(routes)):
        if not 1 <= k <= top:
            raise ParseError(f"map into level {k - 1} from a level that does not exist")
    maps = []
    for k in range(1, top + 1):
        src, tgt = levels[k], levels[k - 1]
        if k == 1 and k not in vmaps and k not in routes:
            maps.append(head_map(src, tgt))
            continue
        maps.append(_build_map(src, tgt, vmaps.get(k, {}), routes.get(k, {}),
                               route_lines.get(k, {}), k))
    return CoverTower(levels, maps)


def _build_map(src: Graph, tgt: Graph, vm, rt, rlines, k) -> GraphHom:
    for name, no in rlines.items():
        if name not in src._chain_index:
            raise ParseError(f"route for unknown chain {name!r} at level {k}", no)
    for v in vm:
        if not src.has_vertex(v):
            raise InvalidTower(f"map {k}->{k - 1}: {v} is not a vertex of level {k}")
    missing = [h for h in src.hubs if h not in vm]
    if missing:
        raise InvalidTower(f"map {k}->{k - 1} is not total: no image for {missing[0]}")
    routes, images = [], []
    for ci, c in enumerate(src.chains):
        if c.name in rt:
            legs = [_parse_leg(tgt, tok, rlines[c.name]) for tok in rt[c.name]]
            routes.append(legs)
            images.append(None)
            continue
        seq = []
        for j in range(c.length + 1):
            v = src.vertex_at(ci, j)
            if v not in vm:
                raise InvalidTower(f"map {k}->{k - 1} is not total: no image for {v}")
            seq.append(vm[v])
        r = route_from_sequence(tgt, seq)
        routes.append(r)
        images.append(None if r is not None else tuple(seq))
    hom = GraphHom(src, tgt, {h: vm[h] for h in src.hubs}, routes, images)
    for ci, c in enumerate(src.chains):
        if c.name in rt:
            try:
                _check_route(tgt, routes[ci], hom.hub_map[c.src], hom.hub_map[c.dst], c)
            except ValueError as exc:
                raise InvalidTower(f"map {k}->{k - 1}: {exc}") from None
    return hom


def format_tower(t: CoverTower) -> str:
    out = []
    start = 1 if t.levels[0] == Graph.singleton() else 0
    for k in range(start, t.top + 1):
        out.append(f"level {k} {{")
        out += ["  " + x for x in _graph_lines(t.level(k))]
        out.append("}")
    for n, h in enumerate(t.maps):
        k = n + 1
        if k == 1 and start == 1:
            continue
        src, tgt = h.source, h.target
        if src.is_explicit:
            out += [f"map {k} {v} {h.image(v)}" for v in src.vertices]
            continue
        out += [f"map {k} {v} {h.hub_map[v]}" for v in src.hubs]
        for ci, c in enumerate(src.chains):
            legs = h.route(ci)
            if legs is None:
                out += [f"map {k} {src.vertex_at(ci, j)} {h.chain_image(ci, j)}"
                        for j in range(1, c.length)]
            else:
                out.append(f"route {k} {c.name} " + " ".join(_format_leg(tgt, l) for l in legs))
    return "\n".join(out) + "\n"


# -- circulations -----------------------------------------------------------------------

def parse_circulation(text: str, g: Graph) -> Circulation:
    """``<src> <dst> p/q`` edge lines and ``chain <name> p/q`` lines."""
    edges, chains = {}, {}
    for no, toks in _lines(text):
        if toks[0] == "chain" and len(toks) == 3:
            if toks[1] not in g._chain_index:
                raise ParseError(f"unknown chain {toks[1]!r}", no)
            chains[toks[1]] = parse_q(toks[2], no)
        elif len(toks) == 3:
            if not g.has_edge(toks[0], toks[1]):
                raise ParseError(f"({toks[0]}, {toks[1]}) is not an edge", no)
            if (toks[0], toks[1]) in edges:
                raise ParseError(f"edge {toks[0]} {toks[1]} given twice", no)
            edges[(toks[0], toks[1])] = parse_q(toks[2], no)
        else:
            raise ParseError(f"unrecognized line: {' '.join(toks)}", no)
    x = Circulation.from_edges(g, edges)
    return x + Circulation.from_chains(g, chains)


def format_circulation(x: Circulation) -> str:
    g = x.host
    if g.is_explicit:
        lines = [f"{u} {v} {format_q(w)}" for (u, v), w in x.edge_items()]
    else:
        lines = [f"chain {g.chains[ci].name} {format_q(w)}" for ci, w in x.chain_items()]
    return "".join(line + "\n" for line in lines)


# -- circuits and measure prefixes ------------------------------------------------------

def circuit_from_label(g: Graph, label: str) -> Circuit:
    """Inverse of :attr:`Circuit.label`."""
    try:
        if g.is_explicit:
            return circuit_from_vertices(g, label.split(">"))
        return Circuit.canonical(g, [g.chain_index(x) for x in label.split("+")])
    except (KeyError, ValueError) as exc:
        raise ValueError(f"{label!r} is not a circuit of {g.name}: {exc}") from None


def parse_prefix(text: str, t: CoverTower) -> MeasurePrefix:
    """``expression <level> <circuit-id> p/q`` lines, plus optional measure lines.

    Measure lines are ``measure <level> <src> <dst> p/q`` or
    ``measure <level> chain <name> p/q``.  Levels below the deepest
    expression get their shadows by pushforward when not given.
    """
    expr: dict[int, dict[Circuit, Fraction]] = {}
    meas: dict[int, list[str]] = {}
    for no, toks in _lines(text):
        if toks[0] == "expression" and len(toks) == 4:
            k = _int(toks[1], no)
            if k > t.top:
                raise ParseError(f"level {k} exceeds the tower", no)
            try:
                c = circuit_from_label(t.level(k), toks[2])
            except ValueError as exc:
                raise ParseError(str(exc), no) from None
            expr.setdefault(k, {})[c] = parse_q(toks[3], no)
        elif toks[0] == "measure" and len(toks) == 5:
            k = _int(toks[1], no)
            if k > t.top:
                raise ParseError(f"level {k} exceeds the tower", no)
            meas.setdefault(k, []).append(" ".join(toks[2:]))
        else:
            raise ParseError(f"unrecognized line: {' '.join(toks)}", no)
    if expr:
        deep = max(expr)
        prefix = MeasurePrefix.from_expression(t, deep, expr[deep])
    else:
        prefix = MeasurePrefix()
    for k, coeffs in expr.items():
        prefix.add_expression(k, coeffs)
    for k, lines in meas.items():
        prefix.measures[k] = parse_circulation("\n".join(lines), t.level(k))
    return prefix


def format_prefix(prefix: MeasurePrefix) -> str:
    out = []
    for k in sorted(prefix.expressions):
        for c, s in sorted(prefix.expressions[k].items(), key=lambda cs: cs[0].sort_key()):
            out.append(f"expression {k} {c.label} {format_q(s)}")
    for k in sorted(prefix.measures):
        for line in format_circulation(prefix.measures[k]).splitlines():
            out.append(f"measure {k} {line}")
    return "\n".join(out) + "\n"


# -- files ---------------------------------------------------------------------------------

def _read(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None


def read_graph(path) -> Graph:
    return parse_graph(_read(path), name=Path(path).stem)


def read_tower(path) -> CoverTower:
    return parse_tower(_read(path))


def write_text(path, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")


def iter_explicit_lines(g: Graph) -> Iterable[str]:
    """Graph block of ``g`` with every chain expanded into single edges."""
    return _graph_lines(g.explicit())
