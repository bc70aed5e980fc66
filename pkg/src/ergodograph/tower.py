"""Towers of covers ``G_0 <- G_1 <- ... <- G_N`` and their finite-depth analyses.

Everything here is computed at finite depth.  Minimality and ergodicity are
statements about the inverse limit; the reports only ever say what holds up
to the top level of the tower.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .covers import Cover, CoverReport, GraphHom, projected_walks, validate_cover
from .errors import InvalidTower, MissingExpression
from .flows import Circulation, circuit_vector, l1_distance, normalized_circuit, pushforward
from .graph import Circuit, Graph, ValidationReport, enumerate_circuits, validate_graph


def head_map(g1: Graph, g0: Graph) -> GraphHom:
    """The only map from ``g1`` onto the singleton graph."""
    (v0,) = g0.hubs
    routes = {c.name: [(0, 0, 1)] * c.length for c in g1.chains}
    return GraphHom.from_routes(g1, g0, {h: v0 for h in g1.hubs}, routes)


class CoverTower:
    """Levels ``G_0..G_N`` and maps ``maps[n]: G_{n+1} -> G_n``.

    The maps may fail validation; :func:`validate_tower` reports that and
    :meth:`cover` refuses to hand out an invalid one.
    """

    def __init__(self, levels: Sequence[Graph], maps: Sequence[GraphHom | Cover],
                 systems: Mapping[int, Sequence[Circuit]] | None = None):
        if len(maps) != len(levels) - 1:
            raise ValueError(f"{len(levels)} levels need {len(levels) - 1} maps, got {len(maps)}")
        self.levels = tuple(levels)
        self.maps = tuple(m.hom if isinstance(m, Cover) else m for m in maps)
        self._covers: dict[int, Cover] = {}
        self._circuits: dict[tuple[int, int], tuple[Circuit, ...]] = {}
        # circuits in the order a builder declared them, when known
        self.systems = {k: tuple(v) for k, v in (systems or {}).items()}

    @classmethod
    def from_sequence(cls, graphs: Sequence[Graph], maps: Sequence[GraphHom | Cover],
                      systems: Mapping[int, Sequence[Circuit]] | None = None) -> CoverTower:
        """Attach the singleton head to ``G_1 <- ... <- G_N``."""
        g0 = Graph.singleton()
        return cls([g0, *graphs], [head_map(graphs[0], g0), *maps], systems)

    @property
    def top(self) -> int:
        return len(self.levels) - 1

    def level(self, n: int) -> Graph:
        return self.levels[n]

    def cover(self, n: int) -> Cover:
        """The validated cover ``G_{n+1} -> G_n``."""
        c = self._covers.get(n)
        if c is None:
            report = validate_cover(self.maps[n])
            if report.cover is None:
                raise InvalidTower(f"map {n + 1}->{n}: {report.summary()}")
            c = self._covers[n] = report.cover
        return c

    def chain(self, m: int, n: int) -> list[Cover]:
        """``[phi_n, ..., phi_{m-1}]``, the factors of ``phi_{m,n}``."""
        self._check_levels(m, n)
        return [self.cover(k) for k in range(n, m)]

    def push(self, x: Circulation, m: int, n: int) -> Circulation:
        """``xi_{m,n}`` applied level by level."""
        self._check_levels(m, n, allow_equal=True)
        for k in range(m - 1, n - 1, -1):
            x = pushforward(self.cover(k), x)
        return x

    def circuits(self, n: int, cap: int = 100_000) -> tuple[Circuit, ...]:
        key = (n, cap)
        if key not in self._circuits:
            self._circuits[key] = enumerate_circuits(self.levels[n], cap)
        return self._circuits[key]

    def _check_levels(self, m, n, allow_equal=False):
        if not (0 <= n <= m <= self.top) or (m == n and not allow_equal):
            raise ValueError(f"need 0 <= n < m <= {self.top}, got m={m}, n={n}")


@dataclass(frozen=True)
class TowerReport:
    head_ok: bool
    graphs: tuple[ValidationReport, ...]
    covers: tuple[CoverReport | None, ...]
    mismatched: tuple[int, ...] = ()

    @property
    def valid(self) -> bool:
        return (self.head_ok and not self.mismatched and all(self.graphs)
                and all(r is not None and r.valid for r in self.covers))

    def __bool__(self):
        return self.valid

    def problems(self) -> list[str]:
        out = []
        if not self.head_ok:
            out.append("level 0 is not the singleton graph ({0}, {(0,0)})")
        for n, r in enumerate(self.graphs):
            out += [f"level {n}: {p}" for p in r.problems()]
        for n in self.mismatched:
            out.append(f"map {n + 1}->{n}: endpoints do not match the tower levels")
        for n, r in enumerate(self.covers):
            if r is not None and not r.valid:
                out.append(f"map {n + 1}->{n}: {r.summary()}")
        return out


def validate_tower(t: CoverTower) -> TowerReport:
    head_ok = t.levels[0] == Graph.singleton()
    graphs = tuple(validate_graph(g) for g in t.levels)
    mismatched, covers = [], []
    for n, h in enumerate(t.maps):
        if h.source != t.levels[n + 1] or h.target != t.levels[n]:
            mismatched.append(n)
            covers.append(None)
            continue
        covers.append(validate_cover(h) if graphs[n] and graphs[n + 1] else None)
    return TowerReport(head_ok, graphs, tuple(covers), tuple(mismatched))


# -- nested simplices -----------------------------------------------------------

def circuit_images(t: CoverTower, m: int, n: int, cap: int = 100_000,
                   circuits: Sequence[Circuit] | None = None) -> list[tuple[Circuit, Circulation]]:
    """``(c, xi_{m,n}(c~))`` for every circuit ``c`` of ``G_m``."""
    if circuits is None:
        circuits = t.circuits(m, cap)
    return [(c, t.push(normalized_circuit(c), m, n)) for c in circuits]


def _distinct(points):
    seen, out = set(), []
    for p in points:
        if p not in seen:
            seen.add(p)
            out.append(p)
    return out


def simplex_image(t: CoverTower, m: int, n: int, cap: int = 100_000) -> list[Circulation]:
    """Generators of ``xi_{m,n}(Delta_m)``: the images of normalized circuits."""
    return _distinct(p for _, p in circuit_images(t, m, n, cap))


def diameter(points: Sequence[Circulation]) -> Fraction:
    best = Fraction(0)
    for i, p in enumerate(points):
        for q in points[i + 1:]:
            best = max(best, l1_distance(p, q))
    return best


def simplex_diameter(t: CoverTower, m: int, n: int, cap: int = 100_000) -> Fraction:
    """L1 diameter of ``xi_{m,n}(Delta_m)``; attained at two generators."""
    return diameter(simplex_image(t, m, n, cap))


# -- minimality -----------------------------------------------------------------

@dataclass(frozen=True)
class ScanRow:
    m: int
    passed: bool
    witness: str = "-"


@dataclass(frozen=True)
class MinimalityScan:
    n: int
    m_max: int
    mode: str
    rows: tuple[ScanRow, ...]

    @property
    def stable_from(self) -> int | None:
        """Least ``N`` with every scanned ``m`` in ``[N, m_max]`` passing."""
        first = None
        for row in reversed(self.rows):
            if not row.passed:
                break
            first = row.m
        return first

    @property
    def verdict(self) -> str:
        if self.stable_from is None:
            return f"condition fails at depth {self.m_max} (evidence against minimality, not proof)"
        return (f"condition holds for all m in [{self.stable_from}, {self.m_max}]"
                f" (checked up to depth {self.m_max} only)")


def _covered_everything(g: Graph, x: Circulation, vertices_only: bool) -> bool:
    support = set(x.support())
    if not vertices_only:
        return len(support) == len(g.chains)
    if any(c.length > 1 and ci not in support for ci, c in enumerate(g.chains)):
        return False
    touched = set()
    for ci in support:
        touched.add(g.chains[ci].src)
        touched.add(g.chains[ci].dst)
    return len(touched) == len(g.hubs)


def minimality_scan(t: CoverTower, n: int, m_max: int, mode: str = "edges",
                    walk_length: int | None = None, cap: int = 100_000) -> MinimalityScan:
    """Check a finite-depth minimality condition for each ``m`` in ``(n, m_max]``.

    ``edges``: every circuit of ``G_m`` projects onto all edges of ``G_n``.
    ``vertices``: onto all vertices.  ``walks``: every walk of ``G_m`` of
    length ``walk_length`` projects onto all edges of ``G_n``.
    """
    if not 0 <= n < m_max <= t.top:
        raise ValueError(f"need 0 <= n < m_max <= {t.top}")
    if mode == "walks" and not walk_length:
        raise ValueError("walks mode needs a walk length")
    if mode not in ("edges", "vertices", "walks"):
        raise ValueError(f"unknown mode {mode!r}")
    gn = t.level(n)
    all_edges = None
    rows = []
    for m in range(n + 1, m_max + 1):
        witness = None
        if mode == "walks":
            if all_edges is None:
                all_edges = set(gn.iter_edges())
            budget = cap
            for v in t.level(m).iter_vertices():
                for w in projected_walks(t.chain(m, n), v, walk_length, cap):
                    budget -= 1
                    if set(w.edges()) != all_edges:
                        witness = f"walk from {v}: {w}"
                        break
                if witness or budget < 0:
                    break
            if budget < 0 and witness is None:
                from .errors import CapExceeded
                raise CapExceeded("walks scanned", cap, cap - budget)
        else:
            for c in t.circuits(m, cap):
                img = t.push(circuit_vector(c), m, n)
                if not _covered_everything(gn, img, vertices_only=(mode == "vertices")):
                    witness = c.label
                    break
        rows.append(ScanRow(m, witness is None, witness or "-"))
    label = f"walks:{walk_length}" if mode == "walks" else mode
    return MinimalityScan(n, m_max, label, tuple(rows))


# -- ergodic candidates ---------------------------------------------------------------

@dataclass(frozen=True)
class Cluster:
    members: tuple[tuple[Circuit, Circulation], ...]
    trajectory: tuple[tuple[int, str, Fraction], ...] = ()

    @property
    def representative(self) -> Circulation:
        return self.members[0][1]

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(c.label for c, _ in self.members)


def single_linkage(points: Sequence[Circulation], tol: Fraction) -> list[list[int]]:
    """Groups of indices joined whenever two points are within ``tol``."""
    parent = list(range(len(points)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            if l1_distance(points[i], points[j]) <= tol:
                parent[find(j)] = find(i)
    groups: dict[int, list[int]] = {}
    for i in range(len(points)):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values())


def ergodic_candidates(t: CoverTower, n: int, m_lo: int, m_hi: int, tol: Fraction,
                       cap: int = 100_000) -> list[Cluster]:
    """Cluster the circuit images ``xi_{m_hi,n}(c~)`` at L1 tolerance ``tol``.

    Each cluster records, for every depth in ``[m_lo, m_hi]``, the circuit
    whose image lies closest to the cluster's first point.  The count is
    evidence about ergodic measures, not a proof.
    """
    if not n < m_lo <= m_hi <= t.top:
        raise ValueError(f"need n < m_lo <= m_hi <= {t.top}")
    deep = circuit_images(t, m_hi, n, cap)
    groups = single_linkage([p for _, p in deep], Fraction(tol))
    by_depth = {m: circuit_images(t, m, n, cap) for m in range(m_lo, m_hi + 1)}
    clusters = []
    for g in groups:
        members = tuple(deep[i] for i in g)
        rep = members[0][1]
        traj = []
        for m in range(m_lo, m_hi + 1):
            best = min(by_depth[m], key=lambda cp: (l1_distance(rep, cp[1]), cp[0].sort_key()))
            traj.append((m, best[0].label, l1_distance(rep, best[1])))
        clusters.append(Cluster(members, tuple(traj)))
    return clusters


# -- measures ---------------------------------------------------------------------------

@dataclass
class MeasurePrefix:
    """Finite shadows ``mu_k`` of an invariant measure, with circuit expressions.

    ``expressions[k]`` maps circuits of ``G_k`` to nonnegative weights summing
    to 1 with ``sum s(c) c~ = mu_k``.
    """

    measures: dict[int, Circulation] = field(default_factory=dict)
    expressions: dict[int, dict[Circuit, Fraction]] = field(default_factory=dict)

    @classmethod
    def from_expression(cls, t: CoverTower, level: int,
                        coeffs: Mapping[Circuit, Fraction]) -> MeasurePrefix:
        """Shadows on levels ``0..level`` of ``sum s(c) c~`` at ``level``."""
        coeffs = {c: Fraction(s) for c, s in coeffs.items()}
        mu = Circulation(t.level(level))
        for c, s in coeffs.items():
            mu = mu + s * normalized_circuit(c)
        measures = {level: mu}
        for k in range(level - 1, -1, -1):
            measures[k] = pushforward(t.cover(k), measures[k + 1])
        return cls(measures, {level: coeffs})

    def add_expression(self, level: int, coeffs: Mapping[Circuit, Fraction]) -> None:
        self.expressions[level] = {c: Fraction(s) for c, s in coeffs.items()}

    def problems(self, t: CoverTower) -> list[str]:
        out = []
        for k, mu in sorted(self.measures.items()):
            if not mu.is_probability():
                out.append(f"level {k}: measure is not an invariant probability vector")
        levels = sorted(self.measures)
        for j, k in zip(levels, levels[1:]):
            if t.push(self.measures[k], k, j) != self.measures[j]:
                out.append(f"levels {k}->{j}: shadows are not compatible")
        for k, coeffs in sorted(self.expressions.items()):
            if any(s < 0 for s in coeffs.values()) or sum(coeffs.values()) != 1:
                out.append(f"level {k}: coefficients are not a probability vector")
            if k in self.measures:
                acc = Circulation(t.level(k))
                for c, s in coeffs.items():
                    acc = acc + s * normalized_circuit(c)
                if acc != self.measures[k]:
                    out.append(f"level {k}: expression does not reproduce the measure")
        return out


def ergodic_mass_ratio(t: CoverTower, prefix: MeasurePrefix, m: int, n: int,
                       eps: Fraction) -> Fraction:
    """Weight of the expression's circuits at level ``n`` landing near ``mu_m``.

    Sums ``s(c)`` over circuits ``c`` of the level-``n`` expression with
    ``|mu_m - xi_{n,m}(c~)|_1 <= eps``.  Here ``m < n``: ``m`` is the level
    where distances are measured, ``n`` the deep level.
    """
    if n not in prefix.expressions:
        raise MissingExpression(f"no circuit expression at level {n}")
    if m not in prefix.measures:
        raise MissingExpression(f"no measure shadow at level {m}")
    if not 0 <= m < n <= t.top:
        raise ValueError(f"need 0 <= m < n <= {t.top}")
    mu = prefix.measures[m]
    eps = Fraction(eps)
    total = Fraction(0)
    for c, s in prefix.expressions[n].items():
        if l1_distance(mu, t.push(normalized_circuit(c), n, m)) <= eps:
            total += s
    return total


# -- ergodic-measure counting ---------------------------------------------------------

def segment_distance(p: Circulation, q: Circulation, r: Circulation) -> Fraction:
    """L1 distance from ``p`` to the segment ``[q, r]``.

    The distance is convex and piecewise linear in the position along the
    segment, so it is minimised at an end or at a coordinate breakpoint.
    """
    host = p.host
    lengths = [c.length for c in host.chains]
    pv, qv, rv = p.as_vector(), q.as_vector(), r.as_vector()
    candidates = {Fraction(0), Fraction(1)}
    for a, b, c in zip(pv, qv, rv):
        if b != c:
            lam = (a - c) / (b - c)
            if 0 < lam < 1:
                candidates.add(lam)

    def f(lam):
        return sum((L * abs(a - (lam * b + (1 - lam) * c))
                    for L, a, b, c in zip(lengths, pv, qv, rv)), Fraction(0))

    return min(f(lam) for lam in candidates)


def interior_circuits(images: Sequence[tuple[Circuit, Circulation]], tol: Fraction) -> list[str]:
    """Circuits whose image sits on a segment between two separated images.

    A circuit is flagged when, for some pair of other images more than
    ``tol`` apart, its image is within ``tol`` of the segment joining them
    and closer to the segment than to either end.  Such circuits look like
    they converge to a non-ergodic measure; this is a heuristic.
    """
    tol = Fraction(tol)
    flagged = []
    for i, (c, p) in enumerate(images):
        others = [x for j, x in enumerate(images) if j != i]
        hit = False
        for a in range(len(others)):
            for b in range(a + 1, len(others)):
                q, r = others[a][1], others[b][1]
                if l1_distance(q, r) <= tol:
                    continue
                d = segment_distance(p, q, r)
                if d <= tol and d < min(l1_distance(p, q), l1_distance(p, r)):
                    hit = True
                    break
            if hit:
                break
        if hit:
            flagged.append(c.label)
    return flagged


@dataclass(frozen=True)
class ErgodicBound:
    bound: int
    refined: int | None = None
    annotation: str = ""


def ergodic_count_upper_bound(sizes: Sequence[int],
                              images: Sequence[tuple[Circuit, Circulation]] | None = None,
                              tol: Fraction | None = None) -> ErgodicBound:
    """At most ``k = min(sizes)`` ergodic measures.

    ``sizes`` are the sizes of a circuit system that expresses all measures,
    one per level.  Given deep circuit images, circuits that appear to
    converge to a non-ergodic point are subtracted as an annotated estimate.
    """
    if not sizes:
        raise ValueError("need at least one circuit-system size")
    k = min(sizes)
    if images is None or tol is None:
        return ErgodicBound(k)
    flagged = interior_circuits(images, tol)
    if not flagged:
        return ErgodicBound(k, None, "no circuit image lies between two separated images")
    note = (f"{len(flagged)} circuit image(s) ({', '.join(flagged)}) lie between separated images"
            " and appear to converge to non-ergodic measures (finite-depth evidence)")
    return ErgodicBound(k, max(k - len(flagged), 1), note)
