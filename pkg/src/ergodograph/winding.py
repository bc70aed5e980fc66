"""Winding matrices, their row-stochastic normalization and contraction certificates."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import NonIntegralDecomposition, NotApplicable, NotMeanZero
from .flows import circuit_vector, decompose_circulation, normalized_circuit, pushforward
from .graph import Circuit
from .independence import rational_rank
from .linalg import nonnegative_solution
from .tower import CoverTower, diameter, simplex_diameter


@dataclass(frozen=True)
class NormalizedWinding:
    entries: tuple[tuple[Fraction, ...], ...]

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.entries), len(self.entries[0]) if self.entries else 0

    @property
    def epsilon(self) -> Fraction:
        return min(x for r in self.entries for x in r)

    def is_row_stochastic(self) -> bool:
        return all(sum(r) == 1 and all(x >= 0 for x in r) for r in self.entries)


@dataclass(frozen=True)
class WindingMatrix:
    """``entries[i][j]``: how often level-``n+1`` circuit ``i`` treads level-``n`` circuit ``j``."""

    level: int
    entries: tuple[tuple[int, ...], ...]
    rows: tuple[Circuit, ...]
    cols: tuple[Circuit, ...]
    representation_dependent: bool = False

    @property
    def row_periods(self) -> tuple[int, ...]:
        return tuple(c.period for c in self.rows)

    @property
    def col_periods(self) -> tuple[int, ...]:
        return tuple(c.period for c in self.cols)

    def is_consistent(self) -> bool:
        lp = self.col_periods
        return all(sum(m * l for m, l in zip(r, lp)) == p
                   for r, p in zip(self.entries, self.row_periods))

    def normalized(self) -> NormalizedWinding:
        lp = self.col_periods
        return NormalizedWinding(tuple(
            tuple(Fraction(l * m, p) for m, l in zip(r, lp))
            for r, p in zip(self.entries, self.row_periods)))


def _system(t: CoverTower, k: int, systems, cap):
    if systems is not None and k in systems:
        return tuple(systems[k])
    if k in t.systems:
        return t.systems[k]
    return t.circuits(k, cap)


def compute_winding(t: CoverTower, n: int,
                    systems: Mapping[int, Sequence[Circuit]] | None = None,
                    cap: int = 100_000) -> tuple[WindingMatrix, NormalizedWinding]:
    """Winding matrix of the cover ``G_{n+1} -> G_n`` over the given circuit systems.

    Systems default to the tower's declared ones, else all circuits.  Each
    pushforward is decomposed greedily; if that uses circuits outside the
    lower system, an exact nonnegative solve over the system is tried.
    """
    upper = _system(t, n + 1, systems, cap)
    lower = _system(t, n, systems, cap)
    index = {c: j for j, c in enumerate(lower)}
    cover = t.cover(n)
    cols = None
    entries = []
    for c in upper:
        y = pushforward(cover, circuit_vector(c))
        row = [Fraction(0)] * len(lower)
        terms = decompose_circulation(y, cap)
        if all(k in index for k, _ in terms):
            for k, s in terms:
                row[index[k]] += s
        else:
            if cols is None:
                cols = [circuit_vector(k).as_vector() for k in lower]
            sol = nonnegative_solution(cols, y.as_vector())
            if sol is None:
                raise NonIntegralDecomposition(
                    f"pushforward of {c.label} is not a nonnegative combination of the level-{n} system")
            row = sol
        if any(x.denominator != 1 for x in row):
            raise NonIntegralDecomposition(
                f"pushforward of {c.label} has non-integral coefficients over the level-{n} system")
        entries.append(tuple(int(x) for x in row))
    dependent = rational_rank([circuit_vector(k) for k in lower]) < len(lower)
    w = WindingMatrix(n, tuple(entries), tuple(upper), tuple(lower), dependent)
    nw = w.normalized()
    if not (w.is_consistent() and nw.is_row_stochastic()):
        raise AssertionError(f"winding at level {n} is not period-consistent")
    return w, nw


@dataclass(frozen=True)
class ContractionCheck:
    norm_x: Fraction
    norm_y: Fraction
    factor: Fraction
    mean_zero: bool

    @property
    def holds(self) -> bool:
        return self.mean_zero and self.norm_y <= self.factor * self.norm_x


def contraction_step(x: Sequence[Fraction], mbar: NormalizedWinding | Sequence[Sequence[Fraction]]):
    """``y = x M`` for mean-zero ``x``, with the bound ``|y|_1 <= (1 - t eps)|x|_1``."""
    rows = mbar.entries if isinstance(mbar, NormalizedWinding) else mbar
    x = [Fraction(v) for v in x]
    if len(x) != len(rows):
        raise ValueError(f"vector has {len(x)} entries, matrix has {len(rows)} rows")
    if sum(x) != 0:
        raise NotMeanZero("contraction needs entries summing to zero")
    cols = len(rows[0])
    y = [sum((xi * r[j] for xi, r in zip(x, rows)), Fraction(0)) for j in range(cols)]
    eps = min(Fraction(v) for r in rows for v in r)
    check = ContractionCheck(sum(map(abs, x), Fraction(0)), sum(map(abs, y), Fraction(0)),
                             1 - cols * eps, sum(y) == 0)
    return y, check


@dataclass(frozen=True)
class CertificateRow:
    level: int
    d: int
    epsilon: Fraction
    factor: Fraction
    running: Fraction


@dataclass(frozen=True)
class Certificate:
    n: int
    depth: int
    rows: tuple[CertificateRow, ...]
    diam_n: Fraction
    measured: Fraction
    notes: tuple[str, ...] = ()

    @property
    def product(self) -> Fraction:
        return self.rows[-1].running if self.rows else Fraction(1)

    @property
    def bound(self) -> Fraction:
        return self.diam_n * self.product

    @property
    def consistent(self) -> bool:
        return self.measured <= self.bound


def certify_unique_ergodicity(t: CoverTower, n: int, depth: int,
                              systems: Mapping[int, Sequence[Circuit]] | None = None,
                              cap: int = 100_000) -> Certificate:
    """Finite-depth contraction certificate for the simplices ``xi_{depth,n}(Delta_depth)``.

    Uses ``diam(xi_{depth,n} Delta_depth) <= diam(Delta_n) * prod (1 - d_i eps_i)``.
    """
    if not 0 <= n <= depth <= t.top:
        raise ValueError(f"need 0 <= n <= depth <= {t.top}")
    rows = []
    running = Fraction(1)
    for i in range(n, depth):
        w, nw = compute_winding(t, i, systems, cap)
        eps = nw.epsilon
        if eps <= 0:
            raise NotApplicable(f"normalized winding at level {i} has a zero entry")
        d = nw.shape[1]
        factor = 1 - d * eps
        running *= factor
        rows.append(CertificateRow(i, d, eps, factor, running))
    diam_n = diameter([normalized_circuit(c) for c in t.circuits(n, cap)])
    measured = simplex_diameter(t, depth, n, cap) if depth > n else diam_n
    notes = [f"certified only to depth {depth}: the bound is finite, the infinite product is not checked"]
    if any(set(_system(t, k, systems, cap)) != set(t.circuits(k, cap)) for k in range(n, depth + 1)):
        notes.append("assumes the supplied circuit systems express every invariant measure")
    return Certificate(n, depth, tuple(rows), diam_n, measured, tuple(notes))
