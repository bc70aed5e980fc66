"""Linear (in)dependence of the circuits of a graph.

A circuit with an edge that no other circuit uses cannot be a combination of
the others.  Conversely, when every edge of ``c0`` lies on some other circuit,
``c0`` is a rational combination of the others, and such a combination always
has a negative coefficient.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import InfeasibleSystem
from .flows import Circulation, circuit_vector, normalized_circuit
from .graph import Circuit, Edge, Graph, enumerate_circuits
from .linalg import nonnegative_solution, rank, solve


@dataclass(frozen=True)
class PrivateEdgeReport:
    circuits: tuple[Circuit, ...]
    private_edges: tuple[Edge | None, ...]

    @property
    def independent(self) -> bool:
        return all(e is not None for e in self.private_edges)

    def items(self):
        return zip(self.circuits, self.private_edges)


def private_edge_report(g: Graph, cap: int = 100_000) -> PrivateEdgeReport:
    circuits = enumerate_circuits(g, cap)
    uses = Counter(ci for c in circuits for ci in c.chains)
    private = []
    for c in circuits:
        own = [g.edge_at(ci, 0) for ci in c.chains if uses[ci] == 1]
        private.append(min(own) if own else None)
    return PrivateEdgeReport(circuits, tuple(private))


def rational_rank(vectors: Sequence[Circulation]) -> int:
    if not vectors:
        return 0
    host = vectors[0].host
    if any(v.host != host for v in vectors):
        raise ValueError("vectors live on different graphs")
    return rank([v.as_vector() for v in vectors])


def express_dependency(g: Graph, c0: Circuit, cap: int = 100_000,
                       circuits: Sequence[Circuit] | None = None) -> dict[Circuit, Fraction] | None:
    """Coefficients with ``c0 = sum s(c) c`` over the other circuits.

    Returns None when ``c0`` has a private edge (it is independent of the
    rest).  Otherwise solves the exact linear system; the solution has free
    variables set to zero.
    """
    if circuits is None:
        circuits = enumerate_circuits(g, cap)
    others = [c for c in circuits if c != c0]
    used = {ci for c in others for ci in c.chains}
    if any(ci not in used for ci in c0.chains):
        return None
    cols = [circuit_vector(c).as_vector() for c in others]
    s = solve(cols, circuit_vector(c0).as_vector())
    if s is None:
        raise InfeasibleSystem(f"{c0.label} shares every edge but is not in the span of the rest")
    return {c: x for c, x in zip(others, s) if x != 0}


def circuit_basis(g: Graph, cap: int = 100_000) -> tuple[Circuit, ...]:
    """A basis of the circuit span chosen greedily in circuit order.

    Any maximal independent subset would do; this one is reproducible.
    """
    basis, rows = [], []
    for c in enumerate_circuits(g, cap):
        trial = rows + [circuit_vector(c).as_vector()]
        if rank(trial) == len(trial):
            rows = trial
            basis.append(c)
    return tuple(basis)


def is_extremal(g: Graph, c0: Circuit, cap: int = 100_000) -> bool:
    """True when the normalized ``c0`` is not a convex combination of the others.

    Searches basic solutions of ``sum s(c) c~ = c0~, sum s(c) = 1`` for one
    with ``s >= 0``; small graphs only.
    """
    others = [c for c in enumerate_circuits(g, cap) if c != c0]
    cols = [normalized_circuit(c).as_vector() + [Fraction(1)] for c in others]
    rhs = normalized_circuit(c0).as_vector() + [Fraction(1)]
    return nonnegative_solution(cols, rhs) is None


def format_coefficient_sum(terms) -> str:
    """``(a) + 2 (b) - 1/2 (c)`` from ``(label, coefficient)`` pairs."""
    parts = []
    for label, s in terms:
        sign = "-" if s < 0 else "+"
        mag = abs(s)
        body = f"({label})" if mag == 1 else f"{mag} ({label})"
        parts.append((sign, body))
    if not parts:
        return "0"
    first_sign, first = parts[0]
    out = ("-" + first) if first_sign == "-" else first
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def independence_rows(g: Graph, cap: int = 100_000):
    """Rows ``(circuit-id, status, private-edge, expression)`` of the report."""
    report = private_edge_report(g, cap)
    rows = []
    for c, e in report.items():
        if e is not None:
            rows.append((c.label, "independent", f"{e[0]}>{e[1]}", "-"))
            continue
        coeffs = express_dependency(g, c, cap, circuits=report.circuits)
        expr = format_coefficient_sum((k.label, s) for k, s in coeffs.items())
        rows.append((c.label, "dependent", "-", f"({c.label}) = {expr}"))
    return report, rows
