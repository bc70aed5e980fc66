"""Command-line front end.

Exit status: 0 success, 1 validation failure, 2 enumeration cap exceeded,
3 unreadable or malformed input.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction

from . import errors
from .builders import build_example_63, build_odometer, build_tree_type
from .flows import decompose_circulation, kirchhoff_residual
from .graph import enumerate_circuits, validate_graph
from .independence import independence_rows, rational_rank
from .io import (format_graph, format_q, format_tower, iter_explicit_lines,
                 parse_circulation, parse_prefix, parse_q, read_graph, read_tower, _read, write_text)
from .flows import circuit_vector
from .tower import (ergodic_candidates, ergodic_mass_ratio, minimality_scan, circuit_images,
                    simplex_image, diameter, validate_tower)
from .winding import certify_unique_ergodicity, compute_winding

DEFAULT_CAP = 100_000

EXIT_OK, EXIT_INVALID, EXIT_CAP, EXIT_PARSE = 0, 1, 2, 3


class _Out:
    """Tables as aligned text or TSV; rationals always exact ``p/q``."""

    def __init__(self, tsv: bool, approx: bool, stream=None):
        self.tsv = tsv
        self.approx = approx
        self.stream = stream or sys.stdout

    def line(self, text: str = "") -> None:
        print(text, file=self.stream)

    def cell(self, x) -> str:
        if isinstance(x, Fraction):
            return format_q(x)
        if isinstance(x, bool):
            return "yes" if x else "no"
        return str(x)

    def table(self, header, rows, exact_col: int | None = None) -> None:
        header = list(header)
        body = [[self.cell(x) for x in r] for r in rows]
        if self.approx and exact_col is not None:
            header.append("approx")
            for r, raw in zip(body, rows):
                v = raw[exact_col]
                r.append(f"{float(v):.6g}" if isinstance(v, Fraction) else "-")
        if self.tsv:
            self.line("\t".join(header))
            for r in body:
                self.line("\t".join(r))
            return
        widths = [max(len(str(h)), *(len(r[i]) for r in body)) if body else len(str(h))
                  for i, h in enumerate(header)]
        self.line("  ".join(str(h).ljust(w) for h, w in zip(header, widths)).rstrip())
        for r in body:
            self.line("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip())

    def value(self, key: str, x) -> None:
        parts = [key, self.cell(x)]
        if self.approx and isinstance(x, Fraction):
            parts.append(f"~{float(x):.6g} (approx)")
        self.line(("\t" if self.tsv else "  ").join(parts))


def _cap(args) -> int:
    if args.cap is not None:
        return args.cap
    env = os.environ.get("ERGODOGRAPH_CAP")
    if env:
        try:
            return int(env)
        except ValueError:
            raise errors.ParseError(f"ERGODOGRAPH_CAP must be an integer, got {env!r}") from None
    return DEFAULT_CAP


def _load_graph(args):
    if getattr(args, "graph", None):
        g = read_graph(args.graph)
    elif getattr(args, "tower", None) and args.level is not None:
        t = read_tower(args.tower)
        if not 0 <= args.level <= t.top:
            raise errors.ParseError(f"tower has no level {args.level}")
        g = t.level(args.level)
    else:
        raise errors.ParseError("give --graph, or --tower with --level")
    report = validate_graph(g)
    if not report:
        raise errors.InvalidGraph("; ".join(report.problems()))
    return g


# -- subcommands -------------------------------------------------------------------

def cmd_validate(args, out):
    t = read_tower(args.tower)
    report = validate_tower(t)
    rows = []
    for k, g in enumerate(t.levels):
        rows.append((f"level {k}", g.num_vertices, g.num_edges,
                     "ok" if report.graphs[k] else "invalid"))
    out.table(["item", "vertices", "edges", "status"], rows)
    for n, r in enumerate(report.covers):
        status = "cover" if r is not None and r.valid else "invalid"
        out.line(("\t" if out.tsv else "  ").join([f"map {n + 1}->{n}", status]))
    for p in report.problems():
        out.line(f"problem: {p}")
    out.line("tower valid" if report else "tower invalid")
    return EXIT_OK if report else EXIT_INVALID


def cmd_circuits(args, out):
    g = _load_graph(args)
    cs = enumerate_circuits(g, _cap(args))
    out.table(["circuit", "period"], [(c.label, c.period) for c in cs])
    out.line(f"{len(cs)} circuits")
    return EXIT_OK


def cmd_decompose(args, out):
    g = _load_graph(args)
    x = parse_circulation(_read(args.flow), g)
    bad = {v: r for v, r in kirchhoff_residual(x).items() if r}
    if bad:
        v = min(bad)
        raise errors.NotInvariant(f"not invariant: in minus out at {v} is {format_q(bad[v])}")
    terms = decompose_circulation(x, _cap(args))
    out.table(["circuit", "coefficient"], [(c.label, s) for c, s in terms], exact_col=1)
    return EXIT_OK


def _point(x) -> str:
    g = x.host
    return ",".join(f"{g.chains[ci].name}={format_q(w)}" for ci, w in x.chain_items())


def cmd_simplex(args, out):
    t = read_tower(args.tower)
    m, n = args.from_level, args.to_level
    if not 0 <= n < m <= t.top:
        raise errors.ParseError(f"need 0 <= --to < --from <= {t.top}")
    images = circuit_images(t, m, n, _cap(args))
    out.table(["circuit", "image"], [(c.label, _point(p)) for c, p in images])
    if args.diameter:
        out.value("diameter", diameter(simplex_image(t, m, n, _cap(args))))
    return EXIT_OK


def cmd_minimality(args, out):
    t = read_tower(args.tower)
    mode, length = args.mode, None
    if mode.startswith("walks:"):
        mode, _, tail = mode.partition(":")
        length = parse_q(tail)
        if length.denominator != 1 or length < 1:
            raise errors.ParseError(f"walk length must be a positive integer, got {tail}")
        length = int(length)
    elif mode not in ("edges", "vertices"):
        raise errors.ParseError(f"unknown mode {args.mode!r}; use edges, vertices or walks:L")
    scan = minimality_scan(t, args.n, args.mmax, mode, length, _cap(args))
    out.table(["m", "pass", "witness"], [(r.m, r.passed, r.witness) for r in scan.rows])
    out.line(scan.verdict)
    return EXIT_OK


def cmd_independence(args, out):
    g = _load_graph(args)
    cap = _cap(args)
    report, rows = independence_rows(g, cap)
    out.table(["circuit", "status", "private-edge", "expression"], rows)
    r = rational_rank([circuit_vector(c) for c in report.circuits])
    out.line(f"rank {r} of {len(report.circuits)} circuits; "
             + ("independent" if report.independent else "dependent"))
    return EXIT_OK


def cmd_winding(args, out):
    t = read_tower(args.tower)
    if not 0 <= args.level < t.top:
        raise errors.ParseError(f"--level must lie in [0, {t.top - 1}]")
    w, nw = compute_winding(t, args.level, cap=_cap(args))
    cols = [c.label for c in w.cols]
    out.line(f"winding {args.level + 1}->{args.level}")
    out.table(["circuit", "period", *cols],
              [(c.label, c.period, *r) for c, r in zip(w.rows, w.entries)])
    out.line("normalized")
    out.table(["circuit", *cols], [(c.label, *r) for c, r in zip(w.rows, nw.entries)])
    out.value("epsilon", nw.epsilon)
    if w.representation_dependent:
        out.line("note: the level circuit system is dependent; entries depend on the decomposition chosen")
    return EXIT_OK


def cmd_certify(args, out):
    t = read_tower(args.tower)
    cert = certify_unique_ergodicity(t, args.n, args.depth, cap=_cap(args))
    out.line(f"certificate n={cert.n} depth={cert.depth}")
    out.table(["i", "d_i", "eps_i", "1-d_i*eps_i", "running"],
              [(r.level, r.d, r.epsilon, r.factor, r.running) for r in cert.rows], exact_col=4)
    out.value("diam_n", cert.diam_n)
    out.value("bound", cert.bound)
    out.value("measured", cert.measured)
    out.value("consistent", cert.consistent)
    for note in cert.notes:
        out.line(f"note: {note}")
    return EXIT_OK


def cmd_mass_ratio(args, out):
    t = read_tower(args.tower)
    prefix = parse_prefix(_read(args.prefix), t)
    problems = prefix.problems(t)
    if problems:
        raise errors.ErgodographError("; ".join(problems))
    r = ergodic_mass_ratio(t, prefix, args.m, args.n, parse_q(args.eps))
    out.value("mass-ratio", r)
    return EXIT_OK


def cmd_candidates(args, out):
    t = read_tower(args.tower)
    clusters = ergodic_candidates(t, args.n, args.from_level, args.to_level,
                                  parse_q(args.tol), _cap(args))
    rows = []
    for k, cl in enumerate(clusters):
        for m, label, d in cl.trajectory:
            rows.append((k, " ".join(cl.labels), m, label, d))
    out.table(["cluster", "members", "m", "nearest", "distance"], rows, exact_col=4)
    out.line(f"{len(clusters)} clusters at depth {args.to_level} (finite-depth evidence only)")
    return EXIT_OK


def _ints(text: str, what: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise errors.ParseError(f"{what} must be comma-separated integers, got {text!r}") from None


def _matrix(text: str) -> list[list[int]]:
    return [_ints(row, "winding row") for row in text.split(";")]


def _tree(text: str) -> list[int | None]:
    # parents of circuits 1, 2, ...; circuit 0 is the root
    return [None, *_ints(text, "parents")]


def cmd_build(args, out):
    if args.kind == "odometer":
        t = build_odometer(args.levels, args.base)
    elif args.kind == "example63":
        t = build_example_63(args.levels, _ints(args.p, "--p"), args.L1, args.D1)
    else:
        shapes = [_tree(s) for s in args.shape] if args.shape else None
        parents = _tree(args.parents) if args.parents else None
        t = build_tree_type(_ints(args.lengths, "--lengths"), [_matrix(w) for w in args.winding],
                            parents, shapes)
    text = format_tower(t)
    if args.out:
        write_text(args.out, text)
        out.line(f"wrote {args.out}: levels 0..{t.top}")
    else:
        out.stream.write(text)
    return EXIT_OK


def cmd_extract(args, out):
    t = read_tower(args.tower)
    if not 0 <= args.level <= t.top:
        raise errors.ParseError(f"tower has no level {args.level}")
    g = t.level(args.level)
    if args.explicit:
        if g.num_vertices > _cap(args):
            raise errors.CapExceeded("vertices to expand", _cap(args), g.num_vertices)
        text = "\n".join(iter_explicit_lines(g)) + "\n"
    else:
        text = format_graph(g)
    if args.out:
        write_text(args.out, text)
    else:
        out.stream.write(text)
    return EXIT_OK


# -- parser ------------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    # malformed flags are input errors, not the cap-exceeded status argparse would use
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARSE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--cap", type=int, default=None,
                        help="enumeration cap (default: $ERGODOGRAPH_CAP or 100000)")
    common.add_argument("--tsv", action="store_true", help="tab-separated output")
    common.add_argument("--approx", action="store_true",
                        help="add a decimal column (not authoritative)")

    p = _Parser(prog="ergodograph",
                                description="Finite-depth analysis of graph-cover towers.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", parents=[common], help="check a tower file")
    s.add_argument("--tower", required=True)
    s.set_defaults(fn=cmd_validate)

    for name, fn, helptext in [("circuits", cmd_circuits, "list circuits"),
                               ("independence", cmd_independence, "circuit independence report")]:
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("--graph")
        s.add_argument("--tower")
        s.add_argument("--level", type=int)
        s.set_defaults(fn=fn)

    s = sub.add_parser("decompose", parents=[common], help="split a circulation into circuits")
    s.add_argument("--graph")
    s.add_argument("--tower")
    s.add_argument("--level", type=int)
    s.add_argument("--flow", required=True)
    s.set_defaults(fn=cmd_decompose)

    s = sub.add_parser("simplex", parents=[common], help="images of normalized circuits")
    s.add_argument("--tower", required=True)
    s.add_argument("--from", dest="from_level", type=int, required=True)
    s.add_argument("--to", dest="to_level", type=int, required=True)
    s.add_argument("--diameter", action="store_true")
    s.set_defaults(fn=cmd_simplex)

    s = sub.add_parser("minimality", parents=[common], help="finite-depth minimality scan")
    s.add_argument("--tower", required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--mmax", type=int, required=True)
    s.add_argument("--mode", default="edges", help="edges, vertices or walks:L")
    s.set_defaults(fn=cmd_minimality)

    s = sub.add_parser("winding", parents=[common], help="winding matrix of one cover")
    s.add_argument("--tower", required=True)
    s.add_argument("--level", type=int, required=True)
    s.set_defaults(fn=cmd_winding)

    s = sub.add_parser("certify", parents=[common], help="unique-ergodicity certificate")
    s.add_argument("--tower", required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--depth", type=int, required=True)
    s.set_defaults(fn=cmd_certify)

    s = sub.add_parser("mass-ratio", parents=[common], help="ergodic mass ratio of a measure prefix")
    s.add_argument("--tower", required=True)
    s.add_argument("--prefix", required=True)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--eps", required=True)
    s.set_defaults(fn=cmd_mass_ratio)

    s = sub.add_parser("candidates", parents=[common], help="cluster deep circuit images")
    s.add_argument("--tower", required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--from", dest="from_level", type=int, required=True)
    s.add_argument("--to", dest="to_level", type=int, required=True)
    s.add_argument("--tol", required=True)
    s.set_defaults(fn=cmd_candidates)

    s = sub.add_parser("build", help="write a ready-made tower")
    kinds = s.add_subparsers(dest="kind", required=True)
    k = kinds.add_parser("odometer", parents=[common])
    k.add_argument("--levels", type=int, required=True)
    k.add_argument("--base", type=int, default=2)
    k.add_argument("--out")
    k = kinds.add_parser("example63", parents=[common])
    k.add_argument("--levels", type=int, required=True)
    k.add_argument("--p", default="", help="schedule p(1),p(2),...")
    k.add_argument("--L1", type=int, default=2)
    k.add_argument("--D1", type=int, default=1)
    k.add_argument("--out")
    k = kinds.add_parser("treetype", parents=[common])
    k.add_argument("--lengths", required=True, help="level-1 circuit periods, e.g. 3,3")
    k.add_argument("--parents", help="parents of level-1 circuits 1, 2, ..., e.g. 0,1 (circuit 0 is the root)")
    k.add_argument("--winding", action="append", default=[],
                   help="one per level, rows separated by ';', e.g. '2,1;1,2'")
    k.add_argument("--shape", action="append", help="parents for each deeper level, as --parents")
    k.add_argument("--out")
    s.set_defaults(fn=cmd_build)

    s = sub.add_parser("extract", parents=[common], help="write one level as a graph file")
    s.add_argument("--tower", required=True)
    s.add_argument("--level", type=int, required=True)
    s.add_argument("--explicit", action="store_true", help="expand chains into single edges")
    s.add_argument("--out")
    s.set_defaults(fn=cmd_extract)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    out = _Out(getattr(args, "tsv", False), getattr(args, "approx", False))
    try:
        return args.fn(args, out)
    except errors.ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except errors.CapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (errors.ErgodographError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
