"""Command-line front end.

Every command prints ``name = value`` lines (``name ~ value`` for decimal
renderings).  Output depends only on the arguments and the cache contents.
Exit status: 0 success, 1 invalid input or failed verification, 2 resource
cap exceeded.
"""

from __future__ import annotations

import argparse
import hashlib
import logging
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .checks import Claim, verify_graph
from .exactpoly import ExactScalar, PiPolynomial, format_decimal
from .lengthstats import (
    box_probability,
    counting_coefficient,
    density_at,
    graph_polynomial,
    leading_coefficient,
    marginal,
    moments,
    total_mass,
)
from .sampling import empirical_compare, sample
from .simplexint import BoxCone, parse_box_spec
from .stablegraph import (
    canonical_form,
    enumerate_stable_graphs,
    graph_constants,
    parse_multicurve,
)
from .wpvolume import (
    DEFAULT_MAX_EULER,
    ResourceLimitError,
    SurfaceType,
    VolumeTable,
    cache_load,
    cache_save,
)

EXIT_OK, EXIT_INVALID, EXIT_RESOURCE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; 2 is reserved for resource caps here
    def error(self, message):
        raise UsageError(message)


# -- rendering -----------------------------------------------------------------


def _exact(v) -> str:
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(v, ExactScalar) and v.is_rational():
        return _exact(v.rational())
    return str(v)


def _poly_decimal(p: PiPolynomial, digits: int, var: str = "x") -> str:
    if p.is_zero():
        return format_decimal(Fraction(0), digits)
    parts = []
    for exps, coef in sorted(p.monomials.items(), key=lambda kv: (sum(kv[0]), kv[0]), reverse=True):
        bare = p.nvars == 1 and var != "x"
        mono = "*".join(
            (var if bare else f"{var}{i + 1}") + (f"^{e}" if e > 1 else "")
            for i, e in enumerate(exps)
            if e
        )
        c = format_decimal(coef, digits)
        parts.append(f"{c}*{mono}" if mono else c)
    return " + ".join(parts).replace("+ -", "- ")


def _mass_decimal(m, digits: int) -> str:
    if m.is_zero():
        return format_decimal(Fraction(0), digits)
    parts = []
    for pw in sorted(m.coeffs, reverse=True):
        c = format_decimal(m.coeffs[pw], digits)
        parts.append(c if pw == 0 else f"{c}*L" + (f"^{pw}" if pw > 1 else ""))
    return " + ".join(parts)


class Out:
    def __init__(self, stream, fmt: str, digits: int):
        self.stream, self.fmt, self.digits = stream, fmt, digits

    def line(self, text: str = ""):
        self.stream.write(text + "\n")

    def value(self, name: str, v):
        """A scalar: Fraction or ExactScalar."""
        if self.fmt in ("exact", "both"):
            self.line(f"{name} = {_exact(v)}")
        if self.fmt in ("decimal", "both"):
            self.line(f"{name} ~ {format_decimal(v, self.digits)}")

    def poly(self, name: str, p: PiPolynomial, var: str = "x"):
        if self.fmt in ("exact", "both"):
            self.line(f"{name} = {p.to_text(var)}")
        if self.fmt in ("decimal", "both"):
            self.line(f"{name} ~ {_poly_decimal(p, self.digits, var)}")

    def mass(self, name: str, m):
        if self.fmt in ("exact", "both"):
            self.line(f"{name} = {m.to_text()}")
        if self.fmt in ("decimal", "both"):
            self.line(f"{name} ~ {_mass_decimal(m, self.digits)}")


# -- argument helpers ----------------------------------------------------------


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a rational number: {text!r}") from None


def _rational_list(text: str) -> list[Fraction]:
    return [_rational(t) for t in text.split(",")]


def _int_list(text: str) -> list[int]:
    try:
        vals = [int(t) for t in text.split(",")]
    except ValueError:
        raise UsageError(f"not a list of integers: {text!r}") from None
    return vals


def _load_graph(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return parse_multicurve(text)
    except ValueError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _box(args, k: int) -> BoxCone:
    try:
        return parse_box_spec(args.box or [], k)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


# -- commands ------------------------------------------------------------------


def cmd_wpvol(args, table, out):
    try:
        s = SurfaceType(args.g, args.n)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    p = table.get(s)
    out.poly(f"V[{s.g},{s.n}]", p)
    if args.top:
        out.poly(f"V[{s.g},{s.n}].top", p.top_part())


def _describe(graph, out):
    c = graph_constants(graph)
    out.line(f"genus = {graph.genus}")
    out.line(f"canonical = {canonical_form(graph).decode()}")
    for i, e in enumerate(graph.edge_order()):
        out.line(f"variable x{i + 1} = edge {e.id} {e.ends[0]}-{e.ends[1]} weight {e.weight}")
    out.line(f"one_handles = {c.one_handles}")
    out.line(f"sym_plus = {c.sym_plus}" + (" (override)" if graph.sym_plus_override is not None else ""))
    out.line(f"sym = {c.sym}" + (" (override)" if graph.sym_override is not None else ""))


def cmd_poly(args, table, out):
    graph = _load_graph(args.file)
    gp = graph_polynomial(graph, table)
    _describe(graph, out)
    out.value("prefactor", gp.prefactor)
    out.poly("P", gp.full)
    out.poly("P.top", gp.top)


def cmd_mass(args, table, out):
    graph = _load_graph(args.file)
    box = _box(args, graph.k)
    m = total_mass(graph, box, table)
    if not m.feasible:
        out.line("feasible = no")
    out.mass("M(L)", m)
    if not m.is_zero():
        out.line(f"degree = {m.degree()}")
    out.value("C", leading_coefficient(graph, box, table))


def cmd_density(args, table, out):
    graph = _load_graph(args.file)
    pt = _rational_list(args.point)
    try:
        out.value("density", density_at(graph, pt, table))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_prob(args, table, out):
    graph = _load_graph(args.file)
    out.value("probability", box_probability(graph, _box(args, graph.k), table))


def cmd_moments(args, table, out):
    graph = _load_graph(args.file)
    for spec in args.m:
        m = _int_list(spec)
        if len(m) != graph.k or min(m) < 0:
            raise UsageError(f"--m needs {graph.k} non-negative integers, got {spec!r}")
        out.value(f"E[{spec}]", moments(graph, m, table))


def cmd_marginal(args, table, out):
    graph = _load_graph(args.file)
    if not 1 <= args.i <= graph.k:
        raise UsageError(f"--i must be in 1..{graph.k}")
    if graph.k == 1:
        raise UsageError("a one-component multicurve has no marginal density")
    mg = marginal(graph, args.i - 1, table)
    var = f"x{args.i}"
    out.line(f"support = (0, {_exact(mg.upper)})")
    out.poly("density", mg.density, var=var)
    if args.plot:
        if args.plot < 2:
            raise UsageError("--plot needs at least 2 points")
        out.line(f"plot {var},density")
        for t, y in mg.plot_points(args.plot):
            if out.fmt == "exact":
                out.line(f"{_exact(t)},{_exact(y)}")
            elif out.fmt == "decimal":
                out.line(f"{format_decimal(t, out.digits)},{format_decimal(y, out.digits)}")
            else:
                out.line(
                    f"{_exact(t)},{_exact(y)},{format_decimal(t, out.digits)},{format_decimal(y, out.digits)}"
                )


def cmd_sample(args, table, out):
    graph = _load_graph(args.file)
    if args.count < 1:
        raise UsageError("--count must be at least 1")
    if args.seed < 0:
        raise UsageError("--seed must be non-negative")
    k = graph.k
    batch = sample(graph, args.count, args.seed, table, workers=args.workers)
    if args.out:
        Path(args.out).write_bytes(batch.to_bytes())
    boxes = [parse_box_spec(b.split(","), k) for b in args.box] if args.box else [
        BoxCone.from_bounds(k, {i: (Fraction(1, 2), 1)}) for i in range(k)
    ] if k > 1 else []
    if args.m:
        ms = [_int_list(s) for s in args.m]
        if any(len(m) != k or min(m) < 0 for m in ms):
            raise UsageError(f"--m needs {k} non-negative integers")
    else:
        ms = [[int(i == j) * p for j in range(k)] for p in (1, 2) for i in range(k)] if k > 1 else []
    report = empirical_compare(batch, graph, boxes, ms, table)
    out.line(f"batch sha256 = {hashlib.sha256(batch.to_bytes()).hexdigest()}")
    out.stream.write(report.render_table(out.digits) if args.table else report.render_records(out.digits))


def cmd_verify(args, table, out):
    graph = _load_graph(args.file)
    claims = tuple(Claim(f"user claim {i + 1}", t) for i, t in enumerate(args.claim_top or []))
    for c in claims:
        try:
            PiPolynomial.parse(c.text, graph.k)
        except ValueError as exc:
            raise UsageError(f"--claim-top: {exc}") from None
    report = verify_graph(graph, table, claims)
    out.stream.write(report.render())
    return EXIT_OK if report.passed else EXIT_INVALID


def cmd_enumerate(args, table, out):
    try:
        graphs = enumerate_stable_graphs(args.genus, args.curves, args.max_weight, args.max_graphs)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    out.line(f"count = {len(graphs)}")
    for g in graphs:
        c = graph_constants(g)
        out.line(f"graph {canonical_form(g).decode()} one_handles={c.one_handles} sym={c.sym}")


def cmd_count_coef(args, table, out):
    graph = _load_graph(args.file)
    ratio = _rational(args.ratio)
    if ratio < 0:
        raise UsageError("--ratio must be non-negative")
    out.value("coefficient", counting_coefficient(graph, ratio, _box(args, graph.k), table))


# -- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mcstats", description="Exact component-length laws of multicurves on hyperbolic surfaces.")
    p.add_argument("--version", action="version", version=f"mcstats {__version__}")
    p.add_argument("--cache", metavar="PATH", help="volume cache file, read if present and updated")
    p.add_argument("--format", choices=("exact", "decimal", "both"), default="exact")
    p.add_argument("--digits", type=int, default=15, help="decimal places in decimal output")
    p.add_argument("--max-euler", type=int, default=DEFAULT_MAX_EULER, help="cap on 2g-2+n for volumes")
    p.add_argument("--workers", type=int, default=1, help="sampling threads (output does not depend on it)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("wpvol", help="print the volume polynomial V_{g,n}")
    s.add_argument("g", type=int)
    s.add_argument("n", type=int)
    s.add_argument("--top", action="store_true", help="also print the top-degree part")
    s.set_defaults(func=cmd_wpvol)

    def with_file(name, func, help_text):
        s = sub.add_parser(name, help=help_text)
        s.add_argument("file", help="multicurve description")
        s.set_defaults(func=func)
        return s

    with_file("poly", cmd_poly, "print the graph polynomial and its top part")
    s = with_file("mass", cmd_mass, "horosphere mass polynomial and its leading coefficient")
    s.add_argument("--box", action="append", metavar="I=LO:HI")
    s = with_file("density", cmd_density, "limiting density at a point of the unit simplex")
    s.add_argument("--point", required=True, metavar="X1,...,XK")
    s = with_file("prob", cmd_prob, "limiting probability of a box")
    s.add_argument("--box", action="append", metavar="I=LO:HI")
    s = with_file("moments", cmd_moments, "moments of the limiting distribution")
    s.add_argument("--m", action="append", required=True, metavar="M1,...,MK")
    s = with_file("marginal", cmd_marginal, "marginal density of one component")
    s.add_argument("--i", type=int, required=True)
    s.add_argument("--plot", type=int, metavar="N", help="emit N evenly spaced points")
    s = with_file("sample", cmd_sample, "Monte Carlo comparison against exact values")
    s.add_argument("--count", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--box", action="append", metavar="I=LO:HI", help="one box per flag; join constraints with commas")
    s.add_argument("--m", action="append", metavar="M1,...,MK")
    s.add_argument("--table", action="store_true", help="human-readable table")
    s.add_argument("--out", metavar="PATH", help="write raw batch bytes")
    s = with_file("verify", cmd_verify, "run the invariant suite")
    s.add_argument("--claim-top", action="append", metavar="POLY", help="compare a stated top part")
    s = sub.add_parser("enumerate", help="list stable graphs")
    s.add_argument("--genus", type=int, required=True)
    s.add_argument("--curves", type=int, required=True)
    s.add_argument("--max-weight", type=int, default=None)
    s.add_argument("--max-graphs", type=int, default=100_000)
    s.set_defaults(func=cmd_enumerate)
    s = with_file("count-coef", cmd_count_coef, "asymptotic counting coefficient")
    s.add_argument("--ratio", required=True, metavar="P/Q", help="B(X)/b_g")
    s.add_argument("--box", action="append", metavar="I=LO:HI")
    return p


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        if args.digits < 1:
            raise UsageError("--digits must be at least 1")
        if args.max_euler < 1:
            raise UsageError("--max-euler must be at least 1")
        table = None
        if args.cache and Path(args.cache).exists():
            table = cache_load(args.cache, args.max_euler)
        if table is None:
            table = VolumeTable(args.max_euler)
        before = len(table)
        code = args.func(args, table, Out(stdout, args.format, args.digits)) or EXIT_OK
        if args.cache and (len(table) != before or not Path(args.cache).exists()):
            cache_save(table, args.cache)
        return code
    except ResourceLimitError as exc:
        stderr.write(f"mcstats: resource limit: {exc}\n")
        return EXIT_RESOURCE
    except (UsageError, ValueError) as exc:
        stderr.write(f"mcstats: error: {exc}\n")
        return EXIT_INVALID
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)


def main() -> None:
    logging.basicConfig(level=logging.WARNING, format="mcstats: %(message)s")
    sys.exit(run())
