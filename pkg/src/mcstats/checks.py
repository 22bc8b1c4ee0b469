"""Invariant suite behind ``mcstats verify``.

Checks are internal consistency conditions that must hold for every valid
graph; a failure means the engine is wrong.  Claims are externally stated
values (a small built-in registry of tabulated top parts plus any the user
supplies).  They are compared and flagged, but never change the verdict.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from math import factorial

from .exactpoly import PiPolynomial
from .lengthstats import (
    box_probability,
    density_at,
    dirichlet_density,
    graph_polynomial,
    leading_coefficient,
    marginal,
    match_up_to_permutation,
    moments,
    total_mass,
)
from .simplexint import BoxCone, cone_integral
from .stablegraph import StableGraph, canonical_form, graph_constants
from .wpvolume import VolumeTable, default_table, validate_volume

__all__ = ["Claim", "CheckResult", "ClaimResult", "VerifyReport", "KNOWN_CLAIMS", "verify_graph"]


@dataclass(frozen=True)
class Claim:
    label: str
    text: str
    # "exact": equal up to renaming variables; "shape": equal up to a positive constant as well
    mode: str = "exact"


# Published top parts, keyed by canonical form with unit weights.
KNOWN_CLAIMS: dict[bytes, tuple[Claim, ...]] = {
    b"g=2;v=0,1;e=0-0:1,0-1:1": (
        Claim("tabulated top part", "(1/48)*x1*x2^3"),
    ),
    b"g=3;v=1,2;e=0-1:1": (
        Claim("tabulated top part", "(1/21233664)*x1^10"),
    ),
    b"g=3;v=0,2;e=0-0:1,0-1:1": (
        Claim("tabulated density shape", "x1*x2^7", "shape"),
    ),
    b"g=2;v=0,0;e=0-1:1,0-1:1,0-1:1": (
        Claim("tabulated pants polynomial", "x1*x2*x3"),
    ),
    b"g=2;v=0,0;e=0-0:1,0-1:1,1-1:1": (
        Claim("tabulated pants polynomial", "x1*x2*x3"),
    ),
}


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class ClaimResult:
    label: str
    agrees: bool
    detail: str


@dataclass
class VerifyReport:
    checks: list[CheckResult] = field(default_factory=list)
    claims: list[ClaimResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def render(self) -> str:
        lines = []
        for c in self.checks:
            lines.append(f"check {c.name} {'PASS' if c.passed else 'FAIL'}" + (f" {c.detail}" if c.detail else ""))
        for c in self.claims:
            lines.append(f"claim {c.label}: {'AGREES' if c.agrees else 'FLAGGED'} {c.detail}")
        lines.append(f"verify {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines) + "\n"


def _check(report: VerifyReport, name: str, fn):
    try:
        ok, detail = fn()
    except Exception as exc:  # a crashing check is a failing check
        ok, detail = False, f"raised {type(exc).__name__}: {exc}"
    report.checks.append(CheckResult(name, bool(ok), detail))


def _sample_boxes(k: int) -> list[BoxCone]:
    boxes = [BoxCone.from_bounds(k, {0: (0, Fraction(1, 2))})]
    if k >= 2:
        boxes.append(BoxCone.from_bounds(k, {0: (Fraction(1, 5), Fraction(3, 4)), k - 1: (Fraction(1, 10), 1)}))
    return boxes


def _interior_points(graph: StableGraph) -> list[tuple[Fraction, ...]]:
    w = graph.weights
    k = graph.k
    bary = tuple(Fraction(1, k * c) for c in w)
    raw = [Fraction(i + 1) for i in range(k)]
    s = sum(c * r for c, r in zip(w, raw))
    return [bary, tuple(r / s for r in raw)]


def verify_graph(
    graph: StableGraph,
    table: VolumeTable | None = None,
    extra_claims: tuple[Claim, ...] = (),
) -> VerifyReport:
    table = table or default_table()
    report = VerifyReport()
    k, d = graph.k, graph.d
    gp = graph_polynomial(graph, table)

    def volumes():
        for v in graph.vertices:
            n = graph.valence(v.id)
            validate_volume((v.genus, n), table.get((v.genus, n)))
        return True, ""

    _check(report, "vertex-volumes", volumes)
    _check(
        report,
        "top-part",
        lambda: (
            gp.top == gp.full.top_part() and gp.top.is_homogeneous() and gp.top.is_u_free(),
            "",
        ),
    )
    _check(
        report,
        "degree-top",
        lambda: (gp.top.degree() == 2 * d - k, f"deg={gp.top.degree()} 2d-k={2 * d - k}"),
    )
    mass = total_mass(graph, None, table)
    _check(
        report,
        "degree-mass",
        lambda: (mass.degree() == 2 * d - 1, f"deg_L={mass.degree()} 2d-1={2 * d - 1}"),
    )
    _check(
        report,
        "positive-coefficients",
        lambda: (all(c > 0 for c in gp.full.terms.values()), ""),
    )
    consts = graph_constants(graph)
    _check(
        report,
        "prefactor",
        lambda: (
            gp.prefactor == Fraction(1, 2**consts.one_handles * consts.sym_plus),
            f"M={consts.one_handles} sym_plus={consts.sym_plus} sym={consts.sym}"
            + (" (overridden)" if consts.overridden else ""),
        ),
    )
    _check(
        report,
        "leading-coefficient",
        lambda: (mass.leading_coefficient() == leading_coefficient(graph, None, table), ""),
    )

    def normalization():
        cuts = [Fraction(0), Fraction(1, 3), Fraction(3, 5), Fraction(1)]
        if k == 1:
            return box_probability(graph, None, table) == 1, ""
        total = sum(
            box_probability(graph, BoxCone.from_bounds(k, {0: (a, b)}), table)
            for a, b in zip(cuts, cuts[1:])
        )
        return total == 1, f"sum={total}"

    _check(report, "normalization", normalization)

    if k >= 2:

        def marginals():
            bad = [i + 1 for i in range(k) if marginal(graph, i, table).integral() != 1]
            return not bad, f"non-normalized: {bad}" if bad else ""

        _check(report, "marginals", marginals)

        def calibration():
            lam = Fraction(7, 3)
            pt = _interior_points(graph)[1]
            box = _sample_boxes(k)[-1]
            m = [1] + [0] * (k - 1)
            return (
                density_at(graph, pt, table) == density_at(graph, pt, table, lam)
                and box_probability(graph, box, table) == box_probability(graph, box, table, lam)
                and moments(graph, m, table) == moments(graph, m, table, lam)
                and marginal(graph, 0, table) == marginal(graph, 0, table, lam),
                "",
            )

        _check(report, "calibration-independence", calibration)

    if graph.is_pants() and all(c == 1 for c in graph.weights):
        g = graph.genus

        def dirichlet():
            alpha = [2] * k
            bad = [
                p for p in _interior_points(graph) if density_at(graph, p, table) != dirichlet_density(alpha, p)
            ]
            return not bad, ""

        def cone_form():
            prod_x = PiPolynomial.from_terms(k, [((1,) * k, 0, 1)])
            for box in _sample_boxes(k):
                lhs = box_probability(graph, box, table)
                rhs = factorial(6 * g - 6) * cone_integral(prod_x, gp.domain, box).rational()
                if lhs != rhs:
                    return False, f"{lhs} != {rhs}"
            return True, ""

        _check(report, "pants-dirichlet", dirichlet)
        _check(report, "pants-cone-form", cone_form)

    claims = KNOWN_CLAIMS.get(canonical_form(graph.with_weights([1] * k)), ()) if all(
        c == 1 for c in graph.weights
    ) else ()
    for claim in (*claims, *extra_claims):
        report.claims.append(compare_claim(claim, gp.top, 2 * d - k))
    return report


def compare_claim(claim: Claim, top: PiPolynomial, expected_degree: int) -> ClaimResult:
    """Compare a stated top part with the computed one."""
    try:
        stated = PiPolynomial.parse(claim.text, top.nvars)
    except ValueError as exc:
        return ClaimResult(claim.label, False, f"unparseable ({exc})")
    notes = []
    if stated.is_zero():
        return ClaimResult(claim.label, False, "stated polynomial is zero")
    if not stated.is_homogeneous() or stated.degree() != expected_degree:
        deg = stated.degree()
        notes.append(
            f"stated degree {deg} violates the degree statement deg = 2d-k = {expected_degree}"
        )
    if match_up_to_permutation(stated, top) is not None:
        return ClaimResult(claim.label, True, f"{claim.text} matches")
    if claim.mode == "shape":
        supp_a = sorted(sorted(e) for (e, _) in stated.terms)
        supp_b = sorted(sorted(e) for (e, _) in top.terms)
        if supp_a == supp_b and len(stated.terms) == 1:
            return ClaimResult(claim.label, True, f"{claim.text} matches up to a constant")
    # coefficient comparison is meaningful for single-term exact statements
    if claim.mode == "shape":
        pass
    elif len(stated.terms) == 1 and len(top.terms) == 1:
        (ca,) = stated.terms.values()
        (cb,) = top.terms.values()
        if ca == cb:
            notes.append(f"coefficient {ca} agrees")
        else:
            notes.append(f"coefficient {ca} vs computed {cb} (factor {cb / ca})")
            if stated.degree() == expected_degree:
                notes.append("normalized statistics unaffected")
    else:
        ratio = _constant_ratio(stated, top)
        if ratio is not None:
            notes.append(f"agrees up to the constant factor {ratio}")
    notes.append(f"computed {top}")
    return ClaimResult(claim.label, False, f"{claim.text}: " + "; ".join(notes))


def _constant_ratio(a: PiPolynomial, b: PiPolynomial) -> Fraction | None:
    for perm in permutations(range(a.nvars)):
        pa = a.permute(perm)
        if set(pa.terms) != set(b.terms):
            continue
        ratios = {b.terms[key] / c for key, c in pa.terms.items()}
        if len(ratios) == 1:
            return ratios.pop()
    return None

