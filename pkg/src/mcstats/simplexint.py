"""Exact integration of polynomials over weighted simplices and box cones.

Measure calibration: on the slice {c.x = L} the measure ds is the
L-derivative of Lebesgue measure on the ball {x >= 0, c.x <= L} (coarea in
L).  For a monomial x^a with m = |a| this gives

    ball:    prod(a_i!) / (m + k)!     * L^(m+k)   / prod(c_i^(a_i+1))
    simplex: prod(a_i!) / (m + k - 1)! * L^(m+k-1) / prod(c_i^(a_i+1))

Box cones constrain the normalized coordinates y_i = c_i x_i / (c.x) to
[a_i, b_i].  Box integrals are evaluated exactly by shifting to the lower
corner and inclusion-exclusion over the upper faces, which turns every
piece into a full scaled simplex where the Dirichlet formula applies.

Every integral takes an optional ``measure_scale`` that multiplies ds; it
exists so callers can check that normalized statistics do not depend on
the calibration.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb, factorial, prod
from typing import Sequence

from .exactpoly import ExactScalar, PiPolynomial

log = logging.getLogger(__name__)

__all__ = [
    "SimplexDomain",
    "BoxCone",
    "MassPolynomial",
    "monomial_ball_integral",
    "monomial_simplex_integral",
    "poly_simplex_integral",
    "box_simplex_integral",
    "cone_integral",
    "parse_box_spec",
]


@dataclass(frozen=True)
class SimplexDomain:
    weights: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(int(c) for c in self.weights))
        if not self.weights:
            raise ValueError("simplex needs at least one coordinate")
        if any(c < 1 for c in self.weights):
            raise ValueError("simplex weights must be positive integers")

    @classmethod
    def unit(cls, k: int) -> "SimplexDomain":
        return cls((1,) * k)

    @property
    def k(self) -> int:
        return len(self.weights)

    def contains(self, point: Sequence[Fraction]) -> bool:
        return (
            len(point) == self.k
            and all(p > 0 for p in point)
            and sum(c * p for c, p in zip(self.weights, point)) == 1
        )


@dataclass(frozen=True)
class BoxCone:
    """Bounds a_i <= c_i x_i / (c.x) <= b_i on the normalized coordinates."""

    lower: tuple[Fraction, ...]
    upper: tuple[Fraction, ...]

    def __post_init__(self):
        lo = tuple(Fraction(a) for a in self.lower)
        hi = tuple(Fraction(b) for b in self.upper)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)
        if len(lo) != len(hi):
            raise ValueError("lower and upper bounds differ in length")
        for i, (a, b) in enumerate(zip(lo, hi)):
            if not (0 <= a < b <= 1):
                raise ValueError(f"coordinate {i + 1}: need 0 <= a < b <= 1, got [{a}, {b}]")

    @classmethod
    def full(cls, k: int) -> "BoxCone":
        return cls((Fraction(0),) * k, (Fraction(1),) * k)

    @classmethod
    def from_bounds(cls, k: int, bounds: dict[int, tuple]) -> "BoxCone":
        """Build from ``{index: (lo, hi)}`` with 0-based indices."""
        lo = [Fraction(0)] * k
        hi = [Fraction(1)] * k
        for i, (a, b) in bounds.items():
            if not 0 <= i < k:
                raise ValueError(f"box index {i + 1} out of range 1..{k}")
            lo[i], hi[i] = Fraction(a), Fraction(b)
        return cls(tuple(lo), tuple(hi))

    @property
    def k(self) -> int:
        return len(self.lower)

    def is_full(self) -> bool:
        return all(a == 0 for a in self.lower) and all(b == 1 for b in self.upper)

    def is_feasible(self) -> bool:
        """Whether the box meets the simplex in a set of positive measure."""
        return sum(self.lower) < 1 < sum(self.upper) or (
            self.k == 1 and self.lower[0] < 1 <= self.upper[0]
        )

    def __str__(self):
        return " ".join(f"{i + 1}={a}:{b}" for i, (a, b) in enumerate(zip(self.lower, self.upper)))

    def contains_normalized(self, y: Sequence[Fraction]) -> bool:
        return all(a <= t <= b for a, t, b in zip(self.lower, y, self.upper))


def parse_box_spec(specs: Sequence[str], k: int) -> BoxCone:
    """Parse CLI box flags like ``1=0:1/2`` (1-based index, rational ends)."""
    bounds = {}
    for spec in specs:
        try:
            idx, rng = spec.split("=", 1)
            lo, hi = rng.split(":", 1)
            i = int(idx) - 1
            ends = (Fraction(lo), Fraction(hi))
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"malformed box spec {spec!r}; expected i=lo:hi") from None
        if i in bounds:
            raise ValueError(f"box index {i + 1} given twice")
        bounds[i] = ends
    return BoxCone.from_bounds(k, bounds)


@dataclass(frozen=True)
class MassPolynomial:
    """Univariate polynomial in L with coefficients in Q[u]."""

    coeffs: dict
    feasible: bool = True

    @classmethod
    def zero(cls, feasible: bool = True) -> "MassPolynomial":
        return cls({}, feasible)

    def degree(self) -> int:
        if not self.coeffs:
            raise ValueError("zero mass polynomial has no degree")
        return max(self.coeffs)

    def coefficient(self, power: int) -> ExactScalar:
        return self.coeffs.get(power, ExactScalar())

    def leading_coefficient(self) -> ExactScalar:
        return self.coeffs[self.degree()] if self.coeffs else ExactScalar()

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, L) -> ExactScalar:
        L = Fraction(L)
        return sum((c * L**p for p, c in self.coeffs.items()), ExactScalar())

    def __add__(self, other: "MassPolynomial") -> "MassPolynomial":
        out = dict(self.coeffs)
        for p, c in other.coeffs.items():
            s = out.get(p, ExactScalar()) + c
            if s:
                out[p] = s
            else:
                out.pop(p, None)
        return MassPolynomial(out, self.feasible and other.feasible)

    def __eq__(self, other):
        if not isinstance(other, MassPolynomial):
            return NotImplemented
        return self.coeffs == other.coeffs

    def to_text(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for p in sorted(self.coeffs, reverse=True):
            c = self.coeffs[p]
            mono = "" if p == 0 else ("L" if p == 1 else f"L^{p}")
            body = str(c)
            if len(c.terms) > 1:
                body = f"({body})"
            parts.append(f"{body}*{mono}" if mono else body)
        return " + ".join(parts)

    __str__ = to_text


# -- closed forms --------------------------------------------------------------


def _check_exps(a: Sequence[int], dom: SimplexDomain):
    if len(a) != dom.k:
        raise ValueError(f"exponent vector has {len(a)} entries, simplex has {dom.k}")
    if any(e < 0 for e in a):
        raise ValueError("exponents must be non-negative")


def _dirichlet(a: Sequence[int], extra: int) -> Fraction:
    # prod(a_i!) / (|a| + extra)!
    return Fraction(prod(factorial(e) for e in a), factorial(sum(a) + extra))


def monomial_ball_integral(a: Sequence[int], dom: SimplexDomain) -> tuple[Fraction, int]:
    """Integral of x^a over {x >= 0, c.x <= L} as (coefficient, power of L)."""
    _check_exps(a, dom)
    k, m = dom.k, sum(a)
    cpow = prod(c ** (e + 1) for c, e in zip(dom.weights, a))
    return _dirichlet(a, k) / cpow, m + k


def monomial_simplex_integral(
    a: Sequence[int], dom: SimplexDomain, measure_scale: Fraction = Fraction(1)
) -> tuple[Fraction, int]:
    """Integral of x^a over {x >= 0, c.x = L} against ds, as (coefficient, power)."""
    _check_exps(a, dom)
    k, m = dom.k, sum(a)
    cpow = prod(c ** (e + 1) for c, e in zip(dom.weights, a))
    return measure_scale * _dirichlet(a, k - 1) / cpow, m + k - 1


def poly_simplex_integral(
    p: PiPolynomial, dom: SimplexDomain, measure_scale: Fraction = Fraction(1)
) -> MassPolynomial:
    """Integral of p over the slice c.x = L as a polynomial in L."""
    if p.nvars != dom.k:
        raise ValueError(f"polynomial has {p.nvars} variables, simplex has {dom.k}")
    out: dict[int, dict[int, Fraction]] = {}
    for (exps, j), c in p._terms.items():
        coef, power = monomial_simplex_integral(exps, dom, measure_scale)
        slot = out.setdefault(power, {})
        slot[j] = slot.get(j, 0) + c * coef
    coeffs = {pw: ExactScalar(d) for pw, d in out.items()}
    return MassPolynomial({pw: s for pw, s in coeffs.items() if s})


# -- box integrals -------------------------------------------------------------


def _std_simplex_monomial(b: Sequence[int], size: Fraction) -> Fraction:
    """Integral of t^b over {t >= 0, sum t = size} (coarea measure)."""
    k = len(b)
    return _dirichlet(b, k - 1) * size ** (sum(b) + k - 1)


def _shifted_monomial_integral(a: Sequence[int], shift: Sequence[Fraction], size: Fraction) -> Fraction:
    """Integral of prod (shift_i + t_i)^{a_i} over {t >= 0, sum t = size}."""
    # expand each factor binomially; integrate term by term
    per_var = [[(comb(e, r) * s ** (e - r), r) for r in range(e + 1)] for e, s in zip(a, shift)]
    total = Fraction(0)

    def walk(i, coef, exps):
        nonlocal total
        if i == len(per_var):
            total += coef * _std_simplex_monomial(exps, size)
            return
        for c, r in per_var[i]:
            if c:
                walk(i + 1, coef * c, exps + [r])

    walk(0, Fraction(1), [])
    return total


def _box_monomial_normalized(a: Sequence[int], box: BoxCone) -> Fraction:
    """Integral of y^a over {sum y = 1, a_i <= y_i <= b_i} (coarea measure in y)."""
    k = box.k
    if k == 1:
        return Fraction(1) if box.lower[0] <= 1 <= box.upper[0] else Fraction(0)
    base = 1 - sum(box.lower)
    if base <= 0:
        return Fraction(0)
    widths = [b - lo for lo, b in zip(box.lower, box.upper)]
    total = Fraction(0)
    for r in range(k + 1):
        for S in combinations(range(k), r):
            size = base - sum(widths[i] for i in S)
            if size <= 0:
                continue
            shift = [box.lower[i] + (widths[i] if i in S else 0) for i in range(k)]
            total += (-1) ** r * _shifted_monomial_integral(a, shift, size)
    return total


def box_simplex_integral(
    p: PiPolynomial,
    dom: SimplexDomain,
    box: BoxCone | None = None,
    measure_scale: Fraction = Fraction(1),
) -> ExactScalar:
    """Integral of p over {x in Delta^1 : a_i <= c_i x_i <= b_i} against ds.

    Infeasible boxes integrate to 0; a warning is logged.
    """
    if p.nvars != dom.k:
        raise ValueError(f"polynomial has {p.nvars} variables, simplex has {dom.k}")
    if box is None:
        box = BoxCone.full(dom.k)
    if box.k != dom.k:
        raise ValueError(f"box has {box.k} coordinates, simplex has {dom.k}")
    if not box.is_feasible():
        log.warning("box %s meets the simplex in a null set", box)
        return ExactScalar()
    full = box.is_full()
    cprod = prod(dom.weights)
    acc: dict[int, Fraction] = {}
    cache: dict[tuple[int, ...], Fraction] = {}
    for (exps, j), c in p._terms.items():
        if exps not in cache:
            if full:
                cache[exps] = monomial_simplex_integral(exps, dom)[0]
            else:
                # x_i = y_i / c_i and ds_x = ds_y / prod(c)
                cpow = prod(ci**e for ci, e in zip(dom.weights, exps))
                cache[exps] = _box_monomial_normalized(exps, box) / (cpow * cprod)
        acc[j] = acc.get(j, 0) + c * cache[exps] * measure_scale
    return ExactScalar({j: v for j, v in acc.items() if v})


def cone_integral(p: PiPolynomial, dom: SimplexDomain, box: BoxCone | None = None) -> ExactScalar:
    """Lebesgue integral of homogeneous p over the cone on (Delta^1 cap box), c.x <= 1."""
    if p.is_zero():
        return ExactScalar()
    if not p.is_homogeneous():
        raise ValueError("cone_integral needs a homogeneous polynomial")
    return box_simplex_integral(p, dom, box) / (p.degree() + dom.k)
