"""Graph polynomials and the limiting length statistics of a multicurve.

For a multicurve with stable graph Gamma the graph polynomial is

    P = 2^(-M) / |Sym+| * prod_e x_e * prod_v V_{g_v, n_v}(x_v)

with M the number of one-handles.  Its top part P^T, restricted to the
unit simplex {c.x = 1}, is (up to normalization) the density of the
limiting distribution nu of normalized component lengths.

Normalized outputs (density, probabilities, moments, marginals) take a
``measure_scale`` argument.  It multiplies the simplex measure in both the
numerator and the normalizing constant, so any positive value must leave
the result unchanged; tests use it to pin the calibration out.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from math import comb
from typing import Sequence

from .exactpoly import ExactScalar, PiPolynomial
from .simplexint import (
    BoxCone,
    MassPolynomial,
    SimplexDomain,
    box_simplex_integral,
    monomial_simplex_integral,
)
from .stablegraph import StableGraph, graph_constants
from .wpvolume import VolumeTable, default_table

__all__ = [
    "GraphPolynomial",
    "Marginal",
    "graph_polynomial",
    "graph_polynomial_top",
    "total_mass",
    "leading_coefficient",
    "density_at",
    "box_probability",
    "moments",
    "marginal",
    "counting_coefficient",
    "dirichlet_density",
]

ONE = Fraction(1)


@dataclass(frozen=True)
class GraphPolynomial:
    graph: StableGraph
    full: PiPolynomial
    top: PiPolynomial
    prefactor: Fraction
    variables: tuple[str, ...]

    @property
    def domain(self) -> SimplexDomain:
        return SimplexDomain(self.graph.weights)


@lru_cache(maxsize=256)
def _build(graph: StableGraph, table: VolumeTable) -> GraphPolynomial:
    k = graph.k
    consts = graph_constants(graph)
    prefactor = Fraction(1, 2**consts.one_handles * consts.sym_plus)
    p = PiPolynomial.constant(prefactor, k)
    for i in range(k):
        p = p * PiPolynomial.var(i, k)
    for v in graph.vertices:
        slots = graph.half_edges(v.id)
        vol = table.get((v.genus, len(slots)))
        # argument j of V_{g,n} becomes edge variable slots[j]
        p = p * vol.embed(slots, k)
    top = p.top_part()
    names = tuple(e.id for e in graph.edge_order())
    return GraphPolynomial(graph, p, top, prefactor, names)


def graph_polynomial(graph: StableGraph, table: VolumeTable | None = None) -> GraphPolynomial:
    """P_Gamma and its top part, variables ordered by edge id."""
    return _build(graph, table or default_table())


def graph_polynomial_top(graph: StableGraph, table: VolumeTable | None = None) -> PiPolynomial:
    return graph_polynomial(graph, table).top


def _box(graph: StableGraph, box: BoxCone | None) -> BoxCone:
    if box is None:
        return BoxCone.full(graph.k)
    if box.k != graph.k:
        raise ValueError(f"box has {box.k} coordinates but the multicurve has {graph.k} components")
    return box


def total_mass(
    graph: StableGraph, box: BoxCone | None = None, table: VolumeTable | None = None
) -> MassPolynomial:
    """Mass of the horosphere {c.x = L} inside the box cone, as a polynomial in L."""
    gp = graph_polynomial(graph, table)
    box = _box(graph, box)
    if not box.is_feasible():
        return MassPolynomial.zero(feasible=False)
    dom = gp.domain
    k = graph.k
    coeffs = {}
    for m, part in gp.full.homogeneous_parts().items():
        # the part of degree m scales as L^(m + k - 1) on the slice
        val = box_simplex_integral(part, dom, box)
        if val:
            coeffs[m + k - 1] = val
    return MassPolynomial(coeffs)


def leading_coefficient(
    graph: StableGraph, box: BoxCone | None = None, table: VolumeTable | None = None
) -> ExactScalar:
    """C = integral of P^T over the unit simplex cut by the box."""
    gp = graph_polynomial(graph, table)
    return box_simplex_integral(gp.top, gp.domain, _box(graph, box))


def _normalizer(gp: GraphPolynomial, measure_scale: Fraction) -> Fraction:
    return box_simplex_integral(gp.top, gp.domain, None, measure_scale).rational()


def density_at(
    graph: StableGraph,
    point: Sequence,
    table: VolumeTable | None = None,
    measure_scale: Fraction = ONE,
) -> Fraction:
    """Density of nu at a point of the unit simplex.

    The density is taken in the chart (x_1, ..., x_{k-1}); the last
    coordinate is determined by c.x = 1.  With unit weights this is
    P^T(x) / integral(P^T).  A one-component multicurve has a point mass,
    reported as 1.
    """
    gp = graph_polynomial(graph, table)
    dom = gp.domain
    pt = tuple(Fraction(x) for x in point)
    if not dom.contains(pt):
        raise ValueError("point is not in the open unit simplex sum c_i x_i = 1, x_i > 0")
    if graph.k == 1:
        return ONE
    scale = Fraction(measure_scale)
    # ds = dx_1 ... dx_{k-1} / c_k, so the chart density picks up 1/c_k
    num = gp.top.evaluate(pt).rational() * scale / dom.weights[-1]
    return num / _normalizer(gp, scale)


def box_probability(
    graph: StableGraph,
    box: BoxCone | None = None,
    table: VolumeTable | None = None,
    measure_scale: Fraction = ONE,
) -> Fraction:
    """nu(box) as an exact rational."""
    gp = graph_polynomial(graph, table)
    box = _box(graph, box)
    scale = Fraction(measure_scale)
    num = box_simplex_integral(gp.top, gp.domain, box, scale).rational()
    return num / _normalizer(gp, scale)


def moments(
    graph: StableGraph,
    exponents: Sequence[int],
    table: VolumeTable | None = None,
    measure_scale: Fraction = ONE,
) -> Fraction:
    """E_nu[prod x_i^m_i]."""
    gp = graph_polynomial(graph, table)
    k = graph.k
    if len(exponents) != k:
        raise ValueError(f"need {k} exponents, got {len(exponents)}")
    if any(int(m) < 0 for m in exponents):
        raise ValueError("moment exponents must be non-negative")
    mono = PiPolynomial.from_terms(k, [(tuple(int(m) for m in exponents), 0, 1)])
    scale = Fraction(measure_scale)
    num = box_simplex_integral(gp.top * mono, gp.domain, None, scale).rational()
    return num / _normalizer(gp, scale)


@dataclass(frozen=True)
class Marginal:
    """Density of one coordinate of nu, a single polynomial on (0, upper)."""

    index: int
    density: PiPolynomial
    upper: Fraction

    def __call__(self, t) -> Fraction:
        return self.density.evaluate((Fraction(t),)).rational()

    def integral(self) -> Fraction:
        """Integral over the support; 1 for a correctly normalized marginal."""
        total = Fraction(0)
        for ((e,), _), c in self.density.terms.items():
            total += c * self.upper ** (e + 1) / (e + 1)
        return total

    def cdf(self, t) -> Fraction:
        t = Fraction(t)
        return sum(
            (c * t ** (e + 1) / (e + 1) for ((e,), _), c in self.density.terms.items()),
            Fraction(0),
        )

    def plot_points(self, count: int) -> list[tuple[Fraction, Fraction]]:
        """``count`` evenly spaced (t, density) pairs, endpoints included."""
        if count < 2:
            raise ValueError("need at least two plot points")
        step = self.upper / (count - 1)
        return [(i * step, self(i * step)) for i in range(count)]


def marginal(
    graph: StableGraph,
    index: int,
    table: VolumeTable | None = None,
    measure_scale: Fraction = ONE,
) -> Marginal:
    """Exact density of x_index (0-based) under nu.

    Fixing x_i = t leaves a copy of the remaining simplex scaled to total
    1 - c_i t, so each monomial integrates to t^a_i (1 - c_i t)^(m + k - 2)
    times a Dirichlet constant.
    """
    gp = graph_polynomial(graph, table)
    k = graph.k
    if not 0 <= index < k:
        raise ValueError(f"index {index + 1} out of range 1..{k}")
    if k == 1:
        raise ValueError("a one-component multicurve has a point-mass distribution")
    scale = Fraction(measure_scale)
    weights = gp.domain.weights
    ci = weights[index]
    rest = SimplexDomain(weights[:index] + weights[index + 1 :])
    acc: dict[int, Fraction] = {}
    for (exps, _), c in gp.top.terms.items():
        a_rest = exps[:index] + exps[index + 1 :]
        coef, power = monomial_simplex_integral(a_rest, rest, scale)
        base = c * coef
        # (1 - c_i t)^power expanded
        for r in range(power + 1):
            e = exps[index] + r
            acc[e] = acc.get(e, 0) + base * comb(power, r) * (-ci) ** r
    norm = _normalizer(gp, scale)
    dens = PiPolynomial.from_terms(1, [((e,), 0, v / norm) for e, v in acc.items() if v])
    return Marginal(index, dens, Fraction(1, ci))


def counting_coefficient(
    graph: StableGraph,
    ratio,
    box: BoxCone | None = None,
    table: VolumeTable | None = None,
) -> Fraction:
    """C * |Sym| * ratio / (2d), where ratio = B(X)/b_g is supplied by the caller."""
    ratio = Fraction(ratio)
    if ratio < 0:
        raise ValueError("ratio must be non-negative")
    c = leading_coefficient(graph, box, table).rational()
    consts = graph_constants(graph)
    return c * consts.sym * ratio / (2 * graph.d)


def dirichlet_density(alpha: Sequence[int], point: Sequence) -> Fraction:
    """Dirichlet(alpha) density on the standard simplex, integer parameters."""
    from math import factorial, prod

    pt = [Fraction(x) for x in point]
    norm = Fraction(factorial(sum(alpha) - 1), prod(factorial(a - 1) for a in alpha))
    return norm * prod((x ** (a - 1) for x, a in zip(pt, alpha)), start=Fraction(1))


def match_up_to_permutation(a: PiPolynomial, b: PiPolynomial) -> tuple[int, ...] | None:
    """A permutation sending a's variables onto b's, or None."""
    if a.nvars != b.nvars:
        return None
    for perm in permutations(range(a.nvars)):
        if a.permute(perm) == b:
            return perm
    return None
