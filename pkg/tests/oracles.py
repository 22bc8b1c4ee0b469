"""Independent reference computations used to check the exact engine."""

from fractions import Fraction
from math import prod

import sympy
from scipy import integrate


def sympy_slice_integral(exps, weights):
    """d/dL of the integral of x^a over {x >= 0, c.x <= L}, at L = 1.

    Plain iterated integration; no Dirichlet formula involved.
    """
    k = len(exps)
    L = sympy.Symbol("L", positive=True)
    xs = sympy.symbols(f"x1:{k + 1}", nonnegative=True)
    expr = sympy.Mul(*[x**e for x, e in zip(xs, exps)])
    # integrate x1 first (innermost), then x2, ...
    for i in range(k):
        rest = sum(weights[j] * xs[j] for j in range(i + 1, k))
        expr = sympy.integrate(expr, (xs[i], 0, (L - rest) / weights[i]))
    value = sympy.diff(expr, L).subs(L, 1)
    return Fraction(int(sympy.numer(value)), int(sympy.denom(value)))


def quad_box_integral(terms, weights, lower, upper, epsrel=1e-11):
    """Integral of sum c x^a over {c.x = 1, lower <= c_i x_i <= upper} by nquad.

    ``terms`` is a list of (exps, float coefficient).  Works in the
    normalized coordinates y_i = c_i x_i, with y_k eliminated; the measure
    is dy_1 ... dy_{k-1} / prod(c).
    """
    k = len(weights)
    c = [float(w) for w in weights]
    a = [float(t) for t in lower]
    b = [float(t) for t in upper]

    def density(ys):
        x = [y / ci for y, ci in zip(ys, c)]
        return sum(coef * prod(xi**e for xi, e in zip(x, exps)) for exps, coef in terms)

    if k == 1:
        return density([1.0]) / c[0] if a[0] <= 1.0 <= b[0] else 0.0

    tail_lo = [sum(a[j + 1 :]) for j in range(k)]
    tail_hi = [sum(b[j + 1 :]) for j in range(k)]

    def make_range(j):
        # variables are passed innermost first: (y_{k-1}, ..., y_1); y_j's
        # range depends on y_1..y_{j-1}, which follow it in the argument list
        def rng(*outer):
            s = sum(outer)
            lo = max(a[j], 1 - s - tail_hi[j])
            hi = min(b[j], 1 - s - tail_lo[j])
            return (lo, max(lo, hi))

        return rng

    ranges = [make_range(j) for j in reversed(range(k - 1))]

    def f(*args):
        ys = list(reversed(args))
        ys.append(1.0 - sum(ys))
        return density(ys)

    val, _ = integrate.nquad(f, ranges, opts={"epsrel": epsrel, "epsabs": 0, "limit": 200})
    return val / prod(c)
