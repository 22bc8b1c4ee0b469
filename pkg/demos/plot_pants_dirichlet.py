"""
Pants decompositions and the Dirichlet law
==========================================

Cut a genus-2 surface along three disjoint curves so that two pairs of pants
remain.  Where do the lengths go, once normalized to sum to one?

"""

from fractions import Fraction

from mcstats import parse_multicurve
from mcstats.lengthstats import box_probability, density_at, graph_polynomial, marginal, moments
from mcstats.simplexint import BoxCone

##############################################################################
# Two ways to glue
# ----------------
#
# There are two pants decompositions in genus 2.  In the *theta* graph both
# pairs of pants share all three curves; in the *dumbbell* each pair of pants
# has a loop and a single curve joins them.

theta = parse_multicurve("""
genus 2
vertex P genus 0
vertex Q genus 0
edge x1 P Q
edge x2 P Q
edge x3 P Q
""")

dumbbell = parse_multicurve("""
genus 2
vertex P genus 0
vertex Q genus 0
edge x1 P P
edge x2 P Q
edge x3 Q Q
""")

for name, g in [("theta", theta), ("dumbbell", dumbbell)]:
    gp = graph_polynomial(g)
    print(f"{name:9s} P = {gp.full}")

##############################################################################
# The polynomials differ only by the symmetry factor, so the normalized
# statistics agree: both give the density proportional to x1 x2 x3, i.e.
# Dirichlet(2, 2, 2).

pt = (Fraction(1, 2), Fraction(1, 3), Fraction(1, 6))
print("density at", ", ".join(map(str, pt)), "=", density_at(theta, pt), "and", density_at(dumbbell, pt))

##############################################################################
# Marginals and moments
# ---------------------
#
# Each coordinate is Beta(2, 4).  We print the exact density and a crude text
# plot of it.

mg = marginal(theta, 0)
print("marginal:", mg.density.to_text("t"))
for t, y in mg.plot_points(11):
    print(f"{float(t):4.1f} {'#' * round(20 * float(y) / 2.2)}")

print("E[x1]   =", moments(theta, (1, 0, 0)))
print("E[x1^2] =", moments(theta, (2, 0, 0)))

##############################################################################
# Box probabilities are exact rationals.

box = BoxCone.from_bounds(3, {0: (0, Fraction(1, 2))})
print("P[x1 <= 1/2] =", box_probability(theta, box))
