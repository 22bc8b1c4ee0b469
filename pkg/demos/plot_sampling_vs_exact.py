"""
Sampling versus exact answers
=============================

Draw seeded samples from the limiting length distribution and compare the
empirical frequencies with the exact box probabilities.

"""

from fractions import Fraction

import numpy as np

from mcstats import parse_multicurve
from mcstats.lengthstats import marginal
from mcstats.sampling import empirical_compare, sample
from mcstats.simplexint import BoxCone

##############################################################################
# A genus-2 multicurve with two components: a loop on a pair of pants, and a
# curve cutting off a one-holed torus.

g = parse_multicurve("""
genus 2
vertex P genus 0
vertex T genus 1
edge x1 P P
edge x2 P T
""")

batch = sample(g, 200_000, seed=1)
print(f"{batch.count} samples, acceptance rate {batch.acceptance_rate:.3f}")

##############################################################################
# A histogram of the first normalized length against the exact marginal
# 20 t (1 - t)^3, binned through its exact cdf.

mg = marginal(g, 0)
counts, _ = np.histogram(batch.points()[:, 0], bins=10, range=(0, 1))
for i, c in enumerate(counts):
    lo, hi = Fraction(i, 10), Fraction(i + 1, 10)
    exact = mg.cdf(hi) - mg.cdf(lo)
    print(f"[{float(lo):.1f}, {float(hi):.1f})  empirical {c / batch.count:.4f}  exact {float(exact):.4f}")

##############################################################################
# The comparison table: every statistic with its standard error and z-score.

boxes = [BoxCone.from_bounds(2, {1: (Fraction(1, 2), 1)}), BoxCone.from_bounds(2, {0: (0, Fraction(1, 10))})]
report = empirical_compare(batch, g, boxes, [(1, 0), (0, 2)])
print(report.render_table(5))
