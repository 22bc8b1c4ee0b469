"""
A small table of volume polynomials
===================================

Volumes of moduli spaces of bordered hyperbolic surfaces are polynomials in
the boundary lengths with coefficients in Q[pi^2].  This script tabulates a
few, with their top-degree parts, and saves them to a cache.

"""

import tempfile
from pathlib import Path

from mcstats.wpvolume import VolumeTable, cache_load, cache_save

table = VolumeTable()
for g, n in [(0, 3), (0, 4), (1, 1), (1, 2), (2, 1)]:
    p = table.get((g, n))
    print(f"V[{g},{n}] degree {p.degree()}")
    print("   ", p)
    print("    top:", p.top_part())

##############################################################################
# Closed surfaces have constant volumes, e.g. 43 pi^6 / 2160 in genus 2.

print("V[2,0] =", table.get((2, 0)))

##############################################################################
# The cache file is plain text with a checksum per record.

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "volumes.cache"
    cache_save(table, path)
    print(path.read_text().splitlines()[0])
    again = cache_load(path)
    assert again.get((2, 1)) == table.get((2, 1))
