"""Seeded rejection sampling from the limiting length distribution.

Proposals are uniform on the normalized simplex {y >= 0, sum y = 1},
realized on the grid y_i = Y_i / 2^64 from the spacings of k - 1 sorted
64-bit draws; the point is x_i = y_i / c_i.  A proposal is accepted when
U < P^T(x) / envelope, with U another 64-bit grid value.  The comparison is
done in floats and repeated in exact rationals whenever the two sides are
too close for floats to decide, so the accepted set is exactly what an
exact-arithmetic sampler would produce.

Randomness: numpy's PCG64.  Work is cut into fixed-size chunks; chunk i is
driven by ``SeedSequence(seed, spawn_key=(i,))``, so the batch depends only
on (graph, count, seed), never on the number of workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .exactpoly import format_decimal
from .lengthstats import box_probability, graph_polynomial, moments
from .simplexint import BoxCone
from .stablegraph import StableGraph
from .wpvolume import VolumeTable

__all__ = [
    "SampleBatch",
    "StatRecord",
    "StatsReport",
    "envelope",
    "sample",
    "empirical_compare",
]

GRID = 2**64
CHUNK = 1 << 15
_CLOSE = 1e-9


def envelope(top, weights: Sequence[int] | None = None) -> Fraction:
    """Upper bound for P^T on the unit simplex {c.x = 1}.

    Each monomial x^a is bounded by its maximum on the simplex, attained at
    x_i = a_i / (m c_i); summing |coefficient| times these maxima bounds P^T.
    """
    if top.is_zero():
        raise ValueError("cannot sample from a zero density")
    if not top.is_u_free():
        raise ValueError("the sampling density must be free of pi")
    weights = weights or (1,) * top.nvars
    total = Fraction(0)
    for (exps, _), c in top.terms.items():
        m = sum(exps)
        peak = Fraction(1)
        for e, w in zip(exps, weights):
            if e:
                peak *= Fraction(e, m * w) ** e
        total += abs(c) * peak
    return total


@dataclass(frozen=True)
class _Target:
    exps: np.ndarray  # (terms, k) int
    coefs: np.ndarray  # (terms,) float, already divided by the envelope
    exact: tuple  # ((exps, Fraction coefficient / envelope), ...)
    weights: tuple[int, ...]

    def ratio_float(self, x: np.ndarray) -> np.ndarray:
        out = np.zeros(x.shape[0])
        for e, c in zip(self.exps, self.coefs):
            out += c * np.prod(x**e, axis=1)
        return out

    def ratio_exact(self, ys: Sequence[int]) -> Fraction:
        x = [Fraction(y, GRID * w) for y, w in zip(ys, self.weights)]
        total = Fraction(0)
        for exps, c in self.exact:
            term = c
            for xi, e in zip(x, exps):
                if e:
                    term *= xi**e
            total += term
        return total


def _target(graph: StableGraph, table) -> _Target:
    gp = graph_polynomial(graph, table)
    weights = graph.weights
    top = gp.top
    env = envelope(top, weights)
    items = sorted(top.terms.items())
    exact = tuple((exps, c / env) for (exps, _), c in items)
    return _Target(
        exps=np.array([e for e, _ in exact], dtype=np.int64).reshape(len(exact), graph.k),
        coefs=np.array([float(c) for _, c in exact]),
        exact=exact,
        weights=weights,
    )


def _spacings(cuts: np.ndarray) -> np.ndarray:
    """Grid spacings Y (uint64) from sorted cut points; last one via wraparound."""
    n, km1 = cuts.shape
    ys = np.empty((n, km1 + 1), dtype=np.uint64)
    if km1 == 0:
        return ys  # k = 1 never reaches here
    ys[:, 0] = cuts[:, 0]
    ys[:, 1:km1] = cuts[:, 1:] - cuts[:, :-1]
    ys[:, km1] = ~cuts[:, -1] + np.uint64(1)  # 2^64 - last cut
    return ys


def _run_chunk(target: _Target, seed: int, index: int, want: int) -> tuple[np.ndarray, int]:
    """Accepted cut points for chunk ``index`` and the number of proposals used."""
    k = len(target.weights)
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,))))
    bitgen = rng.bit_generator
    accepted: list[np.ndarray] = []
    have = 0
    proposals = 0
    wfloat = np.array(target.weights, dtype=float)
    while have < want:
        batch = max(256, 2 * (want - have))
        raw = bitgen.random_raw(batch * k).reshape(batch, k)
        cuts = np.sort(raw[:, : k - 1], axis=1)
        u = raw[:, k - 1]
        proposals += batch
        ys = _spacings(cuts)
        ok = np.all(ys > 0, axis=1)
        x = ys.astype(float) / float(GRID) / wfloat
        ratio = target.ratio_float(x)
        uf = u.astype(float) / float(GRID)
        accept = ok & (uf < ratio)
        close = ok & (np.abs(uf - ratio) < _CLOSE)
        for i in np.nonzero(close)[0]:
            exact = target.ratio_exact([int(v) for v in ys[i]])
            accept[i] = Fraction(int(u[i]), GRID) < exact
        idx = np.nonzero(accept)[0]
        if have + len(idx) > want:
            # stop at the proposal that produced the last needed sample
            idx = idx[: want - have]
            proposals -= batch - 1 - int(idx[-1])
        accepted.append(cuts[idx])
        have += len(idx)
    return np.concatenate(accepted, axis=0), proposals


@dataclass(frozen=True)
class SampleBatch:
    """Accepted points stored as sorted 64-bit cut points, shape (count, k-1)."""

    cuts: np.ndarray
    weights: tuple[int, ...]
    seed: int
    proposals: int

    @property
    def count(self) -> int:
        return self.cuts.shape[0]

    @property
    def k(self) -> int:
        return len(self.weights)

    def grid_values(self) -> np.ndarray:
        """Y with y_i = Y_i / 2^64, shape (count, k); not defined for k = 1."""
        if self.k == 1:
            raise ValueError("one-component batches carry no coordinates")
        return _spacings(self.cuts)

    def points(self) -> np.ndarray:
        """Float coordinates x, shape (count, k)."""
        if self.k == 1:
            return np.full((self.count, 1), 1.0 / self.weights[0])
        return self.grid_values().astype(float) / float(GRID) / np.array(self.weights, dtype=float)

    def exact_point(self, i: int) -> tuple[Fraction, ...]:
        if self.k == 1:
            return (Fraction(1, self.weights[0]),)
        return tuple(Fraction(int(y), GRID * w) for y, w in zip(self.grid_values()[i], self.weights))

    def to_bytes(self) -> bytes:
        return np.ascontiguousarray(self.cuts, dtype="<u8").tobytes()

    @property
    def acceptance_rate(self) -> float:
        return self.count / self.proposals if self.proposals else 1.0


def sample(
    graph: StableGraph,
    count: int,
    seed: int,
    table: VolumeTable | None = None,
    workers: int = 1,
) -> SampleBatch:
    """Draw ``count`` exact-acceptance samples from the limiting distribution."""
    if count < 1:
        raise ValueError("sample count must be positive")
    if seed < 0:
        raise ValueError("seed must be non-negative")
    target = _target(graph, table)
    if graph.k == 1:
        return SampleBatch(np.zeros((count, 0), dtype=np.uint64), graph.weights, seed, count)
    sizes = [CHUNK] * (count // CHUNK) + ([count % CHUNK] if count % CHUNK else [])
    jobs = list(enumerate(sizes))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda job: _run_chunk(target, seed, *job), jobs))
    else:
        results = [_run_chunk(target, seed, *job) for job in jobs]
    cuts = np.concatenate([r[0] for r in results], axis=0)
    return SampleBatch(cuts, graph.weights, seed, sum(r[1] for r in results))


# -- comparison ----------------------------------------------------------------


@dataclass(frozen=True)
class StatRecord:
    name: str
    exact: Fraction
    empirical: float
    stderr: float

    @property
    def z(self) -> float:
        return abs(float(self.exact) - self.empirical) / self.stderr


@dataclass
class StatsReport:
    count: int
    seed: int
    proposals: int
    records: list[StatRecord] = field(default_factory=list)

    def max_z(self) -> float:
        return max((r.z for r in self.records), default=0.0)

    def render_records(self, digits: int = 10) -> str:
        lines = [f"samples count={self.count} seed={self.seed} proposals={self.proposals}"]
        for r in self.records:
            lines.append(
                f"stat name={r.name} exact={r.exact.numerator}/{r.exact.denominator} "
                f"decimal={format_decimal(r.exact, digits)} "
                f"empirical={r.empirical:.{digits}f} stderr={r.stderr:.{digits}f} z={r.z:.4f}"
            )
        return "\n".join(lines) + "\n"

    def render_table(self, digits: int = 6) -> str:
        head = ("statistic", "exact", "decimal", "empirical", "stderr", "z")
        rows = [
            (
                r.name,
                f"{r.exact.numerator}/{r.exact.denominator}",
                format_decimal(r.exact, digits),
                f"{r.empirical:.{digits}f}",
                f"{r.stderr:.{digits}f}",
                f"{r.z:.3f}",
            )
            for r in self.records
        ]
        widths = [max(len(row[i]) for row in [head, *rows]) for i in range(len(head))]
        fmt = lambda row: "  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip()
        out = [f"{self.count} samples, seed {self.seed}, {self.proposals} proposals", fmt(head)]
        out.append("  ".join("-" * w for w in widths))
        out += [fmt(row) for row in rows]
        return "\n".join(out) + "\n"


def _in_box(batch: SampleBatch, box: BoxCone) -> np.ndarray:
    """Exact membership of every sample's normalized coordinates in the box."""
    ys = batch.grid_values()
    yf = ys.astype(float) / float(GRID)
    lo = np.array([float(a) for a in box.lower])
    hi = np.array([float(b) for b in box.upper])
    inside = np.all((yf >= lo) & (yf <= hi), axis=1)
    near = np.any((np.abs(yf - lo) < _CLOSE) | (np.abs(yf - hi) < _CLOSE), axis=1)
    for r in np.nonzero(near)[0]:
        inside[r] = all(
            a * GRID <= int(y) <= b * GRID for y, a, b in zip(ys[r], box.lower, box.upper)
        )
    return inside


def _box_name(box: BoxCone) -> str:
    parts = [
        f"{i + 1}={a}:{b}"
        for i, (a, b) in enumerate(zip(box.lower, box.upper))
        if a != 0 or b != 1
    ]
    return "P[" + ",".join(parts or ["all"]) + "]"


def _moment_name(m: Sequence[int]) -> str:
    return "E[" + "*".join(f"x{i + 1}^{e}" if e > 1 else f"x{i + 1}" for i, e in enumerate(m) if e) + "]"


def empirical_compare(
    batch: SampleBatch,
    graph: StableGraph,
    boxes: Sequence[BoxCone] = (),
    moment_list: Sequence[Sequence[int]] = (),
    table: VolumeTable | None = None,
) -> StatsReport:
    """Compare sample frequencies and means with their exact values.

    Box frequencies get the binomial standard error sqrt(p(1-p)/n) from the
    exact p; moments get sqrt(Var/n) with the variance computed exactly.
    Statistics whose exact standard error is 0 are skipped.
    """
    if tuple(batch.weights) != graph.weights:
        raise ValueError("batch was drawn for a different multicurve")
    n = batch.count
    report = StatsReport(n, batch.seed, batch.proposals)
    if graph.k == 1:
        return report
    for box in boxes:
        p = box_probability(graph, box, table)
        var = float(p * (1 - p))
        if var == 0:
            continue
        freq = float(np.count_nonzero(_in_box(batch, box))) / n
        report.records.append(StatRecord(_box_name(box), p, freq, math.sqrt(var / n)))
    x = batch.points()
    for m in moment_list:
        m = tuple(int(e) for e in m)
        mean = moments(graph, m, table)
        second = moments(graph, tuple(2 * e for e in m), table)
        var = float(second - mean * mean)
        if var <= 0:
            continue
        emp = float(np.mean(np.prod(x ** np.array(m), axis=1)))
        report.records.append(StatRecord(_moment_name(m), mean, emp, math.sqrt(var / n)))
    return report
