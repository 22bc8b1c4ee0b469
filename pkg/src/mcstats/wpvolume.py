"""Weil-Petersson volume polynomials V_{g,n}(x_1, ..., x_n) over Q[u].

Volumes are produced by Mirzakhani's integration recursion

    d/dL1 (L1 V_{g,n}) = A_con + A_dcon + B

whose kernel integrals reduce to the polynomials

    F_{2k+1}(t) = int_0^oo x^{2k+1} H(x, t) dx
                = (2k+1)! sum_{i=0}^{k+1} zeta(2i) (2^{2i+1} - 4) t^{2k+2-2i} / (2k+2-2i)!

with zeta(0) = -1/2 and zeta(2i) a rational multiple of u^i.

The recursion is self-consistent with V_{1,1} = (x^2 + 4u)/48 (the factor
two from the elliptic involution).  The public table follows the other
common convention V_{1,1} = (x^2 + 4u)/24; graph polynomials compensate
through their 2^{-M} one-handle prefactor.  Only the (1,1) entry differs.
"""

from __future__ import annotations

import hashlib
import logging
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, permutations
from math import comb, factorial
from pathlib import Path
from random import Random

from sympy import bernoulli

from .exactpoly import ExactScalar, PiPolynomial, PolynomialParseError

log = logging.getLogger(__name__)

__all__ = [
    "SurfaceType",
    "VolumeTable",
    "ResourceLimitError",
    "VolumeValidationError",
    "CacheCorruptionError",
    "volume_polynomial",
    "volume_top",
    "cache_save",
    "cache_load",
    "validate_volume",
    "default_table",
]

DEFAULT_MAX_EULER = 8


class ResourceLimitError(RuntimeError):
    """A configured size cap would be exceeded."""


class VolumeValidationError(ValueError):
    pass


class CacheCorruptionError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class SurfaceType:
    g: int
    n: int

    def __post_init__(self):
        if self.g < 0 or self.n < 0:
            raise ValueError(f"genus and boundary count must be non-negative: {self}")
        if 2 * self.g - 2 + self.n <= 0:
            raise ValueError(f"unstable surface type (g={self.g}, n={self.n})")

    @property
    def euler(self) -> int:
        """Negative Euler characteristic 2g - 2 + n."""
        return 2 * self.g - 2 + self.n

    @property
    def dim(self) -> int:
        """Complex dimension d = 3g - 3 + n."""
        return 3 * self.g - 3 + self.n

    def sort_key(self):
        return (self.euler, self.g, self.n)


def _as_type(s) -> SurfaceType:
    return s if isinstance(s, SurfaceType) else SurfaceType(*s)


# -- kernels -------------------------------------------------------------------


@lru_cache(maxsize=None)
def zeta_even(i: int) -> ExactScalar:
    """zeta(2i) as an element of Q[u]; zeta(0) = -1/2."""
    if i == 0:
        return ExactScalar(Fraction(-1, 2))
    b = bernoulli(2 * i)
    b = Fraction(int(b.p), int(b.q))
    # zeta(2i) = (-1)^{i+1} B_{2i} (2 pi)^{2i} / (2 (2i)!)
    c = (-1) ** (i + 1) * b * 2 ** (2 * i) / (2 * factorial(2 * i))
    return ExactScalar({i: c})


@lru_cache(maxsize=None)
def kernel_F(k: int) -> tuple[tuple[int, ExactScalar], ...]:
    """Coefficients of F_{2k+1}(t) as ((t-power, coefficient), ...)."""
    out = []
    for i in range(k + 2):
        p = 2 * k + 2 - 2 * i
        c = zeta_even(i) * Fraction(factorial(2 * k + 1) * (2 ** (2 * i + 1) - 4), factorial(p))
        if c:
            out.append((p, c))
    return tuple(out)


def _scalar_items(s: ExactScalar):
    return s._terms.items()


# -- validation ----------------------------------------------------------------


def validate_volume(s, p: PiPolynomial, *, check_symmetry: bool = True) -> None:
    """Raise VolumeValidationError unless ``p`` looks like V_{g,n}."""
    s = _as_type(s)
    name = f"V_{{{s.g},{s.n}}}"
    if p.nvars != s.n:
        raise VolumeValidationError(f"{name}: expected {s.n} variables, got {p.nvars}")
    if p.is_zero():
        raise VolumeValidationError(f"{name}: zero polynomial")
    d = s.dim
    for (exps, j), c in p._terms.items():
        if any(e % 2 for e in exps):
            raise VolumeValidationError(f"{name}: odd exponent in monomial {exps}")
        if sum(exps) + 2 * j != 2 * d:
            raise VolumeValidationError(
                f"{name}: monomial {exps}*u^{j} breaks weighted degree {2 * d}"
            )
        if c <= 0:
            raise VolumeValidationError(f"{name}: non-positive coefficient {c}")
    if s.n and p.degree() != 2 * d:
        raise VolumeValidationError(f"{name}: length degree {p.degree()} != {2 * d}")
    if check_symmetry and s.n > 1:
        perms = list(permutations(range(s.n)))
        if len(perms) > 24:
            rng = Random(s.g * 1000 + s.n)
            perms = [tuple(rng.sample(range(s.n), s.n)) for _ in range(24)]
        for perm in perms:
            if p.permute(perm) != p:
                raise VolumeValidationError(f"{name}: not symmetric under {perm}")


# -- table ---------------------------------------------------------------------

BUILTINS = {
    SurfaceType(0, 3): PiPolynomial.one(3),
    SurfaceType(1, 1): PiPolynomial.parse("(1/24)*x1^2 + (1/6)*u", 1),
}


class VolumeTable:
    """Memo of volume polynomials with provenance tags.

    ``get`` has get-or-compute semantics; concurrent callers never observe a
    partially computed entry.
    """

    def __init__(self, max_euler: int = DEFAULT_MAX_EULER):
        self.max_euler = max_euler
        self._entries: dict[SurfaceType, PiPolynomial] = {}
        self.provenance: dict[SurfaceType, str] = {}
        self._lock = threading.RLock()

    def __contains__(self, s) -> bool:
        return _as_type(s) in self._entries

    def __len__(self):
        return len(self._entries)

    def items(self):
        return sorted(self._entries.items(), key=lambda kv: kv[0].sort_key())

    def entry(self, s) -> PiPolynomial | None:
        return self._entries.get(_as_type(s))

    def put(self, s, p: PiPolynomial, provenance: str = "loaded", validate: bool = True):
        s = _as_type(s)
        if validate:
            validate_volume(s, p)
        with self._lock:
            self._entries[s] = p
            self.provenance[s] = provenance

    def get(self, s) -> PiPolynomial:
        s = _as_type(s)
        p = self._entries.get(s)
        if p is not None:
            return p
        if s.euler > self.max_euler:
            raise ResourceLimitError(
                f"V_{{{s.g},{s.n}}} exceeds degree cap 2g-2+n <= {self.max_euler}"
            )
        with self._lock:
            p = self._entries.get(s)
            if p is None:
                builtin = BUILTINS.get(s)
                p = builtin if builtin is not None else self._compute(s)
                self._entries[s] = p
                self.provenance[s] = "computed" if builtin is None else "builtin"
        return p

    def top(self, s) -> PiPolynomial:
        return self.get(s).top_part()

    def _recursion_input(self, g: int, n: int) -> PiPolynomial:
        p = self.get(SurfaceType(g, n))
        if (g, n) == (1, 1):
            return p / 2
        return p

    def _compute(self, s: SurfaceType) -> PiPolynomial:
        log.debug("computing V_{%d,%d}", s.g, s.n)
        if s.n == 0:
            return self._closed(s.g)
        return recursion_step(s.g, s.n, self._recursion_input)

    def _closed(self, g: int) -> PiPolynomial:
        # dilaton at n = 0: dV_{g,1}/dL (2 pi i) = 2 pi i (2g - 2) V_{g,0}
        v1 = self._recursion_input(g, 1)
        acc = ExactScalar()
        for ((e,), j), c in v1._terms.items():
            if e == 0:
                continue
            m = e // 2
            acc = acc + ExactScalar({j + m - 1: c * 2 * m * (-4) ** (m - 1)})
        return PiPolynomial.constant(acc / (2 * g - 2), 0)


def recursion_step(g: int, n: int, lookup) -> PiPolynomial:
    """Run one step of the recursion for V_{g,n} (n >= 1).

    ``lookup(g', n')`` must return already-known volumes in the recursion's
    own normalization.  (1,1) and (0,3) are handled directly.
    """
    if n < 1:
        raise ValueError("the recursion needs at least one boundary")
    if (g, n) == (0, 3):
        return PiPolynomial.one(3)
    if (g, n) == (1, 1):
        # d/dL (L V_{1,1}) = F_1(L) / 8
        rhs = {((p,), j): c / 8 for p, s in kernel_F(0) for j, c in _scalar_items(s)}
        return _integrate_first(1, rhs)

    rhs: dict = {}

    def add(exps, j, c):
        key = (exps, j)
        v = rhs.get(key, 0) + c
        if v:
            rhs[key] = v
        else:
            rhs.pop(key, None)

    others = list(range(1, n))  # positions of L2..Ln in the result

    # A_con: V_{g-1,n+1}(x, y, L2..Ln)
    if g >= 1 and 2 * (g - 1) - 2 + (n + 1) > 0:
        vc = lookup(g - 1, n + 1)
        for (exps, j), c in vc._terms.items():
            a, b = exps[0] // 2, exps[1] // 2
            rest = exps[2:]
            w = Fraction(factorial(2 * a + 1) * factorial(2 * b + 1), factorial(2 * a + 2 * b + 3))
            for tp, ks in kernel_F(a + b + 1):
                for jj, kc in _scalar_items(ks):
                    add((tp,) + rest, j + jj, c * w * kc / 2)

    # A_dcon: V_{g1}(x, L_I) V_{g2}(y, L_J), ordered over (g1, I)
    for g1 in range(g + 1):
        g2 = g - g1
        for r in range(len(others) + 1):
            for I in combinations(others, r):
                J = [i for i in others if i not in I]
                n1, n2 = len(I) + 1, len(J) + 1
                if 2 * g1 - 2 + n1 <= 0 or 2 * g2 - 2 + n2 <= 0:
                    continue
                v1, v2 = lookup(g1, n1), lookup(g2, n2)
                for (e1, j1), c1 in v1._terms.items():
                    for (e2, j2), c2 in v2._terms.items():
                        a, b = e1[0] // 2, e2[0] // 2
                        w = Fraction(
                            factorial(2 * a + 1) * factorial(2 * b + 1),
                            factorial(2 * a + 2 * b + 3),
                        )
                        rest = [0] * (n - 1)
                        for pos, e in zip(I, e1[1:]):
                            rest[pos - 1] = e
                        for pos, e in zip(J, e2[1:]):
                            rest[pos - 1] = e
                        rest = tuple(rest)
                        coef = c1 * c2 * w / 2
                        for tp, ks in kernel_F(a + b + 1):
                            for jj, kc in _scalar_items(ks):
                                add((tp,) + rest, j1 + j2 + jj, coef * kc)

    # B: V_{g,n-1}(x, L_others without Lj), kernel F(L1 + Lj) + F(L1 - Lj)
    if n >= 2 and 2 * g - 2 + (n - 1) > 0:
        vb = lookup(g, n - 1)
        for jpos in others:
            remaining = [i for i in others if i != jpos]
            for (exps, j), c in vb._terms.items():
                a = exps[0] // 2
                rest = [0] * (n - 1)
                for pos, e in zip(remaining, exps[1:]):
                    rest[pos - 1] = e
                for tp, ks in kernel_F(a):
                    # (L1+Lj)^tp + (L1-Lj)^tp = 2 sum_{even l} C(tp,l) L1^{tp-l} Lj^l
                    for l in range(0, tp + 1, 2):
                        r2 = list(rest)
                        r2[jpos - 1] += l
                        bc = 2 * comb(tp, l)
                        for jj, kc in _scalar_items(ks):
                            add((tp - l,) + tuple(r2), j + jj, c * kc * bc / 2)

    return _integrate_first(n, rhs)


def _integrate_first(n: int, rhs: dict) -> PiPolynomial:
    # L1 V = int_0^{L1} rhs dL1, then divide by L1
    out = {}
    for (exps, j), c in rhs.items():
        out[(exps, j)] = c / (exps[0] + 1)
    return PiPolynomial._raw(n, out)


# -- module-level API ----------------------------------------------------------

_default = None
_default_lock = threading.Lock()


def default_table() -> VolumeTable:
    global _default
    with _default_lock:
        if _default is None:
            _default = VolumeTable()
        return _default


def volume_polynomial(s, table: VolumeTable | None = None) -> PiPolynomial:
    s = _as_type(s)
    return (table or default_table()).get(s)


def volume_top(s, table: VolumeTable | None = None) -> PiPolynomial:
    return volume_polynomial(s, table).top_part()


# -- cache file ----------------------------------------------------------------


def _record_body(s: SurfaceType, p: PiPolynomial) -> str:
    return f"V {s.g} {s.n} : {p.to_text()}"


def _checksum(body: str) -> str:
    return hashlib.sha256(body.encode("ascii")).hexdigest()[:16]


def cache_save(table: VolumeTable, path) -> None:
    lines = []
    for s, p in table.items():
        body = _record_body(s, p)
        lines.append(f"{body} : {_checksum(body)}\n")
    Path(path).write_text("".join(lines), encoding="ascii")


def cache_load(path, max_euler: int = DEFAULT_MAX_EULER) -> VolumeTable:
    """Load a cache file; every record is checksummed and re-validated.

    An empty file yields an empty table (built-ins are still served on demand).
    """
    table = VolumeTable(max_euler=max_euler)
    text = Path(path).read_text(encoding="ascii")
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            body, digest = line.rsplit(" : ", 1)
            head, poly_text = body.split(" : ", 1)
            tag, g, n = head.split()
            if tag != "V":
                raise ValueError
            s = SurfaceType(int(g), int(n))
        except ValueError:
            raise CacheCorruptionError(f"line {lineno}: malformed record") from None
        if _checksum(body) != digest:
            raise CacheCorruptionError(
                f"line {lineno}: checksum mismatch for V_{{{s.g},{s.n}}}"
            )
        try:
            p = PiPolynomial.parse(poly_text, s.n)
        except PolynomialParseError as exc:
            raise CacheCorruptionError(f"line {lineno}: V_{{{s.g},{s.n}}}: {exc}") from None
        try:
            validate_volume(s, p)
        except VolumeValidationError as exc:
            raise VolumeValidationError(f"line {lineno}: {exc}") from None
        builtin = BUILTINS.get(s)
        if builtin is not None and builtin != p:
            raise VolumeValidationError(
                f"line {lineno}: V_{{{s.g},{s.n}}} disagrees with the built-in base case"
            )
        table.put(s, p, "loaded" if builtin is None else "builtin", validate=False)
    return table
