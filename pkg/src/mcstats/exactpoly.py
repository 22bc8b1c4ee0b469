"""Exact polynomials in length variables over Q[u], where u stands for pi^2.

Every polynomial handled by the package (Weil-Petersson volumes, graph
polynomials, horosphere masses) has coefficients in Q[pi^2], so the symbol
``u`` keeps all arithmetic rational.  Degree always means degree in the
length variables; ``u`` has degree 0.

Values are immutable and hashable.  Canonical text format (see
``docs/formats.md``)::

    (1/24)*x1^2 + (1/6)*u
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Union

from mpmath.libmp import mpf_pi

__all__ = [
    "ExactScalar",
    "PiPolynomial",
    "Interval",
    "PolynomialParseError",
    "poly_add",
    "poly_mul",
    "top_part",
    "substitute",
    "eval_numeric",
    "serialize",
    "parse",
    "pi_squared_enclosure",
    "format_decimal",
]

Rational = Union[int, Fraction]


def _frac(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    raise TypeError(f"expected an exact rational, got {type(c).__name__}")


def _fmt_coeff(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"({c.numerator}/{c.denominator})"


class ExactScalar:
    """An element of Q[u]: a map from u-power to rational coefficient."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[int, Rational] | Rational | None = None):
        if terms is None:
            data = {}
        elif isinstance(terms, (int, Fraction)):
            data = {0: Fraction(terms)} if terms else {}
        else:
            data = {}
            for j, c in terms.items():
                if j < 0:
                    raise ValueError("u-powers must be non-negative")
                c = _frac(c)
                if c:
                    data[int(j)] = c
        self._terms = data
        self._hash = None

    @classmethod
    def _raw(cls, data: dict) -> "ExactScalar":
        obj = cls.__new__(cls)
        obj._terms = data
        obj._hash = None
        return obj

    @classmethod
    def u(cls, power: int = 1) -> "ExactScalar":
        return cls({power: 1})

    @property
    def terms(self) -> dict[int, Fraction]:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_rational(self) -> bool:
        return all(j == 0 for j in self._terms)

    def rational(self) -> Fraction:
        """The value as a Fraction; raises if any u-term is present."""
        if not self.is_rational():
            raise ValueError(f"{self} is not u-free")
        return self._terms.get(0, Fraction(0))

    @property
    def u_degree(self) -> int:
        return max(self._terms, default=0)

    def coeff(self, j: int) -> Fraction:
        return self._terms.get(j, Fraction(0))

    @staticmethod
    def _coerce(other) -> "ExactScalar":
        if isinstance(other, ExactScalar):
            return other
        if isinstance(other, (int, Fraction)):
            return ExactScalar(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for j, c in other._terms.items():
            s = out.get(j, 0) + c
            if s:
                out[j] = s
            else:
                out.pop(j, None)
        return ExactScalar._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return ExactScalar._raw({j: -c for j, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict[int, Fraction] = {}
        for i, a in self._terms.items():
            for j, b in other._terms.items():
                out[i + j] = out.get(i + j, 0) + a * b
        return ExactScalar._raw({j: c for j, c in out.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, ExactScalar):
            other = other.rational()
        other = _frac(other)
        return ExactScalar._raw({j: c / other for j, c in self._terms.items()})

    def __pow__(self, n: int):
        out = ExactScalar(1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return False
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __bool__(self):
        return bool(self._terms)

    def substitute_u(self, value: Rational) -> Fraction:
        value = _frac(value)
        return sum((c * value**j for j, c in self._terms.items()), Fraction(0))

    def enclosure(self, pi_digits: int = 30) -> "Interval":
        return _enclose_u_poly(self._terms, pi_digits)

    def to_float(self) -> float:
        return float(self.enclosure(20).mid)

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for j in sorted(self._terms, reverse=True):
            c = self._terms[j]
            mono = "" if j == 0 else ("u" if j == 1 else f"u^{j}")
            parts.append((c, mono))
        return _join_terms(parts)

    def __repr__(self):
        return f"ExactScalar({str(self)!r})"


def _join_terms(parts: list[tuple[Fraction, str]]) -> str:
    out = []
    for idx, (c, mono) in enumerate(parts):
        neg = c < 0
        a = -c if neg else c
        if mono and a == 1:
            body = mono
        elif mono:
            body = f"{_fmt_coeff(a)}*{mono}"
        else:
            body = _fmt_coeff(a)
        if idx == 0:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f" - {body}" if neg else f" + {body}")
    return "".join(out)


# -- intervals -----------------------------------------------------------------


@dataclass(frozen=True)
class Interval:
    """A closed interval with exact rational endpoints."""

    lo: Fraction
    hi: Fraction

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def __contains__(self, value) -> bool:
        return self.lo <= value <= self.hi

    def decimal(self, digits: int = 15) -> tuple[str, str]:
        """Endpoints rendered with ``digits`` decimals, rounded outward."""
        scale = 10**digits
        lo = math.floor(self.lo * scale)
        hi = math.ceil(self.hi * scale)
        return _fixed(lo, digits), _fixed(hi, digits)


def _fixed(n: int, digits: int) -> str:
    sign = "-" if n < 0 else ""
    s = str(abs(n)).rjust(digits + 1, "0")
    if digits == 0:
        return sign + s
    return f"{sign}{s[:-digits]}.{s[-digits:]}"


def format_decimal(value, digits: int = 15) -> str:
    """Round an exact value (rational or in Q[u]) to ``digits`` decimals.

    Rationals are rounded half-to-even.  Values involving pi are rounded
    from an enclosure much narrower than the last printed digit.
    """
    if digits < 0:
        raise ValueError("digits must be >= 0")
    if isinstance(value, ExactScalar):
        if value.is_rational():
            value = value.rational()
        else:
            mag = max(1, value.enclosure(5).hi.numerator.bit_length())
            value = value.enclosure(digits + mag + 10).mid
    value = _frac(value)
    return _fixed(round(value * 10**digits), digits)


def pi_squared_enclosure(pi_digits: int) -> tuple[Fraction, Fraction]:
    """Rational lower/upper bounds on pi^2 accurate to about ``pi_digits``."""
    if pi_digits < 1:
        raise ValueError("pi_digits must be >= 1")
    prec = int(pi_digits * 3.33) + 16
    lo = _mpf_to_fraction(mpf_pi(prec, "f"))
    hi = _mpf_to_fraction(mpf_pi(prec, "c"))
    return lo * lo, hi * hi


def _mpf_to_fraction(t) -> Fraction:
    sign, man, exp, _ = t
    v = Fraction(int(man)) * (Fraction(2) ** exp)
    return -v if sign else v


def _enclose_u_poly(coeffs: Mapping[int, Fraction], pi_digits: int) -> Interval:
    ulo, uhi = pi_squared_enclosure(pi_digits)
    lo = hi = Fraction(0)
    # u > 0, so each u^j is monotone increasing on [ulo, uhi]
    for j, c in coeffs.items():
        a, b = c * ulo**j, c * uhi**j
        lo += min(a, b)
        hi += max(a, b)
    return Interval(lo, hi)


# -- polynomials ---------------------------------------------------------------


class PiPolynomial:
    """Polynomial in ``x1..xn`` with coefficients in Q[u] (u = pi^2).

    Stored flat as ``{(exponents, u_power): Fraction}``; the public view
    ``monomials`` groups this into ``{exponents: ExactScalar}``.
    """

    __slots__ = ("nvars", "_terms", "_hash")

    def __init__(self, nvars: int, monomials: Mapping | None = None):
        if nvars < 0:
            raise ValueError("nvars must be non-negative")
        self.nvars = nvars
        data: dict[tuple[tuple[int, ...], int], Fraction] = {}
        for exps, coef in (monomials or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != nvars or any(e < 0 for e in exps):
                raise ValueError(f"bad exponent vector {exps} for {nvars} variables")
            if isinstance(coef, ExactScalar):
                items = coef._terms.items()
            else:
                items = ((0, _frac(coef)),)
            for j, c in items:
                key = (exps, j)
                s = data.get(key, 0) + c
                if s:
                    data[key] = s
                else:
                    data.pop(key, None)
        self._terms = data
        self._hash = None

    @classmethod
    def _raw(cls, nvars: int, data: dict) -> "PiPolynomial":
        obj = cls.__new__(cls)
        obj.nvars = nvars
        obj._terms = data
        obj._hash = None
        return obj

    # constructors
    @classmethod
    def zero(cls, nvars: int) -> "PiPolynomial":
        return cls._raw(nvars, {})

    @classmethod
    def constant(cls, value, nvars: int) -> "PiPolynomial":
        return cls(nvars, {(0,) * nvars: value})

    @classmethod
    def one(cls, nvars: int) -> "PiPolynomial":
        return cls.constant(1, nvars)

    @classmethod
    def var(cls, index: int, nvars: int) -> "PiPolynomial":
        """The variable x_{index+1} (``index`` is 0-based)."""
        if not 0 <= index < nvars:
            raise IndexError(f"variable index {index} out of range for {nvars}")
        exps = [0] * nvars
        exps[index] = 1
        return cls(nvars, {tuple(exps): 1})

    @classmethod
    def u(cls, nvars: int) -> "PiPolynomial":
        return cls.constant(ExactScalar.u(), nvars)

    @classmethod
    def from_terms(cls, nvars: int, terms: Iterable[tuple[tuple[int, ...], int, Rational]]):
        data: dict = {}
        for exps, j, c in terms:
            key = (tuple(exps), j)
            data[key] = data.get(key, 0) + _frac(c)
        return cls._raw(nvars, {k: v for k, v in data.items() if v})

    # views
    @property
    def terms(self) -> dict[tuple[tuple[int, ...], int], Fraction]:
        return dict(self._terms)

    @property
    def monomials(self) -> dict[tuple[int, ...], ExactScalar]:
        grouped: dict[tuple[int, ...], dict[int, Fraction]] = {}
        for (exps, j), c in self._terms.items():
            grouped.setdefault(exps, {})[j] = c
        return {e: ExactScalar._raw(d) for e, d in grouped.items()}

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        """Total degree in the length variables (u contributes 0)."""
        if not self._terms:
            raise ValueError("zero polynomial has no degree")
        return max(sum(e) for e, _ in self._terms)

    def u_degree(self) -> int:
        return max((j for _, j in self._terms), default=0)

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e, _ in self._terms}) <= 1

    def is_u_free(self) -> bool:
        return all(j == 0 for _, j in self._terms)

    def homogeneous_parts(self) -> dict[int, "PiPolynomial"]:
        parts: dict[int, dict] = {}
        for key, c in self._terms.items():
            parts.setdefault(sum(key[0]), {})[key] = c
        return {m: PiPolynomial._raw(self.nvars, d) for m, d in parts.items()}

    # arithmetic
    def _check(self, other: "PiPolynomial"):
        if self.nvars != other.nvars:
            raise ValueError(
                f"variable-count mismatch: {self.nvars} vs {other.nvars}"
            )

    def _lift(self, other):
        if isinstance(other, PiPolynomial):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction, ExactScalar)):
            return PiPolynomial.constant(other, self.nvars)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for k, c in other._terms.items():
            s = out.get(k, 0) + c
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return PiPolynomial._raw(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return PiPolynomial._raw(self.nvars, {k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            other = _frac(other)
            if not other:
                return PiPolynomial.zero(self.nvars)
            return PiPolynomial._raw(
                self.nvars, {k: c * other for k, c in self._terms.items()}
            )
        other = self._lift(other)
        if other is NotImplemented:
            return other
        out: dict = {}
        for (ea, ja), ca in self._terms.items():
            for (eb, jb), cb in other._terms.items():
                key = (tuple(x + y for x, y in zip(ea, eb)), ja + jb)
                out[key] = out.get(key, 0) + ca * cb
        return PiPolynomial._raw(self.nvars, {k: c for k, c in out.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _frac(other)
        return PiPolynomial._raw(self.nvars, {k: c / other for k, c in self._terms.items()})

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers are not polynomials")
        out = PiPolynomial.one(self.nvars)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, ExactScalar)):
            other = PiPolynomial.constant(other, self.nvars)
        if not isinstance(other, PiPolynomial):
            return NotImplemented
        return self.nvars == other.nvars and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self._terms)

    # structural operations
    def top_part(self) -> "PiPolynomial":
        if not self._terms:
            raise ValueError("top part of the zero polynomial is undefined")
        m = self.degree()
        return PiPolynomial._raw(
            self.nvars, {k: c for k, c in self._terms.items() if sum(k[0]) == m}
        )

    def embed(self, index_map, nvars: int) -> "PiPolynomial":
        """Rename variable i to ``index_map[i]`` in an ``nvars``-variable ring.

        Several variables may map to the same target; their exponents add.
        """
        if len(index_map) != self.nvars:
            raise ValueError("index_map must cover every variable")
        out: dict = {}
        for (exps, j), c in self._terms.items():
            new = [0] * nvars
            for i, e in enumerate(exps):
                new[index_map[i]] += e
            key = (tuple(new), j)
            out[key] = out.get(key, 0) + c
        return PiPolynomial._raw(nvars, {k: c for k, c in out.items() if c})

    def substitute(self, assignments: Mapping[int, object]) -> "PiPolynomial":
        """Substitute 0-based variables by scalars or same-ring polynomials."""
        for i in assignments:
            if not 0 <= i < self.nvars:
                raise IndexError(f"variable index {i} out of range for {self.nvars}")
        values = {}
        for i, v in assignments.items():
            if isinstance(v, PiPolynomial):
                self._check(v)
                values[i] = v
            else:
                values[i] = PiPolynomial.constant(v, self.nvars)
        power_cache: dict[tuple[int, int], PiPolynomial] = {}

        def pw(i, e):
            if (i, e) not in power_cache:
                power_cache[(i, e)] = values[i] ** e
            return power_cache[(i, e)]

        out = PiPolynomial.zero(self.nvars)
        for (exps, j), c in self._terms.items():
            kept = tuple(0 if i in values else e for i, e in enumerate(exps))
            term = PiPolynomial._raw(self.nvars, {(kept, j): c})
            for i, e in enumerate(exps):
                if i in values and e:
                    term = term * pw(i, e)
            out = out + term
        return out

    def evaluate(self, point) -> ExactScalar:
        """Exact value at a rational point."""
        if len(point) != self.nvars:
            raise ValueError(f"point has {len(point)} coordinates, expected {self.nvars}")
        pt = [_frac(p) for p in point]
        out: dict[int, Fraction] = {}
        for (exps, j), c in self._terms.items():
            v = c
            for p, e in zip(pt, exps):
                if e:
                    v *= p**e
            out[j] = out.get(j, 0) + v
        return ExactScalar({j: c for j, c in out.items() if c})

    def eval_numeric(self, point, pi_digits: int = 15) -> Interval:
        if pi_digits < 1:
            raise ValueError("pi_digits must be >= 1")
        return self.evaluate(point).enclosure(pi_digits)

    def partial(self, index: int) -> "PiPolynomial":
        out: dict = {}
        for (exps, j), c in self._terms.items():
            e = exps[index]
            if e:
                new = exps[:index] + (e - 1,) + exps[index + 1 :]
                out[(new, j)] = out.get((new, j), 0) + c * e
        return PiPolynomial._raw(self.nvars, out)

    def permute(self, perm) -> "PiPolynomial":
        """Variable i becomes variable perm[i]."""
        return self.embed(perm, self.nvars)

    # text
    def sorted_terms(self):
        return sorted(
            self._terms.items(),
            key=lambda kv: (sum(kv[0][0]), kv[0][0], kv[0][1]),
            reverse=True,
        )

    def to_text(self, var: str = "x") -> str:
        if not self._terms:
            return "0"
        parts = []
        for (exps, j), c in self.sorted_terms():
            factors = []
            if j:
                factors.append("u" if j == 1 else f"u^{j}")
            for i, e in enumerate(exps):
                if e:
                    name = var if (self.nvars == 1 and var != "x") else f"{var}{i + 1}"
                    factors.append(name if e == 1 else f"{name}^{e}")
            parts.append((c, "*".join(factors)))
        return _join_terms(parts)

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"PiPolynomial({self.nvars}, {self.to_text()!r})"

    @classmethod
    def parse(cls, text: str, nvars: int | None = None) -> "PiPolynomial":
        return _Parser(text).parse(nvars)


# -- parsing -------------------------------------------------------------------


class PolynomialParseError(ValueError):
    def __init__(self, message: str, text: str, position: int):
        self.position = position
        self.text = text
        super().__init__(f"{message} at column {position + 1}: {text!r}")


_TOKEN = re.compile(r"\s*(?:(\d+)|(x\d+|u)|(\^|\*|/|\+|-|\(|\)))")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            if text[pos:].strip() == "":
                break
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                start = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
                raise PolynomialParseError("unexpected character", text, start)
            start = m.start(m.lastindex)
            kind = ("int", "name", "op")[m.lastindex - 1]
            self.tokens.append((kind, m.group(m.lastindex), start))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None, len(self.text))

    def take(self, kind=None, value=None):
        tok = self.peek()
        if tok[0] is None or (kind and tok[0] != kind) or (value and tok[1] != value):
            want = value or kind or "token"
            raise PolynomialParseError(f"expected {want!r}", self.text, tok[2])
        self.i += 1
        return tok

    def rational(self) -> Fraction:
        if self.peek()[1] == "(":
            self.take("op", "(")
            sign = 1
            if self.peek()[1] == "-":
                self.take()
                sign = -1
            num = int(self.take("int")[1])
            den = 1
            if self.peek()[1] == "/":
                self.take()
                den = int(self.take("int")[1])
            self.take("op", ")")
        else:
            sign = 1
            num = int(self.take("int")[1])
            den = 1
            if self.peek()[1] == "/":
                self.take()
                den = int(self.take("int")[1])
        if den == 0:
            raise PolynomialParseError("zero denominator", self.text, self.peek()[2])
        return sign * Fraction(num, den)

    def parse(self, nvars):
        if not self.tokens:
            raise PolynomialParseError("empty input", self.text, 0)
        terms = []
        sign = 1
        if self.peek()[1] == "-":
            self.take()
            sign = -1
        while True:
            terms.append((sign, self.term()))
            tok = self.peek()
            if tok[0] is None:
                break
            if tok[1] not in ("+", "-"):
                raise PolynomialParseError("expected '+' or '-'", self.text, tok[2])
            self.take()
            sign = 1 if tok[1] == "+" else -1
        maxvar = 0
        for _, (_, factors) in terms:
            for name, _ in factors:
                if name != "u":
                    maxvar = max(maxvar, int(name[1:]))
        if nvars is None:
            nvars = maxvar
        elif maxvar > nvars:
            raise PolynomialParseError(
                f"variable x{maxvar} exceeds nvars={nvars}", self.text, 0
            )
        data: dict = {}
        for sign, (coef, factors) in terms:
            exps = [0] * nvars
            j = 0
            for name, e in factors:
                if name == "u":
                    j += e
                else:
                    idx = int(name[1:]) - 1
                    if idx < 0:
                        raise PolynomialParseError("variables start at x1", self.text, 0)
                    exps[idx] += e
            key = (tuple(exps), j)
            data[key] = data.get(key, 0) + sign * coef
        return PiPolynomial._raw(nvars, {k: c for k, c in data.items() if c})

    def term(self):
        coef = Fraction(1)
        factors = []
        kind, value, _ = self.peek()
        if kind == "int" or value == "(":
            coef = self.rational()
            if self.peek()[1] != "*":
                return coef, factors
            self.take()
        while True:
            _, name, _ = self.take("name")
            e = 1
            if self.peek()[1] == "^":
                self.take()
                e = int(self.take("int")[1])
            factors.append((name, e))
            if self.peek()[1] != "*":
                return coef, factors
            self.take()


# -- functional surface --------------------------------------------------------


def poly_add(p: PiPolynomial, q: PiPolynomial) -> PiPolynomial:
    p._check(q)
    return p + q


def poly_mul(p: PiPolynomial, q: PiPolynomial) -> PiPolynomial:
    p._check(q)
    return p * q


def top_part(p: PiPolynomial) -> PiPolynomial:
    return p.top_part()


def substitute(p: PiPolynomial, assignments: Mapping[int, object]) -> PiPolynomial:
    return p.substitute(assignments)


def eval_numeric(p: PiPolynomial, point, pi_digits: int = 15) -> Interval:
    return p.eval_numeric(point, pi_digits)


def serialize(p: PiPolynomial) -> str:
    return p.to_text()


def parse(text: str, nvars: int | None = None) -> PiPolynomial:
    return PiPolynomial.parse(text, nvars)
