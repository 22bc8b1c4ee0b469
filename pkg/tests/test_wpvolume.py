from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from itertools import permutations

import pytest

from mcstats.exactpoly import ExactScalar, PiPolynomial, parse
from mcstats.wpvolume import (
    CacheCorruptionError,
    ResourceLimitError,
    SurfaceType,
    VolumeTable,
    VolumeValidationError,
    cache_load,
    cache_save,
    validate_volume,
    zeta_even,
)

# Values tabulated in the literature, typed in independently of the engine.
KNOWN = {
    (0, 3): "1",
    (1, 1): "(1/24)*x1^2 + (1/6)*u",
    (0, 4): "(1/2)*x1^2 + (1/2)*x2^2 + (1/2)*x3^2 + (1/2)*x4^2 + 2*u",
    (1, 2): "(1/192)*x1^4 + (1/96)*x1^2*x2^2 + (1/192)*x2^4 + (1/12)*u*x1^2 + (1/12)*u*x2^2 + (1/4)*u^2",
    (2, 0): "(43/2160)*u^3",
    (3, 0): "(176557/1209600)*u^6",
}
# (4 pi^2 + x^2)(12 pi^2 + x^2)(6960 pi^4 + 384 pi^2 x^2 + 5 x^4) / 2211840
_x = PiPolynomial.var(0, 1)
_u = PiPolynomial.u(1)
V21 = (_u * 4 + _x * _x) * (_u * 12 + _x * _x) * (_u * _u * 6960 + _u * _x * _x * 384 + _x**4 * 5) / 2211840
KNOWN[(2, 1)] = V21.to_text()

V05 = parse(
    "(1/8)*x1^4 + (1/8)*x2^4 + (1/8)*x3^4 + (1/8)*x4^4 + (1/8)*x5^4"
    " + (1/2)*x1^2*x2^2 + (1/2)*x1^2*x3^2 + (1/2)*x1^2*x4^2 + (1/2)*x1^2*x5^2"
    " + (1/2)*x2^2*x3^2 + (1/2)*x2^2*x4^2 + (1/2)*x2^2*x5^2"
    " + (1/2)*x3^2*x4^2 + (1/2)*x3^2*x5^2 + (1/2)*x4^2*x5^2"
    " + 3*u*x1^2 + 3*u*x2^2 + 3*u*x3^2 + 3*u*x4^2 + 3*u*x5^2 + 10*u^2",
    5,
)


@pytest.fixture(scope="module")
def table():
    return VolumeTable()


@pytest.mark.parametrize("gn", sorted(KNOWN))
def test_known_volumes(table, gn):
    assert table.get(gn) == parse(KNOWN[gn], gn[1])


def test_v05(table):
    assert table.get((0, 5)) == V05


def test_v11_at_two(table):
    # (4 + 4 pi^2) / 24
    v = table.get((1, 1)).evaluate((2,))
    assert v == ExactScalar({0: Fraction(1, 6), 1: Fraction(1, 6)})
    lo, hi = (float(t) for t in (v.enclosure(20).lo, v.enclosure(20).hi))
    assert 1.8116007 < lo <= hi < 1.8116008


def test_zeta_values():
    assert zeta_even(0).rational() == Fraction(-1, 2)
    assert zeta_even(1) == ExactScalar({1: Fraction(1, 6)})
    assert zeta_even(2) == ExactScalar({2: Fraction(1, 90)})


# -- identities ----------------------------------------------------------------
# Both identities hold for the volume of M_{1,1} without the factor 2 from the
# elliptic involution, i.e. half the tabulated V_{1,1}.


def _identity_volume(table, g, n):
    p = table.get((g, n))
    return p / 2 if (g, n) == (1, 1) else p


def _at_2pi_i(p: PiPolynomial) -> PiPolynomial:
    """Set the last variable to 2 pi i: x^(2m) -> (-4u)^m."""
    n = p.nvars - 1
    out = PiPolynomial.zero(n)
    for (exps, j), c in p.terms.items():
        m = exps[-1] // 2
        out = out + PiPolynomial.from_terms(n, [(exps[:-1], j + m, c * (-4) ** m)])
    return out


def _dilaton_lhs(p: PiPolynomial) -> PiPolynomial:
    """d/dx_last at 2 pi i, divided by 2 pi i."""
    n = p.nvars - 1
    out = PiPolynomial.zero(n)
    for (exps, j), c in p.terms.items():
        m = exps[-1] // 2
        if m:
            out = out + PiPolynomial.from_terms(n, [(exps[:-1], j + m - 1, c * 2 * m * (-4) ** (m - 1))])
    return out


STABLE_SMALL = [(g, n) for g in range(3) for n in range(1, 5) if 2 * g - 2 + n > 0 and 2 * g - 2 + n + 1 <= 4]


@pytest.mark.parametrize("g,n", STABLE_SMALL)
def test_dilaton_identity(table, g, n):
    big = _identity_volume(table, g, n + 1)
    small = _identity_volume(table, g, n)
    assert _dilaton_lhs(big) == small * (2 * g - 2 + n)


@pytest.mark.parametrize("g,n", STABLE_SMALL)
def test_string_identity(table, g, n):
    big = _identity_volume(table, g, n + 1)
    small = _identity_volume(table, g, n)
    rhs = PiPolynomial.zero(n)
    for k in range(n):
        # integral_0^{x_k} x_k V dx_k, termwise
        for (exps, j), c in small.terms.items():
            e = list(exps)
            e[k] += 2
            rhs = rhs + PiPolynomial.from_terms(n, [(tuple(e), j, c / (exps[k] + 2))])
    assert _at_2pi_i(big) == rhs


@pytest.mark.parametrize("gn", [(0, 6), (1, 4), (2, 2), (3, 1)])
def test_larger_volumes_are_valid(table, gn):
    p = table.get(gn)
    validate_volume(gn, p)
    s = SurfaceType(*gn)
    assert p.degree() == 2 * s.dim


def test_symmetry_exhaustive(table):
    p = table.get((1, 3))
    for perm in permutations(range(3)):
        assert p.permute(perm) == p


# -- validation and table behaviour ----------------------------------------------


def test_validate_rejects_bad_polynomials():
    with pytest.raises(VolumeValidationError):
        validate_volume((1, 1), parse("x1^3", 1))  # odd exponent
    with pytest.raises(VolumeValidationError):
        validate_volume((0, 4), parse("x1^2 + 2*u", 4))  # not symmetric
    with pytest.raises(VolumeValidationError):
        validate_volume((1, 1), parse("(1/24)*x1^2 - (1/6)*u", 1))  # negative
    with pytest.raises(VolumeValidationError):
        validate_volume((1, 1), parse("x1^4", 1))  # wrong degree


def test_unstable_types_rejected():
    for gn in [(0, 0), (0, 1), (0, 2), (1, 0)]:
        with pytest.raises(ValueError):
            SurfaceType(*gn)


def test_resource_cap():
    t = VolumeTable(max_euler=3)
    t.get((0, 5))
    with pytest.raises(ResourceLimitError):
        t.get((2, 2))


def test_concurrent_get_is_consistent():
    t = VolumeTable()
    with ThreadPoolExecutor(8) as pool:
        results = list(pool.map(lambda _: t.get((2, 2)), range(16)))
    assert all(r == results[0] for r in results)
    assert t.provenance[SurfaceType(2, 2)] == "computed"


# -- cache -----------------------------------------------------------------------


def test_cache_roundtrip(tmp_path, table):
    table.get((1, 2))
    table.get((2, 1))
    path = tmp_path / "vol.cache"
    cache_save(table, path)
    loaded = cache_load(path)
    for s, p in table.items():
        assert loaded.entry(s) == p
        assert loaded.provenance[s] == ("builtin" if (s.g, s.n) in [(0, 3), (1, 1)] else "loaded")
    # saving twice is byte-identical
    cache_save(loaded, tmp_path / "again.cache")
    assert path.read_bytes() == (tmp_path / "again.cache").read_bytes()


def test_empty_cache_gives_empty_table(tmp_path):
    path = tmp_path / "empty.cache"
    path.write_text("")
    t = cache_load(path)
    assert len(t) == 0
    assert t.get((1, 1)) == parse(KNOWN[(1, 1)], 1)


def _write_one(tmp_path, table, gn):
    table.get(gn)
    single = VolumeTable()
    single.put(gn, table.get(gn), provenance="computed")
    path = tmp_path / "one.cache"
    cache_save(single, path)
    return path


def test_cache_checksum_tamper(tmp_path, table):
    path = _write_one(tmp_path, table, (1, 2))
    text = path.read_text().replace("(1/192)*x1^4", "(1/191)*x1^4", 1)
    path.write_text(text)
    with pytest.raises(CacheCorruptionError, match=r"line 1.*V_\{1,2\}"):
        cache_load(path)


def test_cache_valid_checksum_invalid_volume(tmp_path):
    import hashlib

    body = "V 1 2 : x1^4 + u^2"  # not symmetric
    digest = hashlib.sha256(body.encode()).hexdigest()[:16]
    path = tmp_path / "bad.cache"
    path.write_text(f"{body} : {digest}\n")
    with pytest.raises(VolumeValidationError, match="line 1"):
        cache_load(path)


def test_cache_builtin_disagreement(tmp_path):
    import hashlib

    body = "V 1 1 : (1/48)*x1^2 + (1/12)*u"  # right shape, wrong normalization
    digest = hashlib.sha256(body.encode()).hexdigest()[:16]
    path = tmp_path / "bad.cache"
    path.write_text(f"{body} : {digest}\n")
    with pytest.raises(VolumeValidationError):
        cache_load(path)


def test_cache_malformed_line(tmp_path):
    path = tmp_path / "bad.cache"
    path.write_text("# comment\n\nnot a record\n")
    with pytest.raises(CacheCorruptionError, match="line 3"):
        cache_load(path)
