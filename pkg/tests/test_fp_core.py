import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fpbilinear import (
    NotPrime,
    TooLarge,
    ZeroInverse,
    ep,
    inv,
    is_prime,
    legendre,
    make_field,
    sqrt_mod,
)
from fpbilinear.fp_core import sqrt_tables

PRIMES = [3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 41, 53, 61, 97, 101]


def test_is_prime_small():
    known = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47}
    for n in range(50):
        assert is_prime(n) == (n in known)


def test_is_prime_large_64bit():
    assert is_prime(2**61 - 1)
    assert not is_prime(2**61 - 3)
    assert is_prime(18446744073709551557)  # largest prime < 2^64
    assert not is_prime(3825123056546413051)  # strong pseudoprime to bases 2..23


def test_make_field_rejects_composite_and_small():
    with pytest.raises(NotPrime):
        make_field(4)
    with pytest.raises(NotPrime):
        make_field(2)
    with pytest.raises(NotPrime):
        make_field(1000003 * 1000033)


def test_make_field_budget():
    with pytest.raises(TooLarge):
        make_field(10007, max_table_bytes=1000)


def test_inverse_table_exhaustive(field):
    for p in PRIMES:
        ctx = field(p)
        for a in range(1, p):
            assert a * inv(ctx, a) % p == 1


def test_inverse_examples(field):
    ctx = field(7)
    assert ctx.inv_table[3] == 5
    assert inv(ctx, 3) == 5
    assert inv(ctx, 1) == 1
    with pytest.raises(ZeroInverse):
        inv(ctx, 0)


def test_legendre_table_p5(field):
    ctx = field(5)
    assert [legendre(ctx, a) for a in range(5)] == [0, 1, -1, -1, 1]


def test_legendre_euler_criterion(field):
    for p in PRIMES:
        ctx = field(p)
        for a in range(p):
            e = pow(a, (p - 1) // 2, p)
            expected = 0 if e == 0 else (1 if e == 1 else -1)
            assert legendre(ctx, a) == expected
        assert int((ctx.legendre_table == 1).sum()) == (p - 1) // 2


def test_legendre_multiplicative(field):
    for p in [7, 19, 53, 101]:
        ctx = field(p)
        for a in range(1, p):
            for b in range(1, p):
                assert legendre(ctx, a * b % p) == legendre(ctx, a) * legendre(ctx, b)


def test_legendre_example_2_mod_7(field):
    assert legendre(field(7), 2) == 1  # 3^2 = 9 = 2 mod 7
    assert legendre(field(7), 3) == -1


def test_sqrt_mod_examples(field):
    ctx = field(7)
    assert sqrt_mod(ctx, 0) == (0,)
    assert sqrt_mod(ctx, 2) == (3, 4)
    assert sqrt_mod(ctx, 3) == ()


def test_sqrt_mod_exhaustive(field):
    for p in PRIMES:
        ctx = field(p)
        for a in range(p):
            roots = sqrt_mod(ctx, a)
            for r in roots:
                assert r * r % p == a
            expected = {0: 1}.get(a, 2 if legendre(ctx, a) == 1 else 0)
            assert len(roots) == expected


def test_sqrt_mod_tonelli_shanks_p_1_mod_4(field):
    # p = 1 mod 4 exercises the full Tonelli-Shanks loop
    for p in [13, 17, 29, 41, 97, 101]:
        ctx = field(p)
        for a in range(p):
            for r in sqrt_mod(ctx, a):
                assert r * r % p == a


def test_sqrt_tables_match_sqrt_mod(field):
    for p in [7, 13, 61]:
        ctx = field(p)
        lo, hi = sqrt_tables(ctx)
        for a in range(p):
            roots = sqrt_mod(ctx, a)
            if not roots:
                assert lo[a] == -1
            else:
                assert sorted({int(lo[a]), int(hi[a])}) == sorted(set(roots))


def test_unit_roots_invariants(field):
    for p in [5, 7, 97]:
        ctx = field(p)
        assert np.abs(np.abs(ctx.unit_roots) - 1).max() < 1e-12
        assert ctx.unit_roots[0] == 1
        # definition carries the negative sign
        assert ep(ctx, 1) == pytest.approx(
            np.cos(2 * np.pi / p) - 1j * np.sin(2 * np.pi / p)
        )


def test_ep_character_property(field):
    ctx = field(7)
    for x in range(7):
        for y in range(7):
            assert ep(ctx, x) * ep(ctx, y) == pytest.approx(
                ep(ctx, x + y), abs=1e-12
            )
    assert abs(sum(ep(ctx, x) for x in range(7))) < 1e-12


def test_character_orthogonality(field):
    for p in [7, 97]:
        ctx = field(p)
        for c in range(p):
            total = ctx.unit_roots[np.arange(p) * c % p].sum()
            expected = p if c == 0 else 0.0
            assert abs(total - expected) <= 1e-9 * p


@settings(max_examples=60, deadline=None)
@given(a=st.integers(min_value=1, max_value=10**6), p=st.sampled_from(PRIMES))
def test_inverse_property(a, p):
    ctx = make_field(p)
    if a % p:
        assert a * inv(ctx, a) % p == 1


def test_tables_are_read_only(field):
    ctx = field(7)
    with pytest.raises(ValueError):
        ctx.inv_table[1] = 2
