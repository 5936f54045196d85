import numpy as np
import pytest

from fpbilinear import kernel_brute, kernel_closed, sigma_p
from fpbilinear.gauss import kernel_closed_grid

from conftest import tol_for


def test_kernel_at_zero(field):
    for p in [5, 7, 11]:
        ctx = field(p)
        assert kernel_brute(ctx, 0, 0).value == pytest.approx(1.0)
        assert kernel_closed(ctx, 0, 0).value == pytest.approx(1.0)
        for b in range(1, p):
            assert abs(kernel_brute(ctx, 0, b).value) < 1e-12
            assert kernel_closed(ctx, 0, b).value == 0


def test_kernel_modulus_example(field):
    kv = kernel_brute(field(7), 1, 0)
    assert abs(abs(kv.value) - 7**-0.5) < tol_for(kv, 1e-12)


def test_sigma_p_values(field):
    # brute 5-term sum gives +1; brute 7-term sum gives -i (computed
    # directly from the defining sum, sign convention included)
    assert sigma_p(field(5)).value == pytest.approx(1.0, abs=1e-12)
    assert sigma_p(field(7)).value == pytest.approx(-1j, abs=1e-12)


def test_sigma_p_invariants(field):
    for p in [5, 7, 11, 13, 17, 19, 23]:
        s = sigma_p(field(p)).value
        assert abs(abs(s) - 1) < 1e-12
        assert abs(s**4 - 1) < 1e-9
        assert min(abs(s * s - 1), abs(s * s + 1)) < 1e-9


def test_closed_equals_brute_full_grids(field):
    for p in [5, 7, 11, 13, 17, 19]:
        ctx = field(p)
        worst = max(
            abs(kernel_closed(ctx, a, b).value - kernel_brute(ctx, a, b).value)
            for a in range(p)
            for b in range(p)
        )
        assert worst <= 1e-10


def test_closed_formula_structure(field):
    ctx = field(7)
    kv = kernel_closed(ctx, 1, 0)
    assert kv.value == pytest.approx(7**-0.5 * sigma_p(ctx).value)


def test_modulus_exhaustive_all_primes_to_101(field):
    p = 3
    while p <= 101:
        ctx = field(p)
        grid = kernel_closed_grid(ctx)
        dev = np.abs(np.abs(grid[1:, :]) * np.sqrt(p) - 1).max()
        assert dev <= 1e-10, f"p={p}"
        p += 2
        while not __import__("fpbilinear").is_prime(p):
            p += 2


def test_grid_matches_scalar(field):
    ctx = field(13)
    grid = kernel_closed_grid(ctx)
    for a in range(13):
        for b in range(13):
            assert grid[a, b] == kernel_closed(ctx, a, b).value


def test_kernel_value_error_bounds(field):
    ctx = field(101)
    assert kernel_brute(ctx, 5, 17).abs_error <= 1e-6
    assert kernel_closed(ctx, 5, 17).abs_error <= 1e-6


def test_sigma_cached_identity(field):
    ctx = field(11)
    assert sigma_p(ctx) is sigma_p(ctx)
