import numpy as np
import pytest

from fpbilinear import make_field


_CACHE = {}


@pytest.fixture
def field():
    """Shared, session-cached field contexts (tables are immutable)."""

    def get(p):
        if p not in _CACHE:
            _CACHE[p] = make_field(p)
        return _CACHE[p]

    return get


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)


def tol_for(kernel_value, stated):
    """Spec'd comparison tolerance: max(stated, 10x the error bound)."""
    return max(stated, 10 * kernel_value.abs_error)
