"""Numerical verification toolkit for Gauss-sum kernel estimates over F_p.

Fast closed-form evaluators paired with brute-force oracles for: the
quadratic Gauss-sum kernel, the reduced three- and four-variable
kernels and their square-root-cancellation scans, the bilinear operator
norm decomposition, quadratic (nonlinear Roth) progression counts, and
the associated one-dimensional character sum.
"""

__version__ = "0.1.0"

from . import backend
from .errors import (
    BudgetExceeded,
    DegenerateInput,
    FpBilinearError,
    NotPrime,
    TooLarge,
    ZeroInverse,
)
from .fp_core import FieldContext, ep, inv, is_prime, legendre, make_field, sqrt_mod
from .gauss import KernelValue, SigmaP, kernel_brute, kernel_closed, sigma_p
from .kernels import (
    ExceptionalSet,
    K1Point,
    K2Point,
    det_a,
    exceptional_set,
    g_constraint,
    h1_product,
    h2_product,
    k1_brute,
    k1_reduced,
    k2_brute,
    k2_via_h2,
    r1_phase,
    r2_phase,
)
from .operator import (
    NormEstimate,
    apply_T,
    cauchy_chain_check,
    decomposition_residual,
    estimate_norm,
)
from .report import ScanReport
from .roth import (
    ProgressionCount,
    SetIndicator,
    count_progressions,
    density_sweep,
    sample_set,
)
from .spectral import GridFunction, dft, idft, norm, parseval_residual
from .verify import char_sum, scan_char_sum, scan_k1, scan_k2, scaling_fit

__all__ = [
    "__version__",
    "backend",
    "FpBilinearError", "NotPrime", "TooLarge", "ZeroInverse",
    "BudgetExceeded", "DegenerateInput",
    "FieldContext", "make_field", "is_prime", "inv", "legendre", "sqrt_mod", "ep",
    "KernelValue", "SigmaP", "sigma_p", "kernel_brute", "kernel_closed",
    "K1Point", "K2Point", "ExceptionalSet", "r1_phase", "r2_phase", "det_a",
    "k1_brute", "k1_reduced", "h1_product", "h2_product", "g_constraint",
    "k2_brute", "k2_via_h2", "exceptional_set",
    "GridFunction", "dft", "idft", "norm", "parseval_residual",
    "NormEstimate", "apply_T", "decomposition_residual",
    "cauchy_chain_check", "estimate_norm",
    "SetIndicator", "ProgressionCount", "count_progressions",
    "sample_set", "density_sweep",
    "ScanReport", "scan_k1", "scan_k2", "scaling_fit",
    "char_sum", "scan_char_sum",
]
