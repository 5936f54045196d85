"""Exception hierarchy shared across the package."""


class FpBilinearError(Exception):
    """Base class for all package errors."""


class NotPrime(FpBilinearError):
    """Modulus failed the deterministic primality check."""


class TooLarge(FpBilinearError):
    """Requested tables would exceed the configured memory budget."""


class ZeroInverse(FpBilinearError):
    """Multiplicative inverse of zero requested."""


class BudgetExceeded(FpBilinearError):
    """Brute-force evaluation requested above the configured size cap."""


class DegenerateInput(FpBilinearError):
    """Evaluator called on a point outside its summation domain."""
