"""Exact rational arithmetic backend.

gmpy2.mpq is used when available (roughly an order of magnitude faster than
fractions.Fraction on the convolution-heavy kernels); Fraction is the
fallback so the package stays importable on a bare stdlib.
"""

try:
    from gmpy2 import mpq as Q
except ImportError:  # pragma: no cover
    from fractions import Fraction as Q

QZERO = Q(0)
QONE = Q(1)


def rat(value) -> Q:
    """Coerce ints, "p/q" strings, Fractions or mpq values to the backend type."""
    if isinstance(value, str):
        if "/" in value:
            p, q = value.split("/", 1)
            return Q(int(p), int(q))
        return Q(int(value))
    if isinstance(value, float):
        raise TypeError("floating point is not allowed in the exact ring")
    return Q(value)


def rat_str(value) -> str:
    """Canonical text form ("3", "-5/2") used in reports and golden files."""
    return str(value)
