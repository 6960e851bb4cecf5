"""The truncated hbar-adic base ring and its q-combinatorics.

An HbarScalar is an exact rational polynomial c_0 + c_1*h + ... truncated
at a fixed order; multiplication discards terms of order >= len(coeffs).
Everything downstream (Laurent series, difference operators, Fock-space
matrix entries) has these as coefficients, so there is no floating point
anywhere in the engine.

q = exp(hbar) and all q-powers, q-integers and q-binomials are computed
from closed-form series (sinh(a*h)/(a*h) has an explicit rational
coefficient formula), so no intermediate division by hbar is ever needed
and every coefficient is exact at the stated order.
"""

from math import factorial

from .rat import Q, QZERO, QONE, rat, rat_str


class HbarScalar:
    """Element of Q[hbar] / (hbar^order)."""

    __slots__ = ("c",)

    def __init__(self, coeffs):
        self.c = tuple(coeffs)

    # -- constructors -------------------------------------------------

    @staticmethod
    def from_rational(x, order):
        x = rat(x)
        return HbarScalar((x,) + (QZERO,) * (order - 1))

    @staticmethod
    def zero(order):
        return HbarScalar((QZERO,) * order)

    @staticmethod
    def one(order):
        return HbarScalar.from_rational(QONE, order)

    @staticmethod
    def hbar(order, power=1, coeff=QONE):
        c = [QZERO] * order
        if power < order:
            c[power] = rat(coeff)
        return HbarScalar(c)

    # -- structure ----------------------------------------------------

    @property
    def order(self):
        return len(self.c)

    def is_zero(self):
        return all(x == 0 for x in self.c)

    def classical(self):
        """Constant term (the hbar -> 0 limit)."""
        return self.c[0]

    def hbar_valuation(self):
        """Index of the first nonzero coefficient; order if zero."""
        for k, x in enumerate(self.c):
            if x != 0:
                return k
        return len(self.c)

    def truncate(self, order):
        if order >= len(self.c):
            return self
        return HbarScalar(self.c[:order])

    def shift_down(self, k):
        """Divide by hbar^k.  Requires divisibility; loses k orders."""
        if any(x != 0 for x in self.c[:k]):
            raise ValueError("not divisible by hbar^%d" % k)
        return HbarScalar(self.c[k:])

    def is_invertible(self):
        return self.c[0] != 0

    # -- ring operations ----------------------------------------------

    def __add__(self, other):
        return HbarScalar(tuple(a + b for a, b in zip(self.c, other.c)))

    def __sub__(self, other):
        return HbarScalar(tuple(a - b for a, b in zip(self.c, other.c)))

    def __neg__(self):
        return HbarScalar(tuple(-a for a in self.c))

    def __mul__(self, other):
        n = len(self.c)
        out = [QZERO] * n
        oc = other.c
        for i, a in enumerate(self.c):
            if a:
                for j in range(n - i):
                    b = oc[j]
                    if b:
                        out[i + j] += a * b
        return HbarScalar(out)

    def scale(self, x):
        x = rat(x)
        return HbarScalar(tuple(a * x for a in self.c))

    def __eq__(self, other):
        return isinstance(other, HbarScalar) and self.c == other.c

    def __hash__(self):
        return hash(self.c)

    def __repr__(self):
        return "HbarScalar(%s)" % (self.render() or "0")

    def render(self):
        terms = []
        for k, x in enumerate(self.c):
            if x != 0:
                terms.append("%s * ħ^%d" % (rat_str(x), k))
        return " + ".join(terms)

    def invert(self):
        if self.c[0] == 0:
            raise ValueError("not invertible: constant term is zero")
        n = len(self.c)
        inv0 = QONE / self.c[0]
        out = [QZERO] * n
        out[0] = inv0
        for m in range(1, n):
            s = QZERO
            for k in range(1, m + 1):
                if self.c[k]:
                    s += self.c[k] * out[m - k]
            out[m] = -inv0 * s
        return HbarScalar(out)

    def pow_int(self, e):
        if e < 0:
            return self.invert().pow_int(-e)
        result = HbarScalar.one(len(self.c))
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result


# -- transcendental series on the nilpotent part -----------------------


def exp_series(a: HbarScalar) -> HbarScalar:
    """exp of a scalar with zero constant term."""
    if a.c[0] != 0:
        raise ValueError("not topologically nilpotent: constant term must be 0")
    n = a.order
    result = HbarScalar.one(n)
    term = HbarScalar.one(n)
    for k in range(1, n):
        term = term * a
        if term.is_zero():
            break
        result = result + term.scale(Q(1, factorial(k)))
    return result


def log_series(u: HbarScalar) -> HbarScalar:
    """log of a scalar with constant term 1 (principal branch)."""
    if u.c[0] != 1:
        raise ValueError("log requires constant term 1")
    n = u.order
    v = u - HbarScalar.one(n)
    result = HbarScalar.zero(n)
    term = HbarScalar.one(n)
    for k in range(1, n):
        term = term * v
        if term.is_zero():
            break
        result = result + term.scale(Q((-1) ** (k + 1), k))
    return result


def sqrt_series(u: HbarScalar) -> HbarScalar:
    """Principal square root of a scalar with constant term 1."""
    return exp_series(log_series(u).scale(Q(1, 2)))


# -- q-combinatorics ---------------------------------------------------


def sinhc(a, order) -> HbarScalar:
    """sinh(a*hbar)/(a*hbar) as a unit series: sum (a*hbar)^{2k} / (2k+1)!.

    Defined as 1 for a = 0, consistent with the limit.
    """
    a = rat(a)
    c = [QZERO] * order
    c[0] = QONE
    if a != 0:
        a2 = a * a
        p = QONE
        for k in range(1, (order - 1) // 2 + 1):
            p *= a2
            c[2 * k] = p / factorial(2 * k + 1)
    return HbarScalar(c)


def q_pow(c, order) -> HbarScalar:
    """q^c = exp(c*hbar) for rational c."""
    return exp_series(HbarScalar.hbar(order, 1, rat(c)))


def q_int(m, order, base_r=1) -> HbarScalar:
    """The symmetric q-integer [m] in base q^base_r.

    [m] = (q_i^m - q_i^{-m})/(q_i - q_i^{-1}) = m * sinhc(m*r) / sinhc(r).
    Exact at the stated order; total on all integers (and rationals).
    """
    m = rat(m)
    r = rat(base_r)
    return sinhc(m * r, order).scale(m) * sinhc(r, order).invert()


def q_binom(n: int, k: int, order, base_r=1) -> HbarScalar:
    """Gaussian binomial coefficient [n choose k] in base q^base_r."""
    if not 0 <= k <= n:
        raise ValueError("q_binom requires 0 <= k <= n")
    result = HbarScalar.one(order)
    for j in range(k):
        result = result * q_int(n - j, order, base_r)
        result = result * q_int(j + 1, order, base_r).invert()
    return result


def f_scalar(a, order) -> HbarScalar:
    """F(a) = (q^a - q^{-a})/a = 2*hbar*sinhc(a); F(0) = 2*hbar."""
    return (HbarScalar.hbar(order + 1, 1, Q(2)) * sinhc(a, order + 1)).truncate(order)


def f_unit(a, order) -> HbarScalar:
    """The unit u_a with F(a) = 2*hbar*u_a."""
    return sinhc(a, order)


def lam_ratio(a, n, order) -> HbarScalar:
    """[a*n]_q / [n]_q for integer n != 0 (value a for n = 0).

    This is the eigenvalue of the operator (q^{aD}-q^{-aD})/(q^D-q^{-D})
    on an eigenvector of D with integer eigenvalue n.
    """
    a = rat(a)
    if n == 0:
        return HbarScalar.from_rational(a, order)
    return sinhc(a * n, order).scale(a) * sinhc(n, order).invert()
