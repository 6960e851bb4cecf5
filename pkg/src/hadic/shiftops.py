"""Difference-operator calculus: truncated power series in d/dz.

Every operator in scope carries at least one power of hbar per derivative
(shift_op(c) = exp(c*hbar*d), q_int_op, f_op), so truncating at derivative
degree n_hbar-1 is exact modulo hbar^n_hbar.  That invariant is asserted
on construction.

Two operator pictures exist: the additive one here (D = d/dz, acting on
C((z))[[hbar]] by termwise differentiation) and the multiplicative one
(D = z d/dz, diagonal on z^n with integer eigenvalue n).  They are kept
as distinct types; mixing them without the explicit exp-substitution
bridge is a type error by design.
"""

from math import factorial

from .config import Context
from .rat import Q, QZERO, QONE, rat
from .scalars import HbarScalar
from .series import LaurentSeries


class DiffOperator:
    """Sum c_k * (d/dz)^k with HbarScalar coefficients, c_k = O(hbar^k)."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        coeffs = list(coeffs)
        while len(coeffs) > 1 and coeffs[-1].is_zero():
            coeffs.pop()
        for k, c in enumerate(coeffs):
            if c.hbar_valuation() < k:
                raise ValueError(
                    "derivative power %d carries fewer than %d powers of hbar" % (k, k)
                )
        self.coeffs = tuple(coeffs)

    @staticmethod
    def identity(ctx: Context):
        return DiffOperator([HbarScalar.one(ctx.n_hbar)])

    @staticmethod
    def zero(ctx: Context):
        return DiffOperator([HbarScalar.zero(ctx.n_hbar)])

    @staticmethod
    def d(ctx: Context):
        """The bare derivative (degree-1 coefficient hbar^0 is not allowed
        on composite operators, so this is only for direct application)."""
        n = ctx.n_hbar
        op = DiffOperator.__new__(DiffOperator)
        op.coeffs = (HbarScalar.zero(n), HbarScalar.one(n))
        return op

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        order = self.coeffs[0].order
        z = HbarScalar.zero(order)
        return DiffOperator(
            [
                (self.coeffs[k] if k < len(self.coeffs) else z)
                + (other.coeffs[k] if k < len(other.coeffs) else z)
                for k in range(n)
            ]
        )

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return DiffOperator([-c for c in self.coeffs])

    def compose(self, other):
        """Operator product (coefficients commute: constant coefficients)."""
        order = self.coeffs[0].order
        out = [HbarScalar.zero(order)] * min(
            len(self.coeffs) + len(other.coeffs) - 1, order
        )
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coeffs):
                if i + j < len(out) and not b.is_zero():
                    out[i + j] = out[i + j] + a * b
        return DiffOperator(out)

    def __mul__(self, other):
        return self.compose(other)

    def scale(self, scalar: HbarScalar):
        return DiffOperator([c * scalar for c in self.coeffs])

    def invert(self):
        """Inverse of an operator with invertible constant coefficient."""
        if not self.coeffs[0].is_invertible():
            raise ValueError("unit factorization fails: constant coefficient not invertible")
        order = self.coeffs[0].order
        c0_inv = self.coeffs[0].invert()
        out = [HbarScalar.zero(order)] * order
        out[0] = c0_inv
        for m in range(1, order):
            acc = HbarScalar.zero(order)
            for k in range(1, min(m, len(self.coeffs) - 1) + 1):
                acc = acc + self.coeffs[k] * out[m - k]
            out[m] = -(c0_inv * acc)
        return DiffOperator(out)

    def __eq__(self, other):
        if not isinstance(other, DiffOperator):
            return NotImplemented
        n = max(len(self.coeffs), len(other.coeffs))
        order = self.coeffs[0].order
        z = HbarScalar.zero(order)
        for k in range(n):
            a = self.coeffs[k] if k < len(self.coeffs) else z
            b = other.coeffs[k] if k < len(other.coeffs) else z
            if a != b:
                return False
        return True

    def apply(self, s: LaurentSeries) -> LaurentSeries:
        """Termwise application; window shifts down by the operator degree."""
        out = None
        ds = s
        for k, c in enumerate(self.coeffs):
            if k > 0:
                ds = ds.deriv()
            if c.is_zero():
                continue
            term = ds.scale(c)
            out = term if out is None else out + term
        if out is None:
            out = s.scale(HbarScalar.zero(s.coeffs[0].order))
        return out

    def __repr__(self):
        return "DiffOperator[%s]" % ", ".join(c.render() or "0" for c in self.coeffs)


def apply(op: DiffOperator, s: LaurentSeries) -> LaurentSeries:
    return op.apply(s)


def shift_op(c, ctx: Context) -> DiffOperator:
    """q^{c d/dz} = exp(c*hbar*d/dz): the shift z -> z + c*hbar."""
    c = rat(c)
    n = ctx.n_hbar
    coeffs = []
    p = QONE
    for k in range(n):
        coeffs.append(HbarScalar.hbar(n, k, p))
        p = p * c / (k + 1)
    return DiffOperator(coeffs)


def _sinh_op(a, ctx: Context):
    """(q^{a d} - q^{-a d})/2 = sum (a*hbar*d)^{2j+1} / (2j+1)!  (odd part)."""
    a = rat(a)
    n = ctx.n_hbar
    coeffs = [HbarScalar.zero(n) for _ in range(n)]
    p = a
    for k in range(1, n, 2):
        coeffs[k] = HbarScalar.hbar(n, k, p / factorial(k))
        p = p * a * a
    return DiffOperator(coeffs)


def _sinhc_op(a, ctx: Context):
    """sinh(a*hbar*d)/(a*hbar*d) as a unit operator; identity for a = 0."""
    a = rat(a)
    n = ctx.n_hbar
    coeffs = [HbarScalar.zero(n) for _ in range(n)]
    coeffs[0] = HbarScalar.one(n)
    if a != 0:
        p = a * a
        for k in range(2, n, 2):
            coeffs[k] = HbarScalar.hbar(n, k, p / factorial(k + 1))
            p = p * a * a
    return DiffOperator(coeffs)


def q_int_op(a, ctx: Context) -> DiffOperator:
    """[a]_{q^{d/dz}} = (q^{a d} - q^{-a d}) / (q^{d} - q^{-d}).

    Equals a * sinhc(a*hbar*d) * sinhc(hbar*d)^{-1}: an even power series
    in hbar*d whose classical limit is multiplication by a.
    """
    a = rat(a)
    op = _sinhc_op(a, ctx).compose(_sinhc_op(1, ctx).invert())
    return op.scale(HbarScalar.from_rational(a, ctx.n_hbar))


def f_op(ctx: Context) -> DiffOperator:
    """F(d/dz) = (q^{d} - q^{-d})/d = 2 sum_j hbar^{2j+1} d^{2j} / (2j+1)!."""
    n = ctx.n_hbar
    coeffs = [HbarScalar.zero(n) for _ in range(n)]
    for j in range(0, (n + 1) // 2):
        if 2 * j < n and 2 * j + 1 < n:
            coeffs[2 * j] = HbarScalar.hbar(n, 2 * j + 1, Q(2, factorial(2 * j + 1)))
    return DiffOperator(coeffs)


def f_op_unit(ctx: Context) -> DiffOperator:
    """The unit u with F(d) = 2*hbar*u(d); invertible."""
    n = ctx.n_hbar
    coeffs = [HbarScalar.zero(n) for _ in range(n)]
    for j in range(0, (n + 1) // 2):
        if 2 * j < n:
            coeffs[2 * j] = HbarScalar.hbar(n, 2 * j, Q(1, factorial(2 * j + 1)))
    return DiffOperator(coeffs)


def apply_f_op_inverse(s: LaurentSeries, ctx: Context) -> LaurentSeries:
    """Apply F(d/dz)^{-1} = u(d)^{-1} / (2*hbar).

    The input must be divisible by hbar coefficientwise (which the log of
    a ratio of q-shifted units always is); one hbar-order of precision is
    lost, so the caller should have built the input with n_hbar + 1
    working precision.  The result has order n_hbar(input) - 1.
    """
    t = f_op_unit(ctx).invert().apply(s)
    out = []
    for c in t.coeffs:
        cc = c.shift_down(1)
        out.append(HbarScalar(tuple(x / 2 for x in cc.c)))
    return LaurentSeries(t.var, t.lo, out)


# -- multiplicative picture --------------------------------------------------


class MultOperator:
    """Function of D = z d/dz, acting diagonally on z^n with eigenvalue f(n).

    The symbol is a power series in D stored by coefficients; application
    evaluates the truncated symbol at the integer eigenvalue.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        self.coeffs = tuple(coeffs)

    @staticmethod
    def from_symbol(coeffs):
        return MultOperator(coeffs)

    def eigenvalue(self, n: int) -> HbarScalar:
        acc = HbarScalar.zero(self.coeffs[0].order)
        for c in reversed(self.coeffs):
            acc = acc.scale(n) + c
        return acc

    def apply(self, s: LaurentSeries) -> LaurentSeries:
        out = [c * self.eigenvalue(s.lo + k) for k, c in enumerate(s.coeffs)]
        return LaurentSeries(s.var, s.lo, out)


def mult_shift_op(c, ctx: Context) -> MultOperator:
    """q^{c z d/dz}: z^n -> q^{cn} z^n."""
    c = rat(c)
    n = ctx.n_hbar
    return MultOperator([HbarScalar.hbar(n, k, Q(c) ** k / factorial(k)) for k in range(n)])


def mult_q_int_op(a, ctx: Context) -> MultOperator:
    """[a]_{q^{z d/dz}}: z^n -> ([an]_q/[n]_q) z^n, via the symbol series."""
    additive = q_int_op(a, ctx)
    return MultOperator(additive.coeffs)


def mult_sinh_pair_op(a, ctx: Context) -> MultOperator:
    """(q^{a z d/dz} - q^{-a z d/dz}): z^n -> (q^{an} - q^{-an}) z^n."""
    return MultOperator(_sinh_op(a, ctx).scale(HbarScalar.from_rational(2, ctx.n_hbar)).coeffs)
