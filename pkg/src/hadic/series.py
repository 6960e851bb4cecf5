"""One- and two-variable formal series calculus over the truncated ring.

LaurentSeries models elements of C((z))[[hbar]] on an explicit window of
z-exponents: coefficients below `lo` are known to vanish, coefficients in
[lo, hi] are stored exactly, coefficients above `hi` are unknown.  Every
operation tracks the window honestly, so an equality check can state
precisely on which box it verified (and zero tolerance applies there).

Inversion pivots on the classical valuation, which makes expressions such
as (z + c*hbar)^{-1} come out as the hbar-adic expansion
z^{-1} * sum (-c*hbar/z)^k -- the only inverse that exists in
C((z))[[hbar]].

RationalFunction is the gcd-reduced num/den representation used for the
two directed iota-expansions, for delta_pair (the difference of the two
expansions, a genuine two-variable distribution) and for exp_substitute
(composition with e^{±z}, turning a pole at argument 1 into a pole at
z = 0).
"""

from math import factorial

from .config import Context, WindowOverflowError
from .rat import Q, QZERO, QONE, rat, rat_str
from .scalars import HbarScalar

Z_ADIC = "z-adic"
Z_INV_ADIC = "z^-1-adic"


class LaurentSeries:
    __slots__ = ("var", "lo", "coeffs")

    def __init__(self, var, lo, coeffs):
        self.var = var
        self.lo = lo
        self.coeffs = tuple(coeffs)

    # -- constructors ---------------------------------------------------

    @staticmethod
    def zeros(ctx, var="z", lo=0, hi=None):
        if hi is None:
            hi = ctx.z_top
        n = ctx.n_hbar
        return LaurentSeries(var, lo, [HbarScalar.zero(n)] * (hi - lo + 1))

    @staticmethod
    def monomial(ctx, exponent, scalar=None, var="z"):
        """scalar * z^exponent, exactly known up to the working ceiling."""
        hi = max(ctx.z_top, exponent)
        n = ctx.n_hbar
        c = [HbarScalar.zero(n)] * (hi - exponent + 1)
        c[0] = scalar if scalar is not None else HbarScalar.one(n)
        return LaurentSeries(var, exponent, c)

    @staticmethod
    def constant(ctx, scalar, var="z"):
        s = scalar if isinstance(scalar, HbarScalar) else HbarScalar.from_rational(scalar, ctx.n_hbar)
        return LaurentSeries.monomial(ctx, 0, s, var)

    @staticmethod
    def exp_z(ctx, c, var="z", hi=None):
        """Series of exp(c*z) for rational c, exact to the ceiling."""
        c = rat(c)
        if hi is None:
            hi = ctx.z_top
        n = ctx.n_hbar
        coeffs = []
        p = QONE
        for k in range(hi + 1):
            coeffs.append(HbarScalar.from_rational(p, n))
            p = p * c / (k + 1)
        return LaurentSeries(var, 0, coeffs)

    # -- structure ------------------------------------------------------

    @property
    def hi(self):
        return self.lo + len(self.coeffs) - 1

    def coeff(self, exponent) -> HbarScalar:
        """Coefficient at an exponent inside the known window (zero below it)."""
        if exponent < self.lo:
            order = self.coeffs[0].order if self.coeffs else 2
            return HbarScalar.zero(order)
        if exponent > self.hi:
            raise WindowOverflowError(
                "coefficient at %s^%d is outside the computed window [%d, %d]"
                % (self.var, exponent, self.lo, self.hi)
            )
        return self.coeffs[exponent - self.lo]

    def trim(self):
        """Drop known-zero coefficients at the bottom (semantics preserved)."""
        k = 0
        while k < len(self.coeffs) - 1 and self.coeffs[k].is_zero():
            k += 1
        if k == 0:
            return self
        return LaurentSeries(self.var, self.lo + k, self.coeffs[k:])

    def is_zero(self):
        return all(c.is_zero() for c in self.coeffs)

    def classical_part(self):
        """dict exponent -> rational: the hbar -> 0 limit on the window."""
        return {
            self.lo + k: c.classical()
            for k, c in enumerate(self.coeffs)
            if c.classical() != 0
        }

    # -- arithmetic -------------------------------------------------------

    def _check_var(self, other):
        if self.var != other.var:
            raise ValueError("variable mismatch: %s vs %s" % (self.var, other.var))

    def __add__(self, other):
        self._check_var(other)
        lo = min(self.lo, other.lo)
        hi = min(self.hi, other.hi)
        if hi < lo:
            raise WindowOverflowError("empty window in addition")
        out = [self.coeff(e) + other.coeff(e) for e in range(lo, hi + 1)]
        return LaurentSeries(self.var, lo, out)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return LaurentSeries(self.var, self.lo, [-c for c in self.coeffs])

    def __mul__(self, other):
        self._check_var(other)
        a, b = self.trim(), other.trim()
        lo = a.lo + b.lo
        hi = min(a.hi + b.lo, b.hi + a.lo)
        if hi < lo:
            raise WindowOverflowError("empty window in multiplication")
        n = hi - lo + 1
        order = a.coeffs[0].order
        out = [HbarScalar.zero(order)] * n
        for i, ca in enumerate(a.coeffs):
            if ca.is_zero():
                continue
            jmax = min(len(b.coeffs), n - i)
            for j in range(jmax):
                cb = b.coeffs[j]
                if not cb.is_zero():
                    out[i + j] = out[i + j] + ca * cb
        return LaurentSeries(self.var, lo, out)

    def scale(self, scalar):
        if not isinstance(scalar, HbarScalar):
            scalar = HbarScalar.from_rational(scalar, self.coeffs[0].order)
        return LaurentSeries(self.var, self.lo, [c * scalar for c in self.coeffs])

    def inverse(self):
        """Inverse in C((z))[[hbar]].

        Solved by hbar-layers: the classical layer is inverted as an
        ordinary Laurent series pivoting at its valuation; higher layers
        follow by back-substitution.  Coefficients of the input strictly
        below the classical valuation (necessarily divisible by hbar, as
        in z + c*hbar) push each successive layer one step further down
        in exponent and cost one step of the known window at the top;
        the returned window accounts for that.
        """
        s = self.trim()
        order = s.coeffs[0].order
        v = None
        for k, c in enumerate(s.coeffs):
            if c.classical() != 0:
                v = k
                break
        if v is None:
            raise ValueError("not invertible: classical part vanishes on the window")
        pivot_exp = s.lo + v
        width = len(s.coeffs) - v  # classical-layer inverse width
        # layers of the input
        u = [[c.c[k] for c in s.coeffs] for k in range(order)]
        # smallest index carrying any hbar-corrected coefficient below the pivot
        dmin = v
        for k in range(1, order):
            for d in range(v):
                if u[k][d] != 0:
                    dmin = min(dmin, d)
                    break
        if dmin == v:
            shift = 0
        elif all(s.coeffs[d].hbar_valuation() >= v - d for d in range(dmin, v)):
            # hbar-graded principal part (depth costs hbar-orders): each
            # layer of the inverse only loses one exponent of validity
            shift = 1
        else:
            shift = v - dmin
        ext = (order - 1) * shift  # extra downward reach of higher layers
        # t[k][i] = layer-k coefficient at exponent -pivot_exp + (i - ext)
        total = ext + width
        t = [[QZERO] * total for _ in range(order)]
        piv = u[0][v]
        piv_inv = QONE / piv
        t[0][ext] = piv_inv
        for m in range(1, width):
            acc = QZERO
            for d in range(v + 1, len(s.coeffs)):
                if u[0][d] and m - (d - v) >= 0:
                    acc += u[0][d] * t[0][ext + m - (d - v)]
            t[0][ext + m] = -piv_inv * acc
        for k in range(1, order):
            # u0 * t_k = -(sum_{j=1..k} u_j * t_{k-j}); equation index i holds
            # the product coefficient pairing u[d] with t[i + v - d].
            rhs = [QZERO] * total
            for j in range(1, k + 1):
                tk = t[k - j]
                for d in range(len(s.coeffs)):
                    cu = u[j][d]
                    if cu:
                        off = d - v
                        for i2 in range(total):
                            val = tk[i2]
                            if val:
                                tgt = i2 + off
                                if 0 <= tgt < total:
                                    rhs[tgt] -= cu * val
            for i in range(total):
                acc = rhs[i]
                for d in range(v + 1, len(s.coeffs)):
                    if u[0][d]:
                        src = i - (d - v)
                        if src >= 0:
                            val = t[k][src]
                            if val:
                                acc -= u[0][d] * val
                t[k][i] = piv_inv * acc
        # conservative uniform window across layers
        hi_cut = (order - 1) * shift
        keep = total - hi_cut
        if keep <= 0:
            raise WindowOverflowError("window too small to invert this series")
        out = []
        for i in range(keep):
            out.append(HbarScalar([t[k][i] for k in range(order)]))
        return LaurentSeries(self.var, -pivot_exp - ext, out)

    def deriv(self):
        out = []
        for k, c in enumerate(self.coeffs):
            out.append(c.scale(self.lo + k))
        return LaurentSeries(self.var, self.lo - 1, out)

    def flip(self):
        """Substitute z -> -z (exponents stay put, odd ones change sign)."""
        out = [
            c if (self.lo + k) % 2 == 0 else -c for k, c in enumerate(self.coeffs)
        ]
        return LaurentSeries(self.var, self.lo, out)

    def scale_arg(self, scalar):
        """Substitute z -> u*z for an invertible scalar u (z^n picks u^n)."""
        out = []
        u_inv = scalar.invert()
        # u^lo, advancing by one power per exponent
        p = scalar.pow_int(self.lo) if self.lo >= 0 else u_inv.pow_int(-self.lo)
        for c in self.coeffs:
            out.append(c * p)
            p = p * scalar
        return LaurentSeries(self.var, self.lo, out)

    def truncate_window(self, lo=None, hi=None):
        new_lo = self.lo if lo is None else max(self.lo, lo)
        new_hi = self.hi if hi is None else min(self.hi, hi)
        if new_hi < new_lo:
            raise WindowOverflowError("empty window in truncation")
        return LaurentSeries(
            self.var, new_lo, self.coeffs[new_lo - self.lo : new_hi - self.lo + 1]
        )

    def rename(self, var):
        return LaurentSeries(var, self.lo, self.coeffs)

    # -- rendering --------------------------------------------------------

    def render(self):
        """Canonical text form: lines "c * z^n * ħ^k" sorted by (k, n)."""
        lines = []
        order = self.coeffs[0].order if self.coeffs else 0
        for k in range(order):
            for e in range(self.lo, self.hi + 1):
                x = self.coeff(e).c[k]
                if x != 0:
                    lines.append("%s * %s^%d * ħ^%d" % (rat_str(x), self.var, e, k))
        return "\n".join(lines)

    def __repr__(self):
        body = self.render()
        return "LaurentSeries[%s; %d..%d](%s)" % (
            self.var,
            self.lo,
            self.hi,
            body.replace("\n", ", ") or "0",
        )


# -- equality on overlap ---------------------------------------------------


class EqualityResult:
    __slots__ = ("ok", "lo", "hi", "witness")

    def __init__(self, ok, lo, hi, witness=None):
        self.ok = ok
        self.lo = lo
        self.hi = hi
        self.witness = witness

    @property
    def window(self):
        return "[%d, %d]" % (self.lo, self.hi)

    def __bool__(self):
        return self.ok


def series_equal(a: LaurentSeries, b: LaurentSeries, req_lo=None, req_hi=None) -> EqualityResult:
    """Compare on the overlap of the known windows; zero tolerance.

    If (req_lo, req_hi) is given the overlap must cover it, otherwise a
    WindowOverflowError reports the larger window that would be needed.
    The witness names the first differing monomial.
    """
    lo = max(a.lo, b.lo)
    hi = min(a.hi, b.hi)
    if hi < lo:
        raise WindowOverflowError("windows [%d,%d] and [%d,%d] do not overlap" % (a.lo, a.hi, b.lo, b.hi))
    if req_lo is not None and lo > req_lo or req_hi is not None and hi < req_hi:
        need = max(abs(req_lo or 0), abs(req_hi or 0))
        raise WindowOverflowError(
            "verified window [%d,%d] does not cover required [%s,%s]; increase m_z"
            % (lo, hi, req_lo, req_hi),
            required_m_z=need,
        )
    for e in range(lo, hi + 1):
        ca, cb = a.coeff(e), b.coeff(e)
        if ca != cb:
            for k in range(ca.order):
                if ca.c[k] != cb.c[k]:
                    w = "%s^%d * ħ^%d: %s != %s" % (a.var, e, k, rat_str(ca.c[k]), rat_str(cb.c[k]))
                    return EqualityResult(False, lo, hi, w)
    return EqualityResult(True, lo, hi)


# -- residues and singular parts -------------------------------------------


def res_z(s: LaurentSeries) -> HbarScalar:
    """Coefficient of z^{-1}."""
    if s.hi < -1:
        raise WindowOverflowError("window does not reach z^-1")
    return s.coeff(-1)


def sing_z(s: LaurentSeries) -> LaurentSeries:
    """Singular part: zero out all exponents >= 0."""
    order = s.coeffs[0].order
    out = [
        s.coeffs[k] if s.lo + k < 0 else HbarScalar.zero(order)
        for k in range(len(s.coeffs))
    ]
    return LaurentSeries(s.var, s.lo, out)


# -- polynomials over HbarScalar (ascending coefficient tuples) -------------


def _poly_trim(p):
    n = len(p)
    while n > 1 and p[n - 1].is_zero():
        n -= 1
    return tuple(p[:n])


def _poly_add(p, q):
    order = p[0].order
    n = max(len(p), len(q))
    z = HbarScalar.zero(order)
    return _poly_trim([(p[k] if k < len(p) else z) + (q[k] if k < len(q) else z) for k in range(n)])


def _poly_neg(p):
    return tuple(-a for a in p)


def _poly_mul(p, q):
    order = p[0].order
    out = [HbarScalar.zero(order)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a.is_zero():
            continue
        for j, b in enumerate(q):
            if not b.is_zero():
                out[i + j] = out[i + j] + a * b
    return _poly_trim(out)


def _poly_scale(p, s):
    return tuple(a * s for a in p)


def _poly_is_zero(p):
    return all(a.is_zero() for a in p)


def _poly_divmod(p, d):
    """Division with remainder; the divisor's leading term must be invertible."""
    d = _poly_trim(d)
    if _poly_is_zero(d):
        raise ZeroDivisionError("polynomial division by zero")
    if not d[-1].is_invertible():
        raise ValueError("divisor leading coefficient not invertible")
    lead_inv = d[-1].invert()
    order = p[0].order
    rem = list(p)
    if len(rem) < len(d):
        return (HbarScalar.zero(order),), _poly_trim(rem)
    qdeg = len(rem) - len(d)
    quot = [HbarScalar.zero(order)] * (qdeg + 1)
    for k in range(qdeg, -1, -1):
        c = rem[k + len(d) - 1] * lead_inv
        quot[k] = c
        if not c.is_zero():
            for j, dj in enumerate(d):
                rem[k + j] = rem[k + j] - c * dj
    return _poly_trim(quot), _poly_trim(rem)


def _poly_classical(p):
    return tuple(a.classical() for a in p)


def _qpoly_trim(p):
    n = len(p)
    while n > 1 and p[n - 1] == 0:
        n -= 1
    return tuple(p[:n])


def _qpoly_divmod(p, d):
    d = _qpoly_trim(d)
    lead_inv = QONE / d[-1]
    rem = list(p)
    if len(rem) < len(d):
        return (QZERO,), _qpoly_trim(rem)
    qdeg = len(rem) - len(d)
    quot = [QZERO] * (qdeg + 1)
    for k in range(qdeg, -1, -1):
        c = rem[k + len(d) - 1] * lead_inv
        quot[k] = c
        if c:
            for j, dj in enumerate(d):
                rem[k + j] = rem[k + j] - c * dj
    return _qpoly_trim(quot), _qpoly_trim(rem)


def _qpoly_gcd(p, q):
    p, q = _qpoly_trim(p), _qpoly_trim(q)
    while not all(x == 0 for x in q):
        _, r = _qpoly_divmod(p, q)
        p, q = q, r
    if p[-1] != 0:
        p = tuple(x / p[-1] for x in p)  # monic
    return p


class RationalFunction:
    """num/den with HbarScalar polynomial parts, canonically reduced.

    Reduction removes common factors detected on the classical parts
    (sufficient for every structure function in scope: the shared factors
    are hbar-free polynomials like (1-w)^k), then normalizes the
    denominator to be monic.
    """

    __slots__ = ("var", "num", "den")

    def __init__(self, num, den, var="w", reduce=True):
        num = _poly_trim(tuple(num))
        den = _poly_trim(tuple(den))
        if _poly_is_zero(den):
            raise ZeroDivisionError("zero denominator")
        if reduce:
            num, den = self._reduce(num, den)
        self.var = var
        self.num = num
        self.den = den

    @staticmethod
    def _reduce(num, den):
        # cancel common classical factors by trial division
        while not _poly_is_zero(num):
            g = _qpoly_gcd(_poly_classical(num), _poly_classical(den))
            if len(g) <= 1:
                break
            order = num[0].order
            glift = tuple(HbarScalar.from_rational(c, order) for c in g)
            qn, rn = _poly_divmod(num, glift)
            if not _poly_is_zero(rn):
                break
            qd, rd = _poly_divmod(den, glift)
            if not _poly_is_zero(rd):
                break
            num, den = qn, qd
        if den[-1].is_invertible():
            lead_inv = den[-1].invert()
            num = _poly_scale(num, lead_inv)
            den = _poly_scale(den, lead_inv)
        return num, den

    # -- constructors ---------------------------------------------------

    @staticmethod
    def from_coeff_lists(ctx, num, den, var="w"):
        n = ctx.n_hbar
        mk = lambda xs: tuple(
            x if isinstance(x, HbarScalar) else HbarScalar.from_rational(x, n) for x in xs
        )
        return RationalFunction(mk(num), mk(den), var)

    @staticmethod
    def polynomial(ctx, coeffs, var="w"):
        return RationalFunction.from_coeff_lists(ctx, coeffs, [QONE], var)

    @staticmethod
    def one(ctx, var="w"):
        return RationalFunction.polynomial(ctx, [QONE], var)

    # -- arithmetic -------------------------------------------------------

    def _check_var(self, other):
        if self.var != other.var:
            raise ValueError("variable mismatch")

    def __add__(self, other):
        self._check_var(other)
        num = _poly_add(_poly_mul(self.num, other.den), _poly_mul(other.num, self.den))
        return RationalFunction(num, _poly_mul(self.den, other.den), self.var)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return RationalFunction(_poly_neg(self.num), self.den, self.var, reduce=False)

    def __mul__(self, other):
        self._check_var(other)
        return RationalFunction(
            _poly_mul(self.num, other.num), _poly_mul(self.den, other.den), self.var
        )

    def inverse(self):
        if _poly_is_zero(self.num):
            raise ZeroDivisionError("inverse of zero")
        return RationalFunction(self.den, self.num, self.var)

    def scale(self, scalar):
        return RationalFunction(_poly_scale(self.num, scalar), self.den, self.var, reduce=False)

    def deriv(self):
        dn = _poly_deriv(self.num)
        dd = _poly_deriv(self.den)
        num = _poly_add(_poly_mul(dn, self.den), _poly_neg(_poly_mul(self.num, dd)))
        return RationalFunction(num, _poly_mul(self.den, self.den), self.var)

    def arg_deriv_z(self):
        """The operator w*d/dw applied to this function."""
        order = self.num[0].order
        wpoly = (HbarScalar.zero(order), HbarScalar.one(order))
        d = self.deriv()
        return RationalFunction(_poly_mul(wpoly, d.num), d.den, self.var)

    def invert_arg(self):
        """Substitute w -> 1/w (still rational)."""
        n, d = len(self.num), len(self.den)
        m = max(n, d)
        order = self.num[0].order
        z = HbarScalar.zero(order)
        num_rev = tuple(reversed(self.num + (z,) * (m - n)))
        den_rev = tuple(reversed(self.den + (z,) * (m - d)))
        return RationalFunction(num_rev, den_rev, self.var)

    def scale_arg(self, scalar):
        """Substitute w -> u*w for a scalar u."""
        def sub(p):
            out = []
            pw = HbarScalar.one(p[0].order)
            for c in p:
                out.append(c * pw)
                pw = pw * scalar
            return tuple(out)
        return RationalFunction(sub(self.num), sub(self.den), self.var)

    def evaluate(self, x: HbarScalar) -> HbarScalar:
        num = _poly_eval(self.num, x)
        den = _poly_eval(self.den, x)
        return num * den.invert()

    def __eq__(self, other):
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return _poly_is_zero(
            _poly_add(
                _poly_mul(self.num, other.den), _poly_neg(_poly_mul(other.num, self.den))
            )
        )

    def __repr__(self):
        fmt = lambda p: " + ".join(
            "(%s)%s^%d" % (c.render() or "0", self.var, k) for k, c in enumerate(p)
        )
        return "RationalFunction((%s) / (%s))" % (fmt(self.num), fmt(self.den))


def _poly_deriv(p):
    order = p[0].order
    if len(p) == 1:
        return (HbarScalar.zero(order),)
    return tuple(p[k].scale(k) for k in range(1, len(p)))


def _poly_eval(p, x: HbarScalar) -> HbarScalar:
    acc = HbarScalar.zero(x.order)
    for c in reversed(p):
        acc = acc * x + c
    return acc


# -- directed expansions -----------------------------------------------------


def _poly_valuation_classical(p):
    """Lowest degree whose classical coefficient is nonzero; None if all vanish."""
    for k, c in enumerate(p):
        if c.classical() != 0:
            return k
    return None


def iota_expand(f: RationalFunction, direction, ctx: Context, hi=None) -> LaurentSeries:
    """Directed geometric-series expansion of a rational function.

    Z_ADIC expands in nonnegative powers of the variable (the iota_{z1,z2}
    convention: series in z2/z1); Z_INV_ADIC expands at infinity.
    """
    if hi is None:
        hi = ctx.z_top
    n = ctx.n_hbar
    if direction == Z_ADIC:
        num_s = LaurentSeries(f.var, 0, [c for c in f.num] + [HbarScalar.zero(n)] * hi)
        den_s = LaurentSeries(f.var, 0, [c for c in f.den] + [HbarScalar.zero(n)] * hi)
        return (num_s * den_s.inverse()).truncate_window(hi=hi)
    if direction == Z_INV_ADIC:
        rev = f.invert_arg()
        s = iota_expand(rev, Z_ADIC, ctx, hi=hi)
        # map w -> 1/w: exponent e becomes -e
        out = [s.coeff(-e) for e in range(-s.hi, -s.lo + 1)]
        return LaurentSeries(f.var, -s.hi, out)
    raise ValueError("unknown expansion direction: %r" % (direction,))


def exp_substitute(f: RationalFunction, ctx: Context, sign=-1) -> LaurentSeries:
    """f(e^{sign*z}) as an element of C((z))[[hbar]].

    A pole at argument 1 of order m becomes a z^{-m} principal part.  The
    substitution variable is named "z".
    """
    hi = ctx.z_top
    order = ctx.n_hbar

    def poly_at_exp(p):
        acc = LaurentSeries.zeros(ctx, "z", 0, hi)
        for k, c in enumerate(p):
            if not c.is_zero():
                acc = acc + LaurentSeries.exp_z(ctx, sign * k, "z", hi).scale(c)
        return acc

    den_s = poly_at_exp(f.den)
    v = None
    for k, c in enumerate(den_s.coeffs):
        if c.classical() != 0:
            v = k
            break
    if v is None:
        raise ValueError("denominator vanishes identically at the substitution point")
    if v > ctx.m_z:
        raise WindowOverflowError(
            "pole order %d exceeds the window (m_z=%d)" % (v, ctx.m_z), required_m_z=v
        )
    return (poly_at_exp(f.num) * den_s.inverse()).truncate_window(hi=hi - v)


# -- two-variable distributions ---------------------------------------------


class Distribution2:
    """Grid of coefficients for z1^a z2^b on a bounded validity box."""

    __slots__ = ("data", "box")

    def __init__(self, data, box):
        self.data = {k: v for k, v in data.items() if not v.is_zero()}
        self.box = box  # (lo1, hi1, lo2, hi2)

    def coeff(self, a, b, order):
        if not self.contains(a, b):
            raise WindowOverflowError("(%d,%d) outside the distribution box" % (a, b))
        return self.data.get((a, b), HbarScalar.zero(order))

    def contains(self, a, b):
        lo1, hi1, lo2, hi2 = self.box
        return lo1 <= a <= hi1 and lo2 <= b <= hi2

    def is_zero(self):
        return not self.data

    def __eq__(self, other):
        if not isinstance(other, Distribution2):
            return NotImplemented
        return self.box == other.box and self.data == other.data

    def equal_on_overlap(self, other):
        lo1 = max(self.box[0], other.box[0])
        hi1 = min(self.box[1], other.box[1])
        lo2 = max(self.box[2], other.box[2])
        hi2 = min(self.box[3], other.box[3])
        if hi1 < lo1 or hi2 < lo2:
            raise WindowOverflowError("distribution boxes do not overlap")
        order = 2
        for v in list(self.data.values()) + list(other.data.values()):
            order = v.order
            break
        for a in range(lo1, hi1 + 1):
            for b in range(lo2, hi2 + 1):
                ca = self.data.get((a, b))
                cb = other.data.get((a, b))
                ca = ca if ca is not None else HbarScalar.zero(order)
                cb = cb if cb is not None else HbarScalar.zero(order)
                if ca != cb:
                    return False, "z1^%d z2^%d" % (a, b)
        return True, None

    def mul_monomial(self, a, b, scalar=None):
        """Multiply by scalar * z1^a z2^b (box shifts along)."""
        lo1, hi1, lo2, hi2 = self.box
        out = {}
        for (x, y), v in self.data.items():
            out[(x + a, y + b)] = v * scalar if scalar is not None else v
        return Distribution2(out, (lo1 + a, hi1 + a, lo2 + b, hi2 + b))

    def add(self, other):
        lo1 = max(self.box[0], other.box[0])
        hi1 = min(self.box[1], other.box[1])
        lo2 = max(self.box[2], other.box[2])
        hi2 = min(self.box[3], other.box[3])
        out = {}
        for src in (self.data, other.data):
            for k, v in src.items():
                if lo1 <= k[0] <= hi1 and lo2 <= k[1] <= hi2:
                    if k in out:
                        out[k] = out[k] + v
                    else:
                        out[k] = v
        return Distribution2(out, (lo1, hi1, lo2, hi2))

    def scale(self, scalar):
        return Distribution2({k: v * scalar for k, v in self.data.items()}, self.box)


def _check_delta_pole_structure(f: RationalFunction):
    """Poles must sit only at w = 0, 1 (classically) or infinity."""
    den = f.den
    v = _poly_valuation_classical(den)
    if v is None:
        raise ValueError("denominator classical part vanishes identically")
    cls = list(_poly_classical(den)[v:])
    # divide out (1 - w) factors:  p(w) = (1 - w) q(w)  <=>  p(1) = 0
    while len(cls) > 1:
        if sum(cls) != 0:
            break
        # synthetic division by (1 - w): q_k = -(p_{k+1} + q_{k+1}), from top
        q = [QZERO] * (len(cls) - 1)
        acc = QZERO
        for k in range(len(cls) - 2, -1, -1):
            acc = acc - cls[k + 1]
            q[k] = acc
        cls = q
    if len(cls) > 1:
        raise ValueError(
            "pole structure outside {0, 1, infinity}: residual classical factor of degree %d"
            % (len(cls) - 1)
        )


def delta_pair(f: RationalFunction, ctx: Context) -> Distribution2:
    """iota_{z1,z2} f(z2/z1) - iota_{z2,z1} f(z2/z1) on the grid.

    The input is a function of w = z2/z1 with poles only at w in {0,1,inf};
    the output is supported on the antidiagonal z1^{-n} z2^{n}.
    """
    _check_delta_pole_structure(f)
    m = ctx.m_z
    plus = iota_expand(f, Z_ADIC, ctx, hi=m)
    minus = iota_expand(f, Z_INV_ADIC, ctx, hi=m)
    order = ctx.n_hbar
    data = {}
    for nexp in range(-m, m + 1):
        c = HbarScalar.zero(order)
        if plus.lo <= nexp <= plus.hi:
            c = c + plus.coeff(nexp)
        if minus.lo <= nexp <= minus.hi:
            c = c - minus.coeff(nexp)
        if not c.is_zero():
            data[(-nexp, nexp)] = c
    return Distribution2(data, (-m, m, -m, m))


def series_log(s: LaurentSeries) -> LaurentSeries:
    """log of a series whose classical part is 1 (principal branch).

    Writes s = c0 * (1 + v) with c0 the constant coefficient (a scalar
    unit with classical value 1) and v a series that is hbar-divisible at
    nonpositive exponents; log(1 + v) then terminates on the truncated
    window because every power of v either gains an hbar-order or a
    z-order.
    """
    from .scalars import log_series as _scalar_log

    if not (s.lo <= 0 <= s.hi):
        raise WindowOverflowError("window does not contain the constant term")
    c0 = s.coeff(0)
    if c0.classical() != 1:
        raise ValueError("series_log requires classical constant term 1")
    for e in range(s.lo, 0):
        if s.coeff(e).classical() != 0:
            raise ValueError("series_log requires a unit power series (classical part)")
    order = c0.order
    const = [HbarScalar.zero(order)] * (s.hi - s.lo + 1)
    const[-s.lo] = c0
    v = (s - LaurentSeries(s.var, s.lo, const)).scale(c0.invert())
    logc = [HbarScalar.zero(order)] * (s.hi - s.lo + 1)
    logc[-s.lo] = _scalar_log(c0)
    out = LaurentSeries(s.var, s.lo, logc)
    depth = max(0, -v.trim().lo)
    k_max = s.hi + order * (1 + depth) + 2
    power = v
    k = 1
    sign = 1
    while not power.is_zero():
        out = out + power.scale(Q(sign, k))
        k += 1
        sign = -sign
        power = power * v
        if k > k_max:
            raise ValueError("series_log did not terminate; argument is not unit-like")
    return out


def delta_grid(ctx: Context, z2dz2_power=0) -> Distribution2:
    """(1/i!) (z2 d/dz2)^i of delta(z2/z1) as a grid distribution."""
    m = ctx.m_z
    order = ctx.n_hbar
    data = {}
    i = z2dz2_power
    for nexp in range(-m, m + 1):
        c = Q(nexp) ** i / factorial(i) if i else QONE
        if c != 0:
            data[(-nexp, nexp)] = HbarScalar.from_rational(c, order)
    return Distribution2(data, (-m, m, -m, m))
