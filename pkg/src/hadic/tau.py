"""The abelian group of deformation tuples and the distinguished tuple.

A tuple assigns to every ordered pair (i, j) of Cartan indices one
additive series tau_ij, two pairs of additive series tau1/tau2 (one per
sign), and four invertible multiplicative series tau_e (one per pair of
signs).  Membership requires the classical limits to satisfy the
symmetry/unit conditions checked in `membership_failures`.

The distinguished tuple is assembled from the shift-operator calculus:

  tau_ij(z)    = [r_i a_ij][r l] q^{r l d}  e^{-z}/(1-e^{-z})^2  - r_i a_ij r l z^{-2}
  tau1 = tau2  = [r_i a_ij] q^{r l d}  (1+e^{-z})/(2-2e^{-z})    - r_i a_ij z^{-1}
  tau_e(+,+) = tau_e(-,-) = f_ij(z) / z^{n_ij}
  tau_e(+,-) = z^{-d_ij} (z + 2 r l hbar)^{d_ij}
  tau_e(-,+) = z^{-d_ij} (z - 2 r l hbar)^{d_ij} g_ij(z)^{-1}

where [a] denotes the symmetric q-integer operator in q^{d/dz}.  Each
component is also built natively at the negated argument (operators pick
up d -> -d, the base functions are even/odd), since flipping a one-sided
window would destroy most of the known coefficients.
"""

import random as _random
from dataclasses import dataclass, field

from .config import Context, WindowOverflowError
from .rat import Q, QONE, rat, rat_str
from .scalars import HbarScalar, log_series, q_pow
from . import cartan
from .series import (
    LaurentSeries,
    RationalFunction,
    exp_substitute,
    series_equal,
)
from .shiftops import DiffOperator, f_op, q_int_op, shift_op

SIGNS = (1, -1)


def _sgn_tag(s):
    return "+" if s > 0 else "-"


class TauTuple:
    """Deformation tuple over a fixed GCM and level.

    Components are stored for both argument orientations: `tau(i, j, sign)`
    returns tau_ij(sign * z), and similarly for the other families.
    """

    def __init__(self, gcm, level, tau, tau1, tau2, tau_e):
        self.gcm = gcm
        self.level = rat(level)
        self._tau = tau      # (i, j, sign) -> LaurentSeries
        self._tau1 = tau1    # (i, j, pm, sign) -> LaurentSeries
        self._tau2 = tau2
        self._tau_e = tau_e  # (i, j, e1, e2, sign) -> LaurentSeries

    def tau(self, i, j, sign=1):
        return self._tau[(i, j, sign)]

    def tau1(self, i, j, pm, sign=1):
        return self._tau1[(i, j, pm, sign)]

    def tau2(self, i, j, pm, sign=1):
        return self._tau2[(i, j, pm, sign)]

    def tau_e(self, i, j, e1, e2, sign=1):
        return self._tau_e[(i, j, e1, e2, sign)]

    def _compatible(self, other):
        if self.gcm != other.gcm or self.level != other.level:
            raise ValueError("tuples live over different GCM or level")

    def membership_failures(self, ctx):
        """Classical-limit conditions; returns a list of failure strings."""
        bad = []
        n = self.gcm.n
        for i in range(n):
            for j in range(n):
                a = self.tau(i, j).classical_part()
                b = self.tau(j, i, -1).classical_part()
                if a != b:
                    bad.append("classical tau_%d%d(z) != tau_%d%d(-z)" % (i, j, j, i))
                for pm in SIGNS:
                    a1 = self.tau1(i, j, pm).classical_part()
                    b1 = self.tau2(j, i, pm, -1).classical_part()
                    if a1 != {e: -c for e, c in b1.items()}:
                        bad.append(
                            "classical tau1_%d%d^%s(z) != -tau2_%d%d^%s(-z)"
                            % (i, j, _sgn_tag(pm), j, i, _sgn_tag(pm))
                        )
                for e1 in SIGNS:
                    for e2 in SIGNS:
                        u = self.tau_e(i, j, e1, e2)
                        v = self.tau_e(j, i, e2, e1, -1)
                        if u.classical_part() != v.classical_part():
                            bad.append(
                                "classical tau_e_%d%d^%s%s(z) != tau_e_%d%d^%s%s(-z)"
                                % (i, j, _sgn_tag(e1), _sgn_tag(e2), j, i, _sgn_tag(e2), _sgn_tag(e1))
                            )
                        cp = u.classical_part()
                        if min(cp, default=1) < 0 or cp.get(0, 0) == 0:
                            bad.append(
                                "classical tau_e_%d%d^%s%s not a unit power series"
                                % (i, j, _sgn_tag(e1), _sgn_tag(e2))
                            )
        return bad


def identity(gcm, level, ctx: Context) -> TauTuple:
    """The group identity: zero additive parts, unit multiplicative parts."""
    zero = LaurentSeries.zeros(ctx, "z", -1)
    one = LaurentSeries.constant(ctx, HbarScalar.one(ctx.n_hbar))
    tau, tau1, tau2, tau_e = {}, {}, {}, {}
    for i in gcm.indices():
        for j in gcm.indices():
            for s in SIGNS:
                tau[(i, j, s)] = zero
                for pm in SIGNS:
                    tau1[(i, j, pm, s)] = zero
                    tau2[(i, j, pm, s)] = zero
                for e1 in SIGNS:
                    for e2 in SIGNS:
                        tau_e[(i, j, e1, e2, s)] = one
    return TauTuple(gcm, level, tau, tau1, tau2, tau_e)


def star(t1: TauTuple, t2: TauTuple) -> TauTuple:
    """Group law: additive components add, multiplicative ones multiply."""
    t1._compatible(t2)
    tau = {k: t1._tau[k] + t2._tau[k] for k in t1._tau}
    tau1 = {k: t1._tau1[k] + t2._tau1[k] for k in t1._tau1}
    tau2 = {k: t1._tau2[k] + t2._tau2[k] for k in t1._tau2}
    tau_e = {k: t1._tau_e[k] * t2._tau_e[k] for k in t1._tau_e}
    return TauTuple(t1.gcm, t1.level, tau, tau1, tau2, tau_e)


def inverse(t: TauTuple) -> TauTuple:
    tau = {k: -v for k, v in t._tau.items()}
    tau1 = {k: -v for k, v in t._tau1.items()}
    tau2 = {k: -v for k, v in t._tau2.items()}
    tau_e = {k: v.inverse() for k, v in t._tau_e.items()}
    return TauTuple(t.gcm, t.level, tau, tau1, tau2, tau_e)


def tuples_equal(t1: TauTuple, t2: TauTuple):
    """Exact comparison on window overlaps; returns (ok, witness)."""
    for store1, store2 in (
        (t1._tau, t2._tau),
        (t1._tau1, t2._tau1),
        (t1._tau2, t2._tau2),
        (t1._tau_e, t2._tau_e),
    ):
        for k in store1:
            r = series_equal(store1[k], store2[k])
            if not r.ok:
                return False, "component %s: %s" % (k, r.witness)
    return True, None


def random_tuple(gcm, level, ctx: Context, rng: _random.Random) -> TauTuple:
    """Random member of the group (membership conditions built in).

    Classical parts are tied across the pair (i, j) <-> (j, i) with the
    symmetry conditions; the diagonal entries get even/odd classical
    parts as those conditions force.  hbar-corrections are free.
    """
    n = ctx.n_hbar
    span = 4  # all random data lives on the symmetric window [-span, span]

    def rand_scalar(lowest_order=0):
        return HbarScalar(
            [Q(0)] * lowest_order
            + [Q(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(n - lowest_order)]
        )

    def rand_series(lo, lowest_order=0, unit=False):
        # support on [lo, 2], window [-span, span] so flips stay lossless
        zero = HbarScalar.zero(n)
        coeffs = [zero] * (2 * span + 1)
        for e in range(lo, 3):
            coeffs[e + span] = rand_scalar(lowest_order)
        if unit:
            coeffs[span] = HbarScalar.from_rational(rng.choice([1, 2, Q(1, 2)]), n)
        return LaurentSeries("z", -span, coeffs)

    def put(store, key_pos, key_neg, pos_series, neg_series):
        store[key_pos] = pos_series
        store[key_neg] = neg_series

    tau, tau1, tau2, tau_e = {}, {}, {}, {}
    for i in gcm.indices():
        for j in gcm.indices():
            if j < i:
                continue
            if i == j:
                c = rand_series(-2)
                even = c + c.flip()
                h = rand_series(-2, 1)
                put(tau, (i, i, 1), (i, i, -1), even + h, even + h.flip())
                for pm in SIGNS:
                    c1 = rand_series(-1)
                    h1 = rand_series(-1, 1)
                    h2 = rand_series(-1, 1)
                    put(tau1, (i, i, pm, 1), (i, i, pm, -1), c1 + h1, c1.flip() + h1.flip())
                    put(tau2, (i, i, pm, 1), (i, i, pm, -1), -c1.flip() + h2, -c1 + h2.flip())
                for e in SIGNS:
                    ce = rand_series(1, 0)
                    even_u = (
                        ce
                        + ce.flip()
                        + LaurentSeries.constant(ctx, HbarScalar.from_rational(rng.choice([1, 2]), n))
                    )
                    hu = rand_series(0, 1)
                    put(
                        tau_e,
                        (i, i, e, e, 1),
                        (i, i, e, e, -1),
                        even_u + hu,
                        even_u + hu.flip(),
                    )
                cm = rand_series(0, 0, unit=True)
                hp = rand_series(0, 1)
                hm = rand_series(0, 1)
                put(tau_e, (i, i, 1, -1, 1), (i, i, 1, -1, -1), cm + hp, cm.flip() + hp.flip())
                put(tau_e, (i, i, -1, 1, 1), (i, i, -1, 1, -1), cm.flip() + hm, cm + hm.flip())
                continue
            # off-diagonal pair (i, j) with j > i: tie classics across the swap
            c = rand_series(-2)
            h_ij = rand_series(-2, 1)
            h_ji = rand_series(-2, 1)
            put(tau, (i, j, 1), (i, j, -1), c + h_ij, c.flip() + h_ij.flip())
            put(tau, (j, i, 1), (j, i, -1), c.flip() + h_ji, c + h_ji.flip())
            for pm in SIGNS:
                c1 = rand_series(-1)
                c1b = rand_series(-1)
                for (a, b, cc) in ((i, j, c1), (j, i, c1b)):
                    h1 = rand_series(-1, 1)
                    h2 = rand_series(-1, 1)
                    put(tau1, (a, b, pm, 1), (a, b, pm, -1), cc + h1, cc.flip() + h1.flip())
                    put(
                        tau2,
                        (b, a, pm, 1),
                        (b, a, pm, -1),
                        -cc.flip() + h2,
                        -cc + h2.flip(),
                    )
            for e1 in SIGNS:
                for e2 in SIGNS:
                    cu = rand_series(0, 0, unit=True)
                    hu = rand_series(0, 1)
                    hv = rand_series(0, 1)
                    put(tau_e, (i, j, e1, e2, 1), (i, j, e1, e2, -1), cu + hu, cu.flip() + hu.flip())
                    put(
                        tau_e,
                        (j, i, e2, e1, 1),
                        (j, i, e2, e1, -1),
                        cu.flip() + hv,
                        cu + hv.flip(),
                    )
    return TauTuple(gcm, level, tau, tau1, tau2, tau_e)


# -- the distinguished tuple ---------------------------------------------------


def _base_double_pole(ctx, sign):
    """e^{-sz}/(1-e^{-sz})^2, an even function of z."""
    f = RationalFunction.from_coeff_lists(ctx, [0, 1], [1, -2, 1])
    return exp_substitute(f, ctx, sign=-sign)


def _base_single_pole(ctx, sign):
    """(1+e^{-sz})/(2-2e^{-sz}), an odd function of z."""
    f = RationalFunction.from_coeff_lists(ctx, [1, 1], [2, -2])
    return exp_substitute(f, ctx, sign=-sign)


class PaperTau(TauTuple):
    """The distinguished deformation tuple for a GCM and level."""

    def __init__(self, gcm, level, ctx: Context):
        self.ctx = ctx
        level = rat(level)
        rl = Q(gcm.r_lcm) * level
        n = ctx.n_hbar
        tau, tau1, tau2, tau_e = {}, {}, {}, {}
        for sign in SIGNS:
            base2 = _base_double_pole(ctx, sign)
            base1 = _base_single_pole(ctx, sign)
            for i in gcm.indices():
                for j in gcm.indices():
                    aa = Q(gcm.r[i] * gcm.a[i][j])
                    # under z -> -z the even q-integer operators survive and
                    # the shift flips: q^{rl d/dz} -> q^{-rl d/dz}
                    op = (
                        q_int_op(aa, ctx)
                        .compose(q_int_op(rl, ctx))
                        .compose(shift_op(sign * rl, ctx))
                    )
                    t = op.apply(base2) - LaurentSeries.monomial(
                        ctx, -2, HbarScalar.from_rational(aa * rl, n)
                    )
                    if t.coeff(-2).classical() != 0:
                        raise AssertionError(
                            "classical double pole failed to cancel in tau_%d%d" % (i, j)
                        )
                    tau[(i, j, sign)] = t
                    op1 = q_int_op(aa, ctx).compose(shift_op(sign * rl, ctx))
                    t1 = op1.apply(base1) - LaurentSeries.monomial(
                        ctx, -1, HbarScalar.from_rational(sign * aa, n)
                    )
                    for pm in SIGNS:
                        tau1[(i, j, pm, sign)] = t1
                        tau2[(i, j, pm, sign)] = t1
                    # same-sign multiplicative components
                    fh = cartan.f_hbar(gcm, i, j, ctx, sign=sign)
                    if i != j:
                        same = LaurentSeries.monomial(
                            ctx, -1, HbarScalar.from_rational(sign, n)
                        ) * fh
                    else:
                        same = fh
                    tau_e[(i, j, 1, 1, sign)] = same
                    tau_e[(i, j, -1, -1, sign)] = same
                    # opposite-sign components
                    if i == j:
                        zpm = LaurentSeries.monomial(ctx, 1).scale(
                            HbarScalar.from_rational(sign, n)
                        )
                        plus = zpm + LaurentSeries.constant(
                            ctx, HbarScalar.hbar(n, 1, 2 * rl)
                        )
                        minus = zpm + LaurentSeries.constant(
                            ctx, HbarScalar.hbar(n, 1, -2 * rl)
                        )
                        zinv = LaurentSeries.monomial(
                            ctx, -1, HbarScalar.from_rational(sign, n)
                        )
                        tau_e[(i, j, 1, -1, sign)] = zinv * plus
                        tau_e[(i, j, -1, 1, sign)] = (
                            zinv * minus * cartan.g_hbar(gcm, i, j, ctx, sign=sign).inverse()
                        )
                    else:
                        tau_e[(i, j, 1, -1, sign)] = LaurentSeries.constant(
                            ctx, HbarScalar.one(n)
                        )
                        tau_e[(i, j, -1, 1, sign)] = cartan.g_hbar(
                            gcm, i, j, ctx, sign=sign
                        ).inverse()
        super().__init__(gcm, level, tau, tau1, tau2, tau_e)
        self.rl = rl


# -- identity checks -----------------------------------------------------------


@dataclass
class PairCheck:
    i: int
    j: int
    ok: bool
    witness: str = None
    window: str = None

    def to_dict(self):
        return {
            "i": self.i,
            "j": self.j,
            "pass": self.ok,
            "witness": self.witness,
            "window": self.window,
        }


@dataclass
class CheckReport:
    lemma: str
    gcm: str
    level: str
    n_hbar: int
    m_z: int
    pairs: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def ok(self):
        return all(p.ok for p in self.pairs)

    def to_dict(self):
        return {
            "lemma": self.lemma,
            "gcm": self.gcm,
            "level": self.level,
            "n_hbar": self.n_hbar,
            "m_z": self.m_z,
            "pass": self.ok,
            "pairs": [p.to_dict() for p in self.pairs],
            "notes": self.notes,
        }


def _report(name, t, ctx):
    return CheckReport(
        lemma=name,
        gcm=t.gcm.name or str(t.gcm.a),
        level=rat_str(t.level),
        n_hbar=ctx.n_hbar,
        m_z=ctx.m_z,
    )


def _pair_result(i, j, *comparisons):
    """Combine series_equal results for one (i, j) entry."""
    windows = []
    for r in comparisons:
        windows.append(r.window)
        if not r.ok:
            return PairCheck(i, j, False, witness=r.witness, window=r.window)
    return PairCheck(i, j, True, window=";".join(windows))


def check_tau_symmetry(t: PaperTau, ctx=None) -> CheckReport:
    """The three symmetry identities of the distinguished tuple:

      tau_ij(z) - tau_ji(-z)          = [r_i a_ij][r l](q^{rl d}-q^{-rl d}) e^{-z}/(1-e^{-z})^2
      tau1_ij(z) + tau2_ji(-z)        = [r_i a_ij](q^{rl d}-q^{-rl d}) (1+e^{-z})/(2-2e^{-z})
      tau_e same-sign ratio           = g_ij(z) = inverse opposite-sign ratio
    """
    ctx = ctx or t.ctx
    gcm = t.gcm
    rl = t.rl
    rep = _report("tau-tech0", t, ctx)
    base2 = _base_double_pole(ctx, 1)
    base1 = _base_single_pole(ctx, 1)
    shift_diff = shift_op(rl, ctx) - shift_op(-rl, ctx)
    for i in gcm.indices():
        for j in gcm.indices():
            aa = Q(gcm.r[i] * gcm.a[i][j])
            lhs0 = t.tau(i, j) - t.tau(j, i, -1)
            rhs0 = (
                q_int_op(aa, ctx)
                .compose(q_int_op(rl, ctx))
                .compose(shift_diff)
                .apply(base2)
            )
            r0 = series_equal(lhs0, rhs0)
            results = [r0]
            rhs1 = q_int_op(aa, ctx).compose(shift_diff).apply(base1)
            for pm in SIGNS:
                lhs1 = t.tau1(i, j, pm) + t.tau2(j, i, pm, -1)
                results.append(series_equal(lhs1, rhs1))
            g = cartan.g_hbar(gcm, i, j, ctx)
            for e in SIGNS:
                ratio = t.tau_e(i, j, e, e) * t.tau_e(j, i, e, e, -1).inverse()
                results.append(series_equal(ratio, g))
            ratio_pm = t.tau_e(i, j, 1, -1).inverse() * t.tau_e(j, i, -1, 1, -1)
            results.append(series_equal(ratio_pm, g))
            rep.pairs.append(_pair_result(i, j, *results))
    return rep


def check_tau_log_identities(t: PaperTau, ctx=None) -> CheckReport:
    """F(d/dz) intertwines the additive components with shifted sums/logs:

      F(d)(tau_ij(z) - tau_ji(-z)) = (q^{-rl d}-q^{rl d})(tau1_ij(z)+tau2_ji(-z))
      F(d)(tau1_ij^pm(z)+tau2_ji^pm(-z))
          = -pm (q^{rl d}-q^{-rl d}) log(tau_e_ij^{+,pm}(z)/tau_e_ji^{pm,+}(-z))
    """
    ctx = ctx or t.ctx
    gcm = t.gcm
    rl = t.rl
    rep = _report("tau-tech1", t, ctx)
    F = f_op(ctx)
    shift_diff = shift_op(rl, ctx) - shift_op(-rl, ctx)
    for i in gcm.indices():
        for j in gcm.indices():
            lhs3 = F.apply(t.tau(i, j) - t.tau(j, i, -1))
            sum_plus = t.tau1(i, j, 1) + t.tau2(j, i, 1, -1)
            rhs3 = (-shift_diff).apply(sum_plus)
            results = [series_equal(lhs3, rhs3)]
            for pm in SIGNS:
                lhs4 = F.apply(t.tau1(i, j, pm) + t.tau2(j, i, pm, -1))
                ratio = t.tau_e(i, j, 1, pm) * t.tau_e(j, i, pm, 1, -1).inverse()
                logr = series_log(ratio)
                rhs4 = shift_diff.scale(HbarScalar.from_rational(-pm, ctx.n_hbar)).apply(logr)
                results.append(series_equal(lhs4, rhs4))
            rep.pairs.append(_pair_result(i, j, *results))
    return rep


from .series import series_log  # noqa: E402  (re-export for suite callers)
