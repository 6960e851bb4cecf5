"""Named verification suites over a single configuration.

Each suite builds whatever it needs from (gcm, level, context) and
returns a CheckReport; the CLI assembles them into one report file.
"""

import random
import time
from math import factorial

from .config import Context
from .rat import Q, QONE, rat_str
from .scalars import HbarScalar
from . import cartan, classical, qheisenberg, smatrix, tau
from .series import (
    RationalFunction,
    delta_grid,
    delta_pair,
    exp_substitute,
    series_equal,
)
from .tau import CheckReport, PairCheck

SUITE_NAMES = (
    "tau-tech0",
    "tau-tech1",
    "tau-group",
    "s-unitarity",
    "s-ybe",
    "s-ideal-scalars",
    "classical-affine",
    "qheisenberg",
    "lemma-exp",
    "deformation-cartan",
    "bridge-vacom",
)


def _paper_tau(gcm, level, ctx):
    return tau.PaperTau(gcm, level, ctx)


def run_tau_tech0(gcm, level, ctx):
    return tau.check_tau_symmetry(_paper_tau(gcm, level, ctx))


def run_tau_tech1(gcm, level, ctx):
    return tau.check_tau_log_identities(_paper_tau(gcm, level, ctx))


def run_tau_group(gcm, level, ctx, n_tuples=100, seed=2024):
    rep = CheckReport(
        lemma="tau-group",
        gcm=gcm.name or str(gcm.a),
        level=rat_str(Q(level)),
        n_hbar=ctx.n_hbar,
        m_z=ctx.m_z,
    )
    small = Context(min(ctx.n_hbar, 4), min(ctx.m_z, 8), ctx.weight_cap)
    rng = random.Random(seed)
    witness = None
    e = tau.identity(gcm, level, small)
    for trial in range(n_tuples):
        t1 = tau.random_tuple(gcm, level, small, rng)
        t2 = tau.random_tuple(gcm, level, small, rng)
        bad = t1.membership_failures(small)
        if bad:
            witness = "trial %d: %s" % (trial, bad[0])
            break
        ok, w = tau.tuples_equal(tau.star(t1, e), t1)
        if not ok:
            witness = "trial %d identity: %s" % (trial, w)
            break
        ok, w = tau.tuples_equal(tau.star(t1, tau.inverse(t1)), e)
        if not ok:
            witness = "trial %d inverse: %s" % (trial, w)
            break
        ok, w = tau.tuples_equal(tau.star(t1, t2), tau.star(t2, t1))
        if not ok:
            witness = "trial %d commutativity: %s" % (trial, w)
            break
    rep.pairs.append(
        PairCheck("group-laws", "%d tuples" % n_tuples, witness is None, witness=witness)
    )
    pt = _paper_tau(gcm, level, ctx)
    bad = pt.membership_failures(ctx)
    rep.pairs.append(
        PairCheck(
            "distinguished-membership",
            "",
            not bad,
            witness=bad[0] if bad else None,
        )
    )
    return rep


def run_s_unitarity(gcm, level, ctx):
    return smatrix.check_unitarity(_paper_tau(gcm, level, ctx))


def run_s_ybe(gcm, level, ctx):
    return smatrix.check_ybe_generators(_paper_tau(gcm, level, ctx))


def run_s_ideal_scalars(gcm, level, ctx):
    return smatrix.check_ideal_scalars(_paper_tau(gcm, level, ctx))


def run_classical_affine(gcm, level, ctx, jacobi_trials=500, seed=2024):
    rep = CheckReport(
        lemma="classical-affine",
        gcm=gcm.name or str(gcm.a),
        level=rat_str(Q(level)),
        n_hbar=ctx.n_hbar,
        m_z=ctx.m_z,
    )
    algebra = classical.AffineAlgebra(gcm, level)
    module = classical.VacuumModule(algebra)
    dims_wit = None
    for w in range(0, 3):
        got = classical.graded_dim(gcm, level, w)
        want = classical.graded_dim_oracle(algebra.lie.dim, w)
        if got != want:
            dims_wit = "weight %d: %d != oracle %d" % (w, got, want)
            break
    rep.pairs.append(PairCheck("graded-dims", "w<=2", dims_wit is None, witness=dims_wit))
    ok, w = classical.jacobi_spot_check(algebra, random.Random(seed), jacobi_trials)
    rep.pairs.append(
        PairCheck(
            "jacobi",
            "%d triples" % jacobi_trials,
            ok,
            witness=None if ok else "triple %s" % (w,),
        )
    )
    ok, w = classical.skew_symmetry_check(algebra)
    rep.pairs.append(PairCheck("skew-symmetry", "", ok, witness=None if ok else str(w)))
    cap = ctx.weight_cap
    loc_wit = None
    pairs = []
    for i in gcm.indices():
        for j in gcm.indices():
            pairs.append((classical.Field("h", i), classical.Field("h", j), 2))
            pairs.append((classical.Field("x+", i), classical.Field("x-", j), 2))
    checked = 0
    for w in range(0, cap + 1):
        for mono in module.basis_monomials(w):
            st = classical.FockState({mono: QONE})
            for fa, fb, order in pairs:
                ok, wit = classical.check_locality(module, fa, fb, order, st)
                checked += 1
                if not ok:
                    loc_wit = "state %s pair (%s%d, %s%d): %s" % (
                        mono,
                        fa.kind,
                        fa.index,
                        fb.kind,
                        fb.index,
                        wit,
                    )
                    break
            if loc_wit:
                break
        if loc_wit:
            break
    rep.pairs.append(
        PairCheck(
            "locality",
            "%d checks to weight %d" % (checked, cap),
            loc_wit is None,
            witness=loc_wit,
        )
    )
    return rep


def run_qheisenberg(gcm, level, ctx):
    alg = qheisenberg.derive_structure_constants(gcm, level, ctx)
    rep = qheisenberg.check_structure_constants(alg, m_max=8)
    # classical-limit cross-check against the matrix realization when available
    try:
        caff = classical.AffineAlgebra(gcm, level)
    except ValueError as exc:
        caff = None
        rep.notes.append("classical cross-check skipped: %s" % exc)
    if caff is not None:
        witness = None
        for i in gcm.indices():
            for j in gcm.indices():
                for m in range(-5, 6):
                    if m == 0:
                        continue
                    b = caff.bracket_modes(caff.gen("h", i), m, caff.gen("h", j), -m)
                    if b.central * caff.level != alg.kappa(i, j, m).classical():
                        witness = "pair (%d,%d) mode %d" % (i, j, m)
                        break
        rep.pairs.append(
            PairCheck("classical-limit", "matrix realization", witness is None, witness=witness)
        )
        rep.notes.append("mode conventions: classical z^-m-1, quantum z^-n; relative factor 1")
    exch = qheisenberg.check_exchange_relation(alg, cap=min(ctx.weight_cap, 4))
    rep.pairs.extend(exch.pairs)
    rep.notes.extend(exch.notes)
    return rep


def run_lemma_exp(gcm, level, ctx):
    alg = qheisenberg.derive_structure_constants(gcm, level, ctx)
    return qheisenberg.check_exp_identity(alg, cap=min(ctx.weight_cap, 4))


def run_deformation_cartan(gcm, level, ctx):
    pt = _paper_tau(gcm, level, ctx)
    rep = qheisenberg.check_deformation_cartan(pt)
    triv = qheisenberg.check_deformation_cartan(pt, trivial=True)
    for p in triv.pairs:
        rep.pairs.append(PairCheck("trivial-%s" % p.i, p.j, p.ok, witness=p.witness))
    rep.notes.extend(triv.notes)
    return rep


def run_bridge_vacom(gcm, level, ctx, n_pairs=100, seed=2024):
    rep = CheckReport(
        lemma="bridge-vacom",
        gcm=gcm.name or str(gcm.a),
        level=rat_str(Q(level)),
        n_hbar=ctx.n_hbar,
        m_z=ctx.m_z,
    )
    # delta-distribution family: f_{-i} = (1/(2 i!)) (-x d/dx)^i (x+1)/(x-1),
    # evaluated at x = z1/z2, reproduces (1/i!) (z2 d/dz2)^i delta(z2/z1)
    base = RationalFunction.from_coeff_lists(ctx, [1, 1], [-2, 2])
    fam_wit = None
    cur = base
    for i in range(0, 4):
        if i > 0:
            cur = cur.arg_deriv_z().scale(HbarScalar.from_rational(-1, ctx.n_hbar))
        f_i = cur.scale(HbarScalar.from_rational(Q(1, factorial(i)), ctx.n_hbar))
        got = delta_pair(f_i.invert_arg(), ctx)
        want = delta_grid(ctx, i)
        ok, w = got.equal_on_overlap(want)
        if not ok:
            fam_wit = "i=%d at %s" % (i, w)
            break
    rep.pairs.append(PairCheck("delta-family", "i<=3", fam_wit is None, witness=fam_wit))

    rng = random.Random(seed)
    hom_wit = None
    n = ctx.n_hbar
    for trial in range(n_pairs):
        f = _random_rational(rng, ctx)
        g = _random_rational(rng, ctx)
        lhs = exp_substitute(f, ctx) * exp_substitute(g, ctx)
        rhs = exp_substitute(f * g, ctx)
        r = series_equal(lhs, rhs)
        if not r.ok:
            hom_wit = "trial %d: %s" % (trial, r.witness)
            break
    rep.pairs.append(
        PairCheck(
            "exp-substitute-homomorphism",
            "%d pairs" % n_pairs,
            hom_wit is None,
            witness=hom_wit,
        )
    )
    return rep


def _random_rational(rng, ctx):
    n = ctx.n_hbar
    num = [
        HbarScalar([Q(rng.randint(-3, 3)) for _ in range(n)]) for _ in range(rng.randint(1, 3))
    ]
    if all(c.is_zero() for c in num):
        num[0] = HbarScalar.one(n)
    # poles only at the substitution point (argument 1) or 0/infinity
    m = rng.randint(0, 2)
    den = [HbarScalar.one(n)]
    for _ in range(m):
        den = [
            (den[k] if k < len(den) else HbarScalar.zero(n))
            - (den[k - 1] if k >= 1 else HbarScalar.zero(n))
            for k in range(len(den) + 1)
        ]
    return RationalFunction(tuple(num), tuple(den), var="w")


RUNNERS = {
    "tau-tech0": run_tau_tech0,
    "tau-tech1": run_tau_tech1,
    "tau-group": run_tau_group,
    "s-unitarity": run_s_unitarity,
    "s-ybe": run_s_ybe,
    "s-ideal-scalars": run_s_ideal_scalars,
    "classical-affine": run_classical_affine,
    "qheisenberg": run_qheisenberg,
    "lemma-exp": run_lemma_exp,
    "deformation-cartan": run_deformation_cartan,
    "bridge-vacom": run_bridge_vacom,
}


def run_suite(name, gcm, level, ctx):
    start = time.monotonic()
    report = RUNNERS[name](gcm, level, ctx)
    return report, time.monotonic() - start
