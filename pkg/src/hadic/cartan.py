"""Generalized Cartan matrix bookkeeping and shared structure functions.

The symmetrizer (relatively prime positive r_i with diag(r)*A symmetric)
is always computed by brute-force search, never assumed, and uniqueness
is checked.  The additive-picture structure functions g/f (arguments
living in C((z))[[hbar]] via e^{-z} substitution) and their
multiplicative-picture counterparts (one variable w = z2/z1, homogeneity
reduction recorded) are built here and consumed by every other module.
"""

import json
from dataclasses import dataclass
from math import gcd, lcm

from .config import Context
from .rat import Q, QONE, rat
from .scalars import HbarScalar, q_pow
from .series import LaurentSeries, RationalFunction, exp_substitute


class GCM:
    """Symmetrizable generalized Cartan matrix with derived data."""

    def __init__(self, rows, r=None, name=None):
        a = tuple(tuple(int(x) for x in row) for row in rows)
        n = len(a)
        if any(len(row) != n for row in a):
            raise ValueError("matrix must be square")
        for i in range(n):
            if a[i][i] != 2:
                raise ValueError("diagonal entries must be 2")
            for j in range(n):
                if i != j:
                    if a[i][j] > 0:
                        raise ValueError("off-diagonal entries must be <= 0")
                    if (a[i][j] == 0) != (a[j][i] == 0):
                        raise ValueError("a_ij = 0 iff a_ji = 0 violated")
        self.a = a
        self.n = n
        self.name = name
        computed = self._symmetrizer()
        if r is not None:
            r = tuple(int(x) for x in r)
            if r != computed:
                raise ValueError("supplied symmetrizer %s != computed %s" % (r, computed))
        self.r = computed
        self.r_lcm = lcm(*self.r) if self.n > 0 else 1

    def _symmetrizer(self):
        """Propagate r_j / r_i = a_ij / a_ji along edges, component by
        component, then clear denominators so each component is primitive.
        Raises if some cycle is inconsistent (matrix not symmetrizable)."""
        ratio = [None] * self.n
        for start in range(self.n):
            if ratio[start] is not None:
                continue
            comp = [start]
            ratio[start] = Q(1)
            queue = [start]
            while queue:
                i = queue.pop()
                for j in range(self.n):
                    if i == j or self.a[i][j] == 0:
                        continue
                    rj = ratio[i] * Q(self.a[i][j], self.a[j][i])
                    if ratio[j] is None:
                        ratio[j] = rj
                        comp.append(j)
                        queue.append(j)
                    elif ratio[j] != rj:
                        raise ValueError("matrix is not symmetrizable")
            denoms = [x.denominator for x in (ratio[c] for c in comp)]
            scale = lcm(*denoms)
            vals = [int(ratio[c] * scale) for c in comp]
            g = gcd(*vals)
            for c, v in zip(comp, vals):
                ratio[c] = Q(v, g)
        r = tuple(int(x) for x in ratio)
        for i in range(self.n):
            for j in range(self.n):
                if r[i] * self.a[i][j] != r[j] * self.a[j][i]:
                    raise ValueError("matrix is not symmetrizable")
        return r

    # derived combinatorial data

    def indices(self):
        return range(self.n)

    def n_off(self, i, j):
        """n_ij = 1 - delta_ij (locality order for same-sign ladder pairs)."""
        return 1 - (1 if i == j else 0)

    def m_serre(self, i, j):
        """m_ij = 1 - a_ij for a_ij < 0."""
        if self.a[i][j] >= 0:
            raise ValueError("m_ij only defined for a_ij < 0")
        return 1 - self.a[i][j]

    def c_sign(self, i, j):
        """C_ij = -(-1)^{delta_ij}."""
        return 1 if i == j else -1

    def q_i(self, i, ctx: Context) -> HbarScalar:
        return q_pow(self.r[i], ctx.n_hbar)

    def __repr__(self):
        return "GCM(%s, r=%s)" % (self.a, self.r)

    def __eq__(self, other):
        return isinstance(other, GCM) and self.a == other.a

    def to_dict(self):
        return {"matrix": [list(row) for row in self.a], "r": list(self.r)}


PRESETS = {
    "A1": [[2]],
    "A2": [[2, -1], [-1, 2]],
    "A1xA1": [[2, 0], [0, 2]],
    "B2": [[2, -2], [-1, 2]],
    "A1affine": [[2, -2], [-2, 2]],
}


def preset(name) -> GCM:
    key = name.replace("^(1)", "affine").replace("x", "x")
    if key not in PRESETS:
        raise ValueError("unknown preset %r (have %s)" % (name, sorted(PRESETS)))
    return GCM(PRESETS[key], name=name)


def gcm_from_dict(data) -> GCM:
    """Structured config input: {"preset": name} or {"matrix": rows, "r": optional}."""
    if isinstance(data, str):
        return preset(data)
    if "preset" in data:
        return preset(data["preset"])
    return GCM(data["matrix"], r=data.get("r"), name=data.get("name"))


def gcm_from_json(text) -> GCM:
    return gcm_from_dict(json.loads(text))


# -- structure functions ------------------------------------------------------


def g_q(gcm: GCM, i, j, ctx: Context) -> RationalFunction:
    """g(w) = (q_i^{a_ij} - w) / (1 - q_i^{a_ij} w), one variable w = z2/z1."""
    n = ctx.n_hbar
    qa = q_pow(Q(gcm.r[i] * gcm.a[i][j]), n)
    one = HbarScalar.one(n)
    return RationalFunction((qa, -one), (one, -qa), var="w")


@dataclass(frozen=True)
class HomogeneousRational:
    """A rational function of w = z2/z1 plus the total homogeneity degree
    in (z1, z2) that was divided out."""

    fn: RationalFunction
    degree: int


def f_q(gcm: GCM, i, j, ctx: Context) -> HomogeneousRational:
    """(z1 - q_i^{a_ij} z2)(z1 - z2)^{-delta_ij} reduced to one variable.

    Returns (1 - q_i^{a_ij} w)/(1 - w)^{delta_ij} with recorded degree
    1 - delta_ij.
    """
    n = ctx.n_hbar
    qa = q_pow(Q(gcm.r[i] * gcm.a[i][j]), n)
    one = HbarScalar.one(n)
    num = (one, -qa)
    den = (one, -one) if i == j else (one,)
    return HomogeneousRational(RationalFunction(num, den, var="w"), 1 - (1 if i == j else 0))


def g_hbar(gcm: GCM, i, j, ctx: Context, sign=1) -> LaurentSeries:
    """g(sign*z) where g(z) = (1 - q_i^{a_ij} e^{-z}) / (q_i^{a_ij} - e^{-z}).

    Negative arguments are constructed natively (e^{+z} substitution), not
    by flipping, so the known window stays one-sided and wide.
    """
    n = ctx.n_hbar
    qa = q_pow(Q(gcm.r[i] * gcm.a[i][j]), n)
    one = HbarScalar.one(n)
    num = RationalFunction((one, -qa), (one,), var="w")
    den = RationalFunction((qa, -one), (one,), var="w")
    return exp_substitute(num, ctx, sign=-sign) * exp_substitute(den, ctx, sign=-sign).inverse()


def exp_half(ctx: Context, sign=1) -> LaurentSeries:
    """e^{sign * z/2} as a series."""
    return LaurentSeries.exp_z(ctx, Q(sign, 2))


def f_hbar(gcm: GCM, i, j, ctx: Context, sign=1, shift=0) -> LaurentSeries:
    """f(sign*z - shift*hbar) where
    f(z) = (q_i^{-a_ij/2} e^{z/2} - q_i^{a_ij/2} e^{-z/2}) /
           (e^{z/2} - e^{-z/2})^{delta_ij}.

    The hbar-shift folds into q-power prefactors of e^{±z/2}.
    """
    n = ctx.n_hbar
    shift = rat(shift)
    half_a = Q(gcm.r[i] * gcm.a[i][j], 2)
    up = exp_half(ctx, sign).scale(q_pow(-Q(shift, 2), n))
    dn = exp_half(ctx, -sign).scale(q_pow(Q(shift, 2), n))
    num = up.scale(q_pow(-half_a, n)) - dn.scale(q_pow(half_a, n))
    if i == j:
        den = up - dn
        return num * den.inverse()
    return num
