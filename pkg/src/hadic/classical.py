"""Classical ground truth: loop-algebra modes over type-A presets, the
vacuum Fock module, graded dimensions, and locality/Jacobi spot checks.

The finite-dimensional algebra is realized by trace-zero matrices (sl2
for the rank-1 preset, sl3 for A2); the invariant form is the trace form
of the defining representation, which makes the mode relations

  [h_i(m), h_j(n)]     = m delta_{m+n,0} r_i a_ij r l
  [h_i(m), x_j^pm(n)]  = pm r_i a_ij x_j^pm(m+n)
  [x_i^+(m), x_j^-(n)] = delta_ij/r_i (h_i(m+n) + r l m delta_{m+n,0})

hold verbatim for these presets (checked in the test suite rather than
assumed).  Elements of the affinization are dicts over (basis index,
mode) plus a central coordinate; Fock states are exact rational linear
combinations of normal-ordered creation monomials.

Fields follow the convention a(z) = sum a(m) z^{-m-1}; the convention is
recorded on the field wrapper because the quantum modules use z^{-n}.
"""

import random as _random
from dataclasses import dataclass, field
from math import comb

from .rat import Q, QZERO, QONE


def _mat(n, entries):
    m = [[QZERO] * n for _ in range(n)]
    for (r, c), v in entries.items():
        m[r][c] = Q(v)
    return tuple(tuple(row) for row in m)


def _mat_mul(a, b):
    n = len(a)
    return tuple(
        tuple(sum((a[i][k] * b[k][j] for k in range(n)), QZERO) for j in range(n))
        for i in range(n)
    )


def _mat_sub(a, b):
    return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def _mat_trace(a):
    return sum((a[i][i] for i in range(len(a))), QZERO)


class TypeALieAlgebra:
    """sl_{n+1} with Chevalley generators attached to a type-A preset GCM.

    Basis order: all matrix units E_{rc} (r != c) first, then the Cartan
    elements h_i = E_ii - E_{i+1,i+1}.
    """

    def __init__(self, gcm):
        rank = gcm.n
        if gcm.a != tuple(
            tuple(2 if i == j else (-1 if abs(i - j) == 1 else 0) for j in range(rank))
            for i in range(rank)
        ):
            raise ValueError("matrix realization only available for type-A presets")
        self.gcm = gcm
        n = rank + 1
        self.dim_v = n
        basis = []
        names = []
        for r in range(n):
            for c in range(n):
                if r != c:
                    basis.append(_mat(n, {(r, c): 1}))
                    names.append("E%d%d" % (r, c))
        for i in range(rank):
            basis.append(_mat_sub(_mat(n, {(i, i): 1}), _mat(n, {(i + 1, i + 1): 1})))
            names.append("h%d" % i)
        self.basis = basis
        self.names = names
        self.dim = len(basis)
        self._index = {m: k for k, m in enumerate(basis)}
        self.h_index = {i: self.dim - rank + i for i in range(rank)}
        self.xp_index = {}
        self.xm_index = {}
        for k, nm in enumerate(names):
            for i in range(rank):
                if nm == "E%d%d" % (i, i + 1):
                    self.xp_index[i] = k
                if nm == "E%d%d" % (i + 1, i):
                    self.xm_index[i] = k
        # precompute structure constants and the trace form
        self._brackets = {}
        self.form = {}
        for a in range(self.dim):
            for b in range(self.dim):
                m = _mat_sub(
                    _mat_mul(self.basis[a], self.basis[b]),
                    _mat_mul(self.basis[b], self.basis[a]),
                )
                self._brackets[(a, b)] = self._decompose(m)
                self.form[(a, b)] = _mat_trace(_mat_mul(self.basis[a], self.basis[b]))

    def _decompose(self, m):
        """Coordinates of a trace-zero matrix in the chosen basis."""
        n = self.dim_v
        out = {}
        for r in range(n):
            for c in range(n):
                if r != c and m[r][c] != 0:
                    out[self._index[_mat(n, {(r, c): 1})]] = m[r][c]
        # diagonal part: d = sum_i t_i h_i with t_i = partial sums
        acc = QZERO
        for i in range(n - 1):
            acc += m[i][i]
            if acc != 0:
                out[self.h_index[i]] = acc
        return out

    def bracket(self, a, b):
        """Structure constants dict for [basis_a, basis_b]."""
        return self._brackets[(a, b)]


# -- affinization elements ----------------------------------------------------


class AffineElement:
    """Element of g tensor C[t, 1/t] + C c: dict (basis, mode) -> Q plus c."""

    __slots__ = ("terms", "central")

    def __init__(self, terms=None, central=QZERO):
        self.terms = {k: v for k, v in (terms or {}).items() if v != 0}
        self.central = central

    def __add__(self, other):
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, QZERO) + v
        return AffineElement(out, self.central + other.central)

    def scale(self, x):
        return AffineElement({k: v * x for k, v in self.terms.items()}, self.central * x)

    def __neg__(self):
        return self.scale(Q(-1))

    def is_zero(self):
        return not self.terms and self.central == 0


class AffineAlgebra:
    """The mode algebra over a type-A preset at a fixed level.

    [a(m), b(n)] = [a,b](m+n) + m delta_{m+n,0} <a,b> r c  with <,> the
    trace form; c acts as the level on Fock states.
    """

    def __init__(self, gcm, level):
        self.lie = TypeALieAlgebra(gcm)
        self.gcm = gcm
        self.level = Q(level)
        self.r_lcm = gcm.r_lcm

    def gen(self, kind, i):
        if kind == "h":
            return self.lie.h_index[i]
        if kind == "x+":
            return self.lie.xp_index[i]
        if kind == "x-":
            return self.lie.xm_index[i]
        raise ValueError(kind)

    def bracket_modes(self, a, m, b, n):
        """[a(m), b(n)] as an AffineElement."""
        out = {}
        for k, v in self.lie.bracket(a, b).items():
            out[(k, m + n)] = v
        central = QZERO
        if m + n == 0:
            central = Q(m) * self.lie.form[(a, b)] * self.r_lcm
        return AffineElement(out, central)

    def bracket_elements(self, u: AffineElement, v: AffineElement) -> AffineElement:
        acc = AffineElement()
        for (a, m), ca in u.terms.items():
            for (b, n), cb in v.terms.items():
                acc = acc + self.bracket_modes(a, m, b, n).scale(ca * cb)
        return acc


# -- the induced vacuum module -------------------------------------------------


class FockState:
    """Exact combination of normal-ordered creation monomials.

    A monomial is a tuple of (mode, basis) pairs with mode <= -1, kept
    sorted; the canonical order is ascending (mode, basis).
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        self.coeffs = {k: v for k, v in (coeffs or {}).items() if v != 0}

    @staticmethod
    def vacuum():
        return FockState({(): QONE})

    def __add__(self, other):
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, QZERO) + v
        return FockState(out)

    def scale(self, x):
        if x == 0:
            return FockState()
        return FockState({k: v * x for k, v in self.coeffs.items()})

    def __sub__(self, other):
        return self + other.scale(Q(-1))

    def is_zero(self):
        return not self.coeffs

    def __eq__(self, other):
        return isinstance(other, FockState) and self.coeffs == other.coeffs

    def weight(self):
        return max((sum(-m for m, _ in mono) for mono in self.coeffs), default=0)

    def __repr__(self):
        return "FockState(%s)" % (self.coeffs,)


class VacuumModule:
    """V(l, 0) for a type-A preset: action by straightening, exact.

    Monomial actions are memoized; the same straightening subproblems
    recur across grid scans, so the cache pays for itself immediately.
    """

    def __init__(self, algebra: AffineAlgebra):
        self.algebra = algebra
        self._memo = {}

    def act_mode(self, basis, mode, state: FockState) -> FockState:
        out = FockState()
        for mono, coeff in state.coeffs.items():
            out = out + self._act_mono_cached(basis, mode, mono).scale(coeff)
        return out

    def _act_mono_cached(self, a, m, mono):
        key = (a, m, mono)
        hit = self._memo.get(key)
        if hit is None:
            hit = self._act_mono(a, m, mono)
            self._memo[key] = hit
        return hit

    def act(self, element: AffineElement, state: FockState) -> FockState:
        out = state.scale(element.central * self.algebra.level)
        for (a, m), c in element.terms.items():
            out = out + self.act_mode(a, m, state).scale(c)
        return out

    def _act_mono(self, a, m, mono):
        """Left action of a(m) on a normal-ordered monomial.

        a(m) X_0 rest = X_0 (a(m) rest) + [a(m), X_0] rest, recursing
        until the mode either prepends in canonical position or hits the
        vacuum (where nonnegative modes act as zero)."""
        if not mono:
            if m <= -1:
                return FockState({((m, a),): QONE})
            return FockState()
        n0, b0 = mono[0]
        rest = mono[1:]
        if m <= -1 and (m, a) <= (n0, b0):
            return FockState({((m, a),) + mono: QONE})
        out = FockState()
        t1 = self._act_mono_cached(a, m, rest)
        for mono2, c in t1.coeffs.items():
            out = out + self._act_mono_cached(b0, n0, mono2).scale(c)
        br = self.algebra.bracket_modes(a, m, b0, n0)
        out = out + self._apply_element(br, rest)
        return out

    def _apply_element(self, element: AffineElement, mono) -> FockState:
        out = (
            FockState({mono: element.central * self.algebra.level})
            if element.central
            else FockState()
        )
        for (a, m), c in element.terms.items():
            out = out + self._act_mono_cached(a, m, mono).scale(c)
        return out

    # -- enumeration ---------------------------------------------------------

    def basis_monomials(self, weight):
        """All normal-ordered monomials of the given total weight."""
        dim = self.algebra.lie.dim
        out = []

        def rec(remaining, min_key, current):
            if remaining == 0:
                out.append(tuple(current))
                return
            for m in range(-remaining, 0):
                for b in range(dim):
                    if (m, b) < min_key:
                        continue
                    current.append((m, b))
                    rec(remaining + m, (m, b), current)
                    current.pop()

        rec(weight, (-weight - 1, -1), [])
        return out


def graded_dim(gcm, level, weight) -> int:
    """Number of normal-ordered monomials of the given weight (level enters
    the module structure, not the count)."""
    algebra = AffineAlgebra(gcm, level)
    return len(VacuumModule(algebra).basis_monomials(weight))


def graded_dim_oracle(dim_g, weight) -> int:
    """Independent count: colored partitions of `weight` with dim_g colors."""
    table = [1] + [0] * weight
    for part in range(1, weight + 1):
        # dim_g colors of part size `part`: multiset convolution
        for _ in range(dim_g):
            for w in range(part, weight + 1):
                table[w] += table[w - part]
    return table[weight]


# -- locality and the coefficient bracket --------------------------------------


@dataclass
class ConformalDatum:
    """k-th products u_k v for the generator set: (lie part, central part)."""

    lie: dict
    central: Q


def affine_conformal_products(algebra: AffineAlgebra, a, b):
    """u_k v data of the affinization: u_0 v = [u, v], u_1 v = <u,v> r c."""
    return {
        0: ConformalDatum(algebra.lie.bracket(a, b), QZERO),
        1: ConformalDatum({}, algebra.lie.form[(a, b)] * algebra.r_lcm),
    }


def coefficient_bracket(algebra: AffineAlgebra, a, m, b, n) -> AffineElement:
    """[u(m), v(n)] = sum_k binom(m, k) (u_k v)(m + n - k).

    The central summand (u_1 v) contributes only at total mode -1, i.e.
    exactly the m delta_{m+n,0} central term.
    """
    products = affine_conformal_products(algebra, a, b)
    out = AffineElement()
    for k, datum in products.items():
        binom = Q(comb(m, k)) if m >= 0 else Q(_signed_binom(m, k))
        if binom == 0:
            continue
        terms = {(idx, m + n - k): binom * c for idx, c in datum.lie.items()}
        central = QZERO
        if datum.central != 0 and m + n - k == -1:
            central = binom * datum.central
        out = out + AffineElement(terms, central)
    return out


def _signed_binom(m, k):
    num = 1
    for j in range(k):
        num *= m - j
    from math import factorial

    return Q(num, factorial(k))


@dataclass
class Field:
    """Mode family with its series convention recorded explicitly."""

    kind: str
    index: int
    mode_convention: str = "z^-m-1"


def commutator_grid(module: VacuumModule, fa: Field, fb: Field, state: FockState, box):
    """[Y(a, z1), Y(b, z2)] state on a mode box, as a dict (m, n) -> FockState.

    Grid key (m, n) holds the coefficient of z1^{-m-1} z2^{-n-1}.
    """
    a = module.algebra.gen(fa.kind, fa.index)
    b = module.algebra.gen(fb.kind, fb.index)
    lo, hi = box
    out = {}
    for n in range(lo, hi + 1):
        bs = module.act_mode(b, n, state)
        for m in range(lo, hi + 1):
            acc = module.act_mode(a, m, bs)
            out[(m, n)] = acc
    for m in range(lo, hi + 1):
        as_ = module.act_mode(a, m, state)
        for n in range(lo, hi + 1):
            out[(m, n)] = out[(m, n)] - module.act_mode(b, n, as_)
    return out


def check_locality(module: VacuumModule, fa: Field, fb: Field, order, state: FockState, box=None):
    """(z1 - z2)^order [Y(a,z1), Y(b,z2)] state = 0 on a verified sub-box."""
    w = state.weight()
    cap = module.algebra.lie.dim and (w + order + 3)
    if box is None:
        box = (-cap, cap)
    grid = commutator_grid(module, fa, fb, state, box)
    lo, hi = box
    # multiplying by (z1 - z2)^order: coefficient at (m, n) picks
    # sum_k (-1)^k binom(order, k) grid[m + order - k, n + k]
    for m in range(lo, hi - order + 1):
        for n in range(lo, hi - order + 1):
            acc = FockState()
            for k in range(order + 1):
                g = grid.get((m + order - k, n + k))
                if g is not None:
                    acc = acc + g.scale(Q((-1) ** k * comb(order, k)))
            if not acc.is_zero():
                return False, "monomial z1^%d z2^%d" % (-m - 1 - order, -n - 1)
    return True, None


def jacobi_spot_check(algebra: AffineAlgebra, rng: _random.Random, trials: int):
    """Exact Jacobi identity on random mode triples."""
    dim = algebra.lie.dim
    for _ in range(trials):
        a, b, c = (rng.randrange(dim) for _ in range(3))
        m, n, p = (rng.randint(-4, 4) for _ in range(3))
        ea = AffineElement({(a, m): QONE})
        eb = AffineElement({(b, n): QONE})
        ec = AffineElement({(c, p): QONE})
        br = algebra.bracket_elements
        total = (
            br(ea, br(eb, ec))
            + br(eb, br(ec, ea))
            + br(ec, br(ea, eb))
        )
        if not total.is_zero():
            return False, (a, m, b, n, c, p)
    return True, None


def skew_symmetry_check(algebra: AffineAlgebra):
    """Conformal skew-symmetry on the affine datum:
    u_0 v = -v_0 u + T(v_1 u) and u_1 v = v_1 u (T kills constants)."""
    dim = algebra.lie.dim
    for a in range(dim):
        for b in range(dim):
            pa = affine_conformal_products(algebra, a, b)
            pb = affine_conformal_products(algebra, b, a)
            lhs0 = pa[0].lie
            rhs0 = {k: -v for k, v in pb[0].lie.items()}
            if lhs0 != rhs0:
                return False, ("u_0 v", a, b)
            if pa[1].central != pb[1].central:
                return False, ("u_1 v", a, b)
    return True, None
