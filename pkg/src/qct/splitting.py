"""Partial-fraction splitting of the decorated pair product.

The rational function S divides the pair product by a battery of y-linear
factors (1 - q^z y/x_l); S decomposes into simple terms A_{ij}/(1 - q^j y/x_i)
whose coefficients have closed product forms.  This module builds those
coefficients, verifies the decomposition exactly by clearing denominators,
hosts the five scalar Pochhammer transformations behind the closed forms, and
exposes the family of vanishing coefficients of the pair product.

All heavy identity checks run denominator-cleared: the scalar prefactors
1/((q^{-j})_j (q)_{c-j-1}) and friends are replaced by +-q^e / (plain
Pochhammer products), both sides are multiplied by a fixed common multiple,
and the comparison happens in integer polynomial arithmetic.
"""

from __future__ import annotations

from fractions import Fraction
from random import Random

from .laurent import FoldFactor, MLaurent, ct_fold, linear_factors
from .products import Shape, epsilon, pair_factors
from .qring import ONE, QFrac, QLaurent, qpoch


def split_k(shape: Shape) -> int:
    return shape.max_block()


def denominator_factors(shape: Shape, c: int, k: int | None = None) -> list[tuple[int, int]]:
    """(z, l) pairs for the y-linear factors (1 - q^z y/x_l) dividing the
    pair product: classes below k use z in 0..c-1, class k uses -1..c-1,
    classes above k use -1..c-2."""
    if shape.p < 1:
        raise ValueError("splitting needs at least one decorated block")
    if k is None:
        k = split_k(shape)
    out = []
    for t in range(shape.p + 1):
        if t < k:
            zs = range(0, c)
        elif t == k:
            zs = range(-1, c)
        else:
            zs = range(-1, c - 1)
        for l in shape.block(t):
            for z in zs:
                out.append((z, l))
    return out


def admissible_j(shape: Shape, c: int, i: int, k: int | None = None) -> range:
    if k is None:
        k = split_k(shape)
    t = shape.block_of(i)
    if t < k:
        return range(0, c)
    if t == k:
        return range(-1, c)
    return range(-1, c - 1)


def _pair_terms(shape: Shape, c: int, skip: int | None = None, arity: int | None = None) -> dict:
    """Expanded pair product as a dict of QLaurent coefficients."""
    n = shape.n
    arity = arity or n
    factors = []
    for u in range(1, n + 1):
        for v in range(u + 1, n + 1):
            if skip is not None and skip in (u, v):
                continue
            z = c + epsilon(shape, u, v)
            factors.extend(linear_factors(arity, u, v, 0, z))
            factors.extend(linear_factors(arity, v, u, 1, z))
    return ct_fold(arity, factors, None, None)


def pair_product(shape: Shape, c: int, skip: int | None = None, arity: int | None = None) -> MLaurent:
    arity = arity or shape.n
    terms = _pair_terms(shape, c, skip, arity)
    return MLaurent(arity, {e: QFrac.from_qlaurent(x) for e, x in terms.items()}, _trusted=True)


# table-driven assembly of the split coefficients ------------------------------------
#
# Each row: (range lo, range hi, q-exponent of the scalar prefactor,
# bold monomial tag (None, "l/i", "i/l"), [(poch base, poch length), ...]);
# ranges are inclusive in l and skip l = i automatically.


def _acoeff_rows(shape: Shape, c: int, i: int, j: int, k: int):
    sg = shape.sigma
    n = shape.n
    t = shape.block_of(i)
    if t == 0:
        # class 0: i in the undecorated block, j in 0..c-1
        return [
            (1, i - 1, c * (j + 1), None, [(-c, j + 1), (j + 1, c - j - 1)]),
            (i + 1, sg(k - 1), c * j, None, [(1 - c, j), (j + 1, c - j)]),
            (sg(k - 1) + 1, sg(k), (c + 1) * j + 1, "l/i", [(1 - c, j), (j + 2, c - j - 1)]),
            (sg(k) + 1, n, c * (j + 1), None, [(1 - c, j + 1), (j + 2, c - j - 1)]),
        ]
    if t < k:
        return [
            (1, sg(t - 1), c * (j + 1), None, [(-c, j + 1), (j + 1, c - j - 1)]),
            (sg(t - 1) + 1, i - 1, c * (j + 2) + 1, "i/l", [(-c - 1, j + 2), (j + 1, c - j)]),
            (i + 1, sg(t), c * (j + 1), "i/l", [(-c, j + 1), (j + 1, c + 1 - j)]),
            (sg(t) + 1, sg(k - 1), c * j, None, [(1 - c, j), (j + 1, c - j)]),
            (sg(k - 1) + 1, sg(k), (c + 1) * j + 1, "l/i", [(1 - c, j), (j + 2, c - j - 1)]),
            (sg(k) + 1, n, c * (j + 1), None, [(1 - c, j + 1), (j + 2, c - j - 1)]),
        ]
    if t == k:
        return [
            (1, sg(k - 1), c * (j + 1), None, [(-c, j + 1), (j + 1, c - j - 1)]),
            (sg(k - 1) + 1, i - 1, (c + 1) * (j + 2), None, [(-c - 1, j + 2), (j + 2, c - j - 1)]),
            (i + 1, sg(k), (c + 1) * (j + 1), None, [(-c, j + 1), (j + 2, c - j)]),
            (sg(k) + 1, n, c * (j + 1), None, [(1 - c, j + 1), (j + 2, c - j - 1)]),
        ]
    # class t > k
    return [
        (1, sg(k - 1), c * (j + 1), None, [(-c, j + 1), (j + 1, c - j - 1)]),
        (sg(k - 1) + 1, sg(k), (c + 1) * (j + 1), "l/i", [(-c, j + 1), (j + 2, c - j - 2)]),
        (sg(k) + 1, sg(t - 1), c * (j + 2), None, [(-c, j + 2), (j + 2, c - j - 2)]),
        (sg(t - 1) + 1, i - 1, c * (j + 3) + 1, "i/l", [(-c - 1, j + 3), (j + 2, c - j - 1)]),
        (i + 1, sg(t), c * (j + 2), "i/l", [(-c, j + 2), (j + 2, c - j)]),
        (sg(t) + 1, n, c * (j + 1), None, [(1 - c, j + 1), (j + 2, c - j - 1)]),
    ]


def _acoeff_scalar_parts(shape: Shape, c: int, i: int, j: int, k: int):
    """(sign, q-shift, plain denominator) of the scalar prefactor, using
    (q^{-j})_j = (-1)^j q^{-j(j+1)/2} (q)_j to keep the denominator positive."""
    t = shape.block_of(i)
    if t < k:
        sign = -1 if j % 2 else 1
        shift = j * (j + 1) // 2
        den = qpoch(1, j) * qpoch(1, c - j - 1)
    elif t == k:
        sign = -1 if (j + 1) % 2 else 1
        shift = (j + 1) * (j + 2) // 2
        den = qpoch(1, j + 1) * qpoch(1, c - j - 1)
    else:
        sign = -1 if (j + 1) % 2 else 1
        shift = (j + 1) * (j + 2) // 2
        den = qpoch(1, j + 1) * qpoch(1, c - j - 2)
    return sign, shift, den


class ACoeff:
    """One splitting coefficient in cleared form: sign * q^qexp * P / den,
    with P an integer-coefficient Laurent polynomial in the x's."""

    __slots__ = ("shape", "c", "i", "j", "k", "t", "sign", "qexp", "den", "P")

    def __init__(self, shape: Shape, c: int, i: int, j: int, k: int):
        if j not in admissible_j(shape, c, i, k):
            raise ValueError(f"j={j} out of range for variable {i}")
        self.shape, self.c, self.i, self.j, self.k = shape, c, i, j, k
        self.t = shape.block_of(i)
        n = shape.n
        factors: list[FoldFactor] = []
        mono = [0] * n
        qexp = 0
        sign = 1
        for lo, hi, e, bold, pochs in _acoeff_rows(shape, c, i, j, k):
            for l in range(lo, hi + 1):
                if l == i:
                    continue
                qexp += e
                if bold == "l/i":
                    sign = -sign
                    mono[l - 1] += 1
                    mono[i - 1] -= 1
                elif bold == "i/l":
                    sign = -sign
                    mono[i - 1] += 1
                    mono[l - 1] -= 1
                for base, length in pochs:
                    factors.extend(linear_factors(n, l, i, base, length))
        for u in range(1, n + 1):
            if u == i:
                continue
            for v in range(u + 1, n + 1):
                if v == i:
                    continue
                z = c + epsilon(shape, u, v)
                factors.extend(linear_factors(n, u, v, 0, z))
                factors.extend(linear_factors(n, v, u, 1, z))
        if any(mono):
            factors = [FoldFactor.monomial(n, tuple(mono))] + factors
        s2, sh2, den = _acoeff_scalar_parts(shape, c, i, j, k)
        self.sign = sign * s2
        self.qexp = qexp + sh2
        self.den = den
        self.P = ct_fold(n, factors, None, None)

    def scalar(self) -> QFrac:
        return QFrac(QLaurent.q_power(self.qexp, self.sign), self.den)

    def to_mlaurent(self) -> MLaurent:
        s = self.scalar()
        out = {}
        for e, p in self.P.items():
            v = QFrac.from_qlaurent(p) * s
            if not v.is_zero():
                out[e] = v
        return MLaurent(self.shape.n, out, _trusted=True)

    def ct(self) -> QFrac:
        zero = (0,) * self.shape.n
        p = self.P.get(zero)
        if p is None:
            return QFrac(0)
        return QFrac.from_qlaurent(p) * self.scalar()

    def x_degree(self) -> int:
        """Largest exponent of x_i across the terms."""
        return max(e[self.i - 1] for e in self.P)

    def cleared_terms(self, multiple: QLaurent) -> dict:
        """P scaled by sign * q^qexp * (multiple / den); division is exact."""
        factor = multiple.divexact(self.den).shift(self.qexp).scale(self.sign)
        return {e: p * factor for e, p in self.P.items()}


def a_coeff_factors(shape: Shape, c: int, i: int, j: int, k: int | None = None):
    """(scalar, monomial exponent vector, fold factors) for one coefficient;
    the exact-evaluation route used by the randomized checks."""
    if k is None:
        k = split_k(shape)
    if j not in admissible_j(shape, c, i, k):
        raise ValueError(f"j={j} out of range for variable {i}")
    n = shape.n
    factors: list[FoldFactor] = []
    mono = [0] * n
    qexp = 0
    sign = 1
    for lo, hi, e, bold, pochs in _acoeff_rows(shape, c, i, j, k):
        for l in range(lo, hi + 1):
            if l == i:
                continue
            qexp += e
            if bold == "l/i":
                sign = -sign
                mono[l - 1] += 1
                mono[i - 1] -= 1
            elif bold == "i/l":
                sign = -sign
                mono[i - 1] += 1
                mono[l - 1] -= 1
            for base, length in pochs:
                factors.extend(linear_factors(n, l, i, base, length))
    for u in range(1, n + 1):
        if u == i:
            continue
        for v in range(u + 1, n + 1):
            if v == i:
                continue
            z = c + epsilon(shape, u, v)
            factors.extend(linear_factors(n, u, v, 0, z))
            factors.extend(linear_factors(n, v, u, 1, z))
    s2, sh2, den = _acoeff_scalar_parts(shape, c, i, j, k)
    scalar = QFrac(QLaurent.q_power(qexp + sh2, sign * s2), den)
    return scalar, tuple(mono), factors


def a_coeff(shape: Shape, c: int, i: int, j: int, k: int | None = None) -> MLaurent:
    """The closed-form splitting coefficient, fully expanded over QFrac."""
    if k is None:
        k = split_k(shape)
    return ACoeff(shape, c, i, j, k).to_mlaurent()


def _common_multiple(c: int) -> QLaurent:
    """A fixed multiple of every scalar denominator at this c."""
    return qpoch(1, c) * qpoch(1, c)


def residue_identity_holds(shape: Shape, c: int, i: int, j: int, k: int | None = None) -> bool:
    """Oracle: A_{ij} * prod_{(z,l) != (j,i)} (1 - q^{z-j} x_i/x_l) equals the
    full pair product (the residue of S at y = q^{-j} x_i, cleared).

    Compared denominator-cleared: both sides are multiplied by A's plain
    denominator, so the check runs in integer polynomial arithmetic.
    """
    if k is None:
        k = split_k(shape)
    n = shape.n
    A = ACoeff(shape, c, i, j, k)
    factors = [FoldFactor(n, [(e, A.qexp, p.scale(A.sign)) for e, p in A.P.items()])]
    scalar = ONE
    for z, l in denominator_factors(shape, c, k):
        if (z, l) == (j, i):
            continue
        if l == i:
            # same-variable factor collapses to the scalar 1 - q^{z-j}
            scalar = scalar * qpoch(z - j, 1)
        else:
            factors.append(FoldFactor.linear(n, i, l, z - j))
    if not scalar.is_one():
        factors.append(FoldFactor(n, [(None, 0, scalar)]))
    lhs = ct_fold(n, factors, None, None)
    rhs = {e: p * A.den for e, p in _pair_terms(shape, c).items()}
    return lhs == rhs


class SplitDecomposition:
    """All coefficients of the splitting at one (shape, c), with the
    denominator factor list and per-class degree bookkeeping."""

    __slots__ = ("shape", "c", "k", "coeffs", "denominator")

    def __init__(self, shape: Shape, c: int, k: int | None = None):
        self.shape = shape
        self.c = c
        self.k = split_k(shape) if k is None else k
        self.denominator = denominator_factors(shape, c, self.k)
        self.coeffs = []
        for i in range(1, shape.n + 1):
            for j in admissible_j(shape, c, i, self.k):
                self.coeffs.append(ACoeff(shape, c, i, j, self.k))

    def terms(self):
        """(i, j, class, expanded MLaurent) per coefficient."""
        return [(a.i, a.j, a.t, a.to_mlaurent()) for a in self.coeffs]

    def degree_bounds_ok(self) -> bool:
        """Class 0 coefficients live in x_i-degree <= -n_k, side classes in
        <= -(n_k - n_t + 1), class k in <= 0."""
        nk = self.shape.parts[self.k]
        for a in self.coeffs:
            if not a.P:
                continue
            if a.t == 0:
                bound = -nk
            elif a.t == self.k:
                bound = 0
            else:
                bound = -(nk - self.shape.parts[a.t] + 1)
            if a.x_degree() > bound:
                return False
        return True

    def class_k_ct_sum(self) -> QFrac:
        total = QFrac(0)
        for a in self.coeffs:
            if a.t == self.k:
                total = total + a.ct()
        return total

    def offclass_cts_vanish(self) -> bool:
        return all(a.ct().is_zero() for a in self.coeffs if a.t != self.k)


def build_S(shape: Shape, c: int, k: int | None = None):
    """(numerator, denominator factor list) of the splitting target."""
    return pair_product(shape, c), denominator_factors(shape, c, k)


def verify_split(shape: Shape, c: int, randomized: bool = False, seed: int = 0) -> dict:
    """Check the splitting formula with denominators cleared.

    Exact mode compares, as polynomials in (x, y) over Z[q],
        L * Num = sum_{(i,j)} (L * A_{ij}) * prod_{(z,l) != (j,i)} (1 - q^z y/x_l)
    with L a fixed common multiple of the scalar denominators.  Randomized
    mode evaluates the same cleared identity at seeded rational points
    instead of expanding; reports always flag the mode.
    """
    k = split_k(shape)
    dens = denominator_factors(shape, c, k)
    report = {
        "shape": shape.parts,
        "c": c,
        "k": k,
        "terms": 0,
        "mode": "randomized-substitution" if randomized else "exact",
        "ok": None,
        "witness": None,
    }
    if randomized:
        return _verify_split_randomized(shape, c, k, dens, report, seed)
    n = shape.n
    ym = n + 1  # y lives in the extra slot
    L = _common_multiple(c)
    total: dict = {}
    for i in range(1, n + 1):
        for j in admissible_j(shape, c, i, k):
            report["terms"] += 1
            A = ACoeff(shape, c, i, j, k)
            cleared = A.cleared_terms(L)
            factors = [FoldFactor(n + 1, [(e + (0,), 0, p) for e, p in cleared.items()])]
            for z, l in dens:
                if (z, l) == (j, i):
                    continue
                factors.append(FoldFactor.linear(n + 1, ym, l, z))
            piece = ct_fold(n + 1, factors, None, None)
            for e, p in piece.items():
                cur = total.get(e)
                s = p if cur is None else cur + p
                if s.is_zero():
                    total.pop(e, None)
                else:
                    total[e] = s
    rhs = {e: p * L for e, p in _pair_terms(shape, c, arity=n + 1).items()}
    diff_keys = set(total) | set(rhs)
    for e in sorted(diff_keys):
        if total.get(e, QLaurent()) != rhs.get(e, QLaurent()):
            report["ok"] = False
            report["witness"] = {"monomial": e}
            return report
    report["ok"] = True
    return report


def _verify_split_randomized(shape, c, k, dens, report, seed):
    rng = Random(seed)
    n = shape.n
    for attempt in range(5):
        qv = Fraction(rng.randrange(2, 40), rng.randrange(41, 97))
        xs = [Fraction(rng.randrange(1, 60), rng.randrange(61, 121)) for _ in range(n)]
        yv = Fraction(rng.randrange(1, 60), rng.randrange(61, 121))
        report["terms"] = 0
        try:
            num_val = _eval_pairs(shape, c, xs, qv)
            total = Fraction(0)
            for i in range(1, n + 1):
                for j in admissible_j(shape, c, i, k):
                    report["terms"] += 1
                    scalar, mono, factors = a_coeff_factors(shape, c, i, j, k)
                    val = scalar.eval_fraction(qv)
                    for pos, e in enumerate(mono):
                        val *= xs[pos] ** e
                    for f in factors:
                        val *= _eval_factor(f, xs, qv)
                    for z, l in dens:
                        if (z, l) == (j, i):
                            continue
                        val *= 1 - qv ** z * yv / xs[l - 1]
                    total += val
            report["ok"] = total == num_val
            if not report["ok"]:
                report["witness"] = {"q": str(qv), "difference": str(total - num_val)}
            return report
        except ZeroDivisionError:
            continue
    report["ok"] = False
    report["witness"] = {"error": "could not find a pole-free sample point"}
    return report


def _eval_pairs(shape, c, xs, qv):
    total = Fraction(1)
    n = shape.n
    for u in range(1, n + 1):
        for v in range(u + 1, n + 1):
            z = c + epsilon(shape, u, v)
            for m in range(z):
                total *= 1 - qv ** m * xs[u - 1] / xs[v - 1]
                total *= 1 - qv ** (m + 1) * xs[v - 1] / xs[u - 1]
    return total


def _eval_factor(f: FoldFactor, xs, qv):
    total = Fraction(0)
    for delta, qexp, coeff in f.terms:
        val = coeff.eval_fraction(qv) * qv ** qexp
        if delta is not None:
            for pos, e in enumerate(delta):
                if e:
                    val *= xs[pos] ** e
        total += val
    return total


# -- the five scalar Pochhammer transformations ---------------------------------------


def _poch_y(base: int, length: int, inverse: bool):
    """(q^base y)_length or (q^base / y)_length as arity-1 linear factors."""
    if inverse:
        return linear_factors(1, None, 1, base, length)
    return linear_factors(1, 1, None, base, length)


def _expand1(factors, extra_mono=None):
    fold = list(factors)
    if extra_mono is not None:
        fold = [FoldFactor.monomial(1, (extra_mono[0],), extra_mono[1], extra_mono[2])] + fold
    if not fold:
        return {(0,): ONE}
    return ct_fold(1, fold, None, None)


def _poch_identity_case(ident: str, i: int, j: int, t: int) -> bool:
    """Cleared form: LHS numerator == RHS * LHS denominator, in one variable y."""
    if ident == "b1":
        lhs = _poch_y(0, i, True) + _poch_y(1, j, False)
        rhs = _poch_y(1 - i, t, False) + _poch_y(t + 1, j - t, False)
        rmono = (0, i * t, 1)
        den = _poch_y(-t, i, True)
    elif ident == "b2":
        lhs = _poch_y(0, j, False) + _poch_y(1, i, True)
        rhs = _poch_y(-i, t + 1, False) + _poch_y(t + 1, j - t - 1, False)
        rmono = (0, i * (t + 1), 1)
        den = _poch_y(-t, i, True)
    elif ident == "c":
        lhs = _poch_y(0, j, False) + _poch_y(1, i, True)
        rhs = _poch_y(-i, t, False) + _poch_y(t + 1, j - t - 1, False)
        rmono = (1, (i + 1) * t, -1)
        den = _poch_y(-t, i + 1, True)
    elif ident == "d":
        lhs = _poch_y(0, i + 1, True) + _poch_y(1, j + 1, False)
        rhs = _poch_y(-i, t + 1, False) + _poch_y(t + 1, j + 1 - t, False)
        rmono = (-1, i * (t + 1), -1)
        den = _poch_y(-t, i, True)
    elif ident == "e":
        lhs = _poch_y(0, j + 1, False) + _poch_y(1, i + 1, True)
        rhs = _poch_y(-i - 1, t + 2, False) + _poch_y(t + 1, j - t, False)
        rmono = (-1, i * (t + 2) + 1, -1)
        den = _poch_y(-t, i, True)
    else:
        raise ValueError(ident)
    left = _expand1(lhs)
    right = _expand1(rhs + den, extra_mono=rmono)
    return left == right


_T_RANGES = {
    "b1": lambda i, j: range(0, j + 1),
    "b2": lambda i, j: range(-1, j),
    "c": lambda i, j: range(0, j) if j >= 1 else range(0, 0),
    "e": lambda i, j: range(-2, j + 1),
    "d": lambda i, j: range(-1, j + 2),
}


def poch_identities(imax: int, jmax: int) -> dict:
    """All five ratio transformations over 0 <= i <= imax, 0 <= j <= jmax and
    every admissible t; reports the first failing triple."""
    report = {"checked": 0, "ok": True, "witness": None}
    for ident in ("b1", "b2", "c", "d", "e"):
        for i in range(imax + 1):
            for j in range(jmax + 1):
                for t in _T_RANGES[ident](i, j):
                    report["checked"] += 1
                    if not _poch_identity_case(ident, i, j, t):
                        report["ok"] = False
                        report["witness"] = (ident, i, j, t)
                        return report
    return report


# -- vanishing coefficients ---------------------------------------------------------------


def vanishing_check(shape: Shape, h, t, c: int) -> QFrac:
    """Coefficient of the pair product that the splitting forces to zero.

    ``h`` lists one integer per decorated block, ``t`` one nonnegative integer
    per variable; preconditions: 2 <= n_0 <= n-1, sum h_u <= n_0 - 1 and
    sum t_l = sum h_u n_u - n_0.  Returns the coefficient (expected 0).
    """
    h = list(h)
    t = list(t)
    n, p = shape.n, shape.p
    n0 = shape.parts[0]
    if len(h) != p:
        raise ValueError("h needs one entry per decorated block")
    if len(t) != n:
        raise ValueError("t needs one entry per variable")
    if not 2 <= n0 <= n - 1:
        raise ValueError("need 2 <= n_0 <= n-1")
    if sum(h) > n0 - 1:
        raise ValueError("sum of h exceeds n_0 - 1")
    if any(x < 0 for x in t):
        raise ValueError("t entries must be nonnegative")
    if sum(t) != sum(h[u] * shape.parts[u + 1] for u in range(p)) - n0:
        raise ValueError("t does not balance the monomial degree")
    mono = [0] * n
    for v in range(1, n0 + 1):
        mono[v - 1] += 1
    for u in range(1, p + 1):
        for v in shape.block(u):
            mono[v - 1] -= h[u - 1]
    for l in range(n):
        mono[l] += t[l]
    factors = [FoldFactor.monomial(n, tuple(mono))] + pair_factors(shape, c)
    zero = (0,) * n
    res = ct_fold(n, factors, zero, zero)
    return QFrac.from_qlaurent(res.get(zero, QLaurent()))
