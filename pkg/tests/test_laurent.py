import random

import pytest

from qct.laurent import (
    FoldFactor,
    MLaurent,
    coeff_at,
    ct,
    ct_fold,
    linear_factors,
    poch_factor,
    poly_arith,
    subst_shift,
)
from qct.qring import QFrac, QLaurent


def M(text, arity):
    return MLaurent.parse(text, arity)


def test_mul_by_one_and_inverse_monomials():
    a = M("(1 + q) * x1*x2^-1", 2)
    one = MLaurent.constant(2, 1)
    assert poly_arith(a, one, "mul") == a
    m1 = MLaurent.monomial(2, (1, -1))
    m2 = MLaurent.monomial(2, (-1, 1))
    assert m1 * m2 == one


def test_hand_expansion():
    # (1 - x1/x2)(1 - q x2/x1) = 1 + q - x1/x2 - q x2/x1
    f1 = poch_factor(2, 1, 2, 0, 1)
    f2 = poch_factor(2, 2, 1, 1, 1)
    prod = f1 * f2
    want = MLaurent(2, {
        (0, 0): QFrac.from_qlaurent(QLaurent.parse("1 + q")),
        (1, -1): QFrac(-1),
        (-1, 1): QFrac.q_power(1, -1),
    })
    assert prod == want


def test_arity_mismatch_rejected():
    with pytest.raises(ValueError):
        MLaurent.constant(2, 1) + MLaurent.constant(3, 1)


def test_poch_factor_cases():
    assert poch_factor(2, 1, 2, 5, 0) == MLaurent.constant(2, 1)
    assert poch_factor(2, 1, 2, 0, 1) == M("1 + (-1) * x1*x2^-1", 2)
    # (1 - q x1/x2)(1 - q^2 x1/x2) = 1 - (q + q^2) x1/x2 + q^3 (x1/x2)^2
    got = poch_factor(2, 1, 2, 1, 2)
    want = MLaurent(2, {
        (0, 0): QFrac(1),
        (1, -1): QFrac.from_qlaurent(QLaurent.parse("-q - q^2")),
        (2, -2): QFrac.q_power(3),
    })
    assert got == want
    # one-sided ratios: (q x1)_1 and (1/x1)_1
    assert poch_factor(1, 1, None, 1, 1) == M("1 + (-q) * x1", 1)
    assert poch_factor(1, None, 1, 0, 1) == M("1 + (-1) * x1^-1", 1)
    with pytest.raises(ValueError):
        poch_factor(2, 1, 1, 0, 1)


def test_ct_examples():
    f = poch_factor(2, 1, 2, 0, 1) * poch_factor(2, 2, 1, 1, 1)
    assert ct(f, {1, 2}) == MLaurent.constant(2, QLaurent.parse("1 + q"))
    c = MLaurent.constant(3, 7)
    assert ct(c, {1, 2, 3}) == c
    assert ct(MLaurent.monomial(2, (1, -1)), {1}).is_zero()


def test_coeff_at_examples():
    f = M("1 + q * x1", 1)
    assert coeff_at(f, (1,)) == QFrac.q_power(1)
    assert coeff_at(MLaurent(2), (0, 0)) == QFrac(0)
    g = poch_factor(2, 1, 2, 0, 1) * poch_factor(2, 2, 1, 1, 1)
    assert coeff_at(g, (-1, 1)) == QFrac.q_power(1, -1)


def test_subst_shift_examples():
    f = MLaurent.monomial(2, (1, -1))
    assert subst_shift(f, (1, 2), (1, 1)) == MLaurent.constant(2, 1)
    g = MLaurent.monomial(3, (1, 0, 0))
    assert subst_shift(g, (1, 3), (2, 5)) == MLaurent.monomial(3, (0, 0, 1), QFrac.q_power(3))
    # s = 1 with an x_0 slot: x_0 -> q^{k_1} x_{u_1}
    h = MLaurent.monomial(3, (1, 0, 0))  # x_0 when x0=True
    assert subst_shift(h, (2,), (4,), x0=True) == MLaurent.monomial(3, (0, 0, 1), QFrac.q_power(4))
    with pytest.raises(ValueError):
        subst_shift(f, (2, 1), (0, 0))


def _random_mlaurent(rng, arity, nterms, span=2):
    terms = {}
    for _ in range(nterms):
        e = tuple(rng.randrange(-span, span + 1) for _ in range(arity))
        terms[e] = QFrac.from_qlaurent(QLaurent({rng.randrange(-2, 3): rng.randrange(-3, 4)}))
    return MLaurent(arity, terms)


def test_ct_commutes_and_is_linear():
    rng = random.Random(17)
    for _ in range(25):
        n = rng.randrange(2, 5)
        f = _random_mlaurent(rng, n, 6)
        g = _random_mlaurent(rng, n, 5)
        i = rng.randrange(1, n + 1)
        j = rng.randrange(1, n + 1)
        assert ct(ct(f, {i}), {j}) == ct(ct(f, {j}), {i})
        V = {i, j}
        assert ct(f + g, V) == ct(f, V) + ct(g, V)


def test_subst_shift_multiplicative():
    rng = random.Random(23)
    for _ in range(25):
        n = rng.randrange(2, 5)
        f = _random_mlaurent(rng, n, 4)
        g = _random_mlaurent(rng, n, 4)
        s = rng.randrange(1, n + 1)
        u = tuple(sorted(rng.sample(range(1, n + 1), s)))
        k = tuple(rng.randrange(0, 4) for _ in range(s))
        assert subst_shift(f * g, u, k) == subst_shift(f, u, k) * subst_shift(g, u, k)


def test_text_roundtrip():
    rng = random.Random(5)
    for _ in range(50):
        n = rng.randrange(1, 4)
        f = _random_mlaurent(rng, n, rng.randrange(0, 5))
        assert MLaurent.parse(str(f), n) == f


def test_fold_kernels_agree():
    rng = random.Random(31)
    for _ in range(10):
        n = rng.randrange(2, 4)
        factors = []
        for _ in range(rng.randrange(2, 7)):
            i = rng.randrange(1, n + 1)
            j = rng.randrange(1, n + 1)
            if i == j:
                j = None
            factors.append(FoldFactor.linear(n, i, j, rng.randrange(-2, 3)))
        full_p = ct_fold(n, factors, None, None, kernel="packed")
        full_d = ct_fold(n, factors, None, None, kernel="dict")
        assert full_p == full_d
        zero = (0,) * n
        assert ct_fold(n, factors, zero, zero, kernel="packed") == \
            ct_fold(n, factors, zero, zero, kernel="dict")


def test_fold_kernels_agree_with_general_factors():
    # mix monomial prefactors and multi-term general factors with the linear
    # battery; both kernels must produce identical exact results
    from qct.products import kadell_h, qdyson_factors

    n = 2
    h = kadell_h(2, (2, 1))
    factors = [
        FoldFactor.monomial(n, (-1, -1), 0, 1),
        FoldFactor.general(n, h),
    ] + qdyson_factors((2, 1))
    zero = (0,) * n
    assert ct_fold(n, factors, zero, zero, kernel="packed") == \
        ct_fold(n, factors, zero, zero, kernel="dict")
    assert ct_fold(n, factors, None, None, kernel="packed") == \
        ct_fold(n, factors, None, None, kernel="dict")


def test_fold_window_matches_full_expansion():
    # windowed folds agree with filtering the full expansion
    n = 3
    factors = []
    factors.extend(linear_factors(n, 1, 2, 0, 2))
    factors.extend(linear_factors(n, 2, 1, 1, 2))
    factors.extend(linear_factors(n, 3, 1, 1, 1))
    full = ct_fold(n, factors, None, None)
    lo, hi = (-1, -1, 0), (1, 1, 1)
    windowed = ct_fold(n, factors, lo, hi)
    expect = {e: c for e, c in full.items()
              if all(lo[v] <= e[v] <= hi[v] for v in range(n))}
    assert windowed == expect
