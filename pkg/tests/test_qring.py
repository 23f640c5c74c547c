import random

import pytest

from qct.qring import (
    ONE,
    Q,
    ZERO,
    QFrac,
    QLaurent,
    eval_poly,
    frac_arith,
    interpolate,
    poly_gcd,
    qbinom,
    qpoch,
)


def L(text):
    return QLaurent.parse(text)


def F(text):
    return QFrac.parse(text)


# -- qpoch ---------------------------------------------------------------


def test_qpoch_empty_product():
    assert qpoch(1, 0) == ONE


def test_qpoch_vanishing_factor():
    assert qpoch(0, 1) == ZERO


def test_qpoch_length_two_expansion():
    # (1-q)(1-q^2) = 1 - q - q^2 + q^3, multiplied out by hand
    assert qpoch(1, 2) == L("1 - q - q^2 + q^3")


def test_qpoch_negative_length_rejected():
    with pytest.raises(ValueError, match="pochhammer length negative"):
        qpoch(1, -1)


def test_qpoch_splitting_property():
    # (q^m)_{z1+z2} = (q^m)_{z1} (q^{m+z1})_{z2}
    for m in range(-6, 7):
        for z1 in range(0, 7):
            for z2 in range(0, 7 - z1):
                assert qpoch(m, z1 + z2) == qpoch(m, z1) * qpoch(m + z1, z2)


# -- qbinom ---------------------------------------------------------------


def test_qbinom_base_cases():
    assert qbinom(5, 0) == ONE
    assert qbinom(0, 0) == ONE
    assert qbinom(2, 3) == ZERO


def test_qbinom_small_values():
    assert qbinom(2, 1) == L("1 + q")
    assert qbinom(4, 2) == L("1 + q + 2*q^2 + q^3 + q^4")


def test_qbinom_symmetry_and_positivity():
    for n in range(0, 11):
        for c in range(0, n + 1):
            b = qbinom(n, c)
            assert b == qbinom(n, n - c)
            assert all(v > 0 for v in b.terms.values())


def test_qbinom_pascal_recurrence():
    # [n c] = [n-1 c-1] + q^c [n-1 c]
    for n in range(1, 9):
        for c in range(1, n):
            assert qbinom(n, c) == qbinom(n - 1, c - 1) + qbinom(n - 1, c).shift(c)


# -- QLaurent ring basics --------------------------------------------------


def test_qlaurent_mul_zero_and_one():
    p = L("q^-3 + 1")
    assert p * ZERO == ZERO
    assert p * ONE == p
    assert (p - p) == ZERO


def test_qlaurent_divexact():
    a = qpoch(1, 4)
    b = qpoch(1, 2)
    assert a.divexact(b) == qpoch(3, 2)
    with pytest.raises(ValueError):
        (ONE + Q).divexact(L("1 - q"))


def test_qlaurent_text_roundtrip():
    rng = random.Random(7)
    for _ in range(200):
        terms = {}
        for _ in range(rng.randrange(0, 6)):
            terms[rng.randrange(-7, 8)] = rng.randrange(-9, 10)
        p = QLaurent(terms)
        assert QLaurent.parse(str(p)) == p
    assert str(L("-1 + 2*q^2 - q^5")) == "-1 + 2*q^2 - q^5"
    assert str(L("q^-3 + 1")) == "q^-3 + 1"


def test_poly_gcd_known_factor():
    a = qpoch(1, 3) * L("1 + q + q^2")
    b = qpoch(1, 2) * L("1 + q + q^2")
    g = poly_gcd(a, b)
    # common factor (1-q)(1-q^2)(1+q+q^2)
    expect = qpoch(1, 2) * L("1 + q + q^2")
    assert g == expect or g == -expect


# -- QFrac ------------------------------------------------------------------


def test_frac_mul_cancels():
    one_over = QFrac(ONE, L("1 - q"))
    assert frac_arith(one_over, QFrac(L("1 - q")), "mul") == QFrac(1)


def test_frac_additive_identity():
    x = QFrac(L("1 + q"), L("1 - q"))
    assert frac_arith(x, QFrac(0), "add") == x


def test_frac_gcd_normalization():
    x = QFrac(L("1 - q^2"), L("1 - q"))
    assert x == QFrac(L("1 + q"))
    assert x.is_polynomial()


def test_frac_normal_form_denominator():
    # denominator q-power and sign are pushed out
    x = QFrac(ONE, L("q^-1 - 1"))
    assert x.den == L("q - 1") or x.den == L("1 - q")
    assert x.den.leading_coefficient() > 0
    assert x.den.min_exp() == 0
    # normalization is idempotent
    y = QFrac(x.num, x.den)
    assert y == x


def test_frac_eq_cross_multiplied():
    a = QFrac(L("1 - q^2"), L("1 - q"))
    b = QFrac(L("1 + q"))
    assert frac_arith(a, b, "eq")
    assert not frac_arith(a, QFrac(1), "eq")


def test_frac_div_by_zero():
    with pytest.raises(ZeroDivisionError):
        frac_arith(QFrac(1), QFrac(0), "div")


def test_frac_str_roundtrip():
    rng = random.Random(11)
    for _ in range(100):
        num = QLaurent({rng.randrange(-4, 5): rng.randrange(-5, 6) for _ in range(3)})
        den = qpoch(1, rng.randrange(1, 4))
        x = QFrac(num, den)
        assert QFrac.parse(str(x)) == x


# -- interpolation ------------------------------------------------------------


def test_interpolate_constant():
    assert interpolate([(QFrac(1), QFrac(5))]) == [QFrac(5)]


def test_interpolate_identity():
    nodes = [(QFrac(1), QFrac(1)), (QFrac.q_power(1), QFrac.q_power(1))]
    assert interpolate(nodes) == [QFrac(0), QFrac(1)]


def test_interpolate_three_nodes():
    # hand-solved 3x3 system: through (1,2), (q,1+q), (q^2,1+q^2) the unique
    # quadratic is z + 1, i.e. coefficients [1, 1, 0]
    nodes = [
        (QFrac(1), QFrac(2)),
        (QFrac.q_power(1), F("1 + q")),
        (QFrac.q_power(2), F("1 + q^2")),
    ]
    assert interpolate(nodes) == [QFrac(1), QFrac(1), QFrac(0)]


def test_interpolate_quadratic_exact():
    # values of 1 + z^2 at 1, q, q^2 recover [1, 0, 1]
    xs = [QFrac(1), QFrac.q_power(1), QFrac.q_power(2)]
    nodes = [(x, QFrac(1) + x * x) for x in xs]
    assert interpolate(nodes) == [QFrac(1), QFrac(0), QFrac(1)]


def test_interpolate_duplicate_abscissa():
    with pytest.raises(ValueError, match="duplicate"):
        interpolate([(QFrac(1), QFrac(1)), (QFrac(1), QFrac(2))])


def test_interpolate_left_inverse_of_evaluation():
    rng = random.Random(3)
    for _ in range(10):
        coeffs = []
        for _ in range(6):
            num = QLaurent({rng.randrange(-3, 4): rng.randrange(-4, 5) for _ in range(2)})
            den = qpoch(1, rng.randrange(0, 3))
            if den.is_zero():
                den = ONE
            coeffs.append(QFrac(num, den))
        xs = [QFrac.q_power(e) for e in range(6)]
        nodes = [(x, eval_poly(coeffs, x)) for x in xs]
        assert interpolate(nodes) == coeffs
