"""Exact arithmetic in the deformation parameter q.

Two types live here: ``QLaurent``, a Laurent polynomial in q with integer
coefficients (sparse dict of exponent -> coefficient), and ``QFrac``, a
reduced fraction of two QLaurent values.  Everything downstream (multivariate
products, closed forms, interpolation) is built on these.

Values are immutable; all operations return fresh objects.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd as int_gcd


class QLaurent:
    """Laurent polynomial in q over the integers.

    ``terms`` maps exponent (may be negative) to a nonzero integer
    coefficient.  The zero polynomial has an empty term dict.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None, _trusted=False):
        if terms is None:
            self.terms = {}
        elif _trusted:
            self.terms = terms
        else:
            clean = {}
            for e, c in dict(terms).items():
                if not isinstance(e, int) or not isinstance(c, int):
                    raise TypeError("QLaurent terms must map int exponents to int coefficients")
                if c:
                    clean[e] = c
            self.terms = clean

    # -- constructors ------------------------------------------------------

    @staticmethod
    def from_int(n: int) -> "QLaurent":
        return QLaurent({0: n} if n else {}, _trusted=True)

    @staticmethod
    def q_power(e: int, coeff: int = 1) -> "QLaurent":
        """The monomial coeff * q^e."""
        return QLaurent({e: coeff} if coeff else {}, _trusted=True)

    # -- predicates and views ----------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_one(self) -> bool:
        return self.terms == {0: 1}

    def min_exp(self) -> int:
        if not self.terms:
            raise ValueError("zero polynomial has no exponents")
        return min(self.terms)

    def max_exp(self) -> int:
        if not self.terms:
            raise ValueError("zero polynomial has no exponents")
        return max(self.terms)

    def coefficient(self, e: int) -> int:
        return self.terms.get(e, 0)

    def content(self) -> int:
        """gcd of the coefficients (0 for the zero polynomial)."""
        g = 0
        for c in self.terms.values():
            g = int_gcd(g, abs(c))
            if g == 1:
                return 1
        return g

    def leading_coefficient(self) -> int:
        return self.terms[self.max_exp()] if self.terms else 0

    def l1_norm(self) -> int:
        return sum(abs(c) for c in self.terms.values())

    # -- ring operations ----------------------------------------------------

    def __add__(self, other: "QLaurent") -> "QLaurent":
        if not self.terms:
            return other
        if not other.terms:
            return self
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return QLaurent(out, _trusted=True)

    def __sub__(self, other: "QLaurent") -> "QLaurent":
        return self + (-other)

    def __neg__(self) -> "QLaurent":
        return QLaurent({e: -c for e, c in self.terms.items()}, _trusted=True)

    def __mul__(self, other: "QLaurent") -> "QLaurent":
        if not self.terms or not other.terms:
            return ZERO
        a, b = self.terms, other.terms
        if len(a) > len(b):
            a, b = b, a
        out = {}
        for ea, ca in a.items():
            for eb, cb in b.items():
                e = ea + eb
                s = out.get(e, 0) + ca * cb
                if s:
                    out[e] = s
                else:
                    del out[e]
        return QLaurent(out, _trusted=True)

    def __pow__(self, n: int) -> "QLaurent":
        if n < 0:
            raise ValueError("negative power of a QLaurent; use QFrac")
        result = ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def shift(self, e: int) -> "QLaurent":
        """Multiply by q^e."""
        if e == 0 or not self.terms:
            return self
        return QLaurent({k + e: v for k, v in self.terms.items()}, _trusted=True)

    def scale(self, n: int) -> "QLaurent":
        if n == 0:
            return ZERO
        if n == 1:
            return self
        return QLaurent({e: c * n for e, c in self.terms.items()}, _trusted=True)

    def divexact(self, other: "QLaurent") -> "QLaurent":
        """Divide exactly, raising ValueError if a remainder is left."""
        if other.is_zero():
            raise ZeroDivisionError("division by zero QLaurent")
        if self.is_zero():
            return ZERO
        sh_a, sh_b = self.min_exp(), other.min_exp()
        num = _to_list(self.shift(-sh_a))
        den = _to_list(other.shift(-sh_b))
        quo, rem = _list_divmod(num, den)
        if quo is None or any(rem):
            raise ValueError("inexact QLaurent division")
        return _from_list(quo).shift(sh_a - sh_b)

    def eval_fraction(self, qval: Fraction) -> Fraction:
        """Evaluate at an exact rational q (used by randomized identity checks)."""
        total = Fraction(0)
        for e, c in self.terms.items():
            total += c * qval ** e
        return total

    # -- comparison / hashing ------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            return self.terms == ({0: other} if other else {})
        if not isinstance(other, QLaurent):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    # -- text form -----------------------------------------------------------

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms):
            c = self.terms[e]
            mag = abs(c)
            if e == 0:
                body = str(mag)
            else:
                qpart = "q" if e == 1 else f"q^{e}"
                body = qpart if mag == 1 else f"{mag}*{qpart}"
            if not parts:
                parts.append(body if c > 0 else "-" + body)
            else:
                parts.append(("+ " if c > 0 else "- ") + body)
        return " ".join(parts)

    def __repr__(self) -> str:
        return f"QLaurent({self})"

    @staticmethod
    def parse(text: str) -> "QLaurent":
        """Parse the canonical text form (inverse of str)."""
        s = text.replace(" ", "")
        if not s:
            raise ValueError("empty QLaurent literal")
        if s == "0":
            return ZERO
        terms: dict[int, int] = {}
        i = 0
        n = len(s)
        while i < n:
            sign = 1
            while i < n and s[i] in "+-":
                if s[i] == "-":
                    sign = -sign
                i += 1
            j = i
            while j < n and s[j] not in "+-":
                # a '-' directly after '^' is part of the exponent
                if s[j] == "^" and j + 1 < n and s[j + 1] == "-":
                    j += 2
                    continue
                j += 1
            token = s[i:j]
            if not token:
                raise ValueError(f"bad QLaurent literal: {text!r}")
            coeff, exp = _parse_term(token)
            c = terms.get(exp, 0) + sign * coeff
            if c:
                terms[exp] = c
            else:
                terms.pop(exp, None)
            i = j
        return QLaurent(terms, _trusted=True)


def _parse_term(token: str) -> tuple[int, int]:
    if "q" not in token:
        return int(token), 0
    head, _, tail = token.partition("q")
    if head in ("", "*"):
        coeff = 1
    else:
        coeff = int(head.rstrip("*"))
    if not tail:
        exp = 1
    elif tail.startswith("^"):
        exp = int(tail[1:])
    else:
        raise ValueError(f"bad QLaurent term: {token!r}")
    return coeff, exp


ZERO = QLaurent()
ONE = QLaurent.from_int(1)
Q = QLaurent.q_power(1)


# -- dense helpers for division and gcd (plain polynomials, min exponent 0) --

def _to_list(p: QLaurent) -> list[int]:
    out = [0] * (p.max_exp() + 1)
    for e, c in p.terms.items():
        out[e] = c
    return out


def _from_list(coeffs: list[int]) -> QLaurent:
    return QLaurent({e: c for e, c in enumerate(coeffs) if c}, _trusted=True)


def _list_divmod(num: list[int], den: list[int]):
    """Long division over the rationals, exact results only.

    Returns (quotient, remainder) as int lists, or (None, num) if a
    non-integer or non-exact step appears while dividing.
    """
    num = list(num)
    dn = len(den) - 1
    lead = den[dn]
    if len(num) - 1 < dn:
        return ([0], num)
    quo = [0] * (len(num) - dn)
    for k in range(len(num) - 1 - dn, -1, -1):
        c = num[k + dn]
        if c % lead:
            return (None, num)
        f = c // lead
        quo[k] = f
        if f:
            for t, d in enumerate(den):
                num[k + t] -= f * d
    return (quo, num)


def _primitive(coeffs: list[int]) -> list[int]:
    g = 0
    for c in coeffs:
        g = int_gcd(g, abs(c))
        if g == 1:
            return list(coeffs)
    return [c // g for c in coeffs] if g else list(coeffs)


def _strip(coeffs: list[int]) -> list[int]:
    k = len(coeffs)
    while k > 0 and coeffs[k - 1] == 0:
        k -= 1
    return coeffs[:k]


def poly_gcd(a: QLaurent, b: QLaurent) -> QLaurent:
    """gcd over the integers: content part times the primitive-part gcd.

    Both inputs must have nonnegative exponents.  The result is normalized
    to a positive leading coefficient.
    """
    if a.is_zero():
        g = b
    elif b.is_zero():
        g = a
    else:
        ca, cb = a.content(), b.content()
        content = int_gcd(ca, cb)
        fa = _primitive(_strip(_to_list(a)))
        fb = _primitive(_strip(_to_list(b)))
        if len(fa) < len(fb):
            fa, fb = fb, fa
        # primitive pseudo-remainder sequence
        while fb:
            dn = len(fb) - 1
            lead = fb[-1]
            r = _strip(fa)
            while r and len(r) - 1 >= dn:
                top = r[-1]
                shift = len(r) - 1 - dn
                r = [c * lead for c in r]
                for t, d in enumerate(fb):
                    r[shift + t] -= top * d
                r = _strip(r)
            fa, fb = fb, _primitive(r)
        g = _from_list(fa).scale(content) if content else _from_list(fa)
    if g.is_zero():
        return ZERO
    if g.leading_coefficient() < 0:
        g = -g
    return g


class QFrac:
    """Reduced fraction of two QLaurent values.

    Normal form: the denominator is a polynomial (no negative exponents,
    minimal exponent zero) with positive leading coefficient, coprime to the
    numerator; any global power of q is carried by the numerator.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, _reduced=False):
        if isinstance(num, int):
            num = QLaurent.from_int(num)
        if den is None:
            den = ONE
        elif isinstance(den, int):
            den = QLaurent.from_int(den)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator in QFrac")
        if _reduced:
            self.num = num
            self.den = den
            return
        self.num, self.den = _reduce(num, den)

    @staticmethod
    def from_qlaurent(p: QLaurent) -> "QFrac":
        return QFrac(p, ONE, _reduced=True)

    @staticmethod
    def q_power(e: int, coeff: int = 1) -> "QFrac":
        return QFrac(QLaurent.q_power(e, coeff), ONE, _reduced=True)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_one(self) -> bool:
        return self.num.is_one() and self.den.is_one()

    def is_polynomial(self) -> bool:
        """True when the reduced denominator is 1 (the value lives in Z[q, 1/q])."""
        return self.den.is_one()

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other: "QFrac") -> "QFrac":
        if isinstance(other, int):
            other = QFrac(other)
        if self.den.is_one() and other.den.is_one():
            return QFrac(self.num + other.num, ONE, _reduced=True)
        return QFrac(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __sub__(self, other: "QFrac") -> "QFrac":
        return self + (-other)

    def __neg__(self) -> "QFrac":
        return QFrac(-self.num, self.den, _reduced=True)

    def __mul__(self, other: "QFrac") -> "QFrac":
        if isinstance(other, int):
            other = QFrac(other)
        if self.den.is_one() and other.den.is_one():
            return QFrac(self.num * other.num, ONE, _reduced=True)
        return QFrac(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other: "QFrac") -> "QFrac":
        if isinstance(other, int):
            other = QFrac(other)
        if other.is_zero():
            raise ZeroDivisionError("division by zero QFrac")
        return QFrac(self.num * other.den, self.den * other.num)

    def inverse(self) -> "QFrac":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero QFrac")
        return QFrac(self.den, self.num)

    def __pow__(self, n: int) -> "QFrac":
        base = self if n >= 0 else self.inverse()
        n = abs(n)
        result = QFrac(1)
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = QFrac(other)
        elif isinstance(other, QLaurent):
            other = QFrac.from_qlaurent(other)
        elif not isinstance(other, QFrac):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def eval_fraction(self, qval: Fraction) -> Fraction:
        d = self.den.eval_fraction(qval)
        if d == 0:
            raise ZeroDivisionError("QFrac denominator vanishes at sample point")
        return self.num.eval_fraction(qval) / d

    def __str__(self) -> str:
        if self.den.is_one():
            return str(self.num)
        return f"({self.num})/({self.den})"

    def __repr__(self) -> str:
        return f"QFrac({self})"

    @staticmethod
    def parse(text: str) -> "QFrac":
        s = text.strip()
        if s.startswith("(") and ")/(" in s and s.endswith(")"):
            split = s.index(")/(")
            num = QLaurent.parse(s[1:split])
            den = QLaurent.parse(s[split + 3:-1])
            return QFrac(num, den)
        return QFrac(QLaurent.parse(s), ONE)


def _reduce(num: QLaurent, den: QLaurent) -> tuple[QLaurent, QLaurent]:
    if num.is_zero():
        return ZERO, ONE
    net = num.min_exp() - den.min_exp()
    num0 = num.shift(-num.min_exp())
    den0 = den.shift(-den.min_exp())
    if not den0.is_one():
        g = poly_gcd(num0, den0)
        if not g.is_one():
            num0 = num0.divexact(g)
            den0 = den0.divexact(g)
    # common integer content
    ci = int_gcd(num0.content(), den0.content())
    if ci > 1:
        num0 = QLaurent({e: c // ci for e, c in num0.terms.items()}, _trusted=True)
        den0 = QLaurent({e: c // ci for e, c in den0.terms.items()}, _trusted=True)
    if den0.leading_coefficient() < 0:
        num0, den0 = -num0, -den0
    return num0.shift(net), den0


def frac_arith(a: QFrac, b: QFrac, op: str):
    """Dispatch helper: op in {add, sub, mul, div, eq}."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    if op == "eq":
        return (a.num * b.den) == (b.num * a.den)
    raise ValueError(f"unknown op {op!r}")


# -- q-shifted factorials and Gaussian binomials ------------------------------


def qpoch(m: int, z: int) -> QLaurent:
    """(q^m; q)_z = prod_{j=0}^{z-1} (1 - q^(m+j)); the empty product is 1."""
    if z < 0:
        raise ValueError("pochhammer length negative")
    out = ONE
    for j in range(z):
        out = out * (ONE + QLaurent.q_power(m + j, -1))
    return out


def qbinom(n: int, c: int) -> QLaurent:
    """Gaussian binomial coefficient; 0 when c > n, exact division otherwise."""
    if c < 0 or n < 0:
        raise ValueError("qbinom arguments must be nonnegative")
    if c > n:
        return ZERO
    if c == 0 or c == n:
        return ONE
    return qpoch(n - c + 1, c).divexact(qpoch(1, c))


def qfrac_poch(m: int, z: int) -> QFrac:
    return QFrac.from_qlaurent(qpoch(m, z))


# -- exact interpolation over the fraction field ------------------------------


def interpolate(nodes: list[tuple[QFrac, QFrac]]) -> list[QFrac]:
    """Coefficients c_0..c_{m-1} of the unique degree < m polynomial through
    the m given (abscissa, value) pairs.  Newton's divided differences, exact.
    """
    m = len(nodes)
    if m == 0:
        raise ValueError("no interpolation nodes")
    xs = [p[0] for p in nodes]
    for i in range(m):
        for j in range(i + 1, m):
            if xs[i] == xs[j]:
                raise ValueError("duplicate abscissa in interpolation nodes")
    # divided difference table, kept as one mutating row
    dd = [p[1] for p in nodes]
    newton = [dd[0]]
    for k in range(1, m):
        for i in range(m - 1, k - 1, -1):
            dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - k])
        newton.append(dd[k])
    # expand the Newton form into monomial coefficients
    zero = QFrac(0)
    coeffs = [zero] * m
    coeffs[0] = newton[m - 1]
    deg = 0
    for k in range(m - 2, -1, -1):
        # multiply by (z - x_k): shift up, subtract x_k * current
        for i in range(deg, -1, -1):
            coeffs[i + 1] = coeffs[i + 1] + coeffs[i]
            coeffs[i] = -(xs[k] * coeffs[i])
        deg += 1
        coeffs[0] = coeffs[0] + newton[k]
    return coeffs


def eval_poly(coeffs: list[QFrac], z: QFrac) -> QFrac:
    """Evaluate a coefficient list (ascending powers) at z."""
    total = QFrac(0)
    for c in reversed(coeffs):
        total = total * z + c
    return total
