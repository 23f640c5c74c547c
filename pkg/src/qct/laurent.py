"""Sparse multivariate Laurent polynomials over the q fraction field.

``MLaurent`` stores terms as a dict from exponent tuples to nonzero ``QFrac``
coefficients.  Exponent tuples ("ExpVec") are plain tuples of ints, one slot
per variable; slot t corresponds to the variable printed as ``x{t+1}``.

The module also houses the constant-term fold engine: a product given as a
list of factors is multiplied out factor by factor while partial monomials
whose exponents cannot return to the requested target window are dropped.
Pruning never changes the result, only the work.  Two coefficient kernels are
available, selected by the ``QCT_KERNEL`` environment variable:

* ``packed`` (default): coefficients in q are packed into single big integers
  (base ``2**B`` balanced digits), so shift/add/multiply ride on CPython's
  bignum arithmetic;
* ``dict``: plain ``{exponent: coefficient}`` dicts, the reference kernel.
"""

from __future__ import annotations

import os

from .qring import ONE, QFrac, QLaurent

ExpVec = tuple  # fixed-arity tuple of ints, one slot per variable


class MLaurent:
    """Sparse multivariate Laurent polynomial with QFrac coefficients."""

    __slots__ = ("arity", "terms")

    def __init__(self, arity: int, terms=None, _trusted=False):
        self.arity = arity
        if terms is None:
            self.terms = {}
        elif _trusted:
            self.terms = terms
        else:
            clean = {}
            for e, c in dict(terms).items():
                e = tuple(e)
                if len(e) != arity:
                    raise ValueError("exponent arity mismatch")
                if isinstance(c, QLaurent):
                    c = QFrac.from_qlaurent(c)
                elif isinstance(c, int):
                    c = QFrac(c)
                if not c.is_zero():
                    clean[e] = c
            self.terms = clean

    # -- constructors ---------------------------------------------------------

    @staticmethod
    def constant(arity: int, c) -> "MLaurent":
        if isinstance(c, int):
            c = QFrac(c)
        elif isinstance(c, QLaurent):
            c = QFrac.from_qlaurent(c)
        if c.is_zero():
            return MLaurent(arity)
        return MLaurent(arity, {(0,) * arity: c}, _trusted=True)

    @staticmethod
    def monomial(arity: int, exps, coeff=None) -> "MLaurent":
        exps = tuple(exps)
        if len(exps) != arity:
            raise ValueError("exponent arity mismatch")
        if coeff is None:
            coeff = QFrac(1)
        elif isinstance(coeff, int):
            coeff = QFrac(coeff)
        elif isinstance(coeff, QLaurent):
            coeff = QFrac.from_qlaurent(coeff)
        if coeff.is_zero():
            return MLaurent(arity)
        return MLaurent(arity, {exps: coeff}, _trusted=True)

    # -- basic views ------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self) -> int:
        return len(self.terms)

    def coefficient(self, exps) -> QFrac:
        exps = tuple(exps)
        if len(exps) != self.arity:
            raise ValueError("exponent arity mismatch")
        return self.terms.get(exps, QFrac(0))

    def constant_coefficient(self) -> QFrac:
        return self.terms.get((0,) * self.arity, QFrac(0))

    def var_range(self, pos: int) -> tuple[int, int]:
        """(min, max) exponent of the variable in slot pos; (0, 0) if absent."""
        if not self.terms:
            return (0, 0)
        vals = [e[pos] for e in self.terms]
        return (min(vals), max(vals))

    def total_degrees(self):
        return {sum(e) for e in self.terms}

    # -- ring operations -----------------------------------------------------------

    def _check(self, other: "MLaurent"):
        if self.arity != other.arity:
            raise ValueError("arity mismatch")

    def __add__(self, other: "MLaurent") -> "MLaurent":
        self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            cur = out.get(e)
            s = c if cur is None else cur + c
            if s.is_zero():
                out.pop(e, None)
            else:
                out[e] = s
        return MLaurent(self.arity, out, _trusted=True)

    def __sub__(self, other: "MLaurent") -> "MLaurent":
        return self + (-other)

    def __neg__(self) -> "MLaurent":
        return MLaurent(self.arity, {e: -c for e, c in self.terms.items()}, _trusted=True)

    def __mul__(self, other: "MLaurent") -> "MLaurent":
        self._check(other)
        a, b = self.terms, other.terms
        if len(a) > len(b):
            a, b = b, a
        out: dict = {}
        for ea, ca in a.items():
            for eb, cb in b.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                c = ca * cb
                cur = out.get(e)
                s = c if cur is None else cur + c
                if s.is_zero():
                    out.pop(e, None)
                else:
                    out[e] = s
        return MLaurent(self.arity, out, _trusted=True)

    def scale(self, c) -> "MLaurent":
        if isinstance(c, int):
            c = QFrac(c)
        elif isinstance(c, QLaurent):
            c = QFrac.from_qlaurent(c)
        if c.is_zero():
            return MLaurent(self.arity)
        return MLaurent(self.arity, {e: v * c for e, v in self.terms.items()}, _trusted=True)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MLaurent):
            return NotImplemented
        return self.arity == other.arity and self.terms == other.terms

    def __hash__(self):
        return hash((self.arity, frozenset(self.terms.items())))

    # -- constant terms and coefficients ----------------------------------------------

    def ct_positions(self, positions) -> "MLaurent":
        """Keep the terms whose exponent vanishes on every listed slot."""
        positions = list(positions)
        out = {e: c for e, c in self.terms.items() if all(e[p] == 0 for p in positions)}
        return MLaurent(self.arity, out, _trusted=True)

    def ct_all(self) -> QFrac:
        return self.constant_coefficient()

    # -- text form ----------------------------------------------------------------------

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms):
            c = self.terms[e]
            cs = str(c)
            if " " in cs and not cs.startswith("("):
                cs = f"({cs})"
            mono = "*".join(
                (f"x{p + 1}" if ex == 1 else f"x{p + 1}^{ex}")
                for p, ex in enumerate(e) if ex
            )
            parts.append(f"{cs} * {mono}" if mono else cs)
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"MLaurent({self.arity}, {self})"

    @staticmethod
    def parse(text: str, arity: int) -> "MLaurent":
        s = text.strip()
        if s == "0":
            return MLaurent(arity)
        out = MLaurent(arity)
        for chunk in _split_terms(s):
            coeff_part, monos = _split_monomial(chunk)
            coeff = QFrac.parse(coeff_part)
            exps = [0] * arity
            for name, ex in monos:
                pos = int(name[1:]) - 1
                if pos < 0 or pos >= arity:
                    raise ValueError(f"variable {name} out of arity {arity}")
                exps[pos] += ex
            out = out + MLaurent.monomial(arity, exps, coeff)
        return out


def _split_terms(s: str):
    depth = 0
    start = 0
    i = 0
    while i < len(s):
        ch = s[i]
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif depth == 0 and s[i:i + 3] == " + ":
            yield s[start:i]
            i += 3
            start = i
            continue
        i += 1
    yield s[start:]


def _split_monomial(chunk: str):
    """Split one printed term into (coefficient text, [(var name, exponent)])."""
    chunk = chunk.strip()
    depth = 0
    split_at = None
    for i in range(len(chunk) - 2):
        ch = chunk[i]
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif depth == 0 and chunk[i:i + 3] == " * ":
            split_at = i
            break
    if split_at is None:
        coeff_part, mono_part = chunk, ""
    else:
        coeff_part, mono_part = chunk[:split_at], chunk[split_at + 3:]
    coeff_part = coeff_part.strip()
    if coeff_part.startswith("(") and coeff_part.endswith(")") and ")/(" not in coeff_part:
        coeff_part = coeff_part[1:-1]
    monos = []
    if mono_part:
        for p in mono_part.split("*"):
            p = p.strip()
            if not (p.startswith("x") and p[1:2].isdigit()):
                raise ValueError(f"bad monomial piece {p!r}")
            if "^" in p:
                name, _, ex = p.partition("^")
                monos.append((name, int(ex)))
            else:
                monos.append((p, 1))
    return coeff_part, monos


# -- spec-level operations (1-based variable indices) ---------------------------------


def poly_arith(a: MLaurent, b: MLaurent, op: str):
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "scale":
        if len(b.terms) != 1 or set(b.terms) != {(0,) * b.arity}:
            raise ValueError("scale expects a constant second operand")
        return a.scale(b.constant_coefficient())
    raise ValueError(f"unknown op {op!r}")


def ct(f: MLaurent, variables) -> MLaurent:
    """Constant term over the 1-based variable index set."""
    return f.ct_positions([v - 1 for v in variables])


def coeff_at(f: MLaurent, exps) -> QFrac:
    return f.coefficient(exps)


def poch_factor(arity: int, i, j, m: int, z: int) -> MLaurent:
    """Expanded prod_{t=0}^{z-1} (1 - q^{m+t} * ratio).

    The ratio is x_i/x_j for 1-based indices; either side may be the literal
    constant 1 (pass None), giving factors like (1/x_j)_z or (q x_i)_z.
    """
    if z < 0:
        raise ValueError("pochhammer length negative")
    if i is not None and j is not None and i == j:
        raise ValueError("poch_factor needs distinct variables")
    out = MLaurent.constant(arity, 1)
    if z == 0:
        return out
    factors = linear_factors(arity, i, j, m, z)
    res = ct_fold(arity, factors, None, None)
    return MLaurent(arity, {e: QFrac.from_qlaurent(c) for e, c in res.items()}, _trusted=True)


def subst_shift(f: MLaurent, u, k, x0: bool = False) -> MLaurent:
    """Merge variables x_{u_1}..x_{u_s} into x_{u_s} with q-power shifts.

    Every occurrence of x_{u_i} (i < s) becomes x_{u_s} q^{k_s - k_i}.  With
    ``x0=True`` slot 0 of f is the projective variable x_0 (so x_j sits in
    slot j) and x_0 itself maps to x_{u_s} q^{k_s}; otherwise x_j sits in
    slot j-1 and no x_0 is present.
    """
    u = list(u)
    k = list(k)
    if len(u) != len(k) or not u:
        raise ValueError("u and k must be nonempty and of equal length")
    if any(u[t] >= u[t + 1] for t in range(len(u) - 1)):
        raise ValueError("u must be strictly ascending")
    s = len(u)
    off = 0 if x0 else 1
    tgt = u[-1] - off
    mapping = {}  # slot -> q-shift
    for i in range(s - 1):
        mapping[u[i] - off] = k[-1] - k[i]
    if x0:
        mapping[0] = k[-1]  # x_0 slot, with k_0 = 0
    out = MLaurent(f.arity)
    acc: dict = {}
    for e, c in f.terms.items():
        ne = list(e)
        shift = 0
        for slot, qs in mapping.items():
            ex = ne[slot]
            if ex:
                shift += qs * ex
                ne[tgt] += ex
                ne[slot] = 0
        ne = tuple(ne)
        nc = c * QFrac.q_power(shift) if shift else c
        cur = acc.get(ne)
        sme = nc if cur is None else cur + nc
        if sme.is_zero():
            acc.pop(ne, None)
        else:
            acc[ne] = sme
    out.terms = acc
    return out


# -- the CT fold engine -----------------------------------------------------------------


class FoldFactor:
    """One factor of a product in fold form.

    ``terms`` is a list of (delta, qexp, coeff) with delta an exponent tuple
    (or None for the zero vector), and coeff a QLaurent giving the q-part of
    the term; the monomial contributed is coeff * q^qexp * x^delta.
    """

    __slots__ = ("arity", "terms", "lo", "hi", "l1")

    def __init__(self, arity: int, terms):
        self.arity = arity
        self.terms = []
        lo = [0] * arity
        hi = [0] * arity
        l1 = 0
        first = True
        for delta, qexp, coeff in terms:
            if isinstance(coeff, int):
                coeff = QLaurent.from_int(coeff)
            if coeff.is_zero():
                continue
            if delta is not None:
                delta = tuple(delta)
                if len(delta) != arity:
                    raise ValueError("delta arity mismatch")
                if not any(delta):
                    delta = None
            self.terms.append((delta, qexp, coeff))
            d = delta if delta is not None else (0,) * arity
            if first:
                lo = list(d)
                hi = list(d)
                first = False
            else:
                for v in range(arity):
                    if d[v] < lo[v]:
                        lo[v] = d[v]
                    if d[v] > hi[v]:
                        hi[v] = d[v]
            l1 += coeff.l1_norm()
        if not self.terms:
            raise ValueError("empty factor")
        self.lo = tuple(lo)
        self.hi = tuple(hi)
        self.l1 = max(l1, 1)

    @staticmethod
    def linear(arity: int, i, j, m: int) -> "FoldFactor":
        """(1 - q^m x_i/x_j) with 1-based indices; None on either side means 1."""
        if i is not None and i == j:
            raise ValueError("linear factor needs distinct variables")
        delta = [0] * arity
        if i is not None:
            delta[i - 1] += 1
        if j is not None:
            delta[j - 1] -= 1
        return FoldFactor(arity, [(None, 0, ONE), (tuple(delta), m, QLaurent.from_int(-1))])

    @staticmethod
    def monomial(arity: int, exps, qexp: int = 0, coeff=1) -> "FoldFactor":
        return FoldFactor(arity, [(tuple(exps), qexp, coeff)])

    @staticmethod
    def general(arity: int, poly: MLaurent) -> "FoldFactor":
        terms = []
        for e, c in poly.terms.items():
            if not c.is_polynomial():
                raise ValueError("fold factors need polynomial (denominator-1) coefficients")
            terms.append((e, 0, c.num))
        return FoldFactor(arity, terms)


def linear_factors(arity: int, i, j, m: int, z: int) -> list[FoldFactor]:
    """The z linear factors of (q^m x_i/x_j ; q)_z."""
    return [FoldFactor.linear(arity, i, j, m + t) for t in range(z)]


def _touched(f: FoldFactor) -> tuple:
    return tuple(v for v in range(f.arity) if f.lo[v] or f.hi[v])


def _kernel_name(kernel):
    if kernel is None:
        kernel = os.environ.get("QCT_KERNEL", "packed")
    if kernel not in ("packed", "dict"):
        raise ValueError(f"unknown fold kernel {kernel!r}")
    return kernel


def _windows(arity, factors, tlo, thi):
    """Per-step admissible exponent windows implied by suffix reachability."""
    nf = len(factors)
    keep_lo = [None] * nf
    keep_hi = [None] * nf
    rlo = [0] * arity
    rhi = [0] * arity
    for fi in range(nf - 1, -1, -1):
        keep_lo[fi] = tuple(tlo[v] - rhi[v] for v in range(arity))
        keep_hi[fi] = tuple(thi[v] - rlo[v] for v in range(arity))
        f = factors[fi]
        for v in range(arity):
            rlo[v] += f.lo[v]
            rhi[v] += f.hi[v]
    start_ok = all(tlo[v] - rhi[v] <= 0 <= thi[v] - rlo[v] for v in range(arity))
    return keep_lo, keep_hi, start_ok


def ct_fold(arity, factors, tlo=None, thi=None, kernel=None) -> dict:
    """Expand a factor list, keeping only exponents inside [tlo, thi].

    Returns a dict from exponent tuple to QLaurent.  With the default
    None/None target the product is expanded in full; passing a point window
    (e.g. all zeros) computes a constant term with maximal pruning.
    """
    factors = list(factors)
    if tlo is None or thi is None:
        # unconstrained: window wide enough to keep everything
        lo = [0] * arity
        hi = [0] * arity
        for f in factors:
            for v in range(arity):
                lo[v] += f.lo[v]
                hi[v] += f.hi[v]
        tlo = tuple(lo) if tlo is None else tuple(tlo)
        thi = tuple(hi) if thi is None else tuple(thi)
    else:
        tlo = tuple(tlo)
        thi = tuple(thi)
    if not factors:
        inside = all(tlo[v] <= 0 <= thi[v] for v in range(arity))
        return {(0,) * arity: ONE} if inside else {}
    name = _kernel_name(kernel)
    if name == "packed":
        packed, B = _fold_packed(arity, factors, tlo, thi)
        return {e: _decode_packed(lo, mag, B) for e, (lo, mag) in packed.items()}
    return _fold_dict(arity, factors, tlo, thi)


def fold_packed_raw(arity, factors, tlo, thi, extra_l1: int = 1):
    """Packed fold exposed for callers that post-process coefficients.

    ``extra_l1`` widens the digit base so callers may multiply the returned
    packed values by further polynomials of that combined L1 norm without
    digit overflow.
    """
    return _fold_packed(arity, list(factors), tuple(tlo), tuple(thi), extra_l1)


def _choose_B(factors, extra_l1: int = 1) -> int:
    bound = extra_l1
    for f in factors:
        bound *= f.l1
    return max(64, bound.bit_length() + 8)


def _fold_packed(arity, factors, tlo, thi, extra_l1: int = 1):
    keep_lo, keep_hi, start_ok = _windows(arity, factors, tlo, thi)
    B = _choose_B(factors, extra_l1)
    if not start_ok:
        return {}, B
    # precompile factor terms: (delta, qexp, lo_c, mag_c)
    compiled = []
    for f in factors:
        terms = []
        for delta, qexp, coeff in f.terms:
            lo_c = coeff.min_exp()
            mag_c = _encode_packed(coeff, lo_c, B)
            terms.append((delta, qexp + lo_c, mag_c))
        compiled.append((terms, _touched(f)))
    state = {(0,) * arity: (0, 1)}
    for fi, (terms, touched) in enumerate(compiled):
        klo = keep_lo[fi]
        khi = keep_hi[fi]
        new: dict = {}
        for e, (lo, mag) in state.items():
            for delta, qsh, cmag in terms:
                if delta is None:
                    ne = e
                else:
                    ne = tuple([a + b for a, b in zip(e, delta)])
                ok = True
                for v in touched:
                    x = ne[v]
                    if x < klo[v] or x > khi[v]:
                        ok = False
                        break
                if not ok:
                    continue
                nlo = lo + qsh
                nmag = mag if cmag == 1 else (-mag if cmag == -1 else mag * cmag)
                cur = new.get(ne)
                if cur is None:
                    new[ne] = (nlo, nmag)
                else:
                    clo, cm = cur
                    if clo <= nlo:
                        s = cm + (nmag << (B * (nlo - clo)))
                        rl = clo
                    else:
                        s = nmag + (cm << (B * (clo - nlo)))
                        rl = nlo
                    if s:
                        new[ne] = (rl, s)
                    else:
                        del new[ne]
        state = new
        if not state:
            break
    return state, B


def _fold_dict(arity, factors, tlo, thi):
    keep_lo, keep_hi, start_ok = _windows(arity, factors, tlo, thi)
    if not start_ok:
        return {}
    state = {(0,) * arity: {0: 1}}
    for fi, f in enumerate(factors):
        klo = keep_lo[fi]
        khi = keep_hi[fi]
        touched = _touched(f)
        new: dict = {}
        for e, qd in state.items():
            for delta, qsh, coeff in f.terms:
                if delta is None:
                    ne = e
                else:
                    ne = tuple([a + b for a, b in zip(e, delta)])
                ok = True
                for v in touched:
                    x = ne[v]
                    if x < klo[v] or x > khi[v]:
                        ok = False
                        break
                if not ok:
                    continue
                cur = new.get(ne)
                if cur is None:
                    cur = new[ne] = {}
                for ce, cc in coeff.terms.items():
                    sh = ce + qsh
                    for k, v in qd.items():
                        kk = k + sh
                        s = cur.get(kk, 0) + v * cc
                        if s:
                            cur[kk] = s
                        else:
                            del cur[kk]
                if not cur:
                    del new[ne]
        state = new
        if not state:
            break
    return {e: QLaurent(qd, _trusted=True) for e, qd in state.items() if qd}


# -- packed coefficient helpers -------------------------------------------------------


def _encode_packed(p: QLaurent, lo: int, B: int) -> int:
    mag = 0
    for e, c in p.terms.items():
        mag += c << (B * (e - lo))
    return mag


def _decode_packed(lo: int, mag: int, B: int) -> QLaurent:
    terms = {}
    half = 1 << (B - 1)
    full = 1 << B
    mask = full - 1
    e = lo
    while mag:
        d = mag & mask
        if d >= half:
            d -= full
        mag = (mag - d) >> B
        if d:
            terms[e] = d
        e += 1
    return QLaurent(terms, _trusted=True)


def packed_mul(a, b, B):
    return (a[0] + b[0], a[1] * b[1])


def packed_add(a, b, B):
    (alo, am), (blo, bm) = a, b
    if alo <= blo:
        s = am + (bm << (B * (blo - alo)))
        lo = alo
    else:
        s = bm + (am << (B * (alo - blo)))
        lo = blo
    return (lo, s)


def pack_qlaurent(p: QLaurent, B: int):
    if p.is_zero():
        return (0, 0)
    lo = p.min_exp()
    return (lo, _encode_packed(p, lo, B))
