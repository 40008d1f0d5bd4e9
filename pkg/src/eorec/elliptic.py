"""Weierstrass wp expansion machinery and the symbolic algebra of
wp-derivatives at differences of marked points.

Torsion labels: index 0 = origin, 1 = 1/2, 2 = tau/2, 3 = (1+tau)/2.
Differences of 2-torsion points form the Klein four-group; on indices this is
bitwise xor.

Symbols P(k, base, m) stand for wp^{(m)}(u_k - u_base) where base is either a
torsion label ('r') or another slot ('s', diagonal case).  Derivative orders
m >= 2 are always reduced through wp'' = 6 wp^2 - g2/2 before storage, so
stored polynomials only carry m in {0, 1}.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .coeffring import Scalar, ONE, as_scalar
from .series import QSeries, TLaurent, DEN
from .modforms import (
    eisenstein, torsion_values, g2_series, g3_series, zeta_even,
)

TORSION_NAMES = ("0", "1/2", "tau/2", "(1+tau)/2")


def torsion_diff(r1: int, r2: int) -> int:
    """Label of u_{r1} - u_{r2} in the 2-torsion group (xor on indices)."""
    return r1 ^ r2


class UnknownTorsionDifference(ValueError):
    pass


class DegenerateDifference(ValueError):
    pass


# --------------------------------------------------------------- catalog hub
class Catalog:
    """Per-q-order bundle of the catalog series the wp machinery needs."""

    def __init__(self, q_order: int):
        self.q_order = q_order
        e1, e2, e3, eta1 = torsion_values(q_order)
        self.e = {1: e1.series, 2: e2.series, 3: e3.series}
        self.eta1 = eta1.series
        self.g2 = g2_series(q_order).series
        self.g3 = g3_series(q_order).series
        self._E = {}

    def E(self, k):
        if k not in self._E:
            self._E[k] = eisenstein(k, self.q_order).series
        return self._E[k]

    def trunc(self):
        return DEN * self.q_order


@lru_cache(maxsize=8)
def catalog(q_order: int) -> Catalog:
    return Catalog(q_order)


# ------------------------------------------------- wp derivatives as (X, Y)
@lru_cache(maxsize=None)
def wp_derivative_poly(m: int):
    """wp^{(m)} as a polynomial in X=wp, Y=wp', g2, g3.

    Returned as {(i, j, a, b): Fraction} for X^i Y^j g2^a g3^b with j <= 1,
    reduced via Y^2 = 4X^3 - g2 X - g3 and wp'' = 6X^2 - g2/2.
    """
    if m == 0:
        return {(1, 0, 0, 0): Fraction(1)}
    if m == 1:
        return {(0, 1, 0, 0): Fraction(1)}
    prev = wp_derivative_poly(m - 1)
    out = {}

    def acc(key, val):
        out[key] = out.get(key, Fraction(0)) + val
        if not out[key]:
            del out[key]

    for (i, j, a, b), c in prev.items():
        # d/du X^i Y^j = i X^{i-1} Y^{j+1} + j X^i Y^{j-1} (6X^2 - g2/2)
        if i:
            acc((i - 1, j + 1, a, b), c * i)
        if j:
            acc((i + 2, j - 1, a, b), c * j * 6)
            acc((i, j - 1, a + 1, b), -c * j / 2)
    # reduce Y^2 -> 4X^3 - g2 X - g3
    changed = True
    while changed:
        changed = False
        for (i, j, a, b), c in list(out.items()):
            if j >= 2:
                del out[(i, j, a, b)]
                acc((i + 3, j - 2, a, b), 4 * c)
                acc((i + 1, j - 2, a + 1, b), -c)
                acc((i, j - 2, a, b + 1), -c)
                changed = True
    return dict(out)


@lru_cache(maxsize=4096)
def wp_value_at_2torsion(r: int, m: int, q_order: int):
    """wp^{(m)}(u_r) for r in {1,2,3} as a QSeries of weight m+2."""
    if r not in (1, 2, 3):
        raise UnknownTorsionDifference(f"no finite wp value at label {r}")
    cat = catalog(q_order)
    if m % 2:
        return QSeries.zero(cat.trunc())  # 2-torsion points are critical
    er = cat.e[r]
    out = QSeries.zero(cat.trunc())
    for (i, j, a, b), c in wp_derivative_poly(m).items():
        if j:
            continue  # Y = wp'(u_r) = 0
        term = (er ** i) * (cat.g2 ** a) * (cat.g3 ** b)
        out = out + term.scale(c)
    return out


@lru_cache(maxsize=4096)
def wp_laurent_at_origin(m: int, c: int, t_order: int, q_order: int) -> TLaurent:
    """Laurent expansion of wp^{(m)}(c T) at the origin, over QSeries.

    wp(z) = z^{-2} + sum_{k>=1} (2k+1) 2 zeta(2k+2) E_{2k+2} z^{2k}.
    """
    cat = catalog(q_order)
    qt = cat.trunc()
    coeffs = {}
    # singular part: d^m/dz^m z^{-2} = (-1)^m (m+1)! z^{-m-2}
    fact = 1
    for i in range(2, m + 2):
        fact *= i
    sign = -1 if m % 2 else 1
    coeffs[-m - 2] = QSeries({0: Scalar(sign * fact)}, qt).scale(
        Fraction(c) ** (-m - 2))
    k = 1
    while 2 * k - m < t_order:
        fall = 1
        for i in range(2 * k - m + 1, 2 * k + 1):
            fall *= i
        if 2 * k - m >= 0 and fall:
            pref = zeta_even(2 * k + 2) * Scalar(2 * (2 * k + 1) * fall)
            ser = cat.E(2 * k + 2).scale(pref).scale(Fraction(c) ** (2 * k - m))
            if not ser.is_zero():
                coeffs[2 * k - m] = ser
        k += 1
    return TLaurent(coeffs, t_order)


def wp_add_pair(pa, da, pb, db, g2s, g3s):
    """(wp, wp') of a difference of points from (wp, wp') pairs.

    pa, da: wp(a), wp'(a);  pb, db: wp(b), wp'(b), all QSeries.  Uses
    wp(a-b) = (1/4)((wp'(a)+wp'(b))/(wp(a)-wp(b)))^2 - wp(a) - wp(b) and its
    a-derivative (b held fixed), with wp''(a) = 6 wp(a)^2 - g2/2.
    """
    den = pa - pb
    if den.is_zero():
        raise DegenerateDifference("wp(a) = wp(b) to truncation")
    num = da + db
    ratio = num * den.invert()
    val = (ratio * ratio).scale(Fraction(1, 4)) - pa - pb
    dda = (pa * pa).scale(6) - g2s.scale(Fraction(1, 2))  # wp''(a)
    dratio = (dda * den - num * da) * (den * den).invert()
    dval = ratio.scale(Fraction(1, 2)) * dratio - da
    return val, dval


def wp_addition(pa, da, pb, db, g2s, g3s):
    """wp(a-b) by the addition formula (spec surface; see wp_add_pair)."""
    return wp_add_pair(pa, da, pb, db, g2s, g3s)[0]


# ------------------------------------------------------------- symbol algebra
def sym_key(k: int, base_kind: str, base: int, m: int):
    return (k, base_kind, base, m)


class JacobiPoly:
    """Polynomial in wp-derivative symbols, eta1 and Y over QSeries.

    Terms are keyed by (symbols, eta1_pow, Y_pow) where symbols is a sorted
    tuple of ((k, base_kind, base, m), power).  Stored symbols always have
    m in {0, 1}; build through wp_symbol_poly to maintain that invariant.
    """

    __slots__ = ("t", "trunc")

    def __init__(self, terms=None, trunc=None):
        self.t = {}
        tmin = None
        if terms:
            for key, coeff in terms.items():
                if coeff.is_zero():
                    continue
                self.t[key] = coeff
                tmin = coeff.trunc if tmin is None else min(tmin, coeff.trunc)
        if tmin is None:
            if trunc is None:
                raise ValueError("zero JacobiPoly needs an explicit trunc")
            tmin = trunc
        self.trunc = tmin

    # -- constructors ---------------------------------------------------
    @staticmethod
    def const(series: QSeries):
        return JacobiPoly({((), 0, 0): series}, trunc=series.trunc)

    @staticmethod
    def zero(trunc):
        return JacobiPoly({}, trunc=trunc)

    def zero_like(self):
        return JacobiPoly({}, trunc=self.trunc)

    def one_like(self):
        return JacobiPoly({((), 0, 0): QSeries.one(self.trunc)})

    # -- ring ops ----------------------------------------------------------
    def is_zero(self):
        return not self.t

    def __add__(self, other):
        out = dict(self.t)
        for key, c in other.t.items():
            if key in out:
                s = out[key] + c
                if s.is_zero():
                    del out[key]
                else:
                    out[key] = s
            else:
                out[key] = c
        return JacobiPoly(out, trunc=min(self.trunc, other.trunc))

    def __neg__(self):
        return JacobiPoly({k: -c for k, c in self.t.items()}, trunc=self.trunc)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, QSeries):
            other = JacobiPoly.const(other)
        if not isinstance(other, JacobiPoly):
            return self.scale(other)
        out = {}
        for (s1, e1, y1), c1 in self.t.items():
            for (s2, e2, y2), c2 in other.t.items():
                syms = {}
                for s, p in s1:
                    syms[s] = syms.get(s, 0) + p
                for s, p in s2:
                    syms[s] = syms.get(s, 0) + p
                key = (tuple(sorted(syms.items())), e1 + e2, y1 + y2)
                c = c1 * c2
                acc = out.get(key)
                out[key] = c if acc is None else acc + c
        return JacobiPoly(out, trunc=min(self.trunc, other.trunc))

    __rmul__ = __mul__

    def scale(self, s):
        return JacobiPoly({k: c.scale(s) for k, c in self.t.items()},
                          trunc=self.trunc)

    def invert(self):
        if len(self.t) == 1 and ((), 0, 0) in self.t:
            return JacobiPoly.const(self.t[((), 0, 0)].invert())
        raise ValueError("only constant symbol polynomials are invertible")

    def __eq__(self, other):
        return (self - other).is_zero()

    __hash__ = None

    # -- structure ---------------------------------------------------------
    def holomorphic_limit(self):
        """Y -> 0."""
        return JacobiPoly({k: c for k, c in self.t.items() if k[2] == 0},
                          trunc=self.trunc)

    def d_eta1(self):
        out = {}
        for (syms, e, y), c in self.t.items():
            if e:
                out[(syms, e - 1, y)] = c.scale(e)
        return JacobiPoly(out, trunc=self.trunc)

    def subs_values(self, eta1_series=None, y_value=None):
        """Substitute eta1 (and optionally Y) by series; symbols must be gone."""
        out = None
        for (syms, e, y), c in self.t.items():
            if syms:
                raise ValueError("cannot evaluate a term with wp symbols")
            term = c
            if e:
                if eta1_series is None:
                    raise ValueError("eta1 value required")
                term = term * eta1_series ** e
            if y:
                if y_value is None:
                    raise ValueError("Y value required")
                term = term * y_value ** y
            out = term if out is None else out + term
        return QSeries.zero(self.trunc) if out is None else out

    def slots(self):
        ks = set()
        for (syms, _, _) in self.t:
            for (k, kind, base, m), _p in syms:
                ks.add(k)
                if kind == "s":
                    ks.add(base)
        return sorted(ks)

    def relabel(self, mapping):
        """Apply a slot relabeling {old: new}; renormalizes diagonal order."""
        out = {}
        for (syms, e, y), c in self.t.items():
            newsyms = {}
            sign = 1
            for (k, kind, base, m), p in syms:
                k2 = mapping.get(k, k)
                if kind == "s":
                    b2 = mapping.get(base, base)
                    if k2 > b2:
                        k2, b2 = b2, k2
                        if m % 2:
                            sign *= (-1) ** p
                    key = (k2, "s", b2, m)
                else:
                    key = (k2, kind, base, m)
                newsyms[key] = newsyms.get(key, 0) + p
            key = (tuple(sorted(newsyms.items())), e, y)
            cc = c if sign == 1 else c.scale(sign)
            acc = out.get(key)
            out[key] = cc if acc is None else acc + cc
        return JacobiPoly(out, trunc=self.trunc)

    def pole_order_per_slot(self):
        """{slot: max over terms of the pole order at ramification points}."""
        out = {}
        for (syms, _, _), _c in self.t.items():
            per = {}
            for (k, kind, base, m), p in syms:
                per[k] = per.get(k, 0) + (m + 2) * p
                if kind == "s":
                    per[base] = per.get(base, 0) + (m + 2) * p
            for k, v in per.items():
                out[k] = max(out.get(k, 0), v)
        return out

    def max_total_pole_order(self):
        best = 0
        for (syms, _, _), _c in self.t.items():
            tot = 0
            for (k, kind, base, m), p in syms:
                tot += (m + 2) * p * (2 if kind == "s" else 1)
            best = max(best, tot)
        return best

    def term_weights(self):
        """Total weight of each term: symbols + 2*eta1 + 2*Y + coefficient.

        Coefficient weight is read off the uniform pi exponent; raises if a
        coefficient mixes pi powers (which would signal a grading bug).
        """
        out = set()
        for (syms, e, y), c in self.t.items():
            w = 2 * e + 2 * y
            for (_k, _kind, _base, m), p in syms:
                w += (m + 2) * p
            piw = c.pi_uniform_weight()
            if piw is None:
                raise ValueError(f"non-uniform pi exponents in coefficient {c!r}")
            out.add(w + piw)
        return out

    def eta1_degree(self):
        return max((k[1] for k in self.t), default=0)

    def y_degree(self):
        return max((k[2] for k in self.t), default=0)

    def to_json(self):
        items = []
        for (syms, e, y), c in sorted(self.t.items(), key=lambda kv: repr(kv[0])):
            items.append({
                "monomial": [[k, kind, (TORSION_NAMES[base] if kind == "r" else base), m, p]
                             for (k, kind, base, m), p in syms],
                "eta1_pow": e,
                "Y_pow": y,
                "coeff": c.to_json(),
            })
        return items

    def __repr__(self):
        return f"JacobiPoly({len(self.t)} terms, trunc q^{Fraction(self.trunc, DEN)})"


def wp_symbol_poly(k: int, base_kind: str, base: int, m: int, q_order: int,
                   power: int = 1) -> JacobiPoly:
    """P(k, base, m)^power as a stored JacobiPoly with m reduced to {0, 1}."""
    cat = catalog(q_order)
    if base_kind == "s" and k > base:
        # wp^{(m)}(u_k - u_l) = (-1)^m wp^{(m)}(u_l - u_k)
        k, base = base, k
        sign = (-1) ** m
    else:
        sign = 1
    if m <= 1:
        key = (((sym_key(k, base_kind, base, m)), 1),)
        mono = JacobiPoly({((key), 0, 0): QSeries.one(cat.trunc()).scale(sign)})
        return mono ** power if power != 1 else mono
    out = JacobiPoly.zero(cat.trunc())
    for (i, j, a, b), c in wp_derivative_poly(m).items():
        coeff = (cat.g2 ** a) * (cat.g3 ** b)
        coeff = coeff.scale(Fraction(c) * sign)
        syms = []
        if i:
            syms.append((sym_key(k, base_kind, base, 0), i))
        if j:
            syms.append((sym_key(k, base_kind, base, 1), j))
        out = out + JacobiPoly({(tuple(sorted(syms)), 0, 0): coeff})
    return out ** power if power != 1 else out


def __pow_jp(self, n):
    result = None
    base = self
    if n == 0:
        return self.one_like()
    while True:
        if n & 1:
            result = base if result is None else result * base
        n >>= 1
        if not n:
            break
        base = base * base
    return result


JacobiPoly.__pow__ = __pow_jp


# ----------------------------------------------------------------- localize
def _localize_piece(sym, s_or_pair, r, t_order, q_order):
    """T-expansion of one symbol at u = u_r (+-) T; returns a TLaurent over
    JacobiPoly."""
    import math as _math

    k, kind, base, m = sym
    if kind == "r":
        s = s_or_pair
        if base == r:
            return wp_laurent_at_origin(m, s, t_order, q_order) \
                .map_coeffs(JacobiPoly.const)
        rr = torsion_diff(r, base)
        if rr == 0:
            raise UnknownTorsionDifference(f"labels {r},{base} coincide")
        coeffs = {}
        for jj in range(t_order):
            val = wp_value_at_2torsion(rr, m + jj, q_order)
            if not val.is_zero():
                coeffs[jj] = JacobiPoly.const(
                    val.scale(Fraction(s ** jj, _math.factorial(jj))))
        return TLaurent(coeffs, t_order)
    # diagonal symbol
    sk, sb = s_or_pair
    if sk is not None and sb is not None:
        c = sk - sb
        if c == 0:
            raise DegenerateDifference(
                "diagonal symbol with both slots at the same sign")
        return wp_laurent_at_origin(m, c, t_order, q_order) \
            .map_coeffs(JacobiPoly.const)
    # one leg free: wp^{(m)}(u_r + sT - u_free), Taylor in T;
    # wp^{(m+j)}(u_r - u_free) = (-1)^{m+j} P(free, r, m+j)
    if sk is not None:
        free, s, parity = base, sk, 1
    else:
        free, s, parity = k, -sb, -1
    coeffs = {}
    for jj in range(t_order):
        sign = (-1) ** (m + jj) if parity == 1 else 1
        base_poly = wp_symbol_poly(free, "r", r, m + jj, q_order)
        coeffs[jj] = base_poly.scale(
            Fraction(sign * s ** jj, _math.factorial(jj)))
    return TLaurent(coeffs, t_order)


def localize(poly: JacobiPoly, assignments: dict, r: int, t_order: int,
             q_order: int) -> TLaurent:
    """Expand slots at a ramification point: u_k = u_r + sign * T.

    assignments maps slot -> +1 or -1 (the -1 slot is the involution image
    v* = u_r - T).  Returns a TLaurent whose coefficients are JacobiPolys in
    the remaining slots.  Symbols in localized slots become wp Laurent series
    (same label) or Taylor series with 2-torsion values (different label);
    symbols with one leg on a free slot become Taylor series in symbols of
    that slot.  The expensive T-products are cached per touched-symbol
    multiset, which terms of a large polynomial share heavily.
    """
    cat = catalog(q_order)
    zero_jp = JacobiPoly.zero(cat.trunc())
    total = TLaurent.zero(t_order)
    touched_cache = {}

    for (syms, e, y), coeff in poly.t.items():
        touched = []
        untouched = []
        for (sym, p) in syms:
            k, kind, base, m = sym
            k_in = k in assignments
            b_in = (kind == "s") and (base in assignments)
            if k_in or b_in:
                if kind == "r":
                    touched.append(((sym, assignments[k]), p))
                else:
                    pair = (assignments.get(k), assignments.get(base))
                    touched.append(((sym, pair), p))
            else:
                untouched.append((sym, p))
        tk = tuple(touched)
        prod = touched_cache.get(tk)
        if prod is None:
            pole_budget = 2 * sum((spec[0][3] + 2) * p for spec, p in touched)
            one = JacobiPoly({((), 0, 0): QSeries.one(cat.trunc())})
            prod = TLaurent({0: one}, t_order + pole_budget)
            for (sym, data), p in touched:
                piece = _localize_piece(sym, data, r, t_order, q_order)
                for _ in range(p):
                    prod = prod * piece
                    prod = prod.truncate(min(prod.trunc, t_order))
            prod = prod.truncate(min(prod.trunc, t_order))
            touched_cache[tk] = prod
        rest = JacobiPoly({(tuple(untouched), e, y): coeff})
        total = total + prod.scale_coeff(rest)
    if total.is_zero():
        return TLaurent({0: zero_jp}, t_order)
    return total


# ------------------------------------------------------------ numeric oracle
def wp_numeric(z: complex, tau: complex, nmax: int = 60):
    """Double-precision (wp, wp') via the q-Fourier expansion.

    wp(z)/(2 pi i)^2 = 1/12 + u/(1-u)^2 + sum_{m,n>=1} m q^{mn}(u^m + u^{-m})
                       - 2 sum sigma_1(n) q^n,   u = e^{2 pi i z}.
    Independent of the exact-series code paths.
    """
    import cmath

    q = cmath.exp(2j * cmath.pi * tau)
    u = cmath.exp(2j * cmath.pi * z)
    c = (2j * cmath.pi) ** 2
    wp = 1 / 12 + u / (1 - u) ** 2
    wpp = u * (1 + u) / (1 - u) ** 3
    ubig = max(abs(u), 1 / abs(u))
    for n in range(1, nmax):
        sig = sum(d for d in range(1, n + 1) if n % d == 0)
        wp -= 2 * sig * q ** n
        for m in range(1, 4 * nmax):
            if (m + 1) * abs(q) ** (m * n) * ubig ** m < 1e-18:
                break
            wp += m * q ** (m * n) * (u ** m + u ** (-m))
            wpp += m * m * q ** (m * n) * (u ** m - u ** (-m))
    return c * wp, c * 2j * cmath.pi * wpp
