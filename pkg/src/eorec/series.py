"""Truncated series arithmetic.

Two kinds of series:

* QSeries -- sparse Fourier series in the nome q, exponents on the 1/24
  lattice (stored as integer numerators over a fixed denominator 24),
  coefficients in the tracked-constant Scalar ring.  Negative exponents are
  allowed (several Hauptmoduls start at q^{-1}).
* TLaurent -- Laurent series in a local uniformizer T with integer exponents,
  coefficients in a caller-chosen ring (QSeries here, symbol polynomials in
  the recursion engine).

Every series carries its truncation order (exclusive cutoff); arithmetic
propagates the minimum so precision loss is tracked, never silent.

The inner product kernel (sparse convolution with cutoff) is swapped out for
a compiled version when the optional extension built from _convolve.pyx is
importable; `KERNEL` records which one is active.
"""

from __future__ import annotations

from fractions import Fraction

from .coeffring import Scalar, as_scalar, ONE, ZERO

DEN = 24  # global exponent denominator for QSeries


class NonInvertibleLeading(ValueError):
    pass


class BranchError(ValueError):
    pass


class TruncationError(ValueError):
    pass


def _convolve_py(items_a, items_b, cutoff):
    """Sparse convolution of [(exp, coeff)] lists, dropping exps >= cutoff."""
    out = {}
    for ea, ca in items_a:
        for eb, cb in items_b:
            e = ea + eb
            if e >= cutoff:
                continue
            prod = ca * cb
            acc = out.get(e)
            out[e] = prod if acc is None else acc + prod
    return out


try:
    from . import _convolve as _cext

    _convolve = _cext.convolve
    KERNEL = "compiled"
except ImportError:
    _convolve = _convolve_py
    KERNEL = "python"


class QSeries:
    """Sparse truncated q-series over Scalar, exponents in units of 1/24."""

    __slots__ = ("c", "trunc")

    def __init__(self, coeffs=None, trunc=None):
        if trunc is None:
            raise TruncationError("QSeries requires an explicit truncation order")
        self.trunc = int(trunc)
        self.c = {}
        if coeffs:
            for e, v in coeffs.items():
                v = as_scalar(v)
                if not v.is_zero() and e < self.trunc:
                    self.c[e] = v

    # -- constructors ---------------------------------------------------
    @staticmethod
    def zero(trunc):
        return QSeries({}, trunc)

    @staticmethod
    def one(trunc):
        return QSeries({0: ONE}, trunc)

    @staticmethod
    def from_integer_coeffs(coeffs, trunc_q):
        """Build from {integer q-exponent: coeff}; trunc_q in q units."""
        return QSeries({DEN * e: v for e, v in coeffs.items()}, DEN * trunc_q)

    def zero_like(self):
        return QSeries({}, self.trunc)

    def one_like(self):
        return QSeries({0: ONE}, self.trunc)

    # -- inspection -------------------------------------------------------
    def is_zero(self):
        return not self.c

    def order(self):
        """Lowest stored exponent numerator; trunc if the series is zero."""
        return min(self.c) if self.c else self.trunc

    def coeff(self, e_num):
        if e_num >= self.trunc:
            raise TruncationError(f"exponent {e_num}/24 beyond truncation")
        return self.c.get(e_num, ZERO)

    def coeff_q(self, n):
        """Coefficient of q^n for rational n (int or Fraction)."""
        e = n * DEN
        if e != int(e):
            raise ValueError("exponent not on the 1/24 lattice")
        return self.coeff(int(e))

    def leading(self):
        if not self.c:
            raise NonInvertibleLeading("zero series has no leading term")
        e = min(self.c)
        return e, self.c[e]

    # -- ring operations ---------------------------------------------------
    def _binop_trunc(self, other):
        return min(self.trunc, other.trunc)

    def __add__(self, other):
        if isinstance(other, (int, Fraction, Scalar)):
            other = QSeries({0: as_scalar(other)}, self.trunc)
        t = self._binop_trunc(other)
        out = {}
        for e, v in self.c.items():
            if e < t:
                out[e] = v
        for e, v in other.c.items():
            if e >= t:
                continue
            if e in out:
                s = out[e] + v
                if s.is_zero():
                    del out[e]
                else:
                    out[e] = s
            else:
                out[e] = v
        r = QSeries.zero(t)
        r.c = out
        return r

    __radd__ = __add__

    def __neg__(self):
        r = QSeries.zero(self.trunc)
        r.c = {e: -v for e, v in self.c.items()}
        return r

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, Scalar)):
            other = QSeries({0: as_scalar(other)}, self.trunc)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Scalar)):
            return self.scale(other)
        oa, ob = self.order(), other.order()
        t = min(self.trunc + ob, other.trunc + oa)
        out = _convolve(list(self.c.items()), list(other.c.items()), t)
        r = QSeries.zero(t)
        r.c = {e: v for e, v in out.items() if not v.is_zero()}
        return r

    def __rmul__(self, other):
        return self.scale(other)

    def scale(self, s):
        s = as_scalar(s)
        r = QSeries.zero(self.trunc)
        if not s.is_zero():
            r.c = {e: v * s for e, v in self.c.items()}
        return r

    def __pow__(self, n):
        if n < 0:
            return self.invert() ** (-n)
        # preserve absolute truncation for n == 0 and n == 1
        result = None
        base = self
        while True:
            if n & 1:
                result = base if result is None else result * base
            n >>= 1
            if not n:
                break
            base = base * base
        return self.one_like() if result is None else result

    def shift(self, e_num):
        """Multiply by q^(e_num/24)."""
        r = QSeries.zero(self.trunc + e_num)
        r.c = {e + e_num: v for e, v in self.c.items()}
        return r

    def truncate(self, t):
        t = int(t)
        if t > self.trunc:
            raise TruncationError("cannot extend truncation")
        r = QSeries.zero(t)
        r.c = {e: v for e, v in self.c.items() if e < t}
        return r

    def truncate_q(self, n):
        return self.truncate(DEN * n)

    def __eq__(self, other):
        """Equality of all coefficients up to the common truncation."""
        if isinstance(other, (int, Fraction, Scalar)):
            other = QSeries({0: as_scalar(other)}, self.trunc)
        t = self._binop_trunc(other)
        for e in set(self.c) | set(other.c):
            if e < t and self.c.get(e, ZERO) != other.c.get(e, ZERO):
                return False
        return True

    __hash__ = None

    # -- nontrivial operations --------------------------------------------
    def invert(self):
        """Series inverse (Newton); leading coefficient must be a unit."""
        if not self.c:
            raise NonInvertibleLeading("cannot invert zero series")
        e0, c0 = self.leading()
        n_terms = self.trunc - e0  # relative precision available
        # work with the unit part: self = c0 q^{e0} (1 + u)
        unit = self.shift(-e0).scale(c0.inv())
        inv_unit = unit.one_like()
        # Newton: x <- x(2 - unit*x), doubling correct relative order
        prec = 1
        while prec < n_terms:
            inv_unit = inv_unit * (2 - unit * inv_unit)
            inv_unit = inv_unit.truncate(min(inv_unit.trunc, n_terms))
            prec *= 2
        return inv_unit.scale(c0.inv()).shift(-e0)

    def log_unit(self):
        """log of a series with leading term exactly 1*q^0."""
        if self.is_zero() or self.order() != 0 or self.c[0] != ONE:
            raise BranchError("log_unit requires leading term 1")
        u = self - 1
        if u.is_zero():
            return u
        # log(1+u) = sum (-1)^{k+1} u^k / k
        out = self.zero_like()
        term = self.one_like()
        d = u.order()
        kmax = max(1, (self.trunc + d - 1) // d)
        for k in range(1, kmax + 1):
            term = term * u
            out = out + term.scale(Fraction((-1) ** (k + 1), k))
        return out

    def exp(self):
        """exp of a series with strictly positive order."""
        if not self.is_zero() and self.order() <= 0:
            raise BranchError("exp requires strictly positive order")
        out = self.one_like()
        term = self.one_like()
        if self.is_zero():
            return out
        d = self.order()
        kmax = max(1, (self.trunc + d - 1) // d)
        fact = 1
        for k in range(1, kmax + 1):
            term = term * self
            fact *= k
            out = out + term.scale(Fraction(1, fact))
        return out

    def sqrt(self):
        """Square root; leading exponent must be even, coefficient a square."""
        if not self.c:
            return self
        e0, c0 = self.leading()
        if e0 % 2:
            raise BranchError("odd leading exponent in sqrt")
        r0 = c0.sqrt()
        unit = self.shift(-e0).scale(c0.inv())
        half_log = unit.log_unit().scale(Fraction(1, 2))
        return half_log.exp().scale(r0).shift(e0 // 2)

    def nth_root_unit(self, n):
        """n-th root of a series with leading term 1*q^0."""
        return self.log_unit().scale(Fraction(1, n)).exp()

    def qdq(self):
        """The operator q d/dq."""
        r = QSeries.zero(self.trunc)
        r.c = {e: v * Fraction(e, DEN) for e, v in self.c.items() if e != 0}
        return r

    def compose_integer(self, g: "QSeries"):
        """Substitute q -> g(q); requires integer exponents and order(g) > 0."""
        if any(e % DEN for e in self.c):
            raise ValueError("compose requires integer q-exponents")
        if not g.is_zero() and g.order() <= 0:
            raise ValueError("substituted series must have positive order")
        if self.is_zero():
            return QSeries.zero(min(self.trunc * max(g.order(), 1), g.trunc))
        exps = sorted(e // DEN for e in self.c)
        if exps[0] < 0:
            raise ValueError("compose requires nonnegative exponents")
        d = max(g.order(), 1)
        t = min(g.trunc, self.trunc // DEN * d)
        out = QSeries.zero(t)
        gp = QSeries.one(t)
        prev = 0
        for n in exps:
            gp = gp * g.truncate(t) ** (n - prev) if n > prev else gp
            prev = n
            out = out + gp.scale(self.c[DEN * n])
            out = out.truncate(min(out.trunc, t))
        return out

    # -- io / numerics ----------------------------------------------------
    def to_json(self):
        return {
            "var": "q",
            "den": DEN,
            "trunc": str(Fraction(self.trunc, DEN)),
            "terms": [[e, self.c[e].render()] for e in sorted(self.c)],
        }

    @staticmethod
    def from_json(obj):
        from .coeffring import parse_scalar

        t = Fraction(obj["trunc"]) * DEN
        return QSeries({e: parse_scalar(s) for e, s in obj["terms"]}, int(t))

    def evaluate(self, q24):
        """Numeric (complex) evaluation; q24 = e^{2 pi i tau / 24}.

        Taking the 24th root of the nome as input keeps fractional powers on
        the right branch for general tau in the upper half plane.
        """
        return sum(v.complex_value() * q24 ** e for e, v in self.c.items())

    def evaluate_tau(self, tau):
        import cmath

        return self.evaluate(cmath.exp(2j * cmath.pi * tau / DEN))

    def pi_uniform_weight(self):
        """If all coefficients share one pi exponent, return it, else None."""
        ws = {v.pi_exponent() for v in self.c.values()}
        return ws.pop() if len(ws) == 1 else None

    def __repr__(self):
        terms = [f"q^({e}/24)*{v.render()}" for e, v in sorted(self.c.items())[:6]]
        return f"QSeries({' + '.join(terms)} + O(q^{Fraction(self.trunc, DEN)}))"


class TLaurent:
    """Laurent series in a local coordinate T over a generic coefficient ring.

    Coefficients must support +, unary -, * (ring product), .is_zero(),
    .scale(rational or Scalar), .zero_like(), .one_like(); QSeries and the
    recursion engine's symbol polynomials both do.
    """

    __slots__ = ("c", "trunc")

    def __init__(self, coeffs=None, trunc=None):
        if trunc is None:
            raise TruncationError("TLaurent requires an explicit truncation order")
        self.trunc = int(trunc)
        self.c = {}
        if coeffs:
            for e, v in coeffs.items():
                if not v.is_zero() and e < self.trunc:
                    self.c[e] = v

    @staticmethod
    def zero(trunc):
        return TLaurent({}, trunc)

    def is_zero(self):
        return not self.c

    def order(self):
        return min(self.c) if self.c else self.trunc

    @property
    def lowest_exponent(self):
        return self.order()

    def any_coeff(self):
        if not self.c:
            raise ValueError("zero TLaurent has no coefficients")
        return next(iter(self.c.values()))

    def coeff(self, k):
        if k >= self.trunc:
            raise TruncationError(f"T^{k} beyond truncation T^{self.trunc}")
        v = self.c.get(k)
        return v if v is not None else self.any_coeff().zero_like()

    def residue(self):
        """Coefficient of T^{-1} (zero element if absent)."""
        if -1 >= self.trunc:
            raise TruncationError("residue not determined at this truncation")
        return self.coeff(-1)

    def __add__(self, other):
        t = min(self.trunc, other.trunc)
        out = {}
        for e, v in self.c.items():
            if e < t:
                out[e] = v
        for e, v in other.c.items():
            if e >= t:
                continue
            if e in out:
                s = out[e] + v
                if s.is_zero():
                    del out[e]
                else:
                    out[e] = s
            else:
                out[e] = v
        r = TLaurent.zero(t)
        r.c = out
        return r

    def __neg__(self):
        r = TLaurent.zero(self.trunc)
        r.c = {e: -v for e, v in self.c.items()}
        return r

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, TLaurent):
            return self.scale_coeff(other)
        return self.mul_trunc(other, None)

    def mul_trunc(self, other: "TLaurent", cutoff):
        """Product, skipping all output exponents >= cutoff."""
        oa, ob = self.order(), other.order()
        t = min(self.trunc + ob, other.trunc + oa)
        if cutoff is not None:
            t = min(t, cutoff)
        out = {}
        for ea, ca in self.c.items():
            for eb, cb in other.c.items():
                e = ea + eb
                if e >= t:
                    continue
                p = ca * cb
                acc = out.get(e)
                out[e] = p if acc is None else acc + p
        r = TLaurent.zero(t)
        r.c = {e: v for e, v in out.items() if not v.is_zero()}
        return r

    def residue_with(self, other: "TLaurent"):
        """Coefficient of T^{-1} in self * other, without the full product."""
        if -1 >= min(self.trunc + other.order(), other.trunc + self.order()):
            raise TruncationError("residue not determined at this truncation")
        acc = None
        for ea, ca in self.c.items():
            cb = other.c.get(-1 - ea)
            if cb is not None:
                p = ca * cb
                acc = p if acc is None else acc + p
        if acc is None:
            zsrc = self.any_coeff() if self.c else other.any_coeff()
            return zsrc.zero_like()
        return acc

    def scale(self, s):
        """Multiply every coefficient by a rational/Scalar."""
        r = TLaurent.zero(self.trunc)
        r.c = {e: v.scale(s) for e, v in self.c.items()}
        r.c = {e: v for e, v in r.c.items() if not v.is_zero()}
        return r

    def scale_coeff(self, x):
        """Multiply every coefficient by a ring element."""
        r = TLaurent.zero(self.trunc)
        r.c = {e: v * x for e, v in self.c.items()}
        r.c = {e: v for e, v in r.c.items() if not v.is_zero()}
        return r

    def shift(self, k):
        r = TLaurent.zero(self.trunc + k)
        r.c = {e + k: v for e, v in self.c.items()}
        return r

    def truncate(self, t):
        t = int(t)
        if t > self.trunc:
            raise TruncationError("cannot extend truncation")
        r = TLaurent.zero(t)
        r.c = {e: v for e, v in self.c.items() if e < t}
        return r

    def __pow__(self, n):
        if n < 0:
            return self.invert() ** (-n)
        result = None
        base = self
        while True:
            if n & 1:
                result = base if result is None else result * base
            n >>= 1
            if not n:
                break
            base = base * base
        if result is None:
            one = self.any_coeff().one_like()
            return TLaurent({0: one}, self.trunc)
        return result

    def __eq__(self, other):
        t = min(self.trunc, other.trunc)
        for e in set(self.c) | set(other.c):
            if e >= t:
                continue
            a, b = self.c.get(e), other.c.get(e)
            if a is None:
                a = b.zero_like()
            if b is None:
                b = a.zero_like()
            if not (a - b).is_zero():
                return False
        return True

    __hash__ = None

    def invert(self):
        if not self.c:
            raise NonInvertibleLeading("cannot invert zero series")
        e0 = self.order()
        c0 = self.c[e0]
        try:
            c0i = c0.invert()
        except Exception as exc:
            raise NonInvertibleLeading(f"leading coefficient not a unit: {exc}")
        n_terms = self.trunc - e0
        unit = self.shift(-e0).scale_coeff(c0i)
        one = c0.one_like()
        inv_unit = TLaurent({0: one}, n_terms)
        two = TLaurent({0: one + one}, n_terms)
        prec = 1
        while prec < n_terms:
            inv_unit = inv_unit * (two - unit * inv_unit)
            inv_unit = inv_unit.truncate(min(inv_unit.trunc, n_terms))
            prec *= 2
        return inv_unit.scale_coeff(c0i).shift(-e0)

    def derivative(self):
        """d/dT."""
        r = TLaurent.zero(self.trunc - 1)
        r.c = {e - 1: v.scale(e) for e, v in self.c.items() if e != 0}
        return r

    def primitive(self):
        """T-primitive with zero constant term; T^{-1} term must vanish."""
        if -1 in self.c and not self.c[-1].is_zero():
            raise ValueError("primitive of a series with nonzero residue")
        r = TLaurent.zero(self.trunc + 1)
        r.c = {e + 1: v.scale(Fraction(1, e + 1)) for e, v in self.c.items()
               if e != -1}
        return r

    def flip(self):
        """T -> -T."""
        r = TLaurent.zero(self.trunc)
        r.c = {e: (v if e % 2 == 0 else -v) for e, v in self.c.items()}
        return r

    def compose(self, g: "TLaurent"):
        """Substitute T -> g(T); needs order(g) >= 1 and self a power series."""
        if self.order() < 0:
            raise ValueError("compose requires a nonnegative-order series")
        if g.is_zero() or g.order() < 1:
            raise ValueError("substituted series must have positive order")
        d = g.order()
        t = min(g.trunc, self.trunc * d)
        one = g.any_coeff().one_like()
        out = TLaurent.zero(t)
        gp = TLaurent({0: one}, t)
        prev = 0
        for n in sorted(self.c):
            if n > prev:
                gp = gp * g.truncate(min(g.trunc, t)) ** (n - prev)
                gp = gp.truncate(min(gp.trunc, t))
            prev = n
            out = out + gp.scale_coeff(self.c[n])
        return out.truncate(min(out.trunc, t))

    def reversion(self):
        """Compositional inverse of a = a1 T + a2 T^2 + ... with a1 a unit."""
        if self.is_zero() or self.order() != 1:
            raise NonInvertibleLeading("reversion requires order exactly 1")
        one = self.any_coeff().one_like()
        n = self.trunc
        ident = TLaurent({1: one}, n)
        a1 = self.c[1]
        try:
            b = TLaurent({1: a1.invert()}, 2)
        except Exception as exc:
            raise NonInvertibleLeading(f"linear coefficient not a unit: {exc}")
        prec = 2
        while prec < n:
            prec = min(2 * prec, n)
            b = TLaurent(dict(b.c), prec)
            err = self.truncate(min(self.trunc, prec)).compose(b) - ident.truncate(prec)
            db = self.derivative().truncate(min(self.trunc - 1, prec)).compose(b)
            b = b - (err * db.invert()).truncate(prec)
            b = b.truncate(prec)
        return b

    def map_coeffs(self, f):
        r = TLaurent.zero(self.trunc)
        r.c = {e: f(v) for e, v in self.c.items()}
        r.c = {e: v for e, v in r.c.items() if not v.is_zero()}
        return r

    def __repr__(self):
        lo = self.order() if self.c else "-"
        return f"TLaurent(order {lo}, trunc {self.trunc}, {len(self.c)} terms)"
