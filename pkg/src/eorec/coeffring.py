"""Exact scalar coefficients over the rationals with tracked constants.

A Scalar is a finite sum of terms  p/q * pi^a * i^b * zeta6^c * cbrt2^d *
sqrt3^e * cbrtm4^f [* sqrt2^g * zeta8^h], each exponent vector reduced by the
relation table

    i^2 = -1,  zeta6^3 = -1,  cbrt2^3 = 2,  sqrt3^2 = 3,  cbrtm4^3 = -4,
    sqrt2^2 = 2,  zeta8^2 = i.

The pi exponent is a free integer.  Most scalars arising in practice are a
single monomial; sums appear in the branch-point data of the quartic curve
families (coefficients like 1 - sqrt2).  A Scalar is zero iff it has no
terms; rational_part() raises while any constant survives.
"""

from __future__ import annotations

from fractions import Fraction

try:
    from gmpy2 import mpq as _mpq, isqrt as _isqrt

    def RAT(a=0, b=1):
        return _mpq(a, b)

    HAVE_GMPY2 = True
except ImportError:  # pragma: no cover - exercised only without gmpy2
    from math import isqrt as _isqrt

    def RAT(a=0, b=1):
        return Fraction(a, b)

    HAVE_GMPY2 = False


class NonRational(ValueError):
    """Raised when a Scalar with residual constants is forced to a fraction."""


class SqrtError(ValueError):
    """Raised when a Scalar has no square root in the tracked ring."""


# Order of the tracked constants in the exponent vector.
NAMES = ("pi", "i", "zeta6", "cbrt2", "sqrt3", "cbrtm4", "sqrt2", "zeta8")
_PI, _I, _Z6, _R2, _R3, _R4, _S2, _Z8 = range(8)

ZEROEXP = (0,) * 8
_RAT_ONE = RAT(1)


def _rat(x):
    """Coerce ints / Fractions / backend rationals to the backend type."""
    if type(x) is type(_RAT_ONE):
        return x
    if isinstance(x, Fraction):
        return RAT(x.numerator, x.denominator)
    return RAT(x)


def _reduce(q, e):
    """Reduce one exponent vector by the relation table; returns (q, e)."""
    if (0 <= e[1] <= 1 and 0 <= e[2] <= 2 and 0 <= e[3] <= 2
            and 0 <= e[4] <= 1 and 0 <= e[5] <= 2 and 0 <= e[6] <= 1
            and 0 <= e[7] <= 1):
        return q, (e if type(e) is tuple else tuple(e))
    e = list(e)
    # zeta8^2 = i : fold first so the i overflow is handled below.
    if not 0 <= e[_Z8] <= 1:
        k, e[_Z8] = divmod(e[_Z8], 2)
        e[_I] += k
    if not 0 <= e[_I] <= 1:
        k, e[_I] = divmod(e[_I], 2)
        if k % 2:
            q = -q
    if not 0 <= e[_Z6] <= 2:
        k, e[_Z6] = divmod(e[_Z6], 3)
        if k % 2:
            q = -q
    if not 0 <= e[_R2] <= 2:
        k, e[_R2] = divmod(e[_R2], 3)
        q = q * RAT(2) ** k
    if not 0 <= e[_R3] <= 1:
        k, e[_R3] = divmod(e[_R3], 2)
        q = q * RAT(3) ** k
    if not 0 <= e[_R4] <= 2:
        k, e[_R4] = divmod(e[_R4], 3)
        q = q * RAT(-4) ** k
    if not 0 <= e[_S2] <= 1:
        k, e[_S2] = divmod(e[_S2], 2)
        q = q * RAT(2) ** k
    return q, tuple(e)


class Scalar:
    __slots__ = ("t",)

    def __init__(self, q=0, e=ZEROEXP, _terms=None):
        if _terms is not None:
            self.t = _terms
            return
        if isinstance(q, Scalar):
            raise TypeError("nested Scalar")
        q = _rat(q)
        if q == 0:
            self.t = {}
        else:
            q, e = _reduce(q, e)
            self.t = {e: q}

    # -- constructors -------------------------------------------------
    @staticmethod
    def rational(a, b=1):
        return Scalar(RAT(a, b))

    @staticmethod
    def const(name, power=1):
        e = [0] * 8
        e[NAMES.index(name)] = power
        return Scalar(RAT(1), tuple(e))

    # -- predicates ----------------------------------------------------
    def is_zero(self):
        return not self.t

    def is_rational(self):
        return not self.t or (len(self.t) == 1 and ZEROEXP in self.t)

    def is_monomial(self):
        return len(self.t) <= 1

    def rational_part(self):
        """Exact fraction value; NonRational if any constant survives."""
        if not self.t:
            return Fraction(0)
        if not self.is_rational():
            raise NonRational(f"residual constants in {self}")
        q = self.t[ZEROEXP]
        return Fraction(int(q.numerator), int(q.denominator))

    def pi_exponent(self):
        """The common pi exponent of all terms, or None if they differ."""
        ws = {e[_PI] for e in self.t}
        return ws.pop() if len(ws) == 1 else None

    def monomial(self):
        """(rational, exponent-tuple) of a single-term scalar."""
        if len(self.t) != 1:
            raise NonRational(f"not a monomial: {self}")
        e, q = next(iter(self.t.items()))
        return q, e

    # -- arithmetic ------------------------------------------------------
    def __mul__(self, other):
        if not isinstance(other, Scalar):
            r = _rat(other)
            if r == 0:
                return Scalar(0)
            return Scalar(_terms={e: q * r for e, q in self.t.items()})
        ta, tb = self.t, other.t
        if len(ta) == 1 and len(tb) == 1:
            # fast path: monomial x monomial
            (e1, q1), = ta.items()
            (e2, q2), = tb.items()
            if e2 == ZEROEXP:
                return Scalar(_terms={e1: q1 * q2})
            if e1 == ZEROEXP:
                return Scalar(_terms={e2: q1 * q2})
            q, e = _reduce(q1 * q2, (e1[0] + e2[0], e1[1] + e2[1],
                                     e1[2] + e2[2], e1[3] + e2[3],
                                     e1[4] + e2[4], e1[5] + e2[5],
                                     e1[6] + e2[6], e1[7] + e2[7]))
            return Scalar(_terms={e: q})
        out = {}
        for e1, q1 in ta.items():
            for e2, q2 in tb.items():
                q, e = _reduce(q1 * q2, tuple(a + b for a, b in zip(e1, e2)))
                acc = out.get(e)
                q = q if acc is None else acc + q
                if q == 0:
                    out.pop(e, None)
                else:
                    out[e] = q
        return Scalar(_terms=out)

    __rmul__ = __mul__

    def inv(self):
        if not self.t:
            raise ZeroDivisionError("scalar inverse of zero")
        if len(self.t) == 1:
            e, q = next(iter(self.t.items()))
            qq, ee = _reduce(1 / q, tuple(-x for x in e))
            return Scalar(_terms={ee: qq})
        return self._inv_sum()

    def _inv_sum(self):
        """Invert a finite monomial sum by a linear solve in the span of the
        (finite) multiplicative closure of its non-pi monomials.

        All terms must share one pi exponent (they do for weight-graded data).
        """
        piw = self.pi_exponent()
        if piw is None:
            raise NonRational(f"inverse of pi-inhomogeneous scalar: {self}")
        pifree = self * Scalar.const("pi", -piw)
        gens = [Scalar(_terms={e: q}) for e, q in pifree.t.items()]
        basis = [ZEROEXP]
        seen = {ZEROEXP}
        frontier = [ZEROEXP]
        while frontier:
            nxt = []
            for b in frontier:
                for g in gens:
                    (ge, _gq), = g.t.items()
                    _q, e = _reduce(RAT(1), tuple(a + c for a, c in zip(b, ge)))
                    if e not in seen:
                        seen.add(e)
                        basis.append(e)
                        nxt.append(e)
            frontier = nxt
            if len(basis) > 1024:
                raise NonRational(f"monomial closure too large for {self}")
        index = {e: i for i, e in enumerate(basis)}
        n = len(basis)
        # matrix of multiplication by pifree on the basis
        mat = [[RAT(0)] * n for _ in range(n)]
        for j, b in enumerate(basis):
            prod = pifree * Scalar(_terms={b: RAT(1)})
            for e, q in prod.t.items():
                mat[index[e]][j] = q
        rhs = [RAT(0)] * n
        rhs[index[ZEROEXP]] = RAT(1)
        # Gaussian elimination
        for col in range(n):
            piv = next((r for r in range(col, n) if mat[r][col] != 0), None)
            if piv is None:
                raise NonRational(f"singular monomial sum {self}")
            mat[col], mat[piv] = mat[piv], mat[col]
            rhs[col], rhs[piv] = rhs[piv], rhs[col]
            inv_p = 1 / mat[col][col]
            mat[col] = [v * inv_p for v in mat[col]]
            rhs[col] = rhs[col] * inv_p
            for r in range(n):
                if r != col and mat[r][col] != 0:
                    f = mat[r][col]
                    mat[r] = [a - f * b for a, b in zip(mat[r], mat[col])]
                    rhs[r] = rhs[r] - f * rhs[col]
        out = Scalar(0)
        for i, e in enumerate(basis):
            if rhs[i] != 0:
                out = out + Scalar(rhs[i], e)
        return out * Scalar.const("pi", -piw)

    def __truediv__(self, other):
        if isinstance(other, Scalar):
            return self * other.inv()
        return Scalar(_terms={e: q / _rat(other) for e, q in self.t.items()})

    def __pow__(self, n):
        if n == 0:
            return ONE
        if n < 0:
            return self.inv() ** (-n)
        out = ONE
        base = self
        while True:
            if n & 1:
                out = out * base
            n >>= 1
            if not n:
                break
            base = base * base
        return out

    def __neg__(self):
        return Scalar(_terms={e: -q for e, q in self.t.items()})

    def __add__(self, other):
        if not isinstance(other, Scalar):
            other = Scalar(_rat(other))
        ta, tb = self.t, other.t
        if not ta:
            return other
        if not tb:
            return self
        if len(ta) == 1 and len(tb) == 1:
            (e1, q1), = ta.items()
            (e2, q2), = tb.items()
            if e1 == e2:
                q = q1 + q2
                return Scalar(_terms=({e1: q} if q != 0 else {}))
            return Scalar(_terms={e1: q1, e2: q2})
        out = dict(ta)
        for e, q in tb.items():
            acc = out.get(e)
            q = q if acc is None else acc + q
            if q == 0:
                out.pop(e, None)
            else:
                out[e] = q
        return Scalar(_terms=out)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, Scalar):
            other = Scalar(_rat(other))
        return self + (-other)

    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self.t == other.t
        r = _rat(other)
        if r == 0:
            return not self.t
        return self.t == {ZEROEXP: r}

    def __hash__(self):
        return hash(tuple(sorted((e, str(q)) for e, q in self.t.items())))

    def sqrt(self):
        """Square root of a monomial scalar staying inside the ring."""
        if not self.t:
            return Scalar(0)
        q, e = self.monomial()
        extra = [0] * 8
        if q < 0:
            q = -q
            extra[_I] += 1
        num, den = q.numerator, q.denominator
        n = int(num * den)  # sqrt(q) = sqrt(num*den)/den
        root = int(_isqrt(n))
        if root * root == n:
            rq = RAT(root, den)
        elif (n % 2 == 0) and int(_isqrt(n // 2)) ** 2 == n // 2:
            rq = RAT(int(_isqrt(n // 2)), den)
            extra[_S2] += 1
        elif (n % 3 == 0) and int(_isqrt(n // 3)) ** 2 == n // 3:
            rq = RAT(int(_isqrt(n // 3)), den)
            extra[_R3] += 1
        elif (n % 6 == 0) and int(_isqrt(n // 6)) ** 2 == n // 6:
            rq = RAT(int(_isqrt(n // 6)), den)
            extra[_S2] += 1
            extra[_R3] += 1
        else:
            raise SqrtError(f"rational part of {self} is not a tracked square")
        half = []
        for idx, x in enumerate(e):
            if x % 2 == 0:
                half.append(x // 2)
            elif idx == _I and x == 1:
                half.append(0)
                extra[_Z8] += 1  # sqrt(i) = zeta8
            elif idx == _R2:
                # cbrt2^(2k+1): sqrt = cbrt2^((2k+1)*... ) not in the ring
                raise SqrtError(f"odd exponent for {NAMES[idx]} in {self}")
            else:
                raise SqrtError(f"odd exponent for {NAMES[idx]} in {self}")
        return Scalar(RAT(1), tuple(a + b for a, b in zip(half, extra))) * \
            Scalar(rq)

    # -- rendering -------------------------------------------------------
    @staticmethod
    def _render_term(e, q):
        parts = [f"{q.numerator}/{q.denominator}"]
        for name, x in zip(NAMES, e):
            if x:
                parts.append(f"{name}^{x}")
        return " * ".join(parts)

    def render(self):
        """Canonical text form used in JSON output."""
        if not self.t:
            return "0/1"
        return " + ".join(self._render_term(e, q)
                          for e, q in sorted(self.t.items()))

    def __repr__(self):
        return f"Scalar({self.render()})"

    def complex_value(self):
        """Double-precision value (numeric oracle support)."""
        import cmath
        vals = (
            cmath.pi, 1j, cmath.exp(1j * cmath.pi / 3), 2.0 ** (1 / 3),
            3.0 ** 0.5, 4.0 ** (1 / 3) * cmath.exp(1j * cmath.pi / 3),
            2.0 ** 0.5, cmath.exp(1j * cmath.pi / 4),
        )
        out = 0j
        for e, q in self.t.items():
            term = complex(Fraction(int(q.numerator), int(q.denominator)))
            for v, x in zip(vals, e):
                if x:
                    term *= v ** x
            out += term
        return out


ONE = Scalar(1)
ZERO = Scalar(0)

PI = Scalar.const("pi")
IMAG = Scalar.const("i")
ZETA6 = Scalar.const("zeta6")
CBRT2 = Scalar.const("cbrt2")
SQRT3 = Scalar.const("sqrt3")
CBRTM4 = Scalar.const("cbrtm4")
SQRT2 = Scalar.const("sqrt2")
ZETA8 = Scalar.const("zeta8")


def as_scalar(x) -> Scalar:
    if isinstance(x, Scalar):
        return x
    if isinstance(x, Fraction):
        return Scalar(RAT(x.numerator, x.denominator))
    return Scalar(RAT(x))


def parse_scalar(text: str) -> Scalar:
    """Inverse of Scalar.render()."""
    total = Scalar(0)
    for term in text.split(" + "):
        parts = [p.strip() for p in term.split("*")]
        num, den = parts[0].split("/")
        e = [0] * 8
        for p in parts[1:]:
            name, x = p.split("^")
            e[NAMES.index(name)] = int(x)
        total = total + Scalar(RAT(int(num), int(den)), tuple(e))
    return total
