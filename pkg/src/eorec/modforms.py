"""Catalog of modular and quasi-modular q-expansions.

Conventions (pinned by the torsion-value identities, see tests):

* Eisenstein series E_k = 1 - (2k/B_k) sum sigma_{k-1}(n) q^n, constant term 1.
* Jacobi theta constants use the classical half nome: theta3(m) means
  theta3 at argument m*tau with nome e^{pi i tau}, i.e. sum q^{m n^2 / 2}.
* eta(m) = q^{m/24} prod (1 - q^{mn}).
* thetaA2(m) = sum over the A2 lattice of q^{m (a^2+ab+b^2)}; with this
  convention thetaA2(1) = 1 + 6q + 6q^3 + ... is what multiplies the
  eta-quotients of the degree-three geometry.  (Checked against the weight-4
  relation 9 phi^4 - 8 phi = E4 (eta(3tau)/eta(tau)^3)^4.)
* Torsion values: e1 = wp(1/2) = (pi^2/3)(theta3^4 + theta4^4) and cyclic,
  eta1 = (pi^2/3) E2; all carry pi^2 in their Scalar coefficients.

The catalog is rebuilt per requested order; results are cached per process.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache

from .coeffring import Scalar, PI, ONE
from .series import QSeries, DEN


class UnknownGenerator(KeyError):
    pass


@dataclass(frozen=True)
class ModularElement:
    """A q-expansion with its weight grading and E2 depth."""

    series: QSeries
    weight: int
    quasi_depth: int = 0
    tag: str = ""

    def __mul__(self, other):
        if isinstance(other, ModularElement):
            return ModularElement(
                self.series * other.series,
                self.weight + other.weight,
                self.quasi_depth + other.quasi_depth,
                f"{self.tag}*{other.tag}",
            )
        return ModularElement(self.series * other, self.weight,
                              self.quasi_depth, self.tag)

    __rmul__ = __mul__

    def __add__(self, other):
        if isinstance(other, ModularElement):
            if other.weight != self.weight:
                raise ValueError(
                    f"weight mismatch: {self.tag}:{self.weight} vs "
                    f"{other.tag}:{other.weight}")
            return ModularElement(self.series + other.series, self.weight,
                                  max(self.quasi_depth, other.quasi_depth),
                                  f"{self.tag}+{other.tag}")
        return ModularElement(self.series + other, self.weight,
                              self.quasi_depth, self.tag)

    def __sub__(self, other):
        return self + (other * Scalar(-1) if isinstance(other, ModularElement)
                       else -other)

    def __neg__(self):
        return self * Scalar(-1)

    def __pow__(self, n):
        return ModularElement(self.series ** n, self.weight * n,
                              self.quasi_depth * n, f"{self.tag}^{n}")

    def scale(self, s):
        return self * s

    def retag(self, tag):
        return replace(self, tag=tag)


# ----------------------------------------------------------------- helpers
@lru_cache(maxsize=None)
def bernoulli(n: int) -> Fraction:
    """Bernoulli number B_n (B_1 = -1/2 convention)."""
    if n == 0:
        return Fraction(1)
    # recurrence sum_{k=0}^{n} C(n+1,k) B_k = 0
    from math import comb

    s = Fraction(0)
    for k in range(n):
        s += comb(n + 1, k) * bernoulli(k)
    return -s / (n + 1)


@lru_cache(maxsize=None)
def _sigma_table(k: int, order: int):
    out = [0] * order
    for d in range(1, order):
        dk = d ** k
        for n in range(d, order, d):
            out[n] += dk
    return tuple(out)


def zeta_even(n: int) -> Scalar:
    """zeta(n) for even n >= 2, as rational * pi^n."""
    if n % 2 or n < 2:
        raise ValueError("zeta_even needs even n >= 2")
    rat = Fraction((-1) ** (n // 2 + 1) * 2 ** (n - 1)) * bernoulli(n)
    rat /= Fraction(__import__("math").factorial(n))
    return Scalar(rat.numerator) * Scalar(Fraction(1, rat.denominator)) * PI ** n


# ------------------------------------------------------------------ catalog
def eisenstein(k: int, order: int) -> ModularElement:
    """E_k to q-order `order`; weight k, quasi-depth 1 iff k == 2."""
    if k < 2 or k % 2:
        raise ValueError("even k >= 2 required")
    c = Fraction(-2 * k) / bernoulli(k)
    sig = _sigma_table(k - 1, order)
    coeffs = {0: Fraction(1)}
    for n in range(1, order):
        coeffs[n] = c * sig[n]
    return ModularElement(QSeries.from_integer_coeffs(coeffs, order),
                          weight=k, quasi_depth=(1 if k == 2 else 0),
                          tag=f"E{k}")


def theta_eta_catalog(name: str, m: int, order: int) -> ModularElement:
    """Catalog q-expansions at argument multiplier m, on the 1/24 lattice."""
    if m not in (1, 2, 3, 4):
        raise ValueError("argument multiplier must be 1..4")
    cut = DEN * order
    c = {}
    if name == "theta3":
        n = 0
        while 12 * m * n * n < cut:
            c[12 * m * n * n] = c.get(12 * m * n * n, 0) + (1 if n == 0 else 2)
            n += 1
        w = Fraction(1, 2)
    elif name == "theta4":
        n = 0
        while 12 * m * n * n < cut:
            s = (1 if n == 0 else 2) * (-1) ** n
            c[12 * m * n * n] = c.get(12 * m * n * n, 0) + s
            n += 1
        w = Fraction(1, 2)
    elif name == "theta2":
        n = 0
        while 3 * m * (2 * n + 1) ** 2 < cut:
            c[3 * m * (2 * n + 1) ** 2] = c.get(3 * m * (2 * n + 1) ** 2, 0) + 2
            n += 1
        w = Fraction(1, 2)
    elif name == "eta":
        # q^{m/24} prod (1-q^{mn}) via Euler's pentagonal number theorem
        kmax = 1
        while m * DEN * kmax * (3 * kmax - 1) // 2 < cut + m:
            kmax += 1
        for k in range(-kmax, kmax + 1):
            e = m + m * DEN * (k * (3 * k - 1) // 2)
            if e < cut:
                c[e] = c.get(e, 0) + (1 if k % 2 == 0 else -1)
        w = Fraction(1, 2)
    elif name == "thetaA2":
        bound = cut // (DEN * m) + 2
        r = int(bound ** 0.5) + 2
        for a in range(-r, r + 1):
            for b in range(-r, r + 1):
                qf = a * a + a * b + b * b
                e = DEN * m * qf
                if e < cut:
                    c[e] = c.get(e, 0) + 1
        w = 1
    else:
        raise UnknownGenerator(name)
    series = QSeries({e: Scalar(v) for e, v in c.items()}, cut)
    return ModularElement(series, weight=0, quasi_depth=0,
                          tag=f"{name}({m}tau)").retag(f"{name}({m}tau)")


def torsion_values(order: int):
    """(e1, e2, e3, eta1) as weight-2 elements carrying pi^2."""
    t2 = theta_eta_catalog("theta2", 1, order).series ** 4
    t3 = theta_eta_catalog("theta3", 1, order).series ** 4
    t4 = theta_eta_catalog("theta4", 1, order).series ** 4
    pref = zeta_even(2) * Scalar(2)  # 2 zeta(2) = pi^2/3
    e1 = ModularElement((t3 + t4).scale(pref), 2, 0, "e1")
    e2 = ModularElement((-t2 - t3).scale(pref), 2, 0, "e2")
    e3 = ModularElement((t2 - t4).scale(pref), 2, 0, "e3")
    eta1 = ModularElement(eisenstein(2, order).series.scale(pref), 2, 1, "eta1")
    return e1, e2, e3, eta1


def g2_series(order: int) -> ModularElement:
    return ModularElement(
        eisenstein(4, order).series.scale(PI ** 4 * Scalar(Fraction(4, 3))),
        4, 0, "g2")


def g3_series(order: int) -> ModularElement:
    return ModularElement(
        eisenstein(6, order).series.scale(PI ** 6 * Scalar(Fraction(8, 27))),
        6, 0, "g3")


def eta24(order: int) -> ModularElement:
    """eta(tau)^24 = q prod (1-q^n)^24; weight 12, integer series."""
    return (theta_eta_catalog("eta", 1, order) ** 24).retag("eta24")


def j_invariant(order: int) -> QSeries:
    """j = 1728 E4^3 / (E4^3 - E6^2), starting q^{-1} + 744 + ..."""
    e4 = eisenstein(4, order + 1).series
    e6 = eisenstein(6, order + 1).series
    num = (e4 ** 3).scale(1728)
    den = e4 ** 3 - e6 ** 2
    return num * den.invert()


def ramanujan_derivative(el: ModularElement) -> ModularElement:
    """q d/dq, raising weight by 2 and quasi-depth by 1."""
    return ModularElement(el.series.qdq(), el.weight + 2, el.quasi_depth + 1,
                          f"D({el.tag})")


def catalog_dump(order: int) -> dict:
    """Every generator's series as JSON (regression snapshots)."""
    out = {}
    for k in (2, 4, 6):
        el = eisenstein(k, order)
        out[el.tag] = {"weight": el.weight, "quasi_depth": el.quasi_depth,
                       "series": el.series.to_json()}
    for name in ("theta2", "theta3", "theta4", "eta", "thetaA2"):
        for m in (1, 2, 3, 4):
            el = theta_eta_catalog(name, m, order)
            out[el.tag] = {"weight": str(el.weight), "quasi_depth": 0,
                           "series": el.series.to_json()}
    for el in torsion_values(order):
        out[el.tag] = {"weight": el.weight, "quasi_depth": el.quasi_depth,
                       "series": el.series.to_json()}
    for el in (g2_series(order), g3_series(order), eta24(order)):
        out[el.tag] = {"weight": el.weight, "quasi_depth": el.quasi_depth,
                       "series": el.series.to_json()}
    return out
