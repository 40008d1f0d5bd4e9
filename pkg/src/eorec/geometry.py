"""Per-geometry data: curves, hyperelliptic splits, uniformizations, mirror maps.

Four one-parameter families of genus-one mirror curves are built in.  Each
curve y^2 + 2h(x) y + d(x) = 0 is put in hyperelliptic form yt^2 = g(x),
g = h^2 - d, and uniformized through the Weierstrass normal form:

* the homothety lambda is pinned by g2_alg / lambda^4 = (4/3) pi^4 E4 and
  g3_alg / lambda^6 = (8/27) pi^6 E6.  lambda^2 comes out rational in the
  catalog, lambda^3 by one square root; the consistency check
  (lambda^2)^2 = lambda^4 is equivalent to j(curve params(tau)) = j(tau) and
  is asserted at build time (it pins the modular frame of the parameters).
* cubic g (degree-three family): x = (1/12 - lambda^2 wp)/q1 with the
  branch point over x = infinity sitting at u = 0, so the finite
  ramification points are the three half-periods.
* quartic g: one branch root x0(q) is computed exactly (series square roots,
  or a Newton solve) and x = x0 + c3/(lambda^2 wp - c2/3) with
  c3 = g'(x0), c2 = g''(x0)/2; then u = 0 is a ramification point and the
  full set is the four 2-torsion points.

The degree-three family's parameter q1(q) is obtained by Newton-solving the
j-invariant matching; the branch with q1 = -q^{1/3}(1 + ...) is the one
compatible with the large-radius expansions used for invariant extraction.
"""

from __future__ import annotations

import math

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .coeffring import Scalar, PI, IMAG, ONE, as_scalar
from .series import QSeries, TLaurent, DEN, BranchError
from .modforms import eisenstein, theta_eta_catalog, j_invariant
from .elliptic import catalog, wp_value_at_2torsion, wp_laurent_at_origin, \
    wp_derivative_poly

GEOMETRY_NAMES = ("kp2", "kp1xp1", "kwp112", "kf1")

DEFAULT_SUBFAMILY = {"kp2": "main", "kp1xp1": "diagonal",
                     "kwp112": "b4zero", "kf1": "q1one"}


class UnsupportedSubfamily(ValueError):
    pass


class NotImplementedForGeometry(NotImplementedError):
    pass


class UnresolvedPoint(ValueError):
    pass


class NotHyperelliptic(ValueError):
    pass


class GeometryError(AssertionError):
    """Internal consistency failure while building geometry data."""


# ---------------------------------------------------------- poly helpers
def poly_eval_q(coeffs, x):
    """Evaluate sum coeffs[i] x^i for QSeries x (Horner)."""
    out = None
    for c in reversed(coeffs):
        cq = c if isinstance(c, QSeries) else QSeries({0: as_scalar(c)}, x.trunc)
        out = cq if out is None else out * x + cq
    return out


def poly_eval_T(coeffs, xt: TLaurent, one_q: QSeries):
    """Evaluate sum coeffs[i] x^i for TLaurent x with QSeries coefficients."""
    out = None
    for c in reversed(coeffs):
        cq = c if isinstance(c, QSeries) else QSeries({0: as_scalar(c)}, one_q.trunc)
        ct = TLaurent({0: cq}, xt.trunc - min(xt.order(), 0) * len(coeffs))
        out = ct if out is None else out * xt + ct
    return out


def poly_derivative(coeffs):
    return [c.scale(i) if isinstance(c, QSeries) else c * i
            for i, c in enumerate(coeffs)][1:]


def hyperelliptic_split(curve_poly, trunc):
    """(h, g) with (y + h)^2 = g from H = y^2 + c(x) y + d(x).

    curve_poly: {(i, j): QSeries or rational} for x^i y^j.
    """
    ydeg = max(j for (_i, j) in curve_poly)
    if ydeg != 2:
        raise NotHyperelliptic(f"y-degree {ydeg} != 2")
    y2 = curve_poly.get((0, 2))
    if not (y2 == 1 or (isinstance(y2, QSeries) and y2 == QSeries.one(y2.trunc))):
        raise NotHyperelliptic("y^2 coefficient must be 1")

    def as_q(v):
        return v if isinstance(v, QSeries) else QSeries({0: as_scalar(v)}, trunc)

    cdeg = max((i for (i, j) in curve_poly if j == 1), default=0)
    ddeg = max((i for (i, j) in curve_poly if j == 0), default=0)
    c = [as_q(curve_poly.get((i, 1), 0)) for i in range(cdeg + 1)]
    d = [as_q(curve_poly.get((i, 0), 0)) for i in range(ddeg + 1)]
    h = [ci.scale(Fraction(1, 2)) for ci in c]
    # g = h^2 - d
    g = [QSeries.zero(trunc) for _ in range(max(2 * len(h) - 1, len(d)))]
    for i, hi in enumerate(h):
        for j, hj in enumerate(h):
            g[i + j] = g[i + j] + hi * hj
    for i, di in enumerate(d):
        g[i] = g[i] - di
    while len(g) > 1 and g[-1].is_zero():
        g.pop()
    return h, g


def quartic_g2g3(a):
    """Weierstrass invariants of y^2 = quartic; a = [a0..a_deg] by x-degree."""
    a = list(a) + [a[0].zero_like()] * (5 - len(a))
    e, d, c, b, aa = a  # e + d x + c x^2 + b x^3 + a x^4
    g2 = aa * e - (b * d).scale(Fraction(1, 4)) + (c * c).scale(Fraction(1, 12))
    g3 = (aa * c * e).scale(Fraction(1, 6)) \
        - (aa * d * d).scale(Fraction(1, 16)) \
        - (b * b * e).scale(Fraction(1, 16)) \
        + (b * c * d).scale(Fraction(1, 48)) \
        - (c * c * c).scale(Fraction(1, 216))
    return g2, g3


def newton_root(gpoly, seed: QSeries, rounds: int = 200):
    """Newton-polish a root of a polynomial with QSeries coefficients."""
    gp = poly_derivative(gpoly)
    x = seed
    stall = 0
    prev_val = None
    for _ in range(rounds):
        r = poly_eval_q(gpoly, x)
        if r.is_zero():
            return x
        val = r.order()
        if prev_val is not None and val <= prev_val:
            stall += 1
            if stall > 3:
                raise GeometryError("Newton iteration stalled on branch root")
        else:
            stall = 0
        prev_val = val
        x = x - r * poly_eval_q(gp, x).invert()
    raise GeometryError("branch-root Newton did not converge")


# ------------------------------------------------------------- geometry data
@dataclass
class GeometryData:
    name: str
    subfamily: str
    q_order: int
    params: dict
    curve_poly: dict
    h_poly: list
    g_poly: list
    ramification: tuple
    lam2: QSeries = None
    lam3: QSeries = None
    lam4: QSeries = None
    lam6: QSeries = None
    x0: QSeries = None           # branch root at u = 0 (None for kp2)
    c2: QSeries = None
    c3: QSeries = None
    _locals: dict = field(default_factory=dict)

    # -- uniformization as T-series -------------------------------------
    def wp_at(self, r: int, t_order: int):
        """(wp(u_r + T), wp'(u_r + T)) as TLaurent over QSeries."""
        if r == 0:
            return (wp_laurent_at_origin(0, 1, t_order, self.q_order),
                    wp_laurent_at_origin(1, 1, t_order, self.q_order))
        pc, dc = {}, {}
        for j in range(t_order):
            v = wp_value_at_2torsion(r, j, self.q_order)
            if not v.is_zero():
                pc[j] = v.scale(Fraction(1, math.factorial(j)))
            w = wp_value_at_2torsion(r, j + 1, self.q_order)
            if not w.is_zero():
                dc[j] = w.scale(Fraction(1, math.factorial(j)))
        return TLaurent(pc, t_order), TLaurent(dc, t_order)

    def xy_from_wp(self, wp: TLaurent, wpd: TLaurent):
        """(x, yt) from (wp, wp') series; yt = y + h(x)."""
        if self.name == "kp2":
            q1 = self.params["q1"]
            q1i = q1.invert()
            x = (-wp.scale_coeff(self.lam2)
                 + TLaurent({0: QSeries({0: ONE}, q1.trunc).scale(Fraction(1, 12))},
                            wp.trunc)).scale_coeff(q1i)
            yt = wpd.scale_coeff(self.lam3 * q1i.scale(Fraction(1, 2)))
            return x, yt
        den = wp.scale_coeff(self.lam2) - TLaurent(
            {0: self.c2.scale(Fraction(1, 3))}, wp.trunc)
        deni = den.invert()
        x = deni.scale_coeff(self.c3) + TLaurent({0: self.x0}, deni.trunc)
        yt = (deni * deni).scale_coeff(
            (self.c3 * self.lam3).scale(Fraction(1, 2))) * wpd
        return x, yt

    def local_data(self, r: int, t_order: int):
        """Expansions at u = u_r + T: x, dx = x', ym = y - y*, yp = y + y*.

        Also y itself and the hyperelliptic residual for the master test.
        """
        key = (r, t_order)
        if key in self._locals:
            return self._locals[key]
        if r not in self.ramification:
            raise UnresolvedPoint(f"label {r} not a finite ramification point")
        wp, wpd = self.wp_at(r, t_order + 4)
        x, yt = self.xy_from_wp(wp, wpd)
        one_q = QSeries.one(catalog(self.q_order).trunc())
        h_of_x = poly_eval_T(self.h_poly, x, one_q)
        data = {
            "x": x,
            "dx": x.derivative(),
            "y": yt - h_of_x,
            "ym": yt + yt,              # y - y* = 2 yt
            "yp": -(h_of_x + h_of_x),   # y + y* = -2h
            "yt": yt,
        }
        self._locals[key] = data
        return data

    def curve_residual(self, r: int, t_order: int) -> TLaurent:
        """H(x(u), y(u)) expanded at u_r; identically zero if data coheres."""
        d = self.local_data(r, t_order)
        x, y = d["x"], d["y"]
        qtr = catalog(self.q_order).trunc()
        out = None
        for (i, j), cv in sorted(self.curve_poly.items()):
            cq = cv if isinstance(cv, QSeries) else QSeries(
                {0: as_scalar(cv)}, qtr)
            term = TLaurent({0: cq}, x.trunc + 40)
            for _ in range(i):
                term = term * x
            for _ in range(j):
                term = term * y
            out = term if out is None else out + term
        return out

    def branch_x_values(self, t_order: int = 6):
        """x(u_r) for each finite ramification label."""
        out = {}
        for r in self.ramification:
            if r == 0:
                out[r] = self.x0
            else:
                cat = catalog(self.q_order)
                if self.name == "kp2":
                    q1i = self.params["q1"].invert()
                    out[r] = (QSeries({0: ONE}, cat.trunc()).scale(Fraction(1, 12))
                              - self.lam2 * cat.e[r]) * q1i
                else:
                    den = self.lam2 * cat.e[r] - self.c2.scale(Fraction(1, 3))
                    out[r] = self.x0 + self.c3 * den.invert()
        return out


# --------------------------------------------------------------- j matching
def _lambda_data(g2_alg: QSeries, g3_alg: QSeries, q_order: int):
    """lambda powers from the invariant matching; asserts the frame check."""
    cat = catalog(q_order)
    g2_tau = cat.g2   # (4/3) pi^4 E4
    g3_tau = cat.g3   # (8/27) pi^6 E6
    lam4 = g2_alg * g2_tau.invert()
    lam6 = g3_alg * g3_tau.invert()
    lam2 = lam6 * lam4.invert()
    if not (lam2 * lam2 == lam4):
        raise GeometryError(
            "j-frame mismatch: (lambda^2)^2 != lambda^4; the parameter series "
            "is not in the uniformizing frame")
    lam3 = lam6.sqrt()
    return lam2, lam3, lam4, lam6


def _kp2_q1(q_order: int) -> QSeries:
    """Solve j(q1) = j(q) on the branch q1 = -q^{1/3}(1 + ...).

    Fixed point of v = (1 - 24 t v) / (A (1 - 27 t v))^{1/3} with q1 = -t v,
    t = q^{1/3}, A = j(q) t^3 (a unit integer series with A(0) = 1).
    """
    cut = DEN * q_order
    t = QSeries({8: ONE}, cut + 9)
    A = j_invariant(q_order + 2).truncate(cut + 1) * (t ** 3)
    v = QSeries.one(A.trunc)
    for _ in range(3 * q_order + 6):
        tv = (t * v).truncate(min(t.trunc, A.trunc))
        den = (A * (1 - tv.scale(27))).nth_root_unit(3)
        v_new = (1 - tv.scale(24)) * den.invert()
        v_new = v_new.truncate(min(v_new.trunc, A.trunc))
        if v_new == v:
            v = v_new
            break
        v = v_new
    q1 = -(t * v)
    # verify: -(1+24 q1)^3 = j q1^3 (1+27 q1)
    j = j_invariant(q_order + 2)
    lhs = -((1 + q1.scale(24)) ** 3)
    rhs = j * q1 ** 3 * (1 + q1.scale(27))
    if not (lhs == rhs):
        raise GeometryError("kp2 parameter branch does not match j")
    return q1


# -------------------------------------------------------- builtin geometries
@lru_cache(maxsize=32)
def builtin_geometry(name: str, subfamily: str = None, q_order: int = 8) -> GeometryData:
    if name not in GEOMETRY_NAMES:
        raise UnsupportedSubfamily(f"unknown geometry {name!r}")
    subfamily = subfamily or DEFAULT_SUBFAMILY[name]
    if subfamily != DEFAULT_SUBFAMILY[name]:
        raise UnsupportedSubfamily(
            f"{name}: subfamily {subfamily!r} not in the built-in list")
    ord_int = q_order + 8
    cat = catalog(q_order)
    cut = cat.trunc()
    one = QSeries.one(DEN * ord_int)

    if name == "kp2":
        q1 = _kp2_q1(q_order)
        params = {"q1": q1.truncate(min(q1.trunc, cut + 8))}
        q1 = params["q1"]
        curve = {(0, 2): 1, (0, 1): 1, (1, 1): 1, (3, 0): q1}
        h, g = hyperelliptic_split(curve, q1.trunc)
        # direct reduction: g2_alg = 2 q1 + 1/12, g3_alg = -(q1^2+q1/6+1/216)
        g2_alg = q1.scale(2) + Fraction(1, 12)
        g3_alg = -(q1 * q1 + q1.scale(Fraction(1, 6)) + Fraction(1, 216))
        lam2, lam3, lam4, lam6 = _lambda_data(g2_alg, g3_alg, q_order)
        geom = GeometryData(name, subfamily, q_order, params, curve, h, g,
                            ramification=(1, 2, 3),
                            lam2=lam2, lam3=lam3, lam4=lam4, lam6=lam6)
        return geom

    if name == "kp1xp1":
        eta_1 = theta_eta_catalog("eta", 1, ord_int).series
        eta_4 = theta_eta_catalog("eta", 4, ord_int).series
        s = -(eta_1 ** 8) * (eta_4 ** 8).invert() * Scalar(Fraction(1, 256))
        params = {"q1": s, "q2": s}
        curve = {(0, 2): 1, (0, 1): 1, (1, 1): 1, (2, 1): s, (2, 0): s}
        h, g = hyperelliptic_split(curve, s.trunc)
        # branch root of q1 x^2 + (1 - 2 sqrt(q2)) x + 1 = 0 (from h = sqrt(q2) x)
        sq_s = s.sqrt()
        disc = (1 - sq_s.scale(4)).sqrt()
        x0 = (sq_s.scale(2) - 1 - disc) * s.invert().scale(Fraction(1, 2))
    elif name == "kwp112":
        t2 = theta_eta_catalog("theta2", 2, ord_int).series ** 4
        t3 = theta_eta_catalog("theta3", 2, ord_int).series ** 4
        t4 = theta_eta_catalog("theta4", 2, ord_int).series ** 4
        q2 = (t4 ** 2) * ((t2 + t3) ** 2).invert() * Scalar(Fraction(1, 64))
        params = {"q1": QSeries.zero(q2.trunc), "q2": q2}
        curve = {(0, 2): 1, (0, 1): 1, (1, 1): 1, (4, 0): q2}
        h, g = hyperelliptic_split(curve, q2.trunc)
        # branch root of 2 sqrt(q2) x^2 + x + 1 = 0 (from h = -sqrt(q2) x^2);
        # this pair degenerates at q -> 0, keeping coefficients graded
        sq = q2.sqrt()
        disc = (1 - sq.scale(8)).sqrt()
        x0 = (disc - 1) * sq.invert().scale(Fraction(1, 4))
    elif name == "kf1":
        eta_1 = theta_eta_catalog("eta", 1, ord_int).series
        eta_4 = theta_eta_catalog("eta", 4, ord_int).series
        s = (eta_1 ** 8) * (eta_4 ** 8).invert() * Scalar(Fraction(1, 256))
        params = {"q1": QSeries.one(s.trunc), "q2": s}
        curve = {(0, 2): 1, (0, 1): 1, (1, 1): 1, (2, 1): s, (1, 0): 1}
        h, g = hyperelliptic_split(curve, s.trunc)
        # degenerate-pair seed x = (i + zeta8^{-1} q2^{-1/4}) q2^{-1/2}
        from .coeffring import ZETA8
        isq = s.sqrt().invert()
        quarter = s.sqrt().sqrt().invert()
        seed = (QSeries({0: IMAG}, s.trunc) + quarter.scale(ZETA8.inv())) * isq
        x0 = newton_root(g, seed)
    else:  # pragma: no cover
        raise UnsupportedSubfamily(name)

    if name != "kf1":
        r = poly_eval_q(g, x0)
        if not r.is_zero():
            raise GeometryError(f"{name}: branch root does not satisfy g = 0")
    gp = poly_derivative(g)
    gpp = poly_derivative(gp)
    c3 = poly_eval_q(gp, x0)
    c2 = poly_eval_q(gpp, x0).scale(Fraction(1, 2))
    c1 = poly_eval_q(poly_derivative(gpp), x0).scale(Fraction(1, 6))
    c0 = g[4] if len(g) > 4 else QSeries.zero(cut)
    # Weierstrass data in the frame of the explicit map x = x0 + c3/(...);
    # this normalization is 16 x (binary I/12) and 64 x (binary J/432).
    g2_alg = (c2 * c2).scale(Fraction(4, 3)) - (c1 * c3).scale(4)
    g3_alg = -(c2 ** 3).scale(Fraction(8, 27)) + (c1 * c2 * c3).scale(Fraction(4, 3)) \
        - (c0 * c3 * c3).scale(4)
    g2_bin, g3_bin = quartic_g2g3(g)
    if not (g2_alg == g2_bin.scale(16) and g3_alg == g3_bin.scale(64)):
        raise GeometryError(f"{name}: root-based reduction disagrees with the "
                            "binary quartic invariants")
    lam2, lam3, lam4, lam6 = _lambda_data(g2_alg, g3_alg, q_order)
    return GeometryData(name, subfamily, q_order, params, curve, h, g,
                        ramification=(0, 1, 2, 3),
                        lam2=lam2, lam3=lam3, lam4=lam4, lam6=lam6,
                        x0=x0, c2=c2, c3=c3)


# ------------------------------------------------------------- mirror maps
@dataclass(frozen=True)
class ClosedMirrorMap:
    """T = i pi + log(-q1/27) + tail(q1) for the degree-three geometry."""

    order: int
    tail: tuple  # tail[k] = coefficient of q1^k, k >= 1

    def tail_series_of(self, q1_series: QSeries) -> QSeries:
        out = QSeries.zero(q1_series.trunc - q1_series.order())
        p = QSeries.one(out.trunc)
        for k in range(1, self.order + 1):
            p = p * q1_series
            out = out + p.scale(self.tail[k])
        return out

    def Q_series_of(self, q1_series: QSeries) -> QSeries:
        """Q = e^T = (q1/27) e^{tail}."""
        return q1_series.scale(Fraction(1, 27)) * \
            self.tail_series_of(q1_series).exp()

    def qdq_T_of(self, q1_series: QSeries) -> QSeries:
        """q dT/dq = (q dq1/dq)(1/q1 + tail'(q1))."""
        dq1 = q1_series.qdq()
        tailp = QSeries.zero(q1_series.trunc - q1_series.order())
        p = QSeries.one(tailp.trunc)
        for k in range(1, self.order + 1):
            if k > 1:
                p = p * q1_series
            tailp = tailp + p.scale(k * self.tail[k])
        return dq1 * (q1_series.invert() + tailp)


@lru_cache(maxsize=16)
def mirror_map_closed(name: str, order: int) -> ClosedMirrorMap:
    """The closed mirror map as an exact series in the curve parameter.

    T = log(-1) + log(-q1/27) + sum_{k>=1} (3k)!/(k!)^3 (1/k) (-q1/27)^k,
    with log(-1) = i pi fixed globally.  Degree-three geometry only.
    """
    if name != "kp2":
        raise NotImplementedForGeometry(
            f"closed mirror map series not available for {name}; supply "
            "period data through the plug-in point")
    tail = [Fraction(0)]
    for k in range(1, order + 1):
        tail.append(Fraction(math.factorial(3 * k),
                             math.factorial(k) ** 3 * k) *
                    Fraction(-1, 27) ** k)
    return ClosedMirrorMap(order, tuple(tail))


def open_gw_point_data(geom: GeometryData):
    """(wp(s0), wp'(s0)) for the open GW point (x, y) = (0, -1)."""
    if geom.name != "kp2":
        raise NotImplementedForGeometry(
            "open GW point uniformization data implemented for the "
            "degree-three geometry only in v1")
    cat = catalog(geom.q_order)
    q1 = geom.params["q1"]
    # x = (1/12 - lam2 wp)/q1 = 0  and  yt = lam3 wp' /(2 q1) = -1/2
    wp_s0 = geom.lam2.invert().scale(Fraction(1, 12))
    wpd_s0 = -(q1 * geom.lam3.invert())
    # consistency: the point lies on the Weierstrass cubic
    lhs = wpd_s0 * wpd_s0
    rhs = (wp_s0 ** 3).scale(4) - cat.g2 * wp_s0 - cat.g3
    if not (lhs == rhs):
        raise UnresolvedPoint("open GW point does not satisfy the cubic")
    return wp_s0, wpd_s0


# ------------------------------------------------------------- config files
class ConfigError(ValueError):
    pass


def parse_geometry_config(text: str) -> dict:
    """key = value format: geometry, subfamily, q_order; unknown keys rejected."""
    allowed = {"geometry", "subfamily", "q_order"}
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, val = (p.strip() for p in line.split("=", 1))
        if key not in allowed:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        out[key] = int(val) if key == "q_order" else val
    return out
