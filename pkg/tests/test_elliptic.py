"""wp machinery: Laurent/torsion values, addition formula, localization."""

import cmath

from fractions import Fraction

import pytest

from eorec.coeffring import Scalar, PI
from eorec.series import QSeries, TLaurent, DEN
from eorec.modforms import eisenstein, g2_series, g3_series
from eorec.elliptic import (
    catalog, wp_derivative_poly, wp_value_at_2torsion, wp_laurent_at_origin,
    wp_add_pair, wp_addition, DegenerateDifference, JacobiPoly,
    wp_symbol_poly, localize, wp_numeric, torsion_diff,
)


def test_torsion_group_xor():
    assert torsion_diff(1, 2) == 3
    assert torsion_diff(2, 3) == 1
    assert torsion_diff(3, 3) == 0


def test_wp_laurent_leading_terms():
    w = wp_laurent_at_origin(0, 1, 5, 8)
    assert w.coeff(-2) == QSeries.one(8 * DEN)
    assert w.coeff(-1).is_zero()
    assert w.coeff(0).is_zero()
    want = eisenstein(4, 8).series.scale(PI ** 4 * Scalar(Fraction(1, 15)))
    assert w.coeff(2) == want


def test_wp_laurent_scaled_argument():
    w = wp_laurent_at_origin(0, 2, 4, 6)
    assert w.coeff(-2) == QSeries.one(6 * DEN).scale(Fraction(1, 4))


def test_wp_laurent_derivative_consistency():
    # d/dT of wp(T) equals wp'(T)
    a = wp_laurent_at_origin(0, 1, 7, 6).derivative()
    b = wp_laurent_at_origin(1, 1, 6, 6)
    assert a == b


def test_wp_value_odd_orders_vanish():
    for r in (1, 2, 3):
        assert wp_value_at_2torsion(r, 1, 8).is_zero()
        assert wp_value_at_2torsion(r, 3, 8).is_zero()


def test_wp_value_second_derivative():
    # wp''(u_r) = 6 e_r^2 - (2/3) pi^4 E4
    cat = catalog(12)
    e4 = eisenstein(12, 12)  # placeholder to warm cache
    for r in (1, 2, 3):
        got = wp_value_at_2torsion(r, 2, 12)
        want = (cat.e[r] ** 2).scale(6) - \
            eisenstein(4, 12).series.scale(PI ** 4 * Scalar(Fraction(2, 3)))
        assert got == want


def test_wp_value_fourth_derivative_closed_form():
    # wp'''' = 12 (wp'^2 + wp wp'') -> at u_r: 12 e_r (6 e_r^2 - g2/2)
    cat = catalog(10)
    for r in (1, 2, 3):
        got = wp_value_at_2torsion(r, 4, 10)
        want = (cat.e[r] * ((cat.e[r] ** 2).scale(6)
                            - cat.g2.scale(Fraction(1, 2)))).scale(12)
        assert got == want


def test_wp_derivative_poly_reduction_depth():
    for m in range(2, 9):
        poly = wp_derivative_poly(m)
        assert all(j <= 1 for (_i, j, _a, _b) in poly)


def _eval_wp_m_numeric(z, tau, m, h=5e-3):
    """Finite-difference wp^{(m)} from the numeric oracle (m = 2 or 4)."""
    pts = [wp_numeric(z + k * h, tau)[0] for k in (-2, -1, 0, 1, 2)]
    if m == 2:
        return (-pts[0] + 16 * pts[1] - 30 * pts[2] + 16 * pts[3] - pts[4]) / (12 * h * h)
    if m == 4:
        return (pts[0] - 4 * pts[1] + 6 * pts[2] - 4 * pts[3] + pts[4]) / h ** 4
    raise ValueError


def test_wp_values_against_numeric_oracle():
    order = 8
    cat = catalog(order)
    for tau in (2j, 1 + 1j):
        upts = {1: 0.5, 2: tau / 2, 3: (1 + tau) / 2}
        for r in (1, 2, 3):
            wp, wpd = wp_numeric(upts[r], tau)
            scale = max(abs(wp), 1.0)
            assert abs(wp - cat.e[r].evaluate_tau(tau)) < 1e-8 * scale
            assert abs(wpd) < 1e-8
            wp2 = _eval_wp_m_numeric(upts[r], tau, 2)
            got2 = wp_value_at_2torsion(r, 2, order).evaluate_tau(tau)
            assert abs(wp2 - got2) < 1e-5 * abs(got2)
            wp4 = _eval_wp_m_numeric(upts[r], tau, 4)
            got4 = wp_value_at_2torsion(r, 4, order).evaluate_tau(tau)
            # absolute floor: the h^2 stencil error scales with wp^(6) ~ 1e4
            assert abs(wp4 - got4) < 2e-3 * max(abs(got4), 1e4)


def test_wp_value_weight_grading():
    for r in (1, 2, 3):
        for m in (0, 2, 4, 6):
            v = wp_value_at_2torsion(r, m, 8)
            assert v.pi_uniform_weight() == m + 2


def test_addition_formula_degenerate():
    order = 6
    cat = catalog(order)
    with pytest.raises(DegenerateDifference):
        wp_addition(cat.e[1], QSeries.zero(cat.trunc()),
                    cat.e[1], QSeries.zero(cat.trunc()), cat.g2, cat.g3)


def test_addition_formula_torsion_differences():
    # wp(u_1 - u_2) computed by the addition formula from torsion data should
    # equal e_3 ... except wp'(u_r) = 0 makes them degenerate; instead test
    # with a generic point: a = 3-torsion-free sample from the Laurent series.
    order = 8
    cat = catalog(order)
    # generic point: wp(z0) with z0 = 0.23 + 0.11 tau via numeric oracle at
    # tau = 2i, cross-checked against the exact addition formula numerically.
    tau = 2j
    z0 = 0.23 + 0.11 * tau
    pa, da = wp_numeric(z0, tau)
    for r, ur in ((1, 0.5), (2, tau / 2), (3, (1 + tau) / 2)):
        pb = cat.e[r].evaluate_tau(tau)
        val_direct, _ = wp_numeric(z0 - ur, tau)
        val_formula = ((da + 0) / (pa - pb)) ** 2 / 4 - pa - pb
        assert abs(val_direct - val_formula) < 1e-8 * abs(val_direct)


def test_add_pair_satisfies_weierstrass_ode():
    # build an exact series point: wp(z) Laurent data at a shifted argument
    # z = u_2 + s with s a formal offset is overkill here; instead use the
    # exact 2-torsion difference with the ODE check on wp_add_pair output
    # for a = generic exact point built from the open-GW geometry later.
    # Here: numeric spot-check that d/da of the formula matches wp'(a-b).
    tau = 2j
    z0 = 0.31 + 0.07j
    ur = 0.5
    pa, da = wp_numeric(z0, tau)
    pb, db = wp_numeric(ur, tau)
    val, dval = wp_numeric(z0 - ur, tau)
    # exact-series formula, evaluated numerically through the same algebra
    e4 = eisenstein(4, 8).series.evaluate_tau(tau)
    g2v = 4 / 3 * cmath.pi ** 4 * e4
    ratio = (da + db) / (pa - pb)
    形 = ratio * ratio / 4 - pa - pb
    dda = 6 * pa * pa - g2v / 2
    dratio = (dda * (pa - pb) - (da + db) * da) / (pa - pb) ** 2
    dform = ratio / 2 * dratio - da
    assert abs(形 - val) < 1e-8 * abs(val)
    assert abs(dform - dval) < 1e-8 * abs(dval)


def test_jacobipoly_basics():
    order = 6
    cat = catalog(order)
    one = QSeries.one(cat.trunc())
    p0 = wp_symbol_poly(1, "r", 1, 0, order)
    eta = JacobiPoly({((), 1, 0): one})
    s = p0 + eta
    assert len(s.t) == 2
    prod = s * s
    assert prod.eta1_degree() == 2
    assert prod.term_weights() == {4}
    assert (s - s).is_zero()
    d = prod.d_eta1()
    assert d.eta1_degree() == 1
    # d/d eta1 (P + eta1)^2 = 2 (P + eta1)
    assert d == (s + s)


def test_jacobipoly_m_reduction():
    order = 6
    p2 = wp_symbol_poly(1, "r", 2, 2, order)
    # wp'' = 6 wp^2 - g2/2: two terms, no m>=2 symbols stored
    for (syms, e, y) in p2.t:
        for (k, kind, base, m), _p in syms:
            assert m <= 1
    assert p2.term_weights() == {4}


def test_localize_same_label():
    order = 6
    p = wp_symbol_poly(1, "r", 2, 0, order)
    loc = localize(p, {1: +1}, 2, 5, order)
    assert loc.coeff(-2).t[((), 0, 0)] == QSeries.one(catalog(order).trunc())
    want = eisenstein(4, order).series.scale(PI ** 4 * Scalar(Fraction(1, 15)))
    assert loc.coeff(2).t[((), 0, 0)] == want


def test_localize_other_label_taylor():
    order = 8
    p = wp_symbol_poly(1, "r", 2, 0, order)
    loc = localize(p, {1: +1}, 1, 5, order)  # expand at r=1, symbol at r'=2
    rr = torsion_diff(1, 2)
    assert loc.coeff(0).t[((), 0, 0)] == catalog(order).e[rr]
    assert loc.coeff(1).is_zero()
    want = wp_value_at_2torsion(rr, 2, order).scale(Fraction(1, 2))
    assert loc.coeff(2).t[((), 0, 0)] == want


def test_localize_constant_unchanged():
    order = 5
    one = QSeries.one(catalog(order).trunc())
    eta = JacobiPoly({((), 1, 0): one})
    loc = localize(eta, {1: +1}, 1, 4, order)
    assert loc.coeff(0) == eta
    assert loc.coeff(1).is_zero()


def test_localize_parity():
    order = 6
    p = wp_symbol_poly(1, "r", 1, 1, order) * wp_symbol_poly(1, "r", 2, 0, order)
    plus = localize(p, {1: +1}, 1, 4, order)
    minus = localize(p, {1: -1}, 1, 4, order)
    assert plus.flip() == minus


def test_localize_free_slot_symbols():
    order = 6
    # S(u_1 - u_2) with u_1 localized at r: Taylor with P(2, r, k) symbols
    p = wp_symbol_poly(1, "s", 2, 0, order)
    loc = localize(p, {1: +1}, 3, 4, order)
    c0 = loc.coeff(0)
    key = (((2, "r", 3, 0), 1),)
    assert (key, 0, 0) in c0.t
    c1 = loc.coeff(1)
    key1 = (((2, "r", 3, 1), 1),)
    assert (key1, 0, 0) in c1.t
    # wp'(u_r - u_2) = -P(2, r, 1), and the T coefficient is its derivative
    assert c1.t[(key1, 0, 0)].coeff(0) == Scalar(-1)


def test_relabel_diagonal_parity():
    order = 5
    p = wp_symbol_poly(1, "s", 2, 1, order)
    swapped = p.relabel({1: 2, 2: 1})
    assert swapped == p.scale(-1)


def test_json_shape():
    order = 5
    p = wp_symbol_poly(1, "r", 2, 0, order)
    js = p.to_json()
    assert js[0]["monomial"] == [[1, "r", "tau/2", 0, 1]]
