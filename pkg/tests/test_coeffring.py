"""Scalar ring: relation-table reduction, arithmetic laws, rendering."""

import random

from fractions import Fraction

import pytest

from eorec.coeffring import (
    Scalar, NonRational, PI, IMAG, ZETA6, CBRT2, SQRT3, CBRTM4,
    SQRT2, ZETA8, ONE, as_scalar, parse_scalar,
)


def test_pi_exponent_addition():
    assert PI ** 2 * PI.inv() == PI


def test_cbrtm4_cubes_to_minus_four():
    assert CBRTM4 * CBRTM4 * CBRTM4 == Scalar(-4)


def test_zeta6_cube_is_minus_one():
    assert ZETA6 ** 3 == Scalar(-1)


def test_remaining_relations():
    assert IMAG * IMAG == Scalar(-1)
    assert CBRT2 ** 3 == Scalar(2)
    assert SQRT3 ** 2 == Scalar(3)
    assert SQRT2 ** 2 == Scalar(2)
    assert ZETA8 ** 2 == IMAG
    assert ZETA8 ** 8 == ONE


def test_reduced_exponent_ranges():
    s = IMAG ** 7 * ZETA6 ** 10 * CBRT2 ** 5 * SQRT3 ** 9 * CBRTM4 ** 4
    _q, e = s.monomial()
    assert 0 <= e[1] <= 1
    assert 0 <= e[2] <= 2
    assert 0 <= e[3] <= 2
    assert 0 <= e[4] <= 1
    assert 0 <= e[5] <= 2


def test_negative_exponents_reduce():
    assert IMAG.inv() == -IMAG
    assert CBRT2.inv() == CBRT2 ** 2 * Scalar(Fraction(1, 2))


def test_rational_part():
    assert Scalar(Fraction(3, 2)).rational_part() == Fraction(3, 2)
    assert Scalar(Fraction(-45, 8)).rational_part() == Fraction(-45, 8)
    with pytest.raises(NonRational):
        (PI ** 2).rational_part()


def test_monomial_sums():
    s = ONE + IMAG          # representable as a two-term sum
    assert not s.is_monomial() and not s.is_zero()
    assert s * (ONE - IMAG) == Scalar(2)
    with pytest.raises(NonRational):
        s.rational_part()
    assert (PI + PI) == Scalar(2) * PI
    assert (s - IMAG) == ONE


def _random_scalar(rng):
    s = Scalar(Fraction(rng.randint(-8, 8) or 1, rng.randint(1, 7)))
    for c in (PI, IMAG, ZETA6, CBRT2, SQRT3, CBRTM4):
        s = s * c ** rng.randint(-3, 3)
    return s


def test_mul_commutative_associative():
    rng = random.Random(7)
    for _ in range(200):
        a, b, c = (_random_scalar(rng) for _ in range(3))
        assert a * b == b * a
        assert (a * b) * c == a * (b * c)


def test_reduction_idempotent():
    rng = random.Random(11)
    for _ in range(100):
        a = _random_scalar(rng)
        q, e = a.monomial()
        assert Scalar(q, e) == a


def test_inverse_roundtrip():
    rng = random.Random(13)
    for _ in range(100):
        a = _random_scalar(rng)
        assert a * a.inv() == ONE


def test_render_parse_roundtrip():
    rng = random.Random(17)
    for _ in range(50):
        a = _random_scalar(rng)
        assert parse_scalar(a.render()) == a


def test_sqrt_cases():
    assert Scalar(Fraction(9, 4)).sqrt() == Scalar(Fraction(3, 2))
    assert Scalar(2).sqrt() == SQRT2
    assert Scalar(-1).sqrt() == IMAG
    assert (PI ** 4 * Scalar(Fraction(1, 16))).sqrt() == PI ** 2 * Scalar(Fraction(1, 4))
    s = Scalar(Fraction(-3, 4))
    assert s.sqrt() ** 2 == s
    assert IMAG.sqrt() == ZETA8


def test_cbrtm4_principal_value_consistent():
    # (-4)^{1/3} as tracked equals 2^{2/3} * zeta6 numerically
    a = CBRTM4.complex_value()
    b = (CBRT2 ** 2 * ZETA6).complex_value()
    assert abs(a - b) < 1e-12


def test_as_scalar_from_fraction():
    assert as_scalar(Fraction(2, 3)).rational_part() == Fraction(2, 3)
