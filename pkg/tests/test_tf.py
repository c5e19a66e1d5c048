"""Unit and property tests for the rational-function kernel.

np.roots serves as an independent oracle here; the package itself never
calls it.
"""
import numpy as np
import pytest

from windsso.tf import (
    ComplexRational, add, div, eval_tf, mul, neg, parallel, poly_roots,
    scalar_mul, shift,
)

RNG = np.random.default_rng(20260815)


def _match_roots(got, want, rtol):
    got = sorted(got, key=lambda z: (z.real, z.imag))
    want = sorted(want, key=lambda z: (z.real, z.imag))
    assert len(got) == len(want)
    for g, w in zip(got, want):
        assert abs(g - w) <= rtol * max(1.0, abs(w)), (g, w)


def _rand_rational(max_deg=4):
    nd = RNG.integers(0, max_deg + 1)
    dd = RNG.integers(1, max_deg + 1)
    num = RNG.standard_normal(nd + 1) + 1j * RNG.standard_normal(nd + 1)
    den = RNG.standard_normal(dd + 1) + 1j * RNG.standard_normal(dd + 1)
    den[-1] += 3.0  # keep leading coefficient well away from zero
    return ComplexRational(num, den)


# ---------------------------------------------------------------- poly_roots

def test_roots_quadratic_exact():
    _match_roots(poly_roots([1, 0, 1]), [1j, -1j], 1e-12)


def test_roots_construct_then_solve_small():
    want = [1 + 2j, 3 + 0j]
    coeffs = np.polynomial.polynomial.polyfromroots(want)
    _match_roots(poly_roots(coeffs), want, 1e-10)


def test_roots_random_degree10():
    for _ in range(25):
        want = RNG.standard_normal(10) + 1j * RNG.standard_normal(10)
        coeffs = np.polynomial.polynomial.polyfromroots(want)
        _match_roots(poly_roots(coeffs), want, 1e-7)


def test_roots_wide_magnitude_spread():
    # coefficient magnitudes spanning ~12 orders, like ohm/henry vectors
    want = np.array([-5.0 + 460.0j, -80.0 + 300.0j, -1e4 + 0j, -3e3 - 2e3j])
    coeffs = np.polynomial.polynomial.polyfromroots(want) * 1e-9
    _match_roots(poly_roots(coeffs), want, 1e-8)


def test_roots_zero_roots_and_multiplicity():
    # s^2 * (s-2)^2: clustered double root reported twice
    coeffs = np.polynomial.polynomial.polyfromroots([0, 0, 2, 2])
    got = poly_roots(coeffs)
    assert np.sum(np.abs(got) < 1e-9) == 2
    assert np.sum(np.abs(got - 2) < 1e-5) == 2


def test_roots_against_numpy_oracle():
    for _ in range(50):
        deg = int(RNG.integers(2, 16))
        c = RNG.standard_normal(deg + 1) + 1j * RNG.standard_normal(deg + 1)
        c[-1] += 2.0
        _match_roots(poly_roots(c), np.roots(c[::-1]), 1e-7)


def test_roots_degree_errors():
    with pytest.raises(ValueError):
        poly_roots([3.0])
    with pytest.raises(ValueError):
        poly_roots(np.ones(250))


def test_roots_residual_bound():
    for _ in range(20):
        deg = int(RNG.integers(2, 30))
        want = 2.0 * (RNG.standard_normal(deg) + 1j * RNG.standard_normal(deg))
        c = np.polynomial.polynomial.polyfromroots(want)
        got = poly_roots(c)
        norm = np.max(np.abs(c))
        for r in got:
            pv = abs(np.polynomial.polynomial.polyval(r, c))
            assert pv <= 1e-8 * norm * max(1.0, abs(r)) ** deg


# ------------------------------------------------------------------ algebra

def test_add_like_terms():
    a = ComplexRational([1], [1, 1])
    b = add(a, a)
    assert np.allclose(b.num, [2]) and np.allclose(b.den, [1, 1])


def test_add_identity():
    a = ComplexRational([2, 1], [1, 0, 1])
    b = add(a, ComplexRational([0]))
    assert np.allclose(b.num, a.num) and np.allclose(b.den, a.den)


def test_add_exact_common_factor():
    # s/(s+2) + 2/(s+2) -> 1
    a = ComplexRational([0, 1], [2, 1])
    b = ComplexRational([2], [2, 1])
    c = add(a, b)
    assert np.allclose(c.num, [1]) and np.allclose(c.den, [1])


def test_field_properties_random():
    for _ in range(30):
        a, b = _rand_rational(), _rand_rational()
        lhs = (a + b) - b
        s = 0.37 + 0.91j  # compare as functions, degrees may differ by noise
        assert abs(eval_tf(lhs, s) - eval_tf(a, s)) <= 1e-9 * (1 + abs(eval_tf(a, s)))
        if not b.is_zero():
            lhs2 = (a * b) / b
            assert abs(eval_tf(lhs2, s) - eval_tf(a, s)) <= 1e-9 * (1 + abs(eval_tf(a, s)))


def test_coefficientwise_roundtrip():
    for _ in range(30):
        a, b = _rand_rational(3), _rand_rational(3)
        for lhs in ((a + b) - b, (a * b) / b if not b.is_zero() else a):
            assert lhs.degree() == a.degree()
            atol_n = 1e-10 * (np.max(np.abs(a.num)) + 1)
            assert np.allclose(lhs.num, a.num, rtol=1e-10, atol=atol_n)
            assert np.allclose(lhs.den, a.den, rtol=1e-10, atol=1e-10)


def test_neg_scalar_mul():
    a = ComplexRational([1, 2], [3, 1])
    assert np.allclose(neg(a).num, -a.num)
    assert np.allclose(scalar_mul(a, 2.0).num, 2 * a.num)


def test_div_by_zero_function():
    a = ComplexRational([1], [1, 1])
    with pytest.raises(ZeroDivisionError):
        div(a, ComplexRational([0]))


def test_monic_denominator_invariant():
    a = ComplexRational([1, 2, 3], [4, 5, 6])
    assert a.den[-1] == 1.0
    b = _rand_rational() * _rand_rational()
    assert abs(b.den[-1] - 1.0) < 1e-12


# ----------------------------------------------------------------- parallel

def test_parallel_identical_copies():
    z = ComplexRational([1, 0.5, 2], [0, 1])
    for k in (2, 5):
        got = parallel([z] * k)
        want = scalar_mul(z, 1.0 / k)
        assert np.array_equal(got.num, want.num) and np.array_equal(got.den, want.den)


def test_parallel_constants():
    got = parallel([ComplexRational([2]), ComplexRational([2])])
    assert np.allclose(got.num, [1]) and np.allclose(got.den, [1])


def test_parallel_s_and_one():
    got = parallel([ComplexRational([0, 1]), ComplexRational([1])])
    # s/(s+1)
    assert np.allclose(got.num, [0, 1]) and np.allclose(got.den, [1, 1])


def test_parallel_errors():
    with pytest.raises(ValueError):
        parallel([])
    with pytest.raises(ValueError):
        parallel([ComplexRational([0])])


# -------------------------------------------------------------------- shift

def test_shift_integrator():
    h = ComplexRational([1], [0, 1])
    g = shift(h, 50.0)
    w1 = 2 * np.pi * 50.0
    assert np.allclose(g.den, [-1j * w1, 1])


def test_shift_defining_property():
    for _ in range(20):
        h = _rand_rational()
        f1 = float(RNG.uniform(10, 80))
        w = float(RNG.uniform(-500, 500))
        lhs = eval_tf(shift(h, f1), 1j * w)
        rhs = eval_tf(h, 1j * (w - 2 * np.pi * f1))
        assert abs(lhs - rhs) <= 1e-8 * (1 + abs(rhs))


def test_shift_inverse_composition():
    # round-trip error grows like eps*(2*pi*f1)^degree: tolerance scales with f1
    h = _rand_rational()
    g = shift(shift(h, 0.5), -0.5)
    assert np.allclose(g.num, h.num, rtol=1e-12, atol=1e-12)
    assert np.allclose(g.den, h.den, rtol=1e-12, atol=1e-12)
    for _ in range(10):
        h = _rand_rational()
        g = shift(shift(h, 60.0), -60.0)
        assert np.allclose(g.num, h.num, rtol=1e-4, atol=1e-4)
        assert np.allclose(g.den, h.den, rtol=1e-4, atol=1e-4)


# --------------------------------------------------------------------- eval

def test_eval_simple():
    assert eval_tf(ComplexRational([1], [1, 1]), 0.0) == 1.0
    assert eval_tf(ComplexRational([0, 1]), 1j) == 1j


def test_eval_at_pole_raises():
    with pytest.raises(ZeroDivisionError):
        eval_tf(ComplexRational([1], [0, 1]), 0.0)


def test_eval_at_reconstructed_root_small():
    want = RNG.standard_normal(6) + 1j * RNG.standard_normal(6)
    coeffs = np.polynomial.polynomial.polyfromroots(want)
    h = ComplexRational(coeffs, [1.0])
    scale = np.max(np.abs(coeffs))
    for r in poly_roots(coeffs):
        assert abs(eval_tf(h, r)) < 1e-8 * scale * max(1.0, abs(r)) ** 6
