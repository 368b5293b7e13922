import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from generators import laurent_polys, random_walk
from invariants.core import symbol_at
from invariants.errors import IndeterminateWindingError, ZeroPolynomialError
from invariants.ssqw import WalkParameters, build_evolution, f_symbols
from invariants.symbol import (
    LaurentMatrixSymbol,
    LaurentPoly,
    det,
    winding,
    winding_roots,
    winding_unwrap,
)

Z = LaurentPoly({1: 1})
# just outside the circle, at an angle no dyadic grid hits
NEAR_ROOT = (1 + 5e-8) * cmath.exp(0.123456j)


def grid(m=64):
    return np.exp(2j * np.pi * np.arange(m) / m)


class TestLaurentPoly:
    def test_zeros_dropped(self):
        assert LaurentPoly({0: 0, 2: 1, -1: 0}).coeffs == {2: 1}

    def test_arithmetic_matches_evaluation(self):
        p = LaurentPoly({-1: 2, 0: 1j, 3: -1})
        q = LaurentPoly({-2: 1, 1: 4 - 1j})
        z = grid(16)
        assert np.allclose((p * q)(z), p(z) * q(z))
        assert np.allclose((p + q)(z), p(z) + q(z))
        assert np.allclose((p - q)(z), p(z) - q(z))

    def test_from_roots(self):
        p = LaurentPoly.from_roots([0.5, 3], shift=-1, lead=2)
        assert p.low == -1 and p.high == 1
        assert abs(p(0.5)) < 1e-15

    def test_reflect_and_conjugate_on_circle(self):
        p = LaurentPoly({-2: 1 + 1j, 0: 3, 1: -2j})
        z = grid(16)
        assert np.allclose(p.reflect()(z), p(np.conj(z)))
        assert np.allclose(p.conj_on_circle()(z), np.conj(p(z)))


class TestDet:
    def test_scalar(self):
        assert det(LaurentMatrixSymbol([[Z]])) == Z

    def test_inverse_pair(self):
        S = LaurentMatrixSymbol([[Z, LaurentPoly()], [LaurentPoly(), LaurentPoly({-1: 1})]])
        assert det(S) == LaurentPoly({0: 1})

    def test_walk_with_trivial_coins(self):
        params = WalkParameters.constant(0, 1, 0, 1)
        assert det(symbol_at(build_evolution(params), "pos")).almost_equal(LaurentPoly({0: 1}), 1e-15)

    @pytest.mark.parametrize("seed", range(5))
    def test_walk_determinant_matches_dense(self, seed):
        params = random_walk(np.random.default_rng(seed))
        S = symbol_at(build_evolution(params), "neg")
        d = det(S)
        z = grid()
        assert np.allclose(d(z), np.linalg.det(S(z)), atol=1e-13)
        assert np.allclose(np.abs(d(z)), 1, atol=1e-13)

    def test_three_by_three_matches_dense(self):
        rng = np.random.default_rng(4)
        entries = [[LaurentPoly({m: complex(*rng.normal(size=2)) for m in (-1, 0, 1)}) for _ in range(3)] for _ in range(3)]
        S = LaurentMatrixSymbol(entries)
        d = det(S)
        assert d.low >= -3 and d.high <= 3
        assert np.allclose(d(grid()), np.linalg.det(S(grid())))


class TestWindingUnwrap:
    def test_monomial(self):
        assert winding_unwrap(Z * Z * Z).winding == 3

    def test_root_outside(self):
        assert winding_unwrap(Z - 2).winding == 0

    def test_one_root_inside(self):
        assert winding_unwrap(LaurentPoly({2: 2, 1: -5, 0: 2})).winding == 1

    def test_vanishing_detected(self):
        r = winding_unwrap(Z - 1)
        assert not r.nowhere_vanishing and r.winding is None

    def test_indeterminate_near_circle(self):
        with pytest.raises(IndeterminateWindingError):
            winding_unwrap(Z - NEAR_ROOT)


class TestWindingRoots:
    def test_pole(self):
        assert winding_roots(LaurentPoly({-2: 1})).winding == -2

    def test_one_interior_root(self):
        assert winding_roots(LaurentPoly.from_roots([0.5, 3])).winding == 1

    def test_zero_polynomial(self):
        with pytest.raises(ZeroPolynomialError):
            winding_roots(LaurentPoly())

    def test_double_root_on_circle(self):
        p = LaurentPoly.from_roots([cmath.exp(0.3j)] * 2)
        assert not winding_roots(p).nowhere_vanishing

    @pytest.mark.parametrize("seed", range(10))
    def test_walk_determinant_never_vanishes(self, seed):
        params = random_walk(np.random.default_rng(seed), window=2)
        for end in ("neg", "pos"):
            assert winding_roots(det(symbol_at(build_evolution(params), end))).nowhere_vanishing


class TestWinding:
    def test_constant(self):
        assert winding(LaurentPoly({0: 1})).winding == 0

    @pytest.mark.parametrize("y", range(-3, 4))
    def test_monomials(self, y):
        r = winding(LaurentPoly({y: 1}))
        assert r.nowhere_vanishing and r.winding == y and r.method_agreement

    def test_coin_symbol_winds_once(self):
        params = WalkParameters.constant(0.9, math.sqrt(0.19), 0, 1)
        f_eps, _ = f_symbols(params)
        assert winding(f_eps["pos"]).winding == 1

    def test_zero_polynomial_is_not_fredholm(self):
        r = winding(LaurentPoly())
        assert not r.nowhere_vanishing and r.winding is None

    def test_near_circle_falls_back_to_roots(self):
        r = winding(Z - NEAR_ROOT)
        assert r.nowhere_vanishing and r.winding == 0 and not r.method_agreement

    def test_root_on_circle(self):
        r = winding(Z * Z + 1)
        assert not r.nowhere_vanishing and r.winding is None


@given(laurent_polys(-2, 2), laurent_polys(-2, 2))
def test_winding_is_additive(p, q):
    assert winding(p * q).winding == winding(p).winding + winding(q).winding


@given(laurent_polys())
def test_reflection_reverses_winding(p):
    w = winding(p).winding
    assert winding(p.reflect()).winding == -w
    assert winding(p.conj_on_circle()).winding == -w


@given(laurent_polys())
def test_both_methods_agree(p):
    a, b = winding_unwrap(p), winding_roots(p)
    assert a.nowhere_vanishing and b.nowhere_vanishing
    assert a.winding == b.winding


@given(laurent_polys(), st.complex_numbers(min_magnitude=1e-3, max_magnitude=1e3, allow_nan=False, allow_infinity=False))
def test_scaling_invariance(p, c):
    assert winding(p * c).winding == winding(p).winding
