import math

import numpy as np
import pytest

from generators import random_fredholm_operator, random_overrides
from invariants.core import TwoPhaseSequence, adjoint, multiplication, shift
from invariants.errors import NotFredholmError, TruncationError
from invariants.index import fredholm_index
from invariants.oracle import (
    full_line_index,
    is_normal,
    section,
    truncated_index,
    truncated_spectrum,
    zero_mode_count,
)
from invariants.ssqw import WalkParameters, build_evolution, witten_indices


def walk(p, a):
    """Walk with real limits ``p``, ``a`` (neg, pos) and nonnegative q, b."""
    q = tuple(math.sqrt(1 - v * v) for v in p)
    b = tuple(math.sqrt(1 - v * v) for v in a)
    return WalkParameters.from_limits(p, q, a, b)


class TestSection:
    def test_right_section_is_tall(self):
        M = section(shift(1), "R", 5)
        assert M.shape == (6, 5)

    def test_left_section_rows_reach_below(self):
        M = section(shift(-1), "L", 5)
        assert M.shape == (6, 5)

    def test_bad_side(self):
        with pytest.raises(ValueError):
            section(shift(1), "X", 5)


class TestTruncatedIndex:
    def test_unilateral_shift(self):
        est = truncated_index(shift(1), "R", 50)
        assert (est.dim_ker, est.dim_coker, est.index, est.stable) == (1, 0, 1, True)

    def test_left_half_of_shift(self):
        est = truncated_index(shift(1), "L", 50)
        assert (est.dim_ker, est.dim_coker, est.index) == (0, 1, -1)

    def test_full_line_shift(self):
        est = full_line_index(shift(1), 50)
        assert est.index == 0 and est.stable

    def test_two_phase_shift_has_index(self):
        # L on the right, identity on the left
        A = multiplication(TwoPhaseSequence(1, 0)) + multiplication(TwoPhaseSequence(0, 1)) @ shift(1)
        assert full_line_index(A, 40).index == fredholm_index(A).index == 1

    def test_report_fields(self):
        est = truncated_index(shift(2), "R", 32)
        d = est.to_dict()
        assert d["index"] == d["dim_ker"] - d["dim_coker"] == 2
        assert est.largest_dropped_sv * 10 <= est.smallest_kept_sv

    def test_N_too_small(self):
        with pytest.raises(TruncationError):
            truncated_index(shift(2), "R", 8)

    def test_N_inside_override_window(self):
        A = multiplication(TwoPhaseSequence(1, 1, {20: 2}))
        with pytest.raises(TruncationError):
            truncated_index(A, "R", 16)

    @pytest.mark.parametrize("seed", range(12))
    def test_random_two_by_two_agrees_with_winding(self, seed):
        A = random_fredholm_operator(np.random.default_rng(seed), n=2, k=2)
        est = full_line_index(A, 64)
        assert est.stable and est.index == fredholm_index(A).index

    @pytest.mark.parametrize("seed", range(6))
    def test_adjoint_consistency(self, seed):
        A = random_fredholm_operator(np.random.default_rng(100 + seed), k=2)
        a, b = full_line_index(A, 48), full_line_index(adjoint(A), 48)
        assert a.stable and b.stable and a.index == -b.index

    @pytest.mark.parametrize("seed", range(6))
    def test_overrides_do_not_change_index(self, seed):
        rng = np.random.default_rng(200 + seed)
        A = random_fredholm_operator(rng, k=2)
        base = full_line_index(A, 48)
        moved = full_line_index(random_overrides(A, rng), 48)
        assert base.stable and moved.stable and base.index == moved.index


class TestTruncatedSpectrum:
    def test_two_phase_diagonal(self):
        ts = truncated_spectrum(multiplication(TwoPhaseSequence(2, 3)), 10)
        assert set(np.round(ts.eigenvalues.real, 14)) == {2, 3}
        assert not ts.caveat

    def test_hopping_free_walk(self):
        U = build_evolution(WalkParameters.constant(1, 0, 0, 1))
        ts = truncated_spectrum(U, 40)
        assert np.min(np.abs(np.stack([ts.eigenvalues - 1j, ts.eigenvalues + 1j])), axis=0).max() < 1e-8
        assert is_normal(U)

    def test_shift_is_flagged(self):
        ts = truncated_spectrum(shift(1), 40)
        assert np.abs(ts.eigenvalues).max() < 1e-8
        # L itself is unitary; only its cut is defective
        assert ts.caveat and is_normal(shift(1))


class TestZeroModes:
    def test_sign_flip_config(self):
        params = WalkParameters.from_limits((-0.9, 0.9), (math.sqrt(0.19),) * 2, (0, 0), (1, 1))
        rep = witten_indices(params)
        assert (rep.ind_plus, rep.ind_minus) == (1, 1)
        for which in ("plus", "minus"):
            assert zero_mode_count(params, which, 60).count >= 1

    def test_first_case_config(self):
        params = walk((0, 0), (-0.9, 0.9))
        rep = witten_indices(params)
        assert (rep.ind_gg, rep.ind_g_g) == (0, -2)
        assert abs(rep.ind_plus) == abs(rep.ind_minus) == 1
        for which in ("plus", "minus"):
            assert zero_mode_count(params, which, 60).count >= 1

    @pytest.mark.parametrize(
        "p,a",
        [((0.2, 0.9), (0.7, 0.1)), ((0.9, 0.2), (0.1, 0.7)), ((0.9, -0.8), (0.3, 0.5)), ((0.1, 0.3), (-0.6, 0.8))],
    )
    def test_bound_by_index(self, p, a):
        params = walk(p, a)
        rep = witten_indices(params)
        assert zero_mode_count(params, "plus").count >= abs(rep.ind_plus)
        assert zero_mode_count(params, "minus").count >= abs(rep.ind_minus)

    def test_degenerate_walk_rejected(self):
        with pytest.raises(NotFredholmError):
            zero_mode_count(WalkParameters.constant(1, 0, 1, 0), "plus")

    def test_bad_target(self):
        with pytest.raises(ValueError):
            zero_mode_count(walk((0, 0), (0.5, 0.5)), "zero")
