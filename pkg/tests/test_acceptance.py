"""Acceptance gate: nine criteria at their stated sizes and tolerances.

Each test records one PASS/FAIL line; ``conftest.py`` prints them after the run.
Run directly (``python3 tests/test_acceptance.py``) to get the lines without pytest.
"""

import cmath
import functools
import itertools
import math
import time

import numpy as np

from generators import (
    coin_sequence,
    random_fredholm_operator,
    random_laurent,
    random_overrides,
    random_walk,
)
from invariants.core import adjoint, compose, shift, symbol_at, window_matrix
from invariants.index import fredholm_index
from invariants.oracle import full_line_index, truncated_index, zero_mode_count
from invariants.spectrum import (
    essential_spectrum,
    in_essential_spectrum,
    sgn,
    walk_spectrum_bands,
)
from invariants.ssqw import (
    WalkParameters,
    build_evolution,
    chiral_blocks,
    epsilon_operator,
    f_symbols,
    gamma_operator,
    pointwise_phase,
    reassemble,
    repaired_blocks,
    spectrum_Q,
    witten_indices,
)
from invariants.symbol import det, winding, winding_roots, winding_unwrap

RESULTS: list[str] = []
ENDS = ("neg", "pos")


def criterion(number: int, title: str):
    """Record ``PASS``/``FAIL`` for one criterion; the body returns a detail string."""

    def wrap(func):
        @functools.wraps(func)
        def run():
            start = time.perf_counter()
            try:
                detail = func()
            except BaseException as e:
                RESULTS.append(f"FAIL  [{number}] {title}: {type(e).__name__}: {e}")
                raise
            RESULTS.append(f"PASS  [{number}] {title}: {detail} ({time.perf_counter() - start:.1f} s)")

        return run

    return wrap


def walk(p, a, theta=(0.0, 0.0), phi=(0.0, 0.0)):
    q = tuple(math.sqrt(max(0.0, 1 - v * v)) * cmath.exp(1j * t) for v, t in zip(p, theta))
    b = tuple(math.sqrt(max(0.0, 1 - v * v)) * cmath.exp(1j * t) for v, t in zip(a, phi))
    return WalkParameters.from_limits(p, q, a, b)


@criterion(1, "index agreement with the truncation oracle")
def test_index_agreement():
    rng = np.random.default_rng(20240601)
    start = time.perf_counter()
    failures, sizes = [], set()
    for trial in range(200):
        A = random_fredholm_operator(rng, margin=0.05, n=int(rng.integers(1, 4)), k=int(rng.integers(0, 3)))
        sizes.add((A.n, A.k))
        rep = fredholm_index(A)
        est = full_line_index(A, 64)
        if not (rep.fredholm and est.stable and est.index == rep.index):
            failures.append((trial, rep.index, est.index, est.stable))
    elapsed = time.perf_counter() - start
    assert not failures, f"{len(failures)} of 200 disagree: {failures[:5]}"
    assert elapsed < 60, f"took {elapsed:.1f} s"
    assert {n for n, _ in sizes} == {1, 2, 3} and {k for _, k in sizes} == {0, 1, 2}
    return "200/200 agree, all stable at N = 64"


@criterion(2, "unwrap and root-count windings agree")
def test_winding_double_computation():
    rng = np.random.default_rng(7)
    start = time.perf_counter()
    bad = 0
    for _ in range(1000):
        p = random_laurent(rng)
        a, b = winding_unwrap(p), winding_roots(p)
        bad += not (a.nowhere_vanishing and b.nowhere_vanishing and a.winding == b.winding)
    elapsed = time.perf_counter() - start
    assert bad == 0, f"{bad} of 1000 disagree"
    assert elapsed < 10, f"took {elapsed:.1f} s"
    return "1000/1000 agree"


@criterion(3, "closed-form Witten tables equal the winding engine")
def test_case_table_sweep():
    rng = np.random.default_rng(3)
    start = time.perf_counter()
    big, small = 0.85, 0.35
    tuples, seen_gg, cases = 0, set(), set()
    for (big_neg, big_pos), signs in itertools.product(
        itertools.product((False, True), repeat=2), itertools.product((1, -1), repeat=4)
    ):
        # (big_neg, big_pos) says whether |p| > |a| at each end
        sp_n, sp_p, sa_n, sa_p = signs
        mag = lambda is_big: (big, small) if is_big else (small, big)  # noqa: E731
        (pn, an), (pp, ap) = mag(big_neg), mag(big_pos)
        p_lim = (sp_n * pn, sp_p * pp)
        a_lim = (sa_n * an, sa_p * ap)
        p, q = coin_sequence(rng, *p_lim, window=2)
        a, b = coin_sequence(rng, *a_lim, window=2)
        params = WalkParameters(p, q, a, b)
        rep = witten_indices(params)  # raises on any table/engine mismatch
        A_eps, A_gam = repaired_blocks(params)
        f_eps, f_gam = f_symbols(params)
        eng_gg = fredholm_index(A_eps).index
        eng_g_g = fredholm_index(A_gam).index
        wn_gg = winding(f_eps["pos"]).winding - winding(f_eps["neg"]).winding
        wn_g_g = winding(f_gam["pos"]).winding - winding(f_gam["neg"]).winding
        assert type(rep.ind_gg) is int and rep.ind_gg == eng_gg == wn_gg
        assert type(rep.ind_g_g) is int and rep.ind_g_g == eng_g_g == wn_g_g
        seen_gg.add(rep.ind_gg)
        cases.add(rep.case)
        tuples += 1
    # sgn(0) = +1 boundary tuples
    for p_lim, a_lim in (((0.0, 0.9), (0.5, 0.0)), ((0.9, 0.0), (0.0, -0.5)), ((0.0, 0.0), (0.6, -0.7))):
        rep = witten_indices(walk(p_lim, a_lim, theta=(1.0, 2.0), phi=(3.0, 4.0)))
        tuples += 1
    elapsed = time.perf_counter() - start
    assert tuples >= 64 and cases == {1, 2, 3, 4}
    assert {2, -2} <= seen_gg, f"ind(Gamma, Gamma') values seen: {sorted(seen_gg)}"
    assert elapsed < 10, f"took {elapsed:.1f} s"
    return f"{tuples} tuples, 4 cases, ind(Gamma, Gamma') in {sorted(seen_gg)}"


@criterion(4, "compact perturbations change neither index nor spectrum")
def test_compact_perturbation():
    rng = np.random.default_rng(44)
    for _ in range(50):
        A = random_fredholm_operator(rng, margin=0.05, k=int(rng.integers(0, 3)))
        B = random_overrides(A, rng, window=5)
        ra, rb = fredholm_index(A), fredholm_index(B)
        assert ra.fredholm and rb.fredholm and ra.index == rb.index
        assert essential_spectrum(A).same_as(essential_spectrum(B))
        oa, ob = full_line_index(A, 64), full_line_index(B, 64)
        assert oa.stable and ob.stable and oa.index == ob.index == ra.index
    return "50/50 unchanged (winding, oracle and cloud)"


@criterion(5, "walk spectrum lies in the predicted arcs")
def test_walk_bands():
    rng = np.random.default_rng(55)
    samples = 1024
    h = 2 * math.pi / samples
    worst_circle = worst_band = worst_edge = 0.0
    for _ in range(50):
        params = random_walk(rng, window=3)
        bands = walk_spectrum_bands(params)
        cloud = essential_spectrum(build_evolution(params), samples)
        for end in ENDS:
            lam = cloud.eigenvalues[end].ravel()
            b = bands.band(end)
            worst_circle = max(worst_circle, float(np.abs(np.abs(lam) - 1).max()))
            x = b.sign * lam.real
            worst_band = max(worst_band, float(max(b.lo - x.min(), x.max() - b.hi, 0.0)))
            # Re lambda = pa + |qb| cos(t + phase); grid misses an extremum by at most |qb| h^2 / 8
            edge = max(abs(x.min() - b.lo), abs(x.max() - b.hi))
            worst_edge = max(worst_edge, edge)
            assert edge <= h * h / 8 + 1e-12
    assert worst_circle < 1e-10 and worst_band < 1e-9

    boundary = 0
    for p_abs, sgn_a, sign_p in itertools.product((0.0, 0.3, 0.9, 1.0), (1, -1), (1, -1)):
        p_v, a_v = sign_p * p_abs, sgn_a * p_abs
        other = (0.2, 0.5)  # the other end is gapped
        for touch in ENDS:
            p_lim = (p_v, other[0]) if touch == "neg" else (other[0], p_v)
            a_lim = (a_v, other[1]) if touch == "neg" else (other[1], a_v)
            params = walk(p_lim, a_lim, theta=(0.4, 1.3), phi=(2.1, 5.5))
            bands = walk_spectrum_bands(params)
            U = build_evolution(params)
            pole = sgn(p_v * a_v)
            assert bands.contains(pole, 0.0), (p_lim, a_lim)
            assert not bands.contains(-pole, 0.0) or p_abs == 0.0
            assert in_essential_spectrum(U, pole)
            boundary += 1
    for p_lim, a_lim in (((0.3, -0.9), (0.6, 0.2)), ((0.95, 0.0), (-0.1, 0.7))):
        bands = walk_spectrum_bands(walk(p_lim, a_lim))
        assert not bands.contains(1.0, 0.0) and not bands.contains(-1.0, 0.0)
        assert not in_essential_spectrum(build_evolution(walk(p_lim, a_lim)), 1.0)
    return (
        f"50 walks: |lambda| error {worst_circle:.1e}, band excess {worst_band:.1e}, "
        f"edge gap {worst_edge:.1e}; {boundary} boundary cases exact"
    )


@criterion(6, "sigma_ess(Q) three routes agree")
def test_q_spectrum():
    rng = np.random.default_rng(66)
    worst = 0.0
    for _ in range(50):
        Q = spectrum_Q(random_walk(rng, window=3), 1024, 1e-9)
        for via in (Q.via_f_gam, Q.via_U):
            for end in ENDS:
                worst = max(worst, *(abs(u - v) for u, v in zip(Q.per_end[end], via[end])))
        # interval unions as sets
        for via in (Q.via_f_gam, Q.via_U):
            other = type(Q)(via, via, via).intervals()
            assert len(other) == len(Q.intervals())
            for (a, b), (c, d) in zip(other, Q.intervals()):
                assert abs(a - c) <= 1e-9 and abs(b - d) <= 1e-9
    assert worst <= 1e-9
    return f"50/50 agree, max deviation {worst:.1e}"


@criterion(7, "block decomposition is an executable identity")
def test_block_identity():
    rng = np.random.default_rng(77)
    worst = 0.0
    for _ in range(20):
        params = random_walk(rng, window=4)
        theta, phi = pointwise_phase(params.q), pointwise_phase(params.b)
        blocks = chiral_blocks(params, theta, phi)
        U = build_evolution(params)
        for which, C in (("eps", epsilon_operator(params, theta)), ("gam", gamma_operator(params, phi))):
            direct = window_matrix(compose(adjoint(C), compose(U, C)), -20, 20)
            err = float(np.abs(direct - window_matrix(reassemble(blocks, which), -20, 20)).max())
            worst = max(worst, err)
    assert worst <= 1e-12
    return f"20 walks x (eps, gam), max entry error {worst:.1e}"


@criterion(8, "bound states at least |ind_+-|")
def test_bound_states():
    configs = [
        ((0.0, 0.0), (-0.9, 0.9)),
        ((0.2, 0.9), (0.7, 0.1)),
        ((0.9, 0.2), (0.1, 0.7)),
        ((-0.9, 0.9), (0.0, 0.0)),
        ((0.9, -0.8), (0.3, 0.5)),
    ]
    cases, lines, nontrivial = set(), [], 0
    for p_lim, a_lim in configs:
        params = walk(p_lim, a_lim, theta=(0.3, 1.7), phi=(2.9, 0.8))
        rep = witten_indices(params)
        cases.add(rep.case)
        plus = zero_mode_count(params, "plus", N=60, tol=1e-6).count
        minus = zero_mode_count(params, "minus", N=60, tol=1e-6).count
        assert plus >= abs(rep.ind_plus) and minus >= abs(rep.ind_minus), (p_lim, a_lim, rep, plus, minus)
        nontrivial += rep.ind_plus != 0 or rep.ind_minus != 0
        lines.append(f"case {rep.case}: {plus}>={abs(rep.ind_plus)}, {minus}>={abs(rep.ind_minus)}")
    assert cases == {1, 2, 3, 4}
    assert nontrivial == len(configs)
    return "; ".join(lines)


@criterion(9, "shift ladder")
def test_shift_ladder():
    rng = np.random.default_rng(9)
    for y in range(-3, 4):
        A = shift(y)
        for end in ENDS:
            assert winding(det(symbol_at(A, end))).winding == y
        right = truncated_index(A, "R", 64)
        assert right.stable and right.index == y
        rep = fredholm_index(A)
        assert rep.fredholm and rep.index == 0
        full = full_line_index(A, 64)
        assert full.stable and full.index == 0
        cloud = essential_spectrum(A, 1024).points()
        if y == 0:
            # L^0 is the identity
            assert set(cloud) == {1}
            continue
        assert np.abs(np.abs(cloud) - 1).max() < 1e-15
        for t in rng.uniform(0, 2 * math.pi, 8):
            assert in_essential_spectrum(A, cmath.exp(1j * t))
        assert not in_essential_spectrum(A, 0.5) and not in_essential_spectrum(A, 1.5)
    return "y = -3..3: wn = ind(A_R) = y, ind(A) = 0, sigma_ess = T (identity at y = 0)"


if __name__ == "__main__":
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_")]
    for t in sorted(tests, key=lambda f: f.__wrapped__.__code__.co_firstlineno):
        try:
            t()
        except BaseException:
            pass
    print("\n".join(RESULTS))
