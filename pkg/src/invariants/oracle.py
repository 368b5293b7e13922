"""Brute-force checks from dense finite sections.

Everything here is independent of the symbol machinery: kernel dimensions come
from singular values of open-boundary half-line sections, spectra from dense
eigensolves of a finite window.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .core import BandOperator, adjoint, compose, window_matrix
from .errors import NotFredholmError, TruncationError

__all__ = [
    "KernelEstimate",
    "FullLineEstimate",
    "TruncatedSpectrum",
    "ZeroModeEstimate",
    "section",
    "truncated_index",
    "full_line_index",
    "truncated_spectrum",
    "is_normal",
    "zero_mode_count",
]

# A singular value that shrinks by this factor when N doubles belongs to a kernel
# vector truncated at the far end, however slowly that vector decays.
CONTRACTION = 0.25
GAP = 10.0


def section(A: BandOperator, side: str, N: int) -> np.ndarray:
    """Matrix of the half-line compression restricted to the ``N`` sites nearest 0.

    Columns cover the ``N`` sites, rows every half-line site those columns reach,
    so no output is cut off at the far end and only genuine (approximate)
    kernel vectors give small singular values.
    """
    if side == "R":
        return window_matrix(A, 0, N - 1 + A.k, 0, N - 1)
    if side == "L":
        return window_matrix(A, -N - A.k, -1, -N, -1)
    raise ValueError(f"side must be 'L' or 'R', got {side!r}")


def _svals(M: np.ndarray) -> np.ndarray:
    """Singular values in ascending order; zero-width matrices give none."""
    if M.size == 0:
        return np.zeros(0)
    return np.sort(scipy.linalg.svdvals(M))


def _kernel_split(s_N: np.ndarray, s_2N: np.ndarray, cutoff: float) -> tuple[int, float, float]:
    """Count kernel singular values at ``2N``; return ``(dim, largest_dropped, smallest_kept)``."""
    dim = 0
    for j in range(len(s_2N)):
        tiny = s_2N[j] < cutoff
        contracts = j < len(s_N) and s_2N[j] < CONTRACTION * s_N[j]
        if not (tiny or contracts):
            break
        dim += 1
    dropped = float(s_2N[dim - 1]) if dim else 0.0
    kept = float(s_2N[dim]) if dim < len(s_2N) else float("inf")
    return dim, dropped, kept


@dataclass(frozen=True)
class KernelEstimate:
    N: int
    tol: float
    dim_ker: int
    dim_coker: int
    index: int
    smallest_kept_sv: float
    largest_dropped_sv: float
    stable: bool
    side: str = "R"

    def to_dict(self) -> dict:
        return {
            "side": self.side,
            "N": self.N,
            "tol": self.tol,
            "dim_ker": self.dim_ker,
            "dim_coker": self.dim_coker,
            "index": self.index,
            "smallest_kept_sv": self.smallest_kept_sv,
            "largest_dropped_sv": self.largest_dropped_sv,
            "stable": self.stable,
        }


def _check_N(A: BandOperator, N: int) -> None:
    if N < 8 * max(A.k, 1):
        raise TruncationError(f"N = {N} must be at least 8k = {8 * max(A.k, 1)}")
    if N <= A.override_radius:
        raise TruncationError(f"N = {N} must exceed the override window radius {A.override_radius}")


def truncated_index(A: BandOperator, side: str, N: int = 64, tol: float = 1e-8) -> KernelEstimate:
    """Index of the half-line compression ``A_side`` from sections at ``N`` and ``2N``.

    A singular value counts as kernel if it lies below ``tol`` times the largest
    singular value, or if it contracts by at least ``CONTRACTION`` from ``N`` to
    ``2N``.  The estimate is stable when, at ``2N``, every dropped value is at
    least ``GAP`` times smaller than every kept one.
    """
    _check_N(A, N)
    As = adjoint(A)
    sv = {}
    for name, op in (("A", A), ("A*", As)):
        sv[name] = (_svals(section(op, side, N)), _svals(section(op, side, 2 * N)))
    scale = max(float(s2[-1]) if len(s2) else 0.0 for _, s2 in sv.values())
    if scale == 0.0:
        raise TruncationError("operator section is identically zero")
    cutoff = tol * scale
    ker, d1, k1 = _kernel_split(*sv["A"], cutoff)
    coker, d2, k2 = _kernel_split(*sv["A*"], cutoff)
    dropped, kept = max(d1, d2), min(k1, k2)
    stable = dropped * GAP <= kept
    return KernelEstimate(N, tol, ker, coker, ker - coker, kept, dropped, stable, side)


@dataclass(frozen=True)
class FullLineEstimate:
    left: KernelEstimate
    right: KernelEstimate

    @property
    def index(self) -> int:
        return self.left.index + self.right.index

    @property
    def stable(self) -> bool:
        return self.left.stable and self.right.stable

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "stable": self.stable,
            "left": self.left.to_dict(),
            "right": self.right.to_dict(),
        }


def full_line_index(A: BandOperator, N: int = 64, tol: float = 1e-8) -> FullLineEstimate:
    """``ind A = ind A_L + ind A_R``, each side from :func:`truncated_index`."""
    return FullLineEstimate(truncated_index(A, "L", N, tol), truncated_index(A, "R", N, tol))


def is_normal(A: BandOperator, tol: float = 1e-10) -> bool:
    """Exact check that ``A A* - A* A`` vanishes, coefficient by coefficient."""
    comm = compose(A, adjoint(A)) - compose(adjoint(A), A)
    for s in comm.coeff.values():
        vals = [s.limit_neg, s.limit_pos, *s.overrides.values()]
        if max(abs(v) for v in vals) > tol:
            return False
    return True


@dataclass(frozen=True)
class TruncatedSpectrum:
    """Eigenvalues of the window ``[-N, N]``.

    ``caveat`` marks a non-normal window matrix, whose eigenvalues need not
    approximate the spectrum of the operator (the cut shift is a Jordan block).
    """

    N: int
    eigenvalues: np.ndarray
    caveat: bool


def truncated_spectrum(A: BandOperator, N: int) -> TruncatedSpectrum:
    if N < 8 * A.k:
        raise TruncationError(f"N = {N} must be at least 8k = {8 * A.k}")
    M = window_matrix(A, -N, N)
    ev = scipy.linalg.eigvals(M)
    H = M.conj().T
    size = max(np.abs(M).max(), 1e-300) ** 2
    return TruncatedSpectrum(N, ev, bool(np.abs(M @ H - H @ M).max() > 1e-10 * size))


@dataclass(frozen=True)
class ZeroModeEstimate:
    """Localized eigenvectors of the truncated walk at ``+1`` or ``-1``."""

    target: int
    N: int
    tol: float
    count: int
    ambiguous: int
    candidates: int


def zero_mode_count(
    params,
    which: str,
    N: int = 60,
    tol: float = 1e-6,
    edge: int = 5,
    mass_tol: float = 1e-6,
) -> ZeroModeEstimate:
    """Estimate ``dim ker(U - 1)`` (``which="plus"``) or ``dim ker(U + 1)`` (``"minus"``).

    Eigenvalues of ``U`` on ``[-N, N]`` within ``tol`` of the target are kept when
    their eigenvector carries less than ``mass_tol`` of its weight on the
    ``edge`` outermost sites at each end.  Candidates with edge mass below 1e-2
    but above ``mass_tol`` are counted in ``ambiguous``.  Raises
    :class:`NotFredholmError` when ``|p| = |a|`` at some end.
    """
    from .ssqw import build_evolution

    if which not in ("plus", "minus"):
        raise ValueError(f"which must be 'plus' or 'minus', got {which!r}")
    if N <= params.window_radius + edge:
        raise TruncationError(f"N = {N} must exceed the override window radius plus {edge}")
    for end in ("neg", "pos"):
        if abs(params.p.limit(end).real) == abs(params.a.limit(end).real):
            # U -/+ 1 is then not Fredholm and localized modes are not meaningful
            raise NotFredholmError(f"|p| = |a| at the {end} end")
    target = 1 if which == "plus" else -1
    U = build_evolution(params)
    M = window_matrix(U, -N, N)
    w, V = scipy.linalg.eig(M)
    n = U.n
    sites = 2 * N + 1
    count = ambiguous = candidates = 0
    for idx in np.flatnonzero(np.abs(w - target) < tol):
        candidates += 1
        mass = np.abs(V[:, idx].reshape(sites, n)) ** 2
        total = mass.sum()
        frac = (mass[:edge].sum() + mass[-edge:].sum()) / total
        if frac < mass_tol:
            count += 1
        elif frac < 1e-2:
            ambiguous += 1
    return ZeroModeEstimate(target, N, tol, count, ambiguous, candidates)
