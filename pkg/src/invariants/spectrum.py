"""Essential spectrum of two-phase band operators.

The essential spectrum is the union over both ends of the eigenvalue curves
``t -> sigma(A^(e^{it}, end))``.  Clouds sampled on a grid are for output and
plotting; membership decisions go through the exact root-on-circle test.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
from numpy.polynomial import polynomial as P

from .core import BandOperator, symbol_at
from .symbol import CIRCLE_TOL, LaurentMatrixSymbol, companion_roots, det, vanishes_on_circle

if TYPE_CHECKING:
    from .ssqw import WalkParameters

__all__ = [
    "SpectrumCloud",
    "Band",
    "CircularBandSet",
    "eigenvalues_at",
    "eigenvalues_grid",
    "essential_spectrum",
    "in_essential_spectrum",
    "walk_spectrum_bands",
    "sgn",
    "DEFAULT_SAMPLES",
]

DEFAULT_SAMPLES = 1024
ENDS = ("neg", "pos")


def sgn(x: float) -> int:
    """Sign with ``sgn(0) = 1``."""
    return 1 if x >= 0 else -1


def _ldexp(M: np.ndarray, e) -> np.ndarray:
    return np.ldexp(M.real, e) + 1j * np.ldexp(M.imag, e)


def _quadratic_roots(tr, dt):
    """Roots of ``lam^2 - tr*lam + dt`` avoiding cancellation."""
    tr = np.asarray(tr, dtype=complex)
    dt = np.asarray(dt, dtype=complex)
    s = np.sqrt(tr * tr - 4 * dt)
    # pick the sign making |tr + s| the larger of the two
    s = np.where(np.real(np.conj(tr) * s) >= 0, s, -s)
    big = (tr + s) / 2
    # divide after exact rescaling so a subnormal |big| cannot overflow the quotient
    _, e = np.frexp(np.where(big == 0, 1.0, np.abs(big)))
    safe = np.where(big == 0, 1, _ldexp(big, -e))
    small = np.where(big == 0, 0, _ldexp(dt, -e) / safe)
    return big, small


def _charpoly(M: np.ndarray) -> np.ndarray:
    """Coefficients (low to high) of ``det(lam I - M)`` by the Leibniz expansion."""
    n = M.shape[0]
    total = np.zeros(n + 1, dtype=complex)
    for perm in itertools.permutations(range(n)):
        sign = 1
        seen = list(perm)
        # parity by counting inversions
        for a in range(n):
            for b in range(a + 1, n):
                if seen[a] > seen[b]:
                    sign = -sign
        term = np.array([sign], dtype=complex)
        for i, j in enumerate(perm):
            entry = np.array([-M[i, j], 1.0]) if i == j else np.array([-M[i, j]])
            term = P.polymul(term, entry)
        total[: len(term)] += term
    return total


def _unit_scale(mats: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Scale each trailing matrix by a power of two so its largest entry is about 1.

    Power-of-two scaling is exact, so tiny or huge entries neither underflow nor
    overflow in the products that follow.  Returns the scaled stack and exponents.
    """
    big = np.abs(mats).max(axis=(-2, -1))
    _, e = np.frexp(np.where(big == 0, 1.0, big))
    return _ldexp(mats, -e[..., None, None]), e


def _eigs_of_matrix(M: np.ndarray) -> np.ndarray:
    n = M.shape[0]
    if n == 1:
        return M[0].copy()
    M, e = _unit_scale(M)
    if n == 2:
        big, small = _quadratic_roots(M[0, 0] + M[1, 1], M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0])
        ev = np.array([big, small])
    elif n <= 4:
        ev = companion_roots(_charpoly(M))
    else:
        ev = np.linalg.eigvals(M)
    return _ldexp(np.asarray(ev, dtype=complex), e)


def eigenvalues_at(S: LaurentMatrixSymbol, z: complex) -> np.ndarray:
    if abs(abs(z) - 1) > 1e-12:
        raise ValueError(f"z must lie on the unit circle, |z| = {abs(z)!r}")
    return _eigs_of_matrix(S(z))


def eigenvalues_grid(S: LaurentMatrixSymbol, t: np.ndarray) -> np.ndarray:
    """``(len(t), n)`` eigenvalues of ``S(e^{it})``; vectorised for n <= 2."""
    mats = S(np.exp(1j * np.asarray(t)))
    if S.n == 1:
        return mats[:, :, 0]
    if S.n == 2:
        m, e = _unit_scale(mats)
        tr = m[:, 0, 0] + m[:, 1, 1]
        dt = m[:, 0, 0] * m[:, 1, 1] - m[:, 0, 1] * m[:, 1, 0]
        big, small = _quadratic_roots(tr, dt)
        return _ldexp(np.stack([big, small], axis=1), e[:, None])
    return np.array([_eigs_of_matrix(M) for M in mats])


@dataclass(frozen=True, eq=False)
class SpectrumCloud:
    """Sampled eigenvalue curves per end: ``t[s]`` and ``eigenvalues[end][s, :]``."""

    t: np.ndarray
    eigenvalues: dict[str, np.ndarray]

    def points(self, end: str | None = None) -> np.ndarray:
        ends = ENDS if end is None else (end,)
        return np.concatenate([self.eigenvalues[e].ravel() for e in ends])

    def rows(self):
        """``(end, t, eigenvalue)`` triples ordered by end, then angle."""
        for end in ENDS:
            ev = self.eigenvalues[end]
            for s, t in enumerate(self.t):
                for lam in ev[s]:
                    yield end, float(t), complex(lam)

    def same_as(self, other: "SpectrumCloud") -> bool:
        return np.array_equal(self.t, other.t) and all(
            np.array_equal(self.eigenvalues[e], other.eigenvalues[e]) for e in ENDS
        )


def essential_spectrum(A: BandOperator, samples: int = DEFAULT_SAMPLES) -> SpectrumCloud:
    if samples < 16:
        raise ValueError(f"need at least 16 samples, got {samples}")
    t = 2 * np.pi * np.arange(samples) / samples
    return SpectrumCloud(t, {end: eigenvalues_grid(symbol_at(A, end), t) for end in ENDS})


def in_essential_spectrum(A: BandOperator, lam: complex, tol: float = CIRCLE_TOL) -> bool:
    """True iff ``det(A^(., end) - lam)`` has a zero on the circle at some end."""
    for end in ENDS:
        if vanishes_on_circle(det(symbol_at(A, end).minus_scalar(lam)), tol):
            return True
    return False


@dataclass(frozen=True)
class Band:
    """``{z in T : sign * Re z in [lo, hi]}`` for one end."""

    end: str
    sign: int
    lo: float
    hi: float

    def real_interval(self) -> tuple[float, float]:
        return (self.lo, self.hi) if self.sign > 0 else (-self.hi, -self.lo)


@dataclass(frozen=True)
class CircularBandSet:
    bands: tuple[Band, ...]

    def contains(self, z: complex, tol: float = 1e-9) -> bool:
        if abs(abs(z) - 1) > tol:
            return False
        return any(b.lo - tol <= b.sign * z.real <= b.hi + tol for b in self.bands)

    def band(self, end: str) -> Band:
        return next(b for b in self.bands if b.end == end)

    def endpoints(self) -> list[complex]:
        """Points of the circle at the ends of each arc (both half planes)."""
        pts = []
        for b in self.bands:
            for x in b.real_interval():
                y = math.sqrt(max(0.0, 1 - x * x))
                pts.extend([complex(x, y), complex(x, -y)])
        return pts

    def to_dict(self) -> list[dict]:
        return [{"end": b.end, "sign": b.sign, "lo": b.lo, "hi": b.hi} for b in self.bands]


def walk_spectrum_bands(params: "WalkParameters") -> CircularBandSet:
    """Arcs ``sgn(p a) Re z in [|pa| - |qb|, |pa| + |qb|]`` at each end."""
    bands = []
    for end in ENDS:
        p = params.p.limit(end).real
        a = params.a.limit(end).real
        qb = abs(params.q.limit(end)) * abs(params.b.limit(end))
        pa = abs(p * a)
        lo = min(max(pa - qb, -1.0), 1.0)
        # |pa| + |qb| = 1 exactly when |p| = |a|; rounding must not open a gap at the edge
        hi = 1.0 if abs(p) == abs(a) else min(max(pa + qb, -1.0), 1.0)
        bands.append(Band(end, sgn(p * a), lo, hi))
    return CircularBandSet(tuple(bands))
