"""Laurent polynomials on the unit circle and their winding numbers.

Two independent winding algorithms are provided: adaptive phase unwrapping of
samples on the circle, and zero counting through companion-matrix roots.  The
root count is the authoritative answer; :func:`winding` runs both and flags any
disagreement.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
import scipy.linalg

from .errors import IndeterminateWindingError, WindingDiscrepancyError, ZeroPolynomialError

__all__ = [
    "LaurentPoly",
    "LaurentMatrixSymbol",
    "WindingResult",
    "det",
    "winding_unwrap",
    "winding_roots",
    "winding",
    "companion_roots",
    "on_circle",
    "vanishes_on_circle",
    "VANISH_RATIO",
    "CIRCLE_TOL",
]

VANISH_RATIO = 1e-8  # unwrap: min|p| must exceed this fraction of max|p|
CIRCLE_TOL = 1e-9  # roots: ||r| - 1| below this counts as "on the circle"
MAX_SAMPLES = 2**20


@dataclass(frozen=True, eq=False)
class LaurentPoly:
    """``sum_m c_m z^m`` with finitely many nonzero ``c_m`` (exact zeros are dropped)."""

    coeffs: Mapping[int, complex] = field(default_factory=dict)

    def __post_init__(self) -> None:
        clean = {int(m): complex(c) for m, c in self.coeffs.items() if c != 0}
        object.__setattr__(self, "coeffs", dict(sorted(clean.items())))

    @classmethod
    def constant(cls, c: complex) -> "LaurentPoly":
        return cls({0: c})

    @classmethod
    def monomial(cls, m: int, c: complex = 1.0) -> "LaurentPoly":
        return cls({m: c})

    @classmethod
    def from_array(cls, low: int, arr: Sequence[complex]) -> "LaurentPoly":
        return cls({low + m: c for m, c in enumerate(arr)})

    @classmethod
    def from_roots(cls, roots: Sequence[complex], shift: int = 0, lead: complex = 1.0) -> "LaurentPoly":
        """``lead * z^shift * prod (z - r)``."""
        arr = np.array([lead], dtype=complex)
        for r in roots:
            arr = np.convolve(arr, [-r, 1.0])
        return cls.from_array(shift, arr)

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def low(self) -> int:
        if not self.coeffs:
            raise ZeroPolynomialError("zero polynomial has no degree")
        return next(iter(self.coeffs))

    @property
    def high(self) -> int:
        if not self.coeffs:
            raise ZeroPolynomialError("zero polynomial has no degree")
        return next(reversed(self.coeffs))

    def to_array(self) -> tuple[int, np.ndarray]:
        """``(low, [c_low, ..., c_high])``."""
        if not self.coeffs:
            return 0, np.zeros(1, dtype=complex)
        lo, hi = self.low, self.high
        arr = np.zeros(hi - lo + 1, dtype=complex)
        for m, c in self.coeffs.items():
            arr[m - lo] = c
        return lo, arr

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        if not self.coeffs:
            return np.zeros_like(z)
        lo, arr = self.to_array()
        # Horner in z, then the z^lo factor
        acc = np.zeros_like(z)
        for c in arr[::-1]:
            acc = acc * z + c
        return acc * z**lo

    def __add__(self, other: "LaurentPoly | complex") -> "LaurentPoly":
        if not isinstance(other, LaurentPoly):
            other = LaurentPoly.constant(other)
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            out[m] = out.get(m, 0) + c
        return LaurentPoly(out)

    __radd__ = __add__

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly({m: -c for m, c in self.coeffs.items()})

    def __sub__(self, other: "LaurentPoly | complex") -> "LaurentPoly":
        if not isinstance(other, LaurentPoly):
            other = LaurentPoly.constant(other)
        return self + (-other)

    def __rsub__(self, other: complex) -> "LaurentPoly":
        return LaurentPoly.constant(other) - self

    def __mul__(self, other: "LaurentPoly | complex") -> "LaurentPoly":
        if not isinstance(other, LaurentPoly):
            c = complex(other)
            return LaurentPoly({m: c * v for m, v in self.coeffs.items()})
        if not self.coeffs or not other.coeffs:
            return LaurentPoly()
        lo1, a1 = self.to_array()
        lo2, a2 = other.to_array()
        return LaurentPoly.from_array(lo1 + lo2, np.convolve(a1, a2))

    __rmul__ = __mul__

    def reflect(self) -> "LaurentPoly":
        """``z -> p(conj z)`` on the circle, i.e. ``z -> p(1/z)``."""
        return LaurentPoly({-m: c for m, c in self.coeffs.items()})

    def conj_on_circle(self) -> "LaurentPoly":
        """``z -> conj(p(z))`` on the circle: ``c_m -> conj(c_{-m})``."""
        return LaurentPoly({-m: np.conj(c) for m, c in self.coeffs.items()})

    def almost_equal(self, other: "LaurentPoly", tol: float = 1e-12) -> bool:
        keys = set(self.coeffs) | set(other.coeffs)
        return all(abs(self.coeffs.get(m, 0) - other.coeffs.get(m, 0)) <= tol for m in keys)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __repr__(self) -> str:
        return f"LaurentPoly({self.coeffs!r})"


class LaurentMatrixSymbol:
    """Square matrix of :class:`LaurentPoly` entries, evaluated pointwise on the circle."""

    def __init__(self, entries: Sequence[Sequence[LaurentPoly]]):
        n = len(entries)
        if n == 0 or any(len(row) != n for row in entries):
            raise ValueError("symbol must be a non-empty square grid")
        self.entries = tuple(tuple(e if isinstance(e, LaurentPoly) else LaurentPoly.constant(e) for e in row) for row in entries)
        self.n = n

    def __getitem__(self, ij: tuple[int, int]) -> LaurentPoly:
        i, j = ij
        return self.entries[i][j]

    def __call__(self, z) -> np.ndarray:
        """``(..., n, n)`` complex array for scalar or array ``z``."""
        z = np.asarray(z, dtype=complex)
        out = np.empty(z.shape + (self.n, self.n), dtype=complex)
        for i in range(self.n):
            for j in range(self.n):
                out[..., i, j] = self.entries[i][j](z)
        return out

    def __matmul__(self, other: "LaurentMatrixSymbol") -> "LaurentMatrixSymbol":
        if other.n != self.n:
            raise ValueError("symbol sizes differ")
        n = self.n
        grid = [[sum((self[i, l] * other[l, j] for l in range(n)), LaurentPoly()) for j in range(n)] for i in range(n)]
        return LaurentMatrixSymbol(grid)

    def minus_scalar(self, lam: complex) -> "LaurentMatrixSymbol":
        """``S - lam * I``."""
        grid = [[self[i, j] - (lam if i == j else 0) for j in range(self.n)] for i in range(self.n)]
        return LaurentMatrixSymbol(grid)

    def almost_equal(self, other: "LaurentMatrixSymbol", tol: float = 1e-12) -> bool:
        return self.n == other.n and all(
            self[i, j].almost_equal(other[i, j], tol) for i in range(self.n) for j in range(self.n)
        )

    def __repr__(self) -> str:
        return f"LaurentMatrixSymbol({[list(r) for r in self.entries]!r})"


@dataclass(frozen=True)
class WindingResult:
    nowhere_vanishing: bool
    winding: int | None
    min_modulus: float
    method_agreement: bool = True


def det(S: LaurentMatrixSymbol) -> LaurentPoly:
    """Exact determinant by cofactor expansion along the first row."""

    def _det(rows: tuple[int, ...], cols: tuple[int, ...]) -> LaurentPoly:
        if len(rows) == 1:
            return S[rows[0], cols[0]]
        r0, rest = rows[0], rows[1:]
        total = LaurentPoly()
        for pos, c in enumerate(cols):
            entry = S[r0, c]
            if entry.is_zero():
                continue
            minor = _det(rest, cols[:pos] + cols[pos + 1 :])
            term = entry * minor
            total = total - term if pos % 2 else total + term
        return total

    idx = tuple(range(S.n))
    return _det(idx, idx)


def companion_roots(coeffs_low_to_high: np.ndarray) -> np.ndarray:
    """Roots of ``sum_m c_m z^m`` via eigenvalues of the balanced companion matrix."""
    c = np.trim_zeros(np.asarray(coeffs_low_to_high, dtype=complex), "b")
    if len(c) < 2:
        return np.zeros(0, dtype=complex)
    # exact zero roots first; balancing chokes on companions that are almost all zero
    full = len(c)
    c = np.trim_zeros(c, "f")
    zeros = np.zeros(full - len(c), dtype=complex)
    deg = len(c) - 1
    if deg == 0:
        return zeros
    if deg == 1:
        return np.concatenate([zeros, [-c[0] / c[1]]])
    C = np.zeros((deg, deg), dtype=complex)
    C[1:, :-1] = np.eye(deg - 1)
    C[:, -1] = -c[:-1] / c[-1]
    with np.errstate(all="ignore"):
        B, _ = scipy.linalg.matrix_balance(C, permute=False)
    if not np.all(np.isfinite(B)):
        B = C
    return np.concatenate([zeros, scipy.linalg.eigvals(B, overwrite_a=True, check_finite=False)])


def _sampled_min_modulus(p: LaurentPoly, m: int = 512) -> float:
    return float(np.min(np.abs(p(np.exp(2j * np.pi * np.arange(m) / m)))))


def on_circle(p: LaurentPoly, roots: np.ndarray, tol: float = CIRCLE_TOL) -> np.ndarray:
    """Mask of roots treated as lying on the unit circle.

    A root qualifies if ``||r| - 1| < tol``, or if it sits within 1e-6 of the
    circle and ``p`` is numerically zero at its radial projection.  The second
    test catches multiple roots on the circle, which the eigensolver splits by
    about sqrt(machine epsilon).
    """
    if roots.size == 0:
        return np.zeros(0, dtype=bool)
    dist = np.abs(np.abs(roots) - 1.0)
    mask = dist < tol
    near = (~mask) & (dist < 1e-6)
    if near.any():
        scale = sum(abs(c) for c in p.coeffs.values())
        proj = roots[near] / np.abs(roots[near])
        mask[near] = np.abs(p(proj)) <= 1e-12 * scale
    return mask


def _normalized(p: LaurentPoly, trim: bool = False) -> LaurentPoly:
    """``p`` divided by its largest coefficient modulus (windings are scale invariant).

    With ``trim``, outermost coefficients below machine epsilon are dropped: each
    stands for a root near 0 or near infinity, which the shift in degree already
    accounts for, and keeping it would overflow the companion matrix.
    """
    big = max(abs(c) for c in p.coeffs.values())
    coeffs = {m: c / big for m, c in p.coeffs.items()}
    if trim:
        eps = np.finfo(float).eps
        keys = sorted(coeffs)
        while abs(coeffs[keys[0]]) < eps:
            del coeffs[keys.pop(0)]
        while abs(coeffs[keys[-1]]) < eps:
            del coeffs[keys.pop()]
    return LaurentPoly(coeffs)


def vanishes_on_circle(p: LaurentPoly, tol: float = CIRCLE_TOL) -> bool:
    """True iff ``p`` is zero or has a root on the unit circle (within ``tol``)."""
    if p.is_zero():
        return True
    p = _normalized(p, trim=True)
    _, c = p.to_array()
    return bool(on_circle(p, companion_roots(c), tol).any())


def winding_roots(p: LaurentPoly) -> WindingResult:
    """Winding number as (#roots inside the disc) + (lowest degree)."""
    if p.is_zero():
        raise ZeroPolynomialError("winding number of the zero polynomial is undefined")
    min_mod = _sampled_min_modulus(p)
    p = _normalized(p, trim=True)
    # p = z^low * (c_0 + c_1 z + ...) with c_0 != 0
    low, c = p.to_array()
    roots = companion_roots(c)
    vanishing = bool(on_circle(p, roots).any())
    if vanishing:
        return WindingResult(False, None, min_mod)
    inside = int(np.count_nonzero(np.abs(roots) < 1.0))
    return WindingResult(True, inside + low, min_mod)


def _unwrap_total(p: LaurentPoly, m: int) -> tuple[np.ndarray, np.ndarray]:
    t = 2 * np.pi * np.arange(m) / m
    vals = p(np.exp(1j * t))
    # a zero sample makes the ratio inf/nan; the caller rejects it as vanishing
    with np.errstate(divide="ignore", invalid="ignore"):
        steps = np.angle(np.roll(vals, -1) / vals)
    return vals, steps


def winding_unwrap(p: LaurentPoly) -> WindingResult:
    """Winding number by accumulating the continuous argument along ``e^{it}``.

    The grid is doubled until every phase step is below pi/2 and the accumulated
    phase is within 1e-6 of a multiple of 2*pi.
    """
    if p.is_zero():
        return WindingResult(False, None, 0.0)
    scale = max(abs(c) for c in p.coeffs.values())
    p = _normalized(p)
    span = p.high - p.low
    m = max(64, 8 * (span + 1))
    m = 1 << (m - 1).bit_length()
    while m <= MAX_SAMPLES:
        vals, steps = _unwrap_total(p, m)
        mods = np.abs(vals)
        vmax = float(mods.max())
        vmin = float(mods.min())
        if not vmin > VANISH_RATIO * vmax:
            return WindingResult(False, None, vmin * scale)
        # sequential reduction over the sorted grid keeps the sum deterministic
        total = float(np.sum(steps)) / (2 * np.pi)
        w = round(total)
        if np.max(np.abs(steps)) < np.pi / 2 and abs(total - w) * 2 * np.pi < 1e-6:
            return WindingResult(True, int(w), vmin * scale)
        m *= 2
    raise IndeterminateWindingError(
        f"phase unwrapping did not converge with {MAX_SAMPLES} samples; the symbol nearly vanishes on the circle"
    )


def winding(p: LaurentPoly) -> WindingResult:
    """Root-count winding, cross-checked by phase unwrapping."""
    if p.is_zero():
        return WindingResult(False, None, 0.0, True)
    by_roots = winding_roots(p)
    try:
        by_unwrap = winding_unwrap(p)
    except IndeterminateWindingError:
        return WindingResult(by_roots.nowhere_vanishing, by_roots.winding, 0.0, False)
    agree = by_roots.nowhere_vanishing == by_unwrap.nowhere_vanishing and by_roots.winding == by_unwrap.winding
    if by_roots.nowhere_vanishing and by_unwrap.nowhere_vanishing and by_roots.winding != by_unwrap.winding:
        raise WindingDiscrepancyError(
            f"root count gives {by_roots.winding}, phase unwrapping gives {by_unwrap.winding}"
        )
    return WindingResult(by_roots.nowhere_vanishing, by_roots.winding, by_unwrap.min_modulus, agree)
