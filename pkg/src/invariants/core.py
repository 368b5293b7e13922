"""Strictly local operators on l^2(Z, C^n) with two-sided asymptotic coefficients.

A :class:`BandOperator` stores, for every block entry ``(i, j)`` and every shift
``y`` in ``[-k, k]``, a :class:`TwoPhaseSequence` ``a_ij(y, .)``.  The action on a
vector is

    (A psi)_i(x) = sum_j sum_y a_ij(y, x) psi_j(x + y),

i.e. ``a_ij(y, .)`` multiplies ``L^y`` where ``L psi = psi(. + 1)`` is the left shift.
Component indices are 0-based throughout the Python API.

Dense matrices produced here are ordered site-major, component-minor: the basis
vector for component ``i`` at site ``x`` of a window starting at ``lo`` sits at
position ``(x - lo) * n + i``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

import numpy as np

from .errors import DimensionError, TruncationError

__all__ = [
    "TwoPhaseSequence",
    "BandOperator",
    "FiniteVector",
    "HalfLineMatrix",
    "value",
    "apply",
    "adjoint",
    "compose",
    "add",
    "scale",
    "compress_truncate",
    "window_matrix",
    "symbol_at",
    "constant",
    "pointwise",
    "identity",
    "shift",
    "multiplication",
    "from_blocks",
]


def _side_of(x: int) -> int:
    """+1 for sites governed by the +inf limit (x >= 0), -1 otherwise."""
    return 1 if x >= 0 else -1


@dataclass(frozen=True, eq=False)
class TwoPhaseSequence:
    """A Z-indexed complex sequence equal to its limits outside a finite window.

    ``value(x)`` is ``overrides[x]`` when present, otherwise ``limit_pos`` for
    ``x >= 0`` and ``limit_neg`` for ``x < 0``.  Overrides equal to the limit of
    their side are dropped on construction so that equal sequences compare equal.
    """

    limit_neg: complex
    limit_pos: complex
    overrides: Mapping[int, complex] = field(default_factory=dict)

    def __post_init__(self) -> None:
        lneg = complex(self.limit_neg)
        lpos = complex(self.limit_pos)
        clean = {}
        for x, v in self.overrides.items():
            x = int(x)
            v = complex(v)
            if v != (lpos if x >= 0 else lneg):
                clean[x] = v
        object.__setattr__(self, "limit_neg", lneg)
        object.__setattr__(self, "limit_pos", lpos)
        object.__setattr__(self, "overrides", dict(sorted(clean.items())))

    def __call__(self, x: int) -> complex:
        return self.value(x)

    def value(self, x: int) -> complex:
        x = int(x)
        if x in self.overrides:
            return self.overrides[x]
        return self.limit_pos if x >= 0 else self.limit_neg

    def values(self, xs) -> np.ndarray:
        """Vectorised :meth:`value` over an integer array."""
        xs = np.asarray(xs, dtype=np.int64)
        out = np.where(xs >= 0, self.limit_pos, self.limit_neg).astype(complex)
        if self.overrides:
            for x, v in self.overrides.items():
                out[xs == x] = v
        return out

    def limit(self, end: str) -> complex:
        if end == "pos":
            return self.limit_pos
        if end == "neg":
            return self.limit_neg
        raise ValueError(f"end must be 'neg' or 'pos', got {end!r}")

    @property
    def window(self) -> tuple[int, int] | None:
        """Smallest closed interval containing every override, or None."""
        if not self.overrides:
            return None
        keys = list(self.overrides)
        return keys[0], keys[-1]

    def is_zero(self) -> bool:
        return self.limit_neg == 0 and self.limit_pos == 0 and not self.overrides

    def is_real(self) -> bool:
        vals = [self.limit_neg, self.limit_pos, *self.overrides.values()]
        return all(v.imag == 0 for v in vals)

    def asymptotics(self) -> "TwoPhaseSequence":
        """Same limits, overrides removed."""
        return TwoPhaseSequence(self.limit_neg, self.limit_pos)

    def shifted(self, d: int) -> "TwoPhaseSequence":
        """The sequence ``x -> self(x + d)``."""
        return pointwise(lambda v: v, self, shifts=(d,))

    def conj(self) -> "TwoPhaseSequence":
        return pointwise(np.conj, self)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TwoPhaseSequence):
            return NotImplemented
        return (
            self.limit_neg == other.limit_neg
            and self.limit_pos == other.limit_pos
            and self.overrides == other.overrides
        )

    def __repr__(self) -> str:
        return (
            f"TwoPhaseSequence(limit_neg={self.limit_neg!r}, "
            f"limit_pos={self.limit_pos!r}, overrides={self.overrides!r})"
        )


def value(s: TwoPhaseSequence, x: int) -> complex:
    return s.value(x)


def constant(c: complex) -> TwoPhaseSequence:
    return TwoPhaseSequence(c, c)


ZERO = constant(0)


def _boundary_sites(d: int) -> range:
    # sites where x and x + d fall on different sides of 0
    if d > 0:
        return range(-d, 0)
    if d < 0:
        return range(0, -d)
    return range(0)


def pointwise(
    func: Callable[..., complex],
    *seqs: TwoPhaseSequence,
    shifts: Iterable[int] | None = None,
) -> TwoPhaseSequence:
    """Sequence ``x -> func(s_1(x + d_1), ..., s_m(x + d_m))``.

    The result is again two-phase: its limits are ``func`` applied to the limits,
    and it differs from them only on the shifted override windows plus the few
    sites where a shift straddles the origin.
    """
    shifts = tuple(shifts) if shifts is not None else (0,) * len(seqs)
    if len(shifts) != len(seqs):
        raise ValueError("one shift per sequence is required")
    sites: set[int] = set()
    for s, d in zip(seqs, shifts):
        sites.update(x - d for x in s.overrides)
        sites.update(_boundary_sites(d))
    lneg = complex(func(*(s.limit_neg for s in seqs)))
    lpos = complex(func(*(s.limit_pos for s in seqs)))
    overrides = {x: complex(func(*(s.value(x + d) for s, d in zip(seqs, shifts)))) for x in sites}
    return TwoPhaseSequence(lneg, lpos, overrides)


@dataclass(frozen=True, eq=False)
class BandOperator:
    """Finite band ``sum_y a_ij(y, .) L^y`` of block size ``n`` and radius ``k``.

    ``coeff`` maps ``(i, j, y)`` to a sequence; missing keys are the zero sequence.
    """

    n: int
    k: int
    coeff: Mapping[tuple[int, int, int], TwoPhaseSequence] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"block size must be positive, got {self.n}")
        if self.k < 0:
            raise ValueError(f"band radius must be nonnegative, got {self.k}")
        clean = {}
        for (i, j, y), s in self.coeff.items():
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise IndexError(f"component index ({i}, {j}) out of range for n={self.n}")
            if abs(y) > self.k:
                raise IndexError(f"shift {y} exceeds band radius {self.k}")
            if not isinstance(s, TwoPhaseSequence):
                s = constant(s)
            if not s.is_zero():
                clean[(int(i), int(j), int(y))] = s
        object.__setattr__(self, "coeff", dict(sorted(clean.items())))

    def get(self, i: int, j: int, y: int) -> TwoPhaseSequence:
        return self.coeff.get((i, j, y), ZERO)

    @property
    def override_radius(self) -> int:
        """Largest |x| of any override, 0 if there are none."""
        r = 0
        for s in self.coeff.values():
            if s.overrides:
                lo, hi = s.window
                r = max(r, abs(lo), abs(hi))
        return r

    def asymptotics(self) -> "BandOperator":
        return BandOperator(self.n, self.k, {key: s.asymptotics() for key, s in self.coeff.items()})

    def same_coefficients(self, other: "BandOperator") -> bool:
        return self.n == other.n and dict(self.coeff) == dict(other.coeff)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BandOperator):
            return NotImplemented
        return self.n == other.n and self.k == other.k and dict(self.coeff) == dict(other.coeff)

    def __add__(self, other: "BandOperator") -> "BandOperator":
        return add(self, other)

    def __sub__(self, other: "BandOperator") -> "BandOperator":
        return add(self, scale(other, -1))

    def __matmul__(self, other: "BandOperator") -> "BandOperator":
        return compose(self, other)

    def __rmul__(self, c: complex) -> "BandOperator":
        return scale(self, c)

    def __repr__(self) -> str:
        return f"BandOperator(n={self.n}, k={self.k}, terms={len(self.coeff)})"


@dataclass(frozen=True, eq=False)
class FiniteVector:
    """Finitely supported element of l^2(Z, C^n); ``entries[(i, x)]``."""

    n: int
    entries: Mapping[tuple[int, int], complex] = field(default_factory=dict)

    def __post_init__(self) -> None:
        clean = {}
        for (i, x), v in self.entries.items():
            if not 0 <= i < self.n:
                raise IndexError(f"component {i} out of range for n={self.n}")
            v = complex(v)
            if v != 0:
                clean[(int(i), int(x))] = v
        object.__setattr__(self, "entries", clean)

    @classmethod
    def delta(cls, x: int, i: int = 0, n: int = 1) -> "FiniteVector":
        return cls(n, {(i, x): 1.0})

    @classmethod
    def from_array(cls, data: np.ndarray, lo: int, n: int) -> "FiniteVector":
        """Inverse of :meth:`to_array` (site-major layout starting at site ``lo``)."""
        data = np.asarray(data, dtype=complex).reshape(-1, n)
        return cls(n, {(i, lo + s): data[s, i] for s in range(data.shape[0]) for i in range(n)})

    def support(self) -> tuple[int, int] | None:
        if not self.entries:
            return None
        xs = [x for _, x in self.entries]
        return min(xs), max(xs)

    def to_array(self, lo: int, hi: int) -> np.ndarray:
        out = np.zeros((hi - lo + 1) * self.n, dtype=complex)
        for (i, x), v in self.entries.items():
            if not lo <= x <= hi:
                raise ValueError(f"entry at site {x} outside window [{lo}, {hi}]")
            out[(x - lo) * self.n + i] = v
        return out

    def get(self, i: int, x: int) -> complex:
        return self.entries.get((i, x), 0j)

    def inner(self, other: "FiniteVector") -> complex:
        """<self, other>, antilinear in ``self``."""
        return sum((np.conj(v) * other.get(i, x) for (i, x), v in self.entries.items()), 0j)

    def norm(self) -> float:
        return float(np.sqrt(sum(abs(v) ** 2 for v in self.entries.values())))

    def __sub__(self, other: "FiniteVector") -> "FiniteVector":
        keys = set(self.entries) | set(other.entries)
        return FiniteVector(self.n, {key: self.entries.get(key, 0) - other.entries.get(key, 0) for key in keys})

    def max_abs(self) -> float:
        return max((abs(v) for v in self.entries.values()), default=0.0)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FiniteVector):
            return NotImplemented
        return self.n == other.n and self.entries == other.entries


@dataclass(frozen=True, eq=False)
class HalfLineMatrix:
    """Dense truncation of a half-line compression A_L or A_R.

    Side ``"R"`` covers sites ``0..N-1``; side ``"L"`` covers ``-N..-1``.
    """

    side: str
    N: int
    n: int
    data: np.ndarray

    @property
    def sites(self) -> range:
        return range(0, self.N) if self.side == "R" else range(-self.N, 0)


def _check_same_n(A: BandOperator, B: BandOperator) -> None:
    if A.n != B.n:
        raise DimensionError(f"block sizes differ: {A.n} vs {B.n}")


def apply(A: BandOperator, v: FiniteVector) -> FiniteVector:
    if v.n != A.n:
        raise DimensionError(f"vector has {v.n} components, operator expects {A.n}")
    out: dict[tuple[int, int], complex] = {}
    # each entry psi_j(x0) feeds (A psi)_i(x0 - y) with weight a_ij(y, x0 - y)
    for (j0, x0), val in v.entries.items():
        for (i, j, y), s in A.coeff.items():
            if j != j0:
                continue
            x = x0 - y
            out[(i, x)] = out.get((i, x), 0j) + s.value(x) * val
    return FiniteVector(A.n, out)


def adjoint(A: BandOperator) -> BandOperator:
    """Hilbert-space adjoint: ``b_ji(-y, x) = conj(a_ij(y, x - y))``."""
    coeff = {}
    for (i, j, y), s in A.coeff.items():
        coeff[(j, i, -y)] = pointwise(np.conj, s, shifts=(-y,))
    return BandOperator(A.n, A.k, coeff)


def add(A: BandOperator, B: BandOperator) -> BandOperator:
    _check_same_n(A, B)
    coeff = dict(A.coeff)
    for key, s in B.coeff.items():
        coeff[key] = pointwise(lambda u, v: u + v, coeff[key], s) if key in coeff else s
    return BandOperator(A.n, max(A.k, B.k), coeff)


def scale(A: BandOperator, c: complex) -> BandOperator:
    c = complex(c)
    return BandOperator(A.n, A.k, {key: pointwise(lambda u: c * u, s) for key, s in A.coeff.items()})


def compose(A: BandOperator, B: BandOperator) -> BandOperator:
    """Operator product ``A B``; radius ``k_A + k_B``.

    ``c_il(y, x) = sum_j sum_{y1 + y2 = y} a_ij(y1, x) b_jl(y2, x + y1)``.
    """
    _check_same_n(A, B)
    terms: dict[tuple[int, int, int], list[TwoPhaseSequence]] = {}
    for (i, j, y1), a in A.coeff.items():
        for (j2, l, y2), b in B.coeff.items():
            if j2 != j:
                continue
            prod = pointwise(lambda u, v: u * v, a, b, shifts=(0, y1))
            terms.setdefault((i, l, y1 + y2), []).append(prod)
    coeff = {}
    for key, parts in terms.items():
        coeff[key] = pointwise(lambda *vs: sum(vs, 0j), *parts) if len(parts) > 1 else parts[0]
    return BandOperator(A.n, A.k + B.k, coeff)


def identity(n: int = 1) -> BandOperator:
    return BandOperator(n, 0, {(i, i, 0): constant(1) for i in range(n)})


def shift(y: int = 1, n: int = 1) -> BandOperator:
    """``L^y`` acting componentwise on l^2(Z, C^n)."""
    return BandOperator(n, abs(y), {(i, i, y): constant(1) for i in range(n)})


def multiplication(*diag: TwoPhaseSequence | complex) -> BandOperator:
    """Diagonal multiplication operator by the given sequences."""
    seqs = [d if isinstance(d, TwoPhaseSequence) else constant(d) for d in diag]
    return BandOperator(len(seqs), 0, {(i, i, 0): s for i, s in enumerate(seqs)})


def from_blocks(blocks: list[list[BandOperator | None]]) -> BandOperator:
    """Assemble an ``m*n``-component operator from an ``m x m`` grid of ``n``-component blocks."""
    m = len(blocks)
    n = None
    k = 0
    coeff = {}
    for bi, row in enumerate(blocks):
        if len(row) != m:
            raise DimensionError("block grid must be square")
        for bj, blk in enumerate(row):
            if blk is None:
                continue
            if n is None:
                n = blk.n
            elif blk.n != n:
                raise DimensionError("blocks have different sizes")
            k = max(k, blk.k)
            for (i, j, y), s in blk.coeff.items():
                coeff[(bi * n + i, bj * n + j, y)] = s
    if n is None:
        raise ValueError("at least one block must be given")
    return BandOperator(m * n, k, coeff)


def window_matrix(A: BandOperator, lo: int, hi: int, col_lo: int | None = None, col_hi: int | None = None) -> np.ndarray:
    """Dense matrix of A between the site windows ``[lo, hi]`` (rows) and ``[col_lo, col_hi]`` (columns).

    Columns default to the row window.  Entry ``((x - lo) n + i, (x' - col_lo) n + j)``
    is ``<delta_{i,x}, A delta_{j,x'}> = a_ij(x' - x, x)``.
    """
    if col_lo is None:
        col_lo, col_hi = lo, hi
    n = A.n
    rows = hi - lo + 1
    cols = col_hi - col_lo + 1
    M = np.zeros((rows * n, cols * n), dtype=complex)
    xs = np.arange(lo, hi + 1)
    for (i, j, y), s in A.coeff.items():
        xc = xs + y
        mask = (xc >= col_lo) & (xc <= col_hi)
        if not mask.any():
            continue
        x_in = xs[mask]
        M[(x_in - lo) * n + i, (xc[mask] - col_lo) * n + j] = s.values(x_in)
    return M


def compress_truncate(A: BandOperator, side: str, N: int) -> HalfLineMatrix:
    if side not in ("L", "R"):
        raise ValueError(f"side must be 'L' or 'R', got {side!r}")
    if N <= A.k:
        raise TruncationError(f"truncation length {N} must exceed band radius {A.k}")
    lo, hi = (0, N - 1) if side == "R" else (-N, -1)
    return HalfLineMatrix(side, N, A.n, window_matrix(A, lo, hi))


def symbol_at(A: BandOperator, end: str):
    """Matrix Laurent polynomial ``sum_y a_ij(y, end) z^y`` built from the limits only."""
    from .symbol import LaurentMatrixSymbol, LaurentPoly

    grid = [[{} for _ in range(A.n)] for _ in range(A.n)]
    for (i, j, y), s in A.coeff.items():
        c = s.limit(end)
        if c != 0:
            grid[i][j][y] = c
    return LaurentMatrixSymbol([[LaurentPoly(e) for e in row] for row in grid])
