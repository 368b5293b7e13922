"""Split-step quantum walk built from a chiral pair of unitary involutions.

``Gamma = [[p, q L], [L* q*, -p(. - 1)]]`` and ``Gamma' = [[a, b*], [b, -a]]``
act on l^2(Z, C^2); the evolution is ``U = Gamma Gamma'``.  The Witten indices
``ind(Gamma, Gamma')`` and ``ind(Gamma', Gamma)`` are computed twice: from the
closed-form case tables in the asymptotic values of ``p`` and ``a``, and by
running the general winding-number index engine on the explicitly conjugated,
phase-repaired off-diagonal blocks of ``Im U``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.optimize import minimize_scalar

from .core import (
    BandOperator,
    TwoPhaseSequence,
    adjoint,
    compose,
    constant,
    from_blocks,
    identity,
    multiplication,
    pointwise,
    scale,
    shift,
    symbol_at,
)
from .errors import ConstraintError, NotFredholmError, VerificationError
from .index import fredholm_index
from .spectrum import (
    DEFAULT_SAMPLES,
    ENDS,
    CircularBandSet,
    essential_spectrum,
    sgn,
    walk_spectrum_bands,
)
from .symbol import LaurentPoly, vanishes_on_circle, winding

__all__ = [
    "WalkParameters",
    "AsymptoticPhases",
    "ChiralBlocks",
    "WittenReport",
    "QSpectrum",
    "pointwise_phase",
    "asymptotic_phases",
    "build_gamma",
    "build_gamma_prime",
    "build_evolution",
    "epsilon_operator",
    "gamma_operator",
    "chiral_blocks",
    "reassemble",
    "phase_repair",
    "repaired_blocks",
    "f_symbols",
    "ellipse_poly",
    "ellipse_winding",
    "closed_form_indices",
    "witten_indices",
    "spectrum_U",
    "spectrum_Q",
    "gauge_transform",
]

CONSTRAINT_TOL = 1e-10


def _sites(*seqs: TwoPhaseSequence) -> list[int]:
    out: set[int] = set()
    for s in seqs:
        out.update(s.overrides)
    return sorted(out)


def _real(s: TwoPhaseSequence) -> TwoPhaseSequence:
    return pointwise(lambda v: complex(v.real), s)


@dataclass(frozen=True, eq=False)
class WalkParameters:
    """Coin sequences with ``p, a`` real and ``p^2 + |q|^2 = a^2 + |b|^2 = 1`` everywhere."""

    p: TwoPhaseSequence
    q: TwoPhaseSequence
    a: TwoPhaseSequence
    b: TwoPhaseSequence

    def __post_init__(self) -> None:
        for name in ("p", "q", "a", "b"):
            s = getattr(self, name)
            if not isinstance(s, TwoPhaseSequence):
                object.__setattr__(self, name, constant(s))
        for name in ("p", "a"):
            if not getattr(self, name).is_real():
                raise ConstraintError(f"{name} must be real-valued")
        for real, cplx, label in ((self.p, self.q, "p^2 + |q|^2"), (self.a, self.b, "a^2 + |b|^2")):
            checks = [(end, real.limit(end), cplx.limit(end)) for end in ENDS]
            checks += [(f"x={x}", real.value(x), cplx.value(x)) for x in _sites(real, cplx)]
            for where, r, c in checks:
                err = abs(r.real**2 + abs(c) ** 2 - 1)
                if err > CONSTRAINT_TOL:
                    raise ConstraintError(f"{label} = 1 violated at {where} (error {err:.3g})")

    @classmethod
    def constant(cls, p: float, q: complex, a: float, b: complex) -> "WalkParameters":
        return cls(constant(p), constant(q), constant(a), constant(b))

    @classmethod
    def from_limits(cls, p, q, a, b) -> "WalkParameters":
        """Each argument is a ``(limit_neg, limit_pos)`` pair."""
        return cls(*(TwoPhaseSequence(*pair) for pair in (p, q, a, b)))

    @property
    def window_radius(self) -> int:
        sites = _sites(self.p, self.q, self.a, self.b)
        return max((abs(x) for x in sites), default=0)


def _arg(w: complex) -> float:
    """Argument in [0, 2*pi), with arg 0 := 0."""
    if w == 0:
        return 0.0
    return cmath.phase(w) % (2 * math.pi)


def pointwise_phase(s: TwoPhaseSequence) -> TwoPhaseSequence:
    """``x -> arg s(x)`` (0 where ``s(x) = 0``); its limits are the asymptotic phases."""
    return pointwise(_arg, s)


@dataclass(frozen=True)
class AsymptoticPhases:
    theta_neg: float
    theta_pos: float
    phi_neg: float
    phi_pos: float

    def theta(self, end: str) -> float:
        return self.theta_pos if end == "pos" else self.theta_neg

    def phi(self, end: str) -> float:
        return self.phi_pos if end == "pos" else self.phi_neg


def asymptotic_phases(params: WalkParameters) -> AsymptoticPhases:
    return AsymptoticPhases(
        _arg(params.q.limit_neg), _arg(params.q.limit_pos), _arg(params.b.limit_neg), _arg(params.b.limit_pos)
    )


def _m(s) -> BandOperator:
    return multiplication(s)


def _chain(*ops: BandOperator) -> BandOperator:
    out = ops[0]
    for op in ops[1:]:
        out = compose(out, op)
    return out


def _f(func, *seqs, shifts=None) -> TwoPhaseSequence:
    return pointwise(func, *seqs, shifts=shifts)


def build_gamma(params: WalkParameters) -> BandOperator:
    """``[[p, q L], [L* q*, -p(. - 1)]]``."""
    p, q = params.p, params.q
    return BandOperator(
        2,
        1,
        {
            (0, 0, 0): p,
            (0, 1, 1): q,
            (1, 0, -1): _f(np.conj, q, shifts=(-1,)),
            (1, 1, 0): _f(lambda v: -v, p, shifts=(-1,)),
        },
    )


def build_gamma_prime(params: WalkParameters) -> BandOperator:
    """``[[a, b*], [b, -a]]``."""
    a, b = params.a, params.b
    return BandOperator(
        2,
        0,
        {(0, 0, 0): a, (0, 1, 0): b.conj(), (1, 0, 0): b, (1, 1, 0): _f(lambda v: -v, a)},
    )


def build_evolution(params: WalkParameters) -> BandOperator:
    return compose(build_gamma(params), build_gamma_prime(params))


def _sqrt1(sign: int):
    return lambda v: math.sqrt(max(0.0, 1.0 + sign * v.real))


def _check_phase(s: TwoPhaseSequence, phase: TwoPhaseSequence, name: str) -> None:
    pts = [(end, s.limit(end), phase.limit(end)) for end in ENDS]
    pts += [(f"x={x}", s.value(x), phase.value(x)) for x in _sites(s, phase)]
    for where, v, th in pts:
        if abs(abs(v) * cmath.exp(1j * th.real) - v) > 1e-10:
            raise ConstraintError(f"phase sequence for {name} inconsistent with {name} at {where}")


def epsilon_operator(params: WalkParameters, theta: TwoPhaseSequence) -> BandOperator:
    """``(1/sqrt 2) diag(1, L* e^{-i theta}) [[p+, -p-], [p-, p+]]``."""
    pp, pm = _f(_sqrt1(1), params.p), _f(_sqrt1(-1), params.p)
    lower = compose(shift(-1), _m(_f(lambda t: cmath.exp(-1j * t.real), theta)))
    D = from_blocks([[identity(1), None], [None, lower]])
    M = from_blocks([[_m(pp), scale(_m(pm), -1)], [_m(pm), _m(pp)]])
    return scale(compose(D, M), 1 / math.sqrt(2))


def gamma_operator(params: WalkParameters, phi: TwoPhaseSequence) -> BandOperator:
    """``(1/sqrt 2) diag(1, e^{i phi}) [[a+, -a-], [a-, a+]]``."""
    ap, am = _f(_sqrt1(1), params.a), _f(_sqrt1(-1), params.a)
    D = multiplication(constant(1), _f(lambda t: cmath.exp(1j * t.real), phi))
    M = from_blocks([[_m(ap), scale(_m(am), -1)], [_m(am), _m(ap)]])
    return scale(compose(D, M), 1 / math.sqrt(2))


@dataclass(frozen=True, eq=False)
class ChiralBlocks:
    Q_eps0: BandOperator
    Q_gam0: BandOperator
    R_eps1: BandOperator
    R_eps2: BandOperator
    R_gam1: BandOperator
    R_gam2: BandOperator


def chiral_blocks(params: WalkParameters, theta: TwoPhaseSequence, phi: TwoPhaseSequence) -> ChiralBlocks:
    """The six scalar blocks of ``U`` in the eigenbases of ``Gamma`` (via eps) and ``Gamma'`` (via gam)."""
    _check_phase(params.q, theta, "q")
    _check_phase(params.b, phi, "b")
    p, q, a, b = params.p, params.q, params.a, params.b
    pp, pm = _f(_sqrt1(1), p), _f(_sqrt1(-1), p)
    ap, am = _f(_sqrt1(1), a), _f(_sqrt1(-1), a)
    e_th = _m(_f(lambda t: cmath.exp(1j * t.real), theta))
    e_mth = _m(_f(lambda t: cmath.exp(-1j * t.real), theta))
    e_ph = _m(_f(lambda t: cmath.exp(1j * t.real), phi))
    e_mph = _m(_f(lambda t: cmath.exp(-1j * t.real), phi))
    L, Ls = shift(1), shift(-1)
    mb, mbc = _m(b), _m(b.conj())
    mq, mqc = _m(q), _m(q.conj())

    # e^{i theta} L b and b* L* e^{-i theta}, shared by all three eps blocks
    fwd = _chain(e_th, L, mb)
    bwd = _chain(mbc, Ls, e_mth)
    # e^{-i phi} L* q* and q L e^{i phi}, shared by all three gamma blocks
    g_bwd = _chain(e_mph, Ls, mqc)
    g_fwd = _chain(mq, L, e_ph)

    abs_q, abs_b = _f(abs, q), _f(abs, b)
    a_sum = _f(lambda u, v: (u + v).real, a, a, shifts=(0, 1))
    p_sum = _f(lambda u, v: (u + v).real, p, p, shifts=(0, -1))

    def lin(*terms: tuple[complex, BandOperator]) -> BandOperator:
        out = scale(terms[0][1], terms[0][0])
        for c, op in terms[1:]:
            out = out + scale(op, c)
        return out

    m2Q_eps = lin(
        (1, _chain(_m(pp), fwd, _m(pp))),
        (-1, _chain(_m(pm), bwd, _m(pm))),
        (-1, _m(_f(lambda u, v: u * v, abs_q, a_sum))),
    )
    p2Q_gam = lin(
        (1, _chain(_m(ap), g_bwd, _m(ap))),
        (-1, _chain(_m(am), g_fwd, _m(am))),
        (-1, _m(_f(lambda u, v: u * v, abs_b, p_sum))),
    )
    sq = lambda s: _f(lambda v: v * v, s)  # noqa: E731
    a_next = _f(lambda v: v, a, shifts=(1,))
    p_prev = _f(lambda v: v, p, shifts=(-1,))
    R_eps1 = lin(
        (1, _chain(_m(pm), fwd, _m(pp))),
        (1, _chain(_m(pp), bwd, _m(pm))),
        (1, _chain(_m(sq(pp)), _m(a))),
        (-1, _chain(_m(sq(pm)), _m(a_next))),
    )
    R_gam1 = lin(
        (1, _chain(_m(am), g_bwd, _m(ap))),
        (1, _chain(_m(ap), g_fwd, _m(am))),
        (1, _chain(_m(sq(ap)), _m(p))),
        (-1, _chain(_m(sq(am)), _m(p_prev))),
    )
    R_eps2 = lin(
        (1, _chain(_m(pp), fwd, _m(pm))),
        (1, _chain(_m(pm), bwd, _m(pp))),
        (-1, _chain(_m(sq(pm)), _m(a))),
        (1, _chain(_m(sq(pp)), _m(a_next))),
    )
    R_gam2 = lin(
        (1, _chain(_m(ap), g_bwd, _m(am))),
        (1, _chain(_m(am), g_fwd, _m(ap))),
        (-1, _chain(_m(sq(am)), _m(p))),
        (1, _chain(_m(sq(ap)), _m(p_prev))),
    )
    return ChiralBlocks(
        Q_eps0=scale(m2Q_eps, 1 / (-2j)),
        Q_gam0=scale(p2Q_gam, 1 / 2j),
        R_eps1=scale(R_eps1, 0.5),
        R_eps2=scale(R_eps2, 0.5),
        R_gam1=scale(R_gam1, 0.5),
        R_gam2=scale(R_gam2, 0.5),
    )


def reassemble(blocks: ChiralBlocks, which: str) -> BandOperator:
    """``[[R_1, i Q_0*], [i Q_0, R_2]]`` for ``which`` in {"eps", "gam"}."""
    if which == "eps":
        Q, R1, R2 = blocks.Q_eps0, blocks.R_eps1, blocks.R_eps2
    elif which == "gam":
        Q, R1, R2 = blocks.Q_gam0, blocks.R_gam1, blocks.R_gam2
    else:
        raise ValueError(f"which must be 'eps' or 'gam', got {which!r}")
    return from_blocks([[R1, scale(adjoint(Q), 1j)], [scale(Q, 1j), R2]])


def phase_repair(params: WalkParameters, theta: TwoPhaseSequence | None = None, phi: TwoPhaseSequence | None = None):
    """Sequences ``(theta_plus, theta_minus, phi_plus, phi_minus)``.

    ``theta_pm(x) = theta(x)`` on the side of ``x`` whose ``p`` limit equals ``+-1``
    and 0 elsewhere; likewise ``phi_pm`` with ``a``.  Sites ``x >= 0`` belong to
    the +inf side.
    """
    theta = pointwise_phase(params.q) if theta is None else theta
    phi = pointwise_phase(params.b) if phi is None else phi

    def select(base: TwoPhaseSequence, ref: TwoPhaseSequence, target: float) -> TwoPhaseSequence:
        hit = {end: ref.limit(end).real == target for end in ENDS}
        return TwoPhaseSequence(
            base.limit_neg if hit["neg"] else 0.0,
            base.limit_pos if hit["pos"] else 0.0,
            {x: v for x, v in base.overrides.items() if hit["pos" if x >= 0 else "neg"]},
        )

    return (
        select(theta, params.p, 1.0),
        select(theta, params.p, -1.0),
        select(phi, params.a, 1.0),
        select(phi, params.a, -1.0),
    )


def repaired_blocks(params: WalkParameters) -> tuple[BandOperator, BandOperator]:
    """``e^{-i theta+} Q_eps0 e^{i theta-}`` and ``e^{i phi+} Q_gam0 e^{-i phi-}``."""
    theta = pointwise_phase(params.q)
    phi = pointwise_phase(params.b)
    blocks = chiral_blocks(params, theta, phi)
    th_p, th_m, ph_p, ph_m = phase_repair(params, theta, phi)
    ex = lambda s, c: _m(_f(lambda t: cmath.exp(c * t.real), s))  # noqa: E731
    A_eps = _chain(ex(th_p, -1j), blocks.Q_eps0, ex(th_m, 1j))
    A_gam = _chain(ex(ph_p, 1j), blocks.Q_gam0, ex(ph_m, -1j))
    return A_eps, A_gam


def f_symbols(params: WalkParameters) -> tuple[dict[str, LaurentPoly], dict[str, LaurentPoly]]:
    """Per-end scalar symbols ``f_eps(., end)`` and ``f_gam(., end)`` of the repaired blocks."""
    ph = asymptotic_phases(params)
    f_eps, f_gam = {}, {}
    for end in ENDS:
        p, q = params.p.limit(end).real, params.q.limit(end)
        a, b = params.a.limit(end).real, params.b.limit(end)
        eth, eph = cmath.exp(1j * ph.theta(end)), cmath.exp(1j * ph.phi(end))
        m2i_f = LaurentPoly(
            {1: (p + 1) * b * eth, -1: (p - 1) * b.conjugate() / eth, 0: -2 * abs(q) * a}
        )
        p2i_f = LaurentPoly(
            {-1: (a + 1) * q.conjugate() / eph, 1: (a - 1) * q * eph, 0: -2 * abs(b) * p}
        )
        f_eps[end] = m2i_f * (1 / (-2j))
        f_gam[end] = p2i_f * (1 / 2j)
    return f_eps, f_gam


def ellipse_poly(alpha1: float, beta1: complex, alpha2: float, beta2: complex, Theta1: float) -> LaurentPoly:
    """``f`` with ``2 f(z) = (a1 + 1) b2 e^{iT} z + (a1 - 1) b2* e^{-iT} z^{-1} - 2 |b1| a2``."""
    e = cmath.exp(1j * Theta1)
    return LaurentPoly(
        {1: 0.5 * (alpha1 + 1) * beta2 * e, -1: 0.5 * (alpha1 - 1) * complex(beta2).conjugate() / e, 0: -abs(beta1) * alpha2}
    )


def ellipse_winding(alpha1: float, beta1: complex, alpha2: float, beta2: complex, Theta1: float) -> int:
    """Closed-form winding of :func:`ellipse_poly`: ``sgn(a1)`` if ``|a1| > |a2|``, else 0."""
    for al, be in ((alpha1, beta1), (alpha2, beta2)):
        if abs(al * al + abs(be) ** 2 - 1) > CONSTRAINT_TOL:
            raise ConstraintError("alpha^2 + |beta|^2 must equal 1")
    if abs(abs(beta1) * cmath.exp(1j * Theta1) - beta1) > 1e-10:
        raise ConstraintError("beta1 must equal |beta1| e^{i Theta1}")
    if abs(alpha1) == abs(alpha2):
        raise NotFredholmError("|alpha1| = |alpha2|: the curve passes through the origin")
    return sgn(alpha1) if abs(alpha1) > abs(alpha2) else 0


def _case(params: WalkParameters) -> dict[str, str]:
    out = {}
    for end in ENDS:
        p, a = abs(params.p.limit(end).real), abs(params.a.limit(end).real)
        if p == a:
            raise NotFredholmError(f"|p| = |a| at the {end} end; the chiral pair is not Fredholm")
        out[end] = "|p|>|a|" if p > a else "|p|<|a|"
    return out


_CASE_NUMBER = {
    ("|p|<|a|", "|p|<|a|"): 1,
    ("|p|<|a|", "|p|>|a|"): 2,
    ("|p|>|a|", "|p|<|a|"): 3,
    ("|p|>|a|", "|p|>|a|"): 4,
}


def closed_form_indices(params: WalkParameters) -> tuple[int, int, int]:
    """``(case, ind(Gamma, Gamma'), ind(Gamma', Gamma))`` from the four-case tables."""
    cls = _case(params)
    case = _CASE_NUMBER[(cls["neg"], cls["pos"])]
    sp = {e: sgn(params.p.limit(e).real) for e in ENDS}
    sa = {e: sgn(params.a.limit(e).real) for e in ENDS}
    ind_gg = {1: 0, 2: sp["pos"], 3: -sp["neg"], 4: sp["pos"] - sp["neg"]}[case]
    ind_g_g = {1: -sa["pos"] + sa["neg"], 2: sa["neg"], 3: -sa["pos"], 4: 0}[case]
    return case, ind_gg, ind_g_g


def _table_ind_pm(params: WalkParameters, case: int) -> tuple[Fraction, Fraction]:
    sp = {e: sgn(params.p.limit(e).real) for e in ENDS}
    sa = {e: sgn(params.a.limit(e).real) for e in ENDS}
    out = []
    for s in (1, -1):
        twice = {
            1: -s * sa["pos"] + s * sa["neg"],
            2: sp["pos"] + s * sa["neg"],
            3: -sp["neg"] - s * sa["pos"],
            4: sp["pos"] - sp["neg"],
        }[case]
        out.append(Fraction(twice, 2))
    return out[0], out[1]


@dataclass(frozen=True)
class WittenReport:
    fredholm: bool
    ind_gg: int
    ind_g_g: int
    ind_plus: Fraction
    ind_minus: Fraction
    case: int
    per_end_classification: dict[str, str]
    wn_eps: dict[str, int] = field(default_factory=dict)
    wn_gam: dict[str, int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "fredholm": self.fredholm,
            "ind_gamma_gammaprime": self.ind_gg,
            "ind_gammaprime_gamma": self.ind_g_g,
            "ind_plus": int(self.ind_plus),
            "ind_minus": int(self.ind_minus),
            "case": self.case,
            "per_end_classification": dict(self.per_end_classification),
            "wn_f_eps": dict(self.wn_eps),
            "wn_f_gamma": dict(self.wn_gam),
        }


def witten_indices(params: WalkParameters) -> WittenReport:
    """Witten indices by the case tables, confirmed by the winding engine.

    Raises :class:`NotFredholmError` when ``|p| = |a|`` at some end and
    :class:`VerificationError` if the two routes disagree.
    """
    classification = _case(params)
    case, ind_gg, ind_g_g = closed_form_indices(params)

    A_eps, A_gam = repaired_blocks(params)
    f_eps, f_gam = f_symbols(params)
    for end in ENDS:
        for op, f, name in ((A_eps, f_eps, "eps"), (A_gam, f_gam, "gamma")):
            sym = symbol_at(op, end)[0, 0]
            if not sym.almost_equal(f[end], 1e-12):
                raise VerificationError(f"symbol of the repaired {name} block differs from f_{name} at {end}")
    rep_eps = fredholm_index(A_eps)
    rep_gam = fredholm_index(A_gam)
    if not (rep_eps.fredholm and rep_gam.fredholm):
        raise VerificationError("case tables say Fredholm but a block symbol vanishes on the circle")
    wn_eps = {e: winding(f_eps[e]).winding for e in ENDS}
    wn_gam = {e: winding(f_gam[e]).winding for e in ENDS}
    if rep_eps.index != ind_gg or wn_eps["pos"] - wn_eps["neg"] != ind_gg:
        raise VerificationError(f"ind(Gamma, Gamma'): tables give {ind_gg}, engine gives {rep_eps.index}")
    if rep_gam.index != ind_g_g or wn_gam["pos"] - wn_gam["neg"] != ind_g_g:
        raise VerificationError(f"ind(Gamma', Gamma): tables give {ind_g_g}, engine gives {rep_gam.index}")

    ind_plus = Fraction(ind_gg + ind_g_g, 2)
    ind_minus = Fraction(ind_gg - ind_g_g, 2)
    if ind_plus.denominator != 1 or ind_minus.denominator != 1:
        raise VerificationError(f"ind_+- = {ind_plus}, {ind_minus} are not integers")
    if (ind_plus, ind_minus) != _table_ind_pm(params, case):
        raise VerificationError("ind_+- disagree with their explicit case table")
    return WittenReport(True, ind_gg, ind_g_g, ind_plus, ind_minus, case, classification, wn_eps, wn_gam)


def spectrum_U(params: WalkParameters, samples: int = DEFAULT_SAMPLES, tol: float = 1e-9) -> CircularBandSet:
    """Arcs of the essential spectrum of ``U``, checked against the sampled symbol eigenvalues."""
    bands = walk_spectrum_bands(params)
    cloud = essential_spectrum(build_evolution(params), samples)
    for end in ENDS:
        b = bands.band(end)
        lam = cloud.eigenvalues[end].ravel()
        off = np.abs(np.abs(lam) - 1) > tol
        outside = (b.sign * lam.real < b.lo - tol) | (b.sign * lam.real > b.hi + tol)
        if off.any() or outside.any():
            raise VerificationError(f"sampled eigenvalues at the {end} end leave the predicted arc")
    return bands


@dataclass(frozen=True)
class QSpectrum:
    """``sigma_ess(Im U)`` as ``[-hi, -lo] u [lo, hi]`` per end, computed three ways."""

    per_end: dict[str, tuple[float, float]]
    via_f_gam: dict[str, tuple[float, float]]
    via_U: dict[str, tuple[float, float]]

    def intervals(self) -> list[tuple[float, float]]:
        """Merged interval union, sorted."""
        raw = []
        for lo, hi in self.per_end.values():
            raw += [(-hi, -lo), (lo, hi)]
        raw.sort()
        merged = [list(raw[0])]
        for lo, hi in raw[1:]:
            if lo <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], hi)
            else:
                merged.append([lo, hi])
        return [tuple(m) for m in merged]

    def contains(self, x: float, tol: float = 1e-9) -> bool:
        return any(lo - tol <= x <= hi + tol for lo, hi in self.intervals())


def _modulus_range(f: LaurentPoly, samples: int) -> tuple[float, float]:
    """``(min, max)`` of ``|f|`` on the circle: grid search, then bounded refinement."""
    t = 2 * np.pi * np.arange(samples) / samples
    sq = np.abs(f(np.exp(1j * t))) ** 2
    h = 2 * np.pi / samples

    def refine(idx: int, sign: float) -> float:
        res = minimize_scalar(
            lambda s: sign * abs(complex(f(np.exp(1j * s)))) ** 2,
            bounds=(t[idx] - h, t[idx] + h),
            method="bounded",
            options={"xatol": 1e-12},
        )
        # keep the grid value if the refinement did not improve on it
        return sign * min(res.fun, sign * sq[idx])

    # |f|^2 is flat at a zero, so a root on the circle is detected exactly instead
    lo = 0.0 if vanishes_on_circle(f) else refine(int(np.argmin(sq)), 1.0)
    hi = refine(int(np.argmax(sq)), -1.0)
    return math.sqrt(max(lo, 0.0)), math.sqrt(max(hi, 0.0))


def spectrum_Q(params: WalkParameters, samples: int = DEFAULT_SAMPLES, tol: float = 1e-9) -> QSpectrum:
    """``sigma_ess(Q)`` from ``|f_eps|``, from ``|f_gam|``, and from ``Im`` of the arcs of ``U``."""
    f_eps, f_gam = f_symbols(params)
    bands = walk_spectrum_bands(params)
    via_eps, via_gam, via_U = {}, {}, {}
    for end in ENDS:
        via_eps[end] = _modulus_range(f_eps[end], samples)
        via_gam[end] = _modulus_range(f_gam[end], samples)
        x0, x1 = bands.band(end).real_interval()
        # |Im z| = sqrt((1 - x)(1 + x)) over the real parts x of the arc
        far = max(abs(x0), abs(x1))
        near = 0.0 if x0 <= 0 <= x1 else min(abs(x0), abs(x1))
        via_U[end] = (math.sqrt(max(0.0, (1 - far) * (1 + far))), math.sqrt(max(0.0, (1 - near) * (1 + near))))
        for other, label in ((via_gam[end], "f_gamma"), (via_U[end], "U arcs")):
            if max(abs(via_eps[end][0] - other[0]), abs(via_eps[end][1] - other[1])) > tol:
                raise VerificationError(
                    f"sigma_ess(Q) at the {end} end: f_eps gives {via_eps[end]}, {label} gives {other}"
                )
    return QSpectrum(via_eps, via_gam, via_U)


def gauge_transform(params: WalkParameters, psi: TwoPhaseSequence) -> WalkParameters:
    """Parameters of ``(D* Gamma D, D* Gamma' D)`` for ``D = diag(e^{i psi}, e^{i psi})``."""
    q_new = pointwise(
        lambda qv, s0, s1: qv * cmath.exp(1j * (s1.real - s0.real)), params.q, psi, psi, shifts=(0, 0, 1)
    )
    return WalkParameters(params.p, q_new, params.a, params.b)
