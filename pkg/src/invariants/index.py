"""Fredholm index of a two-phase band operator from the windings of its end symbols."""

from __future__ import annotations

from dataclasses import asdict, dataclass

from .core import BandOperator, symbol_at
from .symbol import CIRCLE_TOL, VANISH_RATIO, WindingResult, det, winding

__all__ = ["InvariantReport", "fredholm_index", "end_winding"]


@dataclass(frozen=True)
class InvariantReport:
    fredholm: bool
    wn_neg: int | None
    wn_pos: int | None
    index: int | None
    min_modulus_neg: float
    min_modulus_pos: float
    method_agreement: bool
    circle_tol: float = CIRCLE_TOL
    vanish_ratio: float = VANISH_RATIO

    def to_dict(self) -> dict:
        d = asdict(self)
        if not self.fredholm:
            d.pop("index")
        return d


def end_winding(A: BandOperator, end: str) -> WindingResult:
    """Winding of ``det A^(., end)`` around the origin."""
    return winding(det(symbol_at(A, end)))


def fredholm_index(A: BandOperator) -> InvariantReport:
    """``ind A = wn(det A^(., +inf)) - wn(det A^(., -inf))`` when both determinants are nowhere zero."""
    neg = end_winding(A, "neg")
    pos = end_winding(A, "pos")
    fredholm = neg.nowhere_vanishing and pos.nowhere_vanishing
    return InvariantReport(
        fredholm=fredholm,
        wn_neg=neg.winding,
        wn_pos=pos.winding,
        index=(pos.winding - neg.winding) if fredholm else None,
        min_modulus_neg=neg.min_modulus,
        min_modulus_pos=pos.min_modulus,
        method_agreement=neg.method_agreement and pos.method_agreement,
    )
