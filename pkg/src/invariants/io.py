"""JSON specification files for band operators and split-step walks.

Both kinds carry ``"format": 1`` and a ``"kind"`` of ``"operator"`` or ``"walk"``.
Complex numbers are ``[re, im]`` pairs; the walk coins ``p`` and ``a`` are plain
reals.  Component indices ``i, j`` are 1-based in files and 0-based in memory.

Operator::

    {"format": 1, "kind": "operator", "n": 1, "k": 1,
     "coefficients": [{"i": 1, "j": 1, "y": 1, "limit_neg": [1, 0], "limit_pos": [1, 0],
                       "overrides": [{"x": 0, "value": [2, 0]}]}]}

Walk::

    {"format": 1, "kind": "walk",
     "p": {"limit_neg": -0.9, "limit_pos": 0.9, "overrides": []},
     "q": {"limit_neg": [0.4358898943540674, 0], "limit_pos": [0.4358898943540674, 0]},
     "a": {"limit_neg": 0, "limit_pos": 0}, "b": {"limit_neg": [1, 0], "limit_pos": [1, 0]}}
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from pathlib import Path
from typing import Any

from .core import BandOperator, TwoPhaseSequence
from .errors import ConstraintError, SpecError

__all__ = [
    "FORMAT_VERSION",
    "load_spec",
    "parse_spec",
    "operator_to_dict",
    "walk_to_dict",
    "dumps",
    "write_atomic",
]

FORMAT_VERSION = 1


def _number(v: Any, where: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise SpecError(f"{where}: expected a number, got {v!r}")
    if not math.isfinite(v):
        raise SpecError(f"{where}: non-finite value {v!r}")
    return float(v)


def _complex(v: Any, where: str) -> complex:
    if not (isinstance(v, list) and len(v) == 2):
        raise SpecError(f"{where}: expected an [re, im] pair, got {v!r}")
    return complex(_number(v[0], where), _number(v[1], where))


def _int(v: Any, where: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise SpecError(f"{where}: expected an integer, got {v!r}")
    return v


def _sequence(d: Any, where: str, real: bool) -> TwoPhaseSequence:
    if not isinstance(d, dict):
        raise SpecError(f"{where}: expected an object")
    conv = (lambda v, w: complex(_number(v, w))) if real else _complex
    for key in ("limit_neg", "limit_pos"):
        if key not in d:
            raise SpecError(f"{where}: missing {key!r}")
    overrides = {}
    for m, item in enumerate(d.get("overrides", [])):
        w = f"{where}.overrides[{m}]"
        if not isinstance(item, dict) or "x" not in item or "value" not in item:
            raise SpecError(f"{w}: expected {{x, value}}")
        x = _int(item["x"], w)
        if x in overrides:
            raise SpecError(f"{w}: duplicate site {x}")
        overrides[x] = conv(item["value"], w)
    return TwoPhaseSequence(conv(d["limit_neg"], f"{where}.limit_neg"), conv(d["limit_pos"], f"{where}.limit_pos"), overrides)


def _parse_operator(doc: dict) -> BandOperator:
    n = _int(doc.get("n"), "n")
    k = _int(doc.get("k"), "k")
    if n < 1 or k < 0:
        raise SpecError(f"need n >= 1 and k >= 0, got n={n}, k={k}")
    coeffs = doc.get("coefficients")
    if not isinstance(coeffs, list):
        raise SpecError("coefficients: expected a list")
    out = {}
    for m, c in enumerate(coeffs):
        where = f"coefficients[{m}]"
        if not isinstance(c, dict):
            raise SpecError(f"{where}: expected an object")
        i, j, y = (_int(c.get(key), f"{where}.{key}") for key in ("i", "j", "y"))
        if not (1 <= i <= n and 1 <= j <= n):
            raise SpecError(f"{where}: component index ({i}, {j}) outside 1..{n}")
        if abs(y) > k:
            raise SpecError(f"{where}: shift {y} exceeds k={k}")
        key = (i - 1, j - 1, y)
        if key in out:
            raise SpecError(f"{where}: duplicate entry for (i, j, y) = ({i}, {j}, {y})")
        out[key] = _sequence(c, where, real=False)
    return BandOperator(n, k, out)


def _parse_walk(doc: dict):
    from .ssqw import WalkParameters

    seqs = {}
    for name, real in (("p", True), ("q", False), ("a", True), ("b", False)):
        if name not in doc:
            raise SpecError(f"walk spec is missing {name!r}")
        seqs[name] = _sequence(doc[name], name, real)
    try:
        return WalkParameters(**seqs)
    except ConstraintError as e:
        raise SpecError(str(e)) from e


def parse_spec(doc: Any):
    """Return a :class:`BandOperator` or a :class:`WalkParameters`."""
    if not isinstance(doc, dict):
        raise SpecError("top level must be a JSON object")
    if doc.get("format") != FORMAT_VERSION:
        raise SpecError(f"unsupported or missing format version {doc.get('format')!r}; expected {FORMAT_VERSION}")
    kind = doc.get("kind")
    if kind == "operator":
        return _parse_operator(doc)
    if kind == "walk":
        return _parse_walk(doc)
    raise SpecError(f"kind must be 'operator' or 'walk', got {kind!r}")


def load_spec(path: str | os.PathLike):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise SpecError(f"cannot read {path}: {e.strerror}") from e
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SpecError(f"{path}: invalid JSON ({e})") from e
    return parse_spec(doc)


def _pair(v: complex) -> list[float]:
    return [v.real, v.imag]


def _seq_dict(s: TwoPhaseSequence, real: bool) -> dict:
    conv = (lambda v: v.real) if real else _pair
    return {
        "limit_neg": conv(s.limit_neg),
        "limit_pos": conv(s.limit_pos),
        "overrides": [{"x": x, "value": conv(v)} for x, v in s.overrides.items()],
    }


def operator_to_dict(A: BandOperator) -> dict:
    coeffs = []
    for (i, j, y), s in A.coeff.items():
        coeffs.append({"i": i + 1, "j": j + 1, "y": y, **_seq_dict(s, real=False)})
    return {"format": FORMAT_VERSION, "kind": "operator", "n": A.n, "k": A.k, "coefficients": coeffs}


def walk_to_dict(params) -> dict:
    return {
        "format": FORMAT_VERSION,
        "kind": "walk",
        "p": _seq_dict(params.p, real=True),
        "q": _seq_dict(params.q, real=False),
        "a": _seq_dict(params.a, real=True),
        "b": _seq_dict(params.b, real=False),
    }


def dumps(spec) -> str:
    """Serialize an operator or walk; floats keep their shortest round-trip repr."""
    doc = operator_to_dict(spec) if isinstance(spec, BandOperator) else walk_to_dict(spec)
    return json.dumps(doc, indent=2) + "\n"


def write_atomic(path: str | os.PathLike, text: str) -> None:
    """Write via a temporary file in the same directory, then rename over ``path``."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
