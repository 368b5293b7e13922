"""Command-line front end.

    invariants index|spectrum|verify SPEC
    invariants walk index|spectrum|verify SPEC

Exit status is 0 on success (including an in-band "not Fredholm" result), 2 on
bad input and 3 when two independent computations disagree.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import io
import json
import os
import sys
from typing import Callable

import numpy as np

from . import __version__
from .core import BandOperator, compose, adjoint, window_matrix
from .errors import (
    InvariantsError,
    NotFredholmError,
    SpecError,
    TruncationError,
    VerificationError,
    WindingDiscrepancyError,
)
from .index import fredholm_index
from .io import load_spec, write_atomic
from .oracle import full_line_index, zero_mode_count
from .spectrum import SpectrumCloud, essential_spectrum
from .symbol import CIRCLE_TOL, VANISH_RATIO

EXIT_OK, EXIT_INPUT, EXIT_VERIFY = 0, 2, 3
SPECTRUM_TOL = 1e-9
IDENTITY_TOL = 1e-12


def _operator_of(spec) -> BandOperator:
    """Top-level commands act on ``U`` when handed a walk."""
    if isinstance(spec, BandOperator):
        return spec
    from .ssqw import build_evolution

    return build_evolution(spec)


def _require_walk(spec):
    from .ssqw import WalkParameters

    if not isinstance(spec, WalkParameters):
        raise SpecError("walk commands need a spec with kind 'walk'")
    return spec


def cloud_csv(cloud: SpectrumCloud) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["end", "t", "re", "im"])
    for end, t, lam in cloud.rows():
        w.writerow([end, f"{t:.17g}", f"{lam.real:.17g}", f"{lam.imag:.17g}"])
    return buf.getvalue()


def cloud_json(cloud: SpectrumCloud) -> dict:
    return {
        "t": cloud.t.tolist(),
        "eigenvalues": {
            end: [[[z.real, z.imag] for z in row] for row in ev.tolist()] for end, ev in cloud.eigenvalues.items()
        },
    }


def _text(report, indent: int = 0) -> str:
    pad = "  " * indent
    lines = []
    if "assertions" in report:
        for a in report["assertions"]:
            lines.append(f"{'PASS' if a['passed'] else 'FAIL'}  {a['name']}: {a['detail']}")
        report = {k: v for k, v in report.items() if k != "assertions"}
    for key, val in report.items():
        if isinstance(val, dict):
            lines.append(f"{pad}{key}:")
            lines.append(_text(val, indent + 1))
        elif isinstance(val, list) and val and isinstance(val[0], dict):
            lines.append(f"{pad}{key}:")
            for item in val:
                lines.append(f"{pad}  - " + ", ".join(f"{k}={v}" for k, v in item.items()))
        else:
            lines.append(f"{pad}{key}: {val}")
    return "\n".join(lines)


def _emit(args, report: dict) -> None:
    text = json.dumps(report, indent=2) if args.json else _text(report)
    text += "\n"
    if getattr(args, "out", None) and not getattr(args, "out_is_data", False):
        write_atomic(args.out, text)
    else:
        sys.stdout.write(text)


def _tolerances(**extra) -> dict:
    return {"circle_tol": CIRCLE_TOL, "vanish_ratio": VANISH_RATIO, **extra}


def cmd_index(args) -> int:
    A = _operator_of(load_spec(args.spec))
    rep = fredholm_index(A).to_dict()
    rep["tolerances"] = _tolerances()
    _emit(args, rep)
    return EXIT_OK


def cmd_spectrum(args) -> int:
    A = _operator_of(load_spec(args.spec))
    cloud = essential_spectrum(A, args.samples)
    as_json = args.json or (args.out or "").endswith(".json")
    text = json.dumps(cloud_json(cloud)) + "\n" if as_json else cloud_csv(cloud)
    if args.out:
        write_atomic(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_verify(args) -> int:
    A = _operator_of(load_spec(args.spec))
    rep = fredholm_index(A)
    oracle = full_line_index(A, args.trunc, args.tol)
    report = {
        "fredholm": rep.fredholm,
        "winding_index": rep.index,
        "oracle_index": oracle.index,
        "stable": oracle.stable,
        "agree": (rep.index == oracle.index) if rep.fredholm and oracle.stable else None,
        "inconclusive": not oracle.stable,
        "oracle": oracle.to_dict(),
        "tolerances": _tolerances(N=args.trunc, sv_tol=args.tol),
    }
    _emit(args, report)
    if rep.fredholm and oracle.stable and rep.index != oracle.index:
        return EXIT_VERIFY
    return EXIT_OK


def cmd_walk_index(args) -> int:
    from .ssqw import witten_indices

    params = _require_walk(load_spec(args.spec))
    try:
        report = witten_indices(params).to_dict()
    except NotFredholmError as e:
        report = {"fredholm": False, "reason": str(e)}
    report["tolerances"] = _tolerances(constraint_tol=1e-10)
    _emit(args, report)
    return EXIT_OK


def cmd_walk_spectrum(args) -> int:
    from .ssqw import build_evolution, spectrum_Q, spectrum_U

    params = _require_walk(load_spec(args.spec))
    bands = spectrum_U(params, args.samples, SPECTRUM_TOL)
    q = spectrum_Q(params, args.samples, SPECTRUM_TOL)
    report = {
        "bands": bands.to_dict(),
        "contains_plus_one": bands.contains(1.0, 0.0),
        "contains_minus_one": bands.contains(-1.0, 0.0),
        "sigma_ess_Q": [list(iv) for iv in q.intervals()],
        "tolerances": _tolerances(spectrum_tol=SPECTRUM_TOL, samples=args.samples),
    }
    if args.out:
        cloud = essential_spectrum(build_evolution(params), args.samples)
        data = json.dumps(cloud_json(cloud)) + "\n" if args.out.endswith(".json") else cloud_csv(cloud)
        write_atomic(args.out, data)
        report["cloud"] = args.out
    args.out_is_data = True
    _emit(args, report)
    return EXIT_OK


def _check(assertions: list, name: str, func: Callable[[], str]) -> None:
    try:
        detail = func()
        assertions.append({"name": name, "passed": True, "detail": detail})
    except (VerificationError, AssertionError, WindingDiscrepancyError) as e:
        assertions.append({"name": name, "passed": False, "detail": str(e)})


def cmd_walk_verify(args) -> int:
    from .ssqw import (
        build_evolution,
        chiral_blocks,
        epsilon_operator,
        gamma_operator,
        pointwise_phase,
        reassemble,
        repaired_blocks,
        spectrum_Q,
        spectrum_U,
        witten_indices,
    )

    params = _require_walk(load_spec(args.spec))
    U = build_evolution(params)
    assertions: list[dict] = []
    report: dict = {}

    def identities() -> str:
        theta, phi = pointwise_phase(params.q), pointwise_phase(params.b)
        blocks = chiral_blocks(params, theta, phi)
        worst = 0.0
        for which, C in (("eps", epsilon_operator(params, theta)), ("gam", gamma_operator(params, phi))):
            direct = window_matrix(compose(compose(adjoint(C), U), C), -20, 20)
            err = float(np.abs(direct - window_matrix(reassemble(blocks, which), -20, 20)).max())
            if err > IDENTITY_TOL:
                raise VerificationError(f"{which}: block reassembly differs by {err:.3g}")
            worst = max(worst, err)
        return f"max entry error {worst:.3g} on [-20, 20]"

    _check(assertions, "block decomposition", identities)
    _check(assertions, "spectrum of U within bands", lambda: (spectrum_U(params, args.samples), "ok")[1])
    _check(assertions, "sigma_ess(Q) three routes", lambda: (spectrum_Q(params, args.samples), "ok")[1])

    try:
        wr = witten_indices(params)
    except NotFredholmError as e:
        report["fredholm"] = False
        report["reason"] = str(e)
    except VerificationError as e:
        assertions.append({"name": "tables vs engine", "passed": False, "detail": str(e)})
        wr = None
    else:
        assertions.append(
            {"name": "tables vs engine", "passed": True, "detail": f"ind = {wr.ind_gg}, {wr.ind_g_g} (case {wr.case})"}
        )
        report["witten"] = wr.to_dict()
        A_eps, A_gam = repaired_blocks(params)
        for name, op, expected in (("ind(Gamma, Gamma')", A_eps, wr.ind_gg), ("ind(Gamma', Gamma)", A_gam, wr.ind_g_g)):
            est = full_line_index(op, args.trunc, args.tol)
            ok = est.stable and est.index == expected
            assertions.append(
                {
                    "name": f"oracle {name}",
                    "passed": ok,
                    "detail": f"oracle {est.index} (stable={est.stable}), expected {expected}",
                }
            )
        for which, ind in (("plus", wr.ind_plus), ("minus", wr.ind_minus)):
            N = max(60, params.window_radius + 10)
            z = zero_mode_count(params, which, N)
            assertions.append(
                {
                    "name": f"bound states ({which})",
                    "passed": z.count >= abs(ind),
                    "detail": f"{z.count} localized modes, |ind| = {abs(ind)}",
                }
            )

    report["assertions"] = assertions
    report["passed"] = all(a["passed"] for a in assertions)
    report["tolerances"] = _tolerances(
        spectrum_tol=SPECTRUM_TOL, identity_tol=IDENTITY_TOL, N=args.trunc, sv_tol=args.tol, samples=args.samples
    )
    _emit(args, report)
    return EXIT_OK if report["passed"] else EXIT_VERIFY


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("spec", help="path to a JSON operator or walk spec")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="json", action="store_true", help="emit JSON")
    fmt.add_argument("--text", dest="json", action="store_false", help="emit plain text (default)")
    p.add_argument("--out", help="write output to this path instead of stdout")
    p.add_argument("--samples", type=int, default=1024, help="grid points on the circle (default 1024)")
    p.add_argument("--trunc", type=int, default=64, help="oracle truncation length N (default 64)")
    p.add_argument("--tol", type=float, default=1e-8, help="relative singular-value threshold (default 1e-8)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="invariants", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, func, help_ in (
        ("index", cmd_index, "Fredholm index from end windings"),
        ("spectrum", cmd_spectrum, "sampled essential spectrum as CSV or JSON"),
        ("verify", cmd_verify, "winding index against the truncation oracle"),
    ):
        p = sub.add_parser(name, help=help_)
        _add_common(p)
        p.set_defaults(func=func)
    walk = sub.add_parser("walk", help="split-step walk commands")
    wsub = walk.add_subparsers(dest="walk_command", required=True)
    for name, func, help_ in (
        ("index", cmd_walk_index, "Witten indices and case labels"),
        ("spectrum", cmd_walk_spectrum, "bands of sigma_ess(U) and sigma_ess(Q)"),
        ("verify", cmd_walk_verify, "tables vs engine vs oracle"),
    ):
        p = wsub.add_parser(name, help=help_)
        _add_common(p)
        p.set_defaults(func=func)
    return parser


def _thread_limit():
    raw = os.environ.get("INVARIANTS_THREADS")
    if not raw:
        return contextlib.nullcontext()
    from threadpoolctl import threadpool_limits

    return threadpool_limits(limits=int(raw))


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with _thread_limit():
            return args.func(args)
    except (SpecError, TruncationError) as e:
        print(f"invariants: error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as e:
        # bad INVARIANTS_THREADS or argument values
        print(f"invariants: error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (WindingDiscrepancyError, VerificationError) as e:
        print(f"invariants: verification failed: {e}", file=sys.stderr)
        return EXIT_VERIFY
    except InvariantsError as e:
        print(f"invariants: error: {e}", file=sys.stderr)
        return EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
