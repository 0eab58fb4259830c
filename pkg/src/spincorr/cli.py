"""Command-line front end.

Subcommands: coeffs, prob, marginal, chsh, scan, verify.  Angles are taken
in degrees at this boundary and converted once; everything downstream is
radians.  Data goes to stdout (or --out), diagnostics to stderr.  Exit
codes: 0 success, 1 domain error, 2 usage error.  JSON numbers are emitted
with 15 significant digits so round-trip identities are testable.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Sequence

from .chsh import (
    AngleQuad,
    SearchSettings,
    beta_scan,
    s_value,
    scan_csv,
    scan_json_payload,
    violation_fraction,
)
from .closed_form import (
    CorrelationModel,
    coefficients,
    joint_probability,
    marginal1_polarized,
    marginal2_polarized,
    marginal_unpolarized,
)
from .kinematics import Speed
from .oracle import DEFAULT_COEFF_TOLERANCE
from .verification import reference_for, run_verification


def _round15(obj):
    """Recursively snap floats to 15 significant digits for stable JSON."""
    if isinstance(obj, float):
        return float(f"{obj:.15g}")
    if isinstance(obj, dict):
        return {k: _round15(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round15(v) for v in obj]
    return obj


def _dump_json(payload) -> str:
    return json.dumps(_round15(payload), indent=2) + "\n"


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _parse_model(name: str) -> CorrelationModel:
    return CorrelationModel(name)


def _parse_beta_range(spec: str) -> list[float]:
    parts = spec.split(":")
    if len(parts) != 3:
        raise ValueError(f"--beta-range expects lo:hi:step, got {spec!r}")
    lo, hi, step = (float(p) for p in parts)
    if step <= 0:
        raise ValueError(f"--beta-range step must be positive, got {step!r}")
    count = int(math.floor((hi - lo) / step + 1e-9))
    values = [lo + i * step for i in range(count + 1)]
    return [v for v in values if v <= hi + 1e-12]


def _parse_angles(spec: str) -> tuple[float, float, float, float]:
    parts = spec.split(",")
    if len(parts) != 4:
        raise ValueError(f"--angles expects four comma-separated degrees, got {spec!r}")
    return tuple(float(p) for p in parts)


def _kv_lines(pairs) -> str:
    return "".join(f"{key} = {value!r}\n" for key, value in pairs)


def _csv_table(columns, rows) -> str:
    lines = [",".join(columns)]
    lines += [",".join(repr(c) if isinstance(c, float) else str(c) for c in row) for row in rows]
    return "\n".join(lines) + "\n"


# ----------------------------------------------------------------------
# subcommands
# ----------------------------------------------------------------------


def _cmd_coeffs(args) -> int:
    cs = coefficients(Speed(args.beta))
    pairs = [("beta", args.beta), ("rho", cs.rho), ("a", cs.a), ("b", cs.b), ("c", cs.c), ("d", cs.d)]
    if args.format == "json":
        _emit(_dump_json(dict(pairs)), args.out)
    elif args.format == "csv":
        _emit(_csv_table([k for k, _ in pairs], [[v for _, v in pairs]]), args.out)
    else:
        _emit(_kv_lines(pairs), args.out)
    return 0


def _cmd_prob(args) -> int:
    model = _parse_model(args.model)
    speed = Speed(args.beta)
    chi1 = math.radians(args.chi1)
    chi2 = math.radians(args.chi2)
    prob = joint_probability(model, speed, chi1, chi2)
    if model is CorrelationModel.POLARIZED:
        m1 = float(marginal1_polarized(speed, chi1))
        m2 = float(marginal2_polarized(speed, chi2))
    else:
        m1 = marginal_unpolarized(1)
        m2 = marginal_unpolarized(2)
    pairs = [
        ("model", model.value),
        ("beta", args.beta),
        ("chi1_deg", args.chi1),
        ("chi2_deg", args.chi2),
        ("P", prob.value),
        ("in_range", prob.in_range),
        ("marginal_1", m1),
        ("marginal_2", m2),
    ]
    if args.format == "json":
        _emit(_dump_json(dict(pairs)), args.out)
    elif args.format == "csv":
        _emit(_csv_table([k for k, _ in pairs], [[v for _, v in pairs]]), args.out)
    else:
        _emit(_kv_lines(pairs), args.out)
    return 0


def _cmd_marginal(args) -> int:
    model = _parse_model(args.model)
    speed = Speed(args.beta)
    if args.chi1 is None and args.chi2 is None:
        raise ValueError("marginal needs --chi1 and/or --chi2")
    pairs = [("model", model.value), ("beta", args.beta)]
    if args.chi1 is not None:
        if model is CorrelationModel.POLARIZED:
            value = float(marginal1_polarized(speed, math.radians(args.chi1)))
        else:
            value = marginal_unpolarized(1)
        pairs += [("chi1_deg", args.chi1), ("marginal_1", value)]
    if args.chi2 is not None:
        if model is CorrelationModel.POLARIZED:
            value = float(marginal2_polarized(speed, math.radians(args.chi2)))
        else:
            value = marginal_unpolarized(2)
        pairs += [("chi2_deg", args.chi2), ("marginal_2", value)]
    if args.format == "json":
        _emit(_dump_json(dict(pairs)), args.out)
    elif args.format == "csv":
        _emit(_csv_table([k for k, _ in pairs], [[v for _, v in pairs]]), args.out)
    else:
        _emit(_kv_lines(pairs), args.out)
    return 0


def _cmd_chsh(args) -> int:
    model = _parse_model(args.model)
    speed = Speed(args.beta)
    angles_deg = _parse_angles(args.angles)
    result = s_value(model, speed, AngleQuad.from_degrees(*angles_deg))
    reference = reference_for(model, args.beta, angles_deg)
    payload = scan_json_payload([result])[0]
    if reference is not None:
        payload["S_reference"] = reference.s_reference
        payload["gap"] = abs(result.s_value - reference.s_reference)
    if args.format == "json":
        _emit(_dump_json(payload), args.out)
    elif args.format == "csv":
        _emit(scan_csv([result]), args.out)
        if reference is not None:
            print(f"reference: {reference.s_reference}", file=sys.stderr)
    else:
        lines = [
            f"model = {model.value!r}",
            f"beta = {args.beta!r}",
            f"angles_deg = {tuple(angles_deg)!r}",
        ]
        lines += [f"{name} = {value!r}" for name, value in zip(
            ("joint_11", "joint_12p", "joint_1p2", "joint_1p2p", "marginal_1p", "marginal_2"),
            result.terms,
        )]
        lines.append(f"S = {result.s_value!r}")
        lines.append(f"violated = {result.violated!r}")
        if reference is not None:
            lines.append(f"reference = {reference.s_reference!r}")
            lines.append(f"gap = {abs(result.s_value - reference.s_reference)!r}")
        _emit("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_scan(args) -> int:
    model = _parse_model(args.model)
    if args.beta_range:
        betas = _parse_beta_range(args.beta_range)
    elif args.beta is not None:
        betas = [args.beta]
    else:
        raise ValueError("scan needs --beta or --beta-range")
    settings = SearchSettings(grid_step_deg=args.grid_step)
    results = beta_scan(model, [Speed(b) for b in betas], settings)
    if args.format == "json":
        _emit(_dump_json(scan_json_payload(results)), args.out)
    else:
        _emit(scan_csv(results), args.out)
    print(
        f"scan: {len(results)} speeds, violation fraction {violation_fraction(results):.3f}",
        file=sys.stderr,
    )
    return 0


def _render_verify_pretty(report) -> str:
    lines = ["== reference points =="]
    for anchor in report.anchors:
        lines.append(
            f"{anchor.model.value} beta={anchor.beta:g} angles_deg={anchor.angles_deg}: "
            f"S_computed = {anchor.s_computed!r}, S_reference = {anchor.s_reference!r}, "
            f"gap = {anchor.gap:.6f} (informational)"
        )
    lines.append("== internal identities ==")
    for check in report.identities:
        status = "pass" if check.passed else "FAIL"
        lines.append(
            f"[{status}] {check.name}: max error {check.max_error:.3e} "
            f"(tolerance {check.tolerance:.1e})"
        )
    lines.append("== oracle fit versus closed form (informational) ==")
    for rep in report.consistency:
        lines.append(
            f"{rep.model.value} beta={rep.beta:g}: scale={rep.scale:.6g} "
            f"residual={rep.residual:.3e} verdict={'agree' if rep.verdict else 'DISAGREE'}"
        )
        lines.append(f"  fitted/scale = {[f'{c / rep.scale:+.6f}' for c in rep.fitted]}")
        lines.append(f"  closed form  = {[f'{c:+.6f}' for c in rep.printed]}")
        lines.append(f"  rel. deviation = {[f'{d:.2e}' for d in rep.relative_deviation]}")
    lines.append("== cross check: trace expression vs spin average ==")
    for rep in report.cross_oracle:
        status = "agree" if rep.agree else "DISAGREE"
        lines.append(
            f"beta={rep.beta:g}: scale={rep.scale:.6g} "
            f"max rel deviation={rep.max_rel_deviation:.3e} [{status}]"
        )
    lines.append(f"identities {'PASS' if report.identities_pass else 'FAIL'}")
    return "\n".join(lines) + "\n"


def _cmd_verify(args) -> int:
    report = run_verification(coeff_tolerance=args.tolerance)
    if args.format == "json":
        _emit(_dump_json(report.to_dict()), args.out)
    else:
        _emit(_render_verify_pretty(report), args.out)
    if not report.identities_pass:
        print("verify: internal identity failure", file=sys.stderr)
        return 1
    if args.strict_cross_oracle and not report.cross_oracle_agree:
        print("verify: cross-oracle deviation above tolerance (strict mode)", file=sys.stderr)
        return 3
    return 0


# ----------------------------------------------------------------------
# parser
# ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spincorr",
        description="Spin-correlation probabilities and CHSH violation search "
        "for elastic electron-positron scattering at tree level.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--format", choices=("pretty", "json", "csv"), default="pretty")
        p.add_argument("--out", default=None, help="write data to this file instead of stdout")

    p = sub.add_parser("coeffs", help="speed-dependent weights of the polarized template")
    p.add_argument("--beta", type=float, required=True)
    add_common(p)
    p.set_defaults(func=_cmd_coeffs)

    p = sub.add_parser("prob", help="joint probability and both marginals")
    p.add_argument("--model", choices=("polarized", "unpolarized"), required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--chi1", type=float, required=True, help="degrees")
    p.add_argument("--chi2", type=float, required=True, help="degrees")
    add_common(p)
    p.set_defaults(func=_cmd_prob)

    p = sub.add_parser("marginal", help="single-spin probabilities")
    p.add_argument("--model", choices=("polarized", "unpolarized"), required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--chi1", type=float, default=None, help="degrees")
    p.add_argument("--chi2", type=float, default=None, help="degrees")
    add_common(p)
    p.set_defaults(func=_cmd_marginal)

    p = sub.add_parser("chsh", help="six-term CHSH combination at fixed angles")
    p.add_argument("--model", choices=("polarized", "unpolarized"), required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--angles", required=True, help="chi1,chi2,chi1p,chi2p in degrees")
    add_common(p)
    p.set_defaults(func=_cmd_chsh)

    p = sub.add_parser("scan", help="violation search over a range of speeds")
    p.add_argument("--model", choices=("polarized", "unpolarized"), required=True)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--beta-range", default=None, help="lo:hi:step")
    p.add_argument("--grid-step", type=float, default=5.0, help="coarse grid step in degrees")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_scan)

    p = sub.add_parser("verify", help="anchors, identity battery, oracle fits, cross checks")
    p.add_argument("--tolerance", type=float, default=DEFAULT_COEFF_TOLERANCE,
                   help="coefficient agreement tolerance for fit verdicts")
    p.add_argument("--strict-cross-oracle", action="store_true",
                   help="exit nonzero when the trace expression disagrees with the spin average")
    p.add_argument("--format", choices=("pretty", "json"), default="pretty")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_verify)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
