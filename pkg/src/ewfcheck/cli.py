"""Command-line front end.

Exit codes: 0 expected verdict / feasible / within bound, 2 finished with the
opposite outcome, 1 usage, schema or I/O error.
"""
from __future__ import annotations

import argparse
import json
import os
import re
import sys
import tempfile
from fractions import Fraction
from math import pi

import numpy as np

from . import jsonfmt
from .behavior import Behavior
from .marginal_lp import (MarginalConstraintSet, fine_constraint_set, lp_feasibility,
                          validate_certificate)
from .polytope import ScenarioShape, chsh_value, correlators, membership
from .quantum import PureState, basis_state, make_bloch_state, singlet, tensor
from .scenarios import (ExtendedOFConfig, LFConfig, OFConfig, appendix_b_base,
                        check_preparation_equivalence, run_extended_of_scenario,
                        run_lf_scenario, run_of_scenario)
from .verifier import Verdict, verify_appendix_b, verify_lf_theorem, verify_of_theorem

EXIT_OK, EXIT_ERROR, EXIT_NEGATIVE = 0, 1, 2
CHSH_BOUND = 2.0
CHSH_TOL = 1e-9


class UsageError(ValueError):
    pass


_ANGLE = re.compile(
    r"^\s*(?P<coef>[+-]?(\d+(\.\d*)?|\.\d+)?)\s*\*?\s*(?P<pi>pi|π)?\s*(/\s*(?P<den>\d+(\.\d*)?))?\s*$")


def parse_angle(value) -> float:
    """Accept numbers (radians) or pi-rational strings such as "3pi/4", "-pi/4", "7*pi/4"."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if not isinstance(value, str):
        raise UsageError(f"angle must be a number or string, got {value!r}")
    m = _ANGLE.match(value)
    if not m or (not m.group("coef") and not m.group("pi")) or m.group("coef") in ("+", "-") and not m.group("pi"):
        raise UsageError(f"cannot parse angle {value!r}")
    coef = m.group("coef") or "1"
    coef = {"+": "1", "-": "-1"}.get(coef, coef)
    num = Fraction(coef)
    den = Fraction(m.group("den") or "1")
    if den == 0:
        raise UsageError(f"zero denominator in angle {value!r}")
    return float(num / den) * (pi if m.group("pi") else 1.0)


def _parse_weight(value) -> float:
    if isinstance(value, str):
        return float(Fraction(value))
    return float(value)


def _parse_state(value, field: str) -> PureState:
    if isinstance(value, str):
        named = {"singlet": singlet,
                 "product00": lambda: tensor(basis_state(2, 0), basis_state(2, 0))}
        if value not in named:
            raise UsageError(f"{field}: unknown state {value!r} (known: {sorted(named)})")
        return named[value]()
    try:
        amps = [complex(v[0], v[1]) if isinstance(v, list) else complex(v) for v in value]
        return PureState(np.array(amps))
    except (TypeError, ValueError, IndexError) as exc:
        raise UsageError(f"{field}: invalid amplitudes ({exc})") from None


_OF_FIELDS = {"preparation_angles", "charlie_basis_angle", "debbie_basis_angle",
              "bob_basis_angle", "prior"}
_LF_FIELDS = {"shared_state", "charlie_angle", "debbie_angle", "alice_undo_angle", "bob_undo_angle"}
_OFX_FIELDS = {"base", "alice_x2_rotation_angle", "bob_y2_basis_angle"}


def _check_fields(d: dict, allowed: set, where: str):
    if not isinstance(d, dict):
        raise UsageError(f"{where}: expected a JSON object")
    unknown = sorted(set(d) - allowed)
    if unknown:
        raise UsageError(f"{where}: unknown field {unknown[0]!r}")


def _of_kwargs(d: dict, where: str) -> dict:
    _check_fields(d, _OF_FIELDS, where)
    kw = {}
    for k, v in d.items():
        if k == "preparation_angles":
            if not isinstance(v, list) or len(v) != 2:
                raise UsageError(f"{where}.preparation_angles: expected two angles")
            kw[k] = tuple(parse_angle(a) for a in v)
        elif k == "prior":
            kw[k] = tuple(_parse_weight(p) for p in v)
        else:
            kw[k] = parse_angle(v)
    return kw


def build_config(scenario: str, data: dict | None, args) -> object:
    """Scenario config from an optional JSON object plus command-line overrides."""
    data = dict(data or {})
    flags = {k: getattr(args, k, None) for k in
             ("prep_angles", "charlie_angle", "debbie_angle", "bob_angle", "alice_angle",
              "x2_rotation", "y2_angle", "shared_state")}
    given = {k for k, v in flags.items() if v is not None}
    allowed = {"of": {"prep_angles", "charlie_angle", "debbie_angle", "bob_angle"},
               "lf": {"charlie_angle", "debbie_angle", "bob_angle", "alice_angle", "shared_state"},
               "ofx": {"prep_angles", "charlie_angle", "debbie_angle", "bob_angle",
                       "x2_rotation", "y2_angle"}}[scenario]
    bad = sorted(given - allowed)
    if bad:
        raise UsageError(f"--{bad[0].replace('_', '-')} does not apply to scenario {scenario!r}")

    def of_overrides(kw):
        if flags["prep_angles"] is not None:
            parts = flags["prep_angles"].split(",")
            if len(parts) != 2:
                raise UsageError("--prep-angles needs two comma-separated angles")
            kw["preparation_angles"] = tuple(parse_angle(p) for p in parts)
        for flag, name in (("charlie_angle", "charlie_basis_angle"),
                           ("debbie_angle", "debbie_basis_angle"), ("bob_angle", "bob_basis_angle")):
            if flags[flag] is not None:
                kw[name] = parse_angle(flags[flag])
        return kw

    if scenario == "of":
        return OFConfig(**of_overrides(_of_kwargs(data, "config")))
    if scenario == "lf":
        _check_fields(data, _LF_FIELDS, "config")
        kw = {}
        for k, v in data.items():
            kw[k] = _parse_state(v, f"config.{k}") if k == "shared_state" else parse_angle(v)
        for flag, name in (("charlie_angle", "charlie_angle"), ("debbie_angle", "debbie_angle"),
                           ("bob_angle", "bob_undo_angle"), ("alice_angle", "alice_undo_angle")):
            if flags[flag] is not None:
                kw[name] = parse_angle(flags[flag])
        if flags["shared_state"] is not None:
            kw["shared_state"] = _parse_state(flags["shared_state"], "--shared-state")
        return LFConfig(**kw)
    _check_fields(data, _OFX_FIELDS, "config")
    base_kw = {}
    if "base" in data:
        base_kw = _of_kwargs(data["base"], "config.base")
    default_base = appendix_b_base()
    merged = {f: getattr(default_base, f) for f in _OF_FIELDS}
    merged.update(of_overrides(base_kw))
    kw = {"base": OFConfig(**merged)}
    if "alice_x2_rotation_angle" in data:
        kw["alice_x2_rotation_angle"] = parse_angle(data["alice_x2_rotation_angle"])
    if "bob_y2_basis_angle" in data:
        kw["bob_y2_basis_angle"] = parse_angle(data["bob_y2_basis_angle"])
    if flags["x2_rotation"] is not None:
        kw["alice_x2_rotation_angle"] = parse_angle(flags["x2_rotation"])
    if flags["y2_angle"] is not None:
        kw["bob_y2_basis_angle"] = parse_angle(flags["y2_angle"])
    return ExtendedOFConfig(**kw)


def _read_json(path: str, what: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{what} {path}: invalid JSON ({exc})") from None


def write_output(text: str, path: str | None):
    """Write to ``path`` atomically (temp file + rename), or to stdout."""
    if path is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _summary_csv(rows: list) -> str:
    out = ["field,value"]
    for k, v in rows:
        out.append(f"{k},{jsonfmt.format_float(v) if isinstance(v, float) else v}")
    return "\n".join(out) + "\n"


def _render(payload: dict, summary: list, fmt: str, pretty: str) -> str:
    if fmt == "json":
        return jsonfmt.dumps(payload)
    if fmt == "csv":
        return _summary_csv(summary)
    return pretty


def cmd_simulate(args) -> int:
    data = _read_json(args.config, "config") if args.config else None
    cfg = build_config(args.scenario, data, args)
    run = {"of": run_of_scenario, "lf": run_lf_scenario, "ofx": run_extended_of_scenario}
    behavior = run[args.scenario](cfg)
    text = {"json": behavior.to_json, "csv": behavior.to_csv, "pretty": behavior.to_pretty}[args.format]()
    write_output(text, args.out)
    return EXIT_OK


def _pretty_checks(checks) -> list:
    return [f"  [{'ok' if c.passed else 'FAIL'}] {c.description:<42} max|diff| = {c.max_abs_diff:.3e}"
            for c in checks]


def cmd_verify(args) -> int:
    data = _read_json(args.config, "config") if args.config else None
    if args.scenario == "appendix-b":
        report = verify_appendix_b(build_config("ofx", data, args))
        expected = Verdict.SEPARATION
        summary = [("scenario", "appendix-b"), ("verdict", report.verdict.value),
                   ("restricted_feasible", report.restricted_membership.feasible),
                   ("restricted_chsh", report.restricted_chsh),
                   ("of_marginals_feasible", report.of_result.feasible)]
        lines = ["Three-setting separation check", "operational equivalences:"]
        lines += _pretty_checks(report.equivalence_checks)
        lines.append("Eve-mode gaps:")
        lines += [f"  {k:<42} {v:.9f}" for k, v in report.eve_gaps.items()]
        lines.append(f"x,y in {{1,2}} in local/noncontextual polytope: {report.restricted_membership.feasible}"
                     f" (CHSH {report.restricted_chsh:.9f})")
        lines.append(f"OF-required joint exists: {report.of_result.feasible}")
        lines.append("witness no-superdeterminism checks:")
        lines += _pretty_checks(report.witness_checks)
    else:
        if args.scenario == "of":
            report = verify_of_theorem(build_config("of", data, args))
        else:
            report = verify_lf_theorem(build_config("lf", data, args))
        expected = Verdict.CONTRADICTION
        summary = [("scenario", report.scenario), ("verdict", report.verdict.value),
                   ("chsh", report.chsh), ("fine_feasible", report.fine_result.feasible),
                   ("certificate_valid", report.certificate_valid),
                   ("max_premise_diff", report.max_premise_diff)]
        lines = [f"{report.scenario.upper()} no-go verification", "premises (Eve mode):"]
        lines += _pretty_checks(report.premise_checks)
        lines.append(f"joint p(a,b,c,d) exists: {report.fine_result.feasible}"
                     f" (certificate valid: {report.certificate_valid})")
        lines.append(f"CHSH of identified marginals: {report.chsh:.9f}")
    lines.append(f"verdict: {report.verdict.value}")
    write_output(_render(report.to_dict(), summary, args.format, "\n".join(lines) + "\n"), args.out)
    return EXIT_OK if report.verdict == expected else EXIT_NEGATIVE


def _load_marginals(path: str) -> MarginalConstraintSet:
    d = _read_json(path, "marginals")
    if not isinstance(d, dict):
        raise UsageError("marginals: expected a JSON object")
    if "variables" in d or "constraints" in d:
        return MarginalConstraintSet.from_dict(d)
    missing = [k for k in ("ab", "ad", "cb", "cd") if k not in d]
    if missing:
        raise UsageError(f"marginals: missing field {missing[0]!r}")
    return fine_constraint_set(d["ab"], d["ad"], d["cb"], d["cd"])


def _load_mixture(path: str, what: str) -> list:
    d = _read_json(path, what)
    if not isinstance(d, list) or not d:
        raise UsageError(f"{what}: expected a non-empty list of {{weight, theta|amplitudes}}")
    out = []
    for i, item in enumerate(d):
        if not isinstance(item, dict) or "weight" not in item:
            raise UsageError(f"{what}[{i}]: missing field 'weight'")
        if "theta" in item:
            state = make_bloch_state(parse_angle(item["theta"]))
        elif "amplitudes" in item:
            state = _parse_state(item["amplitudes"], f"{what}[{i}].amplitudes")
        else:
            raise UsageError(f"{what}[{i}]: missing field 'theta' or 'amplitudes'")
        out.append((_parse_weight(item["weight"]), state))
    return out


def cmd_check(args) -> int:
    need = {"fine": ["marginals"], "chsh": ["behavior"], "membership": ["behavior"],
            "prep-equivalence": ["lhs", "rhs"]}[args.kind]
    for n in need:
        if getattr(args, n) is None:
            raise UsageError(f"check {args.kind} needs --{n}")

    if args.kind == "fine":
        cs = _load_marginals(args.marginals)
        res = lp_feasibility(cs)
        payload = dict(res.to_dict(), certificate_valid=validate_certificate(cs, res))
        summary = [("feasible", res.feasible), ("slack", res.slack),
                   ("certificate_valid", payload["certificate_valid"])]
        pretty = f"joint distribution exists: {res.feasible} (slack {res.slack:.3e})\n"
        ok = res.feasible
    elif args.kind in ("chsh", "membership"):
        behavior = Behavior.from_dict(_read_json(args.behavior, "behavior"))
        if args.kind == "chsh":
            value = chsh_value(behavior)
            E = correlators(behavior)
            payload = {"chsh": value, "bound": CHSH_BOUND, "correlators": E.reshape(-1)}
            summary = [("chsh", value), ("bound", CHSH_BOUND)]
            pretty = f"CHSH = {value:.9f} (local bound {CHSH_BOUND})\n"
            ok = value <= CHSH_BOUND + CHSH_TOL
        else:
            res = membership(behavior, ScenarioShape.of(behavior))
            payload = res.to_dict()
            summary = [("feasible", res.feasible), ("slack", res.slack)]
            pretty = f"inside the local polytope: {res.feasible}\n"
            ok = res.feasible
    else:
        lhs = _load_mixture(args.lhs, "lhs")
        rhs = _load_mixture(args.rhs, "rhs")
        equal, dist = check_preparation_equivalence(lhs, rhs)
        payload = {"equivalent": bool(equal), "trace_distance": dist}
        summary = [("equivalent", bool(equal)), ("trace_distance", dist)]
        pretty = f"operationally equivalent: {equal} (trace distance {dist:.3e})\n"
        ok = equal
    write_output(_render(payload, summary, args.format, pretty), args.out)
    return EXIT_OK if ok else EXIT_NEGATIVE


def _add_common(p, with_overrides=True):
    p.add_argument("--config", help="JSON config file (angles may be strings like '3pi/4')")
    p.add_argument("--out", help="write output here instead of stdout")
    p.add_argument("--format", choices=("json", "csv", "pretty"), default="json")
    if with_overrides:
        p.add_argument("--prep-angles", help="two comma-separated preparation angles")
        p.add_argument("--charlie-angle")
        p.add_argument("--debbie-angle")
        p.add_argument("--bob-angle")
        p.add_argument("--alice-angle", help="lf only: Alice's measurement after undoing")
        p.add_argument("--shared-state", help="lf only: 'singlet' or 'product00'")
        p.add_argument("--x2-rotation", help="ofx/appendix-b: Alice's y-axis rotation for x=2")
        p.add_argument("--y2-angle", help="ofx/appendix-b: Bob's measurement angle for y=2")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ewfcheck", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a protocol and print its behavior")
    p.add_argument("--scenario", choices=("of", "lf", "ofx"), required=True)
    _add_common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="run a no-go verification")
    p.add_argument("scenario", choices=("of", "lf", "appendix-b"))
    _add_common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("check", help="standalone feasibility / inequality checks")
    p.add_argument("kind", choices=("fine", "chsh", "membership", "prep-equivalence"))
    p.add_argument("--marginals")
    p.add_argument("--behavior")
    p.add_argument("--lhs")
    p.add_argument("--rhs")
    _add_common(p, with_overrides=False)
    p.set_defaults(func=cmd_check)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_ERROR
    try:
        return args.func(args)
    except (UsageError, ValueError, KeyError, TypeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
