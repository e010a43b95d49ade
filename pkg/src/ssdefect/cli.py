"""Command line entry point: ``ssdefect <command> ...``.

Every command builds one JSON-ready envelope; ``--json`` prints it as is,
otherwise the same envelope is rendered as indented text.  Exit status is
0 on success (warnings allowed), 1 on computation errors and 2 on usage
errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .curve import WeierstrassCurve, check_hyp1, conductor, local_data, minimal_model, parse_curve
from .cyclotomic import oracle_stable_value, splitting_number, splitting_number_oracle
from .iwasawa import (
    SHIPPED_FIXTURES,
    FamilyFixture,
    RhoCalibration,
    defect,
    predict_lambda,
    run_family,
    shipped_fixture,
)
from .lmfdb import LmfdbClient
from .torsion import torsion_dim_base, torsion_dim_first_layer


class UsageError(Exception):
    pass


def _client(args) -> LmfdbClient:
    return LmfdbClient(offline=True if getattr(args, "offline", False) else None)


def _curve(args) -> WeierstrassCurve:
    text = args.curve.strip()
    if text.startswith("["):
        try:
            return parse_curve(text)
        except ValueError as e:
            raise UsageError(f"--curve: {e}") from e
    return _client(args).fetch_by_label(text).curve


def _factor_dict(f) -> dict:
    return {"value": str(f.value()), **f.to_dict()}


# -- commands -------------------------------------------------------------------------


def cmd_curve_report(args):
    E = _curve(args)
    M, (u, r, s, t) = minimal_model(E)
    N = conductor(M)
    hyp = check_hyp1(M, args.p)
    result = {
        "input": E.to_list(),
        "invariants": {k: str(v) for k, v in E.invariants().items()},
        "minimal_model": M.to_list(),
        "transformation": {"u": str(u), "r": str(r), "s": str(s), "t": str(t)},
        "minimal_discriminant": str(M.discriminant),
        "conductor": _factor_dict(N),
        "local_data": [d.to_dict() for d in local_data(M)],
        "a_p": hyp.ap,
        "hyp1": hyp.to_dict(),
    }
    warnings = [] if hyp.passed else [f"hypothesis check fails at p={args.p}: " + "; ".join(hyp.reasons)]
    return result, warnings


def cmd_torsion(args):
    E = _curve(args)
    fn = torsion_dim_first_layer if args.layer == "first" else torsion_dim_base
    return fn(E, args.p, args.ell).to_dict(), []


def cmd_split(args):
    sn = splitting_number(args.ell, args.p)
    result = sn.to_dict()
    warnings = []
    if args.oracle_layers:
        trace = splitting_number_oracle(args.ell, args.p, args.oracle_layers)
        value, layer = oracle_stable_value(trace)
        result.update(oracle_trace=trace, oracle_value=value, oracle_layer=layer)
        if value != sn.s:
            warnings.append(f"oracle has not reached s={sn.s} by layer {args.oracle_layers} (last value {value})")
    return result, warnings


def cmd_defect(args):
    return defect(_curve(args), args.p).to_dict(), []


def cmd_lambda(args):
    if args.rho_plus < 0 or args.rho_minus < 0:
        raise UsageError("rho values must be non-negative")
    cal = (
        RhoCalibration(args.p, "+", "command line", args.rho_plus, 0),
        RhoCalibration(args.p, "-", "command line", args.rho_minus, 0),
    )
    rep = predict_lambda(_curve(args), args.p, cal)
    return rep.to_dict(), [str(f) for f in rep.flags]


def cmd_family_run(args):
    src = args.fixture
    if src in SHIPPED_FIXTURES:
        fx = shipped_fixture(src)
    elif Path(src).is_file():
        fx = FamilyFixture.load(src)
    else:
        raise UsageError(f"--fixture: no such file or shipped fixture: {src}")
    if args.parallel < 1:
        raise UsageError("--parallel must be >= 1")
    run = run_family(fx, client=_client(args), parallel=args.parallel)
    if not run.ok:
        bad = [f"t={m.t}: {m.error}" for m in run.members if m.status == "error"]
        raise ComputationFailed("; ".join(bad), run.to_dict(), list(run.warnings))
    return run.to_dict(), list(run.warnings)


def cmd_fetch(args):
    return _client(args).fetch_by_label(args.label).to_dict(), []


class ComputationFailed(Exception):
    def __init__(self, message, result=None, warnings=()):
        super().__init__(message)
        self.result = result
        self.warnings = list(warnings)


# -- parser and rendering ------------------------------------------------------------------


def _prime(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text}")
    from .arith import is_prime

    if not is_prime(n):
        raise argparse.ArgumentTypeError(f"{n} is not prime")
    return n


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print the JSON envelope")
    common.add_argument("--offline", action="store_true", help="never touch the network")

    curve_args = argparse.ArgumentParser(add_help=False)
    curve_args.add_argument("--curve", required=True, help="[a1,a2,a3,a4,a6], [a4,a6] or a curve label")
    curve_args.add_argument("--p", type=_prime, required=True)

    ap = argparse.ArgumentParser(prog="ssdefect", description="Defects and signed lambda-invariants of supersingular curves")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    curve = sub.add_parser("curve", help="curve data")
    csub = curve.add_subparsers(dest="subcommand", required=True)
    p = csub.add_parser("report", parents=[common, curve_args], help="invariants, conductor, local data, hypothesis check")
    p.set_defaults(func=cmd_curve_report, name="curve report")

    p = sub.add_parser("torsion", parents=[common, curve_args], help="dim of E(K)[p] over Q_l or its degree-p unramified extension")
    p.add_argument("--ell", type=_prime, required=True)
    p.add_argument("--layer", choices=("base", "first"), default="base")
    p.set_defaults(func=cmd_torsion, name="torsion")

    p = sub.add_parser("split", parents=[common], help="number of primes above l in the cyclotomic Z_p-extension")
    p.add_argument("--ell", type=_prime, required=True)
    p.add_argument("--p", type=_prime, required=True)
    p.add_argument("--oracle-layers", type=int, default=0, metavar="N")
    p.set_defaults(func=cmd_split, name="split")

    p = sub.add_parser("defect", parents=[common, curve_args], help="defect over the bad primes")
    p.set_defaults(func=cmd_defect, name="defect")

    p = sub.add_parser("lambda", parents=[common, curve_args], help="lambda = rho + defect")
    p.add_argument("--rho-plus", type=int, required=True)
    p.add_argument("--rho-minus", type=int, required=True)
    p.set_defaults(func=cmd_lambda, name="lambda")

    fam = sub.add_parser("family", help="family pipeline")
    fsub = fam.add_subparsers(dest="subcommand", required=True)
    p = fsub.add_parser("run", parents=[common], help="run a family fixture")
    p.add_argument("--fixture", required=True, help=f"path to a fixture file or one of {', '.join(SHIPPED_FIXTURES)}")
    p.add_argument("--parallel", type=int, default=1)
    p.set_defaults(func=cmd_family_run, name="family run")

    p = sub.add_parser("fetch", parents=[common], help="curve record by label")
    p.add_argument("--label", required=True)
    p.set_defaults(func=cmd_fetch, name="fetch")
    return ap


def _inputs(args) -> dict:
    skip = {"func", "name", "command", "subcommand", "json"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def render_text(obj, indent: int = 0) -> str:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines.append(render_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_scalar(v)}")
    elif isinstance(obj, list):
        if all(not isinstance(v, (dict, list)) for v in obj):
            lines.append(pad + ", ".join(_scalar(v) for v in obj))
        else:
            for v in obj:
                if isinstance(v, (dict, list)):
                    body = render_text(v, indent + 1).lstrip()
                    lines.append(f"{pad}- {body}")
                else:
                    lines.append(f"{pad}- {_scalar(v)}")
    else:
        lines.append(pad + _scalar(obj))
    return "\n".join(lines)


def _scalar(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, list) and not v:
        return "[]"
    if isinstance(v, dict) and not v:
        return "{}"
    return str(v)


def run(argv=None) -> tuple[dict, int]:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits 2 on usage errors
    env = {"command": args.name, "inputs": _inputs(args), "result": None, "warnings": [], "status": "ok", "exit_status": 0}
    try:
        result, warnings = args.func(args)
        env["result"] = result
        env["warnings"] = warnings
    except UsageError as e:
        parser.error(str(e))
    except ComputationFailed as e:
        env.update(result=e.result, warnings=e.warnings, status="error", exit_status=1, error=str(e))
    except Exception as e:  # any computation failure is reported, not raised
        env.update(status="error", exit_status=1, error=f"{type(e).__name__}: {e}")
    return env, args.json


def main(argv=None) -> int:
    env, as_json = run(argv)
    if as_json:
        print(json.dumps(env, indent=1))
    else:
        print(render_text({k: v for k, v in env.items() if k not in ("exit_status",)}))
    for w in env["warnings"]:
        print(f"warning: {w}", file=sys.stderr)
    if env["status"] == "error":
        print(f"error: {env['error']}", file=sys.stderr)
    return env["exit_status"]


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
