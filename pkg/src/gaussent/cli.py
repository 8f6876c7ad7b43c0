"""Command-line interface.

Subcommands:
    measure     entanglement measures and key bounds of a QCM file (JSON report)
    sweep       REoF and one-way distillable entanglement of the pure-loss family (CSV)
    verify      randomized structural law suites
    williamson  symplectic eigenvalues and Williamson symplectic of a QCM file
    purify      minimal purification of a QCM file

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 input
validation error, 4 numeric failure. Errors are reported as one JSON object
on standard error.
"""

import argparse
import json
import sys

import numpy as np

from . import entanglement as ent
from . import symplectic as sp
from .errors import (
    ConvergenceError,
    InvalidChannelError,
    InvalidInputError,
    InvalidPartitionError,
    InvalidShapeError,
    NumericInconsistencyError,
    SingularBlockError,
)
from .laws import SUITES, run_suite
from .model import load_qcm, pure_loss_state, purify, to_json_dict

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_NUMERIC = 4

MEASURES = ("reof", "gie", "bounds", "dist")
DEFAULT_MEASURES = {"measure": "reof,gie,bounds,dist", "sweep": "reof,dist"}
DEFAULT_SQUEEZING = "2,5,10,15"


class UsageError(Exception):
    pass


def _fmt(x):
    """Decimal text with 17 significant digits (round-trips doubles)."""
    return format(float(x), ".17g")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


def _write(text, path):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _dump(obj):
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


def _parse_list(text, what, cast=float):
    try:
        values = [cast(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"bad {what} list {text!r}") from exc
    if not values:
        raise UsageError(f"empty {what} list")
    return values


def _measures(args):
    text = args.measures or DEFAULT_MEASURES[args.command]
    chosen = _parse_list(text, "measures", str)
    unknown = sorted(set(chosen) - set(MEASURES))
    if unknown:
        raise UsageError(f"unknown measures {unknown}; choose from {list(MEASURES)}")
    return chosen


def cmd_measure(args):
    if not args.input:
        raise UsageError("measure needs --input")
    chosen = _measures(args)
    state = load_qcm(args.input)
    names = state.partition.names
    if len(names) != 2:
        raise InvalidPartitionError(f"measure needs exactly two subsystems, got {list(names)}")
    report = {"subsystems": [list(s) for s in state.partition.subsystems], "seed": args.seed,
              "measures": {}}
    reof = None
    if "reof" in chosen or "bounds" in chosen:
        value, diag = ent.reof_value(state, seed=args.seed)
        reof = value
        if "reof" in chosen:
            report["measures"]["reof"] = {"value": value, "diagnostics": diag}
    gie = None
    if "gie" in chosen or "bounds" in chosen:
        gie = ent.gie_numeric(state, seed=args.seed)
        if "gie" in chosen:
            report["measures"]["gie"] = {"lower": gie.lower, "upper": gie.upper,
                                         "partial": gie.partial, "diagnostics": gie.diagnostics}
    if "dist" in chosen:
        lam, s_db, resid = ent.fit_pure_loss(state)
        closed = ent.one_way_distillable(lam, s_db) if resid < ent.FAMILY_FIT_TOL else None
        report["measures"]["dist"] = {"coherent_information": ent.coherent_information(state),
                                      "one_way_distillable_closed_form": closed}
    if "bounds" in chosen:
        report["key_bounds"] = {"reof": reof, "one_way_bound": reof, "two_way_bound": 2 * reof,
                                "glmpc_bound": reof, "gie_lower": gie.lower, "gie_upper": gie.upper}
    _write(_dump(report), args.out)
    return EXIT_OK


def cmd_sweep(args):
    chosen = _measures(args)
    s_values = _parse_list(args.squeezing, "squeezing")
    if args.lambda_steps < 2:
        raise UsageError("--lambda-steps must be at least 2")
    if any(s < 0 for s in s_values):
        raise UsageError("squeezing values must be nonnegative")
    with_gie = "gie" in chosen
    header = ["lambda", "s_db", "reof", "d_one_way"] + (["gie_lower", "gie_upper"] if with_gie else [])
    lines = [",".join(header)]
    for lam, s, reof, dist in ent.sweep_rows(s_values, args.lambda_steps):
        row = [lam, s, reof, dist]
        if with_gie:
            est = ent.gie_numeric(pure_loss_state(lam, s), seed=args.seed)
            row += [est.lower, est.upper]
        lines.append(",".join(_fmt(v) for v in row))
    _write("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_verify(args):
    if args.trials is None:
        args.trials = 200
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    suites = list(SUITES) if args.suite == "all" else [args.suite]
    failures = []
    for name in suites:
        for out in run_suite(name, args.trials, args.seed):
            status = "PASS" if out.failed == 0 else "FAIL"
            print(f"{status} {out.suite}.{out.law}: {out.passed} passed, {out.failed} failed")
            for f in out.failures:
                failures.append(dict(f, suite=out.suite, law=out.law))
    if failures:
        text = _dump({"failures": failures})
        if args.out:
            _write(text, args.out)
        else:
            sys.stderr.write(text)
        return EXIT_VERIFY
    return EXIT_OK


def cmd_williamson(args):
    if not args.input:
        raise UsageError("williamson needs --input")
    state = load_qcm(args.input)
    dec = sp.williamson(state.matrix)
    _write(_dump({"ordering": "xp", "nu": dec.nu, "S": dec.S}), args.out)
    return EXIT_OK


def cmd_purify(args):
    if not args.input:
        raise UsageError("purify needs --input")
    state = load_qcm(args.input)
    _write(_dump(to_json_dict(purify(state, minimal=True))), args.out)
    return EXIT_OK


COMMANDS = {
    "measure": cmd_measure,
    "sweep": cmd_sweep,
    "verify": cmd_verify,
    "williamson": cmd_williamson,
    "purify": cmd_purify,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        _report_error("UsageError", message, EXIT_USAGE)
        self.print_usage(sys.stderr)
        sys.exit(EXIT_USAGE)


def build_parser():
    parser = _Parser(prog="gaussent", description="Gaussian entanglement measures and key bounds.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--input", help="QCM JSON file")
        p.add_argument("--out", help="output path (default: standard output)")
        p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
        return p

    p = common(sub.add_parser("measure", help="measures of a QCM file"))
    p.add_argument("--measures", help="comma list from reof,gie,bounds,dist (default: all)")
    p = common(sub.add_parser("sweep", help="pure-loss family sweep as CSV"))
    p.add_argument("--measures", help="comma list; include gie to add GIE columns (default reof,dist)")
    p.add_argument("--lambda-steps", type=int, default=500, help="lambda grid i/N, i=1..N")
    p.add_argument("--squeezing", default=DEFAULT_SQUEEZING, help="comma list of dB values")
    p = common(sub.add_parser("verify", help="run law suites"))
    p.add_argument("suite", choices=list(SUITES) + ["all"])
    p.add_argument("--trials", type=int, help="instances per law (default 200)")
    common(sub.add_parser("williamson", help="Williamson decomposition of a QCM file"))
    common(sub.add_parser("purify", help="minimal purification of a QCM file"))
    return parser


def _report_error(kind, message, code):
    sys.stderr.write(json.dumps({"error": kind, "message": message, "exit_code": code}) + "\n")


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        _report_error("UsageError", str(exc), EXIT_USAGE)
        return EXIT_USAGE
    except (InvalidInputError, InvalidShapeError, InvalidPartitionError, InvalidChannelError) as exc:
        _report_error(type(exc).__name__, str(exc), EXIT_INPUT)
        return EXIT_INPUT
    except OSError as exc:
        _report_error("IOError", str(exc), EXIT_INPUT)
        return EXIT_INPUT
    except (SingularBlockError, NumericInconsistencyError, ConvergenceError, np.linalg.LinAlgError) as exc:
        _report_error(type(exc).__name__, str(exc), EXIT_NUMERIC)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
