"""Command-line interface: JSON results on stdout, CSV for ``plot``.

Exit codes: 0 success, 2 usage error, 3 numeric guard (oracle size or
alpha >= 1), 4 input/output error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from typing import Any, Sequence

import numpy as np

from . import conditional as cond
from . import estimators as est
from . import polya
from . import unconditional as unc
from .abundance import AbundanceError, parse_abundance
from .models import GibbsModel, ModelError, PitmanYor, load_weights
from .numeric import collect_diagnostics
from .oracle import GuardError, max_n_guard
from .samplers import simulate_conditional, simulate_partitions
from .stirling import stirling_table
from .structures import ObservedSample
from .verification import run_verification

DEFAULT_SEED = 0

EXIT_OK, EXIT_USAGE, EXIT_GUARD, EXIT_IO = 0, 2, 3, 4


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


def fmt(x: float) -> str:
    """Decimal string with 15 significant digits."""
    return format(float(x), ".15g")


def _orders(text: str) -> dict[int, int]:
    """``"1:2,3:1"`` -> ``{1: 2, 3: 1}``."""
    out: dict[int, int] = {}
    try:
        for item in filter(None, (t.strip() for t in text.split(","))):
            l, r = item.split(":")
            out[int(l)] = out.get(int(l), 0) + int(r)
    except ValueError:
        raise argparse.ArgumentTypeError(f"orders must look like '1:2,3:1', got {text!r}") from None
    return out


def _counts(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"counts must be comma separated integers, got {text!r}") from None


# argument groups -----------------------------------------------------------

def _add_model(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("model (Pitman-Yor via --alpha/--theta, or a custom --weights table)")
    g.add_argument("--alpha", type=float, help="discount parameter, alpha < 1")
    g.add_argument("--theta", type=float, help="concentration parameter")
    g.add_argument("--weights", metavar="FILE", help="JSON weight table {alpha, maxN, rows}")


def _add_data(p: argparse.ArgumentParser, required: bool = True) -> None:
    g = p.add_argument_group("observed sample (one of)")
    g.add_argument("--data", metavar="FILE", help="abundance file: species,count CSV or one integer per line")
    g.add_argument("--counts", type=_counts, help="inline multiplicities, e.g. 3,1,1")
    p.set_defaults(_needs_data=required)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gibbs-partitions",
        description="Exact laws, moments, estimators and simulation for Gibbs partition models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stirling", help="generalized Stirling number (log and real form)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--gamma", type=float, default=None, help="non-central parameter")

    p = sub.add_parser("pmf", help="probability mass function of a block statistic")
    p.add_argument("kind", choices=["kn", "cl", "w", "o", "km"])
    p.add_argument("--n", type=int, help="sample size (kn, cl)")
    p.add_argument("--l", type=int, help="block size (cl, w, o)")
    p.add_argument("--m", type=int, help="additional observations (w, o, km)")
    _add_model(p)
    _add_data(p, required=False)

    p = sub.add_parser("moments", help="joint falling factorial moments of block counts")
    p.add_argument("--orders", type=_orders, required=True, help="block size:order pairs, e.g. 1:2,2:1")
    p.add_argument("--n", type=int, help="sample size (unconditional)")
    p.add_argument("--m", type=int, help="additional observations (conditional)")
    p.add_argument("--kind", choices=["c", "w", "o"], default=None,
                   help="c: unconditional counts; w: new blocks; o: old blocks")
    _add_model(p)
    _add_data(p, required=False)

    p = sub.add_parser("predict", help="probability the next draw hits a species seen l times")
    p.add_argument("kind", choices=["new-l", "old-l"])
    p.add_argument("--m", type=int, default=0)
    p.add_argument("--l", type=int, default=None, help="single frequency (default: all)")
    _add_model(p)
    _add_data(p)

    p = sub.add_parser("posterior", help="posterior law of a statistic given the sample")
    p.add_argument("kind", choices=["km"])
    p.add_argument("--m", type=int, required=True)
    _add_model(p)
    _add_data(p)

    p = sub.add_parser("discovery", help="probability of a new species at draw n+m+1")
    p.add_argument("--m", type=int, default=0)
    _add_model(p)
    _add_data(p)

    p = sub.add_parser("sample", help="Monte Carlo replicates of the sequential seating scheme")
    p.add_argument("--model", choices=["py", "custom"], default="py")
    p.add_argument("--n", type=int, help="partition size (unconditional)")
    p.add_argument("--cond", metavar="FILE", help="abundance file to extend")
    p.add_argument("--m", type=int, help="additional observations with --cond")
    p.add_argument("--reps", type=int, default=10000)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help=f"RNG seed (default {DEFAULT_SEED})")
    _add_model(p)

    p = sub.add_parser("verify", help="compare every closed form with exhaustive enumeration")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--tol", type=float, default=1e-10)
    _add_model(p)
    _add_data(p, required=False)

    p = sub.add_parser("plot", help="write a pmf table as CSV for external plotting")
    p.add_argument("kind", choices=["kn", "cl", "w", "o", "km"])
    p.add_argument("--n", type=int)
    p.add_argument("--l", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--out", metavar="FILE", help="CSV destination (default: stdout)")
    _add_model(p)
    _add_data(p, required=False)
    return parser


# resolution ----------------------------------------------------------------

def _check_alpha(alpha: float | None) -> None:
    if alpha is not None and alpha >= 1:
        raise GuardError(f"alpha must be < 1, got {alpha}")


def resolve_model(args) -> GibbsModel:
    py_flags = args.alpha is not None or args.theta is not None
    if args.weights and py_flags:
        raise UsageError("--weights and --alpha/--theta are mutually exclusive")
    if args.weights:
        try:
            return load_weights(args.weights)
        except (OSError, ValueError) as exc:
            raise InputError(f"cannot load weights {args.weights}: {exc}") from None
    if args.alpha is None or args.theta is None:
        raise UsageError("a model needs --alpha and --theta, or --weights")
    _check_alpha(args.alpha)
    try:
        return PitmanYor(args.alpha, args.theta)
    except ModelError as exc:
        raise UsageError(str(exc)) from None


def resolve_sample(args, path: str | None = None) -> ObservedSample:
    path = path if path is not None else getattr(args, "data", None)
    counts = getattr(args, "counts", None)
    if path and counts:
        raise UsageError("--data and --counts are mutually exclusive")
    if counts:
        if any(c < 1 for c in counts):
            raise UsageError("counts must be positive")
        return ObservedSample(counts)
    if not path:
        raise UsageError("an observed sample is required (--data FILE or --counts)")
    try:
        return parse_abundance(path)
    except (OSError, UnicodeDecodeError, AbundanceError) as exc:
        raise InputError(f"{path}: {exc}") from None


def _require(args, *names: str) -> None:
    missing = [f"--{n}" for n in names if getattr(args, n, None) is None]
    if missing:
        raise UsageError(f"{args.command} {getattr(args, 'kind', '')} requires {', '.join(missing)}".replace("  ", " "))


def _has_sample(args) -> bool:
    return bool(getattr(args, "data", None) or getattr(args, "counts", None))


# commands ------------------------------------------------------------------

def _pmf_table(args) -> dict[int, float]:
    model = resolve_model(args)
    kind = args.kind
    if kind == "kn":
        _require(args, "n")
        return {k: unc.kn_distribution(model, args.n, k) for k in range(1, args.n + 1)}
    if kind == "cl":
        _require(args, "n", "l")
        return {x: unc.cl_law(model, args.n, args.l, x) for x in range(args.n // args.l + 1)}
    _require(args, "m")
    sample = resolve_sample(args)
    if kind == "km":
        return {k: cond.km_distribution(model, sample, args.m, k) for k in range(args.m + 1)}
    _require(args, "l")
    if kind == "w":
        return {x: cond.w_law(model, sample, args.m, args.l, x) for x in range(args.m // args.l + 1)}
    return {y: polya.o_law(model, sample, args.m, args.l, y) for y in range(sample.j + 1)}


def cmd_stirling(args) -> dict:
    _check_alpha(args.alpha)
    if not 0 <= args.k <= args.n:
        raise UsageError("need 0 <= k <= n")
    table = stirling_table(args.alpha, args.n, args.gamma)
    v = table(args.n, args.k)
    real = table.value(args.n, args.k)
    return {"sign": v.sign, "log_abs": fmt(v.logmag) if v.sign else "-inf", "value": fmt(real)}


def cmd_pmf(args) -> dict:
    return {str(k): fmt(p) for k, p in _pmf_table(args).items()}


def cmd_posterior(args) -> dict:
    model, sample = resolve_model(args), resolve_sample(args)
    pmf = {k: cond.km_distribution(model, sample, args.m, k) for k in range(args.m + 1)}
    return {"pmf": {str(k): fmt(p) for k, p in pmf.items()},
            "mean": fmt(sum(k * p for k, p in pmf.items()))}


def cmd_moments(args) -> dict:
    model = resolve_model(args)
    kind = args.kind or ("c" if args.m is None else "w")
    if kind == "c":
        _require(args, "n")
        value = unc.joint_factorial_moments(model, args.n, args.orders)
    else:
        _require(args, "m")
        sample = resolve_sample(args)
        fn = cond.w_joint_factorial_moments if kind == "w" else polya.o_joint_factorial_moments
        value = fn(model, sample, args.m, args.orders)
    return {"kind": kind, "value": fmt(value)}


def cmd_predict(args) -> dict:
    model, sample = resolve_model(args), resolve_sample(args)
    if args.kind == "new-l":
        fn, top = est.estimate_new_l, args.m
    else:
        fn, top = est.estimate_old_l, sample.n + args.m
    ls = [args.l] if args.l is not None else range(1, top + 1)
    return {str(l): fmt(fn(model, sample, args.m, l)) for l in ls}


def cmd_discovery(args) -> dict:
    model, sample = resolve_model(args), resolve_sample(args)
    return {"p_new": fmt(est.discovery_probability(model, sample, args.m)), "n": sample.n, "j": sample.j}


def cmd_sample(args) -> dict:
    if args.model == "custom" and not args.weights:
        raise UsageError("--model custom needs --weights")
    if args.model == "py" and args.weights:
        raise UsageError("--weights needs --model custom")
    model = resolve_model(args)
    if args.reps < 1:
        raise UsageError("--reps must be positive")
    if args.cond:
        _require(args, "m")
        sample = resolve_sample(args, path=args.cond)
        draws = simulate_conditional(model, sample, args.m, args.reps, args.seed)
        k = draws.k_new()
        top = sample.n + args.m
        return {
            "reps": args.reps,
            "km_pmf": {str(v): fmt(np.mean(k == v)) for v in range(args.m + 1)},
            "w_mean": {str(l): fmt(draws.w_counts(l).mean()) for l in range(1, args.m + 1)},
            "o_mean": {str(l): fmt(draws.o_counts(l).mean()) for l in range(1, top + 1)},
        }
    _require(args, "n")
    sizes = simulate_partitions(model, args.n, args.reps, args.seed)
    k = (sizes > 0).sum(axis=1)
    return {
        "reps": args.reps,
        "kn_pmf": {str(v): fmt(np.mean(k == v)) for v in range(1, args.n + 1)},
        "cl_mean": {str(l): fmt((sizes == l).sum(axis=1).mean()) for l in range(1, args.n + 1)},
    }


def cmd_verify(args) -> dict:
    model = resolve_model(args)
    guard = max_n_guard()
    sample = resolve_sample(args) if _has_sample(args) else None
    top = args.n if args.m is None else max(args.n, (sample.n if sample else args.n) + args.m + 1)
    if top > guard:
        raise GuardError(f"verification needs enumeration of size {top}, guard is {guard}")
    report = run_verification(model, args.n, args.m, sample)
    return {
        "max_deviation": fmt(report["max_deviation"]),
        "tolerance": fmt(args.tol),
        "passed": report["max_deviation"] <= args.tol,
        "checks": {k: fmt(v) for k, v in sorted(report["checks"].items())},
    }


def cmd_plot(args) -> dict | str:
    table = _pmf_table(args)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["value", "probability"])
    for k, p in table.items():
        w.writerow([k, fmt(p)])
    if not args.out:
        return buf.getvalue()
    try:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())
    except OSError as exc:
        raise InputError(f"cannot write {args.out}: {exc}") from None
    return {"out": args.out, "rows": len(table)}


COMMANDS = {
    "stirling": cmd_stirling,
    "pmf": cmd_pmf,
    "moments": cmd_moments,
    "predict": cmd_predict,
    "posterior": cmd_posterior,
    "discovery": cmd_discovery,
    "sample": cmd_sample,
    "verify": cmd_verify,
    "plot": cmd_plot,
}

_INTERNAL = {"command", "_needs_data"}
_POSITIONAL_KIND = {"pmf", "predict", "posterior", "plot"}


def _params(args) -> dict[str, Any]:
    out = {}
    for key, value in vars(args).items():
        if key in _INTERNAL or value is None:
            continue
        if key == "orders":
            value = ",".join(f"{l}:{r}" for l, r in value.items())
        elif key == "counts":
            value = ",".join(map(str, value))
        out[key] = value
    return out


def params_to_argv(command: str, params: dict[str, Any]) -> list[str]:
    """Rebuild an argument vector from the ``params`` block of a JSON result."""
    argv = [command]
    positional = command in _POSITIONAL_KIND
    if positional:
        argv.append(str(params["kind"]))
    for key, value in params.items():
        if positional and key == "kind":
            continue
        argv += [f"--{key}", repr(value) if isinstance(value, float) else str(value)]
    return argv


def run_command(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "_needs_data", False) and not _has_sample(args):
        print(f"error: {args.command} requires --data FILE or --counts", file=stderr)
        return EXIT_USAGE
    try:
        with collect_diagnostics() as diag:
            results = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_USAGE
    except GuardError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_GUARD
    except InputError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_IO
    except (ModelError, ValueError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_USAGE
    if isinstance(results, str):
        stdout.write(results)
        return EXIT_OK
    doc = {
        "command": args.command,
        "params": _params(args),
        "results": results,
        "diagnostics": diag.as_dict(),
    }
    stdout.write(json.dumps(doc, indent=2) + "\n")
    return EXIT_OK


def main() -> None:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    sys.exit(run_command())


if __name__ == "__main__":
    main()
