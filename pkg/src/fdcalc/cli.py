"""Command-line front end.

Exit codes: 0 all checks pass, 1 a bound or divisibility check failed,
2 invalid input, 3 enumeration capacity exceeded.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import verifier
from .arith import degree_to_json
from .binomial import (
    BinomialSeries,
    audit_lift_divisibility,
    fundamental_coefficients,
    proper_lift,
    wilson_hypothesis,
    wilson_sum,
)
from .calculus import FunctionTable, fdeg, partial_fdegs
from .errors import CapacityError, FdcalcError, GenerationError, InputError
from .groups import PGroupShape, set_enumeration_cap
from .rings import FiniteRngSpec, SparsePoly, reduce_over_fq

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT, EXIT_CAPACITY = 0, 1, 2, 3

COMMON_KEYS = ("seed", "workers", "cap_elements", "out", "format")


def _load_json(path: str):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc.msg} at line {exc.lineno}") from None


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _emit(args, obj, text: str | None = None) -> None:
    out = text if (text is not None and args.format == "text") else _dump(obj)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)


def _parse_ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise InputError(f"expected comma-separated integers, got {text!r}") from None


# ---------------------------------------------------------------------------
# subcommands

def cmd_fdeg(args) -> int:
    f = FunctionTable.from_json(_load_json(args.table))
    d = fdeg(f)
    parts = partial_fdegs(f)
    obj = {"fdeg": degree_to_json(d), "partial": [degree_to_json(v) for v in parts]}
    text = f"{obj['fdeg']}\npartial: {' '.join(str(v) for v in obj['partial'])}\n"
    _emit(args, obj, text)
    return EXIT_OK


def cmd_represent(args) -> int:
    f = FunctionTable.from_json(_load_json(args.table))
    _emit(args, fundamental_coefficients(f).to_json())
    return EXIT_OK


def _series_or_table(obj):
    """A series and the domain exponents it came from (None if unknown)."""
    if isinstance(obj, dict) and "values" in obj:
        f = FunctionTable.from_json(obj)
        return fundamental_coefficients(f), f.domain.alphas
    return BinomialSeries.from_json(obj), None


def cmd_lift(args) -> int:
    s, alphas = _series_or_table(_load_json(args.input))
    if args.alphas:
        alphas = _parse_ints(args.alphas)
    if alphas is None:
        raise InputError("--alphas is required when the input is a series")
    if len(alphas) != s.arity:
        raise InputError(f"--alphas has {len(alphas)} entries, series arity is {s.arity}")
    if s.codomain is None:
        raise InputError("input series already has integer coefficients")
    PGroupShape(s.codomain.p, alphas)  # validates the exponents
    lift = proper_lift(s)
    audit = audit_lift_divisibility(lift, s.codomain.p, alphas, args.h_max)
    _emit(args, {"lift": lift.to_json(), "audit": audit.to_json()})
    return EXIT_OK if audit.passed else EXIT_VIOLATION


def cmd_wilson(args) -> int:
    s, _ = _series_or_table(_load_json(args.input))
    if s.codomain is not None:
        s = proper_lift(s)
    total, val = wilson_sum(s, args.p)
    hyp = wilson_hypothesis(s, args.p, args.beta)
    holds = (not hyp) or val >= args.beta
    obj = {
        "sum": total,
        "valuation": degree_to_json(val),
        "degree": degree_to_json(s.support_degree()),
        "p": args.p,
        "beta": args.beta,
        "hypothesis": hyp,
        "pass": holds,
    }
    _emit(args, obj)
    return EXIT_OK if holds else EXIT_VIOLATION


def cmd_verify(args) -> int:
    if args.instance:
        inst = verifier.SystemInstance.from_json(_load_json(args.instance))
        rep = verifier.verify_instance(inst)
        _emit(args, rep.to_json())
        return EXIT_OK if rep.passed else EXIT_VIOLATION
    cfg = args.campaign
    if cfg is None:
        raise InputError("verify needs an instance file or --config with an 'instances' list")
    if args.seed is None:
        raise InputError("campaigns need a seed (--seed or 'seed' in the config)")
    cfg = {**cfg, "seed": args.seed}
    result = verifier.run_campaign(cfg, workers=args.workers)
    _emit(args, result)
    return EXIT_OK if result["summary"]["failed"] == 0 else EXIT_VIOLATION


def cmd_sigma(args) -> int:
    A = PGroupShape.parse(args.domain)
    B = PGroupShape.parse(args.codomain)
    value = verifier.sigma_invariant(A, B, cap=args.sigma_cap)
    obj = {"domain": A.to_json(), "codomain": B.to_json(), "sigma": degree_to_json(value)}
    _emit(args, obj, f"{obj['sigma']}\n")
    return EXIT_OK


def cmd_ring_check(args) -> int:
    spec = FiniteRngSpec.from_json(_load_json(args.spec))
    rep = spec.report
    obj = rep.to_json()
    if rep.valid:
        obj["field"] = spec.is_field if spec.order <= 2**12 or spec.modulus is not None else None
    _emit(args, obj)
    return EXIT_OK if rep.valid else EXIT_INPUT


def cmd_reduce(args) -> int:
    f = SparsePoly.from_json(_load_json(args.poly))
    _emit(args, reduce_over_fq(f).to_json())
    return EXIT_OK


_BOUNDS = {
    "axkatz_wilson": verifier.bound_axkatz_wilson,
    "multi_target": verifier.bound_multi_target,
    "gtpakt": verifier.bound_gtpakt,
    "gtcw": verifier.bound_gtcw,
    "ring_axkatz": verifier.bound_ring_axkatz,
    "moreno": verifier.bound_moreno,
    "classical_axkatz": verifier.bound_classical_axkatz_ordp,
    "chevalley_warning": verifier.bound_chevalley_warning,
}


def cmd_bound(args) -> int:
    try:
        kwargs = json.loads(args.params)
    except json.JSONDecodeError as exc:
        raise InputError(f"bound parameters are not valid JSON: {exc.msg}") from None
    if not isinstance(kwargs, dict):
        raise InputError("bound parameters must be a JSON object")
    try:
        value = _BOUNDS[args.name](**kwargs)
    except TypeError as exc:
        raise InputError(f"bad parameters for {args.name}: {exc}") from None
    _emit(args, {"name": args.name, "inputs": kwargs, "value": value}, f"{value}\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser

def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="base seed for randomized commands")
    common.add_argument("--workers", type=int, default=1, help="worker processes for campaigns")
    common.add_argument("--cap-elements", type=int, default=None, dest="cap_elements",
                        help="enumeration cap on group orders")
    common.add_argument("--out", default=None, help="write output here instead of stdout")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--config", default=None, help="JSON file; its keys override flags of the same name")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="fdcalc", description="Functional degree calculus on finite p-groups.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fdeg", parents=[common], help="functional and partial degrees of a table")
    p.add_argument("table")
    p.set_defaults(func=cmd_fdeg)

    p = sub.add_parser("represent", parents=[common], help="binomial-series coefficients of a table")
    p.add_argument("table")
    p.set_defaults(func=cmd_represent)

    p = sub.add_parser("lift", parents=[common], help="proper lift of a series with divisibility audit")
    p.add_argument("input", help="series JSON or table JSON")
    p.add_argument("--alphas", default=None, help="domain exponents, e.g. 1,2 (implied by a table input)")
    p.add_argument("--h-max", type=int, default=1, dest="h_max")
    p.set_defaults(func=cmd_lift)

    p = sub.add_parser("wilson", parents=[common], help="cube sum of a series and its p-adic valuation")
    p.add_argument("input", help="series JSON or table JSON")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--beta", type=int, default=1)
    p.set_defaults(func=cmd_wilson)

    p = sub.add_parser("verify", parents=[common], help="check every applicable bound on an instance or campaign")
    p.add_argument("instance", nargs="?")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sigma", parents=[common], help="exhaustive summation invariant")
    p.add_argument("domain", help="shape such as 2:1,1")
    p.add_argument("codomain", help="shape such as 2:2")
    p.add_argument("--sigma-cap", type=int, default=verifier.SIGMA_CAP, dest="sigma_cap")
    p.set_defaults(func=cmd_sigma)

    p = sub.add_parser("ring", help="rng utilities")
    rsub = p.add_subparsers(dest="ring_command", required=True)
    q = rsub.add_parser("check", parents=[common], help="validate structure constants")
    q.add_argument("spec")
    q.set_defaults(func=cmd_ring_check)

    p = sub.add_parser("reduce", parents=[common], help="reduced form of a polynomial over F_q")
    p.add_argument("poly")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("bound", parents=[common], help="evaluate a bound formula on raw inputs")
    p.add_argument("name", choices=sorted(_BOUNDS))
    p.add_argument("params", help='keyword arguments as JSON, e.g. \'{"N": 4, "p": 2, "pairs": [[1, 1]]}\'')
    p.set_defaults(func=cmd_bound)
    return parser


def _apply_config(args) -> None:
    args.campaign = None
    if not args.config:
        return
    cfg = _load_json(args.config)
    if not isinstance(cfg, dict):
        raise InputError("config must be a JSON object", "$")
    for key in COMMON_KEYS:
        if key in cfg:
            setattr(args, key, cfg[key])
    if "instances" in cfg:
        args.campaign = {k: v for k, v in cfg.items() if k not in COMMON_KEYS or k == "seed"}


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config(args)
        if args.workers is None or int(args.workers) < 1:
            raise InputError("workers must be >= 1")
        if args.cap_elements is not None:
            set_enumeration_cap(args.cap_elements)
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except GenerationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CapacityError as exc:
        print(f"capacity exceeded: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except FdcalcError as exc:  # pragma: no cover - every subclass is handled above
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main() -> None:
    sys.exit(run())
