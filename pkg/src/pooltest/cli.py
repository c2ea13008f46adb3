"""pooltest command-line interface."""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace

from . import bounds as bounds_mod
from . import design as design_mod
from . import disguise as disguise_mod
from . import sim as sim_mod
from .decode import DecoderId, decode
from .model import OutcomeVector, Prior

_FMT = "{:.12g}"


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # noqa: A003 - argparse hook
        raise _UsageError(message)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return _FMT.format(value)
    return str(value)


def _default_seed() -> int:
    return int(os.environ.get("POOLTEST_SEED", "0"))


def _read_design(path: str) -> design_mod.TestDesign:
    if path == "-":
        return design_mod.parse_design(sys.stdin.read())
    return design_mod.load_design(path)


def _write_text(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def build_parser() -> _Parser:
    parser = _Parser(prog="pooltest", description="Nonadaptive group testing toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("gen", help="generate a test design")
    p_gen.add_argument("kind", choices=["individual", "bernoulli", "doubly-regular"])
    p_gen.add_argument("-n", type=int, required=True, help="item count")
    p_gen.add_argument("-T", type=int, help="test count (bernoulli)")
    p_gen.add_argument("--nu", type=float, help="inclusion probability (bernoulli)")
    p_gen.add_argument("-l", type=int, help="tests per item (doubly-regular)")
    p_gen.add_argument("-r", type=int, help="items per test (doubly-regular)")
    p_gen.add_argument("--seed", type=int, default=_default_seed())
    p_gen.add_argument("-o", "--output", help="output path (default stdout)")
    p_gen.set_defaults(func=_cmd_gen)

    p_red = sub.add_parser("reduce", help="strip weight-0 tests and resolve weight-1 tests")
    p_red.add_argument("--design", required=True, help="design file path, or - for stdin")
    p_red.add_argument("-o", "--output", help="output path (default stdout)")
    p_red.set_defaults(func=_cmd_reduce)

    p_bound = sub.add_parser("bound", help="error floor and related bounds for a prior")
    p_bound.add_argument("-p", type=float, required=True)
    p_bound.add_argument("--delta", type=float)
    p_bound.add_argument("-n", type=int, help="also report the counting bound H(p)*n")
    p_bound.add_argument("--json", action="store_true")
    p_bound.set_defaults(func=_cmd_bound)

    p_fig = sub.add_parser("figure", help="emit the floor curve over a prevalence grid as CSV")
    p_fig.add_argument("--p-min", type=float, required=True)
    p_fig.add_argument("--p-max", type=float, required=True)
    p_fig.add_argument("--steps", type=int, required=True)
    p_fig.add_argument("-o", "--output", help="output path (default stdout)")
    p_fig.set_defaults(func=_cmd_figure)

    p_dis = sub.add_parser("disguise", help="per-item disguise bounds for a design")
    p_dis.add_argument("--design", required=True)
    p_dis.add_argument("-p", type=float, required=True)
    p_dis.add_argument(
        "--exact-budget",
        type=int,
        default=20,
        help="compute exact probabilities for items with at most this many co-items (0 disables)",
    )
    p_dis.add_argument("--json", action="store_true")
    p_dis.set_defaults(func=_cmd_disguise)

    p_dec = sub.add_parser("decode", help="decode one outcome vector")
    p_dec.add_argument("--design", required=True)
    p_dec.add_argument("--outcome", required=True, help="0/1 string, one bit per test")
    p_dec.add_argument("--decoder", choices=["comp", "dd", "map"], required=True)
    p_dec.add_argument("-p", type=float, help="prior (required for map)")
    p_dec.set_defaults(func=_cmd_decode)

    p_exact = sub.add_parser("exact-error", help="exact average error by enumeration")
    p_exact.add_argument("--design", required=True)
    p_exact.add_argument("--decoder", choices=["comp", "dd", "map"], required=True)
    p_exact.add_argument("-p", type=float, required=True)
    p_exact.set_defaults(func=_cmd_exact_error)

    p_sim = sub.add_parser("simulate", help="Monte Carlo average error")
    p_sim.add_argument("--design", required=True)
    p_sim.add_argument("--decoder", choices=["comp", "dd", "map"], required=True)
    p_sim.add_argument("-p", type=float, required=True)
    p_sim.add_argument("--trials", type=int, default=100_000)
    p_sim.add_argument("--seed", type=int, default=_default_seed())
    p_sim.add_argument("--workers", type=int, default=1)
    p_sim.add_argument("--json", action="store_true")
    p_sim.set_defaults(func=_cmd_simulate)

    p_ver = sub.add_parser("verify", help="check a design against the error floor")
    p_ver.add_argument("--design", required=True)
    p_ver.add_argument("-p", type=float, required=True)
    p_ver.add_argument("--trials", type=int, default=100_000)
    p_ver.add_argument("--seed", type=int, default=_default_seed())
    p_ver.add_argument("--workers", type=int, default=1)
    p_ver.add_argument("--json", action="store_true")
    p_ver.set_defaults(func=_cmd_verify)

    return parser


def _cmd_gen(args) -> int:
    if args.kind == "individual":
        d = design_mod.gen_individual(args.n)
    elif args.kind == "bernoulli":
        if args.T is None or args.nu is None:
            raise ValueError("bernoulli designs need -T and --nu")
        d = design_mod.gen_bernoulli(args.n, args.T, args.nu, args.seed)
    else:
        if args.l is None or args.r is None:
            raise ValueError("doubly-regular designs need -l and -r")
        d = design_mod.gen_doubly_regular(args.n, args.l, args.r, args.seed)
    _write_text(design_mod.format_design(d), args.output)
    return 0


def _cmd_reduce(args) -> int:
    d = _read_design(args.design)
    reduced, log = design_mod.reduce_design(d)
    lines = [f"# removed empty tests: {','.join(map(str, log.removed_empty_tests))}"]
    lines.append(
        "# resolved items (item:test): "
        + ",".join(f"{i}:{t}" for i, t in log.resolved_items)
    )
    lines.append(f"# item map: {','.join(map(str, log.item_map))}")
    lines.append(f"# test map: {','.join(map(str, log.test_map))}")
    _write_text("\n".join(lines) + "\n" + design_mod.format_design(reduced), args.output)
    return 0


def _cmd_bound(args) -> int:
    prior = Prior(args.p)
    report = bounds_mod.epsilon_bound(prior)
    if args.delta is not None:
        report = replace(
            report,
            delta=args.delta,
            epsilon_delta=bounds_mod.epsilon_bound_delta(prior, args.delta),
        )
    if args.n is not None:
        report = replace(report, counting_bound=bounds_mod.counting_bound(prior, args.n))
    if args.json:
        print(json.dumps(report.to_dict()))
        return 0
    for name in ("p", "q", "l_star", "w_star", "epsilon", "delta", "epsilon_delta", "counting_bound"):
        value = getattr(report, name)
        if value is None:
            continue
        print(f"{name:<15}{_fmt(value)}")
    return 0


def _cmd_figure(args) -> int:
    if args.steps < 1:
        raise ValueError("steps must be at least 1")
    if not 0.0 < args.p_min <= args.p_max < 1.0:
        raise ValueError("need 0 < p-min <= p-max < 1")
    rows = ["p,L_star,w_star,epsilon"]
    for k in range(args.steps):
        if args.steps == 1:
            p = args.p_min
        else:
            p = args.p_min + k * (args.p_max - args.p_min) / (args.steps - 1)
        report = bounds_mod.epsilon_bound(Prior(p))
        rows.append(
            f"{_fmt(p)},{_fmt(report.l_star)},{report.w_star},{_fmt(report.epsilon)}"
        )
    _write_text("\n".join(rows) + "\n", args.output)
    return 0


def _cmd_disguise(args) -> int:
    d = _read_design(args.design)
    prior = Prior(args.p)
    budget = None if args.exact_budget <= 0 else args.exact_budget
    report = disguise_mod.mean_log_bound(d, prior, exact_budget=budget)
    if args.json:
        print(json.dumps(report.to_dict()))
        return 0
    print(f"{'item':>6} {'L_i':>18} {'fkg_bound':>16} {'exact':>16}")
    for rec in report.items:
        exact = _fmt(rec.exact_prob) if rec.exact_prob is not None else "-"
        print(f"{rec.item:>6} {_fmt(rec.log_bound):>18} {_fmt(rec.fkg_bound):>16} {exact:>16}")
    print("L_bar,L_bar_by_test,scaled_min_term,min_weight_term,L_star,chain_applicable")
    print(
        ",".join(
            _fmt(v)
            for v in (
                report.mean_log_bound,
                report.mean_log_bound_by_test,
                report.scaled_min_term,
                report.min_weight_term,
                report.l_star,
                report.chain_applicable,
            )
        )
    )
    return 0


def _cmd_decode(args) -> int:
    d = _read_design(args.design)
    y = OutcomeVector.from_string(args.outcome)
    decoder = DecoderId(args.decoder)
    prior = Prior(args.p) if args.p is not None else None
    estimate = decode(d, y, decoder, prior)
    print(",".join(map(str, estimate.indices)))
    return 0


def _cmd_exact_error(args) -> int:
    d = _read_design(args.design)
    value = sim_mod.exact_average_error(d, Prior(args.p), DecoderId(args.decoder))
    print(_fmt(value))
    return 0


def _cmd_simulate(args) -> int:
    d = _read_design(args.design)
    result = sim_mod.monte_carlo_error(
        d, Prior(args.p), DecoderId(args.decoder), args.trials, args.seed, args.workers
    )
    if args.json:
        print(json.dumps(result.to_dict()))
        return 0
    for name in ("trials", "errors", "estimate", "ci_low", "ci_high", "seed"):
        print(f"{name:<10}{_fmt(getattr(result, name))}")
    print(f"{'decoder':<10}{result.decoder.value}")
    return 0


def _cmd_verify(args) -> int:
    d = _read_design(args.design)
    report = sim_mod.verify_theorem(
        d, Prior(args.p), trials=args.trials, seed=args.seed, workers=args.workers
    )
    if args.json:
        print(json.dumps(report.to_dict()))
    else:
        print(f"design          {report.design_summary}")
        print(f"p               {_fmt(report.p)}")
        print(f"epsilon_floor   {_fmt(report.epsilon_floor)}")
        print(f"observed_error  {_fmt(report.observed_error)} ({report.method})")
        if not report.applicable:
            print("floor           not applicable (T >= n)")
        else:
            print(f"floor_check     {'pass' if report.theorem_pass else 'FAIL'}")
        failed = [c for c in report.lemma_checks if not c.passed]
        print(
            f"disguise_checks {len(report.lemma_checks)} checked, "
            f"{len(failed)} failed, {len(report.lemma_skipped)} skipped"
        )
        for c in failed:
            print(f"  item {c.item}: exact {_fmt(c.exact)} < bound {_fmt(c.bound)}")
    violated = (report.applicable and report.theorem_pass is False) or any(
        not c.passed for c in report.lemma_checks
    )
    return 2 if violated else 0


def run(argv: list[str]) -> int:
    """Parse and dispatch; exit 0 on success, 1 on usage errors, 2 on verification failure."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
