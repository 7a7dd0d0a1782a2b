"""Command-line entry point.

Subcommands: ``apply`` (run a diff sequence over a document), ``xform``
(rebase two concurrent sequences against each other), ``fuzz`` (convergence
checks), ``simulate`` (seeded multi-client protocol runs), and ``serve``
(the WebSocket collaboration service).

Exit codes: 0 success, 1 property violation (counterexample or divergence),
2 parse error, 3 inapplicable diff, 4 environment failure (e.g. bind).
"""

from __future__ import annotations

import argparse
import asyncio
import dataclasses
import json
import sys
from pathlib import Path

from .diffs import ApplyError, apply_seq, encode_seq, loads_seq
from .simulate import SimConfig, run_sim
from .transform import transform_seq
from .verify import EnumBounds, check_epsilon_absorption, check_seq_identity, check_tp1_exhaustive

OK, VIOLATION, PARSE, INAPPLICABLE, ENVIRONMENT = 0, 1, 2, 3, 4


class CliError(Exception):
    def __init__(self, code: int, message: str) -> None:
        super().__init__(message)
        self.code = code


def _read_doc(spec: str) -> str:
    if spec == "-":
        return sys.stdin.read()
    try:
        return Path(spec).read_text()
    except OSError as exc:
        raise CliError(ENVIRONMENT, f"cannot read document: {exc}") from None


def _parse_seq(text: str):
    if text.startswith("@"):
        try:
            text = Path(text[1:]).read_text()
        except OSError as exc:
            raise CliError(PARSE, f"cannot read diffs file: {exc}") from None
    try:
        return loads_seq(text)
    except ValueError as exc:
        raise CliError(PARSE, str(exc)) from None


def cmd_apply(args) -> int:
    doc = _read_doc(args.doc)
    diffs = _parse_seq(args.diffs)
    try:
        result = apply_seq(doc, diffs)
    except ApplyError as exc:
        raise CliError(INAPPLICABLE, str(exc)) from None
    sys.stdout.write(result)
    return OK


def cmd_xform(args) -> int:
    pair = transform_seq(_parse_seq(args.a), _parse_seq(args.b), split=args.split)
    json.dump(
        {"b_after_a": encode_seq(pair.b_after_a), "a_after_b": encode_seq(pair.a_after_b)},
        sys.stdout,
    )
    sys.stdout.write("\n")
    return OK


def cmd_fuzz(args) -> int:
    out: dict = {}
    failures = 0
    if args.mode in ("tp1", "all"):
        bounds = EnumBounds(args.max_doc_len, args.max_text_len, args.alphabet)
        rule = "keep-first" if args.negative_control else "cancel"
        tp1 = check_tp1_exhaustive(bounds, equal_delete_rule=rule)
        failures += len(tp1.counterexamples)
        out["tp1"] = {
            "pairs": tp1.pairs,
            "counterexamples": len(tp1.counterexamples),
            "missing_cases": list(tp1.missing_cases),
            "case_hits": dict(sorted(tp1.case_hits.items())),
        }
        if args.plot:
            from .report import plot_coverage

            plot_coverage(args.plot, tp1)
    if args.mode in ("seq", "all"):
        seq = check_seq_identity(args.trials, seed=args.seed, alphabet=args.alphabet)
        failures += len(seq.counterexamples) + seq.fragmentation_violations
        out["seq"] = {
            "trials": seq.trials,
            "passes": seq.passes,
            "counterexamples": len(seq.counterexamples),
            "fragmentation_violations": seq.fragmentation_violations,
            "max_budget_ratio": round(seq.max_budget_ratio, 4),
        }
    if args.mode in ("epsilon", "all"):
        eps = check_epsilon_absorption(args.trials, seed=args.seed, alphabet=args.alphabet)
        failures += len(eps.counterexamples)
        out["epsilon"] = {
            "trials": eps.trials,
            "passes": eps.passes,
            "counterexamples": len(eps.counterexamples),
        }
    json.dump(out, sys.stdout)
    sys.stdout.write("\n")
    return VIOLATION if failures else OK


def _sim_config(args) -> SimConfig:
    fields = {}
    if args.config:
        try:
            fields = json.loads(Path(args.config).read_text())
        except OSError as exc:
            raise CliError(ENVIRONMENT, f"cannot read config: {exc}") from None
        except json.JSONDecodeError as exc:
            raise CliError(PARSE, f"bad config JSON: {exc}") from None
    overrides = {
        "clients": args.clients,
        "steps": args.steps,
        "seed": args.seed,
        "insert_prob": args.insert_prob,
        "max_insert_len": args.max_insert_len,
        "max_delete_len": args.max_delete_len,
        "alphabet": args.alphabet,
        "mode": args.mode,
    }
    fields.update({k: v for k, v in overrides.items() if v is not None})
    if args.schedule_mix is not None:
        try:
            fields["schedule_mix"] = tuple(float(p) for p in args.schedule_mix.split(","))
        except ValueError:
            raise CliError(PARSE, f"bad schedule mix {args.schedule_mix!r}") from None
    if args.initial_doc is not None:
        fields["initial_doc"] = _read_doc(args.initial_doc)
    try:
        return SimConfig.from_dict(fields)
    except (TypeError, ValueError) as exc:
        raise CliError(PARSE, f"bad simulation config: {exc}") from None


def cmd_simulate(args) -> int:
    config = _sim_config(args)
    if args.seeds is None:
        report = run_sim(config)
        sys.stdout.write(report.to_json() + "\n")
        return OK if report.converged else VIOLATION
    rows = []
    diverged = 0
    from .report import sim_row

    for seed in range(config.seed, config.seed + args.seeds):
        cfg = dataclasses.replace(config, seed=seed)
        report = run_sim(cfg)
        rows.append(sim_row(cfg, report))
        diverged += not report.converged
    if args.csv:
        from .report import write_sim_csv

        write_sim_csv(args.csv, rows)
    if args.plot:
        from .report import plot_sim

        plot_sim(args.plot, rows)
    json.dump({"runs": len(rows), "converged": len(rows) - diverged, "diverged": diverged}, sys.stdout)
    sys.stdout.write("\n")
    return VIOLATION if diverged else OK


def cmd_serve(args) -> int:
    from .server import run_server

    doc = _read_doc(args.doc) if args.doc else ""
    mode = "push" if args.push else "pull"
    try:
        asyncio.run(run_server(args.port, doc=doc, mode=mode, host=args.host, static_dir=args.static))
    except OSError as exc:
        raise CliError(ENVIRONMENT, f"cannot serve on port {args.port}: {exc}") from None
    except KeyboardInterrupt:
        pass
    return OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="coedit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("apply", help="apply a JSON diff sequence to a document")
    p.add_argument("--doc", default="-", help="document file, or - for stdin")
    p.add_argument("--diffs", required=True, help="JSON diff array, or @file")
    p.set_defaults(func=cmd_apply)

    p = sub.add_parser("xform", help="rebase two concurrent diff sequences")
    p.add_argument("--a", required=True, help="first JSON diff array, or @file")
    p.add_argument("--b", required=True, help="second JSON diff array, or @file")
    p.add_argument("--split", choices=("midpoint", "leftmost"), default="midpoint")
    p.set_defaults(func=cmd_xform)

    p = sub.add_parser("fuzz", help="run the convergence checks")
    p.add_argument("--mode", choices=("tp1", "seq", "epsilon", "all"), default="all")
    p.add_argument("--max-doc-len", type=int, default=6)
    p.add_argument("--max-text-len", type=int, default=2)
    p.add_argument("--alphabet", default="ab")
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument(
        "--negative-control",
        action="store_true",
        help="use the known-broken identical-deletes rule; expect counterexamples",
    )
    p.add_argument("--plot", metavar="FILE", help="write a branch-coverage figure")
    p.set_defaults(func=cmd_fuzz)

    p = sub.add_parser("simulate", help="run the multi-client protocol simulator")
    p.add_argument("--config", metavar="FILE", help="JSON file of SimConfig fields")
    p.add_argument("--clients", type=int)
    p.add_argument("--steps", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--seeds", type=int, metavar="N", help="batch: run N consecutive seeds")
    p.add_argument("--insert-prob", type=float)
    p.add_argument("--max-insert-len", type=int)
    p.add_argument("--max-delete-len", type=int)
    p.add_argument("--alphabet")
    p.add_argument("--schedule-mix", metavar="E,F,G", help="edit,flush,get weights")
    p.add_argument("--initial-doc", metavar="FILE")
    p.add_argument("--mode", choices=("faithful", "live"))
    p.add_argument("--csv", metavar="FILE", help="batch: write per-run rows")
    p.add_argument("--plot", metavar="FILE", help="batch: write a summary figure")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("serve", help="run the WebSocket collaboration service")
    p.add_argument("--port", type=int, required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--doc", metavar="FILE", help="initial document text")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--push", action="store_true", help="deliver batches as they appear")
    mode.add_argument("--pull", action="store_true", help="deliver only on get (default)")
    p.add_argument("--static", metavar="DIR", help="also serve this directory over HTTP")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"coedit: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
