"""Command-line entry point: ``paddyfield {run, random-baseline, resume, score-molecules}``."""

from __future__ import annotations

import argparse
import csv
import dataclasses
import logging
import sys

from .. import engine, trial_store
from ..errors import PaddyError, UsageError
from ..objectives.molecules import (
    DEFAULT_ALPHA,
    DEFAULT_BETA,
    FEATURE_COLUMNS,
    bos,
    ccs,
    custom_metric,
    rbs,
    read_features,
    read_fingerprint,
    tversky,
)
from . import harness


def _read_target(path):
    if path is None:
        return None
    with open(path, encoding="utf-8") as fh:
        fp = read_fingerprint(fh)
    if not fp:
        raise UsageError(f"target fingerprint {path} is empty")
    return fp


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--benchmark", required=True, choices=sorted(harness.BENCHMARKS))
    p.add_argument("--runs", type=int, default=100, help="number of independent runs (default 100)")
    p.add_argument("--seed", type=int, default=0, help="base RNG seed; run i uses seed+i")
    p.add_argument("--out-dir", help="directory for runs.csv, curves.csv, summary.csv")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    _add_molecule_args(p)


def _add_molecule_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("molecule-score")
    g.add_argument("--decoder", help="module:function mapping a latent vector to MoleculeFeatures")
    g.add_argument("--target-fp", help="file of target on-bit indices")
    g.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
    g.add_argument("--beta", type=float, default=DEFAULT_BETA)
    g.add_argument("--metric", choices=["custom", "tversky"], default="custom")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="paddyfield", description="Paddy field algorithm benchmarks")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="repeated paddy runs on a named benchmark")
    _add_common(p)
    p.add_argument("--mode", choices=[m.value for m in engine.Mode])
    p.add_argument("--gaussian", choices=[g.value for g in engine.GaussianKind])
    p.add_argument("--random-seeds", type=int, dest="random_seed_count")
    p.add_argument("--threshold", type=int)
    p.add_argument("--s-max", type=int, dest="s_max")
    p.add_argument("--radius", type=float)
    p.add_argument("--iterations", type=int)
    p.add_argument("--save-trials", action="store_true", help="write each final state under OUT_DIR/trials/")

    p = sub.add_parser("random-baseline", help="repeated uniform random search")
    _add_common(p)
    p.add_argument("--evals", type=int, help="evaluations per execution (benchmark default otherwise)")

    p = sub.add_parser("resume", help="continue a saved trial until it terminates")
    p.add_argument("trial", help="a *.paddy.json file")
    p.add_argument("--iterations", type=int, help="raise the iteration limit before resuming")
    p.add_argument("--out", help="where to write the resumed trial (default: overwrite TRIAL)")
    p.add_argument("--curves", help="write per-iteration CSV here")
    _add_molecule_args(p)

    p = sub.add_parser("score-molecules", help="score precomputed molecule descriptors")
    p.add_argument("features", help="CSV with columns " + ",".join(FEATURE_COLUMNS))
    p.add_argument("--target-fp", required=True)
    p.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
    p.add_argument("--beta", type=float, default=DEFAULT_BETA)
    p.add_argument("--out", help="output CSV (default stdout)")
    return parser


def _spec_from_args(args, overrides=None) -> harness.BenchmarkSpec:
    return harness.BenchmarkSpec(
        name=args.benchmark,
        runs=args.runs,
        base_seed=args.seed,
        overrides=overrides or {},
        out_dir=args.out_dir,
        jobs=args.jobs,
        decoder=args.decoder,
        target_fp=_read_target(args.target_fp),
        alpha=args.alpha,
        beta=args.beta,
        molecule_metric=args.metric,
    )


def _print_summary(summary: harness.RunSummary, out=None) -> None:
    out = out or sys.stdout
    label = summary.metric
    print(f"benchmark  {summary.benchmark}  ({len(summary.rows)} runs, metric={label})", file=out)
    print(f"best       {summary.best:.6g}", file=out)
    print(f"worst      {summary.worst:.6g}", file=out)
    sd = f"{summary.sd:.3g}" if summary.sd_defined else "n/a"
    print(f"mean       {summary.mean:.6g} (sample sd {sd})", file=out)
    for key, value in summary.extras.items():
        print(f"{key:<10} {value:g}", file=out)


def cmd_run(args) -> int:
    overrides = {
        k: getattr(args, k)
        for k in ("mode", "gaussian", "random_seed_count", "threshold", "s_max", "radius", "iterations")
        if getattr(args, k) is not None
    }
    spec = _spec_from_args(args, overrides)
    spec.save_trials = args.save_trials
    if spec.save_trials and not spec.out_dir:
        raise UsageError("--save-trials needs --out-dir")
    _print_summary(harness.run_benchmark(spec))
    return 0


def cmd_random(args) -> int:
    spec = _spec_from_args(args)
    _print_summary(harness.random_baseline(spec, args.evals))
    return 0


def cmd_resume(args) -> int:
    state, name = trial_store.load_with_objective(args.trial)
    if name not in harness.BENCHMARKS:
        raise UsageError(f"trial does not name a known benchmark (got {name!r})")
    if args.iterations is not None:
        if args.iterations < state.iteration:
            raise UsageError("cannot lower the iteration limit below the current iteration")
        state.config = dataclasses.replace(state.config, iterations=args.iterations)
        if state.termination_reason is engine.TerminationReason.ITERATION_LIMIT and state.iteration < args.iterations:
            state.terminated = False
            state.termination_reason = None
    spec = harness.BenchmarkSpec(
        name=name, runs=1, decoder=args.decoder, target_fp=_read_target(args.target_fp),
        alpha=args.alpha, beta=args.beta, molecule_metric=args.metric,
    )
    _, objective = harness.build_problem(spec)
    curves = []
    result = engine.resume(state, objective, sink=curves.append)
    trial_store.save(result.state, args.out or args.trial, name)
    if args.curves:
        with open(args.curves, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["iteration", "best_so_far", "mean_new", "new_plants"])
            for r in curves:
                if r.new_plants:
                    writer.writerow([r.iteration, repr(r.best_fitness), repr(r.mean_new_fitness), r.new_plants])
    metric = harness.BENCHMARKS[name].to_metric(result.best.fitness)
    print(f"resumed {len(curves)} iteration(s); now at {result.state.iteration}, "
          f"{result.state.termination_reason.value}; best {harness.BENCHMARKS[name].metric} {metric:.6g}")
    return 0


def cmd_score(args) -> int:
    target = _read_target(args.target_fp)
    with open(args.features, newline="", encoding="utf-8") as fh:
        records = read_features(fh)
    out = open(args.out, "w", newline="", encoding="utf-8") if args.out else sys.stdout
    try:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["id", "tversky", "rbs", "ccs", "bos", "score"])
        for ident, m in records:
            writer.writerow([
                ident,
                repr(tversky(m.fingerprint, target, args.alpha, args.beta)),
                repr(rbs(m.rotatable_bonds)),
                repr(ccs(m.cycle_count)),
                repr(bos(m.on_bits)),
                repr(custom_metric(m, target, args.alpha, args.beta)),
            ])
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


COMMANDS = {"run": cmd_run, "random-baseline": cmd_random, "resume": cmd_resume, "score-molecules": cmd_score}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"paddyfield: error: {exc}", file=sys.stderr)
        return 2
    except (PaddyError, OSError) as exc:
        print(f"paddyfield: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
