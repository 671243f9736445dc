"""Command-line entry point: mutate, execute, simulate, compare.

Every subcommand is a pure function of its flags: all randomness flows
from --seed, worker pools reduce in input order, and output files are
byte-identical across runs of the same configuration.

Exit codes: 0 success, 2 bad input (schema, validation, missing file),
3 predictor infrastructure failure, 64 command-line usage error.
"""
from __future__ import annotations

import argparse
import csv
import os
import sys
from dataclasses import dataclass

from .factory import EmptyUnit, generate
from .files import (campaign_payload, load_compare_manifest, load_mutant_set,
                    save_campaign, save_mutant_set, unified_mutant_diff)
from .harness import (SuiteInvalid, build_kill_matrix, load_kill_matrix,
                      load_suite, save_kill_matrix)
from .interp import DEFAULT_FUEL
from .minij import LexError, ParseError, check_source, parse
from .predictor import ENDPOINT_ENV, PredictorConfig
from .schemas import SchemaError, dump_json
from .sim import common_effort_cap, derive_seed, run_campaign
from .stats import (PairedSample, UniverseMismatch, detection_overlap,
                    summarize_pair)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_PREDICTOR = 3
EXIT_USAGE = 64


class CliInputError(Exception):
    """Anything wrong with the inputs; maps to exit code 2."""


class PredictorDown(Exception):
    """Every remote prediction failed; maps to exit code 3."""


@dataclass(frozen=True)
class RunConfig:
    """One subcommand invocation, fully resolved from flags."""

    subcommand: str
    out_dir: str
    seed: int = 0
    quota: int | None = None
    fuel: int = DEFAULT_FUEL
    repetitions: int = 100
    effort_cap: object = "all"  # "auto" | "all" | int
    jobs: int | None = None
    predictor: PredictorConfig = PredictorConfig()
    program: str | None = None
    mutants: str | None = None
    suite: str | None = None
    buggy: str | None = None
    matrix: str | None = None
    manifest: str | None = None
    bug: str = ""
    approach: str = ""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive(label):
    def convert(text):
        try:
            value = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{label} must be an integer")
        if value < 1:
            raise argparse.ArgumentTypeError(f"{label} must be >= 1")
        return value
    return convert


def _cap_policy(text):
    if text in ("auto", "all"):
        return text
    return _positive("effort cap")(text)


def _read_text(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as err:
        raise CliInputError(f"cannot read {path}: {err.strerror}") from err


def _checked_program(path):
    text = _read_text(path)
    report = check_source(text)
    if not report.ok:
        lines = "\n".join(str(d) for d in report.diagnostics)
        raise CliInputError(f"{path} does not validate:\n{lines}")
    return text


def _out_path(cfg, name):
    os.makedirs(cfg.out_dir, exist_ok=True)
    return os.path.join(cfg.out_dir, name)


# ---------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------

def cmd_mutate(cfg: RunConfig) -> int:
    text = _checked_program(cfg.program)
    try:
        mset = generate(parse(text), cfg.predictor, quota=cfg.quota,
                        seed=cfg.seed, program_id=os.path.basename(
                            cfg.program))
    except EmptyUnit as err:
        raise CliInputError(f"{cfg.program}: {err}") from err
    predicted = sum(mset.stats[order]["predicted"]
                    for order in ("first", "second"))
    if mset.stats["prediction_failures"] and predicted == 0:
        raise PredictorDown("every prediction request failed")

    save_mutant_set(mset, _out_path(cfg, "mutants.json"), cfg.program)
    with open(_out_path(cfg, "mutants.diff"), "w", encoding="utf-8") as fh:
        for m in mset.mutants:
            fh.write(f"== {m.id} ({m.order}-order {m.kind}, line {m.line}): "
                     f"{m.original_lexeme!r} -> {m.replacement_lexeme!r}\n")
            fh.write(unified_mutant_diff(mset.original_source,
                                         m.rendered_source))
            fh.write("\n")
    by_order = {order: sum(1 for m in mset.mutants if m.order == order)
                for order in ("first", "second")}
    print(f"generated {len(mset.mutants)} mutants "
          f"({by_order['first']} first-order, "
          f"{by_order['second']} second-order)")
    print(f"wrote {_out_path(cfg, 'mutants.json')}")
    return EXIT_OK


def cmd_execute(cfg: RunConfig) -> int:
    program_text = _checked_program(cfg.program) if cfg.program else None
    mset = load_mutant_set(cfg.mutants, program_text=program_text)
    suite = load_suite(cfg.suite)
    buggy = parse(_checked_program(cfg.buggy)) if cfg.buggy else None
    try:
        matrix = build_kill_matrix(parse(mset.original_source), mset, suite,
                                   buggy=buggy, fuel=cfg.fuel, jobs=cfg.jobs,
                                   approach=cfg.approach)
    except ValueError as err:
        raise CliInputError(str(err)) from err
    save_kill_matrix(matrix, _out_path(cfg, "kill_matrix.json"))
    score = matrix.mutation_score
    if score is None:
        print("mutation score: n/a (no mutants)")
    else:
        killed = sum(1 for row in matrix.kills if any(row))
        print(f"mutation score: {killed}/{len(matrix.mutant_ids)} "
              f"= {score:.4f}")
    print(f"wrote {_out_path(cfg, 'kill_matrix.json')}")
    return EXIT_OK


def _resolved_cap(policy, matrices, repetitions, base_seed):
    if policy == "auto":
        return common_effort_cap(matrices, repetitions, base_seed)
    if policy == "all":
        return max(1, max(len(m.mutant_ids) for _, m in matrices))
    return policy


def cmd_simulate(cfg: RunConfig) -> int:
    matrix = load_kill_matrix(cfg.matrix)
    approach = cfg.approach or matrix.approach
    cap = _resolved_cap(cfg.effort_cap, [(approach, matrix)],
                        cfg.repetitions, derive_seed(cfg.seed, cfg.bug))
    result = run_campaign(matrix, cfg.repetitions, cap,
                          derive_seed(cfg.seed, cfg.bug, approach),
                          bug_id=cfg.bug, approach=approach)
    save_campaign(result, _out_path(cfg, "campaign.json"))
    print(f"detection ratio: {result.detection_ratio:.4f} over "
          f"{cfg.repetitions} sessions (effort cap {cap})")
    print(f"wrote {_out_path(cfg, 'campaign.json')}")
    return EXIT_OK


def cmd_compare(cfg: RunConfig) -> int:
    entries = load_compare_manifest(cfg.manifest)
    labels = sorted(entries[0].matrix_paths)
    caps = {}
    campaigns = {}
    for entry in entries:
        matrices = [(label, load_kill_matrix(entry.matrix_paths[label]))
                    for label in labels]
        cap = _resolved_cap(cfg.effort_cap, matrices, cfg.repetitions,
                            derive_seed(cfg.seed, entry.bug))
        caps[entry.bug] = cap
        for label, matrix in matrices:
            campaigns[(entry.bug, label)] = run_campaign(
                matrix, cfg.repetitions, cap,
                derive_seed(cfg.seed, entry.bug, label),
                bug_id=entry.bug, approach=label)

    bugs = [entry.bug for entry in entries]
    ratios = {label: {bug: campaigns[(bug, label)].detection_ratio
                      for bug in bugs} for label in labels}
    summaries = {}
    for first in labels:
        for second in labels:
            if first == second:
                continue
            sample = PairedSample(
                tuple(bugs),
                tuple(ratios[first][bug] for bug in bugs),
                tuple(ratios[second][bug] for bug in bugs))
            summary = summarize_pair(sample)
            summaries[f"{first}_vs_{second}"] = {
                "p_value": summary.p_value,
                "a12": summary.a12,
                "n_effective": summary.n_effective,
            }
    try:
        overlap = {
            "any_detection": _overlap_payload(detection_overlap(ratios, 0)),
            "high_detection_0.9":
                _overlap_payload(detection_overlap(ratios, 0.9)),
        }
    except UniverseMismatch as err:
        raise CliInputError(str(err)) from err

    report = {
        "seed": cfg.seed,
        "repetitions": cfg.repetitions,
        "effort_caps": caps,
        "detection_ratios": ratios,
        "summaries": summaries,
        "overlap": overlap,
        "campaigns": [campaign_payload(campaigns[(bug, label)])
                      for bug in bugs for label in labels],
    }
    dump_json(report, _out_path(cfg, "comparison.json"))
    with open(_out_path(cfg, "curves.csv"), "w", encoding="utf-8",
              newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["bug", "approach", "effort_fraction",
                         "detection_rate"])
        for bug in bugs:
            for label in labels:
                for fraction, rate in \
                        campaigns[(bug, label)].detection_curve:
                    writer.writerow([bug, label, fraction, rate])

    for name, summary in summaries.items():
        print(f"{name}: p={summary['p_value']:.4f} "
              f"a12={summary['a12']:.4f} n={summary['n_effective']}")
    print(f"wrote {_out_path(cfg, 'comparison.json')} and "
          f"{_out_path(cfg, 'curves.csv')}")
    return EXIT_OK


def _overlap_payload(regions):
    return [{"approaches": list(members), "bugs": list(bugs)}
            for members, bugs in regions.items()]


# ---------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mutalm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True)

    mutate = sub.add_parser("mutate", help="generate mutants for a program")
    mutate.add_argument("program", help="MiniJ source file")
    mutate.add_argument("--seed", type=int, default=0)
    mutate.add_argument("--quota", type=_positive("quota"), default=None)
    mutate.add_argument("--k", type=_positive("k"), default=5)
    mutate.add_argument("--predictor-mode", choices=("remote", "stub"),
                        default="stub")
    mutate.add_argument("--predictor-url", default=None)
    mutate.add_argument("--out", default=".")

    execute = sub.add_parser("execute", help="run a suite over a mutant set")
    execute.add_argument("mutants", help="mutant-set JSON file")
    execute.add_argument("suite", help="test-suite JSON file")
    execute.add_argument("--program", default=None,
                         help="override the program path recorded in the set")
    execute.add_argument("--buggy", default=None,
                         help="buggy program whose failing tests are "
                              "the revealing tests")
    execute.add_argument("--approach", default="")
    execute.add_argument("--fuel", type=_positive("fuel"),
                         default=DEFAULT_FUEL)
    execute.add_argument("--jobs", type=_positive("jobs"), default=None)
    execute.add_argument("--out", default=".")

    simulate = sub.add_parser("simulate",
                              help="simulate developer sessions on a matrix")
    simulate.add_argument("matrix", help="kill-matrix JSON file")
    simulate.add_argument("--seed", type=int, default=0)
    simulate.add_argument("--repetitions", type=_positive("repetitions"),
                          default=100)
    simulate.add_argument("--effort-cap", type=_cap_policy, default="all")
    simulate.add_argument("--bug", default="")
    simulate.add_argument("--approach", default="")
    simulate.add_argument("--out", default=".")

    compare = sub.add_parser("compare",
                             help="compare approaches across bugs")
    compare.add_argument("manifest", help="per-bug labelled matrix paths")
    compare.add_argument("--seed", type=int, default=0)
    compare.add_argument("--repetitions", type=_positive("repetitions"),
                         default=100)
    compare.add_argument("--effort-cap", type=_cap_policy, default="auto")
    compare.add_argument("--out", default=".")
    return parser


def config_from_args(args: argparse.Namespace,
                     parser: argparse.ArgumentParser) -> RunConfig:
    effort_cap = getattr(args, "effort_cap", "all")
    if args.subcommand == "simulate" and effort_cap == "auto":
        parser.error("an auto effort cap requires >= 2 approaches; "
                     "use compare, or pass a number or 'all'")
    predictor = PredictorConfig(
        k=getattr(args, "k", 5),
        mode=getattr(args, "predictor_mode", "stub"),
        endpoint=getattr(args, "predictor_url", None))
    if predictor.mode == "remote" and predictor.resolved_endpoint() is None:
        parser.error("remote mode needs --predictor-url "
                     f"or {ENDPOINT_ENV} set")
    return RunConfig(
        subcommand=args.subcommand,
        out_dir=args.out,
        seed=getattr(args, "seed", 0),
        quota=getattr(args, "quota", None),
        fuel=getattr(args, "fuel", DEFAULT_FUEL),
        repetitions=getattr(args, "repetitions", 100),
        effort_cap=effort_cap,
        jobs=getattr(args, "jobs", None),
        predictor=predictor,
        program=getattr(args, "program", None),
        mutants=getattr(args, "mutants", None),
        suite=getattr(args, "suite", None),
        buggy=getattr(args, "buggy", None),
        matrix=getattr(args, "matrix", None),
        manifest=getattr(args, "manifest", None),
        bug=getattr(args, "bug", ""),
        approach=getattr(args, "approach", ""))


_COMMANDS = {
    "mutate": cmd_mutate,
    "execute": cmd_execute,
    "simulate": cmd_simulate,
    "compare": cmd_compare,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg = config_from_args(args, parser)
    try:
        return _COMMANDS[cfg.subcommand](cfg)
    except (CliInputError, SchemaError, SuiteInvalid) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT
    except (LexError, ParseError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT
    except PredictorDown as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_PREDICTOR


if __name__ == "__main__":
    sys.exit(main())
