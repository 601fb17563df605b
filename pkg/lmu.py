#!/usr/bin/env python3
"""
λμ Workbench
============
Command-line front end for the λμ-calculus workbench: parsing, reduction,
approximants, strict intersection types, derivation checking, bounded
type inference and the characterisation harness.

Usage:
    python lmu.py parse -e "\\x.x"
    python lmu.py reduce -e "(\\x.x)y" --fuel 10
    python lmu.py classify -e "mu a.[b] mu g.[d] x"
    python lmu.py corpus run

Exit codes:
    0 ok, 1 negative result, 2 malformed input,
    3 fuel exhausted, 4 characterisation disagreement

Environment Variables:
    LMU_COLOR - set to 0 to disable styled output
"""

import argparse
import json
import logging
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import pandas as pd

from lib.approximation import approximants, is_approximant, join, semantics
from lib.config import (
    get_corpus_file,
    get_corpus_jobs,
    get_depth,
    get_fuel,
    get_graph_fuel,
    get_last_run_file,
    get_log_level,
    get_output_format,
    get_search_fuel,
    get_seed,
    get_state_dir,
    get_strategy,
    get_width,
    is_color_enabled,
    load_config,
)
from lib.derivations import DerivationFormatError, check_derivation, derivation_from_json
from lib.inference import ClassifyReport, classify, infer
from lib.properties import run_properties
from lib.reduction import ReductionStatus, Strategy, is_hnf, is_nf, normalize, redexes
from lib.report import (
    CLASSIFY_FIELDS,
    classify_rows,
    classify_table,
    format_trace,
    format_typing,
    results_table,
    styled,
    summarize_results,
    trace_to_json,
    typing_to_json,
    verdict_text,
)
from lib.state import get_changed_verdicts, load_last_run, save_last_run
from lib.strict_types import type_leq
from lib.syntax import TermSyntaxError, TypeSyntaxError, parse_cont, parse_term, parse_type, pretty
from lib.terms import LmuError, format_position, free_names, free_vars

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_MALFORMED = 2
EXIT_FUEL = 3
EXIT_DISAGREEMENT = 4


class ConfigError(LmuError):
    """Run configuration violates its bounds."""


@dataclass
class RunConfig:
    command: str
    expressions: list[str] = field(default_factory=list)
    types: list[str] = field(default_factory=list)
    files: list[str] = field(default_factory=list)
    fuel: int = 1000
    depth: int = 6
    width: int = 3
    search_fuel: int = 400
    graph_fuel: int = 200
    strategy: str = "lor"
    seed: Optional[int] = None
    format: str = "text"
    color: bool = True
    system: str = "S"
    jobs: int = 1
    count: int = 20
    derivations: bool = False
    state_dir: str = "state"
    last_run_file: str = "last_corpus_run.json"

    def validate(self) -> None:
        for name in ("fuel", "depth", "width", "search_fuel", "graph_fuel"):
            if getattr(self, name) < 0:
                raise ConfigError(f"--{name.replace('_', '-')} must be non-negative")
        if self.strategy == Strategy.RANDOM.value and self.seed is None:
            raise ConfigError("The random strategy requires --seed")
        if self.jobs < 1:
            raise ConfigError("--jobs must be at least 1")


# ==============================================================================
# ARGUMENTS
# ==============================================================================


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default="config.json", help="Path to config.json")
    common.add_argument("--fuel", type=int, help="Reduction step budget")
    common.add_argument("--depth", type=int, help="Derivation height bound")
    common.add_argument("--width", type=int, help="Intersection/continuation width bound")
    common.add_argument("--seed", type=int, help="Seed for the random strategy and generators")
    common.add_argument("--format", choices=["text", "json"], help="Output format")
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG")

    parser = argparse.ArgumentParser(prog="lmu", description="λμ-calculus workbench")
    commands = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        return commands.add_parser(name, parents=[common], help=help_text)

    def expression(sub: argparse.ArgumentParser, many: bool = False) -> None:
        sub.add_argument("-e", "--expr", dest="expressions", action="append", default=[], help="Term text")
        sub.add_argument("files", nargs="*" if many else "?", default=None, help="File holding a term")

    expression(add("parse", "Parse and pretty-print a term"))
    reduce_cmd = add("reduce", "Reduce a term and print the trace")
    expression(reduce_cmd)
    reduce_cmd.add_argument("--strategy", choices=[s.value for s in Strategy])
    expression(add("classify", "Compare reduction and typing characterisations"))
    expression(add("approx", "Maximal approximants and their join"))
    expression(add("join", "Join of two compatible terms"), many=True)

    subtype_cmd = add("subtype", "Decide type inclusion")
    subtype_cmd.add_argument("-t", "--type", dest="types", action="append", default=[], help="Type text")

    check_cmd = add("check", "Check a derivation JSON file")
    check_cmd.add_argument("files", nargs=1, help="Derivation JSON file")
    check_cmd.add_argument("--system", choices=["s", "bot", "sn"], default="s")

    infer_cmd = add("infer", "Bounded type inference")
    expression(infer_cmd)
    infer_cmd.add_argument("--system", choices=["s", "sn"], default="s")
    infer_cmd.add_argument("--derivations", action="store_true", help="Include derivations in JSON output")

    corpus_cmd = commands.add_parser("corpus", help="Corpus runner and property harness")
    corpus_actions = corpus_cmd.add_subparsers(dest="action", required=True)
    run_cmd = corpus_actions.add_parser("run", parents=[common], help="Classify every corpus term")
    run_cmd.add_argument("files", nargs="?", default=None, help="Corpus file")
    run_cmd.add_argument("--jobs", type=int, help="Parallel worker processes")
    props_cmd = corpus_actions.add_parser("props", parents=[common], help="Run the property harness")
    props_cmd.add_argument("--count", type=int, default=20, help="Generated instances")
    return parser


def resolve_run_config(args: argparse.Namespace, config: dict) -> RunConfig:
    """CLI flags override config.json values."""

    def pick(flag: Optional[object], default: object) -> object:
        return default if flag is None else flag

    command = args.command if args.command != "corpus" else f"corpus-{args.action}"
    files = getattr(args, "files", None) or []
    files = files if isinstance(files, list) else [files]
    system = getattr(args, "system", "s")
    run = RunConfig(
        command=command,
        expressions=list(getattr(args, "expressions", [])),
        types=list(getattr(args, "types", [])),
        files=files,
        fuel=pick(args.fuel, get_fuel(config)),
        depth=pick(args.depth, get_depth(config)),
        width=pick(args.width, get_width(config)),
        search_fuel=get_search_fuel(config),
        graph_fuel=get_graph_fuel(config),
        strategy=pick(getattr(args, "strategy", None), get_strategy(config)),
        seed=pick(args.seed, get_seed(config)),
        format=pick(args.format, get_output_format(config)),
        color=is_color_enabled(config) and sys.stdout.isatty(),
        system={"s": "S", "bot": "Bot", "sn": "SN"}[system],
        jobs=pick(getattr(args, "jobs", None), get_corpus_jobs(config)),
        count=getattr(args, "count", 20),
        derivations=getattr(args, "derivations", False),
        state_dir=get_state_dir(config),
        last_run_file=get_last_run_file(config),
    )
    if run.command == "corpus-run" and not run.files:
        run.files = [get_corpus_file(config)]
    run.validate()
    return run


def configure_logging(level_name: str, verbosity: int) -> None:
    level = getattr(logging, str(level_name).upper(), logging.WARNING)
    if verbosity == 1:
        level = min(level, logging.INFO)
    elif verbosity >= 2:
        level = logging.DEBUG
    logging.basicConfig(
        level=level,
        format="%(asctime)s - %(levelname)s - %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
        stream=sys.stderr,
        force=True,
    )


# ==============================================================================
# INPUTS
# ==============================================================================


def read_terms(cfg: RunConfig, needed: int = 1) -> list:
    """Terms from -e flags, then files; raises TermSyntaxError on bad input."""
    texts = list(cfg.expressions)
    for name in cfg.files:
        texts.append(Path(name).read_text().strip())
    if len(texts) < needed:
        raise ConfigError(f"Expected {needed} term(s), got {len(texts)}")
    return [parse_term(text) for text in texts]


def emit(cfg: RunConfig, text: str, data: object) -> None:
    if cfg.format == "json":
        print(json.dumps(data, indent=2, ensure_ascii=False))
    else:
        print(text)


# ==============================================================================
# COMMANDS
# ==============================================================================


def cmd_parse(cfg: RunConfig) -> int:
    term = read_terms(cfg)[0]
    data = {
        "term": pretty(term),
        "free_vars": sorted(free_vars(term)),
        "free_names": sorted(free_names(term)),
        "redexes": [{"path": format_position(p), "kind": k.value} for p, k in redexes(term)],
        "is_hnf": is_hnf(term),
        "is_nf": is_nf(term),
        "is_approximant": is_approximant(term),
    }
    emit(cfg, pretty(term), data)
    return EXIT_OK


def cmd_reduce(cfg: RunConfig) -> int:
    term = read_terms(cfg)[0]
    outcome = normalize(term, cfg.strategy, cfg.fuel, cfg.seed)
    lines = format_trace(outcome) + [pretty(outcome.final)]
    if outcome.status == ReductionStatus.FUEL_EXHAUSTED:
        logger.warning(f"Fuel exhausted after {len(outcome.steps)} steps")
    emit(cfg, "\n".join(lines), trace_to_json(outcome))
    return EXIT_OK if outcome.status == ReductionStatus.NORMAL else EXIT_FUEL


def _classify(term, cfg: RunConfig) -> ClassifyReport:
    return classify(term, cfg.fuel, cfg.depth, cfg.width, cfg.search_fuel, cfg.graph_fuel)


def cmd_classify(cfg: RunConfig) -> int:
    term = read_terms(cfg)[0]
    report = _classify(term, cfg)
    emit(cfg, classify_table(report, cfg.color), report.as_dict())
    return EXIT_DISAGREEMENT if report.disagreements else EXIT_OK


def cmd_approx(cfg: RunConfig) -> int:
    term = read_terms(cfg)[0]
    found = approximants(term, cfg.graph_fuel)
    joined = semantics(term, cfg.graph_fuel)
    data = {
        "maximal": [pretty(a) for a in found.maximal],
        "complete": found.complete,
        "fuel": found.fuel,
        "join": pretty(joined),
    }
    lines = [pretty(a) for a in found.maximal] + [f"join: {pretty(joined)}"]
    if not found.complete:
        lines.append("(reduction graph not fully explored)")
    emit(cfg, "\n".join(lines), data)
    return EXIT_OK


def cmd_join(cfg: RunConfig) -> int:
    left, right = read_terms(cfg, 2)[:2]
    joined = join(left, right)
    if joined is None:
        emit(cfg, "undefined", {"join": None})
        return EXIT_NEGATIVE
    emit(cfg, pretty(joined), {"join": pretty(joined)})
    return EXIT_OK


def cmd_subtype(cfg: RunConfig) -> int:
    if len(cfg.types) != 2:
        raise ConfigError("subtype needs exactly two -t arguments")
    try:
        left, right = (parse_type(t) for t in cfg.types)
    except TypeSyntaxError:
        left, right = (parse_cont(t) for t in cfg.types)
    result = type_leq(left, right)
    emit(cfg, verdict_text(result), {"leq": result})
    return EXIT_OK if result else EXIT_NEGATIVE


def cmd_check(cfg: RunConfig) -> int:
    path = Path(cfg.files[0])
    try:
        data = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise DerivationFormatError(f"Cannot read {path}: {e}") from e
    derivation = derivation_from_json(data)
    result = check_derivation(derivation, cfg.system)
    errors = [
        {"path": list(e.path), "rule": e.rule, "message": e.message, "detail": e.detail} for e in result.errors
    ]
    if result.ok:
        emit(cfg, "ok", {"ok": True, "errors": []})
        return EXIT_OK
    lines = [f"@{'.'.join(map(str, e.path)) or 'root'} ({e.rule}) {e.message} {e.detail or ''}".rstrip()
             for e in result.errors]
    emit(cfg, "\n".join(lines), {"ok": False, "errors": errors})
    return EXIT_NEGATIVE


def cmd_infer(cfg: RunConfig) -> int:
    term = read_terms(cfg)[0]
    typings = infer(term, cfg.system, cfg.depth, cfg.width, cfg.search_fuel)
    lines = [format_typing(t) for t in typings] or ["(no typing found within bounds)"]
    emit(cfg, "\n".join(lines), [typing_to_json(t, cfg.derivations) for t in typings])
    return EXIT_OK


# ==============================================================================
# CORPUS
# ==============================================================================

ANNOTATION = re.compile(r"(\w+)=(\S+)")


@dataclass(frozen=True)
class CorpusEntry:
    line: int
    text: str
    expected: dict


def load_corpus(filepath: str) -> list[CorpusEntry]:
    """One term per line, expectations as a trailing ``# key=value`` comment."""
    entries = []
    for number, raw in enumerate(Path(filepath).read_text().splitlines(), start=1):
        text, _, comment = raw.partition("#")
        text = text.strip()
        if not text:
            continue
        expected = {key: value for key, value in ANNOTATION.findall(comment)}
        entries.append(CorpusEntry(number, text, expected))
    logger.info(f"Loaded {len(entries)} corpus terms from {filepath}")
    return entries


def _expected_matches(expected: dict, report: ClassifyReport) -> list[str]:
    actual = {
        "hnf": verdict_text(report.hnf_by_reduction),
        "nf": verdict_text(report.nf_by_reduction),
        "sn": report.sn_by_graph.status.value,
    }
    return [key for key, value in expected.items() if key in actual and actual[key] not in (value, "Unknown")]


def classify_entry(entry: CorpusEntry, cfg: RunConfig) -> dict:
    """Classify one corpus term; failures become an ``error`` column."""
    row = {"line": entry.line, "term": entry.text, "error": ""}
    try:
        report = _classify(parse_term(entry.text), cfg)
    except (LmuError, RecursionError) as e:
        logger.warning(f"Corpus line {entry.line} failed: {e}")
        row["error"] = str(e)
        return row
    for key, label in classify_rows(report):
        row[key] = label
    row["mismatch"] = ",".join(_expected_matches(entry.expected, report))
    row["disagreement"] = ",".join(report.disagreements)
    return row


def _classify_entry_task(args: tuple[CorpusEntry, RunConfig]) -> dict:
    return classify_entry(*args)


def run_corpus(cfg: RunConfig) -> pd.DataFrame:
    entries = load_corpus(cfg.files[0])
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            rows = list(pool.map(_classify_entry_task, [(e, cfg) for e in entries]))
    else:
        rows = [classify_entry(e, cfg) for e in entries]
    return pd.DataFrame(rows).sort_values("line").reset_index(drop=True)


def cmd_corpus_run(cfg: RunConfig) -> int:
    frame = run_corpus(cfg).fillna("")
    verdict_columns = [label for _, label in CLASSIFY_FIELDS]
    verdicts = {
        row["term"]: {c: row.get(c, "") for c in verdict_columns}
        for row in frame.to_dict(orient="records")
    }
    changed = get_changed_verdicts(verdicts, load_last_run(cfg.last_run_file, cfg.state_dir))
    save_last_run(verdicts, cfg.last_run_file, cfg.state_dir)

    disagreements = int((frame.get("disagreement", pd.Series(dtype=str)) != "").sum())
    mismatches = int((frame.get("mismatch", pd.Series(dtype=str)) != "").sum())
    errors = int((frame["error"] != "").sum())
    if cfg.format == "json":
        data = {
            "rows": json.loads(frame.to_json(orient="records")),
            "changed": changed,
            "disagreements": disagreements,
            "mismatches": mismatches,
            "errors": errors,
        }
        emit(cfg, "", data)
    else:
        lines = [results_table(frame), ""]
        lines.append(f"Terms: {len(frame)}  disagreements: {disagreements}  mismatches: {mismatches}  errors: {errors}")
        if changed:
            lines.append("Changed since last run: " + ", ".join(changed))
        print("\n".join(lines))
    if disagreements:
        return EXIT_DISAGREEMENT
    return EXIT_NEGATIVE if mismatches or errors else EXIT_OK


def cmd_corpus_props(cfg: RunConfig) -> int:
    frame = run_properties(cfg.count, 0 if cfg.seed is None else cfg.seed)
    summary = summarize_results(frame)
    failed = frame[frame["ok"] == False]  # noqa: E712
    if cfg.format == "json":
        emit(cfg, "", {"summary": json.loads(summary.to_json(orient="records")),
                       "failures": json.loads(failed.to_json(orient="records"))})
    else:
        lines = [results_table(summary)]
        if not failed.empty:
            lines += ["", styled("FAILURES", False, cfg.color), results_table(failed)]
        print("\n".join(lines))
    return EXIT_NEGATIVE if not failed.empty else EXIT_OK


COMMANDS = {
    "parse": cmd_parse,
    "reduce": cmd_reduce,
    "classify": cmd_classify,
    "approx": cmd_approx,
    "join": cmd_join,
    "subtype": cmd_subtype,
    "check": cmd_check,
    "infer": cmd_infer,
    "corpus-run": cmd_corpus_run,
    "corpus-props": cmd_corpus_props,
}


def run(argv: Optional[list[str]] = None) -> int:
    """Parse arguments, dispatch, and map errors to exit codes."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_MALFORMED if e.code else EXIT_OK

    config = load_config(args.config)
    configure_logging(get_log_level(config), args.verbose)
    try:
        cfg = resolve_run_config(args, config)
        return COMMANDS[cfg.command](cfg)
    except (TermSyntaxError, ConfigError, LmuError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_MALFORMED
    except RecursionError:
        logger.error("Term grew too deep to process; lower --fuel")
        return EXIT_FUEL


def main():
    """Main entry point for the workbench."""
    sys.exit(run())


if __name__ == "__main__":
    main()
