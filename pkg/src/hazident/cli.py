"""Command-line interface.

Subcommands: validate, generate, stats, export, assess, serve.

Exit codes group failures by who has to act:
  0  success
  2  configuration problems (syntax, schema, references, invariants)
  3  storage problems (missing or unreadable runs, I/O)
  4  review-rule violations (unknown event, dropped event, missing rationale)
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from hazident.events import generate_events, relevant_events, statistics
from hazident.model import (
    AnalysisConfig,
    ConfigError,
    errors_of,
    parse_config,
    validate_config,
)
from hazident.report import (
    assessments_to_csv,
    events_to_csv,
    render_markdown,
    render_statistics,
)
from hazident.store import (
    AssessmentError,
    RunStore,
    StoreError,
    export_sql,
    run_id_for,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_STORAGE = 3
EXIT_RULE = 4


class CliFailure(Exception):
    def __init__(self, exit_code: int, message: str):
        super().__init__(message)
        self.exit_code = exit_code


def _read_config(path: str) -> AnalysisConfig:
    config_path = Path(path)
    if not config_path.is_file():
        raise CliFailure(EXIT_CONFIG, f"config file not found: {path}")
    try:
        return parse_config(config_path.read_text(encoding="utf-8"))
    except ConfigError as exc:
        raise CliFailure(EXIT_CONFIG, f"{path}: {exc}") from None


def _checked_config(path: str, *, print_findings: bool = False) -> AnalysisConfig:
    config = _read_config(path)
    findings = validate_config(config)
    errors = errors_of(findings)
    for finding in findings:
        if print_findings or finding.severity == "error":
            print(finding, file=sys.stderr if finding.severity == "error" else sys.stdout)
    if errors:
        raise CliFailure(EXIT_CONFIG, f"{path}: {len(errors)} validation error(s)")
    return config


def cmd_validate(args: argparse.Namespace) -> int:
    config = _read_config(args.config)
    findings = validate_config(config)
    for finding in findings:
        print(finding)
    errors = errors_of(findings)
    warnings = len(findings) - len(errors)
    if errors:
        print(f"invalid: {len(errors)} error(s), {warnings} warning(s)")
        return EXIT_CONFIG
    print(f"ok: 0 errors, {warnings} warning(s)")
    return EXIT_OK


def cmd_generate(args: argparse.Namespace) -> int:
    config = _checked_config(args.config)
    start = time.perf_counter()
    events = generate_events(config, nominal=args.nominal)
    elapsed = time.perf_counter() - start
    store = RunStore(args.store)
    try:
        run_id = store.save_run(config, events)
    except OSError as exc:
        raise CliFailure(EXIT_STORAGE, f"cannot write run: {exc}") from None
    relevant = len(relevant_events(events))
    print(f"run {run_id}")
    print(f"{len(events)} events ({relevant} relevant) in {elapsed:.2f}s -> {store.run_path(run_id)}")
    return EXIT_OK


def cmd_stats(args: argparse.Namespace) -> int:
    config = _checked_config(args.config)
    events = generate_events(config)
    stats = statistics(config, events)
    hazardous_by_mode = None
    document = config.source_text or ""
    store = RunStore(args.store)
    run_path = store.run_path(run_id_for(document))
    if run_path.is_dir():
        try:
            hazardous_by_mode = store.open_run(run_path.name).hazardous_by_mode()
        except StoreError:
            hazardous_by_mode = None  # stats still render without review counts
    sys.stdout.write(render_statistics(config, stats, hazardous_by_mode=hazardous_by_mode))
    return EXIT_OK


def cmd_export(args: argparse.Namespace) -> int:
    store = RunStore(args.store)
    try:
        run = store.open_run(args.run)
    except StoreError as exc:
        raise CliFailure(EXIT_STORAGE, str(exc)) from None
    out_dir = Path(args.out)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CliFailure(EXIT_STORAGE, f"cannot create output directory: {exc}") from None
    formats = {"csv", "sql", "md"} if args.format == "all" else {args.format}
    stats = statistics(run.config, run.events)
    written: list[Path] = []

    def emit(name: str, text: str) -> None:
        target = out_dir / name
        target.write_text(text, encoding="utf-8")
        written.append(target)

    if "csv" in formats:
        emit("events.csv", events_to_csv(run.config, run.events))
        emit("relevant.csv", events_to_csv(run.config, relevant_events(run.events)))
        emit("assessments.csv", assessments_to_csv(run.assessment_log()))
    if "sql" in formats:
        emit("events.sql", export_sql(run))
    if "md" in formats:
        progress = run.progress()
        sample = relevant_events(run.events)[:2]
        emit(
            "report.md",
            render_markdown(
                run.config,
                stats,
                hazardous_by_mode=run.hazardous_by_mode(),
                progress=progress,
                sample_events=sample,
            ),
        )
    for path in written:
        print(path)
    return EXIT_OK


def cmd_assess(args: argparse.Namespace) -> int:
    store = RunStore(args.store)
    try:
        run = store.open_run(args.run)
    except StoreError as exc:
        raise CliFailure(EXIT_STORAGE, str(exc)) from None
    try:
        assessment = run.append_assessment(
            args.event, args.status, rationale=args.rationale, assessor=args.assessor
        )
    except AssessmentError as exc:
        raise CliFailure(EXIT_RULE, str(exc)) from None
    print(f"#{assessment.seq} {assessment.event_id} -> {assessment.status.value}")
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from hazident.api import create_app

    ui_dir = Path(args.ui) if args.ui else None
    if ui_dir is None:
        default_ui = Path("frontend") / "dist"
        if (default_ui / "index.html").is_file():
            ui_dir = default_ui
    app = create_app(Path(args.store), ui_dir=ui_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hazident",
        description="Identify potential hazardous events from a machine-readable item definition.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="check a config document and report findings")
    p_validate.add_argument("config", help="path to the JSON config document")
    p_validate.set_defaults(func=cmd_validate)

    p_generate = sub.add_parser("generate", help="generate the event stream and store it as a run")
    p_generate.add_argument("config")
    p_generate.add_argument("--store", default="runs", help="run store directory (default: runs)")
    p_generate.add_argument(
        "--nominal",
        action=argparse.BooleanOptionalAction,
        default=None,
        help="override metadata.analysis.nominal_events",
    )
    p_generate.set_defaults(func=cmd_generate)

    p_stats = sub.add_parser("stats", help="print catalog and per-mode event statistics")
    p_stats.add_argument("config")
    p_stats.add_argument("--store", default="runs", help="include review counts from this store if the run exists")
    p_stats.set_defaults(func=cmd_stats)

    p_export = sub.add_parser("export", help="write CSV/SQL/markdown artifacts for a stored run")
    p_export.add_argument("--store", default="runs")
    p_export.add_argument("--run", required=True, help="run id (sha-256 of the config document)")
    p_export.add_argument("--out", required=True, help="output directory")
    p_export.add_argument("--format", choices=["all", "csv", "sql", "md"], default="all")
    p_export.set_defaults(func=cmd_export)

    p_assess = sub.add_parser("assess", help="append one review verdict to a run (non-interactive)")
    p_assess.add_argument("--store", default="runs")
    p_assess.add_argument("--run", required=True)
    p_assess.add_argument("event", help="event id")
    p_assess.add_argument("status", help="hazardous | not_hazardous | unsure")
    p_assess.add_argument("--rationale", default="", help="required for hazardous verdicts")
    p_assess.add_argument("--assessor", default="")
    p_assess.set_defaults(func=cmd_assess)

    p_serve = sub.add_parser("serve", help="serve the review API (and UI when built)")
    p_serve.add_argument("--store", default="runs")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--ui", help="directory with the built review UI (default: frontend/dist if present)")
    p_serve.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliFailure as failure:
        print(f"error: {failure}", file=sys.stderr)
        return failure.exit_code


if __name__ == "__main__":
    sys.exit(main())
