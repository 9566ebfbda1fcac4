"""Command-line entry point: ``masvscan scan|permissions|replay``.

Exit codes: 0 no violations, 1 at least one violation, 2 at least one Set A
artifact, scan error or schema mismatch, 3 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import tempfile
from pathlib import Path
from typing import Sequence

from . import __version__
from .checks import CheckConfig, load_config
from .checks.model import Category
from .errors import ConfigError, SchemaMismatch
from .pipeline import DEFAULT_TIMEOUT, ScanReport, SetLabel, scan_corpus
from .report import (
    SCHEMA_VERSION,
    VerdictMatrix,
    aggregate,
    import_matrix,
    import_permissions,
    permission_matrix,
    render_aggregate,
    render_permissions,
    render_svg,
    render_tables,
    replay_resource,
)

EXIT_CLEAN, EXIT_VIOLATION, EXIT_FAILURE, EXIT_USAGE = 0, 1, 2, 3
ARTIFACT_SUFFIXES = (".apk", ".aar", ".xapk")
FORMATS = ("ascii", "csv", "json", "svg")
_EXT = {"ascii": "txt", "csv": "csv", "json": "json", "svg": "svg"}

log = logging.getLogger("masvscan")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse would exit 2, which we reserve for failures
        raise UsageError(message)


def atomic_write(path: Path, data: str | bytes) -> None:
    """Write via a temporary sibling and rename, so readers never see a partial file."""
    path.parent.mkdir(parents=True, exist_ok=True)
    raw = data.encode("utf-8") if isinstance(data, str) else data
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(raw)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def _positive_int(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return n


def _positive_float(text: str) -> float:
    try:
        n = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not n > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return n


def _categories(text: str) -> tuple[Category, ...]:
    out = []
    for part in text.split(","):
        name = part.strip().upper()
        if not name:
            continue
        try:
            out.append(Category(name))
        except ValueError:
            raise argparse.ArgumentTypeError(f"unknown check category {part.strip()!r} (use ds, crypto, tls, plat)") from None
    if not out:
        raise argparse.ArgumentTypeError("no categories given")
    return tuple(dict.fromkeys(out))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="masvscan", description="Static MASVS property scanner for APK, XAPK and AAR files.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    common = _Parser(add_help=False)
    common.add_argument("--out", metavar="DIR", type=Path, help="write result files here instead of standard output")
    common.add_argument("--format", choices=FORMATS, default="json", help="output format (default json)")
    common.add_argument("-v", "--verbose", action="count", default=0, help="more logging (repeatable)")

    scanning = _Parser(add_help=False)
    scanning.add_argument("inputs", nargs="*", type=Path, help="artifacts or directories holding them")
    scanning.add_argument("--jobs", type=_positive_int, default=1, metavar="N", help="artifacts scanned in parallel")
    scanning.add_argument("--config", metavar="FILE", help="check configuration (INI); defaults to $MASVSCAN_CONFIG")
    scanning.add_argument("--timeout", type=_positive_float, default=DEFAULT_TIMEOUT, metavar="SECS",
                          help=f"per-artifact time budget (default {DEFAULT_TIMEOUT:g})")
    scanning.add_argument("--checks", type=_categories, metavar="ds,crypto,tls,plat",
                          help="categories to evaluate; others are reported as '-'")

    sub.add_parser("scan", parents=[common, scanning], help="scan artifacts and emit verdicts")
    sub.add_parser("permissions", parents=[common, scanning], help="emit the requested-permission matrix")
    replay = sub.add_parser("replay", parents=[common], help="aggregate a verdict or permission table")
    replay.add_argument("document", nargs="?", type=Path, help="CSV or JSON table produced by scan (or typed by hand)")
    replay.add_argument("--bundled", choices=("verdicts", "permissions"),
                        help="use the bundled transcription of the published tables instead of a file")
    return parser


def _expand(inputs: Sequence[Path]) -> list[Path]:
    if not inputs:
        raise UsageError("no input artifacts given")
    out: list[Path] = []
    for p in inputs:
        if p.is_dir():
            found = sorted(f for f in p.rglob("*") if f.is_file() and f.suffix.lower() in ARTIFACT_SUFFIXES)
            if not found:
                raise UsageError(f"{p}: directory holds no .apk, .xapk or .aar files")
            out.extend(found)
        elif p.is_file():
            out.append(p)
        else:
            raise UsageError(f"{p}: no such file or directory")
    return out


def _unique_ids(reports: list[ScanReport]) -> list[ScanReport]:
    """Give reports with clashing file stems distinct app ids (name, name-2, ...)."""
    import dataclasses

    seen: dict[str, int] = {}
    taken = {r.app_id for r in reports}
    out = []
    for r in reports:
        n = seen.get(r.app_id, 0) + 1
        seen[r.app_id] = n
        if n == 1:
            out.append(r)
            continue
        new = f"{r.app_id}-{n}"
        while new in taken:
            n += 1
            new = f"{r.app_id}-{n}"
        taken.add(new)
        out.append(dataclasses.replace(r, app_id=new))
    return out


def _load_config(path: str | None) -> CheckConfig:
    try:
        return load_config(path)
    except ConfigError as exc:
        raise UsageError(str(exc)) from None


def _run_scan(args: argparse.Namespace, categories) -> list[ScanReport]:
    paths = _expand(args.inputs)
    config = _load_config(args.config)
    return _unique_ids(scan_corpus(paths, args.jobs, config, args.timeout, categories))


def _report_doc(report: ScanReport) -> str:
    doc = {"schema_version": SCHEMA_VERSION, **report.to_json()}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _emit(args: argparse.Namespace, name: str, text: str) -> None:
    if args.out is None:
        sys.stdout.write(text)
    else:
        atomic_write(args.out / f"{name}.{_EXT[args.format]}", text)


def _scan_exit(reports: list[ScanReport]) -> int:
    if any(r.set_label is SetLabel.A for r in reports):
        return EXIT_FAILURE
    return EXIT_VIOLATION if any(r.violation_count for r in reports) else EXIT_CLEAN


def cmd_scan(args: argparse.Namespace) -> int:
    reports = _run_scan(args, args.checks)
    matrix = VerdictMatrix.from_reports(reports)
    for r in reports:
        log.info("%s: set %s, %d violation(s)", r.app_id, r.set_label.value, r.violation_count)
        for note in r.degradations:
            log.info("%s: %s", r.app_id, note)
    if args.out is not None:
        for r in reports:
            atomic_write(args.out / "reports" / f"{r.app_id}.json", _report_doc(r))
    if args.format == "json":
        doc = {
            "schema_version": SCHEMA_VERSION,
            "reports": [r.to_json() for r in reports],
            "matrix": json.loads(render_tables(matrix, "json")),
        }
        _emit(args, "matrix", json.dumps(doc, indent=2, sort_keys=True) + "\n")
    elif args.format == "svg":
        _emit(args, "matrix", render_svg(aggregate(matrix)))
    else:
        _emit(args, "matrix", render_tables(matrix, args.format))
    return _scan_exit(reports)


def cmd_permissions(args: argparse.Namespace) -> int:
    if args.format == "svg":
        raise UsageError("the permission matrix has no svg form")
    # checks are irrelevant here; selecting no category keeps the scan to parsing
    reports = _run_scan(args, ())
    _emit(args, "permissions", render_permissions(permission_matrix(reports), args.format))
    return EXIT_FAILURE if any(r.set_label is SetLabel.A for r in reports) else EXIT_CLEAN


def cmd_replay(args: argparse.Namespace) -> int:
    if (args.document is None) == (args.bundled is None):
        raise UsageError("give either a document or --bundled")
    if args.bundled:
        text = replay_resource(f"{args.bundled}.csv")
    else:
        try:
            text = args.document.read_text(encoding="utf-8-sig")
        except FileNotFoundError:
            raise UsageError(f"{args.document}: no such file") from None
        except (OSError, UnicodeDecodeError) as exc:
            log.error("cannot read %s: %s", args.document, exc)
            return EXIT_FAILURE
    first = text.lstrip().split(",", 1)[0].strip().lower()
    if first == "permission":
        if args.format == "svg":
            raise UsageError("the permission matrix has no svg form")
        _emit(args, "permissions", render_permissions(import_permissions(text), args.format))
        return EXIT_CLEAN
    matrix = import_matrix(text)
    _emit(args, "aggregate", render_aggregate(aggregate(matrix), args.format))
    return EXIT_CLEAN


COMMANDS = {"scan": cmd_scan, "permissions": cmd_permissions, "replay": cmd_replay}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a command is required (scan, permissions or replay)")
        logging.basicConfig(
            level=logging.WARNING - 10 * min(args.verbose, 2),
            format="%(levelname)s %(name)s: %(message)s",
            stream=sys.stderr,
        )
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"masvscan: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SchemaMismatch as exc:
        print(f"masvscan: {exc.kind}: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except OSError as exc:
        print(f"masvscan: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
