"""Verdict tables, permission matrices, aggregates and chart output.

CSV verdict documents hold one block per category group (DS, CRYPTO/TLS,
PLAT), separated by a blank line. Each block starts with an ``app`` header
followed by check ids in display order. Importers also accept a single block
or any subset of columns, as long as every block lists the same apps in the
same order.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence
from xml.sax.saxutils import escape

from .checks.model import DISPLAY_ORDER, Category, CheckId, State, Verdict
from .errors import SchemaMismatch

SCHEMA_VERSION = 1
PERMISSION_PREFIX = "android.permission."

# (title, categories) for the three rendered sections
SECTIONS: tuple[tuple[str, tuple[Category, ...]], ...] = (
    ("Data storage and privacy (DS1-DS12)", (Category.DS,)),
    ("Cryptography and network communication (CRYPTO1-TLS4)", (Category.CRYPTO, Category.TLS)),
    ("Platform interaction (PLAT1-PLAT8)", (Category.PLAT,)),
)
_DISPLAY_POS = {c: i for i, c in enumerate(DISPLAY_ORDER)}


# -- verdict matrix ------------------------------------------------------------


@dataclass(frozen=True)
class VerdictMatrix:
    apps: tuple[str, ...]
    columns: tuple[CheckId, ...]
    cells: tuple[tuple[Verdict, ...], ...]

    def __post_init__(self) -> None:
        if len(self.cells) != len(self.apps):
            raise ValueError("one row of cells per app is required")
        if any(len(row) != len(self.columns) for row in self.cells):
            raise ValueError("matrix is not rectangular")
        if len(set(self.apps)) != len(self.apps):
            raise ValueError("app ids must be unique")
        for app in self.apps:
            if not app or app != app.strip() or any(c in app for c in "\r\n"):
                raise ValueError(f"invalid app id {app!r}")
        if list(self.columns) != sorted(set(self.columns), key=_DISPLAY_POS.__getitem__):
            raise ValueError("columns must be unique and in display order")

    @classmethod
    def from_rows(cls, rows: Mapping[str, Mapping[CheckId, Verdict]] | Iterable[tuple[str, Mapping[CheckId, Verdict]]],
                  columns: Iterable[CheckId] | None = None) -> VerdictMatrix:
        items = list(rows.items()) if isinstance(rows, Mapping) else list(rows)
        if columns is None:
            used = {c for _, row in items for c in row}
            columns = [c for c in DISPLAY_ORDER if c in used]
        cols = tuple(sorted(set(columns), key=_DISPLAY_POS.__getitem__))
        cells = tuple(tuple(row.get(c, Verdict(State.UNVERIFIABLE)) for c in cols) for _, row in items)
        return cls(tuple(a for a, _ in items), cols, cells)

    @classmethod
    def from_reports(cls, reports: Iterable) -> VerdictMatrix:
        """Rows for every report that produced findings; Set A reports carry none and are skipped."""
        rows = [(r.app_id, {f.check: f.verdict for f in r.findings}) for r in reports if r.findings]
        return cls.from_rows(rows, DISPLAY_ORDER)

    def row(self, app: str) -> dict[CheckId, Verdict]:
        return dict(zip(self.columns, self.cells[self.apps.index(app)]))

    def cell(self, app: str, check: CheckId) -> Verdict:
        return self.cells[self.apps.index(app)][self.columns.index(check)]

    def sections(self) -> list[tuple[str, tuple[CheckId, ...]]]:
        out = []
        for title, cats in SECTIONS:
            cols = tuple(c for c in self.columns if c.category in cats)
            if cols:
                out.append((title, cols))
        return out

    def _project(self, cols: Sequence[CheckId]) -> list[list[Verdict]]:
        idx = [self.columns.index(c) for c in cols]
        return [[row[i] for i in idx] for row in self.cells]


def render_tables(matrix: VerdictMatrix, fmt: str = "ascii") -> str:
    if fmt == "ascii":
        return _render_ascii(matrix)
    if fmt == "csv":
        return _render_csv(matrix)
    if fmt == "json":
        return _render_json(matrix)
    raise ValueError(f"unsupported table format {fmt!r}")


def _render_ascii(matrix: VerdictMatrix) -> str:
    parts = []
    for title, cols in matrix.sections():
        header = ["App"] + [c.value for c in cols]
        body = [[app] + [v.glyph for v in row] for app, row in zip(matrix.apps, matrix._project(cols))]
        widths = [max(len(r[i]) for r in [header] + body) for i in range(len(header))]
        rule = "+" + "+".join("-" * (w + 2) for w in widths) + "+"

        def line(cells: list[str]) -> str:
            return "| " + " | ".join(c.ljust(w) for c, w in zip(cells, widths)) + " |"

        parts.append("\n".join([title, rule, line(header), rule] + [line(r) for r in body] + [rule]))
    return "\n\n".join(parts) + "\n"


def _render_csv(matrix: VerdictMatrix) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for n, (_, cols) in enumerate(matrix.sections()):
        if n:
            w.writerow([])
        w.writerow(["app"] + [c.value for c in cols])
        for app, row in zip(matrix.apps, matrix._project(cols)):
            w.writerow([app] + [v.glyph for v in row])
    return buf.getvalue()


def _render_json(matrix: VerdictMatrix) -> str:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "apps": list(matrix.apps),
        "sections": [
            {
                "title": title,
                "columns": [c.value for c in cols],
                "rows": [
                    {"app": app, "verdicts": [v.to_json() for v in row]}
                    for app, row in zip(matrix.apps, matrix._project(cols))
                ],
            }
            for title, cols in matrix.sections()
        ],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


# -- import --------------------------------------------------------------------


def import_matrix(document: str | bytes) -> VerdictMatrix:
    """Parse a CSV or JSON verdict document produced by :func:`render_tables` (or typed by hand)."""
    if isinstance(document, bytes):
        try:
            document = document.decode("utf-8-sig")
        except UnicodeDecodeError as exc:
            raise SchemaMismatch(f"document is not UTF-8: {exc}") from None
    text = document.lstrip("﻿")
    if not text.strip():
        raise SchemaMismatch("empty document")
    if text.lstrip().startswith("{"):
        return _import_json(text)
    return _import_csv(text)


def _merge_blocks(blocks: list[tuple[int, list[CheckId], list[tuple[int, str, list[Verdict]]]]]) -> VerdictMatrix:
    seen: dict[CheckId, int] = {}
    apps: list[str] | None = None
    rows: dict[str, dict[CheckId, Verdict]] = {}
    for line, cols, body in blocks:
        for c in cols:
            if c in seen:
                raise SchemaMismatch(f"line {line}: column {c.value} already defined on line {seen[c]}")
            seen[c] = line
        names = [a for _, a, _ in body]
        if len(set(names)) != len(names):
            dup = next(a for a in names if names.count(a) > 1)
            raise SchemaMismatch(f"block at line {line}: app {dup!r} appears twice")
        if apps is None:
            apps = names
        elif names != apps:
            raise SchemaMismatch(f"block at line {line}: app rows {names} differ from the first block's {apps}")
        for _, app, verdicts in body:
            rows.setdefault(app, {}).update(zip(cols, verdicts))
    assert apps is not None
    return VerdictMatrix.from_rows([(a, rows.get(a, {})) for a in apps], seen)


def _parse_header(cells: list[str], where: str) -> list[CheckId]:
    if not cells or cells[0].strip().lower() not in ("app", "app no.", "app no"):
        raise SchemaMismatch(f"{where}: header must start with 'app'")
    cols = []
    for i, name in enumerate(cells[1:], start=2):
        try:
            cols.append(CheckId.parse(name.strip()))
        except ValueError:
            raise SchemaMismatch(f"{where}, column {i}: unknown check id {name!r}") from None
    if not cols:
        raise SchemaMismatch(f"{where}: header lists no checks")
    return cols


def _import_csv(text: str) -> VerdictMatrix:
    reader = csv.reader(io.StringIO(text))
    blocks: list[tuple[int, list[CheckId], list]] = []
    current: tuple[int, list[CheckId], list] | None = None
    try:
        for cells in reader:
            line = reader.line_num
            if not any(c.strip() for c in cells):
                current = None
                continue
            if current is None:
                current = (line, _parse_header(cells, f"line {line}"), [])
                blocks.append(current)
                continue
            cols = current[1]
            if len(cells) != len(cols) + 1:
                raise SchemaMismatch(f"line {line}: expected {len(cols) + 1} cells, found {len(cells)}")
            app = cells[0].strip()
            if not app:
                raise SchemaMismatch(f"line {line}: empty app id")
            verdicts = []
            for col, raw in zip(cols, cells[1:]):
                try:
                    verdicts.append(Verdict.from_glyph(raw))
                except ValueError:
                    raise SchemaMismatch(f"line {line} (app {app}), column {col.value}: unknown verdict glyph {raw!r}") from None
            current[2].append((line, app, verdicts))
    except csv.Error as exc:
        raise SchemaMismatch(f"line {reader.line_num}: {exc}") from None
    if not blocks:
        raise SchemaMismatch("no table found")
    return _merge_blocks(blocks)


def _import_json(text: str) -> VerdictMatrix:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaMismatch(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise SchemaMismatch("top level must be an object")
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise SchemaMismatch(f"unsupported schema_version {doc.get('schema_version')!r}")
    sections = doc.get("sections")
    if not isinstance(sections, list) or not sections:
        apps = doc.get("apps")
        if isinstance(apps, list) and sections == []:
            return VerdictMatrix.from_rows([(str(a), {}) for a in apps], ())
        raise SchemaMismatch("'sections' must be a non-empty list")
    blocks = []
    for s_idx, sec in enumerate(sections):
        where = f"sections[{s_idx}]"
        if not isinstance(sec, dict) or not isinstance(sec.get("columns"), list) or not isinstance(sec.get("rows"), list):
            raise SchemaMismatch(f"{where}: needs 'columns' and 'rows' lists")
        cols = _parse_header(["app"] + [str(c) for c in sec["columns"]], where)
        body = []
        for r_idx, row in enumerate(sec["rows"]):
            rwhere = f"{where}.rows[{r_idx}]"
            if not isinstance(row, dict) or not isinstance(row.get("app"), str) or not isinstance(row.get("verdicts"), list):
                raise SchemaMismatch(f"{rwhere}: needs 'app' string and 'verdicts' list")
            if len(row["verdicts"]) != len(cols):
                raise SchemaMismatch(f"{rwhere} (app {row['app']}): expected {len(cols)} verdicts, found {len(row['verdicts'])}")
            verdicts = []
            for col, obj in zip(cols, row["verdicts"]):
                try:
                    verdicts.append(Verdict.from_json(obj))
                except ValueError as exc:
                    raise SchemaMismatch(f"{rwhere} (app {row['app']}), column {col.value}: {exc}") from None
            body.append((r_idx, row["app"], verdicts))
        blocks.append((s_idx, cols, body))
    try:
        return _merge_blocks(blocks)
    except ValueError as exc:
        raise SchemaMismatch(str(exc)) from None


# -- aggregates ----------------------------------------------------------------


@dataclass(frozen=True)
class AggregateStats:
    per_app_violation_count: dict[str, int]
    per_category_app_count: dict[Category, int]
    per_category_apps: dict[Category, tuple[str, ...]] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "per_app_violation_count": dict(self.per_app_violation_count),
            "per_category_app_count": {c.value: n for c, n in self.per_category_app_count.items()},
            "per_category_apps": {c.value: list(a) for c, a in self.per_category_apps.items()},
        }


def aggregate(matrix: VerdictMatrix) -> AggregateStats:
    per_app = {
        app: sum(1 for v in row if v.state is State.VIOLATION) for app, row in zip(matrix.apps, matrix.cells)
    }
    per_cat_apps: dict[Category, tuple[str, ...]] = {}
    for cat in Category:
        idx = [i for i, c in enumerate(matrix.columns) if c.category is cat]
        per_cat_apps[cat] = tuple(
            app for app, row in zip(matrix.apps, matrix.cells) if any(row[i].state is State.VIOLATION for i in idx)
        )
    return AggregateStats(per_app, {c: len(a) for c, a in per_cat_apps.items()}, per_cat_apps)


def render_aggregate(stats: AggregateStats, fmt: str = "json") -> str:
    if fmt == "json":
        return json.dumps(stats.to_json(), indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["series", "key", "value"])
        for app, n in stats.per_app_violation_count.items():
            w.writerow(["violations_per_app", app, n])
        for cat, n in stats.per_category_app_count.items():
            w.writerow(["apps_per_category", cat.value, n])
        return buf.getvalue()
    if fmt == "ascii":
        lines = ["Violations per app"]
        width = max([len(a) for a in stats.per_app_violation_count] + [len(c.value) for c in stats.per_category_app_count])
        for app, n in stats.per_app_violation_count.items():
            lines.append(f"  {app.ljust(width)} {str(n).rjust(2)} {'#' * n}")
        lines.append("Apps with a violation per category")
        for cat, n in stats.per_category_app_count.items():
            lines.append(f"  {cat.value.ljust(width)} {str(n).rjust(2)} {'#' * n}")
        return "\n".join(lines) + "\n"
    if fmt == "svg":
        return render_svg(stats)
    raise ValueError(f"unsupported aggregate format {fmt!r}")


def _bars(title: str, series: list[tuple[str, int]], top: int) -> tuple[list[str], int]:
    bar_w, gap, plot_h, left = 28, 10, 160, 40
    width = left + max(1, len(series)) * (bar_w + gap) + gap
    peak = max([n for _, n in series] + [1])
    out = [f'<text x="{left}" y="{top + 16}" font-size="14" font-weight="bold">{escape(title)}</text>']
    base = top + 30 + plot_h
    out.append(f'<line x1="{left}" y1="{base}" x2="{width}" y2="{base}" stroke="black"/>')
    for i, (label, n) in enumerate(series):
        h = round(plot_h * n / peak)
        x = left + gap + i * (bar_w + gap)
        out.append(f'<rect x="{x}" y="{base - h}" width="{bar_w}" height="{h}" fill="#c0392b"><title>{escape(label)}: {n}</title></rect>')
        out.append(f'<text x="{x + bar_w // 2}" y="{base - h - 4}" font-size="11" text-anchor="middle">{n}</text>')
        out.append(f'<text x="{x + bar_w // 2}" y="{base + 14}" font-size="11" text-anchor="middle">{escape(label)}</text>')
    return out, width


def render_svg(stats: AggregateStats) -> str:
    """Two bar charts: violations per app, then apps with a violation per category."""
    first, w1 = _bars("Violations per application", list(stats.per_app_violation_count.items()), 0)
    second, w2 = _bars("Applications with a violation per category",
                       [(c.value, n) for c, n in stats.per_category_app_count.items()], 230)
    width, height = max(w1, w2, 320), 460
    body = "\n  ".join(first + second)
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif">\n  {body}\n</svg>\n'
    )


# -- permissions ---------------------------------------------------------------


def short_permission(name: str) -> str:
    return name[len(PERMISSION_PREFIX):] if name.startswith(PERMISSION_PREFIX) else name


@dataclass(frozen=True)
class PermissionMatrix:
    apps: tuple[str, ...]
    permissions: tuple[str, ...]
    cells: tuple[tuple[bool, ...], ...]  # one row per permission

    @classmethod
    def from_sets(cls, requested: Sequence[tuple[str, Iterable[str]]]) -> PermissionMatrix:
        """Rows sorted by how many apps request the permission (descending), then by name."""
        apps = tuple(a for a, _ in requested)
        sets = [set(p) for _, p in requested]
        names = set().union(*sets) if sets else set()
        freq = {n: sum(n in s for s in sets) for n in names}
        order = tuple(sorted(names, key=lambda n: (-freq[n], n)))
        return cls(apps, order, tuple(tuple(n in s for s in sets) for n in order))

    def row(self, permission: str) -> dict[str, bool]:
        return dict(zip(self.apps, self.cells[self.permissions.index(permission)]))


def permission_matrix(reports: Iterable) -> PermissionMatrix:
    """Requested permissions (short names for platform ones) per app, Set A reports excluded."""
    return PermissionMatrix.from_sets(
        [(r.app_id, {short_permission(p.name) for p in r.permissions}) for r in reports if r.set_label.value != "A"]
    )


def render_permissions(pm: PermissionMatrix, fmt: str = "csv") -> str:
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["permission"] + list(pm.apps))
        for name, row in zip(pm.permissions, pm.cells):
            w.writerow([name] + ["x" if b else "" for b in row])
        return buf.getvalue()
    if fmt == "json":
        doc = {
            "schema_version": SCHEMA_VERSION,
            "apps": list(pm.apps),
            "permissions": [{"name": n, "apps": [a for a, b in zip(pm.apps, row) if b]} for n, row in zip(pm.permissions, pm.cells)],
        }
        return json.dumps(doc, indent=2) + "\n"
    if fmt == "ascii":
        width = max([len(p) for p in pm.permissions] + [10])
        cols = [max(len(a), 1) for a in pm.apps]
        lines = ["Permission".ljust(width) + " | " + " | ".join(pm.apps)]
        for name, row in zip(pm.permissions, pm.cells):
            lines.append(name.ljust(width) + " | " + " | ".join(("x" if b else " ").center(w) for b, w in zip(row, cols)))
        return "\n".join(lines) + "\n"
    raise ValueError(f"unsupported permission format {fmt!r}")


def import_permissions(document: str) -> PermissionMatrix:
    """Inverse of the CSV permission rendering; a cell is true when it holds any non-blank mark."""
    rows = [r for r in csv.reader(io.StringIO(document.lstrip("﻿"))) if any(c.strip() for c in r)]
    if not rows:
        raise SchemaMismatch("empty document")
    header = [c.strip() for c in rows[0]]
    if not header or header[0].lower() != "permission" or len(header) < 2:
        raise SchemaMismatch("line 1: header must be 'permission' followed by app ids")
    apps = header[1:]
    sets: dict[str, set[str]] = {a: set() for a in apps}
    if len(sets) != len(apps):
        raise SchemaMismatch("line 1: duplicate app id")
    seen = set()
    for n, r in enumerate(rows[1:], start=2):
        if len(r) != len(header):
            raise SchemaMismatch(f"row {n}: expected {len(header)} cells, found {len(r)}")
        name = r[0].strip()
        if not name or name in seen:
            raise SchemaMismatch(f"row {n}: missing or duplicate permission name {name!r}")
        seen.add(name)
        for app, mark in zip(apps, r[1:]):
            if mark.strip():
                sets[app].add(name)
    pm = PermissionMatrix.from_sets([(a, sets[a]) for a in apps])
    missing = seen - set(pm.permissions)
    # permissions nobody requests still get a (all-false) row, placed last
    extra = tuple(sorted(missing))
    return PermissionMatrix(pm.apps, pm.permissions + extra, pm.cells + tuple(tuple(False for _ in apps) for _ in extra))


# -- replay data -----------------------------------------------------------------


def replay_resource(name: str) -> str:
    from importlib.resources import files

    return (files("masvscan.data") / "replay" / name).read_text(encoding="utf-8")
