"""Scan orchestration: container -> manifest -> bytecode -> checks, with Set A/B/C downgrades."""

from __future__ import annotations

import dataclasses
import logging
import os
import re
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable

from .axml import ManifestModel, PermissionDecl, parse_manifest
from .bytecode import parse_class_jar, parse_dex, salvage_dex
from .bytecode.model import CodeModel, name_entropy_note
from .checks import CheckConfig, Finding, Scope, run_all
from .checks.model import Category, State
from .container import ArtifactKind, PackageArtifact, open_artifact, read_entry
from .errors import IoFailure, NoSuchEntry, ScanError, ScanTimeout

log = logging.getLogger(__name__)

DEFAULT_TIMEOUT = 300.0
MANIFEST = "AndroidManifest.xml"


class SetLabel(str, Enum):
    A = "A"  # no manifest model could be built
    B = "B"  # manifest only or partial bytecode: platform-only scope
    C = "C"  # full scan


@dataclass(frozen=True)
class ScanReport:
    app_id: str
    artifact_kind: str
    set_label: SetLabel
    findings: tuple[Finding, ...] = ()
    permissions: tuple[PermissionDecl, ...] = ()
    degradations: tuple[str, ...] = ()
    wall_time: float = 0.0
    package_name: str | None = None

    @property
    def violation_count(self) -> int:
        return sum(1 for f in self.findings if f.verdict.state is State.VIOLATION)

    def to_json(self, include_timing: bool = False) -> dict:
        out = {
            "app_id": self.app_id,
            "package": self.package_name,
            "artifact_kind": self.artifact_kind,
            "set": self.set_label.value,
            "findings": [f.to_json() for f in self.findings],
            "permissions": [
                {"name": p.name, "dangerous": p.is_dangerous, "custom": p.is_custom} for p in self.permissions
            ],
            "degradations": list(self.degradations),
        }
        if include_timing:
            out["wall_time"] = round(self.wall_time, 6)
        return out


class Deadline:
    """Wall-clock budget checked cooperatively by the parsers."""

    def __init__(self, seconds: float | None) -> None:
        self.seconds = seconds
        self.expires = None if seconds is None else time.monotonic() + seconds

    def check(self) -> None:
        if self.expires is not None and time.monotonic() > self.expires:
            raise ScanTimeout(f"scan exceeded {self.seconds:g} s")


def _note(exc: BaseException, where: str = "") -> str:
    stage = getattr(exc, "stage", "internal")
    kind = exc.kind if isinstance(exc, ScanError) else type(exc).__name__
    prefix = f"{stage}: {kind}"
    return f"{prefix} ({where}): {exc}" if where else f"{prefix}: {exc}"


def _dex_order(name: str) -> tuple[int, str]:
    m = re.fullmatch(r"classes(\d*)\.dex", name)
    return (int(m.group(1) or 1) if m else 10**6, name)


def _dex_names(art: PackageArtifact) -> list[str]:
    names = [n for n in art.names() if "/" not in n and n.startswith("classes") and n.endswith(".dex")]
    return sorted(names, key=_dex_order)


def _merge_manifests(base: ManifestModel, others: list[ManifestModel]) -> ManifestModel:
    perms = list(base.permissions)
    comps = list(base.components)
    seen = {p.name for p in perms}
    for m in others:
        for p in m.permissions:
            if p.name not in seen:
                seen.add(p.name)
                perms.append(p)
        comps.extend(m.components)
    return dataclasses.replace(base, permissions=tuple(perms), components=tuple(comps))


@dataclass
class _Work:
    notes: list[str] = field(default_factory=list)
    partial: bool = False


def _parse_code_files(
    files: list[tuple[str, bytes | BaseException]], jar: bool, deadline: Deadline, work: _Work
) -> CodeModel:
    models = []
    for origin, (name, data) in enumerate(files):
        if isinstance(data, BaseException):
            work.partial = True
            work.notes.append(_note(data, name))
            models.append(CodeModel(complete=False, refs_complete=False, notes=[]))
            continue
        try:
            if jar:
                models.append(parse_class_jar(data, origin, name, strict=True, deadline=deadline))
            else:
                models.append(parse_dex(data, origin, name, deadline=deadline))
            continue
        except ScanTimeout:
            raise
        except ScanError as exc:
            work.partial = True
            work.notes.append(_note(exc, name))
        try:
            if jar:
                models.append(parse_class_jar(data, origin, name, strict=False, deadline=deadline))
            else:
                models.append(salvage_dex(data, origin, name, deadline=deadline))
        except ScanTimeout:
            raise
        except ScanError as exc:
            work.notes.append(_note(exc, f"{name} salvage"))
            models.append(CodeModel(complete=False, refs_complete=False))
    model = CodeModel.merge(models)
    ent = name_entropy_note(model.classes)
    if ent:
        model.notes.append(ent)
    return model


def _read(art: PackageArtifact, name: str) -> bytes | BaseException:
    try:
        return read_entry(art, name)
    except ScanError as exc:
        return exc


def scan(
    path: str | os.PathLike,
    config: CheckConfig | None = None,
    timeout: float | None = DEFAULT_TIMEOUT,
    categories: Iterable[Category] | None = None,
) -> ScanReport:
    """Scan one artifact. Only an unreadable path raises (IoFailure)."""
    started = time.perf_counter()
    config = config or CheckConfig()
    deadline = Deadline(timeout)
    app_id = Path(path).stem
    cats = tuple(categories) if categories is not None else None

    def finish(label: SetLabel, kind: str, notes: list[str], manifest: ManifestModel | None = None,
               findings: list[Finding] | None = None) -> ScanReport:
        return ScanReport(
            app_id=app_id,
            artifact_kind=kind,
            set_label=label,
            findings=tuple(findings or ()),
            permissions=manifest.permissions if manifest else (),
            degradations=tuple(notes),
            wall_time=time.perf_counter() - started,
            package_name=manifest.package_name if manifest else None,
        )

    try:
        art = open_artifact(path)
    except IoFailure:
        raise
    except Exception as exc:  # malformed containers never escape as exceptions
        return finish(SetLabel.A, ArtifactKind.UNKNOWN.value, [_note(exc)])

    work = _Work(notes=list(art.notes))
    kind = art.kind.value
    try:
        manifest, code_files, jar = _manifest_and_code(art, config, work)
    except ScanTimeout as exc:
        work.notes.append(_note(exc))
        return finish(SetLabel.A, kind, work.notes)
    except Exception as exc:
        work.notes.append(_note(exc))
        return finish(SetLabel.A, kind, work.notes)

    code: CodeModel | None
    try:
        code = _parse_code_files(code_files, jar, deadline, work)
    except ScanTimeout as exc:
        work.notes.append(_note(exc))
        work.partial = True
        code = None
    except Exception as exc:  # defensive: a reader bug degrades like a parse failure
        log.warning("bytecode reader failed on %s", path, exc_info=True)
        work.notes.append(_note(exc))
        work.partial = True
        code = None
    if code is not None:
        work.notes.extend(code.notes)

    scope = Scope.PLATFORM_ONLY if work.partial else Scope.FULL
    findings = run_all(manifest, code, scope, config, cats)
    label = SetLabel.B if work.partial else SetLabel.C
    return finish(label, kind, work.notes, manifest, findings)


def _manifest_and_code(
    art: PackageArtifact, config: CheckConfig, work: _Work
) -> tuple[ManifestModel, list[tuple[str, bytes | BaseException]], bool]:
    dangerous = config.dangerous_permissions
    if art.kind is ArtifactKind.XAPK:
        inner: list[tuple[PackageArtifact, ManifestModel]] = []
        for sub in art.nested:
            try:
                inner.append((sub, parse_manifest(read_entry(sub, MANIFEST), dangerous)))
            except ScanError as exc:
                work.notes.append(_note(exc, sub.source_path.rsplit("!", 1)[-1]))
        if not inner:
            raise NoSuchEntry("no inner APK with a readable manifest")
        bases = [m for _, m in inner if m.split_name is None]
        base = bases[0] if bases else inner[0][1]
        manifest = _merge_manifests(base, [m for _, m in inner if m is not base])
        files: list[tuple[str, bytes | BaseException]] = []
        for sub, _ in inner:
            label = sub.source_path.rsplit("!", 1)[-1]
            files.extend((f"{label}!{n}", _read(sub, n)) for n in _dex_names(sub))
        return manifest, files, False
    if not art.has(MANIFEST):
        raise NoSuchEntry(f"{MANIFEST} not found")
    manifest = parse_manifest(read_entry(art, MANIFEST), dangerous)
    if art.kind is ArtifactKind.AAR:
        jars = ["classes.jar"] if art.has("classes.jar") else []
        jars += sorted(n for n in art.names() if n.startswith("libs/") and n.endswith(".jar"))
        return manifest, [(n, _read(art, n)) for n in jars], True
    return manifest, [(n, _read(art, n)) for n in _dex_names(art)], False


def _scan_item(args: tuple) -> ScanReport:
    path, config, timeout, categories = args
    try:
        return scan(path, config, timeout, categories)
    except IoFailure as exc:
        return ScanReport(app_id=Path(path).stem, artifact_kind=ArtifactKind.UNKNOWN.value,
                          set_label=SetLabel.A, degradations=(_note(exc),))


def scan_corpus(
    paths: Iterable[str | os.PathLike],
    parallelism: int = 1,
    config: CheckConfig | None = None,
    timeout: float | None = DEFAULT_TIMEOUT,
    categories: Iterable[Category] | None = None,
) -> list[ScanReport]:
    """Scan every path; reports come back in input order and failures stay per item."""
    if parallelism < 1:
        raise ValueError("parallelism must be at least 1")
    cats = tuple(categories) if categories is not None else None
    jobs = [(str(p), config, timeout, cats) for p in paths]
    if parallelism == 1 or len(jobs) <= 1:
        return [_scan_item(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=min(parallelism, len(jobs))) as pool:
        return list(pool.map(_scan_item, jobs))
