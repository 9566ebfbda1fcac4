"""ZIP container reader for APK, XAPK and AAR artifacts.

Parsing is driven by the central directory. Local file headers are consulted
only to locate the start of an entry's payload, because tampered APKs often
carry local headers that disagree with the central directory.
"""

from __future__ import annotations

import logging
import os
import struct
import zlib
from dataclasses import dataclass, field
from enum import Enum
from pathlib import PurePosixPath

from .errors import (
    BadLocalHeader,
    CorruptDeflateStream,
    Crc32Mismatch,
    EncryptedEntries,
    EntryTooLarge,
    IoFailure,
    NoSuchEntry,
    NotAZip,
    ScanError,
    UnsupportedCompression,
)

log = logging.getLogger(__name__)

DEFAULT_MAX_ENTRY_SIZE = 256 * 1024 * 1024

_EOCD_SIG = b"PK\x05\x06"
_EOCD64_LOC_SIG = b"PK\x06\x07"
_EOCD64_SIG = b"PK\x06\x06"
_CDIR_SIG = b"PK\x01\x02"
_LOCAL_SIG = b"PK\x03\x04"

_EOCD = struct.Struct("<4s4H2LH")
_EOCD64_LOC = struct.Struct("<4sLQL")
_EOCD64 = struct.Struct("<4sQ2H2L4Q")
_CDIR = struct.Struct("<4s6H3L5H2L")
_LOCAL = struct.Struct("<4s5H3L2H")

_FLAG_ENCRYPTED = 0x1
_FLAG_UTF8 = 0x800

STORED = 0
DEFLATED = 8


class ArtifactKind(str, Enum):
    APK = "apk"
    XAPK = "xapk"
    AAR = "aar"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class ZipEntry:
    name: str
    size: int
    compressed_size: int
    method: int
    crc32: int
    header_offset: int
    flags: int = 0

    @property
    def is_dir(self) -> bool:
        return self.name.endswith("/")


@dataclass(frozen=True, eq=False)
class PackageArtifact:
    """An opened container. Immutable; payloads are decoded on demand."""

    source_path: str
    kind: ArtifactKind
    entries: tuple[ZipEntry, ...]
    nested: tuple[PackageArtifact, ...] = ()
    notes: tuple[str, ...] = ()
    max_entry_size: int = DEFAULT_MAX_ENTRY_SIZE
    _data: bytes = field(default=b"", repr=False)
    _by_name: dict = field(default_factory=dict, repr=False)

    def names(self) -> list[str]:
        return [e.name for e in self.entries]

    def has(self, name: str) -> bool:
        return name in self._by_name

    def entry(self, name: str) -> ZipEntry:
        try:
            return self._by_name[name]
        except KeyError:
            raise NoSuchEntry(f"no entry named {name!r}") from None

    def read(self, name: str) -> bytes:
        return read_entry(self, name)


def classify_kind(entries: list[str], file_extension: str = "") -> ArtifactKind:
    """Classify a container from its entry names; precedence Xapk > Aar > Apk.

    The extension only breaks the tie for a container holding nothing but a
    manifest (a resource-only AAR versus a code-less split APK).
    """
    names = {n for n in entries if not n.endswith("/")}
    ext = file_extension.lower()
    if any(n.lower().endswith(".apk") for n in names):
        return ArtifactKind.XAPK
    has_manifest = "AndroidManifest.xml" in names
    if "classes.jar" in names and has_manifest:
        return ArtifactKind.AAR
    if "classes.dex" in names:
        return ArtifactKind.APK
    if has_manifest:
        return ArtifactKind.AAR if ext == ".aar" else ArtifactKind.APK
    return ArtifactKind.UNKNOWN


def open_artifact(path: str | os.PathLike, max_entry_size: int = DEFAULT_MAX_ENTRY_SIZE) -> PackageArtifact:
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc.strerror or exc}") from exc
    return open_bytes(data, str(path), max_entry_size=max_entry_size)


def open_bytes(
    data: bytes,
    source_path: str = "<memory>",
    *,
    max_entry_size: int = DEFAULT_MAX_ENTRY_SIZE,
    _depth: int = 0,
) -> PackageArtifact:
    entries, notes = _read_central_directory(data)
    encrypted = [e.name for e in entries if e.flags & _FLAG_ENCRYPTED]
    if encrypted:
        raise EncryptedEntries(f"{len(encrypted)} encrypted entries, first {encrypted[0]!r}")

    by_name: dict[str, ZipEntry] = {}
    for e in entries:
        if e.name in by_name:
            notes.append(f"ScanDegradation: duplicate entry {e.name!r}; last central-directory record wins")
        by_name[e.name] = e
    unique = tuple(by_name.values())

    ext = PurePosixPath(source_path.split("!")[-1]).suffix
    kind = classify_kind(list(by_name), ext)
    art = PackageArtifact(
        source_path=source_path,
        kind=kind,
        entries=unique,
        notes=tuple(notes),
        max_entry_size=max_entry_size,
        _data=data,
        _by_name=by_name,
    )
    if kind is not ArtifactKind.XAPK or _depth > 0:
        return art

    nested = []
    for e in unique:
        if e.is_dir or not e.name.lower().endswith(".apk"):
            continue
        try:
            inner = open_bytes(
                read_entry(art, e.name),
                f"{source_path}!{e.name}",
                max_entry_size=max_entry_size,
                _depth=_depth + 1,
            )
        except ScanError as exc:
            notes.append(f"nested {e.name}: {exc.kind}: {exc}")
            continue
        nested.append(inner)
    # The outer bundle never contributes bytecode of its own.
    kept = {n: e for n, e in by_name.items() if not _is_bytecode(n)}
    if len(kept) != len(by_name):
        notes.append("outer XAPK bytecode entries ignored")
    return PackageArtifact(
        source_path=source_path,
        kind=kind,
        entries=tuple(kept.values()),
        nested=tuple(nested),
        notes=tuple(notes),
        max_entry_size=max_entry_size,
        _data=data,
        _by_name=kept,
    )


def read_entry(artifact: PackageArtifact, name: str) -> bytes:
    e = artifact.entry(name)
    cap = artifact.max_entry_size
    if e.size > cap:
        raise EntryTooLarge(f"{name}: declared size {e.size} exceeds cap {cap}")
    data = artifact._data
    off = e.header_offset
    if off + _LOCAL.size > len(data):
        raise BadLocalHeader(f"{name}: local header beyond end of file")
    sig, _, _, _, _, _, _, _, _, name_len, extra_len = _LOCAL.unpack_from(data, off)
    if sig != _LOCAL_SIG:
        raise BadLocalHeader(f"{name}: bad local header signature at {off:#x}")
    start = off + _LOCAL.size + name_len + extra_len
    end = start + e.compressed_size
    if end > len(data):
        raise CorruptDeflateStream(f"{name}: payload runs past end of file")
    payload = data[start:end]

    if e.method == STORED:
        out = payload
        if len(out) > cap:
            raise EntryTooLarge(f"{name}: stored size exceeds cap {cap}")
    elif e.method == DEFLATED:
        d = zlib.decompressobj(-15)
        try:
            out = d.decompress(payload, cap + 1)
        except zlib.error as exc:
            raise CorruptDeflateStream(f"{name}: {exc}") from exc
        if len(out) > cap:
            raise EntryTooLarge(f"{name}: inflated size exceeds cap {cap}")
        if not d.eof:
            raise CorruptDeflateStream(f"{name}: deflate stream truncated")
    else:
        raise UnsupportedCompression(f"{name}: compression method {e.method}")

    if zlib.crc32(out) != e.crc32:
        raise Crc32Mismatch(f"{name}: crc {zlib.crc32(out):08x} != recorded {e.crc32:08x}")
    return bytes(out)


def _is_bytecode(name: str) -> bool:
    base = name.rsplit("/", 1)[-1]
    return "/" not in name and base.startswith("classes") and base.endswith(".dex")


def _find_eocd(data: bytes) -> int:
    lo = max(0, len(data) - (_EOCD.size + 0xFFFF))
    pos = len(data)
    while True:
        pos = data.rfind(_EOCD_SIG, lo, pos)
        if pos < 0:
            raise NotAZip("end-of-central-directory record not found")
        if pos + _EOCD.size <= len(data):
            comment_len = struct.unpack_from("<H", data, pos + 20)[0]
            if pos + _EOCD.size + comment_len <= len(data):
                return pos
        pos -= 1
        if pos < lo:
            raise NotAZip("end-of-central-directory record not found")


def _read_central_directory(data: bytes) -> tuple[list[ZipEntry], list[str]]:
    if len(data) < _EOCD.size:
        raise NotAZip("file too small to be a ZIP container")
    eocd = _find_eocd(data)
    _, _disk, _cd_disk, _n_disk, count, cd_size, cd_offset, _ = _EOCD.unpack_from(data, eocd)
    notes: list[str] = []

    if count == 0xFFFF or cd_size == 0xFFFFFFFF or cd_offset == 0xFFFFFFFF:
        loc = eocd - _EOCD64_LOC.size
        if loc >= 0 and data[loc : loc + 4] == _EOCD64_LOC_SIG:
            _, _, rec_off, _ = _EOCD64_LOC.unpack_from(data, loc)
            if rec_off + _EOCD64.size > len(data) or data[rec_off : rec_off + 4] != _EOCD64_SIG:
                raise NotAZip("zip64 end-of-central-directory record missing")
            fields = _EOCD64.unpack_from(data, rec_off)
            count, cd_size, cd_offset = fields[7], fields[8], fields[9]

    if cd_offset + cd_size > len(data):
        raise NotAZip("central directory truncated")
    if count * _CDIR.size > cd_size:
        raise NotAZip(f"central directory too small for {count} records")

    entries = []
    pos = cd_offset
    end = cd_offset + cd_size
    for _ in range(count):
        if pos + _CDIR.size > end:
            raise NotAZip("central directory truncated")
        (sig, _made, _need, flags, method, _t, _d, crc, csize, usize,
         name_len, extra_len, comment_len, _dstart, _iattr, _eattr, hoff) = _CDIR.unpack_from(data, pos)
        if sig != _CDIR_SIG:
            raise NotAZip(f"bad central directory signature at {pos:#x}")
        p = pos + _CDIR.size
        if p + name_len + extra_len + comment_len > end:
            raise NotAZip("central directory record overruns directory")
        raw_name = data[p : p + name_len]
        extra = data[p + name_len : p + name_len + extra_len]
        name = raw_name.decode("utf-8", "replace") if flags & _FLAG_UTF8 else raw_name.decode("cp437")
        if 0xFFFFFFFF in (csize, usize, hoff):
            usize, csize, hoff = _zip64_extra(extra, usize, csize, hoff)
        entries.append(ZipEntry(name, usize, csize, method, crc, hoff, flags))
        pos = p + name_len + extra_len + comment_len
    return entries, notes


def _zip64_extra(extra: bytes, usize: int, csize: int, hoff: int) -> tuple[int, int, int]:
    i = 0
    while i + 4 <= len(extra):
        tag, size = struct.unpack_from("<HH", extra, i)
        if tag == 0x0001:
            body = extra[i + 4 : i + 4 + size]
            vals = [struct.unpack_from("<Q", body, j)[0] for j in range(0, len(body) - 7, 8)]
            it = iter(vals)
            if usize == 0xFFFFFFFF:
                usize = next(it, usize)
            if csize == 0xFFFFFFFF:
                csize = next(it, csize)
            if hoff == 0xFFFFFFFF:
                hoff = next(it, hoff)
            break
        i += 4 + size
    return usize, csize, hoff
