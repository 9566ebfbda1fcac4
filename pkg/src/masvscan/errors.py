"""Exception hierarchy shared by every parser and the scan pipeline.

Parsers only ever raise subclasses of :class:`ScanError` for malformed input,
so callers can downgrade a scan instead of crashing.
"""

from __future__ import annotations


class ScanError(Exception):
    """Base class for all typed scanner errors."""

    stage = "scan"

    @property
    def kind(self) -> str:
        return type(self).__name__


class IoFailure(ScanError):
    stage = "io"


# -- container ---------------------------------------------------------------


class ContainerError(ScanError):
    stage = "container"


class NotAZip(ContainerError):
    pass


class EncryptedEntries(ContainerError):
    pass


class NoSuchEntry(ContainerError, KeyError):
    pass


class CorruptDeflateStream(ContainerError):
    pass


class Crc32Mismatch(ContainerError):
    pass


class BadLocalHeader(ContainerError):
    pass


class UnsupportedCompression(ContainerError):
    pass


class EntryTooLarge(ContainerError):
    pass


# -- manifest ----------------------------------------------------------------


class ManifestError(ScanError):
    stage = "manifest"


class NotAxml(ManifestError):
    pass


class TruncatedChunk(ManifestError):
    pass


class StringPoolOutOfRange(ManifestError):
    pass


class XmlSyntaxError(ManifestError):
    pass


class InvalidManifest(ManifestError):
    pass


# -- bytecode ----------------------------------------------------------------


class BytecodeError(ScanError):
    stage = "bytecode"


class BadMagic(BytecodeError):
    pass


class UnsupportedVersion(BytecodeError):
    pass


class OffsetOutOfBounds(BytecodeError):
    pass


class ChecksumMismatch(BytecodeError):
    pass


class BadClassMagic(BytecodeError):
    pass


class UnsupportedMajorVersion(BytecodeError):
    pass


class MalformedConstantPool(BytecodeError):
    pass


class MalformedCode(BytecodeError):
    pass


class IndexOutOfRange(BytecodeError, IndexError):
    pass


# -- configuration -----------------------------------------------------------


class ConfigError(ScanError):
    stage = "config"


# -- pipeline ----------------------------------------------------------------


class ScanTimeout(ScanError):
    stage = "pipeline"


# -- report ------------------------------------------------------------------


class SchemaMismatch(ScanError):
    stage = "report"
