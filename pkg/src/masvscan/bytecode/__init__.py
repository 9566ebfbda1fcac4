"""DEX and class-file readers producing one unified :class:`CodeModel`."""

from .classfile import parse_class, parse_class_jar
from .dex import parse_dex, salvage_dex
from .index import ApiIndex, api_usage_index
from .model import (
    UNKNOWN,
    CallSite,
    ClassInfo,
    CodeModel,
    ConstArg,
    FieldRef,
    Instr,
    Known,
    Location,
    MethodInfo,
    MethodRef,
    Op,
    Unknown,
)
from .resolve import resolve_const_args

__all__ = [
    "UNKNOWN", "ApiIndex", "CallSite", "ClassInfo", "CodeModel", "ConstArg", "FieldRef",
    "Instr", "Known", "Location", "MethodInfo", "MethodRef", "Op", "Unknown",
    "api_usage_index", "parse_class", "parse_class_jar", "parse_dex", "resolve_const_args",
    "salvage_dex",
]
