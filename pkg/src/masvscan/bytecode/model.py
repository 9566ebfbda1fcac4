"""Unified bytecode view shared by the DEX and class-file readers.

Method bodies are lowered to a register-style instruction summary. The JVM
reader maps locals to registers ``0..max_locals-1`` and gives every operand
stack value a fresh register above that, so both paths feed the same constant
resolver and the same checks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Union


@dataclass(frozen=True, order=True)
class MethodRef:
    """A method signature in Dalvik descriptor form."""

    owner: str  # e.g. "Ljavax/crypto/Cipher;"
    name: str
    params: tuple[str, ...]
    ret: str

    def __str__(self) -> str:
        return f"{self.owner}->{self.name}({''.join(self.params)}){self.ret}"

    @property
    def owner_java(self) -> str:
        return descriptor_to_java(self.owner)

    @property
    def dotted(self) -> str:
        return f"{self.owner_java}.{self.name}"

    def param_slots(self) -> int:
        return sum(2 if p in ("J", "D") else 1 for p in self.params)


@dataclass(frozen=True, order=True)
class FieldRef:
    owner: str
    name: str
    type: str

    def __str__(self) -> str:
        return f"{self.owner}->{self.name}:{self.type}"


def descriptor_to_java(desc: str) -> str:
    if desc.startswith("L") and desc.endswith(";"):
        return desc[1:-1].replace("/", ".")
    return desc


def java_to_descriptor(name: str) -> str:
    return "L" + name.replace(".", "/") + ";"


def split_params(desc: str) -> tuple[tuple[str, ...], str]:
    """Split a ``(params)ret`` method descriptor into parameter and return types."""
    if not desc.startswith("(") or ")" not in desc:
        raise ValueError(f"bad method descriptor {desc!r}")
    body, ret = desc[1:].split(")", 1)
    params = []
    i = 0
    while i < len(body):
        j = i
        while j < len(body) and body[j] == "[":
            j += 1
        if j >= len(body):
            raise ValueError(f"bad method descriptor {desc!r}")
        if body[j] == "L":
            k = body.find(";", j)
            if k < 0:
                raise ValueError(f"bad method descriptor {desc!r}")
            j = k
        elif body[j] not in "ZBSCIJFD":
            raise ValueError(f"bad method descriptor {desc!r}")
        params.append(body[i : j + 1])
        i = j + 1
    if not ret:
        raise ValueError(f"bad method descriptor {desc!r}")
    return tuple(params), ret


@dataclass(frozen=True)
class Known:
    value: Union[str, int, float, bytes]


@dataclass(frozen=True)
class Unknown:
    def __repr__(self) -> str:
        return "Unknown"


UNKNOWN = Unknown()
ConstArg = Union[Known, Unknown]


class Op(str, Enum):
    CONST_STRING = "const-string"
    CONST = "const"
    INVOKE = "invoke"
    MOVE_RESULT = "move-result"
    MOVE = "move"
    NEW_INSTANCE = "new-instance"
    NEW_ARRAY = "new-array"
    FILL_ARRAY = "fill-array"
    ARRAY_PUT = "array-put"
    FIELD_GET = "field-get"
    BRANCH = "branch"
    RETURN = "return"
    OTHER = "other"


@dataclass(frozen=True)
class Instr:
    """One abstract instruction.

    ``reads``/``writes`` are conservative register sets. For INVOKE, ``reads``
    holds one register per argument value (receiver first for instance calls;
    the low register of a wide pair).
    """

    op: Op
    writes: tuple[int, ...] = ()
    reads: tuple[int, ...] = ()
    value: object = None
    method: MethodRef | None = None
    field: FieldRef | None = None
    type: str | None = None
    static: bool = False


@dataclass(frozen=True)
class MethodInfo:
    ref: MethodRef
    access_flags: int = 0
    instructions: tuple[Instr, ...] = ()
    branch_targets: frozenset[int] = frozenset()
    register_count: int = 0
    has_code: bool = True

    @property
    def instruction_summary(self) -> tuple[Instr, ...]:
        return self.instructions

    @property
    def is_empty_body(self) -> bool:
        """True when the body is nothing but a bare ``return`` (void)."""
        ops = [i for i in self.instructions if i.op is not Op.OTHER or i.reads or i.writes]
        return self.has_code and len(ops) == 1 and ops[0].op is Op.RETURN and not ops[0].reads


@dataclass(frozen=True)
class ClassInfo:
    name: str  # descriptor
    superclass: str | None
    interfaces: tuple[str, ...] = ()
    methods: tuple[MethodInfo, ...] = ()
    access_flags: int = 0
    origin: int = 0

    ACC_SYNTHETIC = 0x1000
    ACC_INTERFACE = 0x200

    @property
    def is_synthetic(self) -> bool:
        return bool(self.access_flags & self.ACC_SYNTHETIC)

    @property
    def java_name(self) -> str:
        return descriptor_to_java(self.name)


@dataclass(frozen=True)
class Location:
    origin: int
    class_name: str
    method: str
    index: int

    def __str__(self) -> str:
        return f"{self.class_name}->{self.method}@{self.index}"


@dataclass(frozen=True)
class CallSite:
    caller: MethodRef
    callee: MethodRef
    const_args: tuple[ConstArg, ...]
    location: Location
    static: bool = False

    def sort_key(self) -> tuple:
        loc = self.location
        return (loc.origin, loc.class_name, loc.method, loc.index)


@dataclass(frozen=True)
class Origin:
    kind: str  # "dex" or "jar"
    index: int
    name: str = ""


@dataclass
class CodeModel:
    """Merged bytecode view for one application.

    ``complete`` is False when some method bodies could not be decoded.
    ``refs_complete`` is True when every referenced method signature in every
    input file was read, which lets checks prove that an API is never used
    even when some bodies were lost.
    """

    classes: list[ClassInfo] = field(default_factory=list)
    strings: set[str] = field(default_factory=set)
    call_sites: list[CallSite] = field(default_factory=list)
    origins: list[Origin] = field(default_factory=list)
    method_refs: set[MethodRef] = field(default_factory=set)
    field_refs: set[FieldRef] = field(default_factory=set)
    complete: bool = True
    refs_complete: bool = True
    lost_classes: set[str] = field(default_factory=set)
    notes: list[str] = field(default_factory=list)

    def class_map(self) -> dict[str, ClassInfo]:
        out: dict[str, ClassInfo] = {}
        for c in self.classes:
            out.setdefault(c.name, c)
        return out

    def methods(self):
        for c in self.classes:
            for m in c.methods:
                yield c, m

    @staticmethod
    def merge(models: list[CodeModel]) -> CodeModel:
        out = CodeModel()
        seen: dict[str, int] = {}
        for m in models:
            for c in m.classes:
                if c.name in seen and seen[c.name] != c.origin:
                    out.notes.append(f"MultiDexDuplicate: {c.name} defined in origins {seen[c.name]} and {c.origin}")
                seen.setdefault(c.name, c.origin)
                out.classes.append(c)
            out.strings |= m.strings
            out.call_sites.extend(m.call_sites)
            out.origins.extend(m.origins)
            out.method_refs |= m.method_refs
            out.field_refs |= m.field_refs
            out.complete &= m.complete
            out.refs_complete &= m.refs_complete
            out.lost_classes |= m.lost_classes
            out.notes.extend(m.notes)
        out.call_sites.sort(key=CallSite.sort_key)
        return out


def name_entropy_note(classes: list[ClassInfo]) -> str | None:
    """Flag probable identifier obfuscation (mostly 1-2 letter class names)."""
    simple = [c.name.rsplit("/", 1)[-1].rstrip(";").lstrip("L") for c in classes]
    simple = [s.split("$")[0] for s in simple if s]
    if len(simple) < 10:
        return None
    short = sum(1 for s in simple if len(s) <= 2 and s.islower())
    if short / len(simple) > 0.5:
        return f"NameEntropy: {short}/{len(simple)} classes have 1-2 letter names (probable obfuscation)"
    return None
