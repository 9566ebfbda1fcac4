"""DEX file reader.

``parse_dex`` is strict: any structural problem raises a typed error.
``salvage_dex`` reads as much as it can, dropping only the classes whose data
is damaged and reporting them in ``CodeModel.lost_classes``.
"""

from __future__ import annotations

import hashlib
import logging
import struct
import zlib

from ..errors import (
    BadMagic,
    BytecodeError,
    IndexOutOfRange,
    MalformedCode,
    OffsetOutOfBounds,
    UnsupportedVersion,
)
from . import mutf8
from .model import (
    CallSite,
    ClassInfo,
    CodeModel,
    FieldRef,
    Instr,
    Location,
    MethodInfo,
    MethodRef,
    Op,
    Origin,
)
from .resolve import resolve_const_args

log = logging.getLogger(__name__)

HEADER_SIZE = 0x70
ENDIAN_TAG = 0x12345678
SUPPORTED_VERSIONS = frozenset(f"0{v}" for v in range(35, 42))
NO_INDEX = 0xFFFFFFFF

# Instruction formats by opcode. Unused opcodes decode as 10x.
_FORMATS: dict[int, str] = {}


def _fmt(lo: int, hi: int, fmt: str) -> None:
    for op in range(lo, hi + 1):
        _FORMATS[op] = fmt


_fmt(0x00, 0x00, "10x")
_fmt(0x01, 0x01, "12x")
_fmt(0x02, 0x02, "22x")
_fmt(0x03, 0x03, "32x")
_fmt(0x04, 0x04, "12x")
_fmt(0x05, 0x05, "22x")
_fmt(0x06, 0x06, "32x")
_fmt(0x07, 0x07, "12x")
_fmt(0x08, 0x08, "22x")
_fmt(0x09, 0x09, "32x")
_fmt(0x0A, 0x0D, "11x")
_fmt(0x0E, 0x0E, "10x")
_fmt(0x0F, 0x11, "11x")
_fmt(0x12, 0x12, "11n")
_fmt(0x13, 0x13, "21s")
_fmt(0x14, 0x14, "31i")
_fmt(0x15, 0x15, "21h")
_fmt(0x16, 0x16, "21s")
_fmt(0x17, 0x17, "31i")
_fmt(0x18, 0x18, "51l")
_fmt(0x19, 0x19, "21h")
_fmt(0x1A, 0x1A, "21c")
_fmt(0x1B, 0x1B, "31c")
_fmt(0x1C, 0x1C, "21c")
_fmt(0x1D, 0x1E, "11x")
_fmt(0x1F, 0x1F, "21c")
_fmt(0x20, 0x20, "22c")
_fmt(0x21, 0x21, "12x")
_fmt(0x22, 0x22, "21c")
_fmt(0x23, 0x23, "22c")
_fmt(0x24, 0x24, "35c")
_fmt(0x25, 0x25, "3rc")
_fmt(0x26, 0x26, "31t")
_fmt(0x27, 0x27, "11x")
_fmt(0x28, 0x28, "10t")
_fmt(0x29, 0x29, "20t")
_fmt(0x2A, 0x2A, "30t")
_fmt(0x2B, 0x2C, "31t")
_fmt(0x2D, 0x31, "23x")
_fmt(0x32, 0x37, "22t")
_fmt(0x38, 0x3D, "21t")
_fmt(0x3E, 0x43, "10x")
_fmt(0x44, 0x51, "23x")
_fmt(0x52, 0x5F, "22c")
_fmt(0x60, 0x6D, "21c")
_fmt(0x6E, 0x72, "35c")
_fmt(0x73, 0x73, "10x")
_fmt(0x74, 0x78, "3rc")
_fmt(0x79, 0x7A, "10x")
_fmt(0x7B, 0x8F, "12x")
_fmt(0x90, 0xAF, "23x")
_fmt(0xB0, 0xCF, "12x")
_fmt(0xD0, 0xD7, "22s")
_fmt(0xD8, 0xE2, "22b")
_fmt(0xE3, 0xF9, "10x")
_fmt(0xFA, 0xFA, "45cc")
_fmt(0xFB, 0xFB, "4rcc")
_fmt(0xFC, 0xFC, "35c")
_fmt(0xFD, 0xFD, "3rc")
_fmt(0xFE, 0xFF, "21c")

_UNITS = {
    "10x": 1, "12x": 1, "11n": 1, "11x": 1, "10t": 1,
    "20t": 2, "22x": 2, "21t": 2, "21s": 2, "21h": 2, "21c": 2,
    "23x": 2, "22b": 2, "22t": 2, "22s": 2, "22c": 2,
    "32x": 3, "30t": 3, "31t": 3, "31i": 3, "31c": 3, "35c": 3, "3rc": 3,
    "45cc": 4, "4rcc": 4, "51l": 5,
}

_WIDE_RESULT = frozenset({0x04, 0x05, 0x06, 0x0B, 0x16, 0x17, 0x18, 0x19, 0x45, 0x53, 0x61})
_STATIC_INVOKES = frozenset({0x71, 0x77})


def _s(v: int, bits: int) -> int:
    return v - (1 << bits) if v & (1 << (bits - 1)) else v


def parse_dex(data: bytes, origin: int = 0, name: str = "classes.dex", deadline=None) -> CodeModel:
    """Strictly parse one DEX file."""
    return _DexReader(data, origin, name, strict=True, deadline=deadline).read()


def salvage_dex(data: bytes, origin: int = 0, name: str = "classes.dex", deadline=None) -> CodeModel:
    """Best-effort parse that keeps whatever can be decoded."""
    return _DexReader(data, origin, name, strict=False, deadline=deadline).read()


class _DexReader:
    def __init__(self, data: bytes, origin: int, name: str, strict: bool, deadline=None) -> None:
        self.data = data
        self.origin = origin
        self.name = name
        self.strict = strict
        self.deadline = deadline
        self.model = CodeModel(origins=[Origin("dex", origin, name)])
        self._strings: dict[int, str] = {}
        self._types: list[int] = []
        self._protos: list[tuple[int, int]] = []
        self._proto_cache: dict[int, tuple[tuple[str, ...], str]] = {}
        self._methods_raw: list[tuple[int, int, int]] = []
        self._method_cache: dict[int, MethodRef] = {}
        self._fields_raw: list[tuple[int, int, int]] = []

    # -- primitive reads -------------------------------------------------

    def _need(self, off: int, n: int, what: str = "data") -> None:
        if off < 0 or n < 0 or off + n > len(self.data):
            raise OffsetOutOfBounds(f"{what} at 0x{off:x}+{n} outside file of {len(self.data)} bytes")

    def _u16(self, off: int) -> int:
        self._need(off, 2)
        return struct.unpack_from("<H", self.data, off)[0]

    def _u32(self, off: int) -> int:
        self._need(off, 4)
        return struct.unpack_from("<I", self.data, off)[0]

    def _uleb(self, off: int) -> tuple[int, int]:
        result = shift = 0
        for i in range(5):
            self._need(off + i, 1, "uleb128")
            b = self.data[off + i]
            result |= (b & 0x7F) << shift
            if not b & 0x80:
                return result, off + i + 1
            shift += 7
        raise OffsetOutOfBounds(f"uleb128 at 0x{off:x} longer than 5 bytes")

    def _sleb(self, off: int) -> tuple[int, int]:
        value, end = self._uleb(off)
        bits = min(7 * (end - off), 32)
        return _s(value & ((1 << bits) - 1), bits), end

    # -- tables ------------------------------------------------------------

    def string(self, idx: int) -> str:
        if idx in self._strings:
            return self._strings[idx]
        if not 0 <= idx < self.string_ids_size:
            raise IndexOutOfRange(f"string index {idx} out of range")
        off = self._u32(self.string_ids_off + 4 * idx)
        _, start = self._uleb(off)
        end = self.data.find(b"\x00", start)
        if end < 0:
            raise OffsetOutOfBounds(f"unterminated string data at 0x{off:x}")
        text, bad = mutf8.decode(self.data[start:end])
        if bad:
            self.model.notes.append(f"MalformedString: string {idx} had invalid MUTF-8")
        self._strings[idx] = text
        return text

    def type_desc(self, idx: int) -> str:
        if not 0 <= idx < len(self._types):
            raise IndexOutOfRange(f"type index {idx} out of range")
        return self.string(self._types[idx])

    def type_list(self, off: int) -> tuple[str, ...]:
        if off == 0:
            return ()
        n = self._u32(off)
        self._need(off + 4, 2 * n, "type_list")
        return tuple(self.type_desc(self._u16(off + 4 + 2 * i)) for i in range(n))

    def proto(self, idx: int) -> tuple[tuple[str, ...], str]:
        if idx not in self._proto_cache:
            if not 0 <= idx < len(self._protos):
                raise IndexOutOfRange(f"proto index {idx} out of range")
            ret_idx, params_off = self._protos[idx]
            self._proto_cache[idx] = (self.type_list(params_off), self.type_desc(ret_idx))
        return self._proto_cache[idx]

    def method_ref(self, idx: int) -> MethodRef:
        if idx not in self._method_cache:
            if not 0 <= idx < len(self._methods_raw):
                raise IndexOutOfRange(f"method index {idx} out of range")
            cls, proto, name = self._methods_raw[idx]
            params, ret = self.proto(proto)
            self._method_cache[idx] = MethodRef(self.type_desc(cls), self.string(name), params, ret)
        return self._method_cache[idx]

    def field_ref(self, idx: int) -> FieldRef:
        if not 0 <= idx < len(self._fields_raw):
            raise IndexOutOfRange(f"field index {idx} out of range")
        cls, typ, name = self._fields_raw[idx]
        return FieldRef(self.type_desc(cls), self.string(name), self.type_desc(typ))

    # -- top level ---------------------------------------------------------

    def read(self) -> CodeModel:
        self._header()
        try:
            self._tables()
        except BytecodeError as exc:
            if self.strict:
                raise
            self.model.complete = False
            self.model.refs_complete = False
            self.model.notes.append(f"ScanDegradation: {self.name}: {exc.kind}: {exc}")
            return self.model
        self._collect_refs()
        self._class_defs()
        self.model.call_sites.sort(key=CallSite.sort_key)
        return self.model

    def _header(self) -> None:
        data = self.data
        if len(data) < 8 or data[:4] != b"dex\n" or data[7] != 0:
            raise BadMagic("missing DEX magic")
        version = data[4:7].decode("ascii", "replace")
        if not version.isdigit():
            raise BadMagic(f"bad DEX version bytes {data[4:7]!r}")
        if version not in SUPPORTED_VERSIONS:
            if self.strict:
                raise UnsupportedVersion(f"DEX version {version}")
            self.model.notes.append(f"UnsupportedVersion: DEX {version} parsed with the 035 layout")
        if len(data) < HEADER_SIZE:
            raise OffsetOutOfBounds(f"header needs {HEADER_SIZE} bytes, have {len(data)}")
        (checksum,) = struct.unpack_from("<I", data, 8)
        file_size, header_size, endian = struct.unpack_from("<III", data, 32)
        if endian != ENDIAN_TAG:
            raise BadMagic(f"unsupported endian tag 0x{endian:08x}")
        if header_size < HEADER_SIZE:
            raise OffsetOutOfBounds(f"header_size {header_size}")
        if file_size > len(data):
            msg = f"file_size {file_size} exceeds {len(data)} available bytes"
            if self.strict:
                raise OffsetOutOfBounds(msg)
            self.model.notes.append(f"Truncated: {self.name}: {msg}")
        end = min(file_size, len(data))
        if zlib.adler32(data[12:end]) != checksum:
            self.model.notes.append(f"ChecksumMismatch: {self.name}: adler32 does not match header")
        if hashlib.sha1(data[32:end]).digest() != data[12:32]:
            self.model.notes.append(f"SignatureMismatch: {self.name}: sha1 does not match header")
        (
            self.string_ids_size, self.string_ids_off,
            self.type_ids_size, self.type_ids_off,
            self.proto_ids_size, self.proto_ids_off,
            self.field_ids_size, self.field_ids_off,
            self.method_ids_size, self.method_ids_off,
            self.class_defs_size, self.class_defs_off,
        ) = struct.unpack_from("<12I", data, 0x38)

    def _tables(self) -> None:
        d = self.data
        self._need(self.string_ids_off, 4 * self.string_ids_size, "string_ids")
        self._need(self.type_ids_off, 4 * self.type_ids_size, "type_ids")
        self._types = list(struct.unpack_from(f"<{self.type_ids_size}I", d, self.type_ids_off))
        self._need(self.proto_ids_off, 12 * self.proto_ids_size, "proto_ids")
        self._protos = [
            struct.unpack_from("<4xII", d, self.proto_ids_off + 12 * i) for i in range(self.proto_ids_size)
        ]
        self._need(self.field_ids_off, 8 * self.field_ids_size, "field_ids")
        self._fields_raw = [
            struct.unpack_from("<HHI", d, self.field_ids_off + 8 * i) for i in range(self.field_ids_size)
        ]
        self._need(self.method_ids_off, 8 * self.method_ids_size, "method_ids")
        self._methods_raw = [
            struct.unpack_from("<HHI", d, self.method_ids_off + 8 * i) for i in range(self.method_ids_size)
        ]
        self._need(self.class_defs_off, 32 * self.class_defs_size, "class_defs")

    def _collect_refs(self) -> None:
        for i in range(len(self._methods_raw)):
            try:
                self.model.method_refs.add(self.method_ref(i))
            except BytecodeError as exc:
                if self.strict:
                    raise
                self.model.refs_complete = False
                self.model.notes.append(f"ScanDegradation: {self.name}: method_id {i}: {exc.kind}")
        for i in range(len(self._fields_raw)):
            try:
                self.model.field_refs.add(self.field_ref(i))
            except BytecodeError as exc:
                if self.strict:
                    raise
                self.model.notes.append(f"ScanDegradation: {self.name}: field_id {i}: {exc.kind}")

    def _class_defs(self) -> None:
        seen: set[str] = set()
        for i in range(self.class_defs_size):
            if self.deadline is not None:
                self.deadline.check()
            off = self.class_defs_off + 32 * i
            cls_idx, access, super_idx, ifaces_off, _src, _ann, data_off, _sv = struct.unpack_from(
                "<8I", self.data, off
            )
            name = f"<class_def {i}>"
            try:
                name = self.type_desc(cls_idx)
                if name in seen:
                    raise MalformedCode(f"class {name} defined twice in one DEX")
                seen.add(name)
                superclass = None if super_idx == NO_INDEX else self.type_desc(super_idx)
                interfaces = self.type_list(ifaces_off)
                methods, sites = self._class_data(name, data_off)
            except BytecodeError as exc:
                if self.strict:
                    raise
                self.model.complete = False
                self.model.lost_classes.add(name)
                self.model.notes.append(f"ScanDegradation: {self.name}: {name}: {exc.kind}: {exc}")
                continue
            self.model.classes.append(
                ClassInfo(name, superclass, interfaces, tuple(methods), access, self.origin)
            )
            self.model.call_sites.extend(sites)
            for m in methods:
                for ins in m.instructions:
                    if ins.op is Op.CONST_STRING:
                        self.model.strings.add(ins.value)

    def _class_data(self, cls: str, off: int) -> tuple[list[MethodInfo], list[CallSite]]:
        if off == 0:
            return [], []
        sf, p = self._uleb(off)
        inf, p = self._uleb(p)
        dm, p = self._uleb(p)
        vm, p = self._uleb(p)
        if sf + inf + dm + vm > len(self.data):
            raise OffsetOutOfBounds(f"class_data counts too large for {cls}")
        for _ in range(sf + inf):
            _, p = self._uleb(p)
            _, p = self._uleb(p)
        methods: list[MethodInfo] = []
        sites: list[CallSite] = []
        for count in (dm, vm):
            idx = 0
            for _ in range(count):
                diff, p = self._uleb(p)
                access, p = self._uleb(p)
                code_off, p = self._uleb(p)
                idx += diff
                ref = self.method_ref(idx)
                if code_off == 0:
                    methods.append(MethodInfo(ref, access, has_code=False))
                    continue
                info = self._code_item(ref, access, code_off)
                methods.append(info)
                for k, ins in enumerate(info.instructions):
                    if ins.op is Op.INVOKE:
                        sites.append(
                            CallSite(
                                caller=ref,
                                callee=ins.method,
                                const_args=resolve_const_args(info, k),
                                location=Location(self.origin, cls, _method_key(ref), k),
                                static=ins.static,
                            )
                        )
        return methods, sites

    # -- code ----------------------------------------------------------------

    def _code_item(self, ref: MethodRef, access: int, off: int) -> MethodInfo:
        self._need(off, 16, "code_item")
        regs, _ins, _outs, tries, _dbg, n = struct.unpack_from("<HHHHII", self.data, off)
        base = off + 16
        self._need(base, 2 * n, "insns")
        units = struct.unpack_from(f"<{n}H", self.data, base)
        handler_addrs: set[int] = set()
        if tries:
            toff = base + 2 * n + (2 if n % 2 else 0)
            self._need(toff, 8 * tries, "tries")
            hbase = toff + 8 * tries
            for t in range(tries):
                start, count, hoff = struct.unpack_from("<IHH", self.data, toff + 8 * t)
                handler_addrs |= self._handlers(hbase + hoff)
        return _decode(self, ref, access, regs, units, handler_addrs)

    def _handlers(self, off: int) -> set[int]:
        size, p = self._sleb(off)
        if abs(size) > 0xFFFF:
            raise MalformedCode("encoded_catch_handler too large")
        out = set()
        for _ in range(abs(size)):
            _, p = self._uleb(p)
            addr, p = self._uleb(p)
            out.add(addr)
        if size <= 0:
            addr, p = self._uleb(p)
            out.add(addr)
        return out


def _method_key(ref: MethodRef) -> str:
    return f"{ref.name}({''.join(ref.params)}){ref.ret}"


def _decode(rd: _DexReader, ref: MethodRef, access: int, regs: int, units: tuple[int, ...], handlers: set[int]) -> MethodInfo:
    n = len(units)
    out: list[Instr] = []
    addr_of: dict[int, int] = {}
    pending: list[tuple[int, int]] = []  # (instruction index, target address)
    pc = 0

    def u(k: int) -> int:
        if pc + k >= n:
            raise MalformedCode(f"instruction at {pc} runs past end of code")
        return units[pc + k]

    def payload(target: int, ident: int) -> int:
        if not 0 <= target < n or units[target] != ident:
            raise MalformedCode(f"missing payload at {target}")
        return target

    while pc < n:
        unit = units[pc]
        op = unit & 0xFF
        if op == 0 and unit >> 8 in (1, 2, 3):
            kind = unit >> 8
            if kind == 1:
                size = u(1)
                pc += 4 + 2 * size
            elif kind == 2:
                size = u(1)
                pc += 2 + 4 * size
            else:
                width = u(1)
                count = u(2) | (u(3) << 16)
                pc += 4 + (width * count + 1) // 2
            continue
        fmt = _FORMATS[op]
        width = _UNITS[fmt]
        if pc + width > n:
            raise MalformedCode(f"instruction at {pc} runs past end of code")
        addr_of[pc] = len(out)
        a8 = unit >> 8
        a4 = (unit >> 8) & 0xF
        b4 = unit >> 12
        ins: Instr
        targets: list[int] = []

        if op == 0x00 or fmt == "10x" and op != 0x0E:
            ins = Instr(Op.OTHER)
        elif op in (0x01, 0x02, 0x03, 0x07, 0x08, 0x09):
            dst, src = _pair(fmt, unit, units, pc)
            ins = Instr(Op.MOVE, (dst,), (src,))
        elif op in (0x04, 0x05, 0x06):
            dst, src = _pair(fmt, unit, units, pc)
            ins = Instr(Op.OTHER, (dst, dst + 1), (src, src + 1))
        elif op in (0x0A, 0x0C):
            ins = Instr(Op.MOVE_RESULT, (a8,))
        elif op == 0x0B:
            ins = Instr(Op.MOVE_RESULT, (a8, a8 + 1))
        elif op == 0x0D:
            ins = Instr(Op.OTHER, (a8,))
        elif op == 0x0E:
            ins = Instr(Op.RETURN)
        elif op in (0x0F, 0x11):
            ins = Instr(Op.RETURN, (), (a8,))
        elif op == 0x10:
            ins = Instr(Op.RETURN, (), (a8, a8 + 1))
        elif op == 0x12:
            ins = Instr(Op.CONST, (a4,), value=_s(b4, 4))
        elif op in (0x13, 0x16):
            ins = Instr(Op.CONST, _w(op, a8), value=_s(units[pc + 1], 16))
        elif op in (0x14, 0x17):
            ins = Instr(Op.CONST, _w(op, a8), value=_s(units[pc + 1] | units[pc + 2] << 16, 32))
        elif op == 0x15:
            ins = Instr(Op.CONST, (a8,), value=_s(units[pc + 1] << 16, 32))
        elif op == 0x18:
            raw = units[pc + 1] | units[pc + 2] << 16 | units[pc + 3] << 32 | units[pc + 4] << 48
            ins = Instr(Op.CONST, (a8, a8 + 1), value=_s(raw, 64))
        elif op == 0x19:
            ins = Instr(Op.CONST, (a8, a8 + 1), value=_s(units[pc + 1] << 48, 64))
        elif op == 0x1A:
            ins = Instr(Op.CONST_STRING, (a8,), value=rd.string(units[pc + 1]))
        elif op == 0x1B:
            ins = Instr(Op.CONST_STRING, (a8,), value=rd.string(units[pc + 1] | units[pc + 2] << 16))
        elif op == 0x1C:
            ins = Instr(Op.OTHER, (a8,), type=rd.type_desc(units[pc + 1]))
        elif op in (0x1D, 0x1E, 0x27):
            ins = Instr(Op.OTHER, (), (a8,))
        elif op == 0x1F:
            ins = Instr(Op.OTHER, (a8,), (a8,), type=rd.type_desc(units[pc + 1]))
        elif op == 0x20:
            ins = Instr(Op.OTHER, (a4,), (b4,), type=rd.type_desc(units[pc + 1]))
        elif op == 0x21:
            ins = Instr(Op.OTHER, (a4,), (b4,))
        elif op == 0x22:
            ins = Instr(Op.NEW_INSTANCE, (a8,), type=rd.type_desc(units[pc + 1]))
        elif op == 0x23:
            ins = Instr(Op.NEW_ARRAY, (a4,), (b4,), type=rd.type_desc(units[pc + 1]))
        elif op in (0x24, 0x25):
            regs_used = _invoke_regs(fmt, unit, units, pc)
            ins = Instr(Op.OTHER, (), tuple(regs_used), type=rd.type_desc(units[pc + 1]))
        elif op == 0x26:
            tgt = pc + _s(units[pc + 1] | units[pc + 2] << 16, 32)
            payload(tgt, 0x0300)
            if tgt + 4 > n:
                raise MalformedCode("fill-array-data payload truncated")
            elem = units[tgt + 1]
            count = units[tgt + 2] | units[tgt + 3] << 16
            nbytes = elem * count
            if tgt + 4 + (nbytes + 1) // 2 > n:
                raise MalformedCode("fill-array-data payload truncated")
            raw = struct.pack(f"<{(nbytes + 1) // 2}H", *units[tgt + 4 : tgt + 4 + (nbytes + 1) // 2])[:nbytes]
            ins = Instr(Op.FILL_ARRAY, (), (a8,), value=(elem, raw))
        elif op == 0x28:
            targets = [pc + _s(a8, 8)]
            ins = Instr(Op.BRANCH)
        elif op == 0x29:
            targets = [pc + _s(units[pc + 1], 16)]
            ins = Instr(Op.BRANCH)
        elif op == 0x2A:
            targets = [pc + _s(units[pc + 1] | units[pc + 2] << 16, 32)]
            ins = Instr(Op.BRANCH)
        elif op in (0x2B, 0x2C):
            tgt = pc + _s(units[pc + 1] | units[pc + 2] << 16, 32)
            targets = _switch_targets(units, pc, payload(tgt, 0x0100 if op == 0x2B else 0x0200), op == 0x2B)
            ins = Instr(Op.BRANCH, (), (a8,))
        elif 0x2D <= op <= 0x31:
            b, c = units[pc + 1] & 0xFF, units[pc + 1] >> 8
            ins = Instr(Op.OTHER, (a8,), (b, c))
        elif 0x32 <= op <= 0x37:
            targets = [pc + _s(units[pc + 1], 16)]
            ins = Instr(Op.BRANCH, (), (a4, b4))
        elif 0x38 <= op <= 0x3D:
            targets = [pc + _s(units[pc + 1], 16)]
            ins = Instr(Op.BRANCH, (), (a8,))
        elif 0x44 <= op <= 0x4A:
            b, c = units[pc + 1] & 0xFF, units[pc + 1] >> 8
            ins = Instr(Op.OTHER, _w(op, a8), (b, c))
        elif 0x4B <= op <= 0x51:
            b, c = units[pc + 1] & 0xFF, units[pc + 1] >> 8
            ins = Instr(Op.ARRAY_PUT, (), (a8, b, c))
        elif 0x52 <= op <= 0x58:
            ins = Instr(Op.FIELD_GET, _w(op, a4), (b4,), field=rd.field_ref(units[pc + 1]))
        elif 0x59 <= op <= 0x5F:
            ins = Instr(Op.OTHER, (), (a4, b4), field=rd.field_ref(units[pc + 1]))
        elif 0x60 <= op <= 0x66:
            ins = Instr(Op.FIELD_GET, _w(op, a8), (), field=rd.field_ref(units[pc + 1]))
        elif 0x67 <= op <= 0x6D:
            ins = Instr(Op.OTHER, (), (a8,), field=rd.field_ref(units[pc + 1]))
        elif 0x6E <= op <= 0x72 or 0x74 <= op <= 0x78 or op in (0xFA, 0xFB):
            callee = rd.method_ref(units[pc + 1])
            static = op in _STATIC_INVOKES
            raw_regs = _invoke_regs(fmt, unit, units, pc)
            ins = Instr(Op.INVOKE, (), _collapse(raw_regs, callee, static), method=callee, static=static)
        elif op in (0xFC, 0xFD):
            ins = Instr(Op.OTHER, (), tuple(_invoke_regs(fmt, unit, units, pc)))
        elif 0x7B <= op <= 0x8F:
            ins = Instr(Op.OTHER, (a4, a4 + 1), (b4, b4 + 1))
        elif 0x90 <= op <= 0xAF:
            b, c = units[pc + 1] & 0xFF, units[pc + 1] >> 8
            ins = Instr(Op.OTHER, (a8, a8 + 1), (b, b + 1, c, c + 1))
        elif 0xB0 <= op <= 0xCF:
            ins = Instr(Op.OTHER, (a4, a4 + 1), (a4, a4 + 1, b4, b4 + 1))
        elif 0xD0 <= op <= 0xD7:
            ins = Instr(Op.OTHER, (a4,), (b4,))
        elif 0xD8 <= op <= 0xE2:
            ins = Instr(Op.OTHER, (a8,), (units[pc + 1] & 0xFF,))
        elif op in (0xFE, 0xFF):
            ins = Instr(Op.OTHER, (a8,))
        else:  # pragma: no cover - every opcode is covered above
            ins = Instr(Op.OTHER)

        for t in targets:
            pending.append((len(out), t))
        out.append(ins)
        pc += width

    branch_targets: set[int] = set()
    for _, t in pending:
        if t not in addr_of:
            raise MalformedCode(f"branch target {t} is not an instruction boundary")
        branch_targets.add(addr_of[t])
    for h in handlers:
        if h not in addr_of:
            raise MalformedCode(f"handler address {h} is not an instruction boundary")
        branch_targets.add(addr_of[h])
    return MethodInfo(ref, access, tuple(out), frozenset(branch_targets), regs, True)


def _w(op: int, reg: int) -> tuple[int, ...]:
    return (reg, reg + 1) if op in _WIDE_RESULT else (reg,)


def _pair(fmt: str, unit: int, units: tuple[int, ...], pc: int) -> tuple[int, int]:
    if fmt == "12x":
        return (unit >> 8) & 0xF, unit >> 12
    if fmt == "22x":
        return unit >> 8, units[pc + 1]
    return units[pc + 1], units[pc + 2]


def _invoke_regs(fmt: str, unit: int, units: tuple[int, ...], pc: int) -> list[int]:
    if fmt in ("35c", "45cc"):
        count = unit >> 12
        if count > 5:
            raise MalformedCode(f"invoke with {count} registers")
        w = units[pc + 2]
        regs = [w & 0xF, (w >> 4) & 0xF, (w >> 8) & 0xF, w >> 12, (unit >> 8) & 0xF]
        return regs[:count]
    count = unit >> 8
    first = units[pc + 2]
    return list(range(first, first + count))


def _collapse(raw: list[int], callee: MethodRef, static: bool) -> tuple[int, ...]:
    """One register per argument value: receiver, then each param's low register."""
    out = []
    i = 0
    if not static:
        if raw:
            out.append(raw[0])
        i = 1
    for p in callee.params:
        if i >= len(raw):
            break
        out.append(raw[i])
        i += 2 if p in ("J", "D") else 1
    return tuple(out)


def _switch_targets(units: tuple[int, ...], pc: int, tgt: int, packed: bool) -> list[int]:
    n = len(units)
    if tgt + 2 > n:
        raise MalformedCode("switch payload truncated")
    size = units[tgt + 1]
    if packed:
        base = tgt + 4
    else:
        base = tgt + 2 + 2 * size
    if base + 2 * size > n:
        raise MalformedCode("switch payload truncated")
    return [pc + _s(units[base + 2 * k] | units[base + 2 * k + 1] << 16, 32) for k in range(size)]
