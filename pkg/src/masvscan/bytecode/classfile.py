"""JVM class-file reader for the ``classes.jar`` inside an AAR.

Operand-stack code is lowered to the register form used by the DEX reader:
locals keep their slot numbers and every pushed stack value gets a fresh
register, so the constant resolver works unchanged.
"""

from __future__ import annotations

import logging
import struct

from ..container import open_bytes, read_entry
from ..errors import (
    BadClassMagic,
    BytecodeError,
    ContainerError,
    MalformedCode,
    MalformedConstantPool,
    UnsupportedMajorVersion,
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
    split_params,
)
from .resolve import resolve_const_args

log = logging.getLogger(__name__)

MAGIC = 0xCAFEBABE
MAX_KNOWN_MAJOR = 69  # Java 25

# constant pool tags
UTF8, INTEGER, FLOAT, LONG, DOUBLE, CLASS, STRING = 1, 3, 4, 5, 6, 7, 8
FIELDREF, METHODREF, IMETHODREF, NAT = 9, 10, 11, 12
MHANDLE, MTYPE, DYNAMIC, INDY, MODULE, PACKAGE = 15, 16, 17, 18, 19, 20

_CP_SIZES = {
    UTF8: None, INTEGER: 4, FLOAT: 4, LONG: 8, DOUBLE: 8, CLASS: 2, STRING: 2,
    FIELDREF: 4, METHODREF: 4, IMETHODREF: 4, NAT: 4, MHANDLE: 3, MTYPE: 2,
    DYNAMIC: 4, INDY: 4, MODULE: 2, PACKAGE: 2,
}

_NEWARRAY_TYPES = {4: "[Z", 5: "[C", 6: "[F", 7: "[D", 8: "[B", 9: "[S", 10: "[I", 11: "[J"}


def parse_class_jar(data: bytes, origin: int = 0, name: str = "classes.jar", strict: bool = True, deadline=None) -> CodeModel:
    """Parse every ``.class`` entry of a jar into one CodeModel.

    With ``strict`` a damaged class raises; otherwise it is skipped and
    recorded in ``lost_classes``.
    """
    jar = open_bytes(data, name)
    model = CodeModel(origins=[Origin("jar", origin, name)])
    model.notes.extend(jar.notes)
    for entry in sorted(jar.names()):
        if not entry.endswith(".class") or jar.entry(entry).is_dir:
            continue
        if deadline is not None:
            deadline.check()
        try:
            raw = read_entry(jar, entry)
            cls, sites, notes = parse_class(raw, origin)
        except (BytecodeError, ContainerError) as exc:
            if strict:
                raise
            model.complete = False
            model.refs_complete = False
            model.lost_classes.add(f"L{entry[:-6]};")
            model.notes.append(f"ScanDegradation: {name}: {entry}: {exc.kind}: {exc}")
            continue
        model.notes.extend(f"{entry}: {n}" for n in notes)
        model.classes.append(cls)
        model.call_sites.extend(sites)
        for m in cls.methods:
            for ins in m.instructions:
                if ins.op is Op.CONST_STRING:
                    model.strings.add(ins.value)
                if ins.method is not None:
                    model.method_refs.add(ins.method)
                if ins.field is not None:
                    model.field_refs.add(ins.field)
    model.call_sites.sort(key=CallSite.sort_key)
    return model


def parse_class(data: bytes, origin: int = 0) -> tuple[ClassInfo, list[CallSite], list[str]]:
    """Parse one class file. Returns the class, its call sites and any notes."""
    reader = _ClassReader(data)
    cls, sites = reader.read(origin)
    return cls, sites, reader.notes


class _ClassReader:
    def __init__(self, data: bytes) -> None:
        self.data = data
        self.pos = 0
        self.cp: list[tuple | None] = [None]
        self.notes: list[str] = []

    def _take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise MalformedConstantPool(f"class file truncated at offset {self.pos}")
        out = self.data[self.pos : self.pos + n]
        self.pos += n
        return out

    def u1(self) -> int:
        return self._take(1)[0]

    def u2(self) -> int:
        return struct.unpack(">H", self._take(2))[0]

    def u4(self) -> int:
        return struct.unpack(">I", self._take(4))[0]

    # -- constant pool -----------------------------------------------------

    def _entry(self, idx: int, *tags: int) -> tuple:
        if not 0 < idx < len(self.cp) or self.cp[idx] is None:
            raise MalformedConstantPool(f"constant pool index {idx} invalid")
        e = self.cp[idx]
        if tags and e[0] not in tags:
            raise MalformedConstantPool(f"constant {idx} has tag {e[0]}, expected {tags}")
        return e

    def utf8(self, idx: int) -> str:
        return self._entry(idx, UTF8)[1]

    def class_name(self, idx: int) -> str:
        """Class constant as a descriptor."""
        internal = self.utf8(self._entry(idx, CLASS)[1])
        return internal if internal.startswith("[") else f"L{internal};"

    def nat(self, idx: int) -> tuple[str, str]:
        _, n, d = self._entry(idx, NAT)
        return self.utf8(n), self.utf8(d)

    def method_ref(self, idx: int) -> MethodRef:
        _, c, nt = self._entry(idx, METHODREF, IMETHODREF)
        name, desc = self.nat(nt)
        try:
            params, ret = split_params(desc)
        except ValueError as exc:
            raise MalformedConstantPool(str(exc)) from None
        return MethodRef(self.class_name(c), name, params, ret)

    def field_ref(self, idx: int) -> FieldRef:
        _, c, nt = self._entry(idx, FIELDREF)
        name, desc = self.nat(nt)
        return FieldRef(self.class_name(c), name, desc)

    def _read_pool(self) -> None:
        count = self.u2()
        i = 1
        while i < count:
            tag = self.u1()
            if tag not in _CP_SIZES:
                raise MalformedConstantPool(f"unknown constant tag {tag} at index {i}")
            if tag == UTF8:
                raw = self._take(self.u2())
                text, bad = mutf8.decode(raw)
                if bad:
                    self.notes.append(f"MalformedString: constant {i} had invalid modified UTF-8")
                self.cp.append((UTF8, text))
            elif tag == INTEGER:
                self.cp.append((tag, struct.unpack(">i", self._take(4))[0]))
            elif tag == FLOAT:
                self.cp.append((tag, struct.unpack(">f", self._take(4))[0]))
            elif tag == LONG:
                self.cp.append((tag, struct.unpack(">q", self._take(8))[0]))
            elif tag == DOUBLE:
                self.cp.append((tag, struct.unpack(">d", self._take(8))[0]))
            elif tag in (CLASS, STRING, MTYPE, MODULE, PACKAGE):
                self.cp.append((tag, self.u2()))
            elif tag == MHANDLE:
                self.cp.append((tag, self.u1(), self.u2()))
            else:
                self.cp.append((tag, self.u2(), self.u2()))
            if tag in (LONG, DOUBLE):
                self.cp.append(None)
                i += 1
            i += 1

    # -- class structure -----------------------------------------------------

    def _attributes(self) -> list[tuple[str, bytes]]:
        out = []
        for _ in range(self.u2()):
            name = self.utf8(self.u2())
            out.append((name, self._take(self.u4())))
        return out

    def read(self, origin: int) -> tuple[ClassInfo, list[CallSite]]:
        if len(self.data) < 4 or struct.unpack_from(">I", self.data)[0] != MAGIC:
            raise BadClassMagic("expected 0xCAFEBABE")
        self.pos = 4
        _minor, major = self.u2(), self.u2()
        if not 45 <= major <= MAX_KNOWN_MAJOR:
            self.notes.append(f"{UnsupportedMajorVersion.__name__}: class major version {major} read best-effort")
        self._read_pool()
        access = self.u2()
        this = self.class_name(self.u2())
        sup = self.u2()
        superclass = self.class_name(sup) if sup else None
        interfaces = tuple(self.class_name(self.u2()) for _ in range(self.u2()))
        for _ in range(self.u2()):
            self._take(6)
            self._attributes()
        methods: list[MethodInfo] = []
        sites: list[CallSite] = []
        for _ in range(self.u2()):
            m_access = self.u2()
            name = self.utf8(self.u2())
            desc = self.utf8(self.u2())
            try:
                params, ret = split_params(desc)
            except ValueError as exc:
                raise MalformedConstantPool(str(exc)) from None
            ref = MethodRef(this, name, params, ret)
            code = next((body for n, body in self._attributes() if n == "Code"), None)
            if code is None:
                methods.append(MethodInfo(ref, m_access, has_code=False))
                continue
            info = _CodeLowering(self, ref, m_access, code).run()
            methods.append(info)
            key = f"{name}({''.join(params)}){ret}"
            for k, ins in enumerate(info.instructions):
                if ins.op is Op.INVOKE:
                    sites.append(
                        CallSite(ref, ins.method, resolve_const_args(info, k), Location(origin, this, key, k), ins.static)
                    )
        self._attributes()
        return ClassInfo(this, superclass, interfaces, tuple(methods), access, origin), sites


def _cat(desc: str) -> int:
    return 2 if desc in ("J", "D") else 1


# Opcodes with a fixed total length (opcode byte included), other than 1.
_LENGTHS = {0x10: 2, 0x11: 3, 0x12: 2, 0x13: 3, 0x14: 3, 0x84: 3, 0xA9: 2, 0xB9: 5, 0xBA: 5,
            0xBC: 2, 0xC5: 4, 0xC8: 5, 0xC9: 5}
for _op in range(0x15, 0x1A):
    _LENGTHS[_op] = 2
for _op in range(0x36, 0x3B):
    _LENGTHS[_op] = 2
for _op in list(range(0x99, 0xA9)) + list(range(0xB2, 0xB9)) + [0xBB, 0xBD, 0xC0, 0xC1, 0xC6, 0xC7]:
    _LENGTHS[_op] = 3
_INVALID = set(range(0xCB, 0xFE))

_CAT2_LOADS = {0x16, 0x18, 0x1E, 0x1F, 0x20, 0x21, 0x26, 0x27, 0x28, 0x29, 0x2F, 0x31}
_CAT2_ARITH = {0x61, 0x63, 0x65, 0x67, 0x69, 0x6B, 0x6D, 0x6F, 0x71, 0x73, 0x75, 0x77,
               0x79, 0x7B, 0x7D, 0x7F, 0x81, 0x83, 0x85, 0x87, 0x8A, 0x8C, 0x8D, 0x8F}
_UNARY = set(range(0x74, 0x78)) | set(range(0x85, 0x94))
_TERMINAL = {0xA7, 0xA9, 0xAA, 0xAB, 0xAC, 0xAD, 0xAE, 0xAF, 0xB0, 0xB1, 0xBF, 0xC8}


class _CodeLowering:
    def __init__(self, rd: _ClassReader, ref: MethodRef, access: int, code: bytes) -> None:
        self.rd = rd
        self.ref = ref
        self.access = access
        if len(code) < 8:
            raise MalformedCode(f"Code attribute of {ref.name} too short")
        _max_stack, self.max_locals, length = struct.unpack_from(">HHI", code)
        if 8 + length + 2 > len(code):
            raise MalformedCode(f"Code attribute of {ref.name} truncated")
        self.code = code[8 : 8 + length]
        p = 8 + length
        (n_exc,) = struct.unpack_from(">H", code, p)
        if p + 2 + 8 * n_exc > len(code):
            raise MalformedCode("exception table truncated")
        self.handlers = {struct.unpack_from(">HHHH", code, p + 2 + 8 * i)[2] for i in range(n_exc)}
        self.next_reg = self.max_locals
        self.out: list[Instr] = []
        self.stack: list[tuple[int, int]] = []

    def fresh(self) -> int:
        r = self.next_reg
        self.next_reg += 1
        return r

    def pop(self) -> tuple[int, int]:
        if self.stack:
            return self.stack.pop()
        return (self.fresh(), 1)

    def pop_units(self, n: int) -> list[tuple[int, int]]:
        got: list[tuple[int, int]] = []
        units = 0
        while units < n:
            e = self.pop()
            got.append(e)
            units += e[1]
        if units != n:
            raise MalformedCode("operand stack category mismatch")
        got.reverse()
        return got

    def push_new(self, instr_op: Op, cat: int = 1, reads: tuple[int, ...] = (), **kw) -> int:
        r = self.fresh()
        self.out.append(Instr(instr_op, (r,), reads, **kw))
        self.stack.append((r, cat))
        return r

    def _scan(self) -> tuple[list[int], dict[int, list[int]]]:
        code = self.code
        pcs: list[int] = []
        jumps: dict[int, list[int]] = {}
        pc = 0
        while pc < len(code):
            op = code[pc]
            pcs.append(pc)
            if op in _INVALID:
                raise MalformedCode(f"invalid opcode 0x{op:02x} at {pc}")
            if op == 0xC4:
                if pc + 1 >= len(code):
                    raise MalformedCode("truncated wide")
                size = 6 if code[pc + 1] == 0x84 else 4
            elif op in (0xAA, 0xAB):
                base = (pc + 4) & ~3
                if base + 8 > len(code):
                    raise MalformedCode("truncated switch")
                default = struct.unpack_from(">i", code, base)[0]
                targets = [pc + default]
                if op == 0xAA:
                    low, high = struct.unpack_from(">ii", code, base + 4)
                    count = high - low + 1
                    if count < 0 or base + 12 + 4 * count > len(code):
                        raise MalformedCode("bad tableswitch")
                    targets += [pc + struct.unpack_from(">i", code, base + 12 + 4 * k)[0] for k in range(count)]
                    size = base + 12 + 4 * count - pc
                else:
                    (npairs,) = struct.unpack_from(">i", code, base + 4)
                    if npairs < 0 or base + 8 + 8 * npairs > len(code):
                        raise MalformedCode("bad lookupswitch")
                    targets += [pc + struct.unpack_from(">i", code, base + 12 + 8 * k)[0] for k in range(npairs)]
                    size = base + 8 + 8 * npairs - pc
                jumps[pc] = targets
            else:
                size = _LENGTHS.get(op, 1)
                if 0x99 <= op <= 0xA8 or op in (0xC6, 0xC7):
                    if pc + 3 > len(code):
                        raise MalformedCode("truncated branch")
                    jumps[pc] = [pc + struct.unpack_from(">h", code, pc + 1)[0]]
                elif op in (0xC8, 0xC9):
                    if pc + 5 > len(code):
                        raise MalformedCode("truncated branch")
                    jumps[pc] = [pc + struct.unpack_from(">i", code, pc + 1)[0]]
            if pc + size > len(code):
                raise MalformedCode(f"instruction at {pc} runs past end of code")
            pc += size
        return pcs, jumps

    def run(self) -> MethodInfo:
        pcs, jumps = self._scan()
        starts = set(pcs)
        target_pcs = set(self.handlers)
        for ts in jumps.values():
            target_pcs.update(ts)
        if not target_pcs <= starts:
            raise MalformedCode("branch target is not an instruction boundary")
        index_of: dict[int, int] = {}
        snapshots: dict[int, list[tuple[int, int]]] = {}
        reachable = True
        for pc in pcs:
            if pc in self.handlers:
                self.stack = []
                index_of[pc] = len(self.out)
                self.push_new(Op.OTHER)  # caught exception
            elif pc in target_pcs:
                if not reachable:
                    self.stack = list(snapshots.get(pc, []))
                index_of[pc] = len(self.out)
            else:
                index_of[pc] = len(self.out)
                if not reachable:
                    self.stack = []
            before = len(self.out)
            op = self.code[pc]
            self._lower(pc, op)
            if len(self.out) == before:
                self.out.append(Instr(Op.OTHER))
            for t in jumps.get(pc, ()):
                snapshots.setdefault(t, list(self.stack))
            reachable = op not in _TERMINAL
        targets = frozenset(index_of[t] for t in target_pcs)
        return MethodInfo(self.ref, self.access, tuple(self.out), targets, self.next_reg, True)

    # -- per-opcode lowering ---------------------------------------------

    def _ldc(self, idx: int) -> None:
        e = self.rd._entry(idx)
        tag = e[0]
        if tag == STRING:
            self.push_new(Op.CONST_STRING, value=self.rd.utf8(e[1]))
        elif tag in (INTEGER, FLOAT):
            self.push_new(Op.CONST, value=e[1])
        elif tag in (LONG, DOUBLE):
            self.push_new(Op.CONST, 2, value=e[1])
        elif tag == CLASS:
            self.push_new(Op.OTHER, type=self.rd.class_name(idx))
        elif tag == DYNAMIC:
            _, desc = self.rd.nat(e[2])
            self.push_new(Op.OTHER, _cat(desc))
        elif tag in (MHANDLE, MTYPE):
            self.push_new(Op.OTHER)
        else:
            raise MalformedConstantPool(f"ldc of constant with tag {tag}")

    def _load(self, slot: int, cat: int) -> None:
        self.push_new(Op.MOVE, cat, (slot,))

    def _store(self, slot: int) -> None:
        r, cat = self.pop()
        writes = (slot, slot + 1) if cat == 2 else (slot,)
        self.out.append(Instr(Op.MOVE, writes, (r,)))

    def _invoke(self, ref: MethodRef, static: bool) -> None:
        args = [self.pop()[0] for _ in ref.params][::-1]
        if not static:
            args.insert(0, self.pop()[0])
        self.out.append(Instr(Op.INVOKE, (), tuple(args), method=ref, static=static))
        if ref.ret != "V":
            self.push_new(Op.MOVE_RESULT, _cat(ref.ret))

    def _lower(self, pc: int, op: int) -> None:
        code = self.code
        u1 = lambda: code[pc + 1]  # noqa: E731
        u2 = lambda: struct.unpack_from(">H", code, pc + 1)[0]  # noqa: E731

        if op == 0x00:
            return
        if op == 0x01:
            self.push_new(Op.CONST, value=0)  # aconst_null
        elif 0x02 <= op <= 0x08:
            self.push_new(Op.CONST, value=op - 0x03)
        elif op in (0x09, 0x0A):
            self.push_new(Op.CONST, 2, value=op - 0x09)
        elif 0x0B <= op <= 0x0D:
            self.push_new(Op.CONST, value=float(op - 0x0B))
        elif op in (0x0E, 0x0F):
            self.push_new(Op.CONST, 2, value=float(op - 0x0E))
        elif op == 0x10:
            self.push_new(Op.CONST, value=struct.unpack_from(">b", code, pc + 1)[0])
        elif op == 0x11:
            self.push_new(Op.CONST, value=struct.unpack_from(">h", code, pc + 1)[0])
        elif op == 0x12:
            self._ldc(u1())
        elif op in (0x13, 0x14):
            self._ldc(u2())
        elif 0x15 <= op <= 0x19:
            self._load(u1(), 2 if op in _CAT2_LOADS else 1)
        elif 0x1A <= op <= 0x2D:
            self._load((op - 0x1A) % 4, 2 if op in _CAT2_LOADS else 1)
        elif 0x2E <= op <= 0x35:
            idx, arr = self.pop()[0], self.pop()[0]
            self.push_new(Op.OTHER, 2 if op in _CAT2_LOADS else 1, (arr, idx))
        elif 0x36 <= op <= 0x3A:
            self._store(u1())
        elif 0x3B <= op <= 0x4E:
            self._store((op - 0x3B) % 4)
        elif 0x4F <= op <= 0x56:
            val, idx, arr = self.pop()[0], self.pop()[0], self.pop()[0]
            self.out.append(Instr(Op.ARRAY_PUT, (), (val, arr, idx)))
        elif op == 0x57:
            self.pop_units(1)
        elif op == 0x58:
            self.pop_units(2)
        elif op == 0x59:
            a = self.pop_units(1)
            self.stack += a + a
        elif op == 0x5A:
            a, b = self.pop_units(1), self.pop_units(1)
            self.stack += a + b + a
        elif op == 0x5B:
            a, b = self.pop_units(1), self.pop_units(2)
            self.stack += a + b + a
        elif op == 0x5C:
            a = self.pop_units(2)
            self.stack += a + a
        elif op == 0x5D:
            a, b = self.pop_units(2), self.pop_units(1)
            self.stack += a + b + a
        elif op == 0x5E:
            a, b = self.pop_units(2), self.pop_units(2)
            self.stack += a + b + a
        elif op == 0x5F:
            a, b = self.pop_units(1), self.pop_units(1)
            self.stack += a + b
        elif op == 0x84:
            slot = u1()
            self.out.append(Instr(Op.OTHER, (slot,), (slot,)))
        elif 0x60 <= op <= 0x93:
            if op in _UNARY:
                reads = (self.pop()[0],)
            else:
                b, a = self.pop()[0], self.pop()[0]
                reads = (a, b)
            self.push_new(Op.OTHER, 2 if op in _CAT2_ARITH else 1, reads)
        elif 0x94 <= op <= 0x98:
            b, a = self.pop()[0], self.pop()[0]
            self.push_new(Op.OTHER, 1, (a, b))
        elif 0x99 <= op <= 0x9E or op in (0xC6, 0xC7):
            self.out.append(Instr(Op.BRANCH, (), (self.pop()[0],)))
        elif 0x9F <= op <= 0xA6:
            b, a = self.pop()[0], self.pop()[0]
            self.out.append(Instr(Op.BRANCH, (), (a, b)))
        elif op in (0xA7, 0xC8):
            self.out.append(Instr(Op.BRANCH))
        elif op in (0xA8, 0xC9):
            self.out.append(Instr(Op.BRANCH))
            self.stack.append((self.fresh(), 1))
        elif op == 0xA9:
            self.out.append(Instr(Op.BRANCH, (), (u1(),)))
        elif op in (0xAA, 0xAB):
            self.out.append(Instr(Op.BRANCH, (), (self.pop()[0],)))
        elif 0xAC <= op <= 0xB0:
            self.out.append(Instr(Op.RETURN, (), (self.pop()[0],)))
        elif op == 0xB1:
            self.out.append(Instr(Op.RETURN))
        elif op == 0xB2:
            f = self.rd.field_ref(u2())
            self.push_new(Op.FIELD_GET, _cat(f.type), field=f)
        elif op == 0xB3:
            f = self.rd.field_ref(u2())
            self.out.append(Instr(Op.OTHER, (), (self.pop()[0],), field=f))
        elif op == 0xB4:
            f = self.rd.field_ref(u2())
            obj = self.pop()[0]
            self.push_new(Op.FIELD_GET, _cat(f.type), (obj,), field=f)
        elif op == 0xB5:
            f = self.rd.field_ref(u2())
            val, obj = self.pop()[0], self.pop()[0]
            self.out.append(Instr(Op.OTHER, (), (obj, val), field=f))
        elif op in (0xB6, 0xB7, 0xB9):
            self._invoke(self.rd.method_ref(u2()), False)
        elif op == 0xB8:
            self._invoke(self.rd.method_ref(u2()), True)
        elif op == 0xBA:
            e = self.rd._entry(u2(), INDY)
            _, desc = self.rd.nat(e[2])
            try:
                params, ret = split_params(desc)
            except ValueError as exc:
                raise MalformedConstantPool(str(exc)) from None
            args = tuple(self.pop()[0] for _ in params)[::-1]
            self.out.append(Instr(Op.OTHER, (), args))
            if ret != "V":
                self.push_new(Op.MOVE_RESULT, _cat(ret))
        elif op == 0xBB:
            self.push_new(Op.NEW_INSTANCE, type=self.rd.class_name(u2()))
        elif op == 0xBC:
            size = self.pop()[0]
            self.push_new(Op.NEW_ARRAY, 1, (size,), type=_NEWARRAY_TYPES.get(u1(), "[?"))
        elif op == 0xBD:
            size = self.pop()[0]
            elem = self.rd.class_name(u2())
            self.push_new(Op.NEW_ARRAY, 1, (size,), type="[" + elem)
        elif op in (0xBE, 0xC0, 0xC1):
            if op != 0xBE:
                self.rd._entry(u2(), CLASS)
            self.push_new(Op.OTHER, 1, (self.pop()[0],))
        elif op in (0xBF, 0xC2, 0xC3):
            self.out.append(Instr(Op.OTHER, (), (self.pop()[0],)))
        elif op == 0xC4:
            inner = code[pc + 1]
            slot = struct.unpack_from(">H", code, pc + 2)[0]
            if inner == 0x84:
                self.out.append(Instr(Op.OTHER, (slot,), (slot,)))
            elif 0x15 <= inner <= 0x19:
                self._load(slot, 2 if inner in (0x16, 0x18) else 1)
            elif 0x36 <= inner <= 0x3A:
                self._store(slot)
            elif inner == 0xA9:
                self.out.append(Instr(Op.BRANCH, (), (slot,)))
            else:
                raise MalformedCode(f"wide applied to opcode 0x{inner:02x}")
        elif op == 0xC5:
            self.rd._entry(u2(), CLASS)
            dims = [self.pop()[0] for _ in range(code[pc + 3])]
            self.push_new(Op.OTHER, 1, tuple(dims))
        # 0xca breakpoint, 0xfe/0xff impdep: no effect
