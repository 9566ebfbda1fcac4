"""Assemble :class:`ClassSpec` lists into a valid DEX file."""

from __future__ import annotations

import hashlib
import struct
import zlib

from ..bytecode import mutf8
from ..bytecode.model import MethodRef
from .ir import ACC_CONSTRUCTOR, ACC_PRIVATE, ACC_STATIC, ClassSpec, MethodSpec, parse_field, parse_ref

_INVOKE_OPS = {"virtual": 0x6E, "super": 0x6F, "direct": 0x70, "static": 0x71, "interface": 0x72}


def _uleb(v: int) -> bytes:
    out = bytearray()
    while True:
        b = v & 0x7F
        v >>= 7
        if v:
            out.append(b | 0x80)
        else:
            out.append(b)
            return bytes(out)


def _sleb(v: int) -> bytes:
    out = bytearray()
    while True:
        b = v & 0x7F
        v >>= 7
        if (v == 0 and not b & 0x40) or (v == -1 and b & 0x40):
            out.append(b)
            return bytes(out)
        out.append(b | 0x80)


def _shorty(t: str) -> str:
    return "L" if t[0] in "L[" else t


def _utf16_key(s: str) -> bytes:
    return s.encode("utf-16-be", "surrogatepass")


class _Pools:
    def __init__(self) -> None:
        self.strings: set[str] = set()
        self.types: set[str] = set()
        self.protos: set[tuple[str, tuple[str, ...]]] = set()
        self.fields: set[tuple[str, str, str]] = set()
        self.methods: set[MethodRef] = set()

    def add_type(self, t: str) -> None:
        self.types.add(t)
        self.strings.add(t)

    def add_proto(self, params: tuple[str, ...], ret: str) -> None:
        self.protos.add((ret, params))
        self.strings.add(_shorty(ret) + "".join(_shorty(p) for p in params))
        self.add_type(ret)
        for p in params:
            self.add_type(p)

    def add_method(self, ref: MethodRef) -> None:
        self.methods.add(ref)
        self.add_type(ref.owner)
        self.strings.add(ref.name)
        self.add_proto(ref.params, ref.ret)

    def add_field(self, owner: str, name: str, typ: str) -> None:
        self.fields.add((owner, name, typ))
        self.add_type(owner)
        self.add_type(typ)
        self.strings.add(name)

    def freeze(self) -> None:
        self.string_list = sorted(self.strings, key=_utf16_key)
        self.sidx = {s: i for i, s in enumerate(self.string_list)}
        self.type_list = sorted(self.types, key=lambda t: self.sidx[t])
        self.tidx = {t: i for i, t in enumerate(self.type_list)}
        self.proto_list = sorted(self.protos, key=lambda p: (self.tidx[p[0]], [self.tidx[x] for x in p[1]]))
        self.pidx = {p: i for i, p in enumerate(self.proto_list)}
        self.field_list = sorted(self.fields, key=lambda f: (self.tidx[f[0]], self.sidx[f[1]], self.tidx[f[2]]))
        self.fidx = {f: i for i, f in enumerate(self.field_list)}
        self.method_list = sorted(
            self.methods,
            key=lambda m: (self.tidx[m.owner], self.sidx[m.name], self.pidx[(m.ret, m.params)]),
        )
        self.midx = {m: i for i, m in enumerate(self.method_list)}


def _collect(classes: list[ClassSpec]) -> _Pools:
    pools = _Pools()
    for c in classes:
        pools.add_type(c.name)
        if c.superclass:
            pools.add_type(c.superclass)
        for i in c.interfaces:
            pools.add_type(i)
        for m in c.methods:
            pools.add_method(MethodRef(c.name, m.name, m.params, m.ret))
            for op in m.code or ():
                if op[0] == "const-string":
                    pools.strings.add(op[2])
                elif op[0] == "invoke":
                    pools.add_method(parse_ref(op[2]))
                elif op[0] in ("new-instance", "new-array"):
                    pools.add_type(op[-1])
                elif op[0] == "sget":
                    pools.add_field(*parse_field(op[2]))
                elif op[0] == "try" and op[4]:
                    pools.add_type(op[4])
    pools.freeze()
    return pools


class _CodeAsm:
    """Two-pass assembler for one method body."""

    def __init__(self, pools: _Pools, m: MethodSpec) -> None:
        self.pools = pools
        self.m = m
        wide_pad = 1 if any(op[0] == "invoke" and any(p in "JD" for p in parse_ref(op[2]).params) for op in m.code) else 0
        self.locals = m.local_count() + wide_pad
        self.ins = m.arg_slots()
        self.registers = self.locals + self.ins

    def reg(self, r) -> int:
        if isinstance(r, str):
            return self.locals + int(r[1:])
        return r

    def _size(self, op: tuple) -> int:
        k = op[0]
        if k in ("label", "try"):
            return 0
        if k in ("move-result", "move-exception", "return-void", "return", "return-object"):
            return 1
        if k == "const":
            return 1 if -8 <= op[2] <= 7 and self.reg(op[1]) < 16 else (2 if -32768 <= op[2] <= 32767 else 3)
        if k in ("const-string", "new-instance", "sget", "if-eqz", "if-nez", "goto", "new-array", "aput", "move"):
            return 2
        if k == "fill-array":
            return 3
        if k == "invoke":
            return 3
        raise ValueError(f"unknown IR op {k}")

    def assemble(self) -> tuple[bytes, int, list]:
        code = self.m.code
        labels: dict[str, int] = {}
        pc = 0
        for op in code:
            if op[0] == "label":
                labels[op[1]] = pc
            pc += self._size(op)
        payloads: list[tuple[int, bytes]] = []
        payload_pc = pc + (pc % 2)
        units: list[int] = []
        last_ret = "V"
        for op in code:
            k = op[0]
            here = len(units)
            if k in ("label", "try"):
                continue
            if k == "const-string":
                units += [0x1A | self.reg(op[1]) << 8, self.pools.sidx[op[2]]]
            elif k == "const":
                a, v = self.reg(op[1]), op[2]
                size = self._size(op)
                if size == 1:
                    units.append(0x12 | a << 8 | (v & 0xF) << 12)
                elif size == 2:
                    units += [0x13 | a << 8, v & 0xFFFF]
                else:
                    units += [0x14 | a << 8, v & 0xFFFF, (v >> 16) & 0xFFFF]
            elif k == "invoke":
                ref = parse_ref(op[2])
                regs: list[int] = []
                args = [self.reg(r) for r in op[3]]
                i = 0
                if op[1] != "static":
                    regs.append(args[0])
                    i = 1
                for p in ref.params:
                    regs.append(args[i])
                    if p in ("J", "D"):
                        regs.append(args[i] + 1)
                    i += 1
                opcode = _INVOKE_OPS[op[1]]
                midx = self.pools.midx[ref]
                if len(regs) <= 5 and all(r < 16 for r in regs):
                    padded = regs + [0] * (5 - len(regs))
                    units += [
                        opcode | padded[4] << 8 | len(regs) << 12,
                        midx,
                        padded[0] | padded[1] << 4 | padded[2] << 8 | padded[3] << 12,
                    ]
                else:
                    if regs != list(range(regs[0], regs[0] + len(regs))):
                        raise ValueError("range invoke needs contiguous registers")
                    units += [(opcode + 6) | len(regs) << 8, midx, regs[0]]
                last_ret = ref.ret
            elif k == "move-result":
                opcode = 0x0C if last_ret[0] in "L[" else (0x0B if last_ret in "JD" else 0x0A)
                units.append(opcode | self.reg(op[1]) << 8)
            elif k == "move-exception":
                units.append(0x0D | self.reg(op[1]) << 8)
            elif k == "move":
                units += [0x08 | self.reg(op[1]) << 8, self.reg(op[2])]
            elif k == "new-instance":
                units += [0x22 | self.reg(op[1]) << 8, self.pools.tidx[op[2]]]
            elif k == "new-array":
                units += [0x23 | self.reg(op[1]) << 8 | self.reg(op[2]) << 12, self.pools.tidx[op[3]]]
            elif k == "fill-array":
                rel = payload_pc - here
                units += [0x26 | self.reg(op[1]) << 8, rel & 0xFFFF, (rel >> 16) & 0xFFFF]
                data = bytes(op[2])
                body = data + b"\x00" * (len(data) % 2)
                payload = [0x0300, 1, len(data) & 0xFFFF, len(data) >> 16] + list(struct.unpack(f"<{len(body) // 2}H", body))
                payloads.append((payload_pc, payload))
                payload_pc += len(payload) + (len(payload) % 2)
            elif k == "aput":
                units += [0x4F | self.reg(op[1]) << 8, self.reg(op[2]) | self.reg(op[3]) << 8]
            elif k == "sget":
                owner, name, typ = parse_field(op[2])
                opcode = 0x62 if typ[0] in "L[" else (0x63 if typ == "Z" else 0x60)
                units += [opcode | self.reg(op[1]) << 8, self.pools.fidx[(owner, name, typ)]]
            elif k in ("if-eqz", "if-nez"):
                units += [(0x38 if k == "if-eqz" else 0x39) | self.reg(op[1]) << 8, (labels[op[2]] - here) & 0xFFFF]
            elif k == "goto":
                units += [0x29, (labels[op[1]] - here) & 0xFFFF]
            elif k == "return-void":
                units.append(0x0E)
            elif k == "return":
                units.append(0x0F | self.reg(op[1]) << 8)
            elif k == "return-object":
                units.append(0x11 | self.reg(op[1]) << 8)
        if payloads:
            if len(units) % 2:
                units.append(0)
            for at, payload in payloads:
                assert len(units) == at
                units += payload
                if len(payload) % 2:
                    units.append(0)
        tries = [(labels[op[1]], labels[op[2]], labels[op[3]], op[4]) for op in code if op[0] == "try"]
        return struct.pack(f"<{len(units)}H", *units), len(units), tries

    def code_item(self) -> bytes:
        insns, n, tries = self.assemble()
        outs = 5
        head = struct.pack("<HHHHII", self.registers, self.ins, outs, len(tries), 0, n)
        body = head + insns
        if tries:
            if n % 2:
                body += b"\x00\x00"
            handlers = bytearray(_uleb(len(tries)))
            items = bytearray()
            for start, end, handler, typ in tries:
                off = len(handlers)
                if typ:
                    handlers += _sleb(1) + _uleb(self.pools.tidx[typ]) + _uleb(handler)
                else:
                    handlers += _sleb(0) + _uleb(handler)
                items += struct.pack("<IHH", start, end - start, off)
            body += bytes(items) + bytes(handlers)
        return body


def build_dex(classes: list[ClassSpec], version: str = "035", corrupt: frozenset[str] = frozenset()) -> bytes:
    """Assemble a DEX file.

    Methods of classes named in ``corrupt`` start with a goto whose target lies
    outside the method, which a strict reader must reject.
    """
    pools = _collect(classes)
    n_str, n_type = len(pools.string_list), len(pools.type_list)
    n_proto, n_field, n_meth, n_cls = len(pools.proto_list), len(pools.field_list), len(pools.method_list), len(classes)

    off = 0x70
    string_ids_off = off
    off += 4 * n_str
    type_ids_off = off
    off += 4 * n_type
    proto_ids_off = off
    off += 12 * n_proto
    field_ids_off = off
    off += 8 * n_field
    method_ids_off = off
    off += 8 * n_meth
    class_defs_off = off
    off += 32 * n_cls
    data_off = off

    data = bytearray()

    def align4() -> None:
        while (data_off + len(data)) % 4:
            data.append(0)

    # code items
    code_offs: dict[tuple[str, str, str], int] = {}
    code_start = data_off + len(data)
    n_code = 0
    for c in classes:
        for m in c.methods:
            if m.code is None:
                continue
            align4()
            code_offs[(c.name, m.name, m.descriptor())] = data_off + len(data)
            item = _CodeAsm(pools, m).code_item()
            if c.name in corrupt:
                item = item[:16] + struct.pack("<Hh", 0x29, 0x7FFF) + item[20:]
            data += item
            n_code += 1

    # type lists
    align4()
    tl_start = data_off + len(data)
    tl_offs: dict[tuple[str, ...], int] = {}
    lists = {p for _, p in pools.proto_list if p} | {c.interfaces for c in classes if c.interfaces}
    for tl in sorted(lists, key=lambda t: [pools.tidx[x] for x in t]):
        align4()
        tl_offs[tl] = data_off + len(data)
        data += struct.pack(f"<I{len(tl)}H", len(tl), *[pools.tidx[x] for x in tl])

    # string data
    sd_start = data_off + len(data)
    str_offs = []
    for s in pools.string_list:
        str_offs.append(data_off + len(data))
        data += _uleb(mutf8.utf16_length(s)) + mutf8.encode(s) + b"\x00"

    # class data
    cd_start = data_off + len(data)
    cd_offs = []
    n_cd = 0
    for c in classes:
        direct, virtual = [], []
        for m in c.methods:
            ref = MethodRef(c.name, m.name, m.params, m.ret)
            is_direct = m.access & (ACC_STATIC | ACC_PRIVATE | ACC_CONSTRUCTOR) or m.name in ("<init>", "<clinit>")
            (direct if is_direct else virtual).append((pools.midx[ref], m))
        if not direct and not virtual:
            cd_offs.append(0)
            continue
        cd_offs.append(data_off + len(data))
        n_cd += 1
        data += _uleb(0) + _uleb(0) + _uleb(len(direct)) + _uleb(len(virtual))
        for group in (direct, virtual):
            prev = 0
            for idx, m in sorted(group, key=lambda t: t[0]):
                code_off = code_offs.get((c.name, m.name, m.descriptor()), 0)
                data += _uleb(idx - prev) + _uleb(m.access) + _uleb(code_off)
                prev = idx

    # map list
    align4()
    map_off = data_off + len(data)
    items = [(0x0000, 1, 0)]
    for typ, count, at in (
        (0x0001, n_str, string_ids_off),
        (0x0002, n_type, type_ids_off),
        (0x0003, n_proto, proto_ids_off),
        (0x0004, n_field, field_ids_off),
        (0x0005, n_meth, method_ids_off),
        (0x0006, n_cls, class_defs_off),
        (0x2001, n_code, code_start),
        (0x1001, len(tl_offs), tl_start),
        (0x2002, n_str, sd_start),
        (0x2000, n_cd, cd_start),
        (0x1000, 1, map_off),
    ):
        if count:
            items.append((typ, count, at))
    items.sort(key=lambda t: t[2])
    data += struct.pack("<I", len(items))
    for typ, count, at in items:
        data += struct.pack("<HHII", typ, 0, count, at)

    # id sections
    ids = bytearray()
    for o in str_offs:
        ids += struct.pack("<I", o)
    for t in pools.type_list:
        ids += struct.pack("<I", pools.sidx[t])
    for ret, params in pools.proto_list:
        shorty = _shorty(ret) + "".join(_shorty(p) for p in params)
        ids += struct.pack("<III", pools.sidx[shorty], pools.tidx[ret], tl_offs.get(params, 0))
    for owner, name, typ in pools.field_list:
        ids += struct.pack("<HHI", pools.tidx[owner], pools.tidx[typ], pools.sidx[name])
    for m in pools.method_list:
        ids += struct.pack("<HHI", pools.tidx[m.owner], pools.pidx[(m.ret, m.params)], pools.sidx[m.name])
    for c, cd in zip(classes, cd_offs):
        ids += struct.pack(
            "<8I",
            pools.tidx[c.name],
            c.access,
            pools.tidx[c.superclass] if c.superclass else 0xFFFFFFFF,
            tl_offs.get(c.interfaces, 0) if c.interfaces else 0,
            0xFFFFFFFF,
            0,
            cd,
            0,
        )
    assert 0x70 + len(ids) == data_off

    file_size = data_off + len(data)
    header = bytearray(0x70)
    header[0:8] = b"dex\n" + version.encode() + b"\x00"
    struct.pack_into(
        "<20I",
        header,
        32,
        file_size, 0x70, 0x12345678, 0, 0, map_off,
        n_str, string_ids_off if n_str else 0,
        n_type, type_ids_off if n_type else 0,
        n_proto, proto_ids_off if n_proto else 0,
        n_field, field_ids_off if n_field else 0,
        n_meth, method_ids_off if n_meth else 0,
        n_cls, class_defs_off if n_cls else 0,
        len(data), data_off,
    )
    blob = bytearray(header + ids + data)
    blob[12:32] = hashlib.sha1(bytes(blob[32:])).digest()
    struct.pack_into("<I", blob, 8, zlib.adler32(bytes(blob[12:])))
    return bytes(blob)
