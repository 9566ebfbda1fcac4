"""Intra-method constant resolution over straight-line code.

A register resolves to ``Known`` only when its nearest preceding definition is
a constant (possibly through register copies or a small set of pure library
calls) and no branch or exception-handler target lies between that definition
and the use. Everything else is ``Unknown``; a Known result is never wrong.
"""

from __future__ import annotations

import base64
import binascii

from ..errors import IndexOutOfRange
from .model import UNKNOWN, ConstArg, Instr, Known, MethodInfo, Op

_MAX_DEPTH = 24
_MAX_ARRAY = 1 << 16

_CHARSETS = {
    "utf-8": "utf-8",
    "utf8": "utf-8",
    "us-ascii": "ascii",
    "ascii": "ascii",
    "iso-8859-1": "latin-1",
    "utf-16": "utf-16-be",
    "utf-16be": "utf-16-be",
    "utf-16le": "utf-16-le",
}


def resolve_const_args(method: MethodInfo, invoke_index: int) -> tuple[ConstArg, ...]:
    """Resolve each declared parameter of the call at ``invoke_index``."""
    ins = method.instructions
    if not 0 <= invoke_index < len(ins) or ins[invoke_index].op is not Op.INVOKE:
        raise IndexOutOfRange(f"instruction {invoke_index} is not an invoke")
    call = ins[invoke_index]
    regs = call.reads if call.static else call.reads[1:]
    n = len(call.method.params) if call.method else len(regs)
    out = [resolve_register(method, invoke_index, r) for r in regs[:n]]
    out.extend([UNKNOWN] * (n - len(out)))
    return tuple(out)


def resolve_receiver(method: MethodInfo, invoke_index: int) -> ConstArg:
    call = method.instructions[invoke_index]
    if call.static or not call.reads:
        return UNKNOWN
    return resolve_register(method, invoke_index, call.reads[0])


def resolve_register(method: MethodInfo, at: int, reg: int, _depth: int = 0) -> ConstArg:
    """Value of ``reg`` immediately before instruction ``at`` executes."""
    return _resolve(method, at, reg, _depth)[0]


def _resolve(method: MethodInfo, at: int, reg: int, depth: int) -> tuple[ConstArg, bool]:
    """Returns the value and whether it is a mutable array.

    A mutable value is only Known if nothing else reads its register between
    the definition and the use, since any such read could alias and modify it.
    """
    if depth > _MAX_DEPTH:
        return UNKNOWN, False
    ins = method.instructions
    d = _find_def(ins, method.branch_targets, at, reg)
    if d is None:
        return UNKNOWN, False
    i = ins[d]
    if i.writes[0] != reg:
        return UNKNOWN, False  # high half of a wide pair
    if i.op in (Op.CONST_STRING, Op.CONST):
        return Known(i.value), False
    if i.op is Op.MOVE and i.reads:
        val, mutable = _resolve(method, d, i.reads[0], depth + 1)
    elif i.op is Op.MOVE_RESULT:
        val = _fold_call(method, d, depth)
        mutable = ins[d - 1].method.ret.startswith("[") if isinstance(val, Known) else False
    elif i.op is Op.NEW_ARRAY:
        return _array_value(method, d, at, reg, depth), True
    else:
        return UNKNOWN, False
    if mutable and isinstance(val, Known) and _read_between(ins, reg, d, at):
        return UNKNOWN, False
    return val, mutable


def _find_def(ins: tuple[Instr, ...], targets: frozenset[int], at: int, reg: int) -> int | None:
    if at in targets:
        return None
    for d in range(at - 1, -1, -1):
        if reg in ins[d].writes:
            return d
        if d in targets:
            return None
    return None


def _read_between(ins: tuple[Instr, ...], reg: int, lo: int, hi: int) -> bool:
    return any(reg in ins[p].reads for p in range(lo + 1, hi))


def _array_value(method: MethodInfo, d: int, at: int, reg: int, depth: int) -> ConstArg:
    ins = method.instructions
    alloc = ins[d]
    if alloc.type not in ("[B", "[Z") or not alloc.reads:
        return UNKNOWN
    size = resolve_register(method, d, alloc.reads[0], depth + 1)
    if not isinstance(size, Known) or not isinstance(size.value, int) or not 0 <= size.value <= _MAX_ARRAY:
        return UNKNOWN
    buf = bytearray(size.value)
    for p in range(d + 1, at):
        step = ins[p]
        if reg not in step.reads:
            continue
        if step.op is Op.FILL_ARRAY and step.reads == (reg,):
            width, payload = step.value
            if width != 1 or len(payload) > len(buf):
                return UNKNOWN
            buf[: len(payload)] = payload
        elif step.op is Op.ARRAY_PUT and len(step.reads) == 3 and step.reads[1] == reg and step.reads[0] != reg:
            idx = resolve_register(method, p, step.reads[2], depth + 1)
            val = resolve_register(method, p, step.reads[0], depth + 1)
            if not (isinstance(idx, Known) and isinstance(val, Known)):
                return UNKNOWN
            if not isinstance(idx.value, int) or not isinstance(val.value, int) or not 0 <= idx.value < len(buf):
                return UNKNOWN
            buf[idx.value] = val.value & 0xFF
        else:
            return UNKNOWN
    return Known(bytes(buf))


def _fold_call(method: MethodInfo, d: int, depth: int) -> ConstArg:
    ins = method.instructions
    if d == 0 or ins[d - 1].op is not Op.INVOKE or ins[d - 1].method is None:
        return UNKNOWN
    call = ins[d - 1]
    ref = call.method
    sig = (ref.owner, ref.name, ref.params, ref.ret)

    def arg(k: int) -> ConstArg:
        if k >= len(call.reads):
            return UNKNOWN
        return resolve_register(method, d - 1, call.reads[k], depth + 1)

    if ref.owner == "Ljava/lang/String;" and not call.static:
        recv = arg(0)
        if not (isinstance(recv, Known) and isinstance(recv.value, str)):
            return UNKNOWN
        if sig[1:] == ("getBytes", (), "[B"):
            return Known(recv.value.encode("utf-8", "surrogatepass"))
        if sig[1:] == ("getBytes", ("Ljava/lang/String;",), "[B"):
            cs = arg(1)
            if isinstance(cs, Known) and isinstance(cs.value, str) and cs.value.lower() in _CHARSETS:
                try:
                    return Known(recv.value.encode(_CHARSETS[cs.value.lower()]))
                except UnicodeEncodeError:
                    return UNKNOWN
            return UNKNOWN
        if sig[1:] == ("toCharArray", (), "[C"):
            return Known(recv.value)
        return UNKNOWN
    if sig == ("Landroid/util/Base64;", "decode", ("Ljava/lang/String;", "I"), "[B"):
        text = arg(0)
        if isinstance(text, Known) and isinstance(text.value, str):
            try:
                return Known(base64.b64decode(text.value + "=" * (-len(text.value) % 4), validate=False))
            except (binascii.Error, ValueError):
                return UNKNOWN
        return UNKNOWN
    if call.static and ref.name == "valueOf" and ref.owner in (
        "Ljava/lang/Integer;",
        "Ljava/lang/Boolean;",
        "Ljava/lang/Long;",
    ):
        v = arg(0)
        return v if isinstance(v, Known) and isinstance(v.value, int) else UNKNOWN
    return UNKNOWN
