"""Modified UTF-8 as used by DEX string data and class-file constants."""

from __future__ import annotations

REPLACEMENT = "�"


def decode(raw: bytes) -> tuple[str, bool]:
    """Decode MUTF-8 bytes. Returns ``(text, had_errors)``.

    Invalid sequences and unpaired surrogates become U+FFFD.
    """
    if not raw:
        return "", False
    if max(raw) < 0x80:
        return raw.decode("ascii"), False
    if b"\xed" not in raw and b"\xc0\x80" not in raw and max(raw) < 0xF0:
        try:
            return raw.decode("utf-8"), False
        except UnicodeDecodeError:
            pass
    return _slow(raw)


def _slow(raw: bytes) -> tuple[str, bool]:
    units: list[int] = []
    bad = False
    i, n = 0, len(raw)
    while i < n:
        b = raw[i]
        if b < 0x80 and b != 0:
            units.append(b)
            i += 1
        elif b & 0xE0 == 0xC0 and i + 1 < n and raw[i + 1] & 0xC0 == 0x80:
            units.append(((b & 0x1F) << 6) | (raw[i + 1] & 0x3F))
            i += 2
        elif b & 0xF0 == 0xE0 and i + 2 < n and raw[i + 1] & 0xC0 == 0x80 and raw[i + 2] & 0xC0 == 0x80:
            units.append(((b & 0x0F) << 12) | ((raw[i + 1] & 0x3F) << 6) | (raw[i + 2] & 0x3F))
            i += 3
        else:
            units.append(0xFFFD)
            bad = True
            i += 1

    out = []
    j = 0
    while j < len(units):
        u = units[j]
        if 0xD800 <= u <= 0xDBFF and j + 1 < len(units) and 0xDC00 <= units[j + 1] <= 0xDFFF:
            out.append(chr(0x10000 + ((u - 0xD800) << 10) + (units[j + 1] - 0xDC00)))
            j += 2
            continue
        if 0xD800 <= u <= 0xDFFF:
            out.append(REPLACEMENT)
            bad = True
        else:
            out.append(chr(u))
        j += 1
    return "".join(out), bad


def encode(text: str) -> bytes:
    """Encode text as MUTF-8 (NUL as C0 80, supplementary chars as surrogate pairs)."""
    out = bytearray()
    for ch in text:
        cp = ord(ch)
        if cp > 0xFFFF:
            cp -= 0x10000
            for unit in (0xD800 + (cp >> 10), 0xDC00 + (cp & 0x3FF)):
                out += bytes((0xE0 | (unit >> 12), 0x80 | ((unit >> 6) & 0x3F), 0x80 | (unit & 0x3F)))
        elif cp == 0:
            out += b"\xc0\x80"
        elif cp < 0x80:
            out.append(cp)
        elif cp < 0x800:
            out += bytes((0xC0 | (cp >> 6), 0x80 | (cp & 0x3F)))
        else:
            out += bytes((0xE0 | (cp >> 12), 0x80 | ((cp >> 6) & 0x3F), 0x80 | (cp & 0x3F)))
    return bytes(out)


def utf16_length(text: str) -> int:
    return sum(2 if ord(c) > 0xFFFF else 1 for c in text)
