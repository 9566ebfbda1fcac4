"""Android manifest decoding: binary AXML (APK) and plain XML (AAR).

Both encodings are first lowered to a small element tree with attributes keyed
``android:<name>`` (or the bare name for un-namespaced attributes); the same
builder then turns that tree into a :class:`ManifestModel`.
"""

from __future__ import annotations

import struct
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from importlib import resources
from typing import Iterable

from .errors import InvalidManifest, NotAxml, StringPoolOutOfRange, TruncatedChunk, XmlSyntaxError

ANDROID_NS = "http://schemas.android.com/apk/res/android"

RES_XML_TYPE = 0x0003
RES_STRING_POOL_TYPE = 0x0001
RES_XML_RESOURCE_MAP_TYPE = 0x0180
RES_XML_START_NAMESPACE_TYPE = 0x0100
RES_XML_END_NAMESPACE_TYPE = 0x0101
RES_XML_START_ELEMENT_TYPE = 0x0102
RES_XML_END_ELEMENT_TYPE = 0x0103

TYPE_NULL = 0x00
TYPE_REFERENCE = 0x01
TYPE_ATTRIBUTE = 0x02
TYPE_STRING = 0x03
TYPE_FLOAT = 0x04
TYPE_INT_DEC = 0x10
TYPE_INT_HEX = 0x11
TYPE_INT_BOOLEAN = 0x12

_NO_INDEX = 0xFFFFFFFF
_UTF8_FLAG = 0x100

# android.R.attr ids for the attributes the model reads (platform constants).
ATTRIBUTE_IDS = {
    "theme": 0x01010000,
    "label": 0x01010001,
    "icon": 0x01010002,
    "name": 0x01010003,
    "permission": 0x01010006,
    "protectionLevel": 0x01010009,
    "hasCode": 0x0101000C,
    "enabled": 0x0101000E,
    "debuggable": 0x0101000F,
    "exported": 0x01010010,
    "authorities": 0x01010018,
    "grantUriPermissions": 0x0101001B,
    "priority": 0x0101001C,
    "mimeType": 0x01010026,
    "scheme": 0x01010027,
    "host": 0x01010028,
    "port": 0x01010029,
    "path": 0x0101002A,
    "pathPrefix": 0x0101002B,
    "pathPattern": 0x0101002C,
    "minSdkVersion": 0x0101020C,
    "versionCode": 0x0101021B,
    "versionName": 0x0101021C,
    "targetSdkVersion": 0x01010270,
    "maxSdkVersion": 0x01010271,
    "allowBackup": 0x01010280,
    "filterTouchesWhenObscured": 0x010102C4,
    "usesCleartextTraffic": 0x010104EC,
    "networkSecurityConfig": 0x01010527,
}
_ATTRIBUTE_NAMES = {v: k for k, v in ATTRIBUTE_IDS.items()}


class ComponentKind(str, Enum):
    ACTIVITY = "activity"
    SERVICE = "service"
    RECEIVER = "receiver"
    PROVIDER = "provider"


_COMPONENT_TAGS = {
    "activity": ComponentKind.ACTIVITY,
    "activity-alias": ComponentKind.ACTIVITY,
    "service": ComponentKind.SERVICE,
    "receiver": ComponentKind.RECEIVER,
    "provider": ComponentKind.PROVIDER,
}


@dataclass(frozen=True)
class ResourceRef:
    """An unresolved ``@0x7f...`` reference from a binary manifest."""

    res_id: int

    def __str__(self) -> str:
        return f"@0x{self.res_id:08x}"


@dataclass(frozen=True)
class IntentFilter:
    actions: tuple[str, ...] = ()
    categories: tuple[str, ...] = ()
    schemes: tuple[str, ...] = ()
    hosts: tuple[str, ...] = ()

    @property
    def is_launcher(self) -> bool:
        return "android.intent.action.MAIN" in self.actions and (
            "android.intent.category.LAUNCHER" in self.categories or not self.schemes
        )


@dataclass(frozen=True)
class PermissionDecl:
    name: str
    is_dangerous: bool
    is_custom: bool


@dataclass(frozen=True)
class ComponentDecl:
    kind: ComponentKind
    name: str
    exported: bool
    exported_provenance: str  # "explicit", "implicit-legacy" or "implicit-default"
    intent_filters: tuple[IntentFilter, ...] = ()
    permission: str | None = None

    @property
    def custom_schemes(self) -> tuple[str, ...]:
        out = []
        for f in self.intent_filters:
            out.extend(s for s in f.schemes if s.lower() not in ("http", "https") and s not in out)
        return tuple(out)

    @property
    def launcher_only(self) -> bool:
        return bool(self.intent_filters) and all(f.is_launcher for f in self.intent_filters)


@dataclass(frozen=True)
class ApplicationFlags:
    allow_backup: bool | None = None
    debuggable: bool | None = None
    uses_cleartext_traffic: bool | None = None
    network_security_config: str | None = None


@dataclass(frozen=True)
class ManifestModel:
    package_name: str
    min_sdk: int | None = None
    target_sdk: int | None = None
    permissions: tuple[PermissionDecl, ...] = ()
    components: tuple[ComponentDecl, ...] = ()
    app_flags: ApplicationFlags = field(default_factory=ApplicationFlags)
    custom_permissions_defined: tuple[str, ...] = ()
    split_name: str | None = None
    extras: tuple[tuple[str, str, str], ...] = ()
    # True when any element sets android:filterTouchesWhenObscured="true"
    filters_obscured_touches: bool = False

    def permission_names(self) -> list[str]:
        return [p.name for p in self.permissions]

    def requests(self, permission: str) -> bool:
        short = permission.rsplit(".", 1)[-1]
        return any(p.name == permission or p.name == "android.permission." + short for p in self.permissions)


# -- dangerous permissions ---------------------------------------------------


@lru_cache(maxsize=1)
def _builtin_dangerous() -> frozenset[str]:
    text = resources.files("masvscan.data").joinpath("dangerous_permissions.txt").read_text("utf-8")
    return frozenset(
        line.strip() for line in text.splitlines() if line.strip() and not line.lstrip().startswith("#")
    )


def dangerous_permission_set(config: Iterable[str] | None = None) -> frozenset[str]:
    if config is not None:
        return frozenset(config)
    return _builtin_dangerous()


def is_dangerous(name: str, dangerous: frozenset[str]) -> bool:
    if name in dangerous:
        return True
    return name.startswith("android.permission.") and name.rsplit(".", 1)[-1] in dangerous


def is_custom_permission(name: str) -> bool:
    return not name.startswith("android.")


MAX_DEPTH = 256  # real manifests nest a handful of levels

# -- generic tree ------------------------------------------------------------


@dataclass
class Node:
    tag: str
    attrs: dict[str, object] = field(default_factory=dict)
    children: list[Node] = field(default_factory=list)

    def iter(self, tag: str | None = None):
        stack = [self]
        while stack:
            node = stack.pop()
            if tag is None or node.tag == tag:
                yield node
            stack.extend(reversed(node.children))


def _as_text(value: object) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def _as_bool(value: object) -> bool | None:
    if isinstance(value, bool):
        return value
    if isinstance(value, str):
        v = value.strip().lower()
        if v == "true":
            return True
        if v == "false":
            return False
    return None


def _as_int(value: object) -> int | None:
    if isinstance(value, bool):
        return None
    if isinstance(value, int):
        return value
    if isinstance(value, str):
        try:
            return int(value.strip(), 0)
        except ValueError:
            return None
    return None


def _expand_name(name: str, package: str) -> str:
    if name.startswith("."):
        return package + name
    if "." not in name:
        return f"{package}.{name}"
    return name


_MODELLED = {
    "manifest": {"package", "split"},
    "uses-sdk": {"android:minSdkVersion", "android:targetSdkVersion"},
    "application": {
        "android:allowBackup",
        "android:debuggable",
        "android:usesCleartextTraffic",
        "android:networkSecurityConfig",
    },
}


def build_model(root: Node, dangerous: frozenset[str] | None = None) -> ManifestModel:
    """Turn a decoded element tree into a ManifestModel."""
    if root.tag != "manifest":
        raise InvalidManifest(f"root element is <{root.tag}>, expected <manifest>")
    package = _as_text(root.attrs.get("package", "")).strip()
    if not package:
        raise InvalidManifest("manifest has no package attribute")
    dangerous = dangerous_permission_set() if dangerous is None else dangerous

    extras: list[tuple[str, str, str]] = []
    for node in root.iter():
        known = _MODELLED.get(node.tag)
        if known is None:
            continue
        for k, v in node.attrs.items():
            if k not in known and not k.startswith("xmlns"):
                extras.append((node.tag, k, _as_text(v)))

    min_sdk = target_sdk = None
    for sdk in root.iter("uses-sdk"):
        min_sdk = _as_int(sdk.attrs.get("android:minSdkVersion"))
        target_sdk = _as_int(sdk.attrs.get("android:targetSdkVersion"))
        break

    perms: list[PermissionDecl] = []
    seen: set[str] = set()
    for tag in ("uses-permission", "uses-permission-sdk-23", "uses-permission-sdk-m"):
        for node in root.iter(tag):
            name = _as_text(node.attrs.get("android:name", "")).strip()
            if name and name not in seen:
                seen.add(name)
                perms.append(PermissionDecl(name, is_dangerous(name, dangerous), is_custom_permission(name)))

    defined = tuple(
        _as_text(n.attrs["android:name"]) for n in root.iter("permission") if "android:name" in n.attrs
    )

    flags = ApplicationFlags()
    components: list[ComponentDecl] = []
    for app in root.iter("application"):
        nsc = app.attrs.get("android:networkSecurityConfig")
        flags = ApplicationFlags(
            allow_backup=_as_bool(app.attrs.get("android:allowBackup")),
            debuggable=_as_bool(app.attrs.get("android:debuggable")),
            uses_cleartext_traffic=_as_bool(app.attrs.get("android:usesCleartextTraffic")),
            network_security_config=None if nsc is None else _as_text(nsc),
        )
        for child in app.children:
            kind = _COMPONENT_TAGS.get(child.tag)
            if kind is None:
                continue
            raw = _as_text(child.attrs.get("android:name", "")).strip()
            if not raw:
                continue
            filters = tuple(_intent_filter(f) for f in child.children if f.tag == "intent-filter")
            explicit = _as_bool(child.attrs.get("android:exported"))
            if explicit is not None:
                exported, prov = explicit, "explicit"
            elif filters:
                exported, prov = True, "implicit-legacy"
            else:
                exported, prov = False, "implicit-default"
            perm = child.attrs.get("android:permission")
            components.append(
                ComponentDecl(
                    kind=kind,
                    name=_expand_name(raw, package),
                    exported=exported,
                    exported_provenance=prov,
                    intent_filters=filters,
                    permission=None if perm is None else _as_text(perm),
                )
            )
        break

    split = root.attrs.get("split")
    obscured = any(_as_bool(n.attrs.get("android:filterTouchesWhenObscured")) for n in root.iter())
    return ManifestModel(
        package_name=package,
        min_sdk=min_sdk,
        target_sdk=target_sdk,
        permissions=tuple(perms),
        components=tuple(components),
        app_flags=flags,
        custom_permissions_defined=defined,
        split_name=None if split is None else _as_text(split),
        extras=tuple(extras),
        filters_obscured_touches=obscured,
    )


def _intent_filter(node: Node) -> IntentFilter:
    acts, cats, schemes, hosts = [], [], [], []
    for c in node.children:
        if c.tag == "action" and "android:name" in c.attrs:
            acts.append(_as_text(c.attrs["android:name"]))
        elif c.tag == "category" and "android:name" in c.attrs:
            cats.append(_as_text(c.attrs["android:name"]))
        elif c.tag == "data":
            if "android:scheme" in c.attrs:
                schemes.append(_as_text(c.attrs["android:scheme"]))
            if "android:host" in c.attrs:
                hosts.append(_as_text(c.attrs["android:host"]))
    return IntentFilter(tuple(acts), tuple(cats), tuple(schemes), tuple(hosts))


# -- plain text --------------------------------------------------------------


def parse_plain_tree(text: str | bytes) -> Node:
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise XmlSyntaxError(str(exc)) from exc

    def lower(el: ET.Element) -> Node:
        attrs: dict[str, object] = {}
        for k, v in el.attrib.items():
            if k.startswith("{"):
                uri, local = k[1:].split("}", 1)
                attrs["android:" + local if uri == ANDROID_NS else k] = v
            else:
                attrs[k] = v
        tag = el.tag.split("}", 1)[-1] if isinstance(el.tag, str) else ""
        return Node(tag, attrs)

    out = lower(root)
    stack = [(root, out, 1)]
    while stack:
        el, node, depth = stack.pop()
        if depth > MAX_DEPTH:
            raise InvalidManifest(f"elements nested deeper than {MAX_DEPTH}")
        for c in el:
            if isinstance(c.tag, str):
                child = lower(c)
                node.children.append(child)
                stack.append((c, child, depth + 1))
    return out


def parse_plain_manifest(text: str | bytes, dangerous: frozenset[str] | None = None) -> ManifestModel:
    return build_model(parse_plain_tree(text), dangerous)


# -- binary ------------------------------------------------------------------


class _StringPool:
    def __init__(self, data: bytes, start: int, size: int, header_size: int):
        if header_size < 28 or start + 28 > len(data):
            raise TruncatedChunk("string pool header truncated")
        count, _styles, flags, strings_start, _styles_start = struct.unpack_from("<5I", data, start + 8)
        if count * 4 > size:
            raise TruncatedChunk(f"string pool declares {count} strings in {size} bytes")
        self._data = data
        self._start = start
        self._end = start + size
        self._utf8 = bool(flags & _UTF8_FLAG)
        self._offsets = struct.unpack_from(f"<{count}I", data, start + header_size)
        self._base = start + strings_start
        self._cache: dict[int, str] = {}

    def __len__(self) -> int:
        return len(self._offsets)

    def get(self, idx: int) -> str:
        if idx == _NO_INDEX:
            return ""
        if idx >= len(self._offsets):
            raise StringPoolOutOfRange(f"string index {idx} beyond pool of {len(self._offsets)}")
        hit = self._cache.get(idx)
        if hit is None:
            hit = self._cache[idx] = self._decode(self._base + self._offsets[idx])
        return hit

    def _decode(self, pos: int) -> str:
        d, end = self._data, self._end
        try:
            if self._utf8:
                pos = self._skip_len8(pos)  # utf-16 length, unused
                n, pos = self._len8(pos)
                if pos + n > end:
                    raise StringPoolOutOfRange("string runs past pool")
                return d[pos : pos + n].decode("utf-8", "replace")
            n = struct.unpack_from("<H", d, pos)[0]
            pos += 2
            if n & 0x8000:
                n = ((n & 0x7FFF) << 16) | struct.unpack_from("<H", d, pos)[0]
                pos += 2
            if pos + 2 * n > end:
                raise StringPoolOutOfRange("string runs past pool")
            return d[pos : pos + 2 * n].decode("utf-16-le", "replace")
        except (struct.error, IndexError) as exc:
            raise StringPoolOutOfRange(f"string header out of range: {exc}") from exc

    def _len8(self, pos: int) -> tuple[int, int]:
        n = self._data[pos]
        if n & 0x80:
            n = ((n & 0x7F) << 8) | self._data[pos + 1]
            return n, pos + 2
        return n, pos + 1

    def _skip_len8(self, pos: int) -> int:
        if pos >= self._end:
            raise StringPoolOutOfRange("string offset beyond pool")
        return self._len8(pos)[1]


def _typed_value(pool: _StringPool, raw: int, dtype: int, data: int) -> object:
    if dtype == TYPE_STRING:
        return pool.get(raw if raw != _NO_INDEX else data)
    if dtype == TYPE_INT_BOOLEAN:
        return data != 0
    if dtype in (TYPE_INT_DEC, TYPE_INT_HEX):
        return struct.unpack("<i", struct.pack("<I", data))[0]
    if dtype == TYPE_REFERENCE:
        return ResourceRef(data)
    if dtype == TYPE_ATTRIBUTE:
        return f"?0x{data:08x}"
    if dtype == TYPE_FLOAT:
        return struct.unpack("<f", struct.pack("<I", data))[0]
    if raw != _NO_INDEX:
        return pool.get(raw)
    return data


def parse_axml_tree(data: bytes) -> Node:
    """Decode binary AXML into an element tree (no manifest semantics)."""
    if len(data) < 8:
        raise NotAxml("input shorter than a chunk header")
    ctype, hsize, total = struct.unpack_from("<HHI", data, 0)
    if ctype != RES_XML_TYPE:
        raise NotAxml(f"chunk type {ctype:#06x}, expected 0x0003")
    if total > len(data):
        raise TruncatedChunk(f"document declares {total} bytes, have {len(data)}")
    if hsize < 8 or hsize > total:
        raise TruncatedChunk("bad document header size")
    try:
        return _walk_chunks(data, hsize, total)
    except (struct.error, IndexError) as exc:
        raise TruncatedChunk(str(exc)) from exc


def _walk_chunks(data: bytes, pos: int, end: int) -> Node:
    pool: _StringPool | None = None
    resmap: tuple[int, ...] = ()
    namespaces: dict[str, str] = {}
    stack: list[Node] = []
    roots: list[Node] = []

    def string(idx: int) -> str:
        if pool is None:
            raise TruncatedChunk("element chunk before string pool")
        return pool.get(idx)

    while pos + 8 <= end:
        ctype, hsize, size = struct.unpack_from("<HHI", data, pos)
        if size < 8 or hsize < 8 or hsize > size or pos + size > end:
            raise TruncatedChunk(f"chunk {ctype:#06x} at {pos:#x} has bad size {size}")
        if ctype == RES_STRING_POOL_TYPE:
            pool = _StringPool(data, pos, size, hsize)
        elif ctype == RES_XML_RESOURCE_MAP_TYPE:
            n = (size - hsize) // 4
            resmap = struct.unpack_from(f"<{n}I", data, pos + hsize)
        elif ctype == RES_XML_START_NAMESPACE_TYPE:
            prefix, uri = struct.unpack_from("<II", data, pos + hsize)
            namespaces[string(uri)] = string(prefix)
        elif ctype == RES_XML_START_ELEMENT_TYPE:
            if size < hsize + 20:
                raise TruncatedChunk("start element chunk too small")
            _ns, name, a_start, a_size, a_count = struct.unpack_from("<IIHHH", data, pos + hsize)
            node = Node(string(name))
            a_size = a_size or 20
            base = pos + hsize + a_start
            if a_size < 20 or base + a_count * a_size > pos + size:
                raise TruncatedChunk("attributes overrun element chunk")
            for i in range(a_count):
                a_ns, a_name, a_raw, _vsize, _res0, a_type, a_data = struct.unpack_from(
                    "<IIIHBBI", data, base + i * a_size
                )
                key = _attr_key(string, resmap, namespaces, a_ns, a_name)
                node.attrs[key] = _typed_value(pool, a_raw, a_type, a_data)
            if len(stack) >= MAX_DEPTH:
                raise InvalidManifest(f"elements nested deeper than {MAX_DEPTH}")
            if stack:
                stack[-1].children.append(node)
            else:
                roots.append(node)
            stack.append(node)
        elif ctype == RES_XML_END_ELEMENT_TYPE:
            if stack:
                stack.pop()
        pos += size

    for r in roots:
        if r.tag == "manifest":
            return r
    if roots:
        return roots[0]
    raise InvalidManifest("document contains no elements")


def _attr_key(string, resmap, namespaces, ns_idx: int, name_idx: int) -> str:
    if name_idx < len(resmap):
        known = _ATTRIBUTE_NAMES.get(resmap[name_idx])
        if known is not None:
            return "android:" + known
    name = string(name_idx)
    if ns_idx == _NO_INDEX:
        return name
    uri = string(ns_idx)
    if uri == ANDROID_NS:
        return "android:" + name
    return f"{{{uri}}}{name}"


def parse_binary_manifest(data: bytes, dangerous: frozenset[str] | None = None) -> ManifestModel:
    return build_model(parse_axml_tree(data), dangerous)


def parse_manifest(data: bytes, dangerous: frozenset[str] | None = None) -> ManifestModel:
    """Sniff the encoding and dispatch to the binary or plain-text parser."""
    if data[:2] == b"\x03\x00":
        return parse_binary_manifest(data, dangerous)
    head = data.lstrip()[:1]
    if head == b"<" or data[:3] == b"\xef\xbb\xbf":
        return parse_plain_manifest(data, dangerous)
    return parse_binary_manifest(data, dangerous)
