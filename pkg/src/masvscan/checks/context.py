"""Shared query layer over one application's manifest and code model.

API facts are tri-state: ``True`` when a recovered call site matches,
``False`` when absence is proven (the code model is complete, or its method
reference tables are and no reference matches), ``None`` otherwise.
"""

from __future__ import annotations

from typing import Callable, Iterable

from ..axml import ManifestModel
from ..bytecode.model import (
    CallSite,
    ClassInfo,
    CodeModel,
    ConstArg,
    Instr,
    Known,
    MethodInfo,
    MethodRef,
    Op,
    descriptor_to_java,
)
from .config import CheckConfig

# Owners are dotted Java names; "pkg." is a package prefix and "*" matches any owner.
Owners = tuple[str, ...]
ANY: Owners = ("*",)

PLATFORM_PREFIXES = (
    "java.", "javax.", "android.", "androidx.", "kotlin.", "kotlinx.", "dalvik.", "com.android.",
    "org.json.", "org.w3c.", "org.xml.", "org.apache.http.", "sun.", "libcore.",
)

WEBVIEW_TYPES: Owners = (
    "android.webkit.WebView",
    "android.webkit.WebSettings",
    "android.webkit.WebViewClient",
    "android.webkit.WebChromeClient",
)

TEXT_INPUT_WIDGETS: Owners = (
    "android.widget.EditText",
    "android.widget.AutoCompleteTextView",
    "android.widget.MultiAutoCompleteTextView",
    "com.google.android.material.textfield.TextInputEditText",
    "androidx.appcompat.widget.AppCompatEditText",
)


def render_value(arg: ConstArg, limit: int = 60) -> str:
    if not isinstance(arg, Known):
        return "Unknown"
    v = arg.value
    text = f"bytes[{len(v)}]" if isinstance(v, bytes) else repr(v)
    return text if len(text) <= limit else text[: limit - 3] + "..."


class Context:
    def __init__(self, manifest: ManifestModel, code: CodeModel | None, config: CheckConfig) -> None:
        self.manifest = manifest
        self.code = code if code is not None else CodeModel()
        self.config = config
        self.lexicon = config.lexicon
        self.classes: dict[str, ClassInfo] = self.code.class_map()
        self._methods: dict[tuple[str, str], MethodInfo] = {}
        for c in self.code.classes:
            for m in c.methods:
                self._methods.setdefault((c.name, _key(m.ref)), m)
        self._by_name: dict[str, list[CallSite]] = {}
        for s in self.code.call_sites:
            self._by_name.setdefault(s.callee.name, []).append(s)
        self._ancestors: dict[str, frozenset[str]] = {}
        self._memo: dict[tuple, object] = {}
        pkg = manifest.package_name
        self.app_package = pkg
        self.app_prefix = "L" + pkg.replace(".", "/") + "/"
        strings: list[tuple[str, str]] = []
        for c in self.code.classes:
            for m in c.methods:
                for k, ins in enumerate(m.instructions):
                    if ins.op is Op.CONST_STRING and isinstance(ins.value, str):
                        strings.append((f"{c.name}->{_key(m.ref)}@{k}", ins.value))
        self.const_strings = sorted(strings)

    # -- type hierarchy ------------------------------------------------------

    def ancestors(self, desc: str) -> frozenset[str]:
        """Dotted names of ``desc`` and every supertype reachable through the code model."""
        hit = self._ancestors.get(desc)
        if hit is not None:
            return hit
        seen: set[str] = set()
        todo = [desc]
        while todo:
            d = todo.pop()
            if d in seen:
                continue
            seen.add(d)
            c = self.classes.get(d)
            if c is not None:
                if c.superclass:
                    todo.append(c.superclass)
                todo.extend(c.interfaces)
        out = frozenset(descriptor_to_java(d) for d in seen)
        self._ancestors[desc] = out
        return out

    def is_subtype(self, desc: str, owners: Owners) -> bool:
        return _owner_hit(self.ancestors(desc), owners)

    def app_classes(self) -> list[ClassInfo]:
        return [c for c in self.code.classes if c.name.startswith(self.app_prefix)]

    def subclasses(self, owners: Owners) -> list[ClassInfo]:
        """Classes in the code model, other than ``owners`` themselves, that extend or implement them."""
        return [
            c for c in self.code.classes
            if descriptor_to_java(c.name) not in owners and self.is_subtype(c.name, owners)
        ]

    def owner_matches(self, owner_desc: str, owners: Owners) -> bool:
        if "*" in owners:
            return True
        java = descriptor_to_java(owner_desc)
        if _owner_hit((java,), owners):
            return True
        return owner_desc in self.classes and self.is_subtype(owner_desc, owners)

    # -- API facts -----------------------------------------------------------

    def matches(self, ref: MethodRef, owners: Owners, names: Iterable[str] | None) -> bool:
        return _name_hit(ref.name, names) and self.owner_matches(ref.owner, owners)

    def calls(self, owners: Owners, names: tuple[str, ...] | None = None) -> list[CallSite]:
        key = ("calls", owners, names)
        hit = self._memo.get(key)
        if hit is not None:
            return hit  # type: ignore[return-value]
        if names is None:
            pool: Iterable[CallSite] = self.code.call_sites
        else:
            pool = [s for n, sites in self._by_name.items() if _name_hit(n, names) for s in sites]
        out = sorted((s for s in pool if self.owner_matches(s.callee.owner, owners)), key=CallSite.sort_key)
        self._memo[key] = out
        return out

    def referenced(self, owners: Owners, names: tuple[str, ...] | None = None) -> bool:
        key = ("ref", owners, names)
        hit = self._memo.get(key)
        if hit is None:
            hit = any(self.matches(r, owners, names) for r in self.code.method_refs)
            self._memo[key] = hit
        return bool(hit)

    def may_have_lost(self, owners: Owners, names: tuple[str, ...] | None = None) -> bool:
        """True if call sites matching the query could sit in undecoded code."""
        if self.code.complete:
            return False
        return not self.code.refs_complete or self.referenced(owners, names)

    def uses(self, owners: Owners, names: tuple[str, ...] | None = None) -> bool | None:
        if self.calls(owners, names):
            return True
        return None if self.may_have_lost(owners, names) else False

    def field_referenced(self, owner: str, name: str) -> bool:
        return any(descriptor_to_java(f.owner) == owner and f.name == name for f in self.code.field_refs)

    def webview_usage(self) -> bool | None:
        fact = self.uses(WEBVIEW_TYPES)
        if fact is True or self.subclasses(WEBVIEW_TYPES):
            return True
        return fact

    def text_input_usage(self) -> bool | None:
        fact = self.uses(TEXT_INPUT_WIDGETS)
        if fact is True or self.subclasses(TEXT_INPUT_WIDGETS):
            return True
        return fact

    # -- code access ---------------------------------------------------------

    def method_of(self, site: CallSite) -> MethodInfo | None:
        return self._methods.get((site.location.class_name, site.location.method))

    def method(self, class_desc: str, key: str) -> MethodInfo | None:
        return self._methods.get((class_desc, key))

    def class_for_component(self, name: str) -> ClassInfo | None:
        return self.classes.get("L" + name.replace(".", "/") + ";")

    def class_lost(self, name: str) -> bool:
        desc = "L" + name.replace(".", "/") + ";"
        return desc in self.code.lost_classes or (desc not in self.classes and not self.code.complete)

    # -- sensitive data ------------------------------------------------------

    def sensitive(self, arg: ConstArg) -> str | None:
        if not isinstance(arg, Known):
            return None
        v = arg.value
        if isinstance(v, str):
            return self.lexicon.match(v)
        if isinstance(v, bytes):
            return self.lexicon.match(v.decode("latin-1"))
        return None

    def sensitive_args(self, site: CallSite) -> list[tuple[int, str]]:
        """(argument index, matched keyword) for every sensitive Known argument."""
        out = []
        for i, a in enumerate(site.const_args):
            kw = self.sensitive(a)
            if kw is not None:
                out.append((i, kw))
        return out

    def is_app_code(self, class_desc: str) -> bool:
        return class_desc.startswith(self.app_prefix)

    def is_platform(self, owner_desc: str) -> bool:
        return descriptor_to_java(owner_desc).startswith(PLATFORM_PREFIXES) or owner_desc.startswith("[")


def _key(ref: MethodRef) -> str:
    return f"{ref.name}({''.join(ref.params)}){ref.ret}"


def _owner_hit(names: Iterable[str], owners: Owners) -> bool:
    for n in names:
        for o in owners:
            if o == "*" or n == o or n.startswith(o if o.endswith(".") else o + "$"):
                return True
    return False


def _name_hit(name: str, names: Iterable[str] | None) -> bool:
    if names is None:
        return True
    for n in names:
        if n == name or (n.endswith("*") and name.startswith(n[:-1])):
            return True
    return False


def taint_flows(
    method: MethodInfo,
    is_source: Callable[[Instr], bool],
    is_sink: Callable[[Instr], bool],
) -> list[int]:
    """Indices of sink invokes that read a value derived from a source.

    The scan is linear in instruction order and ignores control flow, so it
    over-approximates flows within a single method. Registers joined by a
    move share one value, so mutating an object through one copy (a receiver
    taking a tainted argument, or ``nextBytes`` filling an array) taints all
    copies. Results of invokes that consume tainted values are tainted.
    """
    group: dict[int, object] = {}
    tainted: set[object] = set()
    pending = False
    hits: list[int] = []

    def g(r: int) -> object:
        return group.get(r, r)

    def define(k: int, regs: tuple[int, ...], dirty: bool) -> None:
        for r in regs:
            fresh = (k, r)
            group[r] = fresh
            if dirty:
                tainted.add(fresh)

    for k, ins in enumerate(method.instructions):
        if ins.op is Op.INVOKE:
            dirty = any(g(r) in tainted for r in ins.reads)
            if dirty and is_sink(ins):
                hits.append(k)
            src = is_source(ins)
            if src and ins.method is not None and _fills_array(ins.method):
                tainted.update(g(r) for r in ins.reads[1:])
            if dirty and not ins.static and ins.reads:
                tainted.add(g(ins.reads[0]))
            pending = src or dirty
            continue
        if ins.op is Op.MOVE_RESULT:
            define(k, ins.writes, pending)
        elif ins.op is Op.MOVE and ins.reads and len(ins.writes) == 1:
            group[ins.writes[0]] = g(ins.reads[0])
        elif ins.op is Op.ARRAY_PUT:
            if len(ins.reads) > 1 and g(ins.reads[0]) in tainted:
                tainted.add(g(ins.reads[1]))
        elif ins.writes:
            define(k, ins.writes, any(g(r) in tainted for r in ins.reads))
        pending = False
    return hits


def _fills_array(ref: MethodRef) -> bool:
    return ref.name == "nextBytes"
