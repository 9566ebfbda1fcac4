"""Parser output compared against androguard (DEX, AXML) and jawa (class files)."""

from __future__ import annotations

import io
import zipfile
import xml.etree.ElementTree as ET

import pytest

from masvscan.axml import parse_axml_tree, parse_plain_tree
from masvscan.bytecode import parse_class_jar, parse_dex, salvage_dex
from masvscan.container import open_bytes, read_entry
from masvscan.errors import ScanError
from masvscan.testing.corpus import fixtures

androguard_dex = pytest.importorskip("androguard.core.dex")
androguard_axml = pytest.importorskip("androguard.core.axml")
jawa_cf = pytest.importorskip("jawa.cf")
from jawa.constants import String  # noqa: E402

ANDROID_NS = "{http://schemas.android.com/apk/res/android}"


def _dex_oracle(data: bytes, skip_classes: set[str] = frozenset()):
    d = androguard_dex.DEX(data)
    classes = {c.get_name() for c in d.get_classes()}
    methods = set()
    consts = set()
    for c in d.get_classes():
        if c.get_name() in skip_classes:
            continue
        for m in c.get_methods():
            methods.add((c.get_name(), m.get_name(), m.get_descriptor().replace(" ", "")))
            for ins in m.get_instructions():
                if ins.get_name().startswith("const-string"):
                    consts.add(ins.get_raw_string())
    return classes, methods, consts


def _ours(model):
    methods = {(c.name, m.ref.name, "(" + "".join(m.ref.params) + ")" + m.ref.ret) for c in model.classes for m in c.methods}
    return {c.name for c in model.classes}, methods, model.strings


def _axml_oracle(data: bytes) -> list[tuple[str, dict[str, str]]]:
    obj = androguard_axml.AXMLPrinter(data).get_xml_obj()
    out = []
    for el in obj.iter():
        attrs = {(("android:" + k[len(ANDROID_NS):]) if k.startswith(ANDROID_NS) else k): v for k, v in el.attrib.items()}
        out.append((el.tag, attrs))
    return out


def _as_text(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)  # resource references render as @0x7f...


def _ours_axml(data: bytes) -> list[tuple[str, dict[str, str]]]:
    return [(n.tag, {k: _as_text(v) for k, v in n.attrs.items()}) for n in parse_axml_tree(data).iter()]


def _apks(fx_bytes: bytes):
    """(label, artifact) for the fixture and any nested split APKs."""
    art = open_bytes(fx_bytes, "fixture.zip")
    return [(f"inner{i}", a) for i, a in enumerate(art.nested)] or [("outer", art)]


def _dex_entries(art):
    return [n for n in art.names() if n.startswith("classes") and n.endswith(".dex")]


CORPUS = [fx for fx in fixtures() if fx.set_label != "A"]


def compare_code(fx) -> None:
    """Assert that classes, methods and string constants agree with androguard / jawa."""
    for _, art in _apks(fx.build()):
        for name in _dex_entries(art):
            data = read_entry(art, name)
            try:
                ours = parse_dex(data)
            except ScanError:
                if fx.name == "truncated_dex":
                    with pytest.raises(Exception):
                        androguard_dex.DEX(data)
                    continue
                salvaged = salvage_dex(data)
                assert salvaged.lost_classes, "salvage should record the damaged class"
                ref_classes, ref_methods, ref_consts = _dex_oracle(data, salvaged.lost_classes)
                classes, methods, consts = _ours(salvaged)
                assert classes | salvaged.lost_classes == ref_classes
                assert methods == ref_methods
                assert consts == ref_consts
                continue
            ref_classes, ref_methods, ref_consts = _dex_oracle(data)
            classes, methods, consts = _ours(ours)
            assert classes == ref_classes
            assert methods == ref_methods
            assert consts == ref_consts
        if art.has("classes.jar"):
            jar = read_entry(art, "classes.jar")
            model = parse_class_jar(jar)
            zf = zipfile.ZipFile(io.BytesIO(jar))
            ref_classes, ref_methods, ref_consts = set(), set(), set()
            for n in zf.namelist():
                if not n.endswith(".class"):
                    continue
                cf = jawa_cf.ClassFile(io.BytesIO(zf.read(n)))
                cname = "L" + cf.this.name.value + ";"
                ref_classes.add(cname)
                ref_consts |= {c.string.value for c in cf.constants.find(type_=String)}
                ref_methods |= {(cname, m.name.value, m.descriptor.value) for m in cf.methods}
            assert _ours(model) == (ref_classes, ref_methods, ref_consts)


def compare_manifest(fx) -> None:
    """Assert that decoded manifest elements and attributes agree with androguard (or ElementTree)."""
    for _, art in _apks(fx.build()):
        data = read_entry(art, "AndroidManifest.xml")
        if data[:2] != b"\x03\x00":  # AAR: plain text manifest, compare with ElementTree instead
            ref = [(el.tag, {(("android:" + k[len(ANDROID_NS):]) if k.startswith(ANDROID_NS) else k): v
                             for k, v in el.attrib.items()}) for el in ET.fromstring(data).iter()]
            assert [(n.tag, n.attrs) for n in parse_plain_tree(data).iter()] == ref
            continue
        assert _ours_axml(data) == _axml_oracle(data)


@pytest.mark.parametrize("fx", CORPUS, ids=lambda f: f.name)
def test_dex_and_class_listing_match_reference_tools(fx):
    compare_code(fx)


@pytest.mark.parametrize("fx", CORPUS, ids=lambda f: f.name)
def test_manifest_attributes_match_reference_decoder(fx):
    compare_manifest(fx)


def test_garbage_manifest_rejected_by_both_decoders(corpus):
    _, path = corpus["corrupt_manifest"]
    art = open_bytes(path.read_bytes(), str(path))
    data = read_entry(art, "AndroidManifest.xml")
    with pytest.raises(ScanError):
        parse_axml_tree(data)
    assert androguard_axml.AXMLPrinter(data).get_xml_obj() is None
