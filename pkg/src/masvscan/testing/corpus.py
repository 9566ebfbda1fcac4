"""Acceptance fixture corpus with ground-truth verdicts by construction.

Every fixture starts from the clean baseline expectation and lists only the
cells its construction changes.
"""

from __future__ import annotations

import os
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from ..checks.model import CANONICAL_ORDER, PLATFORM_SCOPE, CheckId
from .archives import build_aar, build_apk, build_xapk, zip_bytes
from .axmlgen import encode_manifest
from .dexgen import build_dex
from .ir import ACC_PUBLIC, ACC_STATIC, ClassSpec, MethodSpec, ctor

ACTIVITY = "Landroid/app/Activity;"
SERVICE = "Landroid/app/Service;"
NS = 'xmlns:android="http://schemas.android.com/apk/res/android"'

# -- expectations ------------------------------------------------------------

CLEAN: dict[CheckId, str] = {
    CheckId.DS1: "N/A", CheckId.DS2: "N", CheckId.DS3: "N/A", CheckId.DS4: "N", CheckId.DS5: "N/A",
    CheckId.DS6: "N", CheckId.DS7: "N/A", CheckId.DS8: "N", CheckId.DS9: "N/A", CheckId.DS10: "N/A",
    CheckId.DS11: "N", CheckId.DS12: "N/A",
    CheckId.CRYPTO1: "N", CheckId.CRYPTO2: "N", CheckId.CRYPTO3: "N", CheckId.CRYPTO4: "N",
    CheckId.TLS1: "N", CheckId.TLS2: "N", CheckId.TLS3: "N", CheckId.TLS4: "N/A",
    CheckId.PLAT1: "N", CheckId.PLAT2: "N", CheckId.PLAT3: "N", CheckId.PLAT4: "N/A", CheckId.PLAT5: "N/A",
    CheckId.PLAT6: "N/A", CheckId.PLAT7: "N/A", CheckId.PLAT8: "N/A",
}

# The set of properties app 18 violates in the published tables.
WORST_VIOLATIONS = (
    "DS1", "DS7", "DS8", "DS9", "DS10", "DS11", "DS12", "CRYPTO2", "CRYPTO3", "CRYPTO4", "TLS4", "PLAT4", "PLAT7", "PLAT8",
)
WORST_CONFIG = "[severity]\nDS11 = ML\nDS12 = ML\n"


def expect(base: dict[CheckId, str] | None = None, **cells: str) -> dict[CheckId, str]:
    out = dict(base or CLEAN)
    for k, v in cells.items():
        out[CheckId(k)] = v
    return out


def platform_only(expected: dict[CheckId, str]) -> dict[CheckId, str]:
    return {c: (expected[c] if c in PLATFORM_SCOPE else "-") for c in CANONICAL_ORDER}


# -- manifest helpers --------------------------------------------------------

LAUNCHER = (
    '<intent-filter><action android:name="android.intent.action.MAIN"/>'
    '<category android:name="android.intent.category.LAUNCHER"/></intent-filter>'
)


def manifest(
    package: str,
    perms: tuple[str, ...] = (),
    app_attrs: str = 'android:allowBackup="false"',
    components: str | None = None,
    split: str | None = None,
) -> str:
    uses = "".join(f'<uses-permission android:name="android.permission.{p}"/>' for p in perms)
    if components is None:
        components = f'<activity android:name=".MainActivity" android:exported="true">{LAUNCHER}</activity>'
    split_attr = f' split="{split}"' if split else ""
    return (
        f'<manifest {NS} package="{package}"{split_attr}>'
        '<uses-sdk android:minSdkVersion="21" android:targetSdkVersion="30"/>'
        f"{uses}<application {app_attrs}>{components}</application></manifest>"
    )


# -- code helpers ------------------------------------------------------------


def desc(package: str, simple: str) -> str:
    return "L" + package.replace(".", "/") + "/" + simple + ";"


def activity(package: str, body: list[tuple], simple: str = "MainActivity", extra: list[MethodSpec] | None = None) -> ClassSpec:
    code = [("invoke", "super", f"{ACTIVITY}->onCreate(Landroid/os/Bundle;)V", ["p0", "p1"])] + body + [("return-void",)]
    methods = [ctor(ACTIVITY), MethodSpec("onCreate", ("Landroid/os/Bundle;",), "V", code, ACC_PUBLIC)]
    return ClassSpec(desc(package, simple), ACTIVITY, methods=methods + list(extra or []))


def helper(package: str, simple: str, body: list[tuple], name: str = "run", superclass: str = "Ljava/lang/Object;",
           interfaces: tuple[str, ...] = ()) -> ClassSpec:
    return ClassSpec(desc(package, simple), superclass, interfaces,
                     methods=[ctor(superclass), MethodSpec(name, (), "V", body + [("return-void",)])])


LOG_PLAIN = [
    ("const-string", 0, "MainTag"),
    ("const-string", 1, "started"),
    ("invoke", "static", "Landroid/util/Log;->d(Ljava/lang/String;Ljava/lang/String;)I", [0, 1]),
]


def prefs_put(key: str, value: str) -> list[tuple]:
    return [
        ("const-string", 0, "prefs"),
        ("const", 1, 0),
        ("invoke", "virtual", "Landroid/content/Context;->getSharedPreferences(Ljava/lang/String;I)Landroid/content/SharedPreferences;", ["p0", 0, 1]),
        ("move-result", 2),
        ("invoke", "interface", "Landroid/content/SharedPreferences;->edit()Landroid/content/SharedPreferences$Editor;", [2]),
        ("move-result", 3),
        ("const-string", 4, key),
        ("const-string", 5, value),
        ("invoke", "interface", "Landroid/content/SharedPreferences$Editor;->putString(Ljava/lang/String;Ljava/lang/String;)Landroid/content/SharedPreferences$Editor;", [3, 4, 5]),
        ("invoke", "interface", "Landroid/content/SharedPreferences$Editor;->apply()V", [3]),
    ]


def edit_text(input_type: int | None) -> list[tuple]:
    ops = [
        ("new-instance", 0, "Landroid/widget/EditText;"),
        ("invoke", "direct", "Landroid/widget/EditText;-><init>(Landroid/content/Context;)V", [0, "p0"]),
    ]
    if input_type is not None:
        ops += [("const", 1, input_type), ("invoke", "virtual", "Landroid/widget/EditText;->setInputType(I)V", [0, 1])]
    return ops


def set_text(text: str) -> list[tuple]:
    return [
        ("new-instance", 0, "Landroid/widget/TextView;"),
        ("invoke", "direct", "Landroid/widget/TextView;-><init>(Landroid/content/Context;)V", [0, "p0"]),
        ("const-string", 1, text),
        ("invoke", "virtual", "Landroid/widget/TextView;->setText(Ljava/lang/CharSequence;)V", [0, 1]),
    ]


def get_window(flags: int | None = None) -> list[tuple]:
    ops = [("invoke", "virtual", f"{ACTIVITY}->getWindow()Landroid/view/Window;", ["p0"]), ("move-result", 0)]
    if flags is not None:
        ops += [("const", 1, flags), ("invoke", "virtual", "Landroid/view/Window;->addFlags(I)V", [0, 1])]
    return ops


def webview(js: int | None = None, url: str | None = None, extra: list[tuple] | None = None) -> list[tuple]:
    ops = [
        ("new-instance", 0, "Landroid/webkit/WebView;"),
        ("invoke", "direct", "Landroid/webkit/WebView;-><init>(Landroid/content/Context;)V", [0, "p0"]),
        ("invoke", "virtual", "Landroid/webkit/WebView;->getSettings()Landroid/webkit/WebSettings;", [0]),
        ("move-result", 1),
    ]
    if js is not None:
        ops += [("const", 2, js), ("invoke", "virtual", "Landroid/webkit/WebSettings;->setJavaScriptEnabled(Z)V", [1, 2])]
    if url is not None:
        ops += [("const-string", 3, url), ("invoke", "virtual", "Landroid/webkit/WebView;->loadUrl(Ljava/lang/String;)V", [0, 3])]
    return ops + list(extra or [])


def open_url(url: str) -> list[tuple]:
    return [
        ("new-instance", 0, "Ljava/net/URL;"),
        ("const-string", 1, url),
        ("invoke", "direct", "Ljava/net/URL;-><init>(Ljava/lang/String;)V", [0, 1]),
        ("invoke", "virtual", "Ljava/net/URL;->openConnection()Ljava/net/URLConnection;", [0]),
        ("move-result", 2),
    ]


CAMERA_INTENT = [
    ("new-instance", 0, "Landroid/content/Intent;"),
    ("const-string", 1, "android.media.action.IMAGE_CAPTURE"),
    ("invoke", "direct", "Landroid/content/Intent;-><init>(Ljava/lang/String;)V", [0, 1]),
]
STORAGE_STATE = [
    ("invoke", "static", "Landroid/os/Environment;->getExternalStorageState()Ljava/lang/String;", []),
    ("move-result", 0),
]


def prng_crypto() -> list[tuple]:
    """Random bytes used as an AES key; ECB by default; MD5 digest."""
    return [
        ("new-instance", 0, "Ljava/util/Random;"),
        ("invoke", "direct", "Ljava/util/Random;-><init>()V", [0]),
        ("const", 1, 16),
        ("new-array", 2, 1, "[B"),
        ("invoke", "virtual", "Ljava/util/Random;->nextBytes([B)V", [0, 2]),
        ("new-instance", 3, "Ljavax/crypto/spec/SecretKeySpec;"),
        ("const-string", 4, "AES"),
        ("invoke", "direct", "Ljavax/crypto/spec/SecretKeySpec;-><init>([BLjava/lang/String;)V", [3, 2, 4]),
        ("invoke", "static", "Ljavax/crypto/Cipher;->getInstance(Ljava/lang/String;)Ljavax/crypto/Cipher;", [4]),
        ("move-result", 5),
        ("const-string", 6, "MD5"),
        ("invoke", "static", "Ljava/security/MessageDigest;->getInstance(Ljava/lang/String;)Ljava/security/MessageDigest;", [6]),
        ("move-result", 7),
    ]


# -- fixtures ----------------------------------------------------------------


@dataclass
class Fixture:
    name: str
    filename: str
    build: Callable[[], bytes]
    set_label: str
    expected: dict[CheckId, str] = field(default_factory=dict)
    config: str = ""
    description: str = ""
    # classes per DEX file / jar, for parser oracle tests
    code: list[list[ClassSpec]] = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        if self.set_label == "A":
            return 2
        return 1 if any(g.startswith("V") for g in self.expected.values()) else 0

    def glyphs(self) -> list[str]:
        return [self.expected[c] for c in CANONICAL_ORDER]


def _apk(name: str, mf: str, dex: list[list[ClassSpec]], expected: dict[CheckId, str], description: str,
         config: str = "") -> Fixture:
    return Fixture(name, f"{name}.apk", lambda: build_apk(mf, dex), "C", expected, config, description, dex)


def worst_classes(pkg: str) -> list[ClassSpec]:
    main = activity(pkg, (
        prefs_put("password", "hunter2")
        + LOG_PLAIN
        + edit_text(0x81)
        + set_text("Your PIN is 4821")
        + get_window()
        + open_url("https://api.example.com/v1")
        + webview(js=1, url="https://www.example.com/")
        + CAMERA_INTENT
        + STORAGE_STATE
        + [("new-instance", 0, desc(pkg, "CryptoHelper")),
           ("invoke", "direct", f"{desc(pkg, 'CryptoHelper')}-><init>()V", [0]),
           ("invoke", "virtual", f"{desc(pkg, 'CryptoHelper')}->run()V", [0])]
    ))
    return [main, helper(pkg, "CryptoHelper", prng_crypto())]


def worst_manifest(pkg: str) -> str:
    return manifest(pkg, ("INTERNET", "CAMERA", "WRITE_EXTERNAL_STORAGE"), app_attrs='android:label="Worst"')


def worst_expected() -> dict[CheckId, str]:
    cells = {"DS3": "N", "DS5": "N", "PLAT5": "N", "PLAT6": "N"}
    cells.update({c: "V" for c in WORST_VIOLATIONS})
    cells.update(DS11="V(ML)", DS12="V(ML)")
    return expect(CLEAN, **cells)


def _clean() -> Fixture:
    pkg = "com.example.clean"
    return _apk("clean", manifest(pkg, ("INTERNET",)), [[activity(pkg, [])]], expect(), "baseline with nothing to flag")


def _worst() -> Fixture:
    pkg = "com.example.worst"
    return _apk("worst", worst_manifest(pkg), [worst_classes(pkg)], worst_expected(),
                "violates the same 14 properties as app 18", WORST_CONFIG)


def _worst_aar() -> Fixture:
    pkg = "com.example.worst"
    classes = worst_classes(pkg)
    mf = worst_manifest(pkg)
    return Fixture("worst_aar", "worst.aar", lambda: build_aar(mf, classes), "C", worst_expected(), WORST_CONFIG,
                   "worst case as an AAR (class files in classes.jar)", [classes])


def _single(name: str, body: list[tuple], cells: dict[str, str], description: str, perms: tuple[str, ...] = ("INTERNET",),
            app_attrs: str = 'android:allowBackup="false"', extra: list[ClassSpec] | None = None,
            components: str | None = None) -> Fixture:
    pkg = f"com.example.{name.replace('_', '')}"
    classes = [activity(pkg, body)] + [_rehome(c, pkg) for c in (extra or [])]
    return _apk(name, manifest(pkg, perms, app_attrs, components), [classes], expect(CLEAN, **cells), description)


def _sub(x, path: str):
    if isinstance(x, str):
        return x.replace("LPKG/", f"L{path}/")
    if isinstance(x, tuple):
        return tuple(_sub(y, path) for y in x)
    if isinstance(x, list):
        return [_sub(y, path) for y in x]
    return x


def _rehome(c: ClassSpec, pkg: str) -> ClassSpec:
    """Move a template class written against the placeholder package ``PKG`` into ``pkg``."""
    path = pkg.replace(".", "/")
    methods = [MethodSpec(m.name, _sub(m.params, path), _sub(m.ret, path), _sub(m.code, path), m.access) for m in c.methods]
    return ClassSpec(_sub(c.name, path), _sub(c.superclass, path), c.interfaces, methods, c.access)


def _fixtures_single() -> list[Fixture]:
    out = []
    out.append(_single(
        "ds2_external",
        [("invoke", "static", "Landroid/os/Environment;->getExternalStorageDirectory()Ljava/io/File;", []), ("move-result", 0)],
        {"DS2": "V"}, "external storage path with WRITE_EXTERNAL_STORAGE", perms=("INTERNET", "WRITE_EXTERNAL_STORAGE"),
    ))
    out.append(_single(
        "ds3_log",
        [("const-string", 0, "Auth"), ("const-string", 1, "session token=abc123"),
         ("invoke", "static", "Landroid/util/Log;->d(Ljava/lang/String;Ljava/lang/String;)I", [0, 1])],
        {"DS3": "V", "DS1": "N"}, "sensitive constant written to the platform log",
    ))
    out.append(_single(
        "ds4_thirdparty",
        [("const-string", 0, "user_password"),
         ("invoke", "static", "Lcom/thirdparty/analytics/Tracker;->track(Ljava/lang/String;)V", [0])],
        {"DS4": "V", "DS1": "N"}, "sensitive constant handed to a third-party SDK",
    ))
    out.append(_single(
        "ds5_input", edit_text(None), {"DS5": "V", "PLAT7": "V"},
        "text input without a protective input type or touch filtering",
    ))
    out.append(_single(
        "auth_keyguard",
        edit_text(0x81) + [
            ("const", 2, 1),
            ("invoke", "virtual", "Landroid/view/View;->setFilterTouchesWhenObscured(Z)V", [0, 2]),
            ("const-string", 3, "keyguard"),
            ("invoke", "virtual", "Landroid/content/Context;->getSystemService(Ljava/lang/String;)Ljava/lang/Object;", ["p0", 3]),
            ("move-result", 4),
            ("invoke", "virtual", "Landroid/app/KeyguardManager;->isDeviceSecure()Z", [4]),
            ("move-result", 5),
        ],
        {"DS5": "N", "DS10": "N", "PLAT7": "N"}, "password field guarded by a device pass-code check and touch filtering",
    ))
    out.append(_single(
        "ds6_ipc",
        [("new-instance", 0, "Landroid/content/Intent;"), ("const-string", 1, "com.example.SYNC"),
         ("invoke", "direct", "Landroid/content/Intent;-><init>(Ljava/lang/String;)V", [0, 1]),
         ("const-string", 2, "auth_token"), ("const-string", 3, "abc123"),
         ("invoke", "virtual", "Landroid/content/Intent;->putExtra(Ljava/lang/String;Ljava/lang/String;)Landroid/content/Intent;", [0, 2, 3]),
         ("move-result", 4),
         ("invoke", "virtual", "Landroid/content/Context;->sendBroadcast(Landroid/content/Intent;)V", ["p0", 0])],
        {"DS6": "V", "DS1": "N"}, "sensitive extra broadcast through an implicit intent",
    ))
    out.append(_single(
        "ds9_secure", get_window(0x2000), {"DS9": "N"}, "window marked FLAG_SECURE",
    ))
    out.append(_single(
        "crypto1_hardkey",
        [("new-instance", 0, "Ljavax/crypto/spec/SecretKeySpec;"), ("const-string", 1, "0123456789abcdef"),
         ("invoke", "virtual", "Ljava/lang/String;->getBytes()[B", [1]), ("move-result", 2),
         ("const-string", 3, "AES"),
         ("invoke", "direct", "Ljavax/crypto/spec/SecretKeySpec;-><init>([BLjava/lang/String;)V", [0, 2, 3]),
         ("const-string", 4, "AES/GCM/NoPadding"),
         ("invoke", "static", "Ljavax/crypto/Cipher;->getInstance(Ljava/lang/String;)Ljavax/crypto/Cipher;", [4]),
         ("move-result", 5)],
        {"CRYPTO1": "V"}, "hard-coded AES key with an authenticated mode",
    ))
    out.append(_single(
        "crypto_weak_params",
        [("new-instance", 0, "Ljavax/crypto/spec/PBEKeySpec;"),
         ("invoke", "virtual", "Ljava/lang/Object;->toString()Ljava/lang/String;", ["p0"]), ("move-result", 1),
         ("invoke", "virtual", "Ljava/lang/String;->toCharArray()[C", [1]), ("move-result", 1),
         ("const", 2, 8), ("new-array", 3, 2, "[B"),
         ("const", 4, 1000), ("const", 5, 256),
         ("invoke", "direct", "Ljavax/crypto/spec/PBEKeySpec;-><init>([C[BII)V", [0, 1, 3, 4, 5]),
         ("const-string", 6, "DES/CBC/PKCS5Padding"),
         ("invoke", "static", "Ljavax/crypto/Cipher;->getInstance(Ljava/lang/String;)Ljavax/crypto/Cipher;", [6]),
         ("move-result", 7)],
        {"CRYPTO2": "V", "CRYPTO3": "V"}, "1000 PBE iterations and DES",
    ))
    out.append(_single(
        "tls1_cleartext",
        [("const-string", 0, "http://api.example.com/v1/items"),
         ("const-string", 1, "http://schemas.android.com/apk/res/android"),
         ("const-string", 2, "http://localhost:8080/debug")],
        {"TLS1": "V"}, "cleartext endpoint and cleartext traffic enabled",
        app_attrs='android:allowBackup="false" android:usesCleartextTraffic="true"',
    ))
    out.append(_single(
        "tls2_sslv3",
        [("const-string", 0, "SSLv3"),
         ("invoke", "static", "Ljavax/net/ssl/SSLContext;->getInstance(Ljava/lang/String;)Ljavax/net/ssl/SSLContext;", [0]),
         ("move-result", 1)],
        {"TLS2": "V"}, "SSLv3 context",
    ))
    trust = ClassSpec("LPKG/TrustAll;", "Ljava/lang/Object;", ("Ljavax/net/ssl/X509TrustManager;",), methods=[
        ctor(),
        MethodSpec("checkClientTrusted", ("[Ljava/security/cert/X509Certificate;", "Ljava/lang/String;"), "V"),
        MethodSpec("checkServerTrusted", ("[Ljava/security/cert/X509Certificate;", "Ljava/lang/String;"), "V"),
        MethodSpec("getAcceptedIssuers", (), "[Ljava/security/cert/X509Certificate;",
                   [("const", 0, 0), ("return-object", 0)]),
    ])
    verifier = ClassSpec("LPKG/AnyHost;", "Ljava/lang/Object;", ("Ljavax/net/ssl/HostnameVerifier;",), methods=[
        ctor(),
        MethodSpec("verify", ("Ljava/lang/String;", "Ljavax/net/ssl/SSLSession;"), "Z", [("const", 0, 1), ("return", 0)]),
    ])
    out.append(_single("tls3_trustall", [], {"TLS3": "V"}, "trust-all manager and accept-all hostname verifier",
                       extra=[trust, verifier]))
    out.append(_single(
        "tls4_pinned",
        open_url("https://api.example.com/") + [
            ("new-instance", 3, "Lokhttp3/CertificatePinner$Builder;"),
            ("invoke", "direct", "Lokhttp3/CertificatePinner$Builder;-><init>()V", [3]),
        ],
        {"TLS4": "N"}, "networking with certificate pinning",
    ))
    out.append(_single(
        "tls4_unpinned", open_url("https://api.example.com/"), {"TLS4": "V"}, "networking without pinning",
    ))
    out.append(_single(
        "plat1_contacts", [], {"PLAT1": "V"}, "READ_CONTACTS with no contacts API usage",
        perms=("INTERNET", "READ_CONTACTS"),
    ))
    scheme_component = (
        f'<activity android:name=".MainActivity" android:exported="true">{LAUNCHER}</activity>'
        '<activity android:name=".LinkActivity" android:exported="true"><intent-filter>'
        '<action android:name="android.intent.action.VIEW"/><category android:name="android.intent.category.BROWSABLE"/>'
        '<data android:scheme="exampleapp"/></intent-filter></activity>'
    )
    link = ClassSpec("LPKG/LinkActivity;", ACTIVITY, methods=[ctor(ACTIVITY), MethodSpec(
        "onCreate", ("Landroid/os/Bundle;",), "V", [
            ("invoke", "super", f"{ACTIVITY}->onCreate(Landroid/os/Bundle;)V", ["p0", "p1"]),
            ("invoke", "virtual", f"{ACTIVITY}->getIntent()Landroid/content/Intent;", ["p0"]), ("move-result", 0),
            ("invoke", "virtual", "Landroid/content/Intent;->getData()Landroid/net/Uri;", [0]), ("move-result", 1),
            ("const-string", 2, "q"),
            ("invoke", "virtual", "Landroid/net/Uri;->getQueryParameter(Ljava/lang/String;)Ljava/lang/String;", [1, 2]),
            ("move-result", 3),
            ("const-string", 4, "prefs"), ("const", 5, 0),
            ("invoke", "virtual", "Landroid/content/Context;->getSharedPreferences(Ljava/lang/String;I)Landroid/content/SharedPreferences;", ["p0", 4, 5]),
            ("move-result", 6),
            ("invoke", "interface", "Landroid/content/SharedPreferences;->edit()Landroid/content/SharedPreferences$Editor;", [6]),
            ("move-result", 7),
            ("const-string", 8, "last"),
            ("invoke", "interface", "Landroid/content/SharedPreferences$Editor;->putString(Ljava/lang/String;Ljava/lang/String;)Landroid/content/SharedPreferences$Editor;", [7, 8, 3]),
            ("return-void",),
        ])])
    out.append(_single("plat2_scheme", [], {"PLAT2": "V", "DS12": "N"},
                       "custom scheme parameter stored in preferences", extra=[link], components=scheme_component))
    svc_component = (
        f'<activity android:name=".MainActivity" android:exported="true">{LAUNCHER}</activity>'
        '<service android:name=".ResetService" android:exported="true"/>'
    )
    svc = ClassSpec("LPKG/ResetService;", SERVICE, methods=[
        ctor(SERVICE),
        MethodSpec("onStartCommand", ("Landroid/content/Intent;", "I", "I"), "I", [
            ("invoke", "virtual", "LPKG/ResetService;->resetPassword()V", ["p0"]),
            ("const", 0, 2), ("return", 0),
        ]),
        MethodSpec("resetPassword", (), "V"),
    ])
    out.append(_single("plat3_exported", [], {"PLAT3": "V"}, "exported service resets a password without a permission",
                       extra=[svc], components=svc_component))
    out.append(_single(
        "webview_safe",
        webview(js=0, url="https://www.example.com/", extra=[
            ("const", 4, 1), ("invoke", "virtual", "Landroid/webkit/WebView;->clearCache(Z)V", [0, 4])]),
        {"PLAT4": "N", "PLAT5": "N", "PLAT6": "N", "PLAT8": "N"}, "WebView with JavaScript off and cache cleared",
    ))
    out.append(_single("webview_unsafe", _unsafe_webview(), {"PLAT4": "V", "PLAT5": "V", "PLAT6": "V", "PLAT8": "V"},
                       "WebView with JavaScript, a file URL and a JavaScript bridge"))
    out.append(_single(
        "branch_join",
        [("invoke", "virtual", "Ljava/lang/Object;->hashCode()I", ["p0"]), ("move-result", 0),
         ("const-string", 1, "AES"),
         ("if-eqz", 0, "keep"),
         ("const-string", 1, "AES/GCM/NoPadding"),
         ("label", "keep"),
         ("invoke", "static", "Ljavax/crypto/Cipher;->getInstance(Ljava/lang/String;)Ljavax/crypto/Cipher;", [1]),
         ("move-result", 2)]
        + webview(extra=[("const", 2, 1), ("if-eqz", 0, "js"), ("const", 2, 0), ("label", "js"),
                         ("invoke", "virtual", "Landroid/webkit/WebSettings;->setJavaScriptEnabled(Z)V", [1, 2]),
                         ("invoke", "virtual", "Landroid/webkit/WebView;->clearFormData()V", [0])]),
        {"CRYPTO2": "-", "CRYPTO3": "-", "PLAT4": "-", "PLAT5": "N", "PLAT6": "N", "PLAT8": "N"},
        "cipher transformation and JavaScript flag depend on a branch",
    ))
    return out


def _unsafe_webview() -> list[tuple]:
    return webview(js=1, url="file:///android_asset/index.html", extra=[
        ("new-instance", 4, "Ljava/lang/Object;"),
        ("invoke", "direct", "Ljava/lang/Object;-><init>()V", [4]),
        ("const-string", 5, "Bridge"),
        ("invoke", "virtual", "Landroid/webkit/WebView;->addJavascriptInterface(Ljava/lang/Object;Ljava/lang/String;)V", [0, 4, 5]),
    ])


def _multidex() -> Fixture:
    pkg = "com.example.multidex"
    main = activity(pkg, [("new-instance", 0, desc(pkg, "Net")),
                          ("invoke", "direct", f"{desc(pkg, 'Net')}-><init>()V", [0]),
                          ("invoke", "virtual", f"{desc(pkg, 'Net')}->run()V", [0])])
    net = helper(pkg, "Net", open_url("http://api.example.com/feed"))
    return _apk("multidex", manifest(pkg, ("INTERNET",)), [[main], [net]], expect(CLEAN, TLS1="V", TLS4="V"),
                "cleartext networking code lives in classes2.dex")


def _xapk() -> Fixture:
    pkg = "com.example.bundle"
    base_mf = manifest(pkg, ("INTERNET",))
    split_mf = (f'<manifest {NS} package="{pkg}" split="config.feature">'
                '<uses-permission android:name="android.permission.READ_CONTACTS"/><application/></manifest>')
    base_code = [activity(pkg, [])]
    split_code = [helper(pkg, "Web", webview(js=1, url="https://www.example.com/", extra=[
        ("invoke", "virtual", "Landroid/webkit/WebView;->clearCache(Z)V", [0, 2])]))]

    def build() -> bytes:
        return build_xapk(pkg, {
            f"{pkg}.apk": build_apk(base_mf, [base_code]),
            "config.feature.apk": build_apk(split_mf, [split_code]),
        })

    exp = expect(CLEAN, PLAT1="V", PLAT4="V", PLAT5="N", PLAT6="N", PLAT8="N")
    return Fixture("bundle", "bundle.xapk", build, "C", exp, "", "XAPK whose split adds a permission and WebView code",
                   [base_code, split_code])


def _manifest_only() -> Fixture:
    pkg = "com.example.resources"
    mf = manifest(pkg, ("INTERNET",), app_attrs="")
    return Fixture("manifest_only", "manifest_only.apk", lambda: build_apk(mf, []), "C", expect(CLEAN, DS8="V"),
                   "", "APK with a manifest and no bytecode; allowBackup absent")


def _corrupt_container() -> Fixture:
    def build() -> bytes:
        rng = random.Random(7)
        return b"MZ" + bytes(rng.randrange(256) for _ in range(2048))
    return Fixture("corrupt_container", "corrupt_container.apk", build, "A", {}, "", "not a ZIP archive")


def _corrupt_manifest() -> Fixture:
    def build() -> bytes:
        return zip_bytes({"AndroidManifest.xml": b"\x03\x00\x08\x00\xff\xff\xff\x7f" + b"\x00" * 24,
                          "classes.dex": build_dex([activity("com.example.broken", [])])})
    return Fixture("corrupt_manifest", "corrupt_manifest.apk", build, "A", {}, "", "binary manifest with a bogus chunk size")


def _corrupt_code() -> Fixture:
    pkg = "com.example.partial"
    classes = [activity(pkg, _unsafe_webview()), helper(pkg, "Junk", prng_crypto())]
    mf = manifest(pkg, ("INTERNET",))

    def build() -> bytes:
        return build_apk(mf, raw_dex={"classes.dex": build_dex(classes, corrupt=frozenset({desc(pkg, "Junk")}))})

    full = expect(CLEAN, PLAT4="V", PLAT5="V", PLAT6="V", PLAT8="V")
    return Fixture("corrupt_code", "corrupt_code.apk", build, "B", platform_only(full), "",
                   "one class has an undecodable method body", [classes])


def _truncated_dex() -> Fixture:
    pkg = "com.example.truncated"
    classes = [activity(pkg, _unsafe_webview())]
    mf = manifest(pkg, ("INTERNET",))

    def build() -> bytes:
        return build_apk(mf, raw_dex={"classes.dex": build_dex(classes)[:0x70]})

    exp = platform_only(expect(CLEAN, PLAT4="-", PLAT5="-", PLAT6="-", PLAT7="-", PLAT8="-"))
    return Fixture("truncated_dex", "truncated_dex.apk", build, "B", exp, "", "classes.dex cut after its header")


def fixtures() -> list[Fixture]:
    return (
        [_clean(), _worst(), _worst_aar()]
        + _fixtures_single()
        + [_multidex(), _xapk(), _manifest_only(), _corrupt_container(), _corrupt_manifest(), _corrupt_code(),
           _truncated_dex()]
    )


def write_corpus(directory: str | os.PathLike) -> list[tuple[Fixture, Path]]:
    """Write every fixture (and its config, if any) into ``directory``."""
    root = Path(directory)
    root.mkdir(parents=True, exist_ok=True)
    out = []
    for fx in fixtures():
        path = root / fx.filename
        path.write_bytes(fx.build())
        if fx.config:
            (root / f"{fx.name}.ini").write_text(fx.config, encoding="utf-8")
        out.append((fx, path))
    return out


__all__ = ["CLEAN", "WORST_CONFIG", "WORST_VIOLATIONS", "Fixture", "encode_manifest", "fixtures", "write_corpus",
           "ACC_STATIC"]
