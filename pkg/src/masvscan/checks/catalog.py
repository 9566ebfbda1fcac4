"""The 28 property checks.

Each check is a syntactic predicate over call sites, their resolved constant
arguments and the manifest. A decision that would need an unresolved constant
yields Unverifiable rather than a guess.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from ..axml import is_dangerous
from ..bytecode.model import CallSite, Instr, Known, MethodInfo, Op, Unknown
from ..bytecode.resolve import resolve_register
from .context import (
    ANY,
    TEXT_INPUT_WIDGETS,
    WEBVIEW_TYPES,
    Context,
    Owners,
    render_value,
    taint_flows,
)
from .model import CheckId, Evidence, State

MANIFEST = "AndroidManifest.xml"
MAX_EVIDENCE = 50


@dataclass
class Outcome:
    state: State
    evidence: list[Evidence] = field(default_factory=list)
    note: str = ""


def violation(evidence: list[Evidence], note: str = "") -> Outcome:
    return Outcome(State.VIOLATION, evidence, note)


def passed(note: str) -> Outcome:
    return Outcome(State.PASS, note=note)


def not_applicable(note: str) -> Outcome:
    return Outcome(State.NOT_APPLICABLE, note=note)


def unverifiable(note: str) -> Outcome:
    return Outcome(State.UNVERIFIABLE, note=note)


def _ev(site: CallSite, reason: str, rule: str = "") -> Evidence:
    return Evidence(str(site.location), reason, rule)


def _call(site: CallSite) -> str:
    return f"{site.callee.owner_java}.{site.callee.name}"


def _arg(site: CallSite, i: int):
    return site.const_args[i] if i < len(site.const_args) else Unknown()


def _same_method(a: CallSite, b: CallSite) -> bool:
    return a.location.class_name == b.location.class_name and a.location.method == b.location.method


def _any(*facts: bool | None) -> bool | None:
    if any(f is True for f in facts):
        return True
    return None if any(f is None for f in facts) else False


def _gate(fact: bool | None, what: str) -> Outcome | None:
    """NotApplicable / Unverifiable outcome for an absent or uncertain API surface."""
    if fact is False:
        return not_applicable(f"no {what}")
    if fact is None:
        return unverifiable(f"{what} may sit in undecoded code")
    return None


# -- shared API surfaces -----------------------------------------------------

PREFS_EDITOR: Owners = ("android.content.SharedPreferences$Editor",)
FILE_WRITERS: Owners = (
    "java.io.FileOutputStream", "java.io.OutputStream", "java.io.BufferedOutputStream",
    "java.io.DataOutputStream", "java.io.Writer", "java.io.FileWriter", "java.io.OutputStreamWriter",
    "java.io.BufferedWriter", "java.io.PrintWriter",
)
WRITE_NAMES = ("write", "append", "print", "println", "writeBytes", "writeUTF", "writeChars")
SQLITE_DB: Owners = ("android.database.sqlite.SQLiteDatabase",)
SQLITE_WRITES = ("execSQL", "insert", "insertOrThrow", "insertWithOnConflict", "replace", "replaceOrThrow",
                 "update", "updateWithOnConflict")
CONTENT_VALUES: Owners = ("android.content.ContentValues",)
SQLITE_STMT: Owners = ("android.database.sqlite.SQLiteStatement",)
LOGGERS: Owners = ("android.util.Log",)
PRINT_STREAM: Owners = ("java.io.PrintStream",)
PRINT_NAMES = ("print", "println", "printf", "format")
INPUT_TYPE_SETTERS: Owners = ("android.widget.TextView",) + TEXT_INPUT_WIDGETS
IPC_SEND = ("startActivity", "startActivities", "startActivityForResult", "startService",
            "startForegroundService", "bindService", "sendBroadcast", "sendOrderedBroadcast",
            "sendStickyBroadcast", "setResult")
INTENT: Owners = ("android.content.Intent",)
WEBVIEW: Owners = ("android.webkit.WebView",)
WEBSETTINGS: Owners = ("android.webkit.WebSettings",)


def _persistence_sites(ctx: Context) -> list[CallSite]:
    sites = (
        ctx.calls(SQLITE_DB, SQLITE_WRITES)
        + ctx.calls(CONTENT_VALUES, ("put",))
        + ctx.calls(SQLITE_STMT, ("bind*",))
        + ctx.calls(FILE_WRITERS, WRITE_NAMES)
        + ctx.calls(PREFS_EDITOR, ("put*",))
    )
    return sorted(set(sites), key=CallSite.sort_key)


def _persistence_usage(ctx: Context) -> bool | None:
    if _persistence_sites(ctx):
        return True
    queries = [(SQLITE_DB, SQLITE_WRITES), (CONTENT_VALUES, ("put",)), (SQLITE_STMT, ("bind*",)),
               (FILE_WRITERS, WRITE_NAMES), (PREFS_EDITOR, ("put*",))]
    return None if any(ctx.may_have_lost(o, n) for o, n in queries) else False


def _sensitive_hits(ctx: Context, sites: list[CallSite], rule: str, what: str) -> list[Evidence]:
    out = []
    for s in sites:
        for i, kw in ctx.sensitive_args(s):
            out.append(_ev(s, f"{what}: {_call(s)} argument {i} {render_value(s.const_args[i])} matches '{kw}'", rule))
    return out


# -- storage ------------------------------------------------------------------


def ds1(ctx: Context) -> Outcome:
    lexical = [(loc, v) for loc, v in ctx.const_strings if ctx.lexicon.match(v)]
    if not lexical:
        if not ctx.code.complete:
            return unverifiable("no credential-like constants in decoded code; some code was not decoded")
        return not_applicable("no credential-like string constants")
    sinks = ctx.calls(PREFS_EDITOR, ("put*",)) + ctx.calls(FILE_WRITERS, WRITE_NAMES)
    hits = _sensitive_hits(ctx, sorted(set(sinks), key=CallSite.sort_key), "plain-storage", "credential stored in plain storage")
    keystore = ctx.calls(("java.security.KeyStore",), ("getInstance",))
    if any(_arg(s, 0) == Known("AndroidKeyStore") for s in keystore):
        return passed("credentials are protected with the AndroidKeyStore")
    if not hits:
        return passed("no credential constants reach preference or file writes")
    if any(not isinstance(_arg(s, 0), Known) for s in keystore):
        return unverifiable("KeyStore.getInstance with an unresolved store type")
    if ctx.may_have_lost(("java.security.KeyStore",), ("getInstance",)):
        return unverifiable("a KeyStore lookup may sit in undecoded code")
    return violation(hits, "no AndroidKeyStore usage")


def ds2(ctx: Context) -> Outcome:
    names = ("getExternalStorageDirectory", "getExternalFilesDir", "getExternalFilesDirs",
             "getExternalStoragePublicDirectory", "getExternalCacheDir", "getExternalCacheDirs")
    sites = ctx.calls(ANY, names)
    if not ctx.manifest.requests("android.permission.WRITE_EXTERNAL_STORAGE"):
        return passed("WRITE_EXTERNAL_STORAGE is not requested")
    if not sites:
        if ctx.may_have_lost(ANY, names):
            return unverifiable("external storage calls may sit in undecoded code")
        return passed("no external storage path APIs are called")
    ev = [_ev(s, f"external storage path via {_call(s)} with WRITE_EXTERNAL_STORAGE requested", "external-storage") for s in sites]
    return violation(ev)


def _logging(ctx: Context) -> bool | None:
    return _any(ctx.uses(LOGGERS), ctx.uses(PRINT_STREAM, PRINT_NAMES))


def ds3(ctx: Context) -> Outcome:
    sites = ctx.calls(LOGGERS) + ctx.calls(PRINT_STREAM, PRINT_NAMES)
    if not sites:
        return _gate(_logging(ctx), "logging calls") or not_applicable("no logging calls")
    hits = _sensitive_hits(ctx, sites, "sensitive-log", "sensitive data logged")
    if hits:
        return violation(hits)
    args = [a for s in sites for a in s.const_args]
    if args and all(not isinstance(a, Known) for a in args):
        return unverifiable("every logging argument is unresolved")
    return passed("no sensitive constants reach logging calls")


def ds4(ctx: Context) -> Outcome:
    hits = []
    for s in ctx.code.call_sites:
        callee = s.callee.owner
        if not ctx.is_app_code(s.caller.owner) or ctx.is_app_code(callee) or ctx.is_platform(callee):
            continue
        for i, kw in ctx.sensitive_args(s):
            hits.append(_ev(s, f"sensitive constant {render_value(s.const_args[i])} ('{kw}') passed to third-party {_call(s)}", "third-party"))
    if hits:
        return violation(hits)
    return passed("no sensitive constants reach third-party code")


def _protective_input_type(v: int) -> bool:
    cls, variation = v & 0xF, v & 0xFF0
    if v & 0x80000:  # TYPE_TEXT_FLAG_NO_SUGGESTIONS
        return True
    return (cls == 1 and variation in (0x80, 0x90, 0xE0)) or (cls == 2 and variation == 0x10)


def _input_type_sites(ctx: Context) -> list[CallSite]:
    return ctx.calls(INPUT_TYPE_SETTERS, ("setInputType", "setRawInputType"))


def ds5(ctx: Context) -> Outcome:
    gate = _gate(ctx.text_input_usage(), "text input widgets")
    if gate:
        return gate
    sites = _input_type_sites(ctx)
    vals = [_arg(s, 0) for s in sites]
    if any(isinstance(v, Known) and isinstance(v.value, int) and _protective_input_type(v.value) for v in vals):
        return passed("input type disables suggestions or marks the field as a password")
    if any(not isinstance(v, Known) for v in vals):
        return unverifiable("input type set from an unresolved value")
    if ctx.may_have_lost(INPUT_TYPE_SETTERS, ("setInputType", "setRawInputType")):
        return unverifiable("input type calls may sit in undecoded code")
    widgets = ctx.calls(TEXT_INPUT_WIDGETS)
    ev = [_ev(s, f"text input via {_call(s)} without a no-suggestions or password input type", "keyboard-cache") for s in widgets]
    if not ev:
        ev = [Evidence(c.name, "text input widget subclass without a protective input type", "keyboard-cache")
              for c in ctx.subclasses(TEXT_INPUT_WIDGETS)]
    return violation(ev)


def ds6(ctx: Context) -> Outcome:
    extras = ctx.calls(INTENT, ("putExtra", "putExtras")) + ctx.calls(("android.os.Bundle",), ("put*",))
    sends = ctx.calls(ANY, IPC_SEND)
    explicit = ctx.calls(INTENT, ("setClass", "setClassName", "setComponent", "setPackage"))
    ctors = ctx.calls(INTENT, ("<init>",))
    exported = [c for c in ctx.manifest.components if c.exported and not c.launcher_only]
    hits = []
    for s in extras:
        sens = ctx.sensitive_args(s)
        if not sens:
            continue
        if not any(_same_method(s, t) for t in sends):
            continue
        is_explicit = any(_same_method(s, e) for e in explicit) or any(
            _same_method(s, c) and any(p == "Ljava/lang/Class;" for p in c.callee.params) for c in ctors
        )
        if is_explicit and not exported:
            continue
        target = "an implicit intent" if not is_explicit else "an app with exported components"
        i, kw = sens[0]
        hits.append(_ev(s, f"sensitive extra {render_value(s.const_args[i])} ('{kw}') sent via {target}", "ipc-extra"))
    if hits:
        return violation(hits)
    return passed("no sensitive intent extras are sent to exported or implicit targets")


TEXT_SETTERS: Owners = ("android.widget.TextView",)


def _text_set_sites(ctx: Context) -> list[CallSite]:
    return sorted(
        set(ctx.calls(TEXT_SETTERS + ("android.widget.",), ("setText", "append", "setHint"))
            + ctx.calls(("android.widget.Toast",), ("makeText",))),
        key=CallSite.sort_key,
    )


def ds7(ctx: Context) -> Outcome:
    sites = _text_set_sites(ctx)
    if not sites:
        lost = ctx.may_have_lost(TEXT_SETTERS + ("android.widget.",), ("setText", "append", "setHint"))
        return unverifiable("UI text calls may sit in undecoded code") if lost else not_applicable("no UI text-set calls")
    masks = ctx.calls(ANY, ("setTransformationMethod",))
    hits = []
    for s in sites:
        if any(_same_method(s, m) for m in masks):
            continue
        for i, kw in ctx.sensitive_args(s):
            hits.append(_ev(s, f"sensitive text {render_value(s.const_args[i])} ('{kw}') shown via {_call(s)} without masking", "ui-leak"))
    if hits:
        return violation(hits)
    return passed("no sensitive constants are displayed unmasked")


def ds8(ctx: Context) -> Outcome:
    flag = ctx.manifest.app_flags.allow_backup
    if flag is False:
        return passed("android:allowBackup is false")
    why = "android:allowBackup is true" if flag else "android:allowBackup is absent (platform default true)"
    return violation([Evidence(f"{MANIFEST}:application", why, "allow-backup")])


WINDOW_OWNERS: Owners = ("android.view.Window",)


def ds9(ctx: Context) -> Outcome:
    usage = ctx.calls(ANY, ("getWindow",)) + ctx.calls(WINDOW_OWNERS) + ctx.calls(
        ("android.view.WindowManager", "android.view.ViewManager"), ("addView",))
    if not usage:
        lost = ctx.may_have_lost(ANY, ("getWindow",)) or ctx.may_have_lost(WINDOW_OWNERS)
        return unverifiable("window calls may sit in undecoded code") if lost else not_applicable("no window API usage")
    setters = ctx.calls(WINDOW_OWNERS, ("addFlags", "setFlags"))
    vals = [_arg(s, 0) for s in setters]
    if any(isinstance(v, Known) and isinstance(v.value, int) and v.value & 0x2000 for v in vals):
        return passed("FLAG_SECURE is set")
    if any(not isinstance(v, Known) for v in vals):
        return unverifiable("window flags set from an unresolved value")
    if ctx.may_have_lost(WINDOW_OWNERS, ("addFlags", "setFlags")):
        return unverifiable("window flag calls may sit in undecoded code")
    return violation([_ev(s, f"window used via {_call(s)} without FLAG_SECURE", "no-flag-secure") for s in usage])


AUTH_OWNERS: Owners = (
    "android.hardware.biometrics.BiometricPrompt", "androidx.biometric.BiometricPrompt",
    "android.hardware.fingerprint.FingerprintManager", "androidx.core.hardware.fingerprint.FingerprintManagerCompat",
)
DEVICE_SECURE = [
    (("android.app.KeyguardManager",), ("isDeviceSecure", "isKeyguardSecure", "createConfirmDeviceCredentialIntent")),
    (("android.hardware.biometrics.BiometricManager", "androidx.biometric.BiometricManager"), ("canAuthenticate",)),
]


def _auth_flows(ctx: Context) -> tuple[list[CallSite], bool]:
    sites = ctx.calls(AUTH_OWNERS) + ctx.calls(
        ("android.security.keystore.KeyGenParameterSpec$Builder",), ("setUserAuthenticationRequired",))
    for s in _input_type_sites(ctx):
        v = _arg(s, 0)
        if isinstance(v, Known) and isinstance(v.value, int):
            cls, var = v.value & 0xF, v.value & 0xFF0
            if (cls == 1 and var in (0x80, 0x90, 0xE0)) or (cls == 2 and var == 0x10):
                sites.append(s)
    lost = ctx.may_have_lost(AUTH_OWNERS) or ctx.may_have_lost(INPUT_TYPE_SETTERS, ("setInputType",))
    return sorted(set(sites), key=CallSite.sort_key), lost


def ds10(ctx: Context) -> Outcome:
    flows, lost = _auth_flows(ctx)
    if not flows:
        return unverifiable("authentication flows may sit in undecoded code") if lost else not_applicable("no authentication-gated flows")
    for owners, names in DEVICE_SECURE:
        if ctx.calls(owners, names):
            return passed("device pass-code state is queried")
    if any(ctx.may_have_lost(o, n) for o, n in DEVICE_SECURE):
        return unverifiable("device-security queries may sit in undecoded code")
    return violation([_ev(s, f"authentication flow via {_call(s)} without a device pass-code check", "no-device-check") for s in flows])


def _ds11_hits(ctx: Context) -> list[Evidence]:
    return _sensitive_hits(ctx, _persistence_sites(ctx), "sensitive-persistence", "sensitive data persisted locally")


def ds11(ctx: Context) -> Outcome:
    hits = _ds11_hits(ctx)
    if hits:
        return violation(hits)
    return passed("no sensitive constants reach local persistence")


ENCRYPTED_STORAGE = ("androidx.security.crypto.", "net.sqlcipher.", "net.zetetic.database.sqlcipher.")


def ds12(ctx: Context) -> Outcome:
    gate = _gate(_persistence_usage(ctx), "local persistence")
    if gate:
        return gate
    if ctx.uses(ENCRYPTED_STORAGE):
        return passed("encrypted storage library in use")
    ciphers = ctx.calls(("javax.crypto.Cipher",))
    hits = []
    for s in _persistence_sites(ctx):
        if not ctx.sensitive_args(s) or any(_same_method(s, c) for c in ciphers):
            continue
        hits.append(_ev(s, f"sensitive data persisted via {_call(s)} with no encryption on the path", "no-encryption"))
    if hits:
        return violation(hits)
    return passed("no unencrypted sensitive persistence")


# -- crypto -------------------------------------------------------------------

KEY_SPECS: Owners = (
    "javax.crypto.spec.SecretKeySpec", "javax.crypto.spec.DESKeySpec", "javax.crypto.spec.DESedeKeySpec",
    "javax.crypto.spec.PBEKeySpec",
)


def crypto1(ctx: Context) -> Outcome:
    hits = []
    for s in ctx.calls(KEY_SPECS, ("<init>",)):
        key = _arg(s, 0)
        if isinstance(key, Known) and isinstance(key.value, (str, bytes)):
            hits.append(_ev(s, f"hard-coded key material {render_value(key)} in {s.callee.owner_java}", "hardcoded-key"))
    if hits:
        return violation(hits)
    return passed("no constant key material reaches key constructors")


BLOCK_CIPHERS = {"AES", "DES", "DESEDE", "TRIPLEDES", "3DES", "BLOWFISH", "RC2", "RC5", "TWOFISH",
                 "CAMELLIA", "SEED", "ARIA", "IDEA", "CAST5", "CAST6", "SM4"}


def _split_transformation(t: str) -> tuple[str, str | None]:
    parts = t.strip().split("/")
    return parts[0].upper(), (parts[1].upper() if len(parts) > 1 else None)


def _preceding(ctx: Context, site: CallSite, owners: Owners, names: tuple[str, ...]) -> CallSite | None:
    best = None
    for s in ctx.calls(owners, names):
        if _same_method(s, site) and s.location.index < site.location.index:
            best = s
    return best


def crypto2(ctx: Context) -> Outcome:
    cfg = ctx.config
    hits: list[Evidence] = []
    unsure: list[str] = []
    for s in ctx.calls(("javax.crypto.Cipher",), ("getInstance",)):
        t = _arg(s, 0)
        if not isinstance(t, Known) or not isinstance(t.value, str):
            unsure.append(f"{s.location}: unresolved transformation")
            continue
        alg, mode = _split_transformation(t.value)
        base = alg.split("_")[0]
        if mode is None and base in BLOCK_CIPHERS:
            hits.append(_ev(s, f"transformation {t.value!r} defaults to ECB mode", "ecb"))
        elif mode == "ECB" and base not in ("RSA", "EC", "ECIES", "ELGAMAL"):
            hits.append(_ev(s, f"transformation {t.value!r} uses ECB mode", "ecb"))
    for s in ctx.calls(("javax.crypto.spec.IvParameterSpec",), ("<init>",)) + ctx.calls(
            ("javax.crypto.spec.GCMParameterSpec",), ("<init>",)):
        iv = _arg(s, 1 if s.callee.owner.endswith("GCMParameterSpec;") else 0)
        if isinstance(iv, Known) and isinstance(iv.value, bytes):
            hits.append(_ev(s, f"static IV {render_value(iv)}", "static-iv"))
    for s in ctx.calls(("javax.crypto.spec.PBEKeySpec",), ("<init>",)) + ctx.calls(
            ("javax.crypto.spec.PBEParameterSpec",), ("<init>",)):
        idx = 2 if s.callee.owner.endswith("PBEKeySpec;") else 1
        if len(s.callee.params) <= idx:
            continue
        it = _arg(s, idx)
        if not isinstance(it, Known):
            unsure.append(f"{s.location}: unresolved PBE iteration count")
        elif isinstance(it.value, int) and it.value < cfg.pbe_min_iterations:
            hits.append(_ev(s, f"PBE iteration count {it.value} < {cfg.pbe_min_iterations}", "pbe-iterations"))
    for owner, getter, init in (("java.security.KeyPairGenerator", "getInstance", "initialize"),
                                ("javax.crypto.KeyGenerator", "getInstance", "init")):
        for s in ctx.calls((owner,), (init,)):
            if not s.callee.params or s.callee.params[0] != "I":
                continue
            size = _arg(s, 0)
            src = _preceding(ctx, s, (owner,), (getter,))
            alg = _arg(src, 0) if src else Unknown()
            alg_name = alg.value.upper() if isinstance(alg, Known) and isinstance(alg.value, str) else None
            if not isinstance(size, Known) or not isinstance(size.value, int):
                unsure.append(f"{s.location}: unresolved key size")
                continue
            if alg_name in ("RSA", "DSA", "DH", "DIFFIEHELLMAN") and size.value < cfg.rsa_min_bits:
                hits.append(_ev(s, f"{alg_name} key size {size.value} < {cfg.rsa_min_bits}", "key-size"))
            elif alg_name == "AES" and size.value < cfg.aes_min_bits:
                hits.append(_ev(s, f"AES key size {size.value} < {cfg.aes_min_bits}", "key-size"))
            elif alg_name is None and size.value < cfg.rsa_min_bits:
                unsure.append(f"{s.location}: key size {size.value} for an unresolved algorithm")
    for s in ctx.calls(("java.security.spec.RSAKeyGenParameterSpec",), ("<init>",)):
        size = _arg(s, 0)
        if isinstance(size, Known) and isinstance(size.value, int) and size.value < cfg.rsa_min_bits:
            hits.append(_ev(s, f"RSA key size {size.value} < {cfg.rsa_min_bits}", "key-size"))
        elif not isinstance(size, Known):
            unsure.append(f"{s.location}: unresolved key size")
    if hits:
        return violation(hits)
    if unsure:
        return unverifiable("; ".join(sorted(unsure)[:5]))
    return passed("no insecure mode, static IV, weak PBE iteration count or short key")


WEAK_DIGESTS = {"MD5", "MD4", "MD2"}
WEAK_CIPHERS = {"DES", "DESEDE", "TRIPLEDES", "3DES", "RC4", "ARCFOUR", "BLOWFISH", "RC2"}


def _weak_algorithm(name: str, kind: str) -> bool:
    n = name.strip().upper()
    if kind == "digest":
        return n in WEAK_DIGESTS
    if kind == "mac":
        return n in ("HMACMD5", "HMACMD4", "HMACMD2")
    if kind == "signature":
        return n.startswith(("MD5WITH", "SHA1WITH", "MD2WITH"))
    alg = n.split("/")[0]
    return alg in WEAK_CIPHERS or alg.startswith("PBEWITHMD5")


def crypto3(ctx: Context) -> Outcome:
    targets: list[tuple[CallSite, object, str]] = []
    for s in ctx.calls(("java.security.MessageDigest",), ("getInstance",)):
        targets.append((s, _arg(s, 0), "digest"))
    for owner in ("javax.crypto.Cipher", "javax.crypto.KeyGenerator", "javax.crypto.SecretKeyFactory"):
        for s in ctx.calls((owner,), ("getInstance",)):
            targets.append((s, _arg(s, 0), "cipher"))
    for s in ctx.calls(("javax.crypto.spec.SecretKeySpec",), ("<init>",)):
        idx = max((i for i, p in enumerate(s.callee.params) if p == "Ljava/lang/String;"), default=None)
        if idx is not None:
            targets.append((s, _arg(s, idx), "cipher"))
    for s in ctx.calls(("javax.crypto.Mac",), ("getInstance",)):
        targets.append((s, _arg(s, 0), "mac"))
    for s in ctx.calls(("java.security.Signature",), ("getInstance",)):
        targets.append((s, _arg(s, 0), "signature"))
    hits, unsure = [], []
    for s, a, kind in targets:
        if not isinstance(a, Known) or not isinstance(a.value, str):
            unsure.append(f"{s.location}: unresolved algorithm")
        elif _weak_algorithm(a.value, kind):
            hits.append(_ev(s, f"deprecated algorithm {a.value!r} via {_call(s)}", f"weak-{kind}"))
    if hits:
        return violation(hits)
    if unsure:
        return unverifiable("; ".join(sorted(unsure)[:5]))
    return passed("no deprecated algorithm constants")


PRNG_SOURCES: Owners = ("java.util.Random", "java.util.concurrent.ThreadLocalRandom")
CRYPTO_SINKS: Owners = (
    "javax.crypto.", "java.security.spec.", "java.security.KeyPairGenerator", "java.security.KeyStore",
)


def _is_prng_source(ctx: Context, ins: Instr) -> bool:
    ref = ins.method
    if ref is None:
        return False
    if ref.owner == "Ljava/lang/Math;" and ref.name == "random":
        return True
    return ref.name.startswith("next") and ctx.owner_matches(ref.owner, PRNG_SOURCES)


def _is_crypto_sink(ctx: Context, ins: Instr) -> bool:
    ref = ins.method
    if ref is None:
        return False
    if ref.owner == "Ljava/security/SecureRandom;" and ref.name in ("setSeed", "<init>"):
        return True
    return ctx.owner_matches(ref.owner, CRYPTO_SINKS)


def crypto4(ctx: Context) -> Outcome:
    hits = []
    for c, m in ctx.code.methods():
        if not any(_is_prng_source(ctx, i) for i in m.instructions if i.op is Op.INVOKE):
            continue
        for k in taint_flows(m, lambda i: _is_prng_source(ctx, i), lambda i: _is_crypto_sink(ctx, i)):
            ref = m.instructions[k].method
            hits.append(Evidence(f"{c.name}->{_mkey(m)}@{k}",
                                 f"insecure PRNG output reaches {ref.owner_java}.{ref.name}", "insecure-prng"))
    if hits:
        return violation(hits)
    sources = ctx.calls(PRNG_SOURCES, ("next*",)) + ctx.calls(("java.lang.Math",), ("random",))
    sinks = ctx.calls(CRYPTO_SINKS)
    if sources and sinks:
        return unverifiable("insecure PRNG and crypto APIs both present; no intra-method flow found")
    return passed("no insecure PRNG output reaches crypto APIs")


def _mkey(m: MethodInfo) -> str:
    return f"{m.ref.name}({''.join(m.ref.params)}){m.ref.ret}"


# -- network ------------------------------------------------------------------

LOCAL_HOSTS = ("localhost", "127.0.0.1", "10.0.2.2", "0.0.0.0", "[::1]")
SCHEMA_HOSTS = (
    "schemas.android.com", "www.w3.org", "xml.org", "xmlpull.org", "ns.adobe.com", "java.sun.com",
    "xml.apache.org", "apache.org/xml", "schemas.xmlsoap.org", "purl.org", "www.xmlpull.org",
)


def _cleartext_url(text: str) -> bool:
    low = text.strip().lower()
    if not low.startswith("http://") or len(low) <= 7:
        return False
    rest = low[7:]
    host = rest.split("/", 1)[0].split(":", 1)[0] if not rest.startswith("[") else rest.split("]", 1)[0] + "]"
    if host in LOCAL_HOSTS:
        return False
    return not any(rest.startswith(h) for h in SCHEMA_HOSTS)


def tls1(ctx: Context) -> Outcome:
    ev = [Evidence(loc, f"cleartext URL {v[:80]!r}", "cleartext-url") for loc, v in ctx.const_strings if _cleartext_url(v)]
    if ctx.manifest.app_flags.uses_cleartext_traffic:
        ev.append(Evidence(f"{MANIFEST}:application", "android:usesCleartextTraffic is true", "cleartext-manifest"))
    if ev:
        return violation(ev)
    return passed("no cleartext URLs and cleartext traffic not enabled")


WEAK_PROTOCOLS = {"SSL", "SSLV2", "SSLV3", "TLSV1", "TLSV1.1"}
PERMISSIVE_VERIFIERS = ("org.apache.http.conn.ssl.AllowAllHostnameVerifier", "org.apache.http.conn.ssl.NoopHostnameVerifier")


def tls2(ctx: Context) -> Outcome:
    hits, unsure = [], []
    for s in ctx.calls(("javax.net.ssl.SSLContext",), ("getInstance",)):
        p = _arg(s, 0)
        if not isinstance(p, Known) or not isinstance(p.value, str):
            unsure.append(f"{s.location}: unresolved protocol")
        elif p.value.strip().upper() in WEAK_PROTOCOLS:
            hits.append(_ev(s, f"broken TLS protocol {p.value!r}", "weak-protocol"))
    for s in ctx.calls(PERMISSIVE_VERIFIERS):
        hits.append(_ev(s, f"permissive hostname verifier {s.callee.owner_java}", "allow-all-verifier"))
    for owner in ("org.apache.http.conn.ssl.SSLSocketFactory",):
        if ctx.field_referenced(owner, "ALLOW_ALL_HOSTNAME_VERIFIER"):
            hits.append(Evidence(owner + ".ALLOW_ALL_HOSTNAME_VERIFIER", "permissive hostname verifier constant", "allow-all-verifier"))
    if ctx.field_referenced("org.apache.http.conn.ssl.NoopHostnameVerifier", "INSTANCE"):
        hits.append(Evidence("org.apache.http.conn.ssl.NoopHostnameVerifier.INSTANCE", "permissive hostname verifier constant", "allow-all-verifier"))
    for c in ctx.subclasses(PERMISSIVE_VERIFIERS):
        hits.append(Evidence(c.name, "class extends a permissive hostname verifier", "allow-all-verifier"))
    if hits:
        return violation(sorted(set(hits)))
    if unsure:
        return unverifiable("; ".join(sorted(unsure)[:5]))
    return passed("no broken TLS protocol or permissive hostname verifier")


def _returns_true(m: MethodInfo) -> bool:
    rets = [(k, i) for k, i in enumerate(m.instructions) if i.op is Op.RETURN]
    if not rets or any(not i.reads for _, i in rets):
        return False
    return all(resolve_register(m, k, i.reads[0]) == Known(1) for k, i in rets)


def tls3(ctx: Context) -> Outcome:
    hits = []
    for c in ctx.subclasses(("javax.net.ssl.X509TrustManager", "javax.net.ssl.X509ExtendedTrustManager")):
        for m in c.methods:
            if m.ref.name == "checkServerTrusted" and m.is_empty_body:
                hits.append(Evidence(f"{c.name}->{_mkey(m)}", "trust manager accepts every server certificate", "empty-trust-manager"))
    for c in ctx.subclasses(("javax.net.ssl.HostnameVerifier",)):
        for m in c.methods:
            if m.ref.name == "verify" and m.ref.ret == "Z" and m.has_code and _returns_true(m):
                hits.append(Evidence(f"{c.name}->{_mkey(m)}", "hostname verifier always returns true", "accept-all-verifier"))
    for c in ctx.subclasses(("android.webkit.WebViewClient",)):
        for m in c.methods:
            if m.ref.name != "onReceivedSslError":
                continue
            if any(i.op is Op.INVOKE and i.method and i.method.name == "proceed"
                   and i.method.owner == "Landroid/webkit/SslErrorHandler;" for i in m.instructions):
                hits.append(Evidence(f"{c.name}->{_mkey(m)}", "WebView SSL errors are ignored via proceed()", "ssl-error-proceed"))
    if hits:
        return violation(hits)
    if ctx.code.lost_classes:
        return unverifiable("some classes were not decoded")
    return passed("no trust-all certificate or hostname validation")


NETWORKING: Owners = (
    "java.net.HttpURLConnection", "javax.net.ssl.HttpsURLConnection", "okhttp3.", "retrofit2.",
    "org.apache.http.client.", "org.apache.http.impl.client.", "com.android.volley.",
)
PINNING: Owners = ("okhttp3.CertificatePinner", "com.datatheorem.android.trustkit.")


def _networking(ctx: Context) -> tuple[list[CallSite], bool | None]:
    sites = sorted(set(ctx.calls(NETWORKING) + ctx.calls(("java.net.URL",), ("openConnection", "openStream"))),
                   key=CallSite.sort_key)
    if sites:
        return sites, True
    lost = ctx.may_have_lost(NETWORKING) or ctx.may_have_lost(("java.net.URL",), ("openConnection", "openStream"))
    return sites, None if lost else False


def tls4(ctx: Context) -> Outcome:
    sites, fact = _networking(ctx)
    gate = _gate(fact, "networking APIs")
    if gate:
        return gate
    if ctx.manifest.app_flags.network_security_config is not None:
        return passed("network security configuration referenced from the manifest")
    if ctx.uses(PINNING):
        return passed("certificate pinning API in use")
    if ctx.may_have_lost(PINNING):
        return unverifiable("pinning calls may sit in undecoded code")
    return violation([_ev(s, f"network access via {_call(s)} without certificate pinning", "no-pinning") for s in sites])


# -- platform -----------------------------------------------------------------

# permission short name -> (API owner prefixes, string constants, (owner, field) references)
PERMISSION_APIS: dict[str, tuple[tuple[str, ...], tuple[str, ...], tuple[tuple[str, str], ...]]] = {
    "CAMERA": (("android.hardware.Camera", "android.hardware.camera2.", "androidx.camera."),
               ("android.media.action.IMAGE_CAPTURE", "android.media.action.VIDEO_CAPTURE"),
               (("android.provider.MediaStore", "ACTION_IMAGE_CAPTURE"), ("android.provider.MediaStore", "ACTION_VIDEO_CAPTURE"))),
    "RECORD_AUDIO": (("android.media.AudioRecord", "android.media.MediaRecorder", "android.speech.SpeechRecognizer"), (), ()),
    "ACCESS_FINE_LOCATION": (("android.location.", "com.google.android.gms.location."), (), ()),
    "ACCESS_COARSE_LOCATION": (("android.location.", "com.google.android.gms.location."), (), ()),
    "ACCESS_BACKGROUND_LOCATION": (("android.location.", "com.google.android.gms.location."), (), ()),
    "ACCESS_MEDIA_LOCATION": (("android.media.ExifInterface", "androidx.exifinterface.", "android.provider.MediaStore"), (), ()),
    "READ_CONTACTS": (("android.provider.ContactsContract",), ("content://com.android.contacts",), ()),
    "WRITE_CONTACTS": (("android.provider.ContactsContract",), ("content://com.android.contacts",), ()),
    "GET_ACCOUNTS": (("android.accounts.AccountManager",), (), ()),
    "READ_CALENDAR": (("android.provider.CalendarContract",), ("content://com.android.calendar",), ()),
    "WRITE_CALENDAR": (("android.provider.CalendarContract",), ("content://com.android.calendar",), ()),
    "READ_PHONE_STATE": (("android.telephony.TelephonyManager", "android.telephony.SubscriptionManager"), (), ()),
    "READ_PHONE_NUMBERS": (("android.telephony.TelephonyManager", "android.telephony.SubscriptionManager"), (), ()),
    "CALL_PHONE": (("android.telecom.TelecomManager",), ("android.intent.action.CALL",), (("android.content.Intent", "ACTION_CALL"),)),
    "ANSWER_PHONE_CALLS": (("android.telecom.TelecomManager",), (), ()),
    "READ_CALL_LOG": (("android.provider.CallLog",), ("content://call_log",), ()),
    "WRITE_CALL_LOG": (("android.provider.CallLog",), ("content://call_log",), ()),
    "ADD_VOICEMAIL": (("android.provider.VoicemailContract",), (), ()),
    "USE_SIP": (("android.net.sip.",), (), ()),
    "PROCESS_OUTGOING_CALLS": ((), ("android.intent.action.NEW_OUTGOING_CALL",), (("android.content.Intent", "ACTION_NEW_OUTGOING_CALL"),)),
    "BODY_SENSORS": (("android.hardware.SensorManager",), (), ()),
    "BODY_SENSORS_BACKGROUND": (("android.hardware.SensorManager",), (), ()),
    "ACTIVITY_RECOGNITION": (("com.google.android.gms.location.ActivityRecognition", "android.hardware.SensorManager"), (), ()),
    "SEND_SMS": (("android.telephony.SmsManager", "android.telephony.gsm.SmsManager"), ("smsto:", "sms:"), ()),
    "RECEIVE_SMS": (("android.telephony.SmsMessage", "android.provider.Telephony"), ("android.provider.Telephony.SMS_RECEIVED",), ()),
    "READ_SMS": (("android.provider.Telephony",), ("content://sms",), ()),
    "RECEIVE_WAP_PUSH": (("android.provider.Telephony",), ("android.provider.Telephony.WAP_PUSH_RECEIVED",), ()),
    "RECEIVE_MMS": (("android.provider.Telephony",), ("content://mms",), ()),
    "READ_EXTERNAL_STORAGE": (("android.os.Environment", "android.provider.MediaStore"), (), ()),
    "WRITE_EXTERNAL_STORAGE": (("android.os.Environment", "android.provider.MediaStore"), (), ()),
    "READ_MEDIA_IMAGES": (("android.provider.MediaStore",), (), ()),
    "READ_MEDIA_VIDEO": (("android.provider.MediaStore",), (), ()),
    "READ_MEDIA_AUDIO": (("android.provider.MediaStore",), (), ()),
    "READ_MEDIA_VISUAL_USER_SELECTED": (("android.provider.MediaStore",), (), ()),
    "POST_NOTIFICATIONS": (("android.app.NotificationManager", "androidx.core.app.NotificationManagerCompat"), (), ()),
    "NEARBY_WIFI_DEVICES": (("android.net.wifi.",), (), ()),
    "BLUETOOTH_SCAN": (("android.bluetooth.",), (), ()),
    "BLUETOOTH_CONNECT": (("android.bluetooth.",), (), ()),
    "BLUETOOTH_ADVERTISE": (("android.bluetooth.",), (), ()),
    "UWB_RANGING": (("android.uwb.", "androidx.core.uwb."), (), ()),
}
# Context methods whose name alone ties them to a permission.
PERMISSION_METHOD_NAMES = {
    "READ_EXTERNAL_STORAGE": ("getExternalFilesDir", "getExternalStorageDirectory", "getExternalStoragePublicDirectory",
                              "getExternalCacheDir", "getExternalFilesDirs"),
    "WRITE_EXTERNAL_STORAGE": ("getExternalFilesDir", "getExternalStorageDirectory", "getExternalStoragePublicDirectory",
                               "getExternalCacheDir", "getExternalFilesDirs"),
}


def _under(java_name: str, prefixes: tuple[str, ...]) -> bool:
    """"a.b.C" covers that class and its nested classes; "a.b." covers a package."""
    for p in prefixes:
        if java_name == p or java_name.startswith(p if p.endswith(".") else p + "$"):
            return True
    return False


def _justified(ctx: Context, short: str) -> bool | None:
    spec = PERMISSION_APIS.get(short)
    if spec is None:
        return None
    owners, strings, fields = spec
    if owners and any(_under(r.owner_java, owners) for r in ctx.code.method_refs):
        return True
    if owners and any(_under(s.callee.owner_java, owners) for s in ctx.code.call_sites):
        return True
    names = PERMISSION_METHOD_NAMES.get(short)
    if names and ctx.calls(ANY, names):
        return True
    if any(v.startswith(s) for _, v in ctx.const_strings for s in strings):
        return True
    if any(ctx.field_referenced(o, n) for o, n in fields):
        return True
    return False


def plat1(ctx: Context) -> Outcome:
    dangerous = ctx.config.dangerous_permissions
    perms = [p for p in ctx.manifest.permissions
             if (is_dangerous(p.name, dangerous) if dangerous is not None else p.is_dangerous)]
    if not perms:
        return passed("no dangerous permissions requested")
    hits, unsure = [], []
    for p in perms:
        short = p.name.rsplit(".", 1)[-1]
        fact = _justified(ctx, short)
        if fact is None:
            unsure.append(f"{p.name}: no known API surface")
        elif not fact:
            if not ctx.code.complete:
                unsure.append(f"{p.name}: justifying code may be undecoded")
            else:
                hits.append(Evidence(f"{MANIFEST}:uses-permission[{p.name}]",
                                     f"dangerous permission {p.name} has no matching API usage", "unjustified-permission"))
    if hits:
        return violation(hits)
    if unsure:
        return unverifiable("; ".join(unsure[:5]))
    return passed(f"{len(perms)} dangerous permission(s), each with matching API usage")


URI_SOURCES: Owners = ("android.content.Intent", "android.net.Uri", "android.os.Bundle")
SCHEME_SINKS: list[tuple[Owners, tuple[str, ...] | None]] = [
    (PREFS_EDITOR, ("put*",)),
    (FILE_WRITERS, WRITE_NAMES),
    (SQLITE_DB, SQLITE_WRITES + ("rawQuery",)),
    (LOGGERS, None),
    (WEBVIEW, ("loadUrl", "loadData", "loadDataWithBaseURL", "evaluateJavascript", "postUrl")),
    (("java.lang.Runtime",), ("exec",)),
    (("java.lang.ProcessBuilder",), ("<init>", "command")),
    (("java.io.File",), ("<init>",)),
    (ANY, IPC_SEND),
]


def _is_uri_source(ctx: Context, ins: Instr) -> bool:
    ref = ins.method
    if ref is None:
        return False
    if ref.name == "getIntent" and not ins.static:
        return True
    return (ref.name.startswith("get") or ref.name == "toString") and ctx.owner_matches(ref.owner, URI_SOURCES)


def _is_scheme_sink(ctx: Context, ins: Instr) -> bool:
    ref = ins.method
    return ref is not None and any(ctx.matches(ref, o, n) for o, n in SCHEME_SINKS)


def plat2(ctx: Context) -> Outcome:
    comps = [c for c in ctx.manifest.components if c.custom_schemes]
    if not comps:
        return passed("no custom URL schemes declared")
    hits, unsure = [], []
    for comp in comps:
        cls = ctx.class_for_component(comp.name)
        if cls is None:
            if ctx.class_lost(comp.name):
                unsure.append(f"{comp.name}: class not decoded")
            continue
        for m in cls.methods:
            for k in taint_flows(m, lambda i: _is_uri_source(ctx, i), lambda i: _is_scheme_sink(ctx, i)):
                ref = m.instructions[k].method
                schemes = ",".join(comp.custom_schemes)
                hits.append(Evidence(f"{cls.name}->{_mkey(m)}@{k}",
                                     f"data from custom scheme ({schemes}) reaches {ref.owner_java}.{ref.name}", "scheme-data-sink"))
    if hits:
        return violation(hits)
    if unsure:
        return unverifiable("; ".join(unsure[:5]))
    return passed("custom scheme handlers do not move intent data into sensitive sinks")


PERMISSION_GUARDS = ("checkCallingPermission", "checkCallingOrSelfPermission", "checkPermission",
                     "checkSelfPermission", "enforceCallingPermission", "enforceCallingOrSelfPermission",
                     "enforcePermission", "checkCallingUriPermission", "enforceCallingUriPermission")


def plat3(ctx: Context) -> Outcome:
    comps = [c for c in ctx.manifest.components
             if c.exported and not c.launcher_only and not c.permission]
    if not comps:
        return passed("no unguarded exported components")
    hits, unsure = [], []
    for comp in comps:
        cls = ctx.class_for_component(comp.name)
        if cls is None:
            if ctx.class_lost(comp.name):
                unsure.append(f"{comp.name}: class not decoded")
            continue
        sites = [s for s in ctx.code.call_sites if s.location.class_name == cls.name]
        if any(s.callee.name in PERMISSION_GUARDS for s in sites):
            continue
        for s in sites:
            kw = ctx.lexicon.match(s.callee.name)
            sens = ctx.sensitive_args(s)
            if kw or sens:
                what = f"calls {_call(s)}" if kw else f"passes {render_value(s.const_args[sens[0][0]])}"
                hits.append(_ev(s, f"exported {comp.kind.value} {comp.name} {what} without a permission check", "unguarded-ipc"))
    if hits:
        return violation(hits)
    if unsure:
        return unverifiable("; ".join(unsure[:5]))
    return passed("exported components expose no sensitive functionality unguarded")


def _webview_gate(ctx: Context) -> Outcome | None:
    return _gate(ctx.webview_usage(), "WebView usage")


def plat4(ctx: Context) -> Outcome:
    gate = _webview_gate(ctx)
    if gate:
        return gate
    sites = ctx.calls(WEBSETTINGS, ("setJavaScriptEnabled",))
    vals = [(s, _arg(s, 0)) for s in sites]
    hits = [_ev(s, "JavaScript enabled in WebView", "javascript-enabled") for s, v in vals if v == Known(1)]
    if hits:
        return violation(hits)
    if any(not isinstance(v, Known) for _, v in vals):
        return unverifiable("setJavaScriptEnabled with an unresolved value")
    if ctx.may_have_lost(WEBSETTINGS, ("setJavaScriptEnabled",)):
        return unverifiable("JavaScript settings may sit in undecoded code")
    return passed("JavaScript is not enabled")


WEB_LOADS = ("loadUrl", "postUrl", "loadDataWithBaseURL")
FILE_ACCESS = ("setAllowFileAccess", "setAllowFileAccessFromFileURLs", "setAllowUniversalAccessFromFileURLs")


def plat5(ctx: Context) -> Outcome:
    gate = _webview_gate(ctx)
    if gate:
        return gate
    hits, unsure = [], []
    for s in ctx.calls(WEBVIEW, WEB_LOADS):
        url = _arg(s, 0)
        if not isinstance(url, Known):
            if s.callee.name != "loadDataWithBaseURL":
                unsure.append(f"{s.location}: unresolved URL")
        elif isinstance(url.value, str) and url.value.lower().startswith(("http://", "file://")):
            hits.append(_ev(s, f"WebView loads {url.value[:80]!r}", "unsafe-scheme"))
    for s in ctx.calls(WEBSETTINGS, FILE_ACCESS):
        v = _arg(s, 0)
        if v == Known(1):
            hits.append(_ev(s, f"{s.callee.name}(true)", "file-access"))
        elif not isinstance(v, Known):
            unsure.append(f"{s.location}: unresolved {s.callee.name} value")
    for s in ctx.calls(WEBSETTINGS, ("setMixedContentMode",)):
        v = _arg(s, 0)
        if v == Known(0):
            hits.append(_ev(s, "mixed content always allowed", "mixed-content"))
        elif not isinstance(v, Known):
            unsure.append(f"{s.location}: unresolved mixed content mode")
    if hits:
        return violation(hits)
    if unsure:
        return unverifiable("; ".join(sorted(unsure)[:5]))
    if ctx.may_have_lost(WEBVIEW, WEB_LOADS) or ctx.may_have_lost(WEBSETTINGS, FILE_ACCESS + ("setMixedContentMode",)):
        return unverifiable("WebView loads or settings may sit in undecoded code")
    return passed("WebView loads only safe schemes and keeps file access disabled")


def plat6(ctx: Context) -> Outcome:
    gate = _webview_gate(ctx)
    if gate:
        return gate
    sites = ctx.calls(WEBVIEW, ("addJavascriptInterface",))
    if sites:
        return violation([_ev(s, "JavaScript bridge exposed via addJavascriptInterface", "js-bridge") for s in sites])
    if ctx.may_have_lost(WEBVIEW, ("addJavascriptInterface",)):
        return unverifiable("addJavascriptInterface may sit in undecoded code")
    return passed("no JavaScript bridge exposed")


def plat7(ctx: Context) -> Outcome:
    gate = _gate(ctx.text_input_usage(), "input surfaces")
    if gate:
        return gate
    if ctx.manifest.filters_obscured_touches:
        return passed("filterTouchesWhenObscured set in the manifest")
    for c in ctx.app_classes():
        if any(m.ref.name == "onFilterTouchEventForSecurity" and m.has_code for m in c.methods):
            return passed(f"{c.name} overrides onFilterTouchEventForSecurity")
    sites = ctx.calls(ANY, ("setFilterTouchesWhenObscured",))
    vals = [_arg(s, 0) for s in sites]
    if any(v == Known(1) for v in vals):
        return passed("setFilterTouchesWhenObscured(true) called")
    if any(not isinstance(v, Known) for v in vals):
        return unverifiable("setFilterTouchesWhenObscured with an unresolved value")
    if ctx.may_have_lost(ANY, ("setFilterTouchesWhenObscured",)):
        return unverifiable("touch filtering may be enabled in undecoded code")
    surfaces = ctx.calls(TEXT_INPUT_WIDGETS)
    ev = [_ev(s, "input surface without touch filtering; draw-on-top windows can overlay it", "no-touch-filter") for s in surfaces]
    if not ev:
        ev = [Evidence(c.name, "input widget subclass without touch filtering", "no-touch-filter")
              for c in ctx.subclasses(TEXT_INPUT_WIDGETS)]
    return violation(ev)


def plat8(ctx: Context) -> Outcome:
    gate = _webview_gate(ctx)
    if gate:
        return gate
    clears = ctx.calls(WEBVIEW, ("clearCache", "clearFormData"))
    if clears:
        return passed("WebView cache is cleared")
    if ctx.may_have_lost(WEBVIEW, ("clearCache", "clearFormData")):
        return unverifiable("cache clearing may sit in undecoded code")
    usage = ctx.calls(WEBVIEW_TYPES)
    ev = [_ev(s, "WebView used without clearCache/clearFormData", "no-cache-clear") for s in usage[:1]]
    if not ev:
        ev = [Evidence(c.name, "WebView subclass without clearCache/clearFormData", "no-cache-clear")
              for c in ctx.subclasses(WEBVIEW_TYPES)[:1]]
    return violation(ev)


# -- registry -----------------------------------------------------------------

CheckFn = Callable[[Context], Outcome]


APPLICABILITY: dict[CheckId, Callable[[Context], bool | None]] = {
    CheckId.DS1: lambda c: bool([1 for _, v in c.const_strings if c.lexicon.match(v)]) or (None if not c.code.complete else False),
    CheckId.DS3: _logging,
    CheckId.DS5: lambda c: c.text_input_usage(),
    CheckId.DS7: lambda c: True if _text_set_sites(c) else (
        None if c.may_have_lost(TEXT_SETTERS + ("android.widget.",), ("setText", "append", "setHint")) else False),
    CheckId.DS9: lambda c: _any(c.uses(ANY, ("getWindow",)), c.uses(WINDOW_OWNERS),
                                c.uses(("android.view.WindowManager", "android.view.ViewManager"), ("addView",))),
    CheckId.DS10: lambda c: True if _auth_flows(c)[0] else (None if _auth_flows(c)[1] else False),
    CheckId.DS12: _persistence_usage,
    CheckId.TLS4: lambda c: _networking(c)[1],
    CheckId.PLAT4: lambda c: c.webview_usage(),
    CheckId.PLAT5: lambda c: c.webview_usage(),
    CheckId.PLAT6: lambda c: c.webview_usage(),
    CheckId.PLAT7: lambda c: c.text_input_usage(),
    CheckId.PLAT8: lambda c: c.webview_usage(),
}

CHECKS: dict[CheckId, CheckFn] = {
    CheckId.DS1: ds1, CheckId.DS2: ds2, CheckId.DS3: ds3, CheckId.DS4: ds4, CheckId.DS5: ds5,
    CheckId.DS6: ds6, CheckId.DS7: ds7, CheckId.DS8: ds8, CheckId.DS9: ds9, CheckId.DS10: ds10,
    CheckId.DS11: ds11, CheckId.DS12: ds12,
    CheckId.CRYPTO1: crypto1, CheckId.CRYPTO2: crypto2, CheckId.CRYPTO3: crypto3, CheckId.CRYPTO4: crypto4,
    CheckId.TLS1: tls1, CheckId.TLS2: tls2, CheckId.TLS3: tls3, CheckId.TLS4: tls4,
    CheckId.PLAT1: plat1, CheckId.PLAT2: plat2, CheckId.PLAT3: plat3, CheckId.PLAT4: plat4,
    CheckId.PLAT5: plat5, CheckId.PLAT6: plat6, CheckId.PLAT7: plat7, CheckId.PLAT8: plat8,
}
