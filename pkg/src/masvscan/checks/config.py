"""Check configuration: thresholds, sensitive lexicon, severity labels and permission overrides.

The file is INI-style (``configparser``)::

    [thresholds]
    pbe_min_iterations = 10000
    rsa_min_bits = 2048
    aes_min_bits = 128

    [lexicon]
    keywords = password, passwd, pin, otp, cvv, card, account, token, secret, credential, nid

    [severity]
    # CHECK or CHECK:rule = label; rendered as V(label)
    DS11 = ML
    DS12:no-encryption = ML

    [permissions]
    # replaces the built-in dangerous permission list
    dangerous = android.permission.CAMERA, android.permission.RECORD_AUDIO

Every key is optional. ``MASVSCAN_CONFIG`` names a file to use when no path
is given explicitly.
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field

from ..errors import ConfigError
from .model import CheckId, SensitiveLexicon, Verdict, State

ENV_VAR = "MASVSCAN_CONFIG"

_THRESHOLDS = ("pbe_min_iterations", "rsa_min_bits", "aes_min_bits")


@dataclass(frozen=True)
class CheckConfig:
    pbe_min_iterations: int = 10000
    rsa_min_bits: int = 2048
    aes_min_bits: int = 128
    lexicon: SensitiveLexicon = field(default_factory=SensitiveLexicon)
    # (check, rule or "") -> qualifier label
    severity: tuple[tuple[CheckId, str, str], ...] = ()
    dangerous_permissions: frozenset[str] | None = None

    def qualifier(self, check: CheckId, rules: list[str]) -> str | None:
        """Label for a violation of ``check`` raised by any of ``rules``.

        A rule-specific entry wins over a check-wide one; among several rules
        the alphabetically first configured one is used.
        """
        table = {(c, r): q for c, r, q in self.severity}
        for r in sorted(set(rules)):
            if (check, r) in table:
                return table[(check, r)]
        return table.get((check, ""))


def _split_list(text: str) -> list[str]:
    return [t.strip() for t in text.replace("\n", ",").split(",") if t.strip()]


def parse_config(text: str, source: str = "<config>") -> CheckConfig:
    cp = configparser.ConfigParser(interpolation=None, delimiters=("=",), inline_comment_prefixes=("#", ";"))
    cp.optionxform = str  # keep check ids as written
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    unknown = set(cp.sections()) - {"thresholds", "lexicon", "severity", "permissions"}
    if unknown:
        raise ConfigError(f"{source}: unknown section(s) {sorted(unknown)}")

    kwargs: dict = {}
    if cp.has_section("thresholds"):
        for key, raw in cp.items("thresholds"):
            if key not in _THRESHOLDS:
                raise ConfigError(f"{source}: unknown threshold {key!r}")
            try:
                value = int(raw)
            except ValueError:
                raise ConfigError(f"{source}: threshold {key} must be an integer, got {raw!r}") from None
            if value <= 0:
                raise ConfigError(f"{source}: threshold {key} must be positive")
            kwargs[key] = value

    if cp.has_section("lexicon"):
        extra = set(cp.options("lexicon")) - {"keywords"}
        if extra:
            raise ConfigError(f"{source}: unknown lexicon key(s) {sorted(extra)}")
        words = _split_list(cp.get("lexicon", "keywords", fallback=""))
        if not words:
            raise ConfigError(f"{source}: lexicon keywords must not be empty")
        kwargs["lexicon"] = SensitiveLexicon(frozenset(words))

    if cp.has_section("severity"):
        rows = []
        for key, label in cp.items("severity"):
            check_text, _, rule = key.partition(":")
            try:
                check = CheckId.parse(check_text)
                Verdict(State.VIOLATION, label.strip())
            except ValueError as exc:
                raise ConfigError(f"{source}: severity {key!r}: {exc}") from None
            rows.append((check, rule.strip(), label.strip()))
        kwargs["severity"] = tuple(sorted(rows))

    if cp.has_section("permissions"):
        extra = set(cp.options("permissions")) - {"dangerous"}
        if extra:
            raise ConfigError(f"{source}: unknown permissions key(s) {sorted(extra)}")
        if cp.has_option("permissions", "dangerous"):
            kwargs["dangerous_permissions"] = frozenset(_split_list(cp.get("permissions", "dangerous")))

    return CheckConfig(**kwargs)


def load_config(path: str | os.PathLike | None = None) -> CheckConfig:
    """Read ``path``, else the file named by ``MASVSCAN_CONFIG``, else the defaults."""
    if path is None:
        path = os.environ.get(ENV_VAR) or None
    if path is None:
        return CheckConfig()
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except (OSError, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, str(path))
