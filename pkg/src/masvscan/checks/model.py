"""Check identifiers, verdicts and findings."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum


class Category(str, Enum):
    DS = "DS"
    CRYPTO = "CRYPTO"
    TLS = "TLS"
    PLAT = "PLAT"


_SIZES = {Category.DS: 12, Category.CRYPTO: 4, Category.TLS: 4, Category.PLAT: 8}


class CheckId(str, Enum):
    DS1 = "DS1"
    DS2 = "DS2"
    DS3 = "DS3"
    DS4 = "DS4"
    DS5 = "DS5"
    DS6 = "DS6"
    DS7 = "DS7"
    DS8 = "DS8"
    DS9 = "DS9"
    DS10 = "DS10"
    DS11 = "DS11"
    DS12 = "DS12"
    CRYPTO1 = "CRYPTO1"
    CRYPTO2 = "CRYPTO2"
    CRYPTO3 = "CRYPTO3"
    CRYPTO4 = "CRYPTO4"
    TLS1 = "TLS1"
    TLS2 = "TLS2"
    TLS3 = "TLS3"
    TLS4 = "TLS4"
    PLAT1 = "PLAT1"
    PLAT2 = "PLAT2"
    PLAT3 = "PLAT3"
    PLAT4 = "PLAT4"
    PLAT5 = "PLAT5"
    PLAT6 = "PLAT6"
    PLAT7 = "PLAT7"
    PLAT8 = "PLAT8"

    @property
    def category(self) -> Category:
        return Category(self.value.rstrip("0123456789"))

    @property
    def index(self) -> int:
        return int(self.value[len(self.category.value):])

    @classmethod
    def parse(cls, text: str) -> CheckId:
        try:
            return cls(text.strip().upper())
        except ValueError:
            raise ValueError(f"unknown check id {text!r}") from None


CANONICAL_ORDER: tuple[CheckId, ...] = tuple(CheckId)
# Rendered tables place PLAT8 before PLAT7.
DISPLAY_ORDER: tuple[CheckId, ...] = CANONICAL_ORDER[:-2] + (CheckId.PLAT8, CheckId.PLAT7)
PLATFORM_SCOPE: frozenset[CheckId] = frozenset(c for c in CheckId if c.category is Category.PLAT and c.index >= 2)

MASVS_LINKS: dict[CheckId, str] = {
    **{CheckId(f"DS{i}"): "MASVS-STORAGE-1" for i in (1, 2, 10, 11, 12)},
    **{CheckId(f"DS{i}"): "MASVS-STORAGE-2" for i in range(3, 10)},
    CheckId.CRYPTO1: "MASVS-CRYPTO-2",
    CheckId.CRYPTO2: "MASVS-CRYPTO-1",
    CheckId.CRYPTO3: "MASVS-CRYPTO-1",
    CheckId.CRYPTO4: "MASVS-CRYPTO-1",
    CheckId.TLS1: "MASVS-NETWORK-1",
    CheckId.TLS2: "MASVS-NETWORK-1",
    CheckId.TLS3: "MASVS-NETWORK-1",
    CheckId.TLS4: "MASVS-NETWORK-2",
    CheckId.PLAT1: "MASVS-PLATFORM-1",
    CheckId.PLAT2: "MASVS-PLATFORM-1",
    CheckId.PLAT3: "MASVS-PLATFORM-1",
    CheckId.PLAT4: "MASVS-PLATFORM-2",
    CheckId.PLAT5: "MASVS-PLATFORM-2",
    CheckId.PLAT6: "MASVS-PLATFORM-2",
    CheckId.PLAT7: "MASVS-PLATFORM-3",
    CheckId.PLAT8: "MASVS-PLATFORM-2",
}


class State(str, Enum):
    VIOLATION = "Violation"
    PASS = "Pass"
    NOT_APPLICABLE = "NotApplicable"
    UNVERIFIABLE = "Unverifiable"

    @property
    def glyph(self) -> str:
        return _GLYPHS[self]


_GLYPHS = {State.VIOLATION: "V", State.PASS: "N", State.NOT_APPLICABLE: "N/A", State.UNVERIFIABLE: "-"}
_FROM_GLYPH = {g: s for s, g in _GLYPHS.items()}


@dataclass(frozen=True)
class Verdict:
    state: State
    qualifier: str | None = None

    def __post_init__(self) -> None:
        if self.qualifier is not None:
            if self.state is not State.VIOLATION:
                raise ValueError("only a Violation verdict may carry a qualifier")
            if not self.qualifier or any(c in self.qualifier for c in "()\n\r,\""):
                raise ValueError(f"invalid qualifier {self.qualifier!r}")

    @property
    def glyph(self) -> str:
        base = self.state.glyph
        return f"{base}({self.qualifier})" if self.qualifier else base

    def __str__(self) -> str:
        return self.glyph

    @classmethod
    def from_glyph(cls, text: str) -> Verdict:
        """Inverse of :attr:`glyph`; raises ValueError on anything else."""
        t = text.strip()
        if t.startswith("V(") and t.endswith(")") and len(t) > 3:
            return cls(State.VIOLATION, t[2:-1])
        try:
            return cls(_FROM_GLYPH[t])
        except KeyError:
            raise ValueError(f"unknown verdict glyph {text!r}") from None

    def to_json(self) -> dict:
        out: dict = {"state": self.state.value}
        if self.qualifier:
            out["qualifier"] = self.qualifier
        return out

    @classmethod
    def from_json(cls, obj: object) -> Verdict:
        if not isinstance(obj, dict) or set(obj) - {"state", "qualifier"}:
            raise ValueError(f"malformed verdict {obj!r}")
        try:
            state = State(obj.get("state"))
        except ValueError:
            raise ValueError(f"unknown verdict state {obj.get('state')!r}") from None
        q = obj.get("qualifier")
        if q is not None and not isinstance(q, str):
            raise ValueError(f"malformed qualifier {q!r}")
        return cls(state, q)


V = Verdict(State.VIOLATION)
N = Verdict(State.PASS)
NA = Verdict(State.NOT_APPLICABLE)
UNVERIFIABLE = Verdict(State.UNVERIFIABLE)


@dataclass(frozen=True, order=True)
class Evidence:
    location: str
    reason: str
    rule: str = ""

    def to_json(self) -> dict:
        out = {"location": self.location, "reason": self.reason}
        if self.rule:
            out["rule"] = self.rule
        return out


@dataclass(frozen=True)
class Finding:
    """One check result.

    ``evidence`` is non-empty exactly for violations. ``note`` explains every
    other outcome: the failed applicability predicate for NotApplicable, the
    missing information for Unverifiable, the satisfied guard for Pass.
    """

    check: CheckId
    verdict: Verdict
    evidence: tuple[Evidence, ...] = ()
    masvs_link: str = ""
    note: str = ""

    def __post_init__(self) -> None:
        if (self.verdict.state is State.VIOLATION) != bool(self.evidence):
            raise ValueError(f"{self.check.value}: evidence must be present exactly for violations")

    def to_json(self) -> dict:
        out = {
            "check": self.check.value,
            "verdict": self.verdict.to_json(),
            "masvs": self.masvs_link,
            "evidence": [e.to_json() for e in self.evidence],
        }
        if self.note:
            out["note"] = self.note
        return out


DEFAULT_KEYWORDS = (
    "password", "passwd", "pin", "otp", "cvv", "card", "account", "token", "secret", "credential", "nid",
)


@dataclass(frozen=True)
class SensitiveLexicon:
    keywords: frozenset[str] = field(default_factory=lambda: frozenset(DEFAULT_KEYWORDS))

    def __post_init__(self) -> None:
        kws = frozenset(k.strip().lower() for k in self.keywords if k.strip())
        if not kws:
            raise ValueError("sensitive lexicon must not be empty")
        object.__setattr__(self, "keywords", kws)

    def match(self, text: str) -> str | None:
        """First keyword (alphabetically) contained in ``text``, case-insensitively."""
        low = text.lower()
        for k in sorted(self.keywords):
            if k in low:
                return k
        return None


class Scope(str, Enum):
    FULL = "Full"
    PLATFORM_ONLY = "PlatformOnly"
