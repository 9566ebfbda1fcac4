"""Property checks over manifest and code models."""

from .config import CheckConfig, load_config, parse_config
from .engine import applicability, run_all, run_one
from .model import (
    CANONICAL_ORDER,
    DISPLAY_ORDER,
    MASVS_LINKS,
    Category,
    CheckId,
    Evidence,
    Finding,
    Scope,
    SensitiveLexicon,
    State,
    Verdict,
)

__all__ = [
    "CANONICAL_ORDER", "DISPLAY_ORDER", "MASVS_LINKS", "Category", "CheckConfig", "CheckId", "Evidence",
    "Finding", "Scope", "SensitiveLexicon", "State", "Verdict", "applicability", "load_config",
    "parse_config", "run_all", "run_one",
]
