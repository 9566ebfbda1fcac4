"""Evaluate checks over parsed models and assemble findings."""

from __future__ import annotations

import logging
from typing import Iterable

from ..axml import ManifestModel
from ..bytecode.model import CodeModel
from .catalog import APPLICABILITY, CHECKS, MAX_EVIDENCE, Outcome
from .config import CheckConfig
from .context import Context
from .model import (
    CANONICAL_ORDER,
    MASVS_LINKS,
    PLATFORM_SCOPE,
    Category,
    CheckId,
    Evidence,
    Finding,
    Scope,
    State,
    Verdict,
)

log = logging.getLogger(__name__)


def _finding(check: CheckId, out: Outcome, config: CheckConfig) -> Finding:
    evidence = tuple(sorted(set(out.evidence))) if out.state is State.VIOLATION else ()
    note = out.note
    if len(evidence) > MAX_EVIDENCE:
        note = f"{note}; {len(evidence) - MAX_EVIDENCE} further evidence item(s) omitted".lstrip("; ")
        evidence = evidence[:MAX_EVIDENCE]
    if out.state is State.VIOLATION and not evidence:
        evidence = (Evidence("<app>", note or "violation", ""),)
    qualifier = config.qualifier(check, [e.rule for e in evidence]) if out.state is State.VIOLATION else None
    return Finding(check, Verdict(out.state, qualifier), evidence, MASVS_LINKS[check], note)


def _unverifiable(check: CheckId, note: str) -> Finding:
    return Finding(check, Verdict(State.UNVERIFIABLE), (), MASVS_LINKS[check], note)


def _evaluate(check: CheckId, ctx: Context) -> Finding:
    try:
        out = CHECKS[check](ctx)
    except Exception as exc:  # one broken check must not sink the report
        log.warning("check %s failed: %s", check.value, exc, exc_info=True)
        return _unverifiable(check, f"check failed: {type(exc).__name__}: {exc}")
    return _finding(check, out, ctx.config)


def run_one(
    check: CheckId,
    manifest: ManifestModel,
    code: CodeModel | None,
    config: CheckConfig | None = None,
    scope: Scope = Scope.FULL,
) -> Finding:
    return run_all(manifest, code, scope, config, only=[check])[0]


def run_all(
    manifest: ManifestModel,
    code: CodeModel | None,
    scope: Scope = Scope.FULL,
    config: CheckConfig | None = None,
    categories: Iterable[Category] | None = None,
    only: Iterable[CheckId] | None = None,
) -> list[Finding]:
    """Evaluate checks in canonical order.

    Without ``only`` the result always holds 28 findings. Checks outside the
    scope or outside the selected categories are reported as Unverifiable.
    A PlatformOnly scan works on whatever code could be salvaged; facts that
    depend on undecoded code degrade to Unverifiable inside each check.
    """
    config = config or CheckConfig()
    selected = set(categories) if categories is not None else set(Category)
    wanted = list(only) if only is not None else list(CANONICAL_ORDER)
    if scope is Scope.PLATFORM_ONLY and code is None:
        code = CodeModel(complete=False, refs_complete=False)
    ctx = Context(manifest, code, config)
    out = []
    for check in wanted:
        if check.category not in selected:
            out.append(_unverifiable(check, "category not selected"))
        elif scope is Scope.PLATFORM_ONLY and check not in PLATFORM_SCOPE:
            out.append(_unverifiable(check, "outside the platform-only scope"))
        else:
            out.append(_evaluate(check, ctx))
    return out


def applicability(
    check: CheckId,
    manifest: ManifestModel,
    code: CodeModel | None,
    config: CheckConfig | None = None,
) -> bool:
    """False exactly when the API surface the check is about is provably absent."""
    fn = APPLICABILITY.get(check)
    if fn is None:
        return True
    return fn(Context(manifest, code, config or CheckConfig())) is not False
