"""Prefix-searchable index of call sites by ``owner.method`` in dotted form."""

from __future__ import annotations

import bisect
from collections import defaultdict

from .model import CallSite, CodeModel


class ApiIndex:
    def __init__(self, sites: list[CallSite]) -> None:
        pairs = sorted(((s.callee.dotted, s.sort_key()), s) for s in sites)
        self._keys = [k for (k, _), _ in pairs]
        self._sites = [s for _, s in pairs]
        self._by_owner: dict[str, list[CallSite]] = defaultdict(list)
        for s in sorted(sites, key=CallSite.sort_key):
            self._by_owner[s.callee.owner].append(s)

    def __len__(self) -> int:
        return len(self._sites)

    def query(self, prefix: str) -> list[CallSite]:
        """All call sites whose ``owner.method`` starts with ``prefix``, in location order."""
        lo = bisect.bisect_left(self._keys, prefix)
        hi = lo
        while hi < len(self._keys) and self._keys[hi].startswith(prefix):
            hi += 1
        return sorted(self._sites[lo:hi], key=CallSite.sort_key)

    def calls(self, owner: str, *names: str) -> list[CallSite]:
        """Call sites into ``owner`` (a descriptor), optionally limited to method names."""
        hits = self._by_owner.get(owner, [])
        return [s for s in hits if not names or s.callee.name in names]


def api_usage_index(model: CodeModel) -> ApiIndex:
    return ApiIndex(model.call_sites)
