"""Bounded in-process store of prime contexts and their character matrices."""

from __future__ import annotations

import threading
from typing import Dict, TypedDict

import numpy as np

from .ffcore import PrimeContext, make_prime_context


class _ContextEntry(TypedDict):
    context: PrimeContext
    matrix: np.ndarray | None


class PrimeContextCache:
    """Bounded dictionary of PrimeContext objects keyed by p, oldest entry evicted first."""

    def __init__(self, max_entries: int = 64) -> None:
        self._max_entries = max(max_entries, 0)
        self._enabled = self._max_entries > 0
        self._store: Dict[int, _ContextEntry] = {}
        self._lock = threading.Lock()

    def context(self, p: int) -> PrimeContext:
        if not self._enabled:
            return make_prime_context(p)
        with self._lock:
            entry = self._store.get(p)
        if entry:
            return entry["context"]
        ctx = make_prime_context(p)
        with self._lock:
            if p not in self._store and len(self._store) >= self._max_entries:
                self._evict_one()
            self._store.setdefault(p, _ContextEntry(context=ctx, matrix=None))
            return self._store[p]["context"]

    def character_matrix(self, ctx: PrimeContext) -> np.ndarray:
        """The p x p table M[a, b] = e_p(-a*b), built once per cached prime."""
        if self._enabled:
            with self._lock:
                entry = self._store.get(ctx.p)
            if entry and entry["matrix"] is not None:
                return entry["matrix"]
        matrix = _build_character_matrix(ctx)
        if self._enabled:
            with self._lock:
                entry = self._store.get(ctx.p)
                if entry is None:
                    if len(self._store) >= self._max_entries:
                        self._evict_one()
                    entry = _ContextEntry(context=ctx, matrix=None)
                    self._store[ctx.p] = entry
                entry["matrix"] = matrix
        return matrix

    def clear(self) -> None:
        with self._lock:
            self._store.clear()

    def _evict_one(self) -> None:
        if not self._store:
            return
        victim = next(iter(self._store))
        self._store.pop(victim, None)

    def stats(self) -> Dict[str, int]:
        with self._lock:
            matrices = sum(1 for entry in self._store.values() if entry["matrix"] is not None)
        return {"items": len(self), "matrices": matrices, "enabled": int(self._enabled)}

    def __len__(self) -> int:
        if not self._enabled:
            return 0
        return len(self._store)

    def __contains__(self, p: object) -> bool:
        return self._enabled and p in self._store

    @property
    def enabled(self) -> bool:
        return self._enabled


def _build_character_matrix(ctx: PrimeContext) -> np.ndarray:
    n = ctx.elements()
    matrix = ctx.char_table[(-np.outer(n, n)) % ctx.p]
    matrix.setflags(write=False)
    return matrix


DEFAULT_CONTEXT_CACHE = PrimeContextCache()


def context_for(p: int) -> PrimeContext:
    return DEFAULT_CONTEXT_CACHE.context(p)


def character_matrix(ctx: PrimeContext) -> np.ndarray:
    return DEFAULT_CONTEXT_CACHE.character_matrix(ctx)


__all__ = ["DEFAULT_CONTEXT_CACHE", "PrimeContextCache", "character_matrix", "context_for"]
