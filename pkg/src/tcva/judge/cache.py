from __future__ import annotations

import json
import logging
import threading
from collections import defaultdict
from pathlib import Path

from .types import CachedEvaluation

log = logging.getLogger(__name__)

CacheKey = tuple[str, str, str, str]  # sample_id, metric_name, judge_model_id, prompt_version


class VerdictCache:
    """JSON Lines store of :class:`CachedEvaluation`, one per line.

    Keyed by ``(sample_id, metric_name, judge_model_id, prompt_version)``;
    temperature and weight scheme are deliberately not part of the key.
    Writes are serialized through a lock. With ``path=None`` the cache lives
    in memory only.
    """

    def __init__(self, path: str | Path | None = None):
        self.path = Path(path) if path is not None else None
        self._entries: dict[CacheKey, CachedEvaluation] = {}
        self._lock = threading.Lock()
        self._key_locks: defaultdict[CacheKey, threading.Lock] = defaultdict(threading.Lock)
        if self.path is not None and self.path.exists():
            self._load()

    def _load(self):
        with open(self.path, encoding="utf-8") as f:
            for lineno, line in enumerate(f, 1):
                if not line.strip():
                    continue
                try:
                    entry = CachedEvaluation.from_dict(json.loads(line))
                except (ValueError, KeyError, TypeError) as exc:
                    log.warning("%s:%d: skipping unreadable cache line (%s)", self.path, lineno, exc)
                    continue
                self._entries[entry.key] = entry

    def __len__(self):
        return len(self._entries)

    def __contains__(self, key: CacheKey) -> bool:
        return key in self._entries

    def get(self, key: CacheKey) -> CachedEvaluation | None:
        return self._entries.get(key)

    def entries(self) -> list[CachedEvaluation]:
        return list(self._entries.values())

    def key_lock(self, key: CacheKey) -> threading.Lock:
        """Lock held while a key is being computed, so it is judged at most once."""
        with self._lock:
            return self._key_locks[key]

    def put(self, entry: CachedEvaluation) -> None:
        with self._lock:
            if entry.key in self._entries:
                return
            self._entries[entry.key] = entry
            if self.path is not None:
                self.path.parent.mkdir(parents=True, exist_ok=True)
                with open(self.path, "a", encoding="utf-8") as f:
                    f.write(json.dumps(entry.to_dict(), ensure_ascii=False) + "\n")
