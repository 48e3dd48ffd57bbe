"""On-disk report cache: one JSON file per (k, command)."""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Any, Dict, Optional

CACHE_SCHEMA = 1
ENV_VAR = "QUADFUNC_CACHE_DIR"


def default_cache_dir() -> Path:
    env = os.environ.get(ENV_VAR)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "quadfunc"


class ReportCache:
    """A stored entry is reused only when its schema and full config match.

    Anything else (missing file, old schema, different knobs, unreadable JSON)
    counts as a miss and is overwritten on the next store.
    """

    def __init__(self, root: Optional[os.PathLike] = None):
        self.root = Path(root) if root is not None else default_cache_dir()

    def path(self, command: str, k: Optional[int]) -> Path:
        tag = "all" if k is None else f"k{k}"
        return self.root / f"{tag}-{command}.json"

    def load(self, command: str, k: Optional[int], config: Dict[str, Any]) -> Optional[Dict[str, Any]]:
        p = self.path(command, k)
        try:
            entry = json.loads(p.read_text(encoding="utf-8"))
        except (OSError, ValueError):
            return None
        if not isinstance(entry, dict):
            return None
        if entry.get("schema_version") != CACHE_SCHEMA or entry.get("config") != config:
            return None
        return entry

    def store(self, command: str, k: Optional[int], config: Dict[str, Any], **fields: Any) -> None:
        p = self.path(command, k)
        p.parent.mkdir(parents=True, exist_ok=True)
        entry = {"schema_version": CACHE_SCHEMA, "config": config, **fields}
        tmp = p.with_suffix(".tmp")
        tmp.write_text(json.dumps(entry, sort_keys=True, indent=2), encoding="utf-8")
        os.replace(tmp, p)
