"""Durable per-station command log: append-only JSON lines, fsync on append.

The file is the source of truth; an in-memory mirror serves reads. Reloading
the same file after a restart yields the same entries, and since nothing ever
rewrites the file, its bytes survive restarts untouched.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

from hoverbot.service.wire import LogEntry, entry_from_json, entry_to_json

__all__ = ["CommandLog"]


class CommandLog:
    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._entries: list[LogEntry] = []
        if self.path.exists():
            with self.path.open("r", encoding="utf-8") as handle:
                for line in handle:
                    line = line.strip()
                    if line:
                        self._entries.append(entry_from_json(json.loads(line)))
        self._handle = self.path.open("a", encoding="utf-8")

    @property
    def last_sequence(self) -> int:
        return self._entries[-1].sequence if self._entries else 0

    def append(self, entry: LogEntry) -> None:
        if entry.sequence != self.last_sequence + 1:
            raise ValueError(
                f"log sequence must be gap-free: expected {self.last_sequence + 1}, "
                f"got {entry.sequence}"
            )
        self._handle.write(json.dumps(entry_to_json(entry)) + "\n")
        self._handle.flush()
        os.fsync(self._handle.fileno())
        self._entries.append(entry)

    def entries_since(self, since_sequence: int = 0) -> list[LogEntry]:
        """Entries with sequence > since_sequence, in sequence order."""
        return [e for e in self._entries if e.sequence > since_sequence]

    def close(self) -> None:
        if not self._handle.closed:
            self._handle.close()
