"""Append-only JSON-lines ledgers with a schema-versioned header line."""

from __future__ import annotations

import json
import threading
from pathlib import Path
from typing import Any, Callable, Generic, Iterator, TypeVar

T = TypeVar("T")


class LedgerError(ValueError):
    pass


def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False, allow_nan=False)


class JsonlLedger(Generic[T]):
    """One header line ``{"schema": ..., "version": ...}`` then one record per line.

    Appends are serialized through a lock; readers re-open the file.
    """

    def __init__(self, path, schema: str, version: int,
                 encode: Callable[[T], dict], decode: Callable[[dict], T]):
        self.path = Path(path)
        self.schema = schema
        self.version = version
        self._encode = encode
        self._decode = decode
        self._lock = threading.Lock()

    @property
    def header(self) -> dict:
        return {"schema": self.schema, "version": self.version}

    def _check_header(self, line: str) -> None:
        try:
            head = json.loads(line)
        except json.JSONDecodeError as exc:
            raise LedgerError(f"{self.path}: unreadable header") from exc
        if head != self.header:
            raise LedgerError(f"{self.path}: expected header {self.header}, found {head}")

    def append(self, record: T) -> None:
        line = dumps(self._encode(record))
        with self._lock:
            fresh = not self.path.exists() or self.path.stat().st_size == 0
            if not fresh:
                with self.path.open("r", encoding="utf-8") as fh:
                    self._check_header(fh.readline())
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with self.path.open("a", encoding="utf-8", newline="\n") as fh:
                if fresh:
                    fh.write(dumps(self.header) + "\n")
                fh.write(line + "\n")

    def __iter__(self) -> Iterator[T]:
        if not self.path.exists():
            return
        with self.path.open("r", encoding="utf-8") as fh:
            first = fh.readline()
            if not first:
                return
            self._check_header(first)
            for lineno, line in enumerate(fh, start=2):
                if not line.strip():
                    continue
                try:
                    yield self._decode(json.loads(line))
                except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                    raise LedgerError(f"{self.path}:{lineno}: bad record: {exc}") from exc

    def records(self) -> list[T]:
        return list(self)
