# dilatekit/core/setfile.py
"""Set files: UTF-8 text with one decimal integer per line, or a JSON array."""
from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Literal, NamedTuple

from ..errors import SetFileError
from .intset import IntSet

logger = logging.getLogger(__name__)

SetFormat = Literal["text", "json"]


class LoadedSet(NamedTuple):
    values: IntSet
    duplicates: int


def _detect_format(path: Path, text: str) -> SetFormat:
    if path.suffix.lower() == ".json" or text.lstrip().startswith("["):
        return "json"
    return "text"


def _parse_text(path: Path, text: str) -> list[int]:
    out = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        tok = line.strip()
        if not tok:
            continue
        try:
            out.append(int(tok, 10))
        except ValueError:
            raise SetFileError(str(path), f"not a decimal integer: {tok[:40]!r}", lineno)
    return out


def _parse_json(path: Path, text: str) -> list[int]:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise SetFileError(str(path), f"invalid JSON: {e.msg}", e.lineno)
    if not isinstance(data, list):
        raise SetFileError(str(path), "expected a JSON array of integers")
    for i, v in enumerate(data):
        # bool is an int subclass; reject it explicitly
        if not isinstance(v, int) or isinstance(v, bool):
            raise SetFileError(str(path), f"array item {i} is not an integer: {v!r}")
    return data


def read_set(path: str | Path) -> LoadedSet:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise SetFileError(str(path), "file not found")
    except UnicodeDecodeError:
        raise SetFileError(str(path), "not valid UTF-8")
    values = _parse_json(path, text) if _detect_format(path, text) == "json" else _parse_text(path, text)
    A = IntSet(values)
    dupes = len(values) - len(A)
    if dupes:
        logger.warning("%s: dropped %d duplicate element(s)", path, dupes)
    return LoadedSet(A, dupes)


def write_set(path: str | Path, A: IntSet, fmt: SetFormat = "text") -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if fmt == "json":
        path.write_text(json.dumps(A.to_list()), encoding="utf-8")
    else:
        path.write_text("".join(f"{a}\n" for a in A), encoding="utf-8")
