"""I/O utilities for file operations."""
import csv
import json
import os
from typing import Any, Dict, Iterable, Sequence


def _ensure_parent(file_path: str) -> None:
    parent = os.path.dirname(file_path)
    if parent:
        os.makedirs(parent, exist_ok=True)


def read_bytes(file_path: str) -> bytes:
    """Read a file as raw bytes."""
    with open(file_path, 'rb') as f:
        return f.read()


def read_text_file(file_path: str) -> str:
    """Read a text file and return its contents."""
    with open(file_path, 'r', encoding='utf-8') as f:
        return f.read()


def write_text_file(content: str, file_path: str) -> None:
    """Write content to a text file."""
    _ensure_parent(file_path)
    with open(file_path, 'w', encoding='utf-8') as f:
        f.write(content)


def read_json(file_path: str) -> Dict[str, Any]:
    """Read a JSON document."""
    with open(file_path, 'r', encoding='utf-8') as f:
        return json.load(f)


def write_csv_rows(rows: Iterable[Sequence[Any]], file_path: str) -> None:
    """Write rows as RFC-4180 CSV (CRLF line endings, minimal quoting)."""
    _ensure_parent(file_path)
    with open(file_path, 'w', encoding='utf-8', newline='') as f:
        writer = csv.writer(f)
        for row in rows:
            writer.writerow(row)
