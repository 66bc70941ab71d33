"""Deterministic CSV serialisation with a '#' metadata preamble."""

from __future__ import annotations

from pathlib import Path


def format_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render_csv(columns: list[str], rows: list[tuple], metadata: dict[str, object]) -> str:
    """Preamble lines (sorted by key), header, then the rows."""
    lines = [f"# {key} = {format_cell(metadata[key])}" for key in sorted(metadata)]
    lines.append(",".join(columns))
    for row in rows:
        if len(row) != len(columns):
            raise ValueError(f"row width {len(row)} != header width {len(columns)}")
        lines.append(",".join(format_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def write_text(path: Path, content: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(content.encode("utf-8"))
    return path


def read_csv(path: str | Path) -> tuple[dict[str, str], list[str], list[list[str]]]:
    """Parse a harness CSV back into (metadata, columns, string rows)."""
    metadata: dict[str, str] = {}
    columns: list[str] | None = None
    rows: list[list[str]] = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        if not line.strip():
            continue
        if line.startswith("#"):
            if columns is not None:
                raise ValueError(f"line {lineno}: metadata after header")
            body = line[1:].strip()
            key, sep, value = body.partition("=")
            if not sep:
                raise ValueError(f"line {lineno}: malformed preamble {line!r}")
            metadata[key.strip()] = value.strip()
            continue
        if columns is None:
            columns = line.split(",")
            continue
        rows.append(line.split(","))
    if columns is None:
        raise ValueError(f"{path}: no header line")
    return metadata, columns, rows
