"""Reader for the simulator's CSV dialect: '#' metadata preamble, header, rows."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path


class CsvFormatError(ValueError):
    pass


@dataclass
class CsvTable:
    path: Path
    metadata: dict[str, str]
    columns: list[str]
    rows: list[list[str]]

    def column(self, name: str) -> list[float]:
        if name not in self.columns:
            raise KeyError(f"{self.path}: no column '{name}' (have {', '.join(self.columns)})")
        idx = self.columns.index(name)
        out = []
        for row in self.rows:
            raw = row[idx]
            if raw in ("true", "false"):
                out.append(1.0 if raw == "true" else 0.0)
            else:
                out.append(float(raw))
        return out

    def experiment(self) -> str:
        return self.metadata.get("experiment", self.path.stem)


def read_table(path: str | Path) -> CsvTable:
    path = Path(path)
    metadata: dict[str, str] = {}
    columns: list[str] | None = None
    rows: list[list[str]] = []
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        if not line.strip():
            continue
        if line.startswith("#"):
            if columns is not None:
                raise CsvFormatError(f"{path}:{lineno}: metadata after the header")
            body = line[1:].strip()
            key, sep, value = body.partition("=")
            if not sep or not key.strip():
                raise CsvFormatError(f"{path}:{lineno}: malformed preamble line {line!r}")
            metadata[key.strip()] = value.strip()
            continue
        cells = line.split(",")
        if columns is None:
            columns = cells
            continue
        if len(cells) != len(columns):
            raise CsvFormatError(
                f"{path}:{lineno}: row has {len(cells)} cells, header has {len(columns)}"
            )
        rows.append(cells)
    if columns is None:
        raise CsvFormatError(f"{path}: no header line")
    return CsvTable(path=path, metadata=metadata, columns=columns, rows=rows)
