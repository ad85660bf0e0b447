"""Schema-tagged CSV tables and JSON summaries.

Every CSV written by the package starts with a versioned schema comment
(`# gaussdkw-csv <name> v1`), then a header row, then data rows.  Floats are
formatted with repr (shortest round-trip form), so outputs are byte-stable
across runs and thread counts.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from gaussdkw.errors import ConfigError

_PREFIX = "# gaussdkw-csv"


def schema_line(name: str) -> str:
    return f"{_PREFIX} {name} v1"


def format_cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


@dataclass(frozen=True)
class Table:
    schema: str
    header: list[str]
    rows: list[list]


def write_table(path, table: Table) -> None:
    lines = [schema_line(table.schema), ",".join(table.header)]
    for row in table.rows:
        if len(row) != len(table.header):
            raise ConfigError(f"row width {len(row)} != header width {len(table.header)}")
        lines.append(",".join(format_cell(v) for v in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_table(path) -> Table:
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh]
    lines = [ln for ln in lines if ln.strip()]
    if not lines or not lines[0].startswith(_PREFIX):
        raise ConfigError(f"{path}: missing schema line")
    parts = lines[0].split()
    if len(parts) != 4 or parts[3] != "v1":
        raise ConfigError(f"{path}: malformed schema line {lines[0]!r}")
    if len(lines) < 2:
        raise ConfigError(f"{path}: missing header row")
    header = lines[1].split(",")
    rows = [ln.split(",") for ln in lines[2:]]
    return Table(schema=parts[2], header=header, rows=rows)


def write_json(path, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")
