"""Render gaussdkw CSV tables into figures.

Four figure kinds, each tied to one versioned CSV schema:

* envelope      - |F_m - F| against the deviation envelope, per t
* violation_rate - envelope violation rate against delta * m
* scaling       - observed statistic against m in log-log coordinates,
                  optionally with the fitted line from the run summary
* rearrangement - sorted projections against the Gaussian quantile grid

The schema comment on the CSV's first line must match the figure kind;
mismatches and empty tables abort without writing an output file.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

_SCHEMA_PREFIX = "# gaussdkw-csv"

FIGURE_KINDS = {
    "envelope": ("envelope", ["t", "abs_deviation", "envelope"]),
    "violation_rate": ("violation_rate",
                       ["delta", "m", "delta_m", "c_env", "rate", "trials"]),
    "scaling": ("scaling", ["m", "delta_nominal", "observed"]),
    "rearrangement": ("rearrangement", ["i", "sorted_projection", "lambda"]),
}


class RenderError(ValueError):
    """Bad figure spec: wrong schema, malformed or empty table."""


@dataclass(frozen=True)
class FigureSpec:
    input_csv: str
    figure_kind: str
    output_path: str
    title: str = ""
    summary_json: str | None = None  # source of the fitted line, scaling only


def load_columns(path: str, kind: str) -> dict[str, list[float]]:
    """Read the CSV for a figure kind, enforcing its schema and header."""
    if kind not in FIGURE_KINDS:
        raise RenderError(f"unknown figure kind '{kind}'")
    schema, columns = FIGURE_KINDS[kind]
    try:
        with open(path) as fh:
            lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    except FileNotFoundError:
        raise RenderError(f"input CSV not found: {path}")
    if not lines or not lines[0].startswith(_SCHEMA_PREFIX):
        raise RenderError(f"{path}: missing schema line")
    found = lines[0].split()[2] if len(lines[0].split()) >= 3 else "?"
    if found != schema:
        raise RenderError(
            f"{path}: schema '{found}' does not match figure kind '{kind}' "
            f"(expected '{schema}')")
    if len(lines) < 2 or lines[1].split(",") != columns:
        raise RenderError(f"{path}: header does not match schema '{schema}'")
    rows = [ln.split(",") for ln in lines[2:]]
    if not rows:
        raise RenderError(f"{path}: table is empty")
    data: dict[str, list[float]] = {c: [] for c in columns}
    for row in rows:
        if len(row) != len(columns):
            raise RenderError(f"{path}: ragged row {row!r}")
        for c, cell in zip(columns, row):
            data[c].append(_to_float(cell))
    return data


def _to_float(cell: str) -> float:
    if cell == "true":
        return 1.0
    if cell == "false":
        return 0.0
    return float(cell)


def render(spec: FigureSpec):
    """Draw the figure and write it to spec.output_path; returns the Figure."""
    data = load_columns(spec.input_csv, spec.figure_kind)
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    if spec.figure_kind == "envelope":
        ax.plot(data["t"], data["abs_deviation"], lw=1.0, label="|F_m - F|")
        ax.plot(data["t"], data["envelope"], lw=1.2, ls="--",
                label="delta + sigma(t) sqrt(delta)")
        ax.set_xlabel("t")
        ax.set_ylabel("deviation")
    elif spec.figure_kind == "violation_rate":
        ax.plot(data["delta_m"], data["rate"], marker="o", lw=1.0)
        ax.set_xlabel("delta * m")
        ax.set_ylabel("violation rate")
    elif spec.figure_kind == "scaling":
        ax.loglog(data["m"], data["observed"], marker="o", lw=0.0,
                  label="observed")
        if spec.summary_json:
            slope, intercept = _load_fit(spec.summary_json)
            fitted = [math.exp(intercept + slope * math.log(m)) for m in data["m"]]
            ax.loglog(data["m"], fitted, lw=1.0, ls="--",
                      label=f"fit (slope {slope:.3f})")
        ax.set_xlabel("m")
        ax.set_ylabel("observed statistic")
    else:  # rearrangement
        ax.plot(data["i"], data["sorted_projection"], lw=1.0,
                label="sorted projections")
        ax.plot(data["i"], data["lambda"], lw=1.2, ls="--",
                label="quantile grid")
        ax.set_xlabel("i")
        ax.set_ylabel("value")
    if spec.title:
        ax.set_title(spec.title)
    if ax.get_legend_handles_labels()[1]:
        ax.legend(loc="best")
    fig.tight_layout()
    fig.savefig(spec.output_path, dpi=120, metadata=_stable_metadata(spec.output_path))
    return fig


def _load_fit(path: str) -> tuple[float, float]:
    try:
        with open(path) as fh:
            payload = json.load(fh)
    except (FileNotFoundError, json.JSONDecodeError) as exc:
        raise RenderError(f"summary JSON unreadable: {exc}")
    if "slope" not in payload or "intercept" not in payload:
        raise RenderError(f"{path}: summary JSON lacks slope/intercept")
    return float(payload["slope"]), float(payload["intercept"])


def _stable_metadata(path: str) -> dict:
    # Strip writer timestamps so identical inputs give identical bytes.
    if path.endswith(".png"):
        return {"Software": "gaussdkw-plots"}
    if path.endswith(".svg"):
        return {"Date": None}
    return {"CreationDate": None}


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="gaussdkw-render")
    parser.add_argument("--input", required=True, help="CSV written by gaussdkw")
    parser.add_argument("--kind", required=True, choices=sorted(FIGURE_KINDS))
    parser.add_argument("--out", required=True, help="figure path (.png/.svg/.pdf)")
    parser.add_argument("--title", default="")
    parser.add_argument("--summary", default=None,
                        help="summary.json with the fitted slope (scaling only)")
    args = parser.parse_args(argv)
    spec = FigureSpec(input_csv=args.input, figure_kind=args.kind,
                      output_path=args.out, title=args.title,
                      summary_json=args.summary)
    try:
        fig = render(spec)
        plt.close(fig)
    except RenderError as exc:
        print(f"render error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
