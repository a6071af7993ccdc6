"""Render one figure from dival CSV/JSON artifacts.

Kinds:
  delta_scatter   |delta| against the modulus d, from discrepancy CSV
                  (d,a,delta_num,delta_den,abs_delta_float); an optional
                  JSON input supplies parameter labels.
  variance_ratio  empirical/conjectured variance ratio against c, one
                  point per variance-report JSON.
  gamma_profile   gamma_k(c) profile with Monte Carlo error bars, from
                  gamma CSV (k,c,value,std_error,samples,seed).

Inputs are validated against those schemas; a mismatch exits nonzero
naming the offending column.  --deterministic suppresses embedded
timestamps so identical inputs give identical image bytes.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

KINDS = ("delta_scatter", "variance_ratio", "gamma_profile")

DELTA_COLUMNS = ["d", "a", "delta_num", "delta_den", "abs_delta_float"]
GAMMA_COLUMNS = ["k", "c", "value", "std_error", "samples", "seed"]
VARIANCE_KEYS = ["c", "ratio", "k", "X", "d_or_D"]


class SchemaError(ValueError):
    pass


def read_csv_rows(path: Path, columns: list[str]) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration as exc:
            raise SchemaError(f"{path}: empty file, expected header {','.join(columns)}") from exc
        for want in columns:
            if want not in header:
                raise SchemaError(f"{path}: missing column '{want}'")
        for extra in header:
            if extra not in columns:
                raise SchemaError(f"{path}: unexpected column '{extra}'")
        idx = {name: header.index(name) for name in columns}
        return [{name: row[idx[name]] for name in columns} for row in reader]


def read_variance_report(path: Path) -> dict:
    with open(path) as fh:
        blob = json.load(fh)
    for key in VARIANCE_KEYS:
        if key not in blob:
            raise SchemaError(f"{path}: missing column '{key}'")
    return blob


def _annotate_empty(ax) -> None:
    ax.annotate("no data rows", xy=(0.5, 0.5), xycoords="axes fraction",
                ha="center", va="center", color="firebrick")


def _param_label(blob: dict | None) -> str:
    if not blob:
        return ""
    params = blob.get("params", {})
    bits = []
    for key in ("X", "k", "varpi"):
        if key in params:
            bits.append(f"{key}={params[key]}")
    bits.append(f"scaled={str(bool(blob.get('scaled', False))).lower()}")
    return ", ".join(bits)


def render_delta_scatter(ax, csv_paths: list[Path], json_paths: list[Path]) -> None:
    rows = []
    for path in csv_paths:
        rows.extend(read_csv_rows(path, DELTA_COLUMNS))
    label = _param_label(json.loads(json_paths[0].read_text()) if json_paths else None)
    if rows:
        ds = [int(r["d"]) for r in rows]
        vals = [float(r["abs_delta_float"]) for r in rows]
        ax.scatter(ds, vals, s=18, color="steelblue")
    else:
        _annotate_empty(ax)
    ax.set_xlabel(f"modulus d  ({label})" if label else "modulus d")
    ax.set_ylabel("|discrepancy|")
    ax.set_title("absolute discrepancy over the moduli family")


def render_variance_ratio(ax, json_paths: list[Path]) -> None:
    points = []
    for path in json_paths:
        blob = read_variance_report(path)
        if blob["c"] is None or blob["ratio"] is None:
            continue
        points.append((float(blob["c"]), float(blob["ratio"]), blob))
    points.sort()
    if points:
        ax.plot([p[0] for p in points], [p[1] for p in points], "o-", color="darkorange")
        label = _param_label(points[0][2])
    else:
        _annotate_empty(ax)
        label = ""
    ax.axhline(1.0, color="grey", lw=0.8, ls="--")
    ax.set_xlabel(f"c = log X / log d  ({label})" if label else "c = log X / log d")
    ax.set_ylabel("empirical / conjectured")
    ax.set_title("variance ratio against the predicted size")


def render_gamma_profile(ax, csv_paths: list[Path]) -> None:
    rows = []
    for path in csv_paths:
        rows.extend(read_csv_rows(path, GAMMA_COLUMNS))
    if rows:
        rows.sort(key=lambda r: float(r["c"]))
        cs = [float(r["c"]) for r in rows]
        vals = [float(r["value"]) for r in rows]
        errs = [float(r["std_error"]) for r in rows]
        ax.errorbar(cs, vals, yerr=errs, fmt="o-", ms=3, capsize=2, color="seagreen")
        ks = sorted({r["k"] for r in rows})
        ax.set_title(f"Monte Carlo profile, k in {{{', '.join(ks)}}} "
                     f"({rows[0]['samples']} samples, seed {rows[0]['seed']})")
    else:
        _annotate_empty(ax)
        ax.set_title("Monte Carlo profile")
    ax.set_xlabel("c")
    ax.set_ylabel("profile value")


def render(kind: str, inputs: list[Path], output: Path, deterministic: bool) -> None:
    if deterministic:
        plt.rcParams["svg.hashsalt"] = "divplots"
    csv_paths = [p for p in inputs if p.suffix == ".csv"]
    json_paths = [p for p in inputs if p.suffix == ".json"]
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    try:
        if kind == "delta_scatter":
            render_delta_scatter(ax, csv_paths, json_paths)
        elif kind == "variance_ratio":
            render_variance_ratio(ax, json_paths)
        elif kind == "gamma_profile":
            render_gamma_profile(ax, csv_paths)
        else:
            raise SchemaError(f"unknown figure kind {kind!r}")
        fig.tight_layout()
        metadata = {"Date": None} if deterministic and output.suffix == ".svg" else None
        fig.savefig(output, metadata=metadata)
    finally:
        plt.close(fig)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="dival-plots", description=__doc__)
    parser.add_argument("--kind", required=True, choices=KINDS)
    parser.add_argument("--input", required=True, nargs="+", type=Path)
    parser.add_argument("--output", required=True, type=Path)
    parser.add_argument("--deterministic", action="store_true",
                        help="suppress embedded timestamps")
    args = parser.parse_args(argv)
    try:
        render(args.kind, args.input, args.output, args.deterministic)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
