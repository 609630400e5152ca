"""Figure rendering for run records.

The delimited tables remain the canonical output; figures are a convenience
layer written next to them.  Every table with a ``k`` column gets one PNG
per numeric column showing the per-k median with min/max whiskers, grouped
by the table's label column (poly/map/word) when present.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .records import MetricTable, RunRecord

_LABEL_COLUMNS = ("poly", "map", "word", "statistic")
_SKIP_COLUMNS = {"k", "rep", "pair", "error", "certified", "converged",
                 "censored_flag", "restarts", "word"}


def _numeric(values) -> bool:
    return all(isinstance(v, (int, float)) and not isinstance(v, bool)
               for v in values)


def _group_rows(table: MetricTable):
    label_col = next((c for c in _LABEL_COLUMNS if c in table.columns), None)
    if label_col is None:
        return {None: table.rows}, None
    li = table.columns.index(label_col)
    groups: dict = {}
    for row in table.rows:
        groups.setdefault(row[li], []).append(row)
    if len(groups) > 12:
        # too many series to read (e.g. one per monomial): aggregate instead
        return {None: table.rows}, None
    return groups, label_col


def render_table(table: MetricTable, out_dir: Path) -> list:
    """Render per-k summary plots for one table; returns written paths."""
    if "k" not in table.columns:
        return []
    ki = table.columns.index("k")
    groups, label_col = _group_rows(table)
    written = []
    for col in table.columns:
        if col in _SKIP_COLUMNS or col == label_col:
            continue
        ci = table.columns.index(col)
        fig, ax = plt.subplots(figsize=(6.0, 4.0))
        plotted = False
        for label, rows in sorted(groups.items(), key=lambda kv: str(kv[0])):
            per_k: dict = {}
            for row in rows:
                v = row[ci]
                if isinstance(v, (int, float)) and not isinstance(v, bool) \
                        and not (isinstance(v, float) and math.isnan(v)):
                    per_k.setdefault(row[ki], []).append(float(v))
            if not per_k:
                continue
            ks = sorted(per_k)
            med = [_median(per_k[k]) for k in ks]
            lo = [min(per_k[k]) for k in ks]
            hi = [max(per_k[k]) for k in ks]
            err = [[m - l for m, l in zip(med, lo)],
                   [h - m for m, h in zip(med, hi)]]
            ax.errorbar(ks, med, yerr=err, marker="o", capsize=3,
                        label=str(label) if label is not None else None)
            plotted = True
        if not plotted:
            plt.close(fig)
            continue
        ax.set_xlabel("k")
        ax.set_ylabel(col)
        ax.set_xscale("log", base=2)
        ax.set_title(f"{table.name}: {col}")
        if label_col is not None:
            ax.legend(fontsize=8)
        ax.grid(True, alpha=0.3)
        path = out_dir / f"{table.name}_{col}.png"
        fig.tight_layout()
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(path)
    return written


def _median(values):
    s = sorted(values)
    n = len(s)
    mid = n // 2
    return s[mid] if n % 2 else 0.5 * (s[mid - 1] + s[mid])


def render_record(record: RunRecord, out_dir: Path) -> list:
    """Render figures for every table of a record into ``out_dir/figures``."""
    fig_dir = Path(out_dir) / "figures"
    fig_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for _, table in sorted(record.tables.items()):
        written.extend(render_table(table, fig_dir))
    return written
