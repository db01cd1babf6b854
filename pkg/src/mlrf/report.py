"""Report files: tab-separated tables with a matching PNG figure each."""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Optional, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def _write_tsv(path: Path, header: Sequence[str], rows) -> Path:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, delimiter="\t", lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    return path


def write_trace(directory, trace: Sequence[dict], title: str = "") -> list:
    """Per-iteration generator and row counts."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    header = ["iteration", "generators", "new_generators", "ineq_rows", "eq_rows"]
    rows = [[t[h] for h in header] for t in trace]
    tsv = _write_tsv(out / "trace.tsv", header, rows)
    fig, ax = plt.subplots(figsize=(6, 3.5))
    if rows:
        its = [r[0] for r in rows]
        for k, label in ((1, "generators"), (2, "new generators"), (3, "inequalities"), (4, "equalities")):
            ax.plot(its, [r[k] for r in rows], marker="o", label=label)
        ax.legend(fontsize=8)
    else:
        ax.text(0.5, 0.5, "no iterations", ha="center", va="center", transform=ax.transAxes)
    ax.set_xlabel("iteration")
    ax.set_ylabel("count")
    ax.set_title(title or "refinement trace")
    fig.tight_layout()
    png = out / "trace.png"
    fig.savefig(png, dpi=100)
    plt.close(fig)
    return [tsv, png]


def write_depth_profile(directory, profile: Optional[Sequence[bool]], title: str = "") -> list:
    """Per-depth answer of the stacked displacement system (1 = a ranking
    function of that depth exists)."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    profile = list(profile or [])
    tsv = _write_tsv(out / "depth_profile.tsv", ["depth", "ranked"], [[d, int(b)] for d, b in enumerate(profile)])
    fig, ax = plt.subplots(figsize=(6, 3))
    if profile:
        ax.step(range(len(profile)), [int(b) for b in profile], where="mid", marker="o")
        ax.set_yticks([0, 1], ["no", "yes"])
    else:
        ax.text(0.5, 0.5, "no profile", ha="center", va="center", transform=ax.transAxes)
    ax.set_xlabel("depth")
    ax.set_ylabel("ranking function")
    ax.set_title(title or "depth profile")
    fig.tight_layout()
    png = out / "depth_profile.png"
    fig.savefig(png, dpi=100)
    plt.close(fig)
    return [tsv, png]
