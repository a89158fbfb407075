"""Figures for benchmark runs (rendered off-screen to image files)."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .bench import Outcome, RunRecord, medians, outcome_fractions  # noqa: E402

_OUTCOME_COLOURS = {
    Outcome.COMPLETED: "tab:green",
    Outcome.STEP_CAPPED: "tab:orange",
    Outcome.FAILED: "tab:red",
}


def figure_path_for(csv_path: str | Path) -> Path:
    return Path(csv_path).with_suffix(".png")


def render_bench_figure(records: Sequence[RunRecord], path: str | Path, title: str = "") -> Path:
    """Median size and time per requested size, plus the outcome mix."""
    path = Path(path)
    fig, (ax_size, ax_time, ax_out) = plt.subplots(1, 3, figsize=(15, 4.5))
    try:
        if records:
            table = medians(records)
            sizes = list(table)
            ax_size.plot(sizes, [table[s][0] for s in sizes], "o-")
            ax_time.plot(sizes, [table[s][1] / 1e6 for s in sizes], "o-", color="tab:purple")
            fractions = outcome_fractions(records)
            positions = range(len(sizes))
            bottom = [0.0] * len(sizes)
            for outcome, colour in _OUTCOME_COLOURS.items():
                heights = [fractions[s][outcome] for s in sizes]
                ax_out.bar(positions, heights, bottom=bottom, color=colour, label=outcome.value)
                bottom = [b + h for b, h in zip(bottom, heights)]
            ax_out.set_xticks(list(positions), [str(s) for s in sizes])
            ax_out.legend(loc="upper right", fontsize="small")
            if min(sizes) > 0 and len(sizes) > 1:
                for ax in (ax_size, ax_time):
                    ax.set_xscale("log")
                    ax.set_yscale("log")
        ax_size.set_xlabel("size / budget")
        ax_size.set_ylabel("median constructors")
        ax_time.set_xlabel("size / budget")
        ax_time.set_ylabel("median time (ms)")
        ax_out.set_xlabel("size / budget")
        ax_out.set_ylabel("fraction of runs")
        ax_out.set_ylim(0, 1)
        for ax in (ax_size, ax_time):
            ax.grid(True, which="both", alpha=0.3)
        if title:
            fig.suptitle(title)
        fig.tight_layout()
        fig.savefig(path, dpi=110)
    finally:
        plt.close(fig)
    return path
