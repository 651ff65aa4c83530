"""Diagnostic figures of an eversion: energy trace and event timeline."""

from __future__ import annotations

from pathlib import Path
from typing import List, Sequence, Union

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd

from ..intersections.events import EventKind, EventRecord, events_to_frame

_KIND_COLORS = {
    EventKind.LAKE.value: "#4c72b0",
    EventKind.ISLAND.value: "#55a868",
    EventKind.ISTHMUS.value: "#8172b2",
    EventKind.TRIPLE_PAIR_CREATE.value: "#dd8452",
    EventKind.TRIPLE_PAIR_ANNIHILATE.value: "#937860",
    EventKind.QUADRUPLE.value: "#d62728",
}


def _trace_columns(homotopy_or_frame) -> tuple:
    if isinstance(homotopy_or_frame, pd.DataFrame):
        df = homotopy_or_frame
        return df["TIME"].to_numpy(), df["ENERGY"].to_numpy(), [], float(df["ENERGY"].max())
    h = homotopy_or_frame
    return np.asarray(h.times), np.asarray(h.energies), list(h.events), h.halfway_energy


def plot_energy_trace(homotopy_or_frame):
    """
    Energy against time.

    Accepts a :class:`~pyevert.pipeline.Homotopy` or a DataFrame with
    ``TIME`` and ``ENERGY`` columns. The halfway energy is drawn as a
    horizontal line and event intervals of a homotopy are shaded.
    """
    times, energies, events, peak = _trace_columns(homotopy_or_frame)

    fig, ax = plt.subplots(figsize=(9, 4.5))
    ax.plot(times, energies, color="#4c72b0", marker="o", markersize=3, linewidth=1.2)
    ax.axhline(peak, color="#d62728", linestyle="--", linewidth=0.8, label=f"halfway {peak:.4f}")
    ax.axhline(1.0, color="0.5", linestyle=":", linewidth=0.8, label="round sphere")
    for e in events:
        i, j = e.frame_interval
        ax.axvspan(times[i], times[j], color=_KIND_COLORS[e.kind.value], alpha=0.15, linewidth=0)
    ax.set_xlabel("Time")
    ax.set_ylabel("Willmore energy")
    ax.set_xlim(0.0, 1.0)
    ax.grid(alpha=0.3)
    ax.legend(loc="upper right")
    fig.tight_layout()
    return fig


def plot_event_timeline(events: Union[Sequence[EventRecord], pd.DataFrame]):
    """One row per event kind, one marker per event at its interval midpoint (in frames)."""
    df = events if isinstance(events, pd.DataFrame) else events_to_frame(events)
    kinds = [k.value for k in EventKind]

    fig, ax = plt.subplots(figsize=(9, 3.5))
    for row, kind in enumerate(kinds):
        sel = df[df["KIND"] == kind]
        mid = 0.5 * (sel["FRAME_START"].to_numpy() + sel["FRAME_END"].to_numpy())
        ax.scatter(mid, np.full(mid.shape, row), color=_KIND_COLORS[kind], s=40, zorder=3)
    grouped = df[df["GROUP"] >= 0]
    for _, g in grouped.groupby("GROUP"):
        ax.axvline(0.5 * (g["FRAME_START"].iloc[0] + g["FRAME_END"].iloc[0]), color="0.6", linestyle=":")
    ax.set_yticks(range(len(kinds)))
    ax.set_yticklabels(kinds)
    ax.set_xlabel("Frame")
    ax.set_title(f"Topological events ({len(df)})")
    ax.grid(axis="x", alpha=0.3)
    fig.tight_layout()
    return fig


def save_plots(homotopy, directory: Union[str, Path]) -> List[Path]:
    """Write ``energy_trace.png`` and ``events.png``; returns the paths."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, fig in (
        ("energy_trace.png", plot_energy_trace(homotopy)),
        ("events.png", plot_event_timeline(homotopy.events)),
    ):
        path = out / name
        fig.savefig(path, dpi=120, metadata={"Software": None})
        plt.close(fig)
        paths.append(path)
    return paths
