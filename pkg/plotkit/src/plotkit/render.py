"""Figure rendering. One function per plot kind plus the PlotJob wrapper.

Everything is deterministic: fixed backend, figure geometry, fonts, and
color order; no clocks, hostnames, or randomness touch the output, so
identical inputs give identical image bytes under a fixed toolchain.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.colors import LogNorm, Normalize  # noqa: E402

from .schemas import SCHEMAS, SchemaError, read_table  # noqa: E402

_COLORS = plt.rcParams["axes.prop_cycle"].by_key()["color"]
_DPI = 120


@dataclass(frozen=True)
class PlotJob:
    kind: str
    inputs: tuple
    output: str
    title: str | None = None
    style: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in SCHEMAS:
            raise SchemaError(
                f"unknown plot kind {self.kind!r}; expected one of "
                f"{', '.join(sorted(SCHEMAS))}")
        if not self.inputs:
            raise SchemaError("at least one input CSV is required")


def _save(fig, output):
    fig.savefig(output, dpi=_DPI, metadata={"Software": "plotkit"})
    plt.close(fig)


def _label(path):
    return Path(path).stem


def _plot_curves(tables, labels, output, title):
    fig, axes = plt.subplots(1, 3, figsize=(9.6, 3.2), layout="constrained")
    for (t, lab), color in zip(zip(tables, labels),
                               _COLORS * (len(tables) // 10 + 1)):
        axes[0].plot(t["l"], t["fl"], color=color, label=lab)
        axes[1].plot(t["v_bar"], t["fv"], color=color, label=lab)
        axes[2].plot(t["l"], t["fp"], color=color, label=lab)
    axes[0].set(xlabel="normalized length", ylabel="gain",
                title="active force-length")
    axes[1].set(xlabel="scaled velocity", title="force-velocity")
    axes[2].set(xlabel="normalized length", title="passive force")
    for ax in axes:
        ax.grid(True, alpha=0.3)
    if len(tables) > 1:
        axes[0].legend(fontsize=8)
    if title:
        fig.suptitle(title)
    _save(fig, output)


def _plot_series(tables, labels, output, title, x, y, xlabel, ylabel):
    fig, ax = plt.subplots(figsize=(6.4, 3.6), layout="constrained")
    for (t, lab), color in zip(zip(tables, labels),
                               _COLORS * (len(tables) // 10 + 1)):
        ax.plot(t[x], t[y], color=color, label=lab, linewidth=1.2)
    ax.set(xlabel=xlabel, ylabel=ylabel)
    ax.grid(True, alpha=0.3)
    if len(tables) > 1:
        ax.legend(fontsize=8)
    if title:
        ax.set_title(title)
    _save(fig, output)


def _plot_learning(tables, labels, output, title):
    fig, ax = plt.subplots(figsize=(6.4, 3.6), layout="constrained")
    for (t, lab), color in zip(zip(tables, labels),
                               _COLORS * (len(tables) // 10 + 1)):
        ax.plot(t["generation"], t["mean_return"], color=color,
                label=f"{lab} mean", linewidth=1.4)
        ax.plot(t["generation"], t["max_return"], color=color,
                linestyle="--", alpha=0.6, label=f"{lab} max",
                linewidth=1.0)
    ax.set(xlabel="generation", ylabel="return")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    if title:
        ax.set_title(title)
    _save(fig, output)


def _plot_beta_map(tables, labels, output, title):
    if len(tables) != 1:
        raise SchemaError("beta-map takes exactly one sweep CSV, got "
                          f"{len(tables)}")
    t = tables[0]
    betas = sorted(set(t["beta"]))
    freqs = sorted(set(t["controller_hz"]))
    amp = np.full((len(betas), len(freqs)), np.nan)
    stable = np.zeros_like(amp, dtype=bool)
    for b, hz, a, s in zip(t["beta"], t["controller_hz"], t["amplitude"],
                           t["stable"]):
        amp[betas.index(b), freqs.index(hz)] = a
        stable[betas.index(b), freqs.index(hz)] = bool(s)
    if np.isnan(amp).any():
        raise SchemaError(
            f"{labels[0]}: sweep grid is incomplete; every (beta, "
            "controller_hz) pair must appear exactly once")
    fig, ax = plt.subplots(figsize=(6.4, 3.6), layout="constrained")
    positive = amp[amp > 0]
    if positive.size and positive.max() / positive.min() > 100.0:
        norm = LogNorm(vmin=positive.min(), vmax=positive.max())
        shown = np.where(amp > 0, amp, positive.min())
    else:
        norm = Normalize(vmin=float(amp.min()), vmax=float(amp.max()))
        shown = amp
    mesh = ax.imshow(shown, norm=norm, aspect="auto", origin="lower",
                     cmap="viridis")
    ax.set_xticks(range(len(freqs)), [f"{f:g}" for f in freqs])
    ax.set_yticks(range(len(betas)), [f"{b:g}" for b in betas])
    ax.set(xlabel="controller rate [Hz]", ylabel="velocity gain")
    for i in range(len(betas)):
        for j in range(len(freqs)):
            ax.text(j, i, "stable" if stable[i, j] else "OSC",
                    ha="center", va="center", fontsize=8,
                    color="white" if not stable[i, j] else "black")
    fig.colorbar(mesh, ax=ax, label="post-settle amplitude [rad]")
    if title:
        ax.set_title(title)
    _save(fig, output)


def plot(job: PlotJob) -> str:
    """Validate inputs against the kind's schema and render the figure."""
    required = SCHEMAS[job.kind]
    tables = [read_table(p, required) for p in job.inputs]
    labels = [_label(p) for p in job.inputs]
    title = job.title
    if job.kind == "curves":
        _plot_curves(tables, labels, job.output, title)
    elif job.kind == "hold":
        _plot_series(tables, labels, job.output, title, "t", "q",
                     "time [s]", "joint angle [rad]")
    elif job.kind == "learning":
        _plot_learning(tables, labels, job.output, title)
    elif job.kind == "hop":
        _plot_series(tables, labels, job.output, title, "t", "z",
                     "time [s]", "body height [m]")
    else:
        _plot_beta_map(tables, labels, job.output, title)
    return job.output
