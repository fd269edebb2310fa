"""Matplotlib rendering for the CLI's opt-in ``--fig`` outputs.

Figures are a convenience layer next to the delimited data files; the data
files remain the deterministic interface.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

DPI = 150


def save_curve_figure(curves, labels, path: str, title: str = "Pixel transfer curve") -> None:
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for curve, label in zip(curves, labels):
        ax.step(curve.input_codes, curve.lut, where="post", label=label)
    ax.set_xlabel("input code (PD-node voltage drop, quantized)")
    ax.set_ylabel("output code")
    ax.set_xlim(0, 255)
    ax.set_ylim(-5, 260)
    ax.set_title(title)
    if any(labels):
        ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)


def save_histogram_figure(image, path: str, title: str = "Grayscale histogram") -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.hist(image.pixels.ravel(), bins=256, range=(0, 255), color="0.3")
    ax.set_xlabel("gray level")
    ax.set_ylabel("count")
    ax.set_xlim(0, 255)
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)


def save_enhancement_figure(before, after, path: str) -> None:
    fig, axes = plt.subplots(2, 2, figsize=(9, 7))
    for ax, img, name in ((axes[0][0], before, "input"), (axes[0][1], after, "enhanced")):
        ax.imshow(img.pixels, cmap="gray", vmin=0, vmax=255, interpolation="nearest")
        ax.set_title(name)
        ax.axis("off")
    for ax, img, name in ((axes[1][0], before, "input"), (axes[1][1], after, "enhanced")):
        ax.hist(img.pixels.ravel(), bins=256, range=(0, 255), color="0.3")
        ax.set_xlim(0, 255)
        ax.set_xlabel("gray level")
        ax.set_title(f"{name} histogram")
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)


def save_trace_figure(trace, path: str) -> None:
    t = np.array([s.time for s in trace.samples]) * 1e6
    v_pd = [s.v_pd for s in trace.samples]
    v_out = [s.v_out for s in trace.samples]
    states = [s.ptm_state.value for s in trace.samples]
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(t, v_pd, label="v_pd")
    ax.plot(t, v_out, label="v_out")
    flips = [k for k in range(1, len(states)) if states[k] != states[k - 1]]
    for k in flips:
        ax.axvline(t[k], color="r", ls="--", alpha=0.6,
                   label="state flip" if k == flips[0] else None)
    ax.set_xlabel("time (us)")
    ax.set_ylabel("volts")
    ax.legend()
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)


def save_mc_figure(rows, path: str) -> None:
    ok = [(r.index, r.cr) for r in rows if r.cr is not None]
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    if ok:
        idx, crs = zip(*ok)
        ax1.scatter(idx, crs, s=6, color="0.2")
        ax2.hist(crs, bins=40, color="0.3")
    ax1.set_xlabel("sample index")
    ax1.set_ylabel("Michelson contrast ratio")
    ax1.set_title("CR per sample")
    ax1.grid(alpha=0.3)
    ax2.set_xlabel("Michelson contrast ratio")
    ax2.set_ylabel("count")
    ax2.set_title("CR distribution")
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)
