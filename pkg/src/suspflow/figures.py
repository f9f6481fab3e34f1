"""Matplotlib renderings for experiment reports.

Each helper takes already-computed rows and writes one PNG next to the
delimited output.  All figures use the Agg backend so the CLI works headless.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def _finish(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_pressure_sweep(tilts, pressures, path, title="Pressure along a tilt line"):
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(tilts, pressures, marker="o", markersize=3, lw=1.2)
    ax.set_xlabel("tilt q")
    ax.set_ylabel("pressure")
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    return _finish(fig, path)


def plot_defect_curves(times, flow_defects, lengths, discrete_defects, path,
                       title="Defect decay"):
    """Log-log flow and block defect curves side by side."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 4))
    ax1.loglog(times, [max(d, 1e-18) for d in flow_defects], marker="o", ms=3)
    ax1.set_xlabel("time horizon t")
    ax1.set_ylabel("defect / t")
    ax1.set_title("continuous")
    ax1.grid(True, which="both", alpha=0.3)
    ax2.loglog(lengths, [max(d, 1e-18) for d in discrete_defects], marker="s",
               ms=3, color="tab:orange")
    ax2.set_xlabel("block length n")
    ax2.set_ylabel("defect / n")
    ax2.set_title("induced sequence")
    ax2.grid(True, which="both", alpha=0.3)
    fig.suptitle(title)
    return _finish(fig, path)


def plot_spectrum(alphas, dims, path, interval=None, title="Level-set dimensions"):
    fig, ax = plt.subplots(figsize=(6, 4))
    pts = [(a, d) for a, d in zip(alphas, dims) if d is not None]
    if pts:
        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", ms=3)
    empty = [a for a, d in zip(alphas, dims) if d is None]
    if empty:
        ax.plot(empty, [0.0] * len(empty), "x", color="tab:red", label="empty level set")
        ax.legend()
    if interval is not None:
        ax.axvspan(interval[0], interval[1], alpha=0.08, color="tab:green")
    ax.set_xlabel("ratio value")
    ax.set_ylabel("dimension")
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    return _finish(fig, path)


def plot_residuals(labels, values, path, tol=None, title="Residuals"):
    fig, ax = plt.subplots(figsize=(max(6, 0.5 * len(labels)), 4))
    xs = range(len(labels))
    ax.bar(xs, [max(v, 1e-18) for v in values], color="tab:blue")
    ax.set_yscale("log")
    ax.set_xticks(list(xs))
    ax.set_xticklabels(labels, rotation=45, ha="right", fontsize=7)
    if tol is not None:
        ax.axhline(tol, color="tab:red", lw=1, ls="--", label=f"tolerance {tol:g}")
        ax.legend()
    ax.set_ylabel("absolute residual")
    ax.set_title(title)
    ax.grid(True, axis="y", alpha=0.3)
    return _finish(fig, path)


def plot_roof_profile(flow, path, title="Roof and suspension segments"):
    """Bar chart of roof values over depth words with the mean marked."""
    roof = flow.roof
    words = flow.sft.words(roof.depth)
    labels = ["".join(map(str, w)) for w in words]
    values = [roof(w) for w in words]
    fig, ax = plt.subplots(figsize=(max(6, 0.4 * len(labels)), 4))
    ax.bar(range(len(labels)), values, color="tab:purple", alpha=0.8)
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels(labels, rotation=45, ha="right", fontsize=7)
    mean = sum(values) / len(values)
    ax.axhline(mean, color="k", lw=1, ls=":", label=f"plain mean {mean:.3g}")
    ax.set_ylabel("return time")
    ax.set_title(title)
    ax.legend()
    return _finish(fig, path)
