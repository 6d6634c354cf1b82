"""Figure rendering for the CLI report paths.

Each function writes one PNG next to the delimited output it
visualizes.  Rendering uses the Agg backend so runs stay headless.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

__all__ = [
    "plot_schedule",
    "plot_metric_curves",
    "plot_learn_trace",
    "plot_tv_curves",
]

_DPI = 120


def plot_schedule(schedule, path):
    """Step plot of the per-position alpha (log scale) and beta values."""
    ks = np.arange(len(schedule.alphas))
    fig, ax1 = plt.subplots(figsize=(6, 3.5))
    ax1.step(ks, schedule.alphas, where="mid", color="tab:blue", label="alpha")
    ax1.set_yscale("log")
    ax1.set_xlabel("cycle position k")
    ax1.set_ylabel("alpha", color="tab:blue")
    ax2 = ax1.twinx()
    ax2.step(ks, schedule.betas, where="mid", color="tab:red", label="beta")
    ax2.set_ylabel("beta", color="tab:red")
    ax2.set_ylim(0, 1.05)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def plot_metric_curves(curves, ylabel, path, logy=False):
    """Overlay per-sampler metric curves.

    Args:
        curves: {label: (steps, values)} mapping.
        ylabel: Axis label.
        path: Output PNG.
        logy: Log-scale the y axis.
    """
    fig, ax = plt.subplots(figsize=(6, 3.5))
    for label, (xs, ys) in sorted(curves.items()):
        ax.plot(xs, ys, label=label, lw=1.2)
    if logy:
        ax.set_yscale("log")
    ax.set_xlabel("step")
    ax.set_ylabel(ylabel)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def plot_learn_trace(trace, path):
    """Training telemetry: phase energies and the gradient norm."""
    its = np.arange(1, len(trace.data_energy) + 1)
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(6, 5), sharex=True)
    ax1.plot(its, trace.data_energy, label="data energy", lw=1.0)
    ax1.plot(its, trace.buffer_energy, label="buffer energy", lw=1.0)
    ax1.set_ylabel("mean U")
    ax1.legend(fontsize=8)
    ax2.plot(its, trace.grad_norm, color="tab:green", lw=1.0)
    ax2.set_yscale("log")
    ax2.set_ylabel("|grad|")
    ax2.set_xlabel("iteration")
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def plot_tv_curves(curves, bounds, path):
    """Worst-case TV distance per step with geometric bound overlays.

    Args:
        curves: {label: tv array} measured curves.
        bounds: {label: (epsilon, n_steps)} geometric (1-eps)^k overlays.
        path: Output PNG.
    """
    fig, ax = plt.subplots(figsize=(6, 3.5))
    for label, tv in sorted(curves.items()):
        ax.plot(np.arange(1, len(tv) + 1), tv, label=label, lw=1.2)
    for label, (eps, n) in sorted(bounds.items()):
        ks = np.arange(1, n + 1)
        ax.plot(ks, (1.0 - eps) ** ks, "--", lw=1.0, label="%s bound" % (label,))
    ax.set_yscale("log")
    ax.set_xlabel("step")
    ax.set_ylabel("max TV to stationarity")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
