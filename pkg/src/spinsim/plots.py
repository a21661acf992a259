"""Figure rendering for the experiment runners (Agg backend, PNG files)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def render_error_panel(theta, losses, l_list, epsilon, path, title=""):
    """Digital error curves per depth with the accumulated-gate-error lines."""
    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    for l in l_list:
        ax.plot(theta, losses[l], label=f"l = {l}")
    for l in l_list:
        ax.axhline(l * epsilon, ls="--", lw=0.9, color="gray")
        ax.annotate(f"l·ε = {l * epsilon:.3g}", (theta[-1], l * epsilon),
                    ha="right", va="bottom", fontsize=7, color="gray")
    ax.set_xlabel(r"total phase $\theta = Jt$")
    ax.set_ylabel("digital error")
    if title:
        ax.set_title(title, fontsize=9)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_trajectory(traj, path):
    """Device-run fidelity, magnetization curves and leakage vs phase."""
    theta = np.array([s.theta for s in traj.samples])
    fid = np.array([s.fidelity for s in traj.samples])
    obs = {k: np.array([s.observables[k] for s in traj.samples])
           for k in traj.samples[0].observables}
    fig, axes = plt.subplots(2, 1, figsize=(5.0, 5.6), sharex=True)
    axes[0].plot(theta, fid, "k-", label="fidelity")
    if "leakage" in obs:
        axes[0].plot(theta, 1.0 - obs["leakage"], "r--", lw=0.9, label="1 - leakage")
    axes[0].set_ylabel("state fidelity")
    axes[0].legend(fontsize=8)
    for name, style in (("sx_1_ideal", "C0--"), ("sx_1_device", "C0-"),
                        ("sx_2_ideal", "C1--"), ("sx_2_device", "C1-")):
        if name in obs:
            axes[1].plot(theta, obs[name], style, label=name, lw=1.0)
    axes[1].set_xlabel(r"exchange phase $\theta$")
    axes[1].set_ylabel(r"$\langle \sigma^x \rangle$")
    axes[1].legend(fontsize=7, ncol=2)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_bounds(theta, l_list, bounds, path, title=""):
    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    for l in l_list:
        ax.plot(theta, bounds[l], label=f"l = {l}")
    ax.set_xlabel(r"total phase $\theta = Jt$")
    ax.set_ylabel("error bound")
    if title:
        ax.set_title(title, fontsize=9)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
