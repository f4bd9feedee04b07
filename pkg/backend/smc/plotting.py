"""
Plotting
PNG renderings of trajectories and value histograms
"""

from pathlib import Path
from typing import Sequence, Union

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402


def plot_trajectories(frames: Sequence[pd.DataFrame], path: Union[str, Path], title: str = "") -> Path:
    """
    Step plot of every monitored term, one panel per run

    Args:
        frames: Output of monitor_simulations
        path: PNG file to write
        title: Figure title

    Returns:
        Path written
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig, axes = plt.subplots(len(frames), 1, figsize=(10, 2.5 * len(frames)), sharex=True, squeeze=False)
    for j, (frame, ax) in enumerate(zip(frames, axes[:, 0])):
        for column in frame.columns:
            if column != "step":
                ax.step(frame["step"], frame[column], where="post", label=column)
        ax.set_ylabel(f"run {j}")
        ax.legend(loc="upper left", fontsize="small")
    axes[-1, 0].set_xlabel("step (ms)")
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def plot_histogram(histogram: pd.DataFrame, path: Union[str, Path], title: str = "") -> Path:
    """Bar chart of a bin_left/bin_right/count table"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(8, 4))
    widths = histogram["bin_right"] - histogram["bin_left"]
    ax.bar(histogram["bin_left"], histogram["count"], width=widths, align="edge", edgecolor="black")
    ax.set_xlabel("value")
    ax.set_ylabel("runs")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path
