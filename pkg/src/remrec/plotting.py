"""Figure rendering for the CLI report paths. All figures go to files."""

from __future__ import annotations

from typing import Sequence, Tuple

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def render_spectrum(points: Sequence[Tuple[float, float]], path: str, title: str = "spectrum") -> None:
    freqs = [f for f, _ in points]
    power = [p for _, p in points]
    fig, ax = plt.subplots(figsize=(7, 3.2))
    ax.plot(freqs, power, lw=1.0)
    ax.set_xlabel("frequency")
    ax.set_ylabel("power")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_magnitude_spectrum(samples, window: float, path: str, title: str = "magnitude spectrum") -> None:
    mags = np.abs(np.fft.fft(samples))
    fig, ax = plt.subplots(figsize=(7, 3.2))
    ax.stem(np.arange(len(mags)) / window, mags, basefmt=" ", markerfmt=".")
    ax.set_xlabel("frequency bin / window")
    ax.set_ylabel("|X(k)|")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_lag_bias(lags: Sequence[int], biases: Sequence[float], path: str, title: str = "lag bias") -> None:
    fig, ax = plt.subplots(figsize=(7, 3.2))
    ax.stem(lags, biases, basefmt=" ")
    ax.set_xlabel("lag")
    ax.set_ylabel("|estimate - truth|")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_error_histogram(errors: Sequence[float], bound: float, path: str, title: str = "matched errors") -> None:
    fig, ax = plt.subplots(figsize=(7, 3.2))
    if errors:
        ax.hist(errors, bins=40)
    ax.axvline(bound, color="red", ls="--", label=f"bound {bound:g}")
    ax.set_xlabel("per-element error")
    ax.set_ylabel("count")
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
