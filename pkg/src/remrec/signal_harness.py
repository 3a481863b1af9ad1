"""Waveform-level path: synthesize multi-tone signals, undersample, and pull
residues back out of the spectrum.

The default operating mode is grid-aligned: integer tone frequencies and a
one-second window put every tone exactly on a DFT bin, so extracted residues
match the analytic encoders bit for bit and decoder validation stays
decoupled from estimator quality. Off-grid extraction is available through
3-point parabolic interpolation; its residual offset is reported per peak,
not hidden.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from .errors import PeakDeficit
from .remainder_model import COMPLEX, REAL, substream


@dataclass(frozen=True)
class WaveformSpec:
    """Tones are (amplitude, frequency_hz, phase_radians)."""

    tones: Tuple[Tuple[float, float, float], ...]
    model: str = COMPLEX
    noise_floor: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "tones", tuple((float(a), float(f), float(p)) for a, f, p in self.tones))
        if self.model not in (COMPLEX, REAL):
            raise ValueError(f"unknown model {self.model!r}")
        freqs = [f for _, f, _ in self.tones]
        if len(set(freqs)) != len(freqs):
            raise ValueError("tone frequencies must be distinct")
        if any(a <= 0 for a, _, _ in self.tones):
            raise ValueError("tone amplitudes must be positive")

    @property
    def min_amplitude(self) -> float:
        return min(a for a, _, _ in self.tones)


@dataclass(frozen=True)
class SampledSequence:
    rate: float
    samples: np.ndarray
    window: float
    model: str = COMPLEX

    def __post_init__(self):
        if len(self.samples) != round(self.rate * self.window):
            raise ValueError("sample count must equal round(rate * window)")


@dataclass(frozen=True)
class Peak:
    residue: float
    magnitude: float
    multiplicity: int
    interp_offset: float = 0.0


def synthesize(spec: WaveformSpec, rate: float, window: float, seed: int = 0) -> SampledSequence:
    """Sample sum_i A_i exp(j(2 pi (f_i / rate) n + theta_i)); real part only
    for the real model. Gaussian noise at the configured floor."""
    if rate <= 0 or window <= 0:
        raise ValueError("rate and window must be positive")
    n = round(rate * window)
    idx = np.arange(n)
    samples = np.zeros(n, dtype=complex)
    for amp, freq, phase in spec.tones:
        samples += amp * np.exp(1j * (2 * np.pi * (freq / rate) * idx + phase))
    if spec.model == REAL:
        samples = samples.real.astype(complex)
    if spec.noise_floor > 0:
        rng = substream(seed, f"signal-noise-{rate}")
        if spec.model == REAL:
            samples += rng.normal(0.0, spec.noise_floor, n)
        else:
            scale = spec.noise_floor / np.sqrt(2)
            samples += rng.normal(0.0, scale, n) + 1j * rng.normal(0.0, scale, n)
    return SampledSequence(rate=float(rate), samples=samples, window=float(window), model=spec.model)


def extract_peaks(
    seq: SampledSequence,
    min_amplitude: float = 1.0,
    interpolate: bool = False,
) -> List[Peak]:
    """Spectral peaks above threshold, strongest first.

    The threshold is half the expected single-tone peak magnitude
    (min_amplitude * n for complex sequences, half that for real ones, whose
    energy splits between the +- images). Multiplicity estimates how many
    equal-amplitude tones coincide on the bin.
    """
    n = len(seq.samples)
    spectrum = np.fft.fft(seq.samples)
    mags = np.abs(spectrum)
    unit = min_amplitude * n * (0.5 if seq.model == REAL else 1.0)
    threshold = 0.5 * unit
    peaks: List[Peak] = []
    for k in range(n):
        m = mags[k]
        if m <= threshold:
            continue
        left, right = mags[(k - 1) % n], mags[(k + 1) % n]
        # a neighbor counts as larger only beyond float noise, so adjacent
        # on-grid tones of equal amplitude both survive
        if left > m * (1 + 1e-9) or right > m * (1 + 1e-9):
            continue
        offset = 0.0
        if interpolate:
            denom = left - 2 * m + right
            if denom != 0:
                offset = 0.5 * (left - right) / denom
        residue = ((k + offset) % n) / seq.window
        peaks.append(Peak(residue=residue, magnitude=float(m), multiplicity=max(1, round(m / unit)), interp_offset=offset))
    peaks.sort(key=lambda p: (-p.magnitude, p.residue))
    return peaks


def extract_residues(
    seq: SampledSequence,
    expected_count: int,
    min_amplitude: float = 1.0,
    interpolate: bool = False,
) -> List[float]:
    """The expected_count largest-magnitude peak locations as residues in
    [0, rate), unordered.

    When tones alias onto a shared bin the single merged peak is duplicated
    according to its amplitude multiplicity to fill the multiset.
    """
    if expected_count < 1:
        raise ValueError("expected_count must be >= 1")
    if expected_count > len(seq.samples) / 2:
        raise ValueError("expected_count exceeds half the sample count")
    peaks = extract_peaks(seq, min_amplitude=min_amplitude, interpolate=interpolate)
    if len(peaks) >= expected_count:
        return sorted(p.residue for p in peaks[:expected_count])
    expanded: List[float] = []
    for p in peaks:
        expanded.extend([p.residue] * p.multiplicity)
    if len(expanded) < expected_count:
        raise PeakDeficit(
            f"found {len(expanded)} peak(s) above threshold, expected {expected_count}"
        )
    return sorted(expanded[:expected_count])


# ---------------------------------------------------------------------------
# Exports
# ---------------------------------------------------------------------------

def write_sequence_csv(seq: SampledSequence, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("index,re,im\n")
        for i, v in enumerate(seq.samples):
            fh.write(f"{i},{v.real!r},{v.imag!r}\n")


def write_sequence_binary(seq: SampledSequence, path: str) -> None:
    """Little-endian float64, re and im interleaved."""
    data = np.empty(2 * len(seq.samples))
    data[0::2] = seq.samples.real
    data[1::2] = seq.samples.imag
    with open(path, "wb") as fh:
        fh.write(data.astype("<f8").tobytes())


def write_spectrum_csv(seq: SampledSequence, path: str) -> None:
    mags = np.abs(np.fft.fft(seq.samples))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("bin,magnitude\n")
        for k, m in enumerate(mags):
            fh.write(f"{k},{m!r}\n")
