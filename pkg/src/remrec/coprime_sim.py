"""Co-prime sampling simulation: two undersampled streams, Bezout-indexed
autocorrelation estimation, bias measurement, and the failure-set checker.

Two streams sampled at intervals P*T and Q*T (co-prime P, Q) realize every
autocorrelation lag in [0, PQ) through index pairs solving
P*n1 - Q*n2 = lag. Cross terms between distinct tones average out over
cycles unless PQ*(f_i - f_j)*T is an integer, in which case their phase is
constant and the lag estimate stays biased no matter how many cycles are
averaged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import InsufficientLags, NoPairInWindow
from .remainder_model import substream
from .signal_harness import WaveformSpec

Number = Union[int, float, Fraction]


@dataclass(frozen=True)
class CoprimeConfig:
    """Two-stream setup. Tone frequencies keep their exact Fraction form when
    provided that way, so the failure condition can be evaluated exactly."""

    p: int
    q: int
    t: Number
    cycles: int
    spec: WaveformSpec
    exact_freqs: Optional[Tuple[Fraction, ...]] = None
    seed: int = 0

    def __post_init__(self):
        if math.gcd(self.p, self.q) != 1:
            raise ValueError(f"P={self.p} and Q={self.q} are not co-prime")
        if self.cycles < 1:
            raise ValueError("need at least one cycle")
        if self.exact_freqs is not None:
            object.__setattr__(self, "exact_freqs", tuple(Fraction(f) for f in self.exact_freqs))
            if len(self.exact_freqs) != len(self.spec.tones):
                raise ValueError("exact_freqs must match the tone count")


def make_config(
    p: int,
    q: int,
    t: Number,
    cycles: int,
    freqs: Sequence[Number],
    amplitudes: Optional[Sequence[float]] = None,
    seed: int = 0,
    noise_floor: float = 0.0,
) -> CoprimeConfig:
    """Convenience constructor; Fraction or "p/q"-string frequencies stay exact."""
    exact = all(isinstance(f, (int, Fraction, str)) for f in freqs)
    fracs = tuple(Fraction(f) for f in freqs) if exact else None
    amps = list(amplitudes) if amplitudes is not None else [1.0] * len(freqs)
    tones = tuple((a, float(Fraction(f)) if exact else float(f), 0.0) for a, f in zip(amps, freqs))
    spec = WaveformSpec(tones=tones, model="complex", noise_floor=noise_floor)
    return CoprimeConfig(p=p, q=q, t=t, cycles=cycles, spec=spec, exact_freqs=fracs, seed=seed)


@dataclass(frozen=True)
class LagEstimate:
    lag: int
    estimate: complex
    truth: complex
    bias: float
    pair: Tuple[int, int]   # within-cycle offsets (u, v) actually used
    kind: str               # "cross", "self1", or "self2"

    def to_dict(self) -> dict:
        return {
            "lag": self.lag,
            "estimate": [self.estimate.real, self.estimate.imag],
            "truth": [self.truth.real, self.truth.imag],
            "bias": self.bias,
            "pair": list(self.pair),
            "kind": self.kind,
        }


def failure_condition(config: CoprimeConfig) -> List[Tuple[int, int, bool]]:
    """Per tone pair (i, j), failing iff P*Q*(f_i - f_j)*T is an integer."""
    out = []
    n = len(config.spec.tones)
    for i in range(n):
        for j in range(i + 1, n):
            if config.exact_freqs is not None and isinstance(config.t, (int, Fraction)):
                value = config.p * config.q * (config.exact_freqs[i] - config.exact_freqs[j]) * Fraction(config.t)
                failing = value.denominator == 1
            else:
                fi = config.spec.tones[i][1]
                fj = config.spec.tones[j][1]
                value = config.p * config.q * (fi - fj) * float(config.t)
                failing = abs(value - round(value)) < 1e-9
            out.append((i, j, failing))
    return out


def bezout_lag_pairs(p: int, q: int, lag: int, k: int = 0) -> Tuple[int, int]:
    """Sample indices (n1, n2) with p*n1 - q*n2 = lag inside cycle k.

    The stream-2 offset is the unique v in [0, p); the stream-1 offset
    u = (lag + q*v) / p then lies in [0, 2q), reaching at most one cycle
    ahead. Lags outside [0, p*q) have no representative in the cycle window.
    """
    if math.gcd(p, q) != 1:
        raise ValueError(f"P={p} and Q={q} are not co-prime")
    if not 0 <= lag < p * q:
        raise NoPairInWindow(f"lag {lag} outside [0, {p * q}) has no pair in one cycle")
    v = (-lag * pow(q % p, -1, p)) % p
    u = (lag + q * v) // p
    return q * k + u, p * k + v


def _synthesize_stream(config: CoprimeConfig, undersampling: int, length: int) -> np.ndarray:
    idx = np.arange(length)
    t_float = float(config.t)
    samples = np.zeros(length, dtype=complex)
    for amp, freq, phase in config.spec.tones:
        samples += amp * np.exp(1j * (2 * np.pi * freq * t_float * undersampling * idx + phase))
    if config.spec.noise_floor > 0:
        rng = substream(config.seed, f"coprime-stream-{undersampling}")
        scale = config.spec.noise_floor / np.sqrt(2)
        samples += rng.normal(0.0, scale, length) + 1j * rng.normal(0.0, scale, length)
    return samples


def estimate_autocorrelation(config: CoprimeConfig, lags: Sequence[int]) -> List[LagEstimate]:
    """Average per-cycle sample products at each requested lag.

    Lags divisible by P come from stream-1 self products, lags divisible by Q
    from stream-2 self products, everything else from the Bezout cross pair.
    Truth is analytic: sum_i A_i^2 exp(j 2 pi f_i lag T).
    """
    p, q, k_cycles = config.p, config.q, config.cycles
    t_float = float(config.t)
    x1 = _synthesize_stream(config, p, q * (k_cycles + 1))
    x2 = _synthesize_stream(config, q, p * (k_cycles + 1))
    out = []
    for lag in lags:
        if lag % p == 0 and 0 <= lag < p * q:
            u = lag // p
            est = np.mean(x1[u::q][:k_cycles] * np.conj(x1[0::q][:k_cycles]))
            pair, kind = (u, 0), "self1"
        elif lag % q == 0 and 0 <= lag < p * q:
            u = lag // q
            est = np.mean(x2[u::p][:k_cycles] * np.conj(x2[0::p][:k_cycles]))
            pair, kind = (u, 0), "self2"
        else:
            u, v = bezout_lag_pairs(p, q, lag, k=0)
            est = np.mean(x1[u::q][:k_cycles] * np.conj(x2[v::p][:k_cycles]))
            pair, kind = (u, v), "cross"
        truth = sum(
            amp * amp * np.exp(1j * 2 * np.pi * freq * lag * t_float)
            for amp, freq, _ in config.spec.tones
        )
        est_c = complex(est)
        out.append(
            LagEstimate(lag=int(lag), estimate=est_c, truth=complex(truth), bias=abs(est_c - truth), pair=pair, kind=kind)
        )
    return out


def spectrum_from_lags(
    estimates: Sequence[LagEstimate],
    fft_size: int,
    nyquist_interval: float = 1.0,
) -> List[Tuple[float, float]]:
    """Power spectrum from a contiguous lag window via the DFT of the
    conjugate-extended autocorrelation; frequencies reported in [0, 1/T)."""
    by_lag = {e.lag: e.estimate for e in estimates}
    if not by_lag or 0 not in by_lag:
        raise InsufficientLags("need a contiguous lag window starting at 0")
    max_lag = max(by_lag)
    if max_lag < 1 or any(l not in by_lag for l in range(max_lag + 1)):
        raise InsufficientLags("need a contiguous lag window 0..max_lag with max_lag >= 1")
    if fft_size < 2 * max_lag + 1:
        raise ValueError("fft_size must cover the symmetric lag window")
    buf = np.zeros(fft_size, dtype=complex)
    buf[0] = by_lag[0]
    for l in range(1, max_lag + 1):
        buf[l] = by_lag[l]
        buf[-l] = np.conj(by_lag[l])
    power = np.fft.fft(buf).real
    rate = 1.0 / nyquist_interval
    return [(k * rate / fft_size, float(pw)) for k, pw in enumerate(power)]


def write_lag_csv(estimates: Sequence[LagEstimate], path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("lag,re,im,truth_re,truth_im,bias\n")
        for e in estimates:
            fh.write(
                f"{e.lag},{e.estimate.real!r},{e.estimate.imag!r},"
                f"{e.truth.real!r},{e.truth.imag!r},{e.bias!r}\n"
            )


def write_spectrum_points_csv(points: Sequence[Tuple[float, float]], path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("freq,power\n")
        for f, pw in points:
            fh.write(f"{f!r},{pw!r}\n")
