"""Shared data model: modulus sets, sources, noise, and residue encoders.

A modulus set consists of sampling rates ``m_l = gamma * M_l`` that share the
factor gamma and have pairwise co-prime parts ``M_l``. Encoding a source set
produces, per modulus, an unordered multiset of noisy residues: one residue
per source in the complex model, a positive and a negative copy per source in
the real model.
"""

from __future__ import annotations

import json
import math
import warnings
import zlib
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Tuple

import numpy as np

from . import _ranges
from .errors import DynamicRangeWarning, NoiseBoundExceeded
from .numtheory import Number, real_mod

COMPLEX = "complex"
REAL = "real"


def substream(seed: int, name: str) -> np.random.Generator:
    """Named random sub-stream so one run seed reproduces every stage."""
    key = zlib.crc32(name.encode("utf-8"))
    return np.random.default_rng(np.random.SeedSequence(entropy=int(seed), spawn_key=(key,)))


@dataclass(frozen=True)
class ModulusSet:
    """Sampling rates gamma * M_l with pairwise co-prime, ascending M_l."""

    gamma: Number
    coprime_parts: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coprime_parts", tuple(int(m) for m in self.coprime_parts))
        parts = self.coprime_parts
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")
        if len(parts) < 2:
            raise ValueError("a modulus set needs at least two moduli")
        for i, m in enumerate(parts):
            if m < 1:
                raise ValueError(f"co-prime part {m} is not positive")
            if i and parts[i - 1] >= m:
                raise ValueError("co-prime parts must be strictly ascending")
            for m2 in parts[i + 1:]:
                if math.gcd(m, m2) != 1:
                    raise ValueError(f"parts {m} and {m2} are not co-prime")

    @property
    def count(self) -> int:
        return len(self.coprime_parts)

    @property
    def moduli(self) -> Tuple[Number, ...]:
        return tuple(self.gamma * m for m in self.coprime_parts)

    @property
    def gamma_float(self) -> float:
        return float(self.gamma)


@dataclass(frozen=True)
class SourceSet:
    """The unknown nonnegative values to be encoded (frequencies)."""

    values: Tuple[float, ...]
    model: str = COMPLEX

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        if self.model not in (COMPLEX, REAL):
            raise ValueError(f"unknown model {self.model!r}")
        if len(set(self.values)) != len(self.values):
            raise ValueError("source values must be pairwise distinct")
        if any(v < 0 for v in self.values):
            raise ValueError("source values must be nonnegative")

    @property
    def count(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class NoiseSpec:
    """Residue-domain noise: none, uniform(-delta, delta), or a fixed matrix.

    ``values`` for the fixed kind has one row per residue entry: N rows for
    the complex model, 2N rows for the real model (positive copies first).
    """

    kind: str = "none"
    delta: float = 0.0
    seed: int = 0
    values: Optional[Tuple[Tuple[float, ...], ...]] = None

    def __post_init__(self):
        if self.kind not in ("none", "uniform", "fixed"):
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if self.values is not None:
            object.__setattr__(self, "values", tuple(tuple(float(v) for v in row) for row in self.values))

    def matrix(self, rows: int, cols: int) -> np.ndarray:
        if self.kind == "none":
            return np.zeros((rows, cols))
        if self.kind == "fixed":
            mat = np.asarray(self.values, dtype=float)
            if mat.shape != (rows, cols):
                raise ValueError(f"fixed noise must have shape {(rows, cols)}, got {mat.shape}")
            if np.any(np.abs(mat) >= self.delta):
                raise NoiseBoundExceeded(f"fixed noise magnitude reaches the claimed bound {self.delta}")
            return mat
        rng = substream(self.seed, "noise")
        mat = rng.uniform(-self.delta, self.delta, size=(rows, cols))
        # uniform() can return the closed lower endpoint; the bound is strict
        while np.any(np.abs(mat) >= self.delta):
            bad = np.abs(mat) >= self.delta
            mat[bad] = rng.uniform(-self.delta, self.delta, size=int(bad.sum()))
        return mat


@dataclass(frozen=True)
class ResidueObservation:
    """Per-modulus unordered residue multisets, stored sorted ascending.

    ``source_labels`` aligns with ``residues`` and records which source each
    entry came from; it is diagnostic only and never serialized.
    """

    modulus_set: ModulusSet
    model: str
    n_sources: int
    noise_bound: float
    residues: Tuple[Tuple[float, ...], ...]
    source_labels: Optional[Tuple[Tuple[int, ...], ...]] = field(default=None, compare=False)

    def __post_init__(self):
        expected = self.n_sources if self.model == COMPLEX else 2 * self.n_sources
        for l, entries in enumerate(self.residues):
            if len(entries) != expected:
                raise ValueError(f"modulus {l} holds {len(entries)} residues, expected {expected}")


def common_residue(residue: Number, gamma: Number) -> Number:
    """Residue reduced once more by the shared factor: <residue>_gamma."""
    return real_mod(residue, gamma)


def _encode(sources: SourceSet, moduli: ModulusSet, noise: NoiseSpec, signs: Sequence[int]) -> ResidueObservation:
    n = sources.count
    rows = n * len(signs)
    cols = moduli.count
    delta = noise.matrix(rows, cols)
    _warn_if_out_of_range(sources, moduli)
    residues = []
    labels = []
    for l, m in enumerate(moduli.moduli):
        entries = []
        for row in range(rows):
            i = row % n
            sign = signs[row // n]
            entries.append((real_mod(sign * sources.values[i] + delta[row][l], float(m)), i))
        entries.sort()
        residues.append(tuple(v for v, _ in entries))
        labels.append(tuple(i for _, i in entries))
    return ResidueObservation(
        modulus_set=moduli,
        model=sources.model,
        n_sources=n,
        noise_bound=float(noise.delta),
        residues=tuple(residues),
        source_labels=tuple(labels),
    )


def _warn_if_out_of_range(sources: SourceSet, moduli: ModulusSet) -> None:
    n = sources.count
    if sources.model == COMPLEX:
        bound = _ranges.complex_dynamic_range(moduli.gamma, moduli.coprime_parts, n)
    else:
        bound = _ranges.real_dynamic_range(moduli.gamma, moduli.coprime_parts, n)
    top = max(sources.values)
    if top >= bound:
        warnings.warn(
            f"source value {top} is outside the dynamic range [0, {float(bound)}) "
            f"for this modulus set; decoding may be ambiguous",
            DynamicRangeWarning,
        )


def encode_complex(sources: SourceSet, moduli: ModulusSet, noise: NoiseSpec) -> ResidueObservation:
    """Residue multisets {<X_i + noise>_{m_l}} for the complex model."""
    if sources.model != COMPLEX:
        raise ValueError("encode_complex requires a complex-model source set")
    return _encode(sources, moduli, noise, signs=(1,))


def encode_real(sources: SourceSet, moduli: ModulusSet, noise: NoiseSpec) -> ResidueObservation:
    """Residue multisets with unlabeled positive and negative copies per source."""
    if sources.model != REAL:
        raise ValueError("encode_real requires a real-model source set")
    return _encode(sources, moduli, noise, signs=(1, -1))


# ---------------------------------------------------------------------------
# JSON problem / observation formats
# ---------------------------------------------------------------------------

def _gamma_to_json(gamma: Number):
    if isinstance(gamma, Fraction):
        if gamma.denominator == 1:
            return int(gamma)
        return f"{gamma.numerator}/{gamma.denominator}"
    return gamma


def _gamma_from_json(value) -> Number:
    if isinstance(value, str):
        return Fraction(value)
    return value


def problem_to_dict(sources: SourceSet, moduli: ModulusSet, noise: NoiseSpec) -> dict:
    out = {
        "gamma": _gamma_to_json(moduli.gamma),
        "coprime_parts": list(moduli.coprime_parts),
        "model": sources.model,
        "sources": list(sources.values),
        "noise": {"type": noise.kind, "delta": noise.delta, "seed": noise.seed},
    }
    if noise.values is not None:
        out["noise"]["values"] = [list(row) for row in noise.values]
    return out


def problem_from_dict(data: dict) -> Tuple[SourceSet, ModulusSet, NoiseSpec]:
    moduli = ModulusSet(_gamma_from_json(data["gamma"]), tuple(data["coprime_parts"]))
    sources = SourceSet(tuple(float(v) for v in data["sources"]), data["model"])
    nd = data.get("noise", {"type": "none", "delta": 0.0, "seed": 0})
    noise = NoiseSpec(
        kind=nd.get("type", "none"),
        delta=float(nd.get("delta", 0.0)),
        seed=int(nd.get("seed", 0)),
        values=tuple(tuple(row) for row in nd["values"]) if "values" in nd else None,
    )
    return sources, moduli, noise


def observation_to_dict(obs: ResidueObservation, shuffle_seed: Optional[int] = None) -> dict:
    """Export an observation; a seed scrambles each multiset to honor the
    unordered contract without losing reproducibility."""
    residues = [list(entries) for entries in obs.residues]
    if shuffle_seed is not None:
        rng = substream(shuffle_seed, "shuffle")
        for entries in residues:
            rng.shuffle(entries)
    return {
        "gamma": _gamma_to_json(obs.modulus_set.gamma),
        "coprime_parts": list(obs.modulus_set.coprime_parts),
        "model": obs.model,
        "n_sources": obs.n_sources,
        "noise_bound": obs.noise_bound,
        "residues": residues,
    }


def observation_from_dict(data: dict) -> ResidueObservation:
    moduli = ModulusSet(_gamma_from_json(data["gamma"]), tuple(data["coprime_parts"]))
    return ResidueObservation(
        modulus_set=moduli,
        model=data["model"],
        n_sources=int(data["n_sources"]),
        noise_bound=float(data["noise_bound"]),
        residues=tuple(tuple(sorted(float(v) for v in entries)) for entries in data["residues"]),
    )


def load_observation(path: str) -> ResidueObservation:
    with open(path, "r", encoding="utf-8") as fh:
        return observation_from_dict(json.load(fh))
