"""Dynamic-range formulas shared by the encoders and both decoders."""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .numtheory import Number


def complex_folding_bound(parts: Sequence[int], n_sources: int) -> int:
    """Folding-number range for the complex model: product of the first
    ceil(L/N) co-prime parts."""
    if n_sources < 1:
        raise ValueError("n_sources must be >= 1")
    head = math.ceil(len(parts) / n_sources)
    return math.prod(parts[:head])


def complex_dynamic_range(gamma: Number, parts: Sequence[int], n_sources: int) -> Fraction:
    """Value range [0, D) on which complex-model decoding is certified."""
    return Fraction(gamma) * (complex_folding_bound(parts, n_sources) - 1)


def real_folding_bound(parts: Sequence[int], n_sources: int) -> Fraction:
    """Folding-number range for the real model.

    Minimum over every subset U of the first ceil(L/N) parts (including the
    empty set, whose lcm is 1) of (prod(U) + prod(complement)) / 2 - 1.
    Products equal lcms here because the parts are pairwise co-prime.
    """
    if n_sources < 1:
        raise ValueError("n_sources must be >= 1")
    head = list(parts[: math.ceil(len(parts) / n_sources)])
    total = math.prod(head)
    best = None
    for k in range(len(head) + 1):
        for subset in combinations(head, k):
            left = math.prod(subset)
            cand = Fraction(left + total // left, 2) - 1
            if best is None or cand < best:
                best = cand
    return best


def real_dynamic_range(gamma: Number, parts: Sequence[int], n_sources: int) -> Fraction:
    """Value range [0, D) on which real-model decoding is certified."""
    return Fraction(gamma) * real_folding_bound(parts, n_sources)
