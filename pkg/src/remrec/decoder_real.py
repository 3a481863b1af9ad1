"""Robust decoding for real-waveform residue observations.

Each source contributes an unlabeled positive and negative residue copy per
modulus, so a cluster proposal selects one of the 2N entries per modulus.
Clusters are decoded exactly like the complex case (shift candidates on the
gamma circle, spread test, CRT folding recovery) but against the tighter
real-model folding range. The two named unwrapping operations are special
cases of the shift candidates: operation 1 leaves all common residues alone,
operation 2 shifts those at or above gamma/2 down by gamma; at least one of
them lies in the unique passing arrangement whenever one exists.

The folding-range test accepts recovered values q with q < D_q + 1 rather
than q < D_q: when noise wraps a common residue past gamma, the recovered
folding number exceeds the true one by exactly one, and the folding pair
{q, -q} stays uniquely representable for q <= D_q + 1 by the same subset
minimization that defines D_q. Rejecting the boundary value would lose the
only accurate cluster for sources within gamma/4 of the top of the range.

Criterion-passing clusters are pooled, mirror-image estimates are collapsed
to their nonnegative representative, numerically identical estimates are
deduplicated, and finally N pooled estimates are selected that jointly
explain every observed residue within the noise claim plus the certified
error bound. All qualifying selections are returned.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import _ranges
from .decoder_complex import (
    REL_TOL,
    PartsLike,
    _cluster_options,
    _parts_of,
    circular_distance,
)
from .errors import InsufficientDistinctClusters, NoFeasibleProposal
from .numtheory import CrtBasis, Number, rational_lcm, real_mod
from .remainder_model import ModulusSet, ResidueObservation

OP1 = "op1"
OP2 = "op2"


@dataclass(frozen=True)
class RealDecodeSolution:
    """N consistent estimates plus the clusters that produced them."""

    estimates: Tuple[float, ...]
    folding_numbers: Tuple[int, ...]
    operations: Tuple[str, ...]
    proposal: Tuple[Tuple[int, ...], ...]
    taus: Tuple[Tuple[int, ...], ...]
    certified_bound: float

    def to_dict(self) -> dict:
        return {
            "estimates": list(self.estimates),
            "folding_numbers": list(self.folding_numbers),
            "operations": list(self.operations),
            "clusters": [list(c) for c in self.proposal],
            "taus": [list(t) for t in self.taus],
            "certified_bound": self.certified_bound,
        }


def real_folding_range(moduli: PartsLike, n_sources: int) -> Fraction:
    """Real-model folding bound D_q, exact rational.

    Minimum over subsets U of the first ceil(L/N) parts of
    (prod(U) + prod(complement)) / 2 - 1, with prod(empty) = 1.
    """
    return _ranges.real_folding_bound(_parts_of(moduli), n_sources)


def real_dynamic_range(moduli: ModulusSet, n_sources: int) -> Fraction:
    """Value bound D = D_q * gamma, exact."""
    return _ranges.real_dynamic_range(moduli.gamma, moduli.coprime_parts, n_sources)


def max_dynamic_range_noiseless(moduli: Sequence[Number]) -> Fraction:
    """Largest D such that every X in [0, D) has a unique noiseless +- residue
    set representation: min over subsets U of (lcm(U) + lcm(rest)) / 2."""
    return max_dynamic_range_witness(moduli)[0]


def max_dynamic_range_witness(moduli: Sequence[Number]) -> Tuple[Fraction, Fraction, Tuple[Number, ...]]:
    """As max_dynamic_range_noiseless, plus the colliding partner value
    |lcm(U) - lcm(rest)| / 2 and the minimizing subset U."""
    mods = list(moduli)
    if not mods:
        raise ValueError("empty modulus list")
    best: Optional[Tuple[Fraction, Fraction, Tuple[Number, ...]]] = None
    for k in range(len(mods) + 1):
        for subset in itertools.combinations(range(len(mods)), k):
            chosen = [mods[i] for i in subset]
            rest = [mods[i] for i in range(len(mods)) if i not in subset]
            left = rational_lcm(chosen) if chosen else Fraction(1)
            right = rational_lcm(rest) if rest else Fraction(1)
            d = Fraction(left + right, 2)
            if best is None or d < best[0]:
                best = (d, abs(left - right) / 2, tuple(chosen))
    return best


def apply_operation(common_residues: Sequence[float], gamma: float, choice: str) -> List[float]:
    """Operation 1 is the identity; operation 2 shifts residues at or above
    gamma/2 down by gamma."""
    if choice == OP1:
        return list(common_residues)
    if choice == OP2:
        return [r if r < gamma / 2 else r - gamma for r in common_residues]
    raise ValueError(f"unknown operation {choice!r}")


def real_separation_condition(residue_pairs: Sequence[Tuple[float, float]], moduli: ModulusSet) -> bool:
    """True iff the positive and negative residues keep a circular distance
    above gamma on every ring; certifies the gamma/4 error bound."""
    gamma = moduli.gamma_float
    for (r_plus, r_minus), part in zip(residue_pairs, moduli.coprime_parts):
        if circular_distance(r_plus, r_minus, part * gamma) <= gamma:
            return False
    return True


def degenerate_common_residue(value: float, gamma: float, tol: float = 0.0) -> bool:
    """Common residue at 0 or gamma/2, where +- copies coincide."""
    r = real_mod(value, gamma)
    return min(abs(r), abs(r - gamma / 2), abs(r - gamma)) <= tol


# ---------------------------------------------------------------------------
# Shared decoding core
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _Record:
    estimate: float        # canonical nonnegative representative
    q: int
    selection: Tuple[int, ...]
    taus: Tuple[int, ...]
    operation: str
    mirrored: bool         # True when the raw estimate was negative


def _operation_label(taus: Sequence[int], commons: Sequence[float], gamma: float) -> str:
    if not any(taus):
        return OP1
    threshold = tuple(1 if c >= gamma / 2 else 0 for c in commons)
    return OP2 if tuple(taus) == threshold else "cut"


def _pool_records(obs: ResidueObservation, ms: ModulusSet, d_q: Fraction) -> List[_Record]:
    gamma = ms.gamma_float
    n_moduli = ms.count
    basis = CrtBasis(ms.coprime_parts)
    slots = len(obs.residues[0])
    records: Dict[tuple, _Record] = {}
    for selection in itertools.product(range(slots), repeat=n_moduli):
        residues = [obs.residues[l][selection[l]] for l in range(n_moduli)]
        commons = [real_mod(r, gamma) for r in residues]
        for q, estimate, taus in _cluster_options(residues, gamma, basis, math.inf):
            # recovered q may exceed the true folding number by one; the
            # folding pair stays unique up to and including d_q (see module
            # docstring), so the range test runs against d_q + 1
            if not Fraction(q) < d_q + 1:
                continue
            mirrored = estimate < -REL_TOL * gamma
            canonical = -estimate if mirrored else estimate
            key = (round(canonical, 9),)
            best = records.get(key)
            if best is None or q < best.q:
                records[key] = _Record(
                    estimate=canonical,
                    q=q,
                    selection=selection,
                    taus=taus,
                    operation=_operation_label(taus, commons, gamma),
                    mirrored=mirrored,
                )
    return sorted(records.values(), key=lambda r: (r.estimate, r.q))




def _explains(estimates: Sequence[float], obs: ResidueObservation, ms: ModulusSet, tol: float) -> bool:
    """Every observed residue is matched one-to-one to a predicted +-X residue
    within tol of circular distance, on every modulus."""
    gamma = ms.gamma_float
    for l, m in enumerate(ms.moduli):
        circumference = float(m)
        predicted = []
        for e in estimates:
            predicted.append(real_mod(e, circumference))
            predicted.append(real_mod(-e, circumference))
        observed = obs.residues[l]
        if not _bipartite_match(observed, predicted, circumference, tol):
            return False
    return True


def _bipartite_match(observed: Sequence[float], predicted: List[float], circumference: float, tol: float) -> bool:
    n = len(observed)
    used = [False] * n

    def assign(i: int) -> bool:
        if i == n:
            return True
        for j in range(n):
            if not used[j] and circular_distance(observed[i], predicted[j], circumference) < tol:
                used[j] = True
                if assign(i + 1):
                    return True
                used[j] = False
        return False

    return assign(0)


def _decode_real(obs: ResidueObservation, ms: ModulusSet, n: int) -> List[RealDecodeSolution]:
    gamma = ms.gamma_float
    if any(len(entries) != 2 * n for entries in obs.residues):
        raise ValueError("observation multiset sizes do not match 2 * n_sources")
    if obs.noise_bound > gamma / 4 * (1 + REL_TOL):
        raise ValueError(f"claimed noise bound {obs.noise_bound} exceeds gamma/4 = {gamma / 4}")
    d_q = real_folding_range(ms, n)
    records = _pool_records(obs, ms, d_q)
    if not records:
        raise NoFeasibleProposal("no residue selection passes both criteria")
    reps = records  # already deduplicated by canonical estimate
    if len(reps) < n:
        raise InsufficientDistinctClusters(
            f"only {len(reps)} distinct estimates survive, {n} sources requested"
        )
    tol = obs.noise_bound + 0.75 * gamma + REL_TOL * gamma
    solutions: Dict[tuple, RealDecodeSolution] = {}
    for combo in itertools.combinations(reps, n):
        ordered = sorted(combo, key=lambda r: r.estimate)
        key = tuple(round(r.estimate, 9) for r in ordered)
        if key in solutions:
            continue
        if not _explains([r.estimate for r in ordered], obs, ms, tol):
            continue
        solutions[key] = RealDecodeSolution(
            estimates=tuple(r.estimate for r in ordered),
            folding_numbers=tuple(r.q for r in ordered),
            operations=tuple(r.operation for r in ordered),
            proposal=tuple(r.selection for r in ordered),
            taus=tuple(r.taus for r in ordered),
            certified_bound=0.75 * gamma,
        )
    if not solutions:
        raise InsufficientDistinctClusters(
            "surviving estimates cannot jointly explain the observation"
        )
    return sorted(solutions.values(), key=lambda s: s.estimates)


def decode_real_single(obs: ResidueObservation, moduli: Optional[ModulusSet] = None) -> List[RealDecodeSolution]:
    """Single-source real decoding (the N = 1 case of the shared core)."""
    ms = moduli if moduli is not None else obs.modulus_set
    return _decode_real(obs, ms, 1)


def decode_real_multi(
    obs: ResidueObservation,
    moduli: Optional[ModulusSet] = None,
    n_sources: Optional[int] = None,
) -> List[RealDecodeSolution]:
    """Multi-source real decoding via pooled cluster enumeration."""
    ms = moduli if moduli is not None else obs.modulus_set
    n = n_sources if n_sources is not None else obs.n_sources
    return _decode_real(obs, ms, n)
