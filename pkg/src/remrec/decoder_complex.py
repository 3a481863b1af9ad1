"""Robust multi-source decoding of complex-waveform residue observations.

The observation gives, per modulus, an unordered multiset of noisy residues.
Decoding proceeds hypothesis-then-test:

1. Propose a correspondence: per modulus, assign each residue entry to one of
   the N clusters. Cluster labels are symmetric, so the first modulus keeps
   the identity assignment and only the remaining L-1 moduli are permuted.
2. Per cluster, unwrap the common residues (residues reduced mod gamma) with
   binary shifts tau in {0, 1}: shifted value = common - tau * gamma. Only
   assignments whose tau=1 set is an upper set of the sorted common residues
   can keep all pairwise gaps below gamma/2, so candidates are the at most
   L+1 cyclic cuts of the sorted order; this is equivalent to enumerating all
   2^L vectors and testing each (the oracle tests verify the equivalence).
3. Test 1 (spread): all pairwise differences of shifted common residues stay
   strictly below gamma/2.
4. Recover the folding number q by CRT over the co-prime parts from
   (residue - shifted common) / gamma.
5. Test 2 (range): q must lie in [0, D_q) with D_q the product of the first
   ceil(L/N) parts.

Every proposal passing both tests for all clusters is a survivor; all
survivors are returned in canonical order. The guarantee is existential: for
in-range sources and noise below gamma/4, some survivor matches the truth
within 3*gamma/4 per element.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

from . import _ranges
from .errors import ModulusTooSmall, NoFeasibleProposal, NonIntegralFolding
from .numtheory import CrtBasis, real_mod
from .remainder_model import ModulusSet, ResidueObservation

# Strict inequalities shrink inward by this relative tolerance so float
# noise cannot flip a boundary case back and forth.
REL_TOL = 1e-9

# Rounding slack when converting (residue - shifted common) / gamma to an
# integer folding residue; anything larger indicates malformed input.
FOLD_TOL = 1e-6

PartsLike = Union[ModulusSet, Sequence[int]]


def _parts_of(moduli: PartsLike) -> Tuple[int, ...]:
    if isinstance(moduli, ModulusSet):
        return moduli.coprime_parts
    return tuple(int(m) for m in moduli)


@dataclass(frozen=True)
class DecodeSolution:
    """One surviving proposal.

    ``proposal[i][l]`` is the index (into the sorted residue multiset of
    modulus l) of the entry assigned to cluster i; ``taus`` aligns with it.
    Clusters are ordered by (folding number, estimate).
    """

    estimates: Tuple[float, ...]
    folding_numbers: Tuple[int, ...]
    proposal: Tuple[Tuple[int, ...], ...]
    taus: Tuple[Tuple[int, ...], ...]
    certified_bound: float

    def to_dict(self) -> dict:
        return {
            "estimates": list(self.estimates),
            "folding_numbers": list(self.folding_numbers),
            "clusters": [list(c) for c in self.proposal],
            "taus": [list(t) for t in self.taus],
            "certified_bound": self.certified_bound,
        }


def folding_range(moduli: PartsLike, n_sources: int) -> int:
    """Folding-number bound D_q: product of the first ceil(L/N) co-prime parts."""
    return _ranges.complex_folding_bound(_parts_of(moduli), n_sources)


def complex_dynamic_range(moduli: ModulusSet, n_sources: int):
    """Value bound D = gamma * (D_q - 1), exact."""
    return _ranges.complex_dynamic_range(moduli.gamma, moduli.coprime_parts, n_sources)


def first_criterion(shifted_common_residues: Sequence[float], gamma: float) -> bool:
    """True iff the spread of the shifted common residues is below gamma/2."""
    if len(shifted_common_residues) <= 1:
        return True
    spread = max(shifted_common_residues) - min(shifted_common_residues)
    return spread < gamma / 2 - REL_TOL * gamma


def enumerate_tau(common_residues: Sequence[float], gamma: float) -> List[Tuple[int, ...]]:
    """Candidate tau vectors: the cyclic cuts of the sorted common residues.

    Every vector whose shifted residues can satisfy the spread criterion is a
    cut (shifting a smaller residue but not a larger one forces a gap of at
    least gamma), so filtering these candidates loses nothing.
    """
    n = len(common_residues)
    order = sorted(range(n), key=lambda i: (common_residues[i], i))
    seen = set()
    out: List[Tuple[int, ...]] = []
    for keep in range(n, -1, -1):  # number of unshifted low entries
        taus = [0] * n
        for pos in order[keep:]:
            taus[pos] = 1
        vec = tuple(taus)
        if vec not in seen:
            seen.add(vec)
            out.append(vec)
    return out


def _folding_residues(residues: Sequence[float], shifted: Sequence[float], gamma: float) -> List[int]:
    ks = []
    for r, s in zip(residues, shifted):
        raw = (r - s) / gamma
        k = round(raw)
        if abs(raw - k) > FOLD_TOL:
            raise NonIntegralFolding(f"({r} - {s}) / {gamma} = {raw} is not integral")
        ks.append(k)
    return ks


def recover_folding(cluster_residues: Sequence[float], taus: Sequence[int], moduli: ModulusSet) -> int:
    """CRT the folding residues (residue - shifted common) / gamma over the parts.

    The result is not range-checked here; callers apply the folding-range test.
    """
    gamma = moduli.gamma_float
    shifted = [real_mod(r, gamma) - t * gamma for r, t in zip(cluster_residues, taus)]
    ks = _folding_residues(cluster_residues, shifted, gamma)
    basis = CrtBasis(moduli.coprime_parts)
    return basis.solve(ks)


def _cluster_options(
    residues: Sequence[float], gamma: float, basis: CrtBasis, d_q: int
) -> List[Tuple[int, float, Tuple[int, ...]]]:
    """All (q, estimate, taus) for one cluster passing both criteria."""
    commons = [real_mod(r, gamma) for r in residues]
    count = len(residues)
    options = []
    for taus in enumerate_tau(commons, gamma):
        shifted = [c - t * gamma for c, t in zip(commons, taus)]
        if not first_criterion(shifted, gamma):
            continue
        q = basis.solve(_folding_residues(residues, shifted, gamma))
        if 0 <= q < d_q:
            estimate = q * gamma + sum(shifted) / count
            options.append((q, estimate, taus))
    return options


def _assignments(n_sources: int, n_moduli: int):
    """Per-modulus bijections with the first modulus pinned to the identity."""
    identity = tuple(range(n_sources))
    for rest in itertools.product(itertools.permutations(range(n_sources)), repeat=n_moduli - 1):
        yield (identity,) + rest


def decode_complex(
    obs: ResidueObservation,
    moduli: Optional[ModulusSet] = None,
    n_sources: Optional[int] = None,
) -> List[DecodeSolution]:
    """Return every proposal passing both criteria, canonically ordered.

    Raises NoFeasibleProposal when nothing passes, which signals noise beyond
    the bound or out-of-range sources. Multiple survivors are not an error.
    """
    ms = moduli if moduli is not None else obs.modulus_set
    n = n_sources if n_sources is not None else obs.n_sources
    gamma = ms.gamma_float
    n_moduli = ms.count
    if any(len(entries) != n for entries in obs.residues):
        raise ValueError("observation multiset sizes do not match n_sources")
    if obs.noise_bound > gamma / 4 * (1 + REL_TOL):
        raise ValueError(f"claimed noise bound {obs.noise_bound} exceeds gamma/4 = {gamma / 4}")

    basis = CrtBasis(ms.coprime_parts)
    d_q = folding_range(ms, n)
    option_cache: Dict[Tuple[int, ...], list] = {}

    def options_for(idx: Tuple[int, ...]):
        if idx not in option_cache:
            residues = [obs.residues[l][idx[l]] for l in range(n_moduli)]
            option_cache[idx] = _cluster_options(residues, gamma, basis, d_q)
        return option_cache[idx]

    survivors: Dict[tuple, DecodeSolution] = {}
    for assignment in _assignments(n, n_moduli):
        per_cluster = []
        feasible = True
        for i in range(n):
            idx = tuple(assignment[l][i] for l in range(n_moduli))
            opts = options_for(idx)
            if not opts:
                feasible = False
                break
            per_cluster.append((idx, opts))
        if not feasible:
            continue
        for combo in itertools.product(*(opts for _, opts in per_cluster)):
            key = tuple(sorted((q, est) for q, est, _ in combo))
            if key in survivors:
                continue
            clusters = sorted(
                zip(combo, (idx for idx, _ in per_cluster)),
                key=lambda item: (item[0][0], item[0][1]),
            )
            survivors[key] = DecodeSolution(
                estimates=tuple(opt[1] for opt, _ in clusters),
                folding_numbers=tuple(opt[0] for opt, _ in clusters),
                proposal=tuple(idx for _, idx in clusters),
                taus=tuple(opt[2] for opt, _ in clusters),
                certified_bound=0.75 * gamma,
            )
    if not survivors:
        raise NoFeasibleProposal("no clustering/shift proposal passes both criteria")
    return sorted(survivors.values(), key=lambda s: (s.folding_numbers, s.estimates))


def circular_distance(a: float, b: float, circumference: float) -> float:
    """min over d in {0, +-1} of |a - b + d * circumference|."""
    diff = a - b
    return min(abs(diff), abs(diff + circumference), abs(diff - circumference))


def separation_condition(residues_by_modulus: Sequence[Sequence[float]], moduli: ModulusSet) -> bool:
    """True iff every pair of distinct-source residues keeps a circular
    distance above 3*gamma on every modulus ring.

    ``residues_by_modulus[l][i]`` is source i's exact residue at modulus l.
    Analysis-side check: it needs true residues, not noisy observations.
    """
    gamma = moduli.gamma_float
    for l, ring_part in enumerate(moduli.coprime_parts):
        circumference = ring_part * gamma
        entries = residues_by_modulus[l]
        for i, j in itertools.combinations(range(len(entries)), 2):
            if circular_distance(entries[i], entries[j], circumference) <= 3 * gamma:
                return False
    return True


def separation_probability(moduli: PartsLike) -> float:
    """prod (M_l - 6) / M_l: chance a uniform residue pair is separated."""
    parts = _parts_of(moduli)
    prob = 1.0
    for m in parts:
        if m <= 6:
            raise ModulusTooSmall(f"co-prime part {m} <= 6 cannot satisfy the separation condition")
        prob *= (m - 6) / m
    return prob
