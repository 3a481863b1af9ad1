"""Pre-deployment analysis: rate-selection bounds, brute-force uniqueness
checks, and linear-array representability.

These tools answer design questions before any decoding happens: how much
residue noise a modulus set tolerates, over what range the encoding is
injective, and whether a sensor layout can represent every arrival angle
without ambiguity.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import _ranges
from .decoder_real import max_dynamic_range_witness
from .errors import BudgetExceeded, TooManyModuli
from .numtheory import CrtBasis, Number, rational_lcm, real_mod
from .remainder_model import COMPLEX, ModulusSet

_SUBSET_LIMIT = 24


@dataclass(frozen=True)
class ArrayGeometry:
    """Linear array: wavelength and ascending sensor positions, first at 0.

    Positions must be exact rationals (int, Fraction, or "p/q" strings);
    floats are rejected because the generalized lcm is only meaningful when
    the ratios wavelength/position are exactly representable.
    """

    wavelength: Fraction
    positions: Tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "wavelength", _exact(self.wavelength, "wavelength"))
        object.__setattr__(self, "positions", tuple(_exact(p, "position") for p in self.positions))
        if self.wavelength <= 0:
            raise ValueError("wavelength must be positive")
        if len(self.positions) < 2:
            raise ValueError("need at least 2 sensors")
        if self.positions[0] != 0:
            raise ValueError("first sensor position must be 0")
        for a, b in zip(self.positions, self.positions[1:]):
            if b <= a:
                raise ValueError("positions must be strictly ascending")

    @property
    def ratio_moduli(self) -> Tuple[Fraction, ...]:
        """wavelength / p_l for every off-origin sensor."""
        return tuple(self.wavelength / p for p in self.positions[1:])


def _exact(value, what: str) -> Fraction:
    if isinstance(value, float):
        raise ValueError(f"{what} must be an exact rational (int, Fraction, or 'p/q' string), not a float")
    return Fraction(value)


@dataclass(frozen=True)
class RateSelectionReport:
    moduli: Tuple[float, ...]
    delta_upper_bound: float
    witness_subset: Tuple[float, ...]
    complex_ranges: Dict[int, float]
    real_ranges: Dict[int, float]
    real_noiseless_max: float
    real_collision_partner: float

    def to_dict(self) -> dict:
        return {
            "moduli": list(self.moduli),
            "delta_upper_bound": self.delta_upper_bound,
            "witness_subset": list(self.witness_subset),
            "complex_dynamic_ranges": {str(k): v for k, v in self.complex_ranges.items()},
            "real_dynamic_ranges": {str(k): v for k, v in self.real_ranges.items()},
            "real_noiseless_max_range": self.real_noiseless_max,
            "real_collision_partner": self.real_collision_partner,
        }


def delta_upper_bound(moduli: Sequence[int]) -> Tuple[int, Tuple[int, ...]]:
    """Noise ceiling for full-lcm range operation: the minimum over nonempty
    proper subsets S of gcd(lcm(S), lcm(complement)), with a minimizing S."""
    mods = [int(m) for m in moduli]
    if len(mods) < 2:
        raise ValueError("need at least two moduli")
    if len(mods) > _SUBSET_LIMIT:
        raise TooManyModuli(f"exhaustive search capped at {_SUBSET_LIMIT} moduli")
    if any(m < 1 for m in mods):
        raise ValueError("moduli must be positive")
    best: Optional[int] = None
    witness: Tuple[int, ...] = ()

    # The first modulus stays in S, which covers every unordered partition.
    def explore(i: int, s_lcm: int, s_members: Tuple[int, ...], t_lcm: int, t_any: bool):
        nonlocal best, witness
        if i == len(mods):
            if not t_any:
                return
            cand = math.gcd(s_lcm, t_lcm)
            if best is None or cand < best:
                best = cand
                witness = s_members
            return
        m = mods[i]
        explore(i + 1, s_lcm, s_members, math.lcm(t_lcm, m), True)
        explore(i + 1, math.lcm(s_lcm, m), s_members + (m,), t_lcm, t_any)

    explore(1, mods[0], (mods[0],), 1, False)
    return best, witness


def _residue_key(values: Sequence[Fraction], moduli: Sequence[Fraction], model: str) -> tuple:
    key = []
    for m in moduli:
        if model == COMPLEX:
            entries = sorted(real_mod(v, m) for v in values)
        else:
            entries = sorted(
                itertools.chain((real_mod(v, m) for v in values), (real_mod(-v, m) for v in values))
            )
        key.append(tuple(entries))
    return tuple(key)


def check_unique_encoding(
    moduli: ModulusSet,
    dynamic_range: Number,
    n_sources: int,
    model: str = COMPLEX,
    grid_step: Number = 1,
    budget: int = 5_000_000,
) -> Tuple[bool, Optional[tuple]]:
    """Brute-force bijectivity scan over source tuples on an exact grid.

    Returns (True, None) when no two distinct tuples share an encoding, else
    (False, (first_tuple, second_tuple)). Scalars are returned for N = 1.
    Comparison is exact rational equality; this is a combinatorial check,
    not a noise test.
    """
    step = Fraction(grid_step)
    bound = Fraction(dynamic_range)
    if step <= 0 or bound <= 0:
        raise ValueError("grid_step and dynamic_range must be positive")
    points = [k * step for k in range(math.ceil(bound / step)) if k * step < bound]
    mods = [Fraction(moduli.gamma) * m for m in moduli.coprime_parts]
    if n_sources == 1:
        tuples = ((p,) for p in points)
        count = len(points)
    else:
        tuples = itertools.combinations(points, n_sources)
        count = math.comb(len(points), n_sources)
    if count * len(mods) > budget:
        raise BudgetExceeded(f"{count} grid tuples x {len(mods)} moduli exceeds budget {budget}")
    seen: Dict[tuple, tuple] = {}
    for values in tuples:
        key = _residue_key(values, mods, model)
        if key in seen:
            first, second = seen[key], values
            if n_sources == 1:
                return False, (first[0], second[0])
            return False, (first, second)
        seen[key] = values
    return True, None


def doa_representable(geometry: ArrayGeometry) -> Tuple[Fraction, bool]:
    """Generalized lcm C of the ratios wavelength/p_l; angles are uniquely
    representable iff C >= 2 (sin(theta) spans a length-2 domain)."""
    c = rational_lcm(geometry.ratio_moduli)
    return c, c >= 2


def doa_ambiguity_search(
    geometry: ArrayGeometry, grid: int = 2048
) -> Optional[Tuple[Fraction, Fraction]]:
    """Brute-force scan of sin(theta) in [-1, 1) for two distinct values that
    are congruent modulo every wavelength/p_l ratio.

    The step starts at 2/grid and is refined to divide the generalized lcm
    exactly, so a rational collision witness is always on the grid when one
    exists. Returns a witness pair or None.
    """
    if grid < 1000:
        raise ValueError("grid must provide at least 1000 points")
    step = Fraction(2, grid)
    c = rational_lcm(geometry.ratio_moduli)
    refined = c / math.ceil(c / step)
    seen: Dict[tuple, Fraction] = {}
    x = Fraction(-1)
    while x < 1:
        key = tuple(real_mod(x, m) for m in geometry.ratio_moduli)
        if key in seen:
            return seen[key], x
        seen[key] = x
        x += refined
    return None


def ordered_crt_decode(residue_lists: Sequence[Sequence[float]], moduli: ModulusSet) -> List[float]:
    """Per-source CRT reconstruction when the correspondence is already known.

    ``residue_lists[i][l]`` is source i's exact residue at modulus l. Valid
    for sources below lcm of the moduli.
    """
    gamma = moduli.gamma_float
    basis = CrtBasis(moduli.coprime_parts)
    out = []
    for residues in residue_lists:
        commons = [real_mod(r, gamma) for r in residues]
        if max(commons) - min(commons) > 1e-9 * gamma:
            raise ValueError("labeled residues disagree on the common residue; inputs are noisy or mislabeled")
        ks = [round((r - c) / gamma) for r, c in zip(residues, commons)]
        q = basis.solve(ks)
        out.append(q * gamma + sum(commons) / len(commons))
    return out


def build_rate_report(moduli: ModulusSet, n_max: int = 2) -> RateSelectionReport:
    mods = [float(m) for m in moduli.moduli]
    int_mods = [int(round(m)) for m in mods]
    if any(abs(m - im) > 1e-9 for m, im in zip(mods, int_mods)):
        raise ValueError("rate report requires integer moduli")
    bound, witness = delta_upper_bound(int_mods)
    complex_ranges = {
        n: float(_ranges.complex_dynamic_range(moduli.gamma, moduli.coprime_parts, n))
        for n in range(1, n_max + 1)
    }
    real_ranges = {
        n: float(_ranges.real_dynamic_range(moduli.gamma, moduli.coprime_parts, n))
        for n in range(1, n_max + 1)
    }
    d, partner, _ = max_dynamic_range_witness(int_mods)
    return RateSelectionReport(
        moduli=tuple(mods),
        delta_upper_bound=float(bound),
        witness_subset=tuple(float(w) for w in witness),
        complex_ranges=complex_ranges,
        real_ranges=real_ranges,
        real_noiseless_max=float(d),
        real_collision_partner=float(partner),
    )
