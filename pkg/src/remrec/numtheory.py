"""Exact integer and rational arithmetic: gcd/lcm, CRT, real-valued modulo.

Everything here is exact. Folding-number arithmetic elsewhere depends on
these primitives being bit-exact, so floats are only ever accepted by
``real_mod`` (residue values are allowed to be noisy reals, moduli are not).
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence, Tuple, Union

from .errors import EmptyInput, NonCoprimeModuli, NonPositiveModulus

# Exact rational values. fractions.Fraction already guarantees a positive
# denominator and a reduced numerator/denominator pair.
Rational = Fraction

Number = Union[int, float, Fraction]

# A congruence system is a list of (residue, modulus) pairs with
# 0 <= residue < modulus.
CongruenceSystem = Sequence[Tuple[int, int]]

# Residues this close to the modulus (relative) snap to 0 so that criterion
# tests do not flap across the wrap-around boundary.
_REL_SNAP = 1e-9


def gcd_lcm(a: int, b: int) -> Tuple[int, int]:
    """Greatest common divisor and least common multiple of two positives."""
    if a < 1 or b < 1:
        raise ValueError(f"gcd_lcm requires positive integers, got ({a}, {b})")
    g = math.gcd(a, b)
    return g, (a // g) * b


def solve_crt(system: CongruenceSystem) -> int:
    """Solve x = r_i (mod m_i) for pairwise co-prime moduli.

    Returns the unique solution in [0, prod(m_i)).

    Raises:
        NonCoprimeModuli: some pair of moduli shares a factor > 1.
        EmptyInput: the system is empty.
    """
    if not system:
        raise EmptyInput("cannot solve an empty congruence system")
    for i, (r, m) in enumerate(system):
        if m < 1:
            raise NonPositiveModulus(f"modulus {m} is not positive")
        if not 0 <= r < m:
            raise ValueError(f"residue {r} outside [0, {m})")
        for _, m2 in system[i + 1:]:
            if math.gcd(m, m2) != 1:
                raise NonCoprimeModuli(f"moduli {m} and {m2} share a factor")
    x, modulus = 0, 1
    for r, m in system:
        inv = pow(modulus % m, -1, m)
        x += modulus * (((r - x) * inv) % m)
        modulus *= m
    return x % modulus


def real_mod(a: Number, b: Number) -> Number:
    """Generalized modulo for real operands: a - floor(a/b) * b in [0, b).

    Exact for int and Fraction operands. For floats the result is
    canonicalized into [0, b) and values within ``1e-9 * b`` of b snap to 0.
    """
    if not b > 0:
        raise NonPositiveModulus(f"modulus {b} is not positive")
    if isinstance(a, float) or isinstance(b, float):
        a = float(a)
        b = float(b)
        r = a - math.floor(a / b) * b
        if r < 0.0:
            r += b
        if r >= b or b - r <= _REL_SNAP * b:
            r = 0.0
        return r
    return a - (a // b) * b


def rational_lcm(values: Sequence[Number]) -> Fraction:
    """Smallest positive rational that is an integer multiple of every input.

    For reduced inputs n_i/d_i this is lcm(n_i) / gcd(d_i).
    """
    vals = [Fraction(v) for v in values]
    if not vals:
        raise EmptyInput("rational_lcm of an empty set")
    if any(v <= 0 for v in vals):
        raise ValueError("rational_lcm requires positive values")
    num, den = 1, 0
    for v in vals:
        num = math.lcm(num, v.numerator)
        den = math.gcd(den, v.denominator)
    return Fraction(num, den)


class CrtBasis:
    """Precomputed CRT weights for one fixed set of pairwise co-prime moduli.

    Avoids re-validating and re-inverting on every solve inside decoder
    proposal loops.
    """

    def __init__(self, moduli: Sequence[int]):
        for i, m in enumerate(moduli):
            if m < 1:
                raise NonPositiveModulus(f"modulus {m} is not positive")
            for m2 in moduli[i + 1:]:
                if math.gcd(m, m2) != 1:
                    raise NonCoprimeModuli(f"moduli {m} and {m2} share a factor")
        self.moduli = tuple(moduli)
        self.product = math.prod(self.moduli)
        self._weights = []
        for m in self.moduli:
            rest = self.product // m
            self._weights.append(rest * pow(rest % m, -1, m))

    def solve(self, residues: Sequence[int]) -> int:
        total = 0
        for r, m, w in zip(residues, self.moduli, self._weights):
            total += (r % m) * w
        return total % self.product
