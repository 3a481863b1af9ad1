import math
from fractions import Fraction

import numpy as np
import pytest

from remrec.errors import EmptyInput, NonCoprimeModuli, NonPositiveModulus
from remrec.numtheory import CrtBasis, gcd_lcm, rational_lcm, real_mod, solve_crt


def brute_crt(system):
    """Independent oracle: exhaustive scan of [0, prod moduli)."""
    total = math.prod(m for _, m in system)
    hits = [x for x in range(total) if all(x % m == r for r, m in system)]
    assert len(hits) == 1
    return hits[0]


class TestGcdLcm:
    def test_examples(self):
        assert gcd_lcm(12, 80) == (4, 240)
        assert gcd_lcm(1, 17) == (1, 17)
        assert gcd_lcm(48, 20) == (4, 240)

    def test_product_identity(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            a, b = (int(v) for v in rng.integers(1, 10_000, 2))
            g, l = gcd_lcm(a, b)
            assert g * l == a * b
            assert a % g == 0 and b % g == 0
            assert l % a == 0 and l % b == 0

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            gcd_lcm(0, 3)


class TestSolveCrt:
    def test_examples(self):
        assert solve_crt([(2, 3), (3, 4), (1, 5)]) == 11
        assert solve_crt([(0, 3), (0, 4), (0, 5)]) == 0
        assert solve_crt([(1, 3), (1, 4), (0, 5)]) == 25

    def test_example_values_match_scan_oracle(self):
        assert brute_crt([(2, 3), (3, 4), (1, 5)]) == 11
        assert brute_crt([(1, 3), (1, 4), (0, 5)]) == 25

    def test_random_systems_against_scan(self):
        rng = np.random.default_rng(3)
        moduli_sets = [(3, 4, 5), (7, 8, 9), (5, 9, 11), (2, 3, 5, 7)]
        for mods in moduli_sets:
            for _ in range(25):
                system = [(int(rng.integers(0, m)), m) for m in mods]
                got = solve_crt(system)
                assert got == brute_crt(system)
                for r, m in system:
                    assert got % m == r

    def test_non_coprime_rejected(self):
        with pytest.raises(NonCoprimeModuli):
            solve_crt([(1, 4), (2, 6)])

    def test_empty_rejected(self):
        with pytest.raises(EmptyInput):
            solve_crt([])

    def test_crt_basis_matches(self):
        basis = CrtBasis((3, 4, 5))
        rng = np.random.default_rng(5)
        for _ in range(50):
            rs = [int(rng.integers(0, m)) for m in (3, 4, 5)]
            assert basis.solve(rs) == solve_crt(list(zip(rs, (3, 4, 5))))


class TestRealMod:
    def test_examples(self):
        assert real_mod(-101, 12) == 7
        assert real_mod(8.5, 3) == 2.5
        assert real_mod(0, 7) == 0

    def test_shift_invariance(self):
        rng = np.random.default_rng(7)
        for _ in range(500):
            a = float(rng.uniform(-100, 100))
            b = float(rng.uniform(0.1, 50))
            k = int(rng.integers(-20, 21))
            assert real_mod(a + k * b, b) == pytest.approx(real_mod(a, b), abs=1e-9 * b)

    def test_range(self):
        rng = np.random.default_rng(9)
        for _ in range(500):
            a = float(rng.uniform(-1e6, 1e6))
            b = float(rng.uniform(1e-3, 1e3))
            r = real_mod(a, b)
            assert 0 <= r < b

    def test_snap_near_modulus(self):
        assert real_mod(4 - 1e-12, 4.0) == 0.0

    def test_exact_fraction_path(self):
        assert real_mod(Fraction(17, 2), Fraction(3)) == Fraction(5, 2)
        assert real_mod(Fraction(-13), Fraction(12)) == Fraction(11)

    def test_nonpositive_modulus(self):
        with pytest.raises(NonPositiveModulus):
            real_mod(3.0, 0.0)


class TestRationalLcm:
    def test_examples(self):
        assert rational_lcm([Fraction(2, 3), Fraction(1, 2)]) == 2
        assert rational_lcm([Fraction(1, 2), Fraction(1, 3)]) == 1
        assert rational_lcm([Fraction(7, 5)]) == Fraction(7, 5)

    def test_divisibility_and_minimality(self):
        rng = np.random.default_rng(13)
        for _ in range(100):
            values = [
                Fraction(int(rng.integers(1, 12)), int(rng.integers(1, 12)))
                for _ in range(int(rng.integers(1, 4)))
            ]
            c = rational_lcm(values)
            for v in values:
                assert (c / v).denominator == 1
            # minimality: no smaller positive multiple works (bounded search
            # over candidate denominators up to the lcm of input denominators)
            den = math.lcm(*(v.denominator for v in values))
            num = 1
            while Fraction(num, den) < c:
                cand = Fraction(num, den)
                assert any((cand / v).denominator != 1 for v in values)
                num += 1

    def test_empty_rejected(self):
        with pytest.raises(EmptyInput):
            rational_lcm([])
