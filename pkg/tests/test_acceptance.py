"""Acceptance suite: every criterion at its stated tolerance.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one summary line
per criterion. Criterion 2 is expected to fail: its stated modulus set
contains the part 5, whose ring (circumference 5 * gamma) cannot hold two
residues more than 2.5 * gamma apart, so the required separation filter
(> 3 * gamma on every ring) admits no trial at all. The test runs the stated
configuration faithfully and reports the empty filter; the sharpened-bound
machinery itself is verified on feasible moduli in test_decoder_complex.
"""

from fractions import Fraction

from remrec import montecarlo as mc
from remrec.decoder_real import max_dynamic_range_witness
from remrec.design_tools import check_unique_encoding
from remrec.numtheory import real_mod
from remrec.remainder_model import ModulusSet

SEED = 20260810


def _report(num: int, name: str, passed: bool, detail: str = "") -> None:
    status = "PASS" if passed else "FAIL"
    line = f"[criterion {num:02d}] {status} {name}"
    if detail:
        line += f" ({detail})"
    print(line)


def test_criterion_01_complex_bound():
    stats = mc.complex_bound_experiment(
        gamma=64, parts=(5, 7, 9, 11), n_sources=2, trials=1000, seed=SEED, delta=16.0
    )
    _report(
        1, "complex-model error bound 3*gamma/4", stats["passed"],
        f"max matched error {stats['max_matched_error']:.3f} < 48 over {stats['trials']} trials",
    )
    assert stats["passed"]


def test_criterion_02_separation_sharpened_bound():
    stats = mc.complex_separation_experiment(
        gamma=64, parts=(5, 7, 9, 11), n_sources=2,
        max_trials=5000, target_filtered=200, seed=SEED, delta=16.0,
    )
    detail = (
        f"filtered {stats['filtered']} of {stats['trials']} trials"
        f" (target {stats['target_filtered']}); filter feasible: {stats['filter_feasible']}"
    )
    _report(2, "separation-filtered bound gamma/4 with pure clusters", stats["passed"], detail)
    # The part 5 makes the separation event impossible (max circular distance
    # on its ring is 2.5 * gamma < 3 * gamma), so the stated configuration can
    # never accumulate the required filtered trials. Kept faithful and red.
    assert stats["passed"], (
        "separation filter admits no trial at M={5,7,9,11}: ring of part 5 "
        "caps circular distance at 2.5*gamma, below the required 3*gamma"
    )


def test_criterion_03_oracle_equivalence():
    stats = mc.oracle_equivalence_experiment(
        gamma=8, parts=(3, 4, 5), instances=100, seed=SEED, delta=2.0
    )
    _report(
        3, "survivor set equals literal enumeration", stats["passed"],
        f"{stats['mismatches']} mismatches over {stats['instances']} instances",
    )
    assert stats["passed"]


def test_criterion_04_real_single_bound():
    stats = mc.real_single_bound_experiment(
        gamma=4, parts=(3, 4, 5), trials=1000, seed=SEED, delta=1.0
    )
    _report(
        4, "single-tone real bound 3*gamma/4", stats["passed"],
        f"max matched error {stats['max_matched_error']:.3f} < 3, "
        f"degenerate excluded: {stats['degenerate_excluded']}",
    )
    assert stats["passed"]


def test_criterion_05_real_dynamic_range_tightness():
    d, partner, _ = max_dynamic_range_witness([3, 4, 5])
    assert d == Fraction(17, 2) and partner == Fraction(7, 2)
    exact_equal = all(
        {real_mod(d, Fraction(m)), real_mod(-d, Fraction(m))}
        == {real_mod(partner, Fraction(m)), real_mod(-partner, Fraction(m))}
        for m in (3, 4, 5)
    )
    ms = ModulusSet(1, (3, 4, 5))
    found_unique, collision = check_unique_encoding(ms, 9, 1, "real", Fraction(1, 2))
    below_unique, below_collision = check_unique_encoding(ms, d, 1, "real", Fraction(1, 2))
    passed = (
        exact_equal
        and not found_unique
        and collision == (Fraction(7, 2), Fraction(17, 2))
        and below_unique
        and below_collision is None
    )
    _report(5, "real dynamic-range tightness at 8.5 vs 3.5", passed,
            f"collision {collision}, unique below 8.5: {below_unique}")
    assert passed


def test_criterion_06_real_multi_bound():
    stats = mc.real_multi_bound_experiment(
        gamma=16, parts=(3, 5, 7, 11), n_sources=2, trials=500, seed=SEED, delta=4.0
    )
    _report(
        6, "multi-tone real bound 3*gamma/4", stats["passed"],
        f"max matched error {stats['max_matched_error']:.3f} < 12 over {stats['trials']} trials",
    )
    assert stats["passed"]


def test_criterion_07_coprime_dichotomy():
    stats = mc.coprime_dichotomy_experiment(
        p=3, q=5, t=1, cycles=4096, max_lag=14,
        good_freqs=(Fraction(1, 10), Fraction(1, 10) + Fraction(1, 14)),
        bad_freqs=(Fraction(1, 10), Fraction(1, 10) + Fraction(1, 15)),
        good_bias_limit=0.02, bad_bias_floor=0.5,
    )
    _report(
        7, "co-prime sampling bias dichotomy", stats["passed"],
        f"non-failing max bias {stats['good_max_bias']:.5f} < 0.02, "
        f"failing max bias {stats['bad_max_bias']:.3f} >= 0.5",
    )
    assert stats["passed"]


def test_criterion_08_doa_agreement():
    stats = mc.doa_agreement_experiment(count=100, seed=SEED, grid=2048, max_denominator=12)
    _report(
        8, "representability verdict matches ambiguity search", stats["passed"],
        f"{stats['disagreements']} disagreements over {stats['geometries']} geometries",
    )
    assert stats["passed"]


def test_criterion_09_rate_selection_bound():
    stats = mc.rate_bound_experiment(gammas=(2, 4, 8), sets_per_gamma=17, seed=SEED)
    _report(
        9, "noise ceiling equals the shared factor", stats["passed"],
        f"{stats['checked']} random co-prime sets plus the fixed {{12,16,20}} case "
        f"(bound {stats['fixed_case_bound']})",
    )
    assert stats["checked"] >= 50
    assert stats["passed"]


def test_criterion_10_separation_probability():
    stats = mc.separation_probability_experiment(
        parts=(101, 103, 107), gamma=1.0, draws=100_000, seed=SEED, tol=0.01
    )
    _report(
        10, "empirical separation frequency matches the product formula", stats["passed"],
        f"empirical {stats['empirical']:.4f} vs expected {stats['expected']:.4f}",
    )
    assert stats["passed"]


def test_criterion_11_harness_agreement():
    stats = mc.harness_agreement_experiment(instances=100, seed=SEED)
    _report(
        11, "spectral extraction equals analytic encoding", stats["passed"],
        f"{stats['mismatches']} mismatches over {stats['instances']} instances",
    )
    assert stats["passed"]
