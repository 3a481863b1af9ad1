"""Seeded experiments verifying the decoders' proved bounds.

Each experiment is a pure function of its parameters and seed; per-trial
randomness is derived from (seed, trial index), so results are identical no
matter how trials are partitioned across workers.
"""

from __future__ import annotations

import itertools
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from functools import partial
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from . import decoder_complex, decoder_real, design_tools, coprime_sim
from .decoder_complex import circular_distance, first_criterion, recover_folding
from .errors import InsufficientDistinctClusters, NoFeasibleProposal
from .numtheory import real_mod
from .remainder_model import (
    COMPLEX,
    REAL,
    ModulusSet,
    NoiseSpec,
    SourceSet,
    encode_complex,
    encode_real,
)
from .signal_harness import WaveformSpec, extract_residues, synthesize


def _trial_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=int(seed), spawn_key=(int(index),)))


def _trial_seed(seed: int, index: int) -> int:
    return int(_trial_rng(seed, index).integers(0, 2**63 - 1))


def _map_trials(fn, params: dict, trials: int, jobs: int = 1) -> list:
    if jobs <= 1:
        return [fn(params, i) for i in range(trials)]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        chunk = max(1, trials // (jobs * 8))
        return list(pool.map(partial(fn, params), range(trials), chunksize=chunk))


def _bottleneck_matching_error(estimates: Sequence[float], truth: Sequence[float]) -> float:
    """Smallest achievable worst per-element error over perfect matchings."""
    best = math.inf
    for perm in itertools.permutations(range(len(truth))):
        worst = max(abs(estimates[i] - truth[perm[i]]) for i in range(len(truth)))
        best = min(best, worst)
    return best


def _draw_distinct(rng: np.random.Generator, n: int, bound: float) -> Tuple[float, ...]:
    while True:
        values = tuple(float(v) for v in rng.uniform(0.0, bound, n))
        if len(set(values)) == n:
            return values


# ---------------------------------------------------------------------------
# Complex-model error bound and its separation-sharpened refinement
# ---------------------------------------------------------------------------

def _complex_trial(params: dict, index: int) -> dict:
    ms = ModulusSet(params["gamma"], tuple(params["parts"]))
    n = params["n_sources"]
    delta = params["delta"]
    rng = _trial_rng(params["seed"], index)
    bound = float(decoder_complex.complex_dynamic_range(ms, n))
    values = _draw_distinct(rng, n, bound)
    sources = SourceSet(values, COMPLEX)
    noise = NoiseSpec(kind="uniform", delta=delta, seed=_trial_seed(params["seed"], index))
    obs = encode_complex(sources, ms, noise)

    true_residues = [
        [real_mod(x, float(m)) for x in values] for m in ms.moduli
    ]
    separated = decoder_complex.separation_condition(true_residues, ms) if n > 1 else True

    result = {"separated": separated, "error": math.inf, "pure": False}
    try:
        solutions = decoder_complex.decode_complex(obs, ms, n)
    except NoFeasibleProposal:
        return result
    best_err, best_sol = math.inf, None
    for sol in solutions:
        err = _bottleneck_matching_error(sol.estimates, values)
        if err < best_err:
            best_err, best_sol = err, sol
    result["error"] = best_err
    if best_sol is not None and obs.source_labels is not None:
        pure = True
        for cluster in best_sol.proposal:
            labels = {obs.source_labels[l][cluster[l]] for l in range(ms.count)}
            if len(labels) > 1:
                pure = False
                break
        result["pure"] = pure
    return result


def complex_bound_experiment(
    gamma: float,
    parts: Sequence[int],
    n_sources: int,
    trials: int,
    seed: int,
    delta: Optional[float] = None,
    jobs: int = 1,
) -> dict:
    """Existence of a survivor matching truth within 3*gamma/4 per element."""
    delta = gamma / 4 if delta is None else delta
    params = {"gamma": gamma, "parts": tuple(parts), "n_sources": n_sources, "delta": delta, "seed": seed}
    results = _map_trials(_complex_trial, params, trials, jobs)
    bound = 0.75 * gamma
    errors = [r["error"] for r in results]
    failures = sum(1 for e in errors if not e < bound)
    return {
        "name": "complex-bound",
        "trials": trials,
        "failures": failures,
        "max_matched_error": max(errors),
        "bound": bound,
        "errors": errors,
        "passed": failures == 0,
    }


def complex_separation_experiment(
    gamma: float,
    parts: Sequence[int],
    n_sources: int,
    max_trials: int,
    target_filtered: int,
    seed: int,
    delta: Optional[float] = None,
    jobs: int = 1,
) -> dict:
    """Trials passing the separation condition must match within gamma/4 with
    single-source clusters."""
    delta = gamma / 4 if delta is None else delta
    params = {"gamma": gamma, "parts": tuple(parts), "n_sources": n_sources, "delta": delta, "seed": seed}
    results = _map_trials(_complex_trial, params, max_trials, jobs)
    filtered = [r for r in results if r["separated"]]
    bound = gamma / 4
    bad_error = sum(1 for r in filtered if not r["error"] < bound)
    bad_purity = sum(1 for r in filtered if not r["pure"])
    # Feasibility of the filter itself: a ring of circumference M*gamma can
    # only separate two residues by more than 3*gamma when M > 6.
    feasible = all(m > 6 for m in parts)
    return {
        "name": "complex-separation",
        "trials": max_trials,
        "filtered": len(filtered),
        "target_filtered": target_filtered,
        "filter_feasible": feasible,
        "failures_error": bad_error,
        "failures_purity": bad_purity,
        "bound": bound,
        "passed": len(filtered) >= target_filtered and bad_error == 0 and bad_purity == 0,
    }


# ---------------------------------------------------------------------------
# Literal-enumeration oracle for the complex decoder
# ---------------------------------------------------------------------------

def oracle_decode_complex_keys(obs, ms: ModulusSet, n: int) -> set:
    """Survivor keys from enumerating every per-modulus bijection and every
    tau vector, applying both criteria literally."""
    gamma = ms.gamma_float
    n_moduli = ms.count
    d_q = decoder_complex.folding_range(ms, n)
    per_cluster_cache: Dict[tuple, list] = {}

    def outcomes(idx: tuple) -> list:
        if idx in per_cluster_cache:
            return per_cluster_cache[idx]
        residues = [obs.residues[l][idx[l]] for l in range(n_moduli)]
        commons = [real_mod(r, gamma) for r in residues]
        found = []
        for taus in itertools.product((0, 1), repeat=n_moduli):
            shifted = [c - t * gamma for c, t in zip(commons, taus)]
            if not first_criterion(shifted, gamma):
                continue
            q = recover_folding(residues, taus, ms)
            if 0 <= q < d_q:
                found.append((q, q * gamma + sum(shifted) / n_moduli))
        per_cluster_cache[idx] = found
        return found

    keys = set()
    for assignment in itertools.product(itertools.permutations(range(n)), repeat=n_moduli):
        cluster_outcomes = []
        feasible = True
        for i in range(n):
            idx = tuple(assignment[l][i] for l in range(n_moduli))
            outs = outcomes(idx)
            if not outs:
                feasible = False
                break
            cluster_outcomes.append(outs)
        if not feasible:
            continue
        for combo in itertools.product(*cluster_outcomes):
            keys.add(tuple(sorted(combo)))
    return keys


def oracle_equivalence_experiment(
    gamma: float, parts: Sequence[int], instances: int, seed: int, delta: Optional[float] = None
) -> dict:
    """Reduced-enumeration decoder versus the literal oracle, exact set equality."""
    ms = ModulusSet(gamma, tuple(parts))
    delta = gamma / 4 if delta is None else delta
    mismatches = 0
    for i in range(instances):
        rng = _trial_rng(seed, i)
        n = 1 + (i % 2)
        bound = float(decoder_complex.complex_dynamic_range(ms, n))
        values = _draw_distinct(rng, n, bound)
        noise = NoiseSpec(kind="uniform", delta=delta, seed=_trial_seed(seed, i))
        obs = encode_complex(SourceSet(values, COMPLEX), ms, noise)
        try:
            decoded = decoder_complex.decode_complex(obs, ms, n)
            keys = {tuple(zip(s.folding_numbers, s.estimates)) for s in decoded}
        except NoFeasibleProposal:
            keys = set()
        oracle = oracle_decode_complex_keys(obs, ms, n)
        if keys != oracle:
            mismatches += 1
    return {
        "name": "complex-oracle-equivalence",
        "instances": instances,
        "mismatches": mismatches,
        "passed": mismatches == 0,
    }


# ---------------------------------------------------------------------------
# Real-model bounds
# ---------------------------------------------------------------------------

def _real_single_trial(params: dict, index: int) -> dict:
    ms = ModulusSet(params["gamma"], tuple(params["parts"]))
    gamma = ms.gamma_float
    delta = params["delta"]
    rng = _trial_rng(params["seed"], index)
    bound = float(decoder_real.real_dynamic_range(ms, 1))
    x = float(rng.uniform(0.0, bound))
    degenerate = decoder_real.degenerate_common_residue(x, gamma)
    noise = NoiseSpec(kind="uniform", delta=delta, seed=_trial_seed(params["seed"], index))
    obs = encode_real(SourceSet((x,), REAL), ms, noise)
    result = {"degenerate": degenerate, "error": math.inf}
    try:
        solutions = decoder_real.decode_real_single(obs, ms)
    except (NoFeasibleProposal, InsufficientDistinctClusters):
        return result
    result["error"] = min(abs(s.estimates[0] - x) for s in solutions)
    return result


def real_single_bound_experiment(
    gamma: float, parts: Sequence[int], trials: int, seed: int, delta: Optional[float] = None, jobs: int = 1
) -> dict:
    delta = gamma / 4 if delta is None else delta
    params = {"gamma": gamma, "parts": tuple(parts), "delta": delta, "seed": seed}
    results = _map_trials(_real_single_trial, params, trials, jobs)
    bound = 0.75 * gamma
    kept = [r for r in results if not r["degenerate"]]
    errors = [r["error"] for r in kept]
    failures = sum(1 for e in errors if not e < bound)
    return {
        "name": "real-single-bound",
        "trials": trials,
        "degenerate_excluded": len(results) - len(kept),
        "failures": failures,
        "max_matched_error": max(errors) if errors else 0.0,
        "bound": bound,
        "errors": errors,
        "passed": failures == 0,
    }


def _real_multi_trial(params: dict, index: int) -> dict:
    ms = ModulusSet(params["gamma"], tuple(params["parts"]))
    n = params["n_sources"]
    delta = params["delta"]
    rng = _trial_rng(params["seed"], index)
    bound = float(decoder_real.real_dynamic_range(ms, n))
    values = _draw_distinct(rng, n, bound)
    noise = NoiseSpec(kind="uniform", delta=delta, seed=_trial_seed(params["seed"], index))
    obs = encode_real(SourceSet(values, REAL), ms, noise)
    result = {"error": math.inf}
    try:
        solutions = decoder_real.decode_real_multi(obs, ms, n)
    except (NoFeasibleProposal, InsufficientDistinctClusters):
        return result
    result["error"] = min(_bottleneck_matching_error(s.estimates, values) for s in solutions)
    return result


def real_multi_bound_experiment(
    gamma: float,
    parts: Sequence[int],
    n_sources: int,
    trials: int,
    seed: int,
    delta: Optional[float] = None,
    jobs: int = 1,
) -> dict:
    delta = gamma / 4 if delta is None else delta
    params = {"gamma": gamma, "parts": tuple(parts), "n_sources": n_sources, "delta": delta, "seed": seed}
    results = _map_trials(_real_multi_trial, params, trials, jobs)
    bound = 0.75 * gamma
    errors = [r["error"] for r in results]
    failures = sum(1 for e in errors if not e < bound)
    return {
        "name": "real-multi-bound",
        "trials": trials,
        "failures": failures,
        "max_matched_error": max(errors),
        "bound": bound,
        "errors": errors,
        "passed": failures == 0,
    }


# ---------------------------------------------------------------------------
# Co-prime sampling dichotomy
# ---------------------------------------------------------------------------

def coprime_dichotomy_experiment(
    p: int = 3,
    q: int = 5,
    t: int = 1,
    cycles: int = 4096,
    max_lag: int = 14,
    good_freqs: Sequence = (Fraction(1, 10), Fraction(1, 10) + Fraction(1, 14)),
    bad_freqs: Sequence = (Fraction(1, 10), Fraction(1, 10) + Fraction(1, 15)),
    good_bias_limit: float = 0.02,
    bad_bias_floor: float = 0.5,
) -> dict:
    lags = list(range(max_lag + 1))
    good = coprime_sim.make_config(p, q, t, cycles, good_freqs)
    bad = coprime_sim.make_config(p, q, t, cycles, bad_freqs)
    good_bias = max(e.bias for e in coprime_sim.estimate_autocorrelation(good, lags))
    bad_bias = max(e.bias for e in coprime_sim.estimate_autocorrelation(bad, lags))
    good_failing = [f for _, _, f in coprime_sim.failure_condition(good)]
    bad_failing = [f for _, _, f in coprime_sim.failure_condition(bad)]
    passed = (
        not any(good_failing)
        and any(bad_failing)
        and good_bias < good_bias_limit
        and bad_bias >= bad_bias_floor
    )
    return {
        "name": "coprime-dichotomy",
        "good_max_bias": good_bias,
        "bad_max_bias": bad_bias,
        "good_bias_limit": good_bias_limit,
        "bad_bias_floor": bad_bias_floor,
        "passed": passed,
    }


# ---------------------------------------------------------------------------
# Geometry agreement, rate bound, separation probability, harness agreement
# ---------------------------------------------------------------------------

def doa_agreement_experiment(count: int = 100, seed: int = 0, grid: int = 2048, max_denominator: int = 12) -> dict:
    rng = _trial_rng(seed, 0)
    disagreements = 0
    for _ in range(count):
        n_sensors = int(rng.integers(2, 5))
        positions = {Fraction(0)}
        while len(positions) < n_sensors:
            num = int(rng.integers(1, 4 * max_denominator))
            den = int(rng.integers(1, max_denominator + 1))
            positions.add(Fraction(num, den))
        geom = design_tools.ArrayGeometry(Fraction(1), tuple(sorted(positions)))
        _, unique = design_tools.doa_representable(geom)
        witness = design_tools.doa_ambiguity_search(geom, grid=grid)
        if unique != (witness is None):
            disagreements += 1
    return {
        "name": "doa-agreement",
        "geometries": count,
        "disagreements": disagreements,
        "passed": disagreements == 0,
    }


_COPRIME_POOL = (2, 3, 5, 7, 9, 11, 13, 16, 17, 19, 23, 25, 27, 29)


def _draw_coprime_parts(rng: np.random.Generator) -> Tuple[int, ...]:
    while True:
        size = int(rng.integers(3, 6))
        picks = sorted(int(v) for v in rng.choice(_COPRIME_POOL, size=size, replace=False))
        if all(math.gcd(a, b) == 1 for a, b in itertools.combinations(picks, 2)):
            return tuple(picks)


def rate_bound_experiment(gammas: Sequence[int] = (2, 4, 8), sets_per_gamma: int = 17, seed: int = 0) -> dict:
    rng = _trial_rng(seed, 1)
    checked = failures = 0
    for gamma in gammas:
        for _ in range(sets_per_gamma):
            parts = _draw_coprime_parts(rng)
            moduli = [gamma * m for m in parts]
            bound, witness = design_tools.delta_upper_bound(moduli)
            complement = list(moduli)
            for w in witness:
                complement.remove(w)
            witness_value = math.gcd(math.lcm(*witness), math.lcm(*complement))
            checked += 1
            if bound != gamma or witness_value != bound:
                failures += 1
    fixed_bound, fixed_witness = design_tools.delta_upper_bound([12, 16, 20])
    fixed_ok = fixed_bound == 4 and len(fixed_witness) >= 1
    return {
        "name": "rate-bound",
        "checked": checked,
        "failures": failures,
        "fixed_case_bound": fixed_bound,
        "passed": failures == 0 and fixed_ok,
    }


def separation_probability_experiment(
    parts: Sequence[int] = (101, 103, 107), gamma: float = 1.0, draws: int = 100_000, seed: int = 0, tol: float = 0.01
) -> dict:
    expected = decoder_complex.separation_probability(list(parts))
    rng = _trial_rng(seed, 2)
    rings = [m * gamma for m in parts]
    hits = 0
    a = rng.uniform(0.0, 1.0, size=(draws, len(rings)))
    b = rng.uniform(0.0, 1.0, size=(draws, len(rings)))
    for i in range(draws):
        ok = True
        for l, ring in enumerate(rings):
            if circular_distance(a[i, l] * ring, b[i, l] * ring, ring) <= 3 * gamma:
                ok = False
                break
        if ok:
            hits += 1
    empirical = hits / draws
    return {
        "name": "separation-probability",
        "draws": draws,
        "empirical": empirical,
        "expected": expected,
        "tolerance": tol,
        "passed": abs(empirical - expected) <= tol,
    }


def _draw_grid_frequencies(rng: np.random.Generator, n: int, moduli: Sequence[int], model: str, top: int) -> Tuple[int, ...]:
    """Random integer frequencies whose residues stay distinct per modulus
    (and distinct from their mirror images in the real model)."""
    while True:
        freqs = sorted(int(v) for v in rng.integers(0, top, size=n))
        if len(set(freqs)) != n:
            continue
        ok = True
        for m in moduli:
            residues = [f % m for f in freqs]
            if model == REAL:
                residues += [(-f) % m for f in freqs]
            if len(set(residues)) != len(residues):
                ok = False
                break
        if ok:
            return tuple(freqs)


def harness_agreement_experiment(instances: int = 100, seed: int = 0) -> dict:
    rng = _trial_rng(seed, 3)
    mismatches = 0
    for i in range(instances):
        gamma = int(rng.choice((2, 4)))
        parts = tuple(sorted(int(v) for v in rng.choice((3, 5, 7, 11, 13), size=2, replace=False)))
        ms = ModulusSet(gamma, parts)
        model = COMPLEX if i % 2 == 0 else REAL
        moduli = [int(m) for m in ms.moduli]
        # extraction requires expected_count <= samples/2 at the smallest rate
        per_source = 2 if model == REAL else 1
        max_n = min(3, min(moduli) // (2 * per_source))
        n = int(rng.integers(1, max_n + 1))
        top = gamma * math.prod(parts)
        freqs = _draw_grid_frequencies(rng, n, moduli, model, top)
        phases = rng.uniform(0.0, 2 * np.pi, size=n)
        spec = WaveformSpec(
            tones=tuple((1.0, float(f), float(ph)) for f, ph in zip(freqs, phases)),
            model=model,
        )
        sources = SourceSet(tuple(float(f) for f in freqs), model)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            if model == COMPLEX:
                obs = encode_complex(sources, ms, NoiseSpec())
            else:
                obs = encode_real(sources, ms, NoiseSpec())
        expected_count = n if model == COMPLEX else 2 * n
        for l, m in enumerate(moduli):
            seq = synthesize(spec, rate=float(m), window=1.0, seed=seed)
            extracted = sorted(extract_residues(seq, expected_count))
            analytic = sorted(obs.residues[l])
            if len(extracted) != len(analytic) or any(
                abs(a - b) > 0 for a, b in zip(extracted, analytic)
            ):
                mismatches += 1
                break
    return {
        "name": "harness-agreement",
        "instances": instances,
        "mismatches": mismatches,
        "passed": mismatches == 0,
    }


SUITES = {
    "complex-bound": lambda trials, seed, jobs: complex_bound_experiment(
        64, (5, 7, 9, 11), 2, trials or 1000, seed, jobs=jobs
    ),
    "complex-separation": lambda trials, seed, jobs: complex_separation_experiment(
        64, (5, 7, 9, 11), 2, trials or 5000, 200, seed, jobs=jobs
    ),
    "complex-oracle": lambda trials, seed, jobs: oracle_equivalence_experiment(
        8, (3, 4, 5), trials or 100, seed
    ),
    "real-single-bound": lambda trials, seed, jobs: real_single_bound_experiment(
        4, (3, 4, 5), trials or 1000, seed, jobs=jobs
    ),
    "real-multi-bound": lambda trials, seed, jobs: real_multi_bound_experiment(
        16, (3, 5, 7, 11), 2, trials or 500, seed, jobs=jobs
    ),
    "coprime-dichotomy": lambda trials, seed, jobs: coprime_dichotomy_experiment(),
    "doa-agreement": lambda trials, seed, jobs: doa_agreement_experiment(trials or 100, seed),
    "rate-bound": lambda trials, seed, jobs: rate_bound_experiment(seed=seed),
    "separation-probability": lambda trials, seed, jobs: separation_probability_experiment(
        draws=trials or 100_000, seed=seed
    ),
    "harness-agreement": lambda trials, seed, jobs: harness_agreement_experiment(trials or 100, seed),
}


def run_suite(name: str, trials: Optional[int], seed: int, jobs: int = 1) -> dict:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    return SUITES[name](trials, seed, jobs)
