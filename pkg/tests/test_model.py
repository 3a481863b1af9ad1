import json

import pytest

from remrec.errors import DynamicRangeWarning, NoiseBoundExceeded
from remrec.remainder_model import (
    ModulusSet,
    NoiseSpec,
    SourceSet,
    common_residue,
    encode_complex,
    encode_real,
    observation_from_dict,
    observation_to_dict,
    problem_from_dict,
    problem_to_dict,
)

MS = ModulusSet(4, (3, 4, 5))


class TestModulusSet:
    def test_moduli(self):
        assert MS.moduli == (12, 16, 20)

    def test_rejects_non_coprime(self):
        with pytest.raises(ValueError):
            ModulusSet(4, (4, 6))

    def test_rejects_descending(self):
        with pytest.raises(ValueError):
            ModulusSet(4, (5, 3))

    def test_rejects_single(self):
        with pytest.raises(ValueError):
            ModulusSet(4, (7,))


class TestEncodeComplex:
    def test_noiseless_example(self):
        obs = encode_complex(SourceSet((100.0,), "complex"), MS, NoiseSpec())
        assert obs.residues == ((4.0,), (4.0,), (0.0,))

    def test_fixed_noise_example(self):
        noise = NoiseSpec(kind="fixed", delta=1.0, values=((0.5, -0.5, 0.9),))
        obs = encode_complex(SourceSet((100.0,), "complex"), MS, noise)
        flat = [entries[0] for entries in obs.residues]
        assert flat == pytest.approx([4.5, 3.5, 0.9])

    def test_zero_source(self):
        obs = encode_complex(SourceSet((0.0,), "complex"), MS, NoiseSpec())
        assert obs.residues == ((0.0,), (0.0,), (0.0,))

    def test_noise_bound_enforced(self):
        noise = NoiseSpec(kind="fixed", delta=0.5, values=((0.5, 0.0, 0.0),))
        with pytest.raises(NoiseBoundExceeded):
            encode_complex(SourceSet((10.0,), "complex"), MS, noise)

    def test_out_of_range_warns(self):
        with pytest.warns(DynamicRangeWarning):
            encode_complex(SourceSet((500.0,), "complex"), MS, NoiseSpec())

    def test_permutation_invariance(self):
        a = encode_complex(SourceSet((10.0, 39.0), "complex"), MS, NoiseSpec())
        b = encode_complex(SourceSet((39.0, 10.0), "complex"), MS, NoiseSpec())
        assert a.residues == b.residues

    def test_uniform_noise_deterministic_and_bounded(self):
        noise = NoiseSpec(kind="uniform", delta=1.0, seed=42)
        obs1 = encode_complex(SourceSet((10.0, 39.0), "complex"), MS, noise)
        obs2 = encode_complex(SourceSet((10.0, 39.0), "complex"), MS, noise)
        assert obs1.residues == obs2.residues
        clean = encode_complex(SourceSet((10.0, 39.0), "complex"), MS, NoiseSpec())
        for noisy_row, clean_row, m in zip(obs1.residues, clean.residues, (12, 16, 20)):
            for a in noisy_row:
                circ = min(
                    min(abs(a - b), m - abs(a - b)) for b in clean_row
                )
                assert circ < 1.0


class TestEncodeReal:
    def test_example_13(self):
        obs = encode_real(SourceSet((13.0,), "real"), MS, NoiseSpec())
        assert obs.residues == ((1.0, 11.0), (3.0, 13.0), (7.0, 13.0))

    def test_example_101(self):
        with pytest.warns(DynamicRangeWarning):
            obs = encode_real(SourceSet((101.0,), "real"), MS, NoiseSpec())
        assert obs.residues == ((5.0, 7.0), (5.0, 11.0), (1.0, 19.0))

    def test_zero_source_degenerate(self):
        obs = encode_real(SourceSet((0.0,), "real"), MS, NoiseSpec())
        assert obs.residues == ((0.0, 0.0), (0.0, 0.0), (0.0, 0.0))

    def test_cardinality(self):
        obs = encode_real(SourceSet((3.0, 7.0), "real"), MS, NoiseSpec())
        assert all(len(entries) == 4 for entries in obs.residues)


class TestCommonResidue:
    def test_examples(self):
        assert common_residue(4.5, 4.0) == 0.5
        assert common_residue(3.5, 4.0) == 3.5
        assert common_residue(0.0, 4.0) == 0.0


class TestJsonRoundTrip:
    def test_observation_round_trip(self):
        obs = encode_real(SourceSet((13.0,), "real"), MS, NoiseSpec(kind="uniform", delta=0.5, seed=3))
        doc = observation_to_dict(obs, shuffle_seed=3)
        back = observation_from_dict(json.loads(json.dumps(doc)))
        assert back.residues == obs.residues  # sorted canonical form survives shuffling
        assert back.modulus_set == obs.modulus_set
        assert back.noise_bound == obs.noise_bound

    def test_problem_round_trip(self):
        sources = SourceSet((10.0, 97.0), "complex")
        noise = NoiseSpec(kind="uniform", delta=1.0, seed=9)
        doc = problem_to_dict(sources, MS, noise)
        s2, m2, n2 = problem_from_dict(json.loads(json.dumps(doc)))
        assert s2 == sources and m2 == MS and n2 == noise

    def test_shuffle_changes_order_not_content(self):
        obs = encode_real(SourceSet((3.0, 7.0), "real"), MS, NoiseSpec())
        doc = observation_to_dict(obs, shuffle_seed=123)
        for exported, canonical in zip(doc["residues"], obs.residues):
            assert sorted(exported) == list(canonical)
