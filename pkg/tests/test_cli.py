import json
from pathlib import Path

import pytest

jsonschema = pytest.importorskip("jsonschema")

from remrec.cli import main

SCHEMA_DIR = Path(__file__).resolve().parents[1] / "src" / "remrec" / "schemas"


def _schema(name: str) -> dict:
    return json.loads((SCHEMA_DIR / name).read_text())


def _validator(name: str):
    from referencing import Registry, Resource

    schema = _schema(name)
    registry = Registry().with_resources(
        (f"remrec/{p.name}", Resource.from_contents(json.loads(p.read_text())))
        for p in SCHEMA_DIR.glob("*.json")
    )
    return jsonschema.Draft7Validator(schema, registry=registry)


def _run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, out


class TestRange:
    def test_real_model_d30(self, capsys):
        code, out = _run(capsys, ["range", "--gamma", "4", "--parts", "3,4,5", "--model", "real"])
        assert code == 0
        doc = json.loads(out)
        assert doc["selected_dynamic_range"] == 30.0
        _validator("report.json").validate(doc)

    def test_deterministic_stdout(self, capsys):
        _, out1 = _run(capsys, ["range", "--gamma", "4", "--parts", "3,4,5"])
        _, out2 = _run(capsys, ["range", "--gamma", "4", "--parts", "3,4,5"])
        assert out1 == out2

    def test_csv_format(self, capsys):
        code, out = _run(capsys, ["range", "--gamma", "4", "--parts", "3,4,5", "--format", "csv"])
        assert code == 0
        assert out.splitlines()[0] == "model,n_sources,dynamic_range"


class TestEncodeDecode:
    def test_round_trip_complex(self, capsys, tmp_path):
        obs_path = tmp_path / "obs.json"
        code, out = _run(
            capsys,
            ["encode", "--gamma", "4", "--parts", "3,4,5", "--model", "complex",
             "--sources", "100", "--out", str(obs_path)],
        )
        assert code == 0
        _validator("observation.json").validate(
            {k: v for k, v in json.loads(obs_path.read_text()).items()}
        )
        code, out = _run(capsys, ["decode", "--in", str(obs_path)])
        doc = json.loads(out)
        _validator("solution.json").validate({k: v for k, v in doc.items() if k != "observation"})
        assert any(
            abs(sol["estimates"][0] - 100.0) < 1e-9 for sol in doc["solutions"]
        )

    def test_worked_noisy_decode(self, capsys, tmp_path):
        obs_path = tmp_path / "obs.json"
        obs_path.write_text(json.dumps({
            "gamma": 4, "coprime_parts": [3, 4, 5], "model": "complex",
            "n_sources": 1, "noise_bound": 1.0,
            "residues": [[4.5], [3.5], [0.9]],
        }))
        code, out = _run(capsys, ["decode", "--in", str(obs_path)])
        assert code == 0
        doc = json.loads(out)
        assert doc["solutions"][0]["estimates"][0] == pytest.approx(100.3)

    def test_decode_real_single(self, capsys, tmp_path):
        obs_path = tmp_path / "obs.json"
        _run(capsys, ["encode", "--gamma", "4", "--parts", "3,4,5", "--model", "real",
                      "--sources", "13", "--out", str(obs_path)])
        code, out = _run(capsys, ["decode", "--in", str(obs_path)])
        assert code == 0
        doc = json.loads(out)
        assert doc["variant"] == "real-single"
        assert doc["solutions"][0]["estimates"] == [13.0]

    def test_infeasible_exit_code(self, capsys, tmp_path):
        obs_path = tmp_path / "obs.json"
        obs_path.write_text(json.dumps({
            "gamma": 4, "coprime_parts": [3, 4, 5], "model": "complex",
            "n_sources": 1, "noise_bound": 0.9,
            "residues": [[0.0], [1.3], [2.7]],
        }))
        code, _ = _run(capsys, ["decode", "--in", str(obs_path)])
        assert code == 2

    def test_missing_file_exit_code(self, capsys):
        code, _ = _run(capsys, ["decode", "--in", "/nonexistent/obs.json"])
        assert code == 1

    def test_usage_error_exit_code(self, capsys):
        code, _ = _run(capsys, ["encode"])
        assert code == 1


class TestHarnessCommand:
    def test_end_to_end_with_figures(self, capsys, tmp_path):
        out_dir = tmp_path / "report"
        code, out = _run(
            capsys,
            ["harness", "--gamma", "4", "--parts", "3,4,5", "--model", "complex",
             "--tones", "100", "--out", str(out_dir)],
        )
        assert code == 0
        doc = json.loads(out)
        assert any(abs(s["estimates"][0] - 100.0) < 1e-9 for s in doc["solutions"])
        _validator("solution.json").validate(doc)
        for name in ("sequence_m0.csv", "spectrum_m0.csv", "spectrum_m0.png",
                     "solution.json", "observation.json"):
            assert (out_dir / name).exists() and (out_dir / name).stat().st_size > 0


class TestCoprimeCommand:
    def test_json_and_artifacts(self, capsys, tmp_path):
        out_dir = tmp_path / "coprime"
        code, out = _run(
            capsys,
            ["coprime", "--p", "3", "--q", "5", "--t", "1",
             "--freqs", "1/10,6/35", "--cycles", "256", "--max-lag", "14",
             "--out", str(out_dir)],
        )
        assert code == 0
        doc = json.loads(out)
        _validator("report.json").validate(doc)
        assert doc["failure_pairs"] == [{"i": 0, "j": 1, "failing": False}]
        for name in ("lags.csv", "spectrum.csv", "spectrum.png", "bias.png"):
            assert (out_dir / name).exists() and (out_dir / name).stat().st_size > 0

    def test_csv_stdout(self, capsys):
        code, out = _run(
            capsys,
            ["coprime", "--p", "3", "--q", "5", "--freqs", "1/10", "--cycles", "64",
             "--max-lag", "5", "--format", "csv"],
        )
        assert code == 0
        assert out.splitlines()[0] == "lag,re,im,truth_re,truth_im,bias"


class TestDoaCommand:
    def test_ambiguous_array(self, capsys):
        code, out = _run(capsys, ["doa", "--lambda", "2", "--positions", "0,4,6"])
        assert code == 0
        doc = json.loads(out)
        _validator("report.json").validate(doc)
        assert doc["unique"] is False and doc["C"] == "1"

    def test_unique_array(self, capsys):
        code, out = _run(capsys, ["doa", "--lambda", "2", "--positions", "0,3,4"])
        doc = json.loads(out)
        assert doc["unique"] is True and doc["witness"] is None


class TestMonteCarloCommand:
    def test_small_suite(self, capsys, tmp_path):
        out_dir = tmp_path / "mc"
        code, out = _run(
            capsys,
            ["montecarlo", "--suite", "real-single-bound", "--trials", "50",
             "--seed", "3", "--out", str(out_dir)],
        )
        assert code == 0
        doc = json.loads(out)
        _validator("report.json").validate(doc)
        assert doc["passed"] is True
        assert (out_dir / "real-single-bound-errors.png").exists()


class TestDoaJsonInput:
    def test_geometry_file(self, capsys, tmp_path):
        geo = tmp_path / "geometry.json"
        geo.write_text(json.dumps({"lambda": "2", "positions": ["0", "3", "4"]}))
        code = main(["doa", "--in", str(geo)])
        out = capsys.readouterr().out
        assert code == 0
        doc = json.loads(out)
        assert doc["unique"] is True and doc["C"] == "2"


class TestJobsDeterminism:
    def test_parallel_trials_match_sequential(self):
        from remrec.montecarlo import real_single_bound_experiment

        seq = real_single_bound_experiment(4, (3, 4, 5), trials=40, seed=11, jobs=1)
        par = real_single_bound_experiment(4, (3, 4, 5), trials=40, seed=11, jobs=2)
        assert seq["errors"] == par["errors"]
