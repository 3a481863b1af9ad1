"""Command-line front end binding all modules.

Subcommands: range, encode, decode, harness, coprime, doa, montecarlo.
Stdout carries one JSON document (or CSV with --format csv where a table is
the natural payload); errors go to stderr as JSON lines with stable codes.
Exit codes: 0 success, 1 usage or I/O error, 2 no feasible proposal or an
ambiguous solution set. When --out names a directory, report paths write CSV
tables and matplotlib figures next to the JSON.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from . import __version__, coprime_sim, decoder_complex, decoder_real, design_tools, montecarlo
from .errors import NoFeasibleProposal, InsufficientDistinctClusters, RemrecError
from .numtheory import Number
from .remainder_model import (
    COMPLEX,
    REAL,
    ModulusSet,
    NoiseSpec,
    SourceSet,
    encode_complex,
    encode_real,
    load_observation,
    observation_to_dict,
    problem_from_dict,
)
from .signal_harness import (
    WaveformSpec,
    extract_residues,
    synthesize,
    write_sequence_binary,
    write_sequence_csv,
    write_spectrum_csv,
)

log = logging.getLogger("remrec")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INFEASIBLE_OR_AMBIGUOUS = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors must exit 1, not argparse's 2
        raise UsageError(message)


class UsageError(Exception):
    pass


def _emit(obj: dict) -> None:
    sys.stdout.write(json.dumps(obj, sort_keys=True) + "\n")


def _emit_error(code: str, message: str) -> None:
    sys.stderr.write(json.dumps({"code": code, "message": message}, sort_keys=True) + "\n")


def _parse_number(text: str) -> Number:
    if "/" in text:
        return Fraction(text)
    if "." in text or "e" in text or "E" in text:
        return float(text)
    return int(text)


def _parse_parts(text: str) -> tuple:
    return tuple(int(p) for p in text.split(","))


def _parse_floats(text: str) -> tuple:
    return tuple(float(v) for v in text.split(","))


def _outdir(path: Optional[str]) -> Optional[Path]:
    if path is None:
        return None
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_json(path: Path, obj: dict) -> None:
    path.write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def _cmd_range(args) -> int:
    ms = ModulusSet(_parse_number(args.gamma), _parse_parts(args.parts))
    report = design_tools.build_rate_report(ms, n_max=args.nmax).to_dict()
    report["kind"] = "range"
    report["gamma"] = float(ms.gamma)
    report["coprime_parts"] = list(ms.coprime_parts)
    if args.model != "both":
        key = "complex_dynamic_ranges" if args.model == COMPLEX else "real_dynamic_ranges"
        report["selected_model"] = args.model
        report["selected_dynamic_range"] = report[key][str(args.n)]
    if args.format == "csv":
        lines = ["model,n_sources,dynamic_range"]
        for n, d in sorted(report["complex_dynamic_ranges"].items(), key=lambda kv: int(kv[0])):
            lines.append(f"complex,{n},{d!r}")
        for n, d in sorted(report["real_dynamic_ranges"].items(), key=lambda kv: int(kv[0])):
            lines.append(f"real,{n},{d!r}")
        sys.stdout.write("\n".join(lines) + "\n")
    else:
        _emit(report)
    if args.out:
        _write_json(Path(args.out), report)
    return EXIT_OK


def _make_noise(args) -> NoiseSpec:
    if args.delta and args.delta > 0:
        if args.seed is None:
            raise UsageError("--seed is mandatory for randomized noise")
        return NoiseSpec(kind="uniform", delta=args.delta, seed=args.seed)
    return NoiseSpec()


def _cmd_encode(args) -> int:
    if args.infile:
        with open(args.infile, "r", encoding="utf-8") as fh:
            sources, ms, noise = problem_from_dict(json.load(fh))
    else:
        if not (args.gamma and args.parts and args.sources):
            raise UsageError("encode needs --in or --gamma/--parts/--sources")
        ms = ModulusSet(_parse_number(args.gamma), _parse_parts(args.parts))
        sources = SourceSet(_parse_floats(args.sources), args.model)
        noise = _make_noise(args)
    obs = encode_complex(sources, ms, noise) if sources.model == COMPLEX else encode_real(sources, ms, noise)
    doc = observation_to_dict(obs, shuffle_seed=args.seed)
    doc["kind"] = "observation"
    _emit(doc)
    if args.out:
        _write_json(Path(args.out), doc)
    return EXIT_OK


def _solutions_payload(obs, solutions, variant: str) -> dict:
    distinct = {tuple(round(e, 9) for e in s.estimates) for s in solutions}
    return {
        "kind": "solution",
        "model": obs.model,
        "variant": variant,
        "n_sources": obs.n_sources,
        "ambiguous": len(distinct) > 1,
        "solutions": [s.to_dict() for s in solutions],
    }


def _cmd_decode(args) -> int:
    obs = load_observation(args.infile)
    n = args.n if args.n else obs.n_sources
    variant = args.variant
    if variant == "auto":
        if obs.model == COMPLEX:
            variant = "complex"
        else:
            variant = "real-single" if n == 1 else "real-multi"
    if variant == "complex":
        solutions = decoder_complex.decode_complex(obs, n_sources=n)
    elif variant == "real-single":
        solutions = decoder_real.decode_real_single(obs)
    else:
        solutions = decoder_real.decode_real_multi(obs, n_sources=n)
    payload = _solutions_payload(obs, solutions, variant)
    _emit(payload)
    if args.out:
        _write_json(Path(args.out), payload)
    return EXIT_INFEASIBLE_OR_AMBIGUOUS if payload["ambiguous"] else EXIT_OK


def _parse_tones(text: str) -> tuple:
    tones = []
    for part in text.split(";"):
        fields = part.split(",")
        if len(fields) == 1:
            tones.append((1.0, float(fields[0]), 0.0))
        elif len(fields) == 3:
            tones.append((float(fields[0]), float(fields[1]), float(fields[2])))
        else:
            raise UsageError("tones must be 'f' or 'amp,f,phase' separated by ';'")
    return tuple(tones)


def _cmd_harness(args) -> int:
    ms = ModulusSet(_parse_number(args.gamma), _parse_parts(args.parts))
    tones = _parse_tones(args.tones)
    spec = WaveformSpec(tones=tones, model=args.model, noise_floor=args.noise_floor)
    n = len(tones)
    expected = n if args.model == COMPLEX else 2 * n
    out = _outdir(args.out)
    residues = []
    min_amp = spec.min_amplitude
    from . import plotting

    for l, m in enumerate(ms.moduli):
        seq = synthesize(spec, rate=float(m), window=args.window, seed=args.seed or 0)
        residues.append(tuple(sorted(extract_residues(seq, expected, min_amplitude=min_amp))))
        if out:
            write_sequence_csv(seq, str(out / f"sequence_m{l}.csv"))
            write_sequence_binary(seq, str(out / f"sequence_m{l}.bin"))
            write_spectrum_csv(seq, str(out / f"spectrum_m{l}.csv"))
            plotting.render_magnitude_spectrum(
                seq.samples, seq.window, str(out / f"spectrum_m{l}.png"), title=f"rate {float(m):g}"
            )
    from .remainder_model import ResidueObservation

    obs = ResidueObservation(
        modulus_set=ms,
        model=args.model,
        n_sources=n,
        noise_bound=args.delta or 0.0,
        residues=tuple(residues),
    )
    if args.model == COMPLEX:
        solutions = decoder_complex.decode_complex(obs, n_sources=n)
        variant = "complex"
    elif n == 1:
        solutions = decoder_real.decode_real_single(obs)
        variant = "real-single"
    else:
        solutions = decoder_real.decode_real_multi(obs, n_sources=n)
        variant = "real-multi"
    payload = _solutions_payload(obs, solutions, variant)
    payload["observation"] = observation_to_dict(obs, shuffle_seed=args.seed)
    _emit(payload)
    if out:
        _write_json(out / "solution.json", payload)
        _write_json(out / "observation.json", payload["observation"])
    return EXIT_INFEASIBLE_OR_AMBIGUOUS if payload["ambiguous"] else EXIT_OK


def _cmd_coprime(args) -> int:
    freqs = [f if "/" in f else float(f) for f in args.freqs.split(",")]
    config = coprime_sim.make_config(
        p=args.p, q=args.q, t=_parse_number(args.t), cycles=args.cycles, freqs=freqs, seed=args.seed or 0
    )
    max_lag = args.max_lag if args.max_lag is not None else args.p * args.q - 1
    lags = list(range(max_lag + 1))
    estimates = coprime_sim.estimate_autocorrelation(config, lags)
    spectrum = coprime_sim.spectrum_from_lags(estimates, args.fft_size, nyquist_interval=float(config.t))
    failures = coprime_sim.failure_condition(config)
    summary = {
        "kind": "coprime",
        "p": args.p,
        "q": args.q,
        "cycles": args.cycles,
        "failure_pairs": [{"i": i, "j": j, "failing": f} for i, j, f in failures],
        "max_bias": max(e.bias for e in estimates),
        "lags": [e.to_dict() for e in estimates],
    }
    if args.format == "csv":
        sys.stdout.write("lag,re,im,truth_re,truth_im,bias\n")
        for e in estimates:
            sys.stdout.write(
                f"{e.lag},{e.estimate.real!r},{e.estimate.imag!r},{e.truth.real!r},{e.truth.imag!r},{e.bias!r}\n"
            )
    else:
        _emit(summary)
    out = _outdir(args.out)
    if out:
        from . import plotting

        coprime_sim.write_lag_csv(estimates, str(out / "lags.csv"))
        coprime_sim.write_spectrum_points_csv(spectrum, str(out / "spectrum.csv"))
        plotting.render_spectrum(spectrum, str(out / "spectrum.png"), title="reconstructed power spectrum")
        plotting.render_lag_bias([e.lag for e in estimates], [e.bias for e in estimates], str(out / "bias.png"))
        _write_json(out / "coprime.json", summary)
    return EXIT_OK


def _cmd_doa(args) -> int:
    if args.infile:
        with open(args.infile, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        wavelength = Fraction(doc["lambda"])
        positions = tuple(Fraction(p) for p in doc["positions"])
    else:
        if not (args.wavelength and args.positions):
            raise UsageError("doa needs --in or --lambda/--positions")
        wavelength = Fraction(args.wavelength)
        positions = tuple(Fraction(p) for p in args.positions.split(","))
    geom = design_tools.ArrayGeometry(wavelength, positions)
    c, unique = design_tools.doa_representable(geom)
    witness = design_tools.doa_ambiguity_search(geom, grid=args.grid)
    payload = {
        "kind": "doa",
        "lambda": str(wavelength),
        "positions": [str(p) for p in positions],
        "C": str(c),
        "C_float": float(c),
        "unique": unique,
        "witness": None if witness is None else [float(witness[0]), float(witness[1])],
    }
    _emit(payload)
    if args.out:
        _write_json(Path(args.out), payload)
    return EXIT_OK


def _cmd_montecarlo(args) -> int:
    stats = montecarlo.run_suite(args.suite, args.trials, args.seed, jobs=args.jobs)
    errors = stats.pop("errors", None)
    stats["kind"] = "montecarlo"
    _emit(stats)
    out = _outdir(args.out)
    if out:
        _write_json(out / f"{args.suite}.json", stats)
        if errors:
            from . import plotting

            plotting.render_error_histogram(
                [e for e in errors if e != float("inf")],
                stats.get("bound", 0.0),
                str(out / f"{args.suite}-errors.png"),
                title=args.suite,
            )
    return EXIT_OK if stats["passed"] else EXIT_INFEASIBLE_OR_AMBIGUOUS


# ---------------------------------------------------------------------------
# Parser wiring
# ---------------------------------------------------------------------------

def build_parser() -> _Parser:
    parser = _Parser(prog="remrec", description="Remainder-based reconstruction toolkit")
    parser.add_argument("--version", action="version", version=f"remrec {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("range", help="dynamic ranges and the rate-selection noise bound")
    p.add_argument("--gamma", required=True)
    p.add_argument("--parts", required=True)
    p.add_argument("--model", choices=[COMPLEX, REAL, "both"], default="both")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--nmax", type=int, default=2)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_range)

    p = sub.add_parser("encode", help="encode sources into a residue observation")
    p.add_argument("--in", dest="infile")
    p.add_argument("--gamma")
    p.add_argument("--parts")
    p.add_argument("--model", choices=[COMPLEX, REAL], default=COMPLEX)
    p.add_argument("--sources")
    p.add_argument("--delta", type=float, default=0.0)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_encode)

    p = sub.add_parser("decode", help="decode a residue observation")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--variant", choices=["auto", "complex", "real-single", "real-multi"], default="auto")
    p.add_argument("--n", type=int)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_decode)

    p = sub.add_parser("harness", help="synthesize, extract residues, and decode end to end")
    p.add_argument("--gamma", required=True)
    p.add_argument("--parts", required=True)
    p.add_argument("--model", choices=[COMPLEX, REAL], default=COMPLEX)
    p.add_argument("--tones", required=True, help="'f1;f2' or 'amp,f,phase;...'")
    p.add_argument("--window", type=float, default=1.0)
    p.add_argument("--noise-floor", type=float, default=0.0)
    p.add_argument("--delta", type=float, default=0.0)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_harness)

    p = sub.add_parser("coprime", help="co-prime sampling bias table and spectrum")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--t", default="1")
    p.add_argument("--freqs", required=True, help="comma floats or exact 'p/q' strings")
    p.add_argument("--cycles", type=int, default=1024)
    p.add_argument("--max-lag", type=int)
    p.add_argument("--fft-size", type=int, default=256)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_coprime)

    p = sub.add_parser("doa", help="array representability and ambiguity witness")
    p.add_argument("--in", dest="infile", help="geometry JSON {lambda, positions} of rational strings")
    p.add_argument("--lambda", dest="wavelength")
    p.add_argument("--positions", help="comma rationals, first must be 0")
    p.add_argument("--grid", type=int, default=2048)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_doa)

    p = sub.add_parser("montecarlo", help="run a verification suite")
    p.add_argument("--suite", required=True, choices=sorted(montecarlo.SUITES))
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_montecarlo)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    level = os.environ.get("REMREC_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), stream=sys.stderr)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        _emit_error("usage", str(exc))
        return EXIT_ERROR
    except (NoFeasibleProposal, InsufficientDistinctClusters) as exc:
        _emit_error(exc.code, str(exc))
        return EXIT_INFEASIBLE_OR_AMBIGUOUS
    except RemrecError as exc:
        _emit_error(exc.code, str(exc))
        return EXIT_ERROR
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        _emit_error("io-or-value-error", str(exc))
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
