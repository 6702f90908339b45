"""Command-line front end.

Subcommands: haar, compose, reconstruct, sample, metrics, validate, rates,
space.  Mode indices are 1-based on the command line and in all files.
Validation failures exit with code 2 and a single machine-parseable
``error: <reason>`` line on stderr.  Re-running any command with identical
flags produces byte-identical data files.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import circuits, metrics, sampling, validation
from ._util import WORKERS_ENV, resolve_workers
from ._version import __version__
from .matrices import haar_unitary, load_matrix, save_matrix, unitarity_report

_SAMPLE_CHUNK = 65536


def parse_mode_list(text: str) -> tuple:
    """Parse 1-based mode lists like "1,2,4,7" or "1..20" (ranges inclusive)."""
    modes = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..")
            modes.extend(range(int(lo), int(hi) + 1))
        elif part:
            modes.append(int(part))
    if not modes:
        raise ValueError(f"empty mode list {text!r}")
    if min(modes) < 1:
        raise ValueError(f"mode lists are 1-based, got {min(modes)}")
    return tuple(sorted(mode - 1 for mode in modes))


def _matrix_report(matrix, haar_stats: bool = True) -> dict:
    rep = unitarity_report(matrix)
    doc = {
        "version": __version__,
        "matrix_fingerprint": matrix.fingerprint,
        "m": matrix.m,
        "unitarity_deviation": rep.off_diagonal_mean,
        "diagonal_max_deviation": rep.diagonal_max_deviation,
        "spectral_norm": rep.spectral_norm,
        "amplitude_pvalue": None,
        "phase_pvalue": None,
    }
    if matrix.phase_gauge:
        doc["phase_gauge"] = matrix.phase_gauge
    if matrix.normalization:
        doc["normalization"] = matrix.normalization
    if haar_stats and matrix.m >= 8:
        stats = circuits.haar_statistics_test(matrix)
        doc["amplitude_pvalue"] = stats.amplitude_pvalue
        doc["phase_pvalue"] = stats.phase_pvalue
    return doc


def _write_json(path, doc) -> None:
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def cmd_haar(args) -> int:
    matrix = haar_unitary(args.modes, args.seed)
    save_matrix(args.output, matrix)
    if args.report:
        _write_json(args.report, _matrix_report(matrix))
    return 0


def cmd_compose(args) -> int:
    with open(args.circuit) as fh:
        circuit = circuits.circuit_from_dict(json.load(fh))
    matrix = circuits.compose(circuit)
    save_matrix(args.output, matrix)
    if args.report:
        _write_json(args.report, _matrix_report(matrix))
    return 0


def cmd_reconstruct(args) -> int:
    meas = circuits.load_measurements(args.amplitudes, args.phases, args.eff)
    matrix = circuits.reconstruct(meas, normalization=args.normalization)
    save_matrix(args.output, matrix)
    if args.report:
        _write_json(args.report, _matrix_report(matrix))
    return 0


def _sample_header(samples: sampling.SampleSet) -> dict:
    header = {
        "model": samples.model,
        "m": samples.m,
        "n": samples.n,
        "input": [c + 1 for c in samples.input_modes],
        "seed": samples.seed,
        "matrix_hash": samples.matrix_fingerprint,
        "version": __version__,
    }
    if samples.params:
        header["params"] = samples.params
    return header


def cmd_sample(args) -> int:
    workers = resolve_workers(args.workers)
    model = args.model
    if model == "uniform":
        if args.modes is None or args.photons is None:
            raise ValueError("uniform model needs --modes and --photons")

        def make(start, count):
            return sampling.sample_uniform(
                args.modes, args.photons, count, args.seed, space=args.space, start=start
            )

    else:
        if not args.matrix:
            raise ValueError(f"model {model!r} needs --matrix")
        if not args.input:
            raise ValueError(f"model {model!r} needs --input")
        matrix = load_matrix(args.matrix)
        config = sampling.InputConfig(matrix.m, parse_mode_list(args.input))
        if model == "boson":

            def make(start, count):
                return sampling.sample_boson(
                    matrix, config, count, args.seed, workers=workers, start=start
                )

        elif model == "distinguishable":

            def make(start, count):
                return sampling.sample_distinguishable(
                    matrix, config, count, args.seed, start=start
                )

        elif model == "lossy":
            if args.detect is None:
                raise ValueError("lossy model needs --detect")
            loss = sampling.LossSpec(config.n, args.detect)

            def make(start, count):
                return sampling.sample_lossy(
                    matrix, config, loss, count, args.seed, workers=workers, start=start
                )

        elif model == "partial":
            if args.gram:
                gram_matrix = load_matrix(args.gram)
                gram = np.asarray(gram_matrix.mat)
            elif args.overlap is not None:
                gram = sampling.uniform_gram(config.n, args.overlap)
            else:
                raise ValueError("partial model needs --overlap or --gram")

            def make(start, count):
                return sampling.sample_partial(
                    matrix, config, gram, count, args.seed, start=start
                )

        else:
            raise ValueError(f"unknown model {model!r}")

    first = make(0, min(_SAMPLE_CHUNK, args.n))
    with open(args.output, "w") as fh:
        fh.write(json.dumps(_sample_header(first)) + "\n")
        written = 0
        chunk = first
        while True:
            for i, row in enumerate(chunk.draws.tolist()):
                fh.write(json.dumps({"i": written + i, "out": [r + 1 for r in row]}) + "\n")
            written += len(chunk)
            print(f"sampled {written}/{args.n}", file=sys.stderr)
            if written >= args.n:
                break
            chunk = make(written, min(_SAMPLE_CHUNK, args.n - written))
    return 0


def _exact_pmf_for(samples: sampling.SampleSet, matrix, workers: int) -> dict:
    model = samples.model
    if model == "uniform":
        return sampling.uniform_distribution(
            samples.m, samples.n, samples.params.get("space", "collision_free")
        )
    if matrix is None:
        raise ValueError(f"model {model!r} needs --matrix to compute its exact pmf")
    config = sampling.InputConfig(samples.m, samples.input_modes)
    if model == "boson":
        return sampling.exact_distribution(matrix, config, workers=workers)
    if model == "distinguishable":
        return sampling.distinguishable_distribution(matrix, config)
    if model == "lossy":
        loss = sampling.LossSpec(config.n, samples.n)
        return sampling.lossy_distribution(matrix, config, loss, workers=workers)
    if model == "partial":
        gram = np.asarray(samples.params["gram_re"]) + 1j * np.asarray(samples.params["gram_im"])
        return sampling.distribution_partial(matrix, config, gram)
    raise ValueError(f"unknown model {model!r}")


def _check_hash(samples: sampling.SampleSet, matrix) -> None:
    if matrix is not None and samples.matrix_fingerprint:
        if samples.matrix_fingerprint != matrix.fingerprint:
            raise ValueError(
                f"matrix fingerprint {matrix.fingerprint} does not match samples "
                f"(expected {samples.matrix_fingerprint})"
            )


def cmd_metrics(args) -> int:
    samples = sampling.load_samples(args.samples)
    matrix = load_matrix(args.matrix) if args.matrix else None
    _check_hash(samples, matrix)
    workers = resolve_workers(args.workers)
    exact = _exact_pmf_for(samples, matrix, workers)
    emp = metrics.empirical_distribution(samples)
    space_full = metrics.state_space_size(samples.m, samples.n, "full")
    space_cf = metrics.state_space_size(samples.m, samples.n, "collision_free")
    doc = {
        "version": __version__,
        "matrix_fingerprint": samples.matrix_fingerprint or None,
        "model": samples.model,
        "n_draws": len(samples),
        "fidelity": metrics.fidelity(exact, emp),
        "tvd": metrics.tvd(exact, emp),
        "space_full": str(space_full),
        "space_collision_free": str(space_cf),
        "sparse_bias_warning": metrics.sparse_regime(len(samples), len(exact)),
    }
    _write_json(args.output, doc)
    return 0


def cmd_validate(args) -> int:
    samples = sampling.load_samples(args.samples)
    matrix = load_matrix(args.matrix)
    _check_hash(samples, matrix)
    if args.input:
        input_modes = parse_mode_list(args.input)
    elif samples.input_modes:
        input_modes = samples.input_modes
    else:
        raise ValueError(
            f"{samples.model} samples carry no input modes; pass --input to define "
            "the hypothesis configuration"
        )
    config = sampling.InputConfig(samples.m, input_modes)
    if args.kind == "bayes":
        trace = validation.bayes_trace(matrix, config, samples)
        paired = None
    else:
        trace = validation.rne_trace(matrix, config, samples)
        paired = None
        if args.paired_uniform:
            paired_seed = args.paired_seed
            if paired_seed is None:
                paired_seed = (samples.seed ^ 0x9E3779B9) % 2**64
            uniform = sampling.sample_uniform(
                samples.m, samples.n, len(samples), paired_seed, space="collision-free"
            )
            paired = validation.rne_trace(matrix, config, uniform)
    validation.save_trace(args.output, trace, paired)
    if args.meta:
        extra = {"samples_model": samples.model}
        if paired is not None:
            extra["paired"] = "uniform"
        validation.save_trace_metadata(args.meta, trace, matrix.fingerprint, extra)
    return 0


def cmd_rates(args) -> int:
    rate = metrics.expected_rate(args.pulse_rate, args.sent, args.detect, args.eta)
    if args.output:
        _write_json(
            args.output,
            {
                "version": __version__,
                "pulse_rate_hz": args.pulse_rate,
                "n_sent": args.sent,
                "n_detect": args.detect,
                "eta": args.eta,
                "rate_hz": rate,
            },
        )
    print(repr(rate))
    return 0


def cmd_space(args) -> int:
    size = metrics.state_space_size(args.modes, args.photons, args.space)
    if args.output:
        _write_json(
            args.output,
            {
                "version": __version__,
                "m": args.modes,
                "n": args.photons,
                "space": args.space,
                "size": str(size),
            },
        )
    print(size)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bosonsim",
        description="Boson-sampling simulation and validation toolkit",
    )
    parser.add_argument("--version", action="version", version=f"bosonsim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("haar", help="generate a Haar-random unitary")
    p.add_argument("--modes", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("-o", "--output", required=True, help="matrix JSON path")
    p.add_argument("--report", help="unitarity & Haar-statistics report JSON")
    p.set_defaults(func=cmd_haar)

    p = sub.add_parser("compose", help="build a unitary from a beam-splitter mesh")
    p.add_argument("--circuit", required=True, help="circuit JSON path")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--report")
    p.set_defaults(func=cmd_compose)

    p = sub.add_parser("reconstruct", help="reconstruct a matrix from measured data")
    p.add_argument("--amplitudes", required=True, help="CSV, row = output mode")
    p.add_argument("--phases", required=True, help="CSV, row = output mode")
    p.add_argument("--eff", required=True, help="CSV, one detector efficiency per line")
    p.add_argument("--normalization", choices=["column", "global"], default="column")
    p.add_argument(
        "--gauge",
        choices=["row0col0"],
        default="row0col0",
        help="phase gauge recorded in the output metadata",
    )
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--report")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("sample", help="draw samples under a photon model")
    p.add_argument("--model", choices=sampling.MODELS, default="boson")
    p.add_argument("--matrix", help="matrix JSON (all models except uniform)")
    p.add_argument("--input", help="1-based input modes, e.g. 1,2,4,7 or 1..20")
    p.add_argument("--n", type=int, required=True, help="number of draws")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--detect", type=int, help="detected photons (lossy model)")
    p.add_argument("--overlap", type=float, help="pairwise indistinguishability (partial)")
    p.add_argument("--gram", help="Gram matrix JSON (partial)")
    p.add_argument("--space", choices=["collision-free", "full"], default="collision-free")
    p.add_argument("--modes", type=int, help="mode count (uniform model)")
    p.add_argument("--photons", type=int, help="photon count (uniform model)")
    p.add_argument("--workers", type=int, default=None, help=f"default ${WORKERS_ENV} or 1")
    p.add_argument("-o", "--output", required=True, help="JSONL sample path")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("metrics", help="fidelity/distance of samples vs the exact pmf")
    p.add_argument("--matrix")
    p.add_argument("--samples", required=True)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("-o", "--output", required=True, help="report JSON path")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("validate", help="discrimination traces (bayes / rne)")
    p.add_argument("kind", choices=["bayes", "rne"])
    p.add_argument("--matrix", required=True)
    p.add_argument("--samples", required=True)
    p.add_argument("--input", help="override input modes (defaults to the sample header)")
    p.add_argument("--paired-uniform", action="store_true", help="rne: overlay a uniform run")
    p.add_argument("--paired-seed", type=int, default=None)
    p.add_argument("-o", "--output", required=True, help="trace CSV path")
    p.add_argument("--meta", help="companion metadata JSON path")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("rates", help="coincidence-rate model")
    p.add_argument("--pulse-rate", type=float, required=True)
    p.add_argument("--sent", type=int, required=True)
    p.add_argument("--detect", type=int, required=True)
    p.add_argument("--eta", type=float, required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_rates)

    p = sub.add_parser("space", help="exact output state-space size")
    p.add_argument("--modes", type=int, required=True)
    p.add_argument("--photons", type=int, required=True)
    p.add_argument("--space", choices=["full", "collision-free"], default="full")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_space)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
