"""Command-line entry point: ``eegapprox {extract,sweep,pareto,plotdata}``.

Exit codes: 0 success, 2 usage or input error, 3 measurement error.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import datetime as dt
import hashlib
import io
import json
import logging
import math
import platform as host_platform
import sys
from pathlib import Path

from eegapprox import __version__
from eegapprox.approximation import FFT_LENGTHS, MAX_LEVEL, ApproxConfig, level_to_config
from eegapprox.errors import EegApproxError, InsufficientMeasurementError
from eegapprox.evaluation import train_nearest_centroid
from eegapprox.explorer.pareto import pareto_indices, objectives
from eegapprox.explorer.power import (
    CLUSTERS,
    CORE_COUNTS,
    DEFAULT_ANCHORS,
    FREQS_MHZ,
    calibrate_power,
    load_anchors,
)
from eegapprox.explorer.sweep import (
    CSV_FIELDS,
    DEFAULT_CLUSTER_SPEED,
    SweepSettings,
    default_platforms,
    format_sweep_csv,
    read_sweep_lines,
    run_sweep,
)
from eegapprox.signal_io import BAND_SEPARATED_CLASSES, EpochSpec, load_csv, select_channels, synth_labeled
from eegapprox.spectral import BAND_NAMES, extract_epoch_features, get_profile

EXIT_OK, EXIT_USAGE, EXIT_MEASUREMENT = 0, 2, 3
AXES = ("power", "perf", "accuracy", "level", "cores")
AXIS_FIELD = {"power": "power_w", "perf": "perf_hb_s", "accuracy": "accuracy", "level": "level", "cores": "cores"}

log = logging.getLogger("eegapprox")


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _csv_list(kind):
    def parse(text):
        try:
            return [kind(x) for x in text.split(",") if x.strip()]
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad list: {text!r}") from None

    return parse


def _add_approx_flags(p):
    g = p.add_argument_group("approximation")
    g.add_argument("--level", type=int, choices=range(MAX_LEVEL + 1), default=0, metavar="0..5",
                   help="approximation ladder level (default 0, accurate)")
    g.add_argument("--overlap", type=float, help="override overlap fraction in [0, 0.5]")
    g.add_argument("--fft-len", type=int, choices=FFT_LENGTHS, help="override FFT / segment length")
    g.add_argument("--perforation-stride", type=int, help="zero every k-th segment sample (1 = off)")


def _approx_from(args) -> ApproxConfig:
    cfg = level_to_config(args.level)
    changes = {}
    if args.overlap is not None:
        changes["overlap_fraction"] = args.overlap
    if args.fft_len is not None:
        changes["fft_length"] = args.fft_len
    if args.perforation_stride is not None:
        changes["perforation_stride"] = args.perforation_stride
    return dataclasses.replace(cfg, **changes) if changes else cfg


def _add_input_flags(p, required):
    g = p.add_argument_group("input")
    g.add_argument("--input", "-i", required=required, help="CSV signal file")
    g.add_argument("--rate", type=float, default=256.0, help="sample rate in Hz (default 256)")
    g.add_argument("--epoch-len", type=int, required=required,
                   help="epoch length in samples" + ("" if required else " (required with --input)"))
    g.add_argument("--epoch-stride", type=int, help="epoch stride in samples (default: epoch length)")
    g.add_argument("--channels", type=_csv_list(str), help="comma-separated channel subset")
    g.add_argument("--profile", default="seizure",
                   help="seizure, sleep, stress, or a name,low_hz,high_hz profile file")


def _load_input(args):
    rec = load_csv(args.input, args.rate, EpochSpec(args.epoch_len, args.epoch_stride))
    if args.channels:
        rec = select_channels(rec, args.channels)
    return rec


# ---------------------------------------------------------------- extract


def cmd_extract(args) -> int:
    rec = _load_input(args)
    profile = get_profile(args.profile)
    cfg = _approx_from(args)
    feats = extract_epoch_features(rec, profile, cfg)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("epoch", "channel") + BAND_NAMES)
    for e, fv in enumerate(feats):
        for name, row in zip(fv.channel_names, fv.values):
            w.writerow([e, name] + [repr(float(v)) for v in row])
    _emit(buf.getvalue(), args.output)
    return EXIT_OK


def _emit(text: str, output) -> None:
    if output in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(output).write_text(text, encoding="utf-8")


# ---------------------------------------------------------------- sweep


def _sweep_dataset(args):
    if args.input:
        if args.epoch_len is None:
            raise argparse.ArgumentTypeError("--epoch-len is required with --input")
        rec = _load_input(args)
        if rec.labels is None:
            raise EegApproxError("sweep input needs a label column to train the reference classifier")
        return rec, {"input": args.input, "sha256": _sha256(args.input)}
    n = args.synth_epochs
    labels = [i % 2 for i in range(n)]
    rec = synth_labeled(BAND_SEPARATED_CLASSES, labels, args.synth_epoch_s, args.rate,
                        noise_rms=args.synth_noise, seed=args.seed, n_channels=args.synth_channels)
    return rec, {"synthetic": True, "seed": args.seed, "epochs": n, "epoch_s": args.synth_epoch_s,
                 "channels": args.synth_channels, "noise_rms": args.synth_noise, "classes": BAND_SEPARATED_CLASSES}


def _summary(records) -> str:
    lines = [f"{'axis':<10} {'min':>12} {'max':>12}"]
    for label, attr in (("power_w", "power_w"), ("perf_hb_s", "perf_hb_s"), ("accuracy", "accuracy")):
        vals = [getattr(r, attr) for r in records]
        lines.append(f"{label:<10} {min(vals):>12.4f} {max(vals):>12.4f}")
    lines.append(f"{len(records)} records")
    return "\n".join(lines) + "\n"


def cmd_sweep(args) -> int:
    rec, source = _sweep_dataset(args)
    profile = get_profile(args.profile)
    anchors = load_anchors(args.power_calibration) if args.power_calibration else list(DEFAULT_ANCHORS)
    params = calibrate_power(anchors)
    clf = train_nearest_centroid(extract_epoch_features(rec, profile, level_to_config(0)), rec.labels)
    speed = dict(DEFAULT_CLUSTER_SPEED, LITTLE=args.little_speed)
    settings = SweepSettings(
        duration_s=args.duration,
        repetitions=args.repetitions,
        min_heartbeats=args.min_heartbeats,
        cluster_speed=speed,
        use_labels=args.truth == "labels",
    )
    platforms = default_platforms(args.clusters, args.cores, args.freqs)
    measured = {}
    records = run_sweep(rec, profile, clf, platforms, args.levels, params, settings, measured)

    out = Path(args.output)
    out.write_text(format_sweep_csv(records), encoding="utf-8")
    manifest = {
        "command": "sweep",
        "tool_version": __version__,
        "timestamp": dt.datetime.now(dt.timezone.utc).isoformat(),
        "parameters": {
            "profile": args.profile,
            "clusters": args.clusters,
            "cores": args.cores,
            "freqs_mhz": args.freqs,
            "levels": args.levels,
            "rate_hz": args.rate,
            "truth": args.truth,
            "power_calibration": args.power_calibration,
        },
        "inputs": source,
        "output": {"path": str(out), "sha256": _sha256(out), "schema": list(CSV_FIELDS)},
        "calibration": {
            "anchors": [[p.cluster, p.cores, p.freq_mhz, w] for p, w in anchors],
            "params": {k: dataclasses.asdict(v) for k, v in params.clusters.items()},
            "residual_w": params.residuals(),
        },
        "harness": {
            "host": host_platform.node(),
            "machine": host_platform.machine(),
            "python": host_platform.python_version(),
            "duration_s": settings.duration_s,
            "repetitions": settings.repetitions,
            "min_heartbeats": settings.min_heartbeats,
            "measured_columns": ["perf_hb_s"],
            "emulation": {
                "frequency": f"perf scaled by freq_mhz / {settings.reference_freq_mhz}",
                "cluster_speed": settings.cluster_speed,
                "note": "power is modeled, perf is measured on the host and emulated per platform",
            },
            "host_measurements": [
                {"workers": n, "level": lv, "median_hb_s": r.perf_hb_s, "rates": list(r.rates),
                 "heartbeats": list(r.heartbeats)}
                for (n, lv), r in sorted(measured.items())
            ],
        },
    }
    manifest_path = Path(args.manifest) if args.manifest else out.with_name(out.name + ".json")
    manifest_path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    sys.stdout.write(_summary(records))
    return EXIT_OK


# ---------------------------------------------------------------- pareto / plotdata


def _read_text(path) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text(encoding="utf-8")


def cmd_pareto(args) -> int:
    header, rows = read_sweep_lines(_read_text(args.sweep))
    keep = pareto_indices([objectives(r) for _, r in rows]) if rows else []
    _emit(header + "".join(rows[i][0] for i in keep), args.output)
    sys.stderr.write(f"pareto front: {len(keep)} of {len(rows)} records\n")
    return EXIT_OK


def cmd_plotdata(args) -> int:
    axes = [a.strip() for a in args.axes.split(",") if a.strip()]
    bad = [a for a in axes if a not in AXES]
    if bad or not axes:
        raise argparse.ArgumentTypeError(f"unknown axis {','.join(bad) or '(none)'}; choose from {','.join(AXES)}")
    text = _read_text(args.sweep)
    rows = read_sweep_lines(text)[1] if text.strip() else []
    groups: dict[tuple, list[str]] = {}
    for _, r in rows:
        d = dataclasses.asdict(r)
        d.update(d.pop("platform"))
        groups.setdefault((r.platform.cluster, r.platform.cores, r.platform.freq_mhz), []).append(
            " ".join(repr(d[AXIS_FIELD[a]]) for a in axes)
        )
    blocks = [f"# {c} cores={n} freq_mhz={f}\n# {' '.join(axes)}\n" + "\n".join(lines) + "\n"
              for (c, n, f), lines in groups.items()]
    _emit("\n\n".join(blocks), args.output)
    return EXIT_OK


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eegapprox", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="per-epoch band-power features")
    _add_input_flags(p, required=True)
    _add_approx_flags(p)
    p.add_argument("--output", "-o", help="feature CSV (default stdout)")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("sweep", help="power/performance/accuracy design-space sweep")
    _add_input_flags(p, required=False)
    p.add_argument("--seed", type=int, default=0, help="seed for the synthetic dataset (no --input)")
    p.add_argument("--synth-epochs", type=int, default=20)
    p.add_argument("--synth-epoch-s", type=float, default=30.0)
    p.add_argument("--synth-channels", type=int, default=2)
    p.add_argument("--synth-noise", type=float, default=1.0)
    p.add_argument("--clusters", type=_csv_list(str), default=list(CLUSTERS))
    p.add_argument("--cores", type=_csv_list(int), default=list(CORE_COUNTS))
    p.add_argument("--freqs", type=_csv_list(int), default=list(FREQS_MHZ))
    p.add_argument("--levels", type=_csv_list(int), default=list(range(MAX_LEVEL + 1)))
    p.add_argument("--power-calibration", help="cluster,cores,freq_mhz,watts anchor CSV")
    p.add_argument("--duration", type=float, default=1.0, help="seconds per timed repetition")
    p.add_argument("--repetitions", type=int, default=3)
    p.add_argument("--min-heartbeats", type=int, default=50)
    p.add_argument("--little-speed", type=float, default=DEFAULT_CLUSTER_SPEED["LITTLE"],
                   help="LITTLE throughput relative to big")
    p.add_argument("--truth", choices=("baseline", "labels"), default="baseline",
                   help="score against level-0 predictions or the dataset labels")
    p.add_argument("--output", "-o", required=True, help="sweep CSV")
    p.add_argument("--manifest", help="JSON manifest (default: <output>.json)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("pareto", help="non-dominated rows of a sweep CSV")
    p.add_argument("sweep", help="sweep CSV ('-' for stdin)")
    p.add_argument("--output", "-o", help="front CSV (default stdout)")
    p.set_defaults(func=cmd_pareto)

    p = sub.add_parser("plotdata", help="whitespace tables for plotting")
    p.add_argument("sweep", help="sweep CSV ('-' for stdin)")
    p.add_argument("--axes", default="power,perf,accuracy", help=f"comma list from {','.join(AXES)}")
    p.add_argument("--output", "-o", help="table file (default stdout)")
    p.set_defaults(func=cmd_plotdata)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except InsufficientMeasurementError as exc:
        print(f"eegapprox {args.command}: {exc}", file=sys.stderr)
        return EXIT_MEASUREMENT
    except (EegApproxError, argparse.ArgumentTypeError, OSError) as exc:
        print(f"eegapprox {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
