"""Command-line interface: ``spp-polar construct|weights|simulate|pmr``.

Every file written is accompanied by ``<file>.manifest.json`` recording the
command, the parsed arguments, the tool version, the seed and a timestamp.
Failures print a single ``error: <kind>: <message>`` line and exit nonzero.
"""

from __future__ import annotations

import argparse
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .analysis import (
    min_weight_estimate_scl,
    min_weight_lower_bound_report,
    path_metric_range,
    pmr_csv,
    pmr_traces,
    weight_spectrum_exhaustive,
)
from .channel import ChannelConfig, SweepConfig, load_sweep_config, results_csv, run_sweep
from .codec import FAMILIES, CodeSpec, PAC_DEFAULT_POLY, ca_polar_code, deep_polar_code, pac_code, polar_code, spp_code
from .crc import CRC3, CRC11, parse_poly
from .polar_core import bec_reliability, ga_reliability, load_5g_sequence, log2_int


class CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        sys.stderr.write(f"error: usage: {message}\n")
        sys.exit(2)


def _reliability(text: str, N: int, rate: float):
    kind, _, arg = text.partition(":")
    n = log2_int(N)
    if kind == "bec":
        return bec_reliability(n, float(arg or 0.5))
    if kind == "ga":
        if not arg:
            raise CliError("ga reliability needs a design Eb/N0, e.g. ga:2.0")
        return ga_reliability(n, float(arg), rate)
    if kind == "5g":
        return load_5g_sequence(arg or None, length=N)
    raise CliError(f"unknown reliability {text!r}; use bec:<eps>, ga:<ebn0_db> or 5g[:<file>]")


def _pairs(text: str | None) -> list[tuple[int, int]]:
    if not text:
        return []
    out = []
    for item in text.split(","):
        a, sep, b = item.strip().partition(":")
        if not sep:
            raise CliError(f"expected size:dimension pairs, got {item!r}")
        out.append((int(a), int(b)))
    return out


def _poly(text: str | None, default=()):
    if text is None:
        return default
    named = {"crc3": CRC3, "crc11": CRC11, "none": ()}
    if text.lower() in named:
        return named[text.lower()]
    return parse_poly(text)


def _write(path: str | None, text: str, args: argparse.Namespace, seed: int | None = None) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    out = Path(path)
    out.write_text(text)
    config = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    manifest = {
        "command": args.command,
        "config": config,
        "version": __version__,
        "seed": seed,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }
    Path(f"{out}.manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")


def _load_spec(path: str) -> CodeSpec:
    return CodeSpec.from_json(Path(path).read_text())


def build_spec(args: argparse.Namespace) -> CodeSpec:
    N, K = args.n, args.k
    log2_int(N)
    if not 0 <= K <= N:
        raise CliError(f"K = {K} must lie in [0, N = {N}]")
    rel = _reliability(args.reliability, N, max(K, 1) / N)
    fam = args.family
    if fam == "polar":
        return polar_code(rel, K)
    if fam == "ca_polar":
        return ca_polar_code(rel, K, _poly(args.crc, CRC11))
    if fam == "spp":
        return spp_code(rel, K, _pairs(args.type1), type2=args.type2 == "auto", crc_poly=_poly(args.crc))
    if fam == "pac":
        return pac_code(rel, K, _poly(args.conv, PAC_DEFAULT_POLY), profile=args.pac_profile)
    layers = _pairs(args.deep)
    if not layers:
        raise CliError("deep_polar needs --deep N1:K1,N2:K2,...")
    return deep_polar_code(rel, K, [a for a, _ in layers], [b for _, b in layers])


def cmd_construct(args) -> None:
    spec = build_spec(args)
    _write(args.out, spec.to_json(), args)
    if spec.profile.info0:
        report = min_weight_lower_bound_report(spec)
        sys.stderr.write(report)


def cmd_weights(args) -> None:
    spec = _load_spec(args.spec)
    mode = args.mode
    if mode == "exhaustive":
        spectrum = weight_spectrum_exhaustive(spec, max_k=args.max_k)
    elif mode.startswith("scl:"):
        spectrum = min_weight_estimate_scl(spec, int(float(mode[4:]))).as_spectrum()
    else:
        raise CliError(f"unknown mode {mode!r}; use exhaustive or scl:<S>")
    _write(args.out, spectrum.to_csv(), args)


def cmd_simulate(args) -> None:
    if args.config:
        sweep = load_sweep_config(args.config)
    else:
        if not args.spec or not args.ebn0:
            raise CliError("simulate needs --spec and --ebn0, or --config")
        sweep = SweepConfig(
            spec_path=args.spec,
            list_size=args.list_size,
            ebn0_db=tuple(float(v) for v in args.ebn0.split(",")),
            min_errors=args.min_errors,
            max_trials=args.max_trials,
            seed=args.seed,
            genie=args.genie,
            workers=args.workers,
            spec_id=args.spec_id or Path(args.spec).stem,
        )
    if sweep.max_trials < 1:
        raise CliError(f"max_trials must be >= 1, got {sweep.max_trials}")
    if sweep.min_errors < 1:
        raise CliError(f"min_errors must be >= 1, got {sweep.min_errors}")
    records = run_sweep(sweep)
    _write(args.out, results_csv(records), args, seed=sweep.seed)


def cmd_pmr(args) -> None:
    spec = _load_spec(args.spec)
    if args.noises < 1:
        raise CliError("noises must be >= 1")
    channel = ChannelConfig.awgn(args.ebn0, spec.rate)
    traces = pmr_traces(spec, args.list_size, channel, args.noises, args.seed, spec_id=Path(args.spec).stem)
    _write(args.out, pmr_csv(path_metric_range(traces)), args, seed=args.seed)


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="spp-polar", description="Sparsely pre-transformed polar codes.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("construct", help="build a code and write its JSON spec")
    p.add_argument("--n", type=int, required=True, help="block length N")
    p.add_argument("--k", type=int, required=True, help="number of message bits K")
    p.add_argument("--family", choices=FAMILIES, default="spp")
    p.add_argument("--reliability", default="5g", help="bec:<eps> | ga:<ebn0_db> | 5g[:<file>]")
    p.add_argument("--type1", default="", help="Type-I blocks, e.g. 2:1,8:3")
    p.add_argument("--type2", choices=("auto", "off"), default="auto")
    p.add_argument("--crc", default=None, help="CRC polynomial bits or crc3/crc11")
    p.add_argument("--conv", default=None, help="PAC convolution polynomial bits, c_0 first")
    p.add_argument("--pac-profile", choices=("rm", "reliability"), default="rm")
    p.add_argument("--deep", default="", help="deep polar layers, e.g. 2:1,16:10,128:21")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("weights", help="weight spectrum of a spec")
    p.add_argument("--spec", required=True)
    p.add_argument("--mode", default="exhaustive", help="exhaustive | scl:<S>")
    p.add_argument("--max-k", type=int, default=28)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_weights)

    p = sub.add_parser("simulate", help="Monte-Carlo BLER over BI-AWGN")
    p.add_argument("--spec")
    p.add_argument("--config", help="JSON sweep config")
    p.add_argument("--ebn0", help="comma-separated Eb/N0 points in dB")
    p.add_argument("--list-size", type=int, default=8)
    p.add_argument("--min-errors", type=int, default=100)
    p.add_argument("--max-trials", type=int, default=10**6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--genie", action="store_true")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--spec-id", default="")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("pmr", help="mean path-metric range per decoding step")
    p.add_argument("--spec", required=True)
    p.add_argument("--ebn0", type=float, default=3.0)
    p.add_argument("--list-size", type=int, default=2)
    p.add_argument("--noises", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_pmr)
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        args.func(args)
    except (CliError, ValueError, MemoryError, OSError, KeyError, json.JSONDecodeError) as exc:
        kind = "invalid" if isinstance(exc, CliError) else type(exc).__name__
        message = str(exc).replace("\n", " ")
        sys.stderr.write(f"error: {kind}: {message}\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
