"""Command-line entry point: channel diagnostics, single runs, and sweeps.

Results are data-only: a crosstalk CSV plus a JSON manifest carrying the
resolved configuration and derived channel statistics, sufficient to re-run
bit-identically (`oamsat run <manifest.json> ...`).

Exit codes: 0 success, 2 config error, 3 validity error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import datetime
import json
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .config import config_snapshot, load_config, parse_quantity
from .errors import ConfigError, NumericalError, OamSatError, ValidityError
from .realization import AoMode
from .simulation import (
    RunResult,
    SimConfig,
    SweepResult,
    resolve_aperture,
    run,
    sweep_altitude,
    sweep_ground,
    sweep_wavelength,
)
from .turbulence import channel_stats

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_VALIDITY = 3
EXIT_NUMERICAL = 4

_FLOAT_FORMAT = "%.9g"


def _fmt(x: float) -> str:
    return _FLOAT_FORMAT % x


def _stats_payload(config: SimConfig) -> dict:
    stats = channel_stats(config.geometry, config.atmosphere, config.w0)
    aperture = resolve_aperture(config)
    return {
        "rytov_variance": stats.sigma_R2,
        "scintillation_index": stats.sigma_I2,
        "fried_parameter_m": stats.r_F,
        "fresnel_ratio": stats.Omega,
        "log_width_mean": stats.theta_mean,
        "centroid_variance_m2": stats.var_x0,
        "log_width_variance": stats.var_theta,
        "log_width_covariance": stats.cov_theta,
        "recommended_r_t_m": aperture.r_t,
        "recommended_r_a_m": aperture.r_a,
    }


def cmd_channel_params(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    payload = _stats_payload(config)
    geo = config.geometry
    print(
        f"channel: H = {_fmt(geo.H)} m, h0 = {_fmt(geo.h0)} m, "
        f"zenith = {_fmt(geo.theta_z)} rad, lambda = {_fmt(geo.wavelength)} m"
    )
    for key, value in payload.items():
        print(f"  {key:24s} {_fmt(value)}")
    if args.json:
        Path(args.json).write_text(json.dumps(payload, indent=2) + "\n")
    return EXIT_OK


def _write_manifest(path: Path, config: SimConfig, result: RunResult, extra: dict | None = None):
    body = {
        "tool": "oamsat",
        "version": __version__,
        "created_utc": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "master_seed": config.master_seed,
        "config": config_snapshot(replace(config, aperture=result.aperture)),
        "derived_stats": {
            "rytov_variance": result.stats.sigma_R2,
            "scintillation_index": result.stats.sigma_I2,
            "fried_parameter_m": result.stats.r_F,
            "fresnel_ratio": result.stats.Omega,
        },
    }
    if extra:
        body.update(extra)
    path.write_text(json.dumps(body, indent=2) + "\n")


def _run_csv_lines(result: RunResult) -> list[str]:
    lines = ["l0,l_r,mean,p_stderr"]
    for l0 in result.config.l0_set:
        row = result.rows[l0]
        for i, l_r in enumerate(row.l_values):
            lines.append(f"{l0},{l_r},{_fmt(row.mean[i])},{_fmt(row.stderr[i])}")
    return lines


def _sweep_csv_lines(sweep: SweepResult) -> list[str]:
    lines = ["axis_value,l0,l_r,mean,p_stderr"]
    for value, point in zip(sweep.values, sweep.points):
        for l0 in point.config.l0_set:
            row = point.rows[l0]
            for i, l_r in enumerate(row.l_values):
                lines.append(
                    f"{_fmt(value)},{l0},{l_r},{_fmt(row.mean[i])},{_fmt(row.stderr[i])}"
                )
    return lines


def _write_outputs(out_csv: Path, csv_lines: list[str], write_manifest) -> None:
    """Write CSV + manifest as a unit, removing partial outputs on failure."""
    manifest_path = out_csv.with_suffix(".manifest.json")
    tmp_csv = out_csv.with_suffix(out_csv.suffix + ".tmp")
    try:
        out_csv.parent.mkdir(parents=True, exist_ok=True)
        tmp_csv.write_text("\n".join(csv_lines) + "\n")
        tmp_csv.replace(out_csv)
        write_manifest(manifest_path)
    except OSError as exc:
        for partial in (tmp_csv, out_csv, manifest_path):
            partial.unlink(missing_ok=True)
        raise OamSatError(f"cannot write results near {out_csv}: {exc}") from exc


def _apply_overrides(config: SimConfig, args: argparse.Namespace) -> SimConfig:
    if getattr(args, "seed", None) is not None:
        config = replace(config, master_seed=args.seed)
    if getattr(args, "realizations", None) is not None:
        config = replace(config, n_realizations=args.realizations)
    if getattr(args, "ao", None) is not None:
        config = replace(config, ao=AoMode(enabled=args.ao == "on"))
    return config


def cmd_run(args: argparse.Namespace) -> int:
    config = _apply_overrides(load_config(args.config), args)
    result = run(config)
    out_csv = Path(args.out)
    _write_outputs(
        out_csv,
        _run_csv_lines(result),
        lambda mp: _write_manifest(mp, result.config, result),
    )
    print(f"wrote {out_csv} and {out_csv.with_suffix('.manifest.json')}")
    return EXIT_OK


_SWEEPS = {
    "altitude": sweep_altitude,
    "wavelength": sweep_wavelength,
    "ground": sweep_ground,
}


def cmd_sweep(args: argparse.Namespace) -> int:
    config = _apply_overrides(load_config(args.config), args)
    values = [parse_quantity(tok) for tok in args.values.split(",") if tok.strip()]
    if not values:
        raise ConfigError("--values must list at least one number")
    sweep = _SWEEPS[args.axis](config, values)
    out_csv = Path(args.out)
    _write_outputs(
        out_csv,
        _sweep_csv_lines(sweep),
        lambda mp: _write_manifest(
            mp,
            sweep.points[0].config,
            sweep.points[0],
            extra={"sweep": {"axis": sweep.axis, "values": list(sweep.values)}},
        ),
    )
    print(f"wrote {out_csv} and {out_csv.with_suffix('.manifest.json')}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oamsat",
        description="OAM detection probabilities through a turbulent satellite downlink",
    )
    parser.add_argument("--version", action="version", version=f"oamsat {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_params = sub.add_parser("channel-params", help="print derived channel statistics")
    p_params.add_argument("config", help="INI config file or JSON manifest")
    p_params.add_argument("--json", help="also write the statistics to this JSON file")
    p_params.set_defaults(handler=cmd_channel_params)

    p_run = sub.add_parser("run", help="run one Monte Carlo ensemble")
    p_run.add_argument("config", help="INI config file or JSON manifest")
    p_run.add_argument("--out", required=True, help="output CSV path")
    p_run.add_argument("--seed", type=int, help="override the master seed")
    p_run.add_argument("--realizations", type=int, help="override the realization count")
    p_run.add_argument("--ao", choices=("on", "off"), help="override adaptive optics")
    p_run.set_defaults(handler=cmd_run)

    p_sweep = sub.add_parser("sweep", help="sweep one parameter axis")
    p_sweep.add_argument("config", help="INI config file or JSON manifest")
    p_sweep.add_argument("--axis", required=True, choices=tuple(_SWEEPS))
    p_sweep.add_argument(
        "--values",
        required=True,
        help="comma list of values, SI base units or suffixed (e.g. 200km,350km,500km)",
    )
    p_sweep.add_argument("--out", required=True, help="output CSV path")
    p_sweep.add_argument("--seed", type=int, help="override the master seed")
    p_sweep.add_argument("--realizations", type=int, help="override the realization count")
    p_sweep.add_argument("--ao", choices=("on", "off"), help="override adaptive optics")
    p_sweep.set_defaults(handler=cmd_sweep)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValidityError as exc:
        print(f"validity error: {exc}", file=sys.stderr)
        return EXIT_VALIDITY
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OamSatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
