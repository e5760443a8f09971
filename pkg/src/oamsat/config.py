"""Configuration files: a flat INI layout with explicit unit suffixes.

Sections: [geometry], [atmosphere], [mode], [simulation]. Every key has a
paper-configuration default, so an empty file is a valid (full-size) run.
Quantities accept alternative unit suffixes (e.g. satellite_altitude_km or
satellite_altitude_m); exactly one variant may be present. Run manifests
(JSON) round-trip through the same loader for bit-identical re-runs.
"""

from __future__ import annotations

import configparser
import json
import math
from pathlib import Path

from .detection import DetectionGrid
from .errors import ConfigError
from .realization import AoMode, ApertureSpec
from .simulation import AUTO_APERTURE, SimConfig
from .turbulence import AtmosphereModel, ChannelGeometry

_UNIT_SUFFIXES = {
    "m": 1.0,
    "cm": 1e-2,
    "km": 1e3,
    "nm": 1e-9,
    "um": 1e-6,
    "deg": math.pi / 180.0,
    "rad": 1.0,
}

_GEOMETRY_KEYS = {
    "satellite_altitude": ("m", "km"),
    "ground_altitude": ("m", "km"),
    "zenith_angle": ("rad", "deg"),
    "wavelength": ("m", "nm", "um"),
}
_ATMOSPHERE_KEYS = {"cn2_ground": None, "wind_rms_mps": None}
_MODE_KEYS = {"waist": ("m", "cm"), "l_max": None}
_SIMULATION_KEYS = {
    "realizations": None,
    "l0_set": None,
    "ao": None,
    "seed": None,
    "aperture": None,
    "aperture_ra": ("m", "cm"),
    "aperture_rt": ("m", "cm"),
    "n_radial": None,
    "n_azimuthal": None,
    "l_window": None,
    "verify_grid": None,
}

_DEFAULTS = {
    "satellite_altitude_m": 500e3,
    "ground_altitude_m": 3000.0,
    "zenith_angle_rad": 0.0,
    "wavelength_m": 1550e-9,
    "cn2_ground": 9.6e-14,
    "wind_rms_mps": 6.0,
    "waist_m": 0.15,
    "l_max": 4,
}


def parse_quantity(token: str) -> float:
    """Parse a number with an optional unit suffix ('500km', '1550nm', '3.7')
    into SI base units."""
    token = token.strip()
    for suffix, factor in sorted(_UNIT_SUFFIXES.items(), key=lambda kv: -len(kv[0])):
        if token.endswith(suffix):
            stem = token[: -len(suffix)].strip()
            if stem and not stem[-1].isalpha():
                try:
                    return float(stem) * factor
                except ValueError as exc:
                    raise ConfigError(f"cannot parse quantity {token!r}") from exc
    try:
        return float(token)
    except ValueError as exc:
        raise ConfigError(f"cannot parse quantity {token!r}") from exc


class _Section:
    """One config section with suffix-aware lookup and typo rejection."""

    def __init__(self, name: str, raw: dict[str, str], schema: dict):
        self.name = name
        self.raw = dict(raw)
        allowed = set()
        for base, suffixes in schema.items():
            if suffixes is None:
                allowed.add(base)
            else:
                allowed.update(f"{base}_{s}" for s in suffixes)
        unknown = set(self.raw) - allowed
        if unknown:
            raise ConfigError(
                f"unknown key(s) in [{name}]: {', '.join(sorted(unknown))}"
            )

    def quantity(self, base: str, suffixes: tuple[str, ...], default: float) -> float:
        present = [s for s in suffixes if f"{base}_{s}" in self.raw]
        if len(present) > 1:
            raise ConfigError(
                f"[{self.name}] has conflicting variants of {base}: {present}"
            )
        if not present:
            return default
        suffix = present[0]
        text = self.raw[f"{base}_{suffix}"]
        try:
            return float(text) * _UNIT_SUFFIXES[suffix]
        except ValueError as exc:
            raise ConfigError(f"[{self.name}] {base}_{suffix}: bad number {text!r}") from exc

    def value(self, key: str, default, cast):
        if key not in self.raw:
            return default
        try:
            return cast(self.raw[key])
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"[{self.name}] {key}: cannot parse {self.raw[key]!r}") from exc


def _parse_l0_set(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in text.replace(" ", "").split(",") if tok)
    except ValueError as exc:
        raise ConfigError(f"l0_set must be a comma list of integers, got {text!r}") from exc


def _parse_onoff(text: str) -> bool:
    norm = text.strip().lower()
    if norm in ("on", "true", "1", "yes"):
        return True
    if norm in ("off", "false", "0", "no"):
        return False
    raise ValueError(norm)


def _config_from_sections(sections: dict[str, dict[str, str]]) -> SimConfig:
    known = {"geometry", "atmosphere", "mode", "simulation"}
    unknown = set(sections) - known
    if unknown:
        raise ConfigError(f"unknown config section(s): {', '.join(sorted(unknown))}")

    geo = _Section("geometry", sections.get("geometry", {}), _GEOMETRY_KEYS)
    atm = _Section("atmosphere", sections.get("atmosphere", {}), _ATMOSPHERE_KEYS)
    mode = _Section("mode", sections.get("mode", {}), _MODE_KEYS)
    sim = _Section("simulation", sections.get("simulation", {}), _SIMULATION_KEYS)

    geometry = ChannelGeometry(
        H=geo.quantity("satellite_altitude", ("m", "km"), _DEFAULTS["satellite_altitude_m"]),
        h0=geo.quantity("ground_altitude", ("m", "km"), _DEFAULTS["ground_altitude_m"]),
        theta_z=geo.quantity("zenith_angle", ("rad", "deg"), _DEFAULTS["zenith_angle_rad"]),
        wavelength=geo.quantity("wavelength", ("m", "nm", "um"), _DEFAULTS["wavelength_m"]),
    )
    atmosphere = AtmosphereModel(
        A=atm.value("cn2_ground", _DEFAULTS["cn2_ground"], float),
        v_rms=atm.value("wind_rms_mps", _DEFAULTS["wind_rms_mps"], float),
    )
    w0 = mode.quantity("waist", ("m", "cm"), _DEFAULTS["waist_m"])
    l_max = mode.value("l_max", _DEFAULTS["l_max"], int)

    aperture_kind = sim.value("aperture", AUTO_APERTURE, str).strip().lower()
    if aperture_kind == AUTO_APERTURE:
        aperture: ApertureSpec | str = AUTO_APERTURE
        if "aperture_ra_m" in sim.raw or "aperture_rt_m" in sim.raw:
            raise ConfigError("aperture radii given but aperture mode is 'auto'")
    elif aperture_kind == "explicit":
        r_a = sim.quantity("aperture_ra", ("m", "cm"), float("nan"))
        r_t = sim.quantity("aperture_rt", ("m", "cm"), float("nan"))
        if math.isnan(r_a) or math.isnan(r_t):
            raise ConfigError("explicit aperture needs aperture_ra_m and aperture_rt_m")
        aperture = ApertureSpec(r_a=r_a, r_t=r_t)
    else:
        raise ConfigError(f"aperture must be 'auto' or 'explicit', got {aperture_kind!r}")

    grid = DetectionGrid(
        n_radial=sim.value("n_radial", 192, int),
        n_azimuthal=sim.value("n_azimuthal", 1024, int),
        l_window=sim.value("l_window", 12, int),
    )
    return SimConfig(
        geometry=geometry,
        atmosphere=atmosphere,
        w0=w0,
        l_max=l_max,
        l0_set=sim.value("l0_set", (0, 1, 2, 3, 4), _parse_l0_set),
        n_realizations=sim.value("realizations", 2000, int),
        ao=AoMode(enabled=sim.value("ao", False, _parse_onoff)),
        aperture=aperture,
        grid=grid,
        master_seed=sim.value("seed", 20190316, int),
        verify_grid=sim.value("verify_grid", False, _parse_onoff),
    )


def load_config(path: str | Path) -> SimConfig:
    """Load a SimConfig from an INI config file or a JSON run manifest."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    if path.suffix.lower() == ".json":
        return _load_manifest_config(path)
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        with path.open() as fh:
            parser.read_file(fh)
    except (configparser.Error, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from exc
    sections = {name: dict(parser.items(name)) for name in parser.sections()}
    return _config_from_sections(sections)


def _load_manifest_config(path: Path) -> SimConfig:
    try:
        manifest = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"cannot parse manifest {path}: {exc}") from exc
    try:
        cfg = manifest["config"]
        geometry = ChannelGeometry(
            H=cfg["geometry"]["satellite_altitude_m"],
            h0=cfg["geometry"]["ground_altitude_m"],
            theta_z=cfg["geometry"]["zenith_angle_rad"],
            wavelength=cfg["geometry"]["wavelength_m"],
        )
        atmosphere = AtmosphereModel(
            A=cfg["atmosphere"]["cn2_ground"], v_rms=cfg["atmosphere"]["wind_rms_mps"]
        )
        sim = cfg["simulation"]
        if sim["aperture"] == AUTO_APERTURE:
            aperture: ApertureSpec | str = AUTO_APERTURE
        else:
            aperture = ApertureSpec(r_a=sim["aperture"]["r_a_m"], r_t=sim["aperture"]["r_t_m"])
        return SimConfig(
            geometry=geometry,
            atmosphere=atmosphere,
            w0=cfg["mode"]["waist_m"],
            l_max=cfg["mode"]["l_max"],
            l0_set=tuple(sim["l0_set"]),
            n_realizations=sim["realizations"],
            ao=AoMode(enabled=sim["ao"]),
            aperture=aperture,
            grid=DetectionGrid(
                n_radial=sim["n_radial"],
                n_azimuthal=sim["n_azimuthal"],
                l_window=sim["l_window"],
            ),
            master_seed=sim["seed"],
            verify_grid=sim.get("verify_grid", False),
        )
    except KeyError as exc:
        raise ConfigError(f"manifest {path} is missing key {exc}") from exc


def config_snapshot(config: SimConfig) -> dict:
    """JSON-ready snapshot of a resolved configuration (manifest body)."""
    if isinstance(config.aperture, ApertureSpec):
        aperture = {"r_a_m": config.aperture.r_a, "r_t_m": config.aperture.r_t}
    else:
        aperture = AUTO_APERTURE
    return {
        "geometry": {
            "satellite_altitude_m": config.geometry.H,
            "ground_altitude_m": config.geometry.h0,
            "zenith_angle_rad": config.geometry.theta_z,
            "wavelength_m": config.geometry.wavelength,
        },
        "atmosphere": {
            "cn2_ground": config.atmosphere.A,
            "wind_rms_mps": config.atmosphere.v_rms,
        },
        "mode": {"waist_m": config.w0, "l_max": config.l_max},
        "simulation": {
            "realizations": config.n_realizations,
            "l0_set": list(config.l0_set),
            "ao": config.ao.enabled,
            "seed": config.master_seed,
            "aperture": aperture,
            "n_radial": config.grid.n_radial,
            "n_azimuthal": config.grid.n_azimuthal,
            "l_window": config.grid.l_window,
            "verify_grid": config.verify_grid,
        },
    }
