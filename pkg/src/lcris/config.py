"""Scenario configuration: defaults, strict YAML loading, canonical hashing.

A configuration is a frozen dataclass tree.  Loading is strict: unknown keys
are rejected with their dotted path, and booleans are rejected where numbers
are expected (YAML happily parses `tau_plus: true`).  `dump_config` emits a
canonical YAML form in declaration order, and `config_hash` is the sha256 of
that form; output files embed the hash so results can be traced back to the
exact configuration that produced them, including CLI overrides.
"""

import hashlib
from dataclasses import dataclass, field, fields, replace

import numpy as np
import yaml

from .errors import ConfigError
from .geometry_channel import ArraySpec, LinkParams
from .lc_dynamics import LcParams
from .phase_optimizer import OptimizerParams
from .units import db_to_linear, dbm_to_watts, noise_power_watts


@dataclass(frozen=True)
class LinkSet:
    """Fading/pathloss parameters for the three links of the scenario."""

    bs_ris: LinkParams = field(default_factory=lambda: LinkParams(
        k_factor=10.0, pathloss_exponent=2.0))
    ris_ue: LinkParams = field(default_factory=lambda: LinkParams(
        k_factor=10.0, pathloss_exponent=2.0))
    bs_ue: LinkParams = field(default_factory=lambda: LinkParams(
        k_factor=0.0, pathloss_exponent=3.5))

    def __getitem__(self, key):
        if key not in ("bs_ris", "ris_ue", "bs_ue"):
            raise KeyError(key)
        return getattr(self, key)


@dataclass(frozen=True)
class OptimizerSettings:
    """YAML-facing solver knobs; thresholds come from snr_threshold_db."""

    alpha: float = 0.985
    i_max: int = 100
    delta: float = np.pi / 8.0
    lambda_init: float = None
    line_search_points: int = 64

    def __post_init__(self):
        # mirror OptimizerParams so bad values fail at load time with a path
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        if self.i_max < 1:
            raise ValueError("i_max must be >= 1")
        if not 0.0 < self.delta < np.pi:
            raise ValueError("delta must lie in (0, pi)")
        if self.lambda_init is not None and not self.lambda_init > 0.0:
            raise ValueError("lambda_init must be positive (or null for auto)")
        if self.line_search_points < 4:
            raise ValueError("line_search_points must be >= 4")


@dataclass(frozen=True)
class SimParams:
    dt_s: float = 1e-4            # SNR trace sampling step
    slot_s: float = 0.06          # default TDMA slot length
    ts_grid_ms: tuple = (20.0, 600.0, 20.0)  # start, stop, step for sweeps

    def __post_init__(self):
        if not self.dt_s > 0.0:
            raise ConfigError("sim.dt_s must be positive")
        if not self.slot_s > 0.0:
            raise ConfigError("sim.slot_s must be positive")
        start, stop, step = self.ts_grid_ms
        if not (start > 0.0 and step > 0.0 and stop >= start):
            raise ConfigError("sim.ts_grid_ms must satisfy 0 < start <= stop, step > 0")


def _default_bs_array():
    # orientation points from the default BS position at the default RIS
    return ArraySpec(n_y=4, n_z=4, position=(30.0, 0.0, 10.0),
                     orientation=(-30.0, 50.0, -5.0))


def _default_ris_array():
    return ArraySpec(n_y=8, n_z=8, position=(0.0, 50.0, 5.0),
                     orientation=(1.0, 0.0, 0.0))


@dataclass(frozen=True)
class ScenarioConfig:
    carrier_frequency_hz: float = 28e9
    bandwidth_hz: float = 2e7
    noise_psd_dbm_hz: float = -174.0
    noise_figure_db: float = 6.0
    tx_power_dbm: float = 47.0
    snr_threshold_db: float = 10.0
    user_range_m: float = 4.5     # distance of every user from the RIS
    blockage: float = 0.0         # scales the direct BS-user path
    user_directions_deg: tuple = ((-10.0, 33.0), (-10.0, -33.0))
    bs_array: ArraySpec = field(default_factory=_default_bs_array)
    ris_array: ArraySpec = field(default_factory=_default_ris_array)
    links: LinkSet = field(default_factory=LinkSet)
    lc: LcParams = field(default_factory=LcParams)
    optimizer: OptimizerSettings = field(default_factory=OptimizerSettings)
    sim: SimParams = field(default_factory=SimParams)
    seeds: tuple = tuple(range(50))

    def __post_init__(self):
        for name in ("carrier_frequency_hz", "bandwidth_hz", "user_range_m"):
            if not getattr(self, name) > 0.0:
                raise ConfigError(f"{name} must be positive")
        if not np.isfinite(self.tx_power_dbm):
            raise ConfigError("tx_power_dbm must be finite")
        if not 0.0 <= self.blockage <= 1.0:
            raise ConfigError("blockage must lie in [0, 1]")
        if len(self.user_directions_deg) == 0:
            raise ConfigError("user_directions_deg must name at least one user")
        for pair in self.user_directions_deg:
            if len(pair) != 2:
                raise ConfigError(
                    "user_directions_deg entries are (elevation_deg, azimuth_deg)")
        if len(self.seeds) == 0:
            raise ConfigError("seeds must be nonempty")
        if len(set(self.seeds)) != len(self.seeds):
            raise ConfigError("seeds must be distinct")

    @property
    def n_users(self):
        return len(self.user_directions_deg)

    @property
    def noise_power_w(self):
        return noise_power_watts(self.bandwidth_hz, self.noise_psd_dbm_hz,
                                 self.noise_figure_db)

    @property
    def tx_power_w(self):
        return dbm_to_watts(self.tx_power_dbm)

    @property
    def snr_thresholds_linear(self):
        return (db_to_linear(self.snr_threshold_db),) * self.n_users

    @property
    def ts_grid_s(self):
        start, stop, step = self.sim.ts_grid_ms
        grid = np.arange(start, stop + 0.5 * step, step)
        return tuple(float(t) * 1e-3 for t in grid)

    def optimizer_params(self):
        """Full solver parameters with per-user thresholds resolved."""
        return OptimizerParams(
            snr_thresholds=self.snr_thresholds_linear,
            alpha=self.optimizer.alpha,
            i_max=self.optimizer.i_max,
            delta=self.optimizer.delta,
            lambda_init=self.optimizer.lambda_init,
            line_search_points=self.optimizer.line_search_points,
        )


def _require_keys(data, allowed, path):
    for key in data:
        if key not in allowed:
            raise ConfigError(f"unknown config field: {_join(path, key)}")


def _join(path, key):
    return f"{path}.{key}" if path else str(key)


def _as_number(value, path, integer=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path} must be a number")
    if integer:
        if not isinstance(value, int):
            raise ConfigError(f"{path} must be an integer")
        return value
    return float(value)


def _as_vec3(value, path):
    if not isinstance(value, (list, tuple)) or len(value) != 3:
        raise ConfigError(f"{path} must be a 3-vector")
    return tuple(_as_number(v, f"{path}[{i}]") for i, v in enumerate(value))


def _parse_array(data, path, base, aim_at=None):
    _require_keys(data, {"n_y", "n_z", "spacing_wavelengths", "position",
                         "orientation"}, path)
    kwargs = {"n_y": base.n_y, "n_z": base.n_z,
              "spacing_wavelengths": base.spacing_wavelengths,
              "position": base.position, "orientation": base.orientation}
    if "n_y" in data:
        kwargs["n_y"] = _as_number(data["n_y"], _join(path, "n_y"), integer=True)
    if "n_z" in data:
        kwargs["n_z"] = _as_number(data["n_z"], _join(path, "n_z"), integer=True)
    if "spacing_wavelengths" in data:
        kwargs["spacing_wavelengths"] = _as_number(
            data["spacing_wavelengths"], _join(path, "spacing_wavelengths"))
    if "position" in data:
        kwargs["position"] = _as_vec3(data["position"], _join(path, "position"))
    if data.get("orientation") is not None:
        kwargs["orientation"] = _as_vec3(data["orientation"],
                                         _join(path, "orientation"))
    elif aim_at is not None:
        # null/absent orientation aims the array at its peer
        kwargs["orientation"] = tuple(np.subtract(aim_at, kwargs["position"]))
    try:
        return ArraySpec(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _parse_link(data, base, path):
    _require_keys(data, {"k_factor", "pathloss_exponent", "ref_gain_db",
                         "ref_distance_m"}, path)
    # each link has its own defaults, so merge onto the provided base
    kwargs = {name: getattr(base, name)
              for name in ("k_factor", "pathloss_exponent",
                           "ref_gain_db", "ref_distance_m")}
    for name in tuple(kwargs):
        if name in data:
            value = data[name]
            if name == "k_factor" and value == "inf":
                kwargs[name] = np.inf
                continue
            kwargs[name] = _as_number(value, _join(path, name))
    try:
        return LinkParams(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _parse_links(data, path):
    _require_keys(data, {"bs_ris", "ris_ue", "bs_ue"}, path)
    defaults = LinkSet()
    kwargs = {}
    for name in ("bs_ris", "ris_ue", "bs_ue"):
        if name in data:
            merged = _parse_link(data[name], getattr(defaults, name),
                                 _join(path, name))
            kwargs[name] = merged
        else:
            kwargs[name] = getattr(defaults, name)
    return LinkSet(**kwargs)


def _parse_lc(data, path):
    _require_keys(data, {"tau_plus", "tau_minus", "omega_max",
                         "phase_clamp_eps", "voltage_curve"}, path)
    kwargs = {}
    for name in ("tau_plus", "tau_minus", "omega_max", "phase_clamp_eps"):
        if name in data:
            kwargs[name] = _as_number(data[name], _join(path, name))
    if data.get("voltage_curve") is not None:
        curve = data["voltage_curve"]
        if not isinstance(curve, (list, tuple)):
            raise ConfigError(f"{_join(path, 'voltage_curve')} must be a list of"
                              " [volts, phase] pairs")
        pairs = []
        for i, pair in enumerate(curve):
            if not isinstance(pair, (list, tuple)) or len(pair) != 2:
                raise ConfigError(
                    f"{_join(path, 'voltage_curve')}[{i}] must be [volts, phase]")
            pairs.append(tuple(_as_number(
                v, f"{_join(path, 'voltage_curve')}[{i}][{j}]")
                for j, v in enumerate(pair)))
        kwargs["voltage_curve"] = tuple(pairs)
    try:
        return LcParams(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _parse_optimizer(data, path):
    _require_keys(data, {"alpha", "i_max", "delta", "lambda_init",
                         "line_search_points"}, path)
    kwargs = {}
    for name in ("alpha", "delta"):
        if name in data:
            kwargs[name] = _as_number(data[name], _join(path, name))
    for name in ("i_max", "line_search_points"):
        if name in data:
            kwargs[name] = _as_number(data[name], _join(path, name), integer=True)
    if data.get("lambda_init") is not None:
        kwargs["lambda_init"] = _as_number(data["lambda_init"],
                                           _join(path, "lambda_init"))
    try:
        return OptimizerSettings(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _parse_sim(data, path):
    _require_keys(data, {"dt_s", "slot_s", "ts_grid_ms"}, path)
    kwargs = {}
    for name in ("dt_s", "slot_s"):
        if name in data:
            kwargs[name] = _as_number(data[name], _join(path, name))
    if "ts_grid_ms" in data:
        kwargs["ts_grid_ms"] = _as_vec3(data["ts_grid_ms"],
                                        _join(path, "ts_grid_ms"))
    return SimParams(**kwargs)


_SCALAR_FIELDS = ("carrier_frequency_hz", "bandwidth_hz", "noise_psd_dbm_hz",
                  "noise_figure_db", "tx_power_dbm", "snr_threshold_db",
                  "user_range_m", "blockage")


def config_from_dict(data):
    """Build a ScenarioConfig from a parsed YAML mapping; strict on keys."""
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError("config root must be a mapping")
    allowed = {f.name for f in fields(ScenarioConfig)}
    _require_keys(data, allowed, "")

    kwargs = {}
    for name in _SCALAR_FIELDS:
        if name in data:
            kwargs[name] = _as_number(data[name], name)
    if "user_directions_deg" in data:
        dirs = data["user_directions_deg"]
        if not isinstance(dirs, (list, tuple)):
            raise ConfigError("user_directions_deg must be a list of"
                              " [elevation_deg, azimuth_deg] pairs")
        parsed = []
        for i, pair in enumerate(dirs):
            if not isinstance(pair, (list, tuple)) or len(pair) != 2:
                raise ConfigError(f"user_directions_deg[{i}] must be"
                                  " [elevation_deg, azimuth_deg]")
            parsed.append(tuple(_as_number(v, f"user_directions_deg[{i}][{j}]")
                                for j, v in enumerate(pair)))
        kwargs["user_directions_deg"] = tuple(parsed)
    if "seeds" in data:
        seeds = data["seeds"]
        if not isinstance(seeds, (list, tuple)):
            raise ConfigError("seeds must be a list of integers")
        kwargs["seeds"] = tuple(_as_number(s, f"seeds[{i}]", integer=True)
                                for i, s in enumerate(seeds))

    ris_position = _default_ris_array().position
    if isinstance(data.get("ris_array"), dict) and "position" in data["ris_array"]:
        ris_position = _as_vec3(data["ris_array"]["position"],
                                "ris_array.position")
    # parse bs_array even when absent so a null orientation (the default)
    # aims at the RIS position actually in effect
    bs_section = data.get("bs_array", {})
    if not isinstance(bs_section, dict):
        raise ConfigError("bs_array must be a mapping")
    kwargs["bs_array"] = _parse_array(bs_section, "bs_array",
                                      base=_default_bs_array(),
                                      aim_at=ris_position)
    if "ris_array" in data:
        if not isinstance(data["ris_array"], dict):
            raise ConfigError("ris_array must be a mapping")
        kwargs["ris_array"] = _parse_array(data["ris_array"], "ris_array",
                                           base=_default_ris_array())
    for name, parser in (("links", _parse_links), ("lc", _parse_lc),
                         ("optimizer", _parse_optimizer), ("sim", _parse_sim)):
        if name not in data:
            continue
        section = data[name]
        if not isinstance(section, dict):
            raise ConfigError(f"{name} must be a mapping")
        kwargs[name] = parser(section, name)

    try:
        return ScenarioConfig(**kwargs)
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path):
    """Load a YAML scenario file; an empty file yields the full defaults."""
    with open(path) as fh:
        try:
            data = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise ConfigError(f"invalid YAML in {path}: {exc}") from exc
    return config_from_dict(data)


def config_to_dict(config):
    """Canonical plain-type form of a config, in declaration order."""
    def link(lp):
        k = "inf" if np.isinf(lp.k_factor) else lp.k_factor
        return {"k_factor": k, "pathloss_exponent": lp.pathloss_exponent,
                "ref_gain_db": lp.ref_gain_db, "ref_distance_m": lp.ref_distance_m}

    def array(spec):
        return {"n_y": spec.n_y, "n_z": spec.n_z,
                "spacing_wavelengths": spec.spacing_wavelengths,
                "position": list(spec.position),
                "orientation": [float(v) for v in spec.orientation]}

    c = config
    return {
        "carrier_frequency_hz": c.carrier_frequency_hz,
        "bandwidth_hz": c.bandwidth_hz,
        "noise_psd_dbm_hz": c.noise_psd_dbm_hz,
        "noise_figure_db": c.noise_figure_db,
        "tx_power_dbm": c.tx_power_dbm,
        "snr_threshold_db": c.snr_threshold_db,
        "user_range_m": c.user_range_m,
        "blockage": c.blockage,
        "user_directions_deg": [list(p) for p in c.user_directions_deg],
        "bs_array": array(c.bs_array),
        "ris_array": array(c.ris_array),
        "links": {name: link(c.links[name])
                  for name in ("bs_ris", "ris_ue", "bs_ue")},
        "lc": {"tau_plus": c.lc.tau_plus, "tau_minus": c.lc.tau_minus,
               "omega_max": c.lc.omega_max,
               "phase_clamp_eps": c.lc.phase_clamp_eps,
               "voltage_curve": [list(p) for p in c.lc.voltage_curve]},
        "optimizer": {"alpha": c.optimizer.alpha, "i_max": c.optimizer.i_max,
                      "delta": c.optimizer.delta,
                      "lambda_init": c.optimizer.lambda_init,
                      "line_search_points": c.optimizer.line_search_points},
        "sim": {"dt_s": c.sim.dt_s, "slot_s": c.sim.slot_s,
                "ts_grid_ms": list(c.sim.ts_grid_ms)},
        "seeds": list(c.seeds),
    }


def dump_config(config):
    """Canonical YAML text; two configs are equal iff their dumps match."""
    return yaml.safe_dump(config_to_dict(config), sort_keys=False)


def config_hash(config):
    """sha256 hex digest of the canonical YAML form."""
    return hashlib.sha256(dump_config(config).encode()).hexdigest()


def with_overrides(config, seeds=None, ts_grid_ms=None, slot_s=None):
    """Apply CLI overrides so the hash reflects what actually ran."""
    out = config
    if seeds is not None:
        out = replace(out, seeds=tuple(int(s) for s in seeds))
    if ts_grid_ms is not None or slot_s is not None:
        sim = out.sim
        if ts_grid_ms is not None:
            sim = replace(sim, ts_grid_ms=tuple(float(v) for v in ts_grid_ms))
        if slot_s is not None:
            sim = replace(sim, slot_s=float(slot_s))
        out = replace(out, sim=sim)
    return out
