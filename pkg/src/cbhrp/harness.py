"""Parameter sweeps, protocol comparison and config files."""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from itertools import product
from pathlib import Path

from . import __version__, analytic, sim
from .errors import ConfigError
from .radio import RadioParams
from .topology import NetworkConfig

MODES = ("analytic", "simulate", "both")
INT_FIELDS = {"n", "k", "m", "eq9_exponent"}
SWEEPABLE = {
    "n", "k", "m", "l", "r_b", "network_diameter", "d_bs", "e_init",
    "d_intra", "d_adv", "n_frames", "eq9_exponent",
} | {f"radio.{f.name}" for f in fields(RadioParams)}
REQUIRED_FIELDS = ("n", "k", "m", "l", "r_b", "network_diameter", "d_bs", "e_init")

PARAM_COLUMNS = (
    "n", "k", "m", "l", "r_b", "network_diameter", "d_bs", "e_init",
    "d_intra", "d_adv", "n_frames", "eq9_exponent",
)
ENERGY_COLUMNS = tuple(f.name for f in fields(analytic.EnergyBreakdown))
TIMING_COLUMNS = tuple(f.name for f in fields(analytic.TimingReport))
SIM_COLUMNS = (
    "rounds_completed", "truncated", "rounds_to_first_death", "rounds_to_half_death",
    "rounds_to_last_death", "frames_delivered", "sim_energy_first_round",
    "sim_cycles_per_iteration", "sim_cluster_iteration_energy", "sim_clock_first_iteration",
)
HEADER = ("point", "seed", "status") + PARAM_COLUMNS + ENERGY_COLUMNS + TIMING_COLUMNS + SIM_COLUMNS
COMPARE_HEADER = (
    "m", "e_ch_per_frame", "per_member_frame_energy", "improvement_vs_leach",
    "elections_per_round", "rounds_to_first_death", "rounds_to_half_death", "rounds_to_last_death",
)


@dataclass(frozen=True)
class Axis:
    name: str
    values: tuple

    @classmethod
    def from_dict(cls, data: dict) -> "Axis":
        allowed = {"name", "start", "stop", "step", "values"}
        unknown = sorted(set(data) - allowed)
        if unknown:
            raise ConfigError(f"unknown axis fields: {', '.join(unknown)}", tuple(unknown))
        name = data.get("name")
        if name not in SWEEPABLE:
            raise ConfigError(f"axis name {name!r} is not a sweepable config field", ("name",))
        if "values" in data:
            values = tuple(data["values"])
            if not values:
                raise ConfigError(f"axis {name}: empty value list", ("values",))
        else:
            try:
                start, stop, step = data["start"], data["stop"], data["step"]
            except KeyError as exc:
                raise ConfigError(f"axis {name}: missing {exc.args[0]}", (exc.args[0],)) from None
            if not step > 0:
                raise ConfigError(f"axis {name}: step must be > 0", ("step",))
            if start > stop:
                raise ConfigError(f"axis {name}: start must be <= stop", ("start", "stop"))
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            values = tuple(start + i * step for i in range(count))
        if name in INT_FIELDS:
            values = tuple(int(v) if float(v).is_integer() else v for v in values)
        return cls(name, values)

    def to_dict(self) -> dict:
        return {"name": self.name, "values": list(self.values)}


@dataclass(frozen=True)
class SweepSpec:
    base: NetworkConfig
    axes: tuple[Axis, ...]
    mode: str = "analytic"
    seeds: tuple[int, ...] = (0,)
    geometry: str = "euclidean"
    round_cap: int = 10_000

    def __post_init__(self):
        if not 1 <= len(self.axes) <= 2:
            raise ConfigError("a sweep needs one or two axes", ("axes",))
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}", ("mode",))
        if self.geometry not in sim.GEOMETRIES:
            raise ConfigError(f"geometry must be one of {sim.GEOMETRIES}", ("geometry",))
        if self.mode != "analytic" and not self.seeds:
            raise ConfigError("simulate mode needs at least one seed", ("seeds",))

    def grid(self):
        """Row-major grid points as dicts of axis values."""
        names = [a.name for a in self.axes]
        for combo in product(*(a.values for a in self.axes)):
            yield dict(zip(names, combo))

    def to_dict(self) -> dict:
        return {
            "base": self.base.to_dict(),
            "axes": [a.to_dict() for a in self.axes],
            "mode": self.mode,
            "seeds": list(self.seeds),
            "geometry": self.geometry,
            "round_cap": self.round_cap,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SweepSpec":
        allowed = {"base", "axes", "mode", "seeds", "geometry", "round_cap"}
        unknown = sorted(set(data) - allowed)
        if unknown:
            raise ConfigError(f"unknown sweep fields: {', '.join(unknown)}", tuple(unknown))
        if "axes" not in data:
            raise ConfigError("sweep is missing axes", ("axes",))
        return cls(
            base=_config_from_dict(data.get("base", {}), require=False),
            axes=tuple(Axis.from_dict(a) for a in data["axes"]),
            mode=data.get("mode", "analytic"),
            seeds=tuple(int(s) for s in data.get("seeds", (0,))),
            geometry=data.get("geometry", "euclidean"),
            round_cap=int(data.get("round_cap", 10_000)),
        )


def apply_point(base: NetworkConfig, point: dict) -> NetworkConfig:
    changes, radio = {}, {}
    for name, value in point.items():
        if name.startswith("radio."):
            radio[name[6:]] = value
        else:
            changes[name] = value
    if radio:
        changes["radio"] = RadioParams(**{**base.radio.__dict__, **radio})
    return base.replace(**changes)


def evaluate_config(
    cfg: NetworkConfig,
    seeds=(),
    mode: str | None = None,
    geometry: str = "euclidean",
    round_cap: int = 10_000,
    index: int = 0,
    state: sim.SimState | None = None,
) -> list[dict]:
    """Result rows for one configuration: one row, or one per seed when simulating."""
    mode = mode or ("simulate" if seeds else "analytic")
    energy = analytic.evaluate(cfg, strict=mode != "simulate" or _uniform(cfg))
    timing = analytic.timing(cfg, energy.n_f)
    base_row = {"point": index, "status": "ok", **_params(cfg), **energy.as_dict(), **timing.as_dict()}
    if mode == "analytic":
        return [dict(base_row, seed=None)]
    return [
        dict(base_row, seed=seed, **_simulate(cfg, seed, geometry, round_cap, state))
        for seed in seeds
    ]


def _evaluate_point(job) -> list[dict]:
    index, point, spec = job
    try:
        cfg = apply_point(spec.base, point)
        return evaluate_config(cfg, spec.seeds, spec.mode, spec.geometry, spec.round_cap, index)
    except (ConfigError, ValueError) as exc:
        seeds = (None,) if spec.mode == "analytic" else spec.seeds
        return [{"point": index, "seed": seed, "status": f"error: {exc}", **point} for seed in seeds]


def _uniform(cfg: NetworkConfig) -> bool:
    try:
        cfg.check_uniform()
    except ConfigError:
        return False
    return True


def _params(cfg: NetworkConfig) -> dict:
    row = {name: getattr(cfg, name) for name in PARAM_COLUMNS}
    row["d_intra"] = cfg.intra_distance
    row["d_adv"] = cfg.adv_distance
    return row


def _simulate(cfg: NetworkConfig, seed: int, geometry: str, round_cap: int, state=None) -> dict:
    first = {}

    def grab(event, state, c):
        if event == "iteration" and not first:
            energies = list(state.last_iteration_energy.values())
            first["energy"] = sum(energies) / len(energies)
            first["clock"] = state.clock

    if state is None:
        state = sim.init_state(cfg, seed, geometry)
    state.observers.append(grab)
    result = sim.run_to_extinction(cfg, seed, round_cap=round_cap, state=state)
    return {
        "rounds_completed": result.rounds_completed,
        "truncated": result.truncated,
        "rounds_to_first_death": result.rounds_to_first_death,
        "rounds_to_half_death": result.rounds_to_half_death,
        "rounds_to_last_death": result.rounds_to_last_death,
        "frames_delivered": result.frames_delivered,
        "sim_energy_first_round": result.energy_per_round[0] if result.energy_per_round else None,
        "sim_cycles_per_iteration": state.schedule.cycles,
        "sim_cluster_iteration_energy": first.get("energy"),
        "sim_clock_first_iteration": first.get("clock"),
    }


def run_sweep(spec: SweepSpec, workers: int = 1) -> list[dict]:
    """Evaluate every grid point (and seed); rows come back in row-major, then seed order."""
    jobs = [(i, point, spec) for i, point in enumerate(spec.grid())]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_evaluate_point, jobs))
    else:
        chunks = [_evaluate_point(job) for job in jobs]
    return [row for chunk in chunks for row in chunk]


def compare_protocols(
    cfg: NetworkConfig,
    m_values=(1, 2, 4),
    simulate: bool = False,
    seed: int = 0,
    geometry: str = "euclidean",
    round_cap: int = 10_000,
) -> list[dict]:
    """Head-set sizes against the single-head baseline on the same field.

    ``improvement_vs_leach`` is the baseline per-member frame energy divided by
    the one at ``m``; the same seed gives every simulated size the same layout.
    """
    baseline = analytic.per_member_frame_energy(cfg.replace(m=1))
    rows = []
    for m in m_values:
        c = cfg.replace(m=int(m))
        per_member = analytic.per_member_frame_energy(c)
        row = {
            "m": c.m,
            "e_ch_per_frame": analytic.frame_energy(c)[0],
            "per_member_frame_energy": per_member,
            "improvement_vs_leach": baseline / per_member,
            "elections_per_round": c.iterations_per_round,
        }
        if simulate:
            life = sim.run_to_extinction(c, seed, round_cap=round_cap, geometry=geometry)
            row.update(
                rounds_to_first_death=life.rounds_to_first_death,
                rounds_to_half_death=life.rounds_to_half_death,
                rounds_to_last_death=life.rounds_to_last_death,
            )
        rows.append(row)
    return rows


# -- serialization -------------------------------------------------------------------

def format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.9g}"
    return str(value)


def write_csv(rows, out, header=HEADER) -> None:
    """RFC 4180 CSV (CRLF line ends) with a fixed header; floats to 9 significant digits."""
    writer = csv.writer(out, lineterminator="\r\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(row.get(col)) for col in header])


def csv_text(rows, header=HEADER) -> str:
    buf = io.StringIO()
    write_csv(rows, buf, header)
    return buf.getvalue()


def save_csv(rows, path, header=HEADER, provenance: dict | None = None) -> None:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        write_csv(rows, fh, header)
    sidecar = {"tool": "cbhrp", "version": __version__, **(provenance or {})}
    path.with_suffix(path.suffix + ".json").write_text(json.dumps(sidecar, indent=2, sort_keys=True) + "\n")


def _config_from_dict(data: dict, require: bool = True) -> NetworkConfig:
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    known = {f.name for f in fields(NetworkConfig)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"unknown config fields: {', '.join(unknown)}", tuple(unknown))
    if require:
        missing = [f for f in REQUIRED_FIELDS if f not in data]
        if missing:
            raise ConfigError(f"missing required fields: {', '.join(missing)}", tuple(missing))
    return NetworkConfig.from_dict(data)


def load_config(path):
    """Read a JSON NetworkConfig, or a SweepSpec when the document has a ``base`` key."""
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc})") from exc
    if isinstance(data, dict) and "base" in data:
        return SweepSpec.from_dict(data)
    return _config_from_dict(data)


def save_config(obj, path) -> None:
    Path(path).write_text(json.dumps(obj.to_dict(), indent=2, sort_keys=True) + "\n")


# -- figure presets --------------------------------------------------------------------

_FIXED_FRAMES = 10_000  # data frames per iteration for the energy-per-round surfaces

PRESETS = {
    # energy per round over cluster count and field size
    "fig1": {
        "base": {"n": 1200, "m": 2, "d_bs": 100.0, "n_frames": 12_000},
        "axes": [
            {"name": "k", "values": [10, 20, 30, 40, 50, 60, 100, 120, 150]},
            {"name": "network_diameter", "start": 100.0, "stop": 300.0, "step": 50.0},
        ],
    },
    # energy per round over base-station distance and head-set size, k = 50
    "fig2": {
        "base": {"n": 1000, "k": 50, "network_diameter": 100.0, "n_frames": _FIXED_FRAMES},
        "axes": [
            {"name": "d_bs", "start": 50.0, "stop": 250.0, "step": 25.0},
            {"name": "m", "values": [1, 2, 4, 5, 10]},
        ],
    },
    # iteration time over base-station distance and head-set size (5% .. 50% of a cluster)
    "fig3": {
        "base": {"n": 1000, "k": 50, "network_diameter": 100.0},
        "axes": [
            {"name": "d_bs", "start": 50.0, "stop": 250.0, "step": 50.0},
            {"name": "m", "values": [1, 2, 4, 5, 10]},
        ],
    },
    # iteration time over cluster count and base-station distance
    "fig4": {
        "base": {"n": 1000, "m": 2, "network_diameter": 100.0},
        "axes": [
            {"name": "k", "values": [10, 20, 25, 50, 100]},
            {"name": "d_bs", "start": 50.0, "stop": 250.0, "step": 50.0},
        ],
    },
    # frames per iteration over base-station distance and field size
    "fig5": {
        "base": {"n": 1000, "k": 50, "m": 2},
        "axes": [
            {"name": "d_bs", "start": 50.0, "stop": 250.0, "step": 50.0},
            {"name": "network_diameter", "start": 100.0, "stop": 300.0, "step": 50.0},
        ],
    },
}


def preset(name: str, seeds=(0,), mode: str = "analytic", **overrides) -> SweepSpec:
    try:
        doc = PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}") from None
    base = {**doc["base"], **overrides}
    return SweepSpec.from_dict({"base": base, "axes": doc["axes"], "mode": mode, "seeds": list(seeds)})
