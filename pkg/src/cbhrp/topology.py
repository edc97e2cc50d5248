"""Network configuration, node placement and nearest-head clustering."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .radio import RadioParams

# Role codes shared with the simulator.
MEMBER, HEAD_ACTIVE, HEAD_ASLEEP, DEAD = 0, 1, 2, 3
ROLE_NAMES = {MEMBER: "member", HEAD_ACTIVE: "head_active", HEAD_ASLEEP: "head_asleep", DEAD: "dead"}


@dataclass(frozen=True)
class NetworkConfig:
    """Full parameterization of one experiment.

    ``d_intra`` and ``d_adv`` override the representative intra-cluster
    distance used by the closed-form model. ``n_frames`` pins the number of
    data frames per iteration; when unset it is derived from ``e_init``.
    """

    n: int = 1000
    k: int = 50
    m: int = 2
    l: float = 2000.0               # bits
    r_b: float = 1e6                # bits/s
    network_diameter: float = 100.0  # m, side of the square field
    d_bs: float = 100.0             # m, head to base station
    e_init: float = 0.5             # J per node
    radio: RadioParams = field(default_factory=RadioParams)
    d_intra: float | None = None
    d_adv: float | None = None
    n_frames: float | None = None
    eq9_exponent: int = 4

    def __post_init__(self):
        errors = []
        if not _is_int(self.n) or self.n < 1:
            errors.append(("n", f"n must be an integer >= 1, got {self.n!r}"))
        if not _is_int(self.k) or self.k < 1:
            errors.append(("k", f"k must be an integer >= 1, got {self.k!r}"))
        if not _is_int(self.m) or self.m < 1:
            errors.append(("m", f"m must be an integer >= 1, got {self.m!r}"))
        if errors:
            raise ConfigError("; ".join(e[1] for e in errors), tuple(e[0] for e in errors))
        if self.k > self.n:
            raise ConfigError(f"k={self.k} exceeds n={self.n}", ("k", "n"))
        if self.m * self.k > self.n:
            raise ConfigError(
                f"m={self.m} exceeds cluster size n/k={self.n / self.k:g}", ("m", "n", "k")
            )
        for name in ("l", "r_b", "network_diameter", "e_init"):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0:
                raise ConfigError(f"{name} must be finite and > 0, got {value!r}", (name,))
        for name in ("d_bs", "d_intra", "d_adv", "n_frames"):
            value = getattr(self, name)
            if value is not None and (not math.isfinite(value) or value < 0):
                raise ConfigError(f"{name} must be finite and >= 0, got {value!r}", (name,))
        if self.eq9_exponent not in (2, 4):
            raise ConfigError("eq9_exponent must be 2 or 4", ("eq9_exponent",))
        if not isinstance(self.radio, RadioParams):
            raise ConfigError("radio must be a RadioParams", ("radio",))

    @property
    def cluster_size(self) -> float:
        return self.n / self.k

    @property
    def iterations_per_round(self) -> float:
        return self.n / (self.k * self.m)

    @property
    def intra_distance(self) -> float:
        return representative_intra_distance(self) if self.d_intra is None else self.d_intra

    @property
    def adv_distance(self) -> float:
        return representative_intra_distance(self) if self.d_adv is None else self.d_adv

    def check_uniform(self) -> None:
        """Require equal clusters and a whole number of iterations per round."""
        if self.n % self.k:
            raise ConfigError(f"k={self.k} does not divide n={self.n}", ("k", "n"))
        if self.n % (self.k * self.m):
            raise ConfigError(
                f"m*k={self.m * self.k} does not divide n={self.n}", ("m", "k", "n")
            )

    def replace(self, **changes) -> "NetworkConfig":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "NetworkConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown config fields: {', '.join(unknown)}", tuple(unknown))
        data = dict(data)
        radio = data.pop("radio", None) or {}
        if isinstance(radio, dict):
            radio_known = {f.name for f in fields(RadioParams)}
            bad = sorted(set(radio) - radio_known)
            if bad:
                raise ConfigError(
                    f"unknown radio fields: {', '.join(bad)}", tuple(f"radio.{b}" for b in bad)
                )
            try:
                radio = RadioParams(**radio)
            except ValueError as exc:
                raise ConfigError(str(exc), ("radio",)) from exc
        for name in ("n", "k", "m"):
            if name in data and isinstance(data[name], float) and data[name].is_integer():
                data[name] = int(data[name])
        return cls(radio=radio, **data)


def _is_int(value) -> bool:
    return isinstance(value, (int, np.integer)) and not isinstance(value, bool)


def representative_intra_distance(cfg) -> float:
    """Typical member-to-head distance M / sqrt(2*pi*k) for a uniform field."""
    return cfg.network_diameter / math.sqrt(2 * math.pi * cfg.k)


@dataclass
class Node:
    id: int
    x: float
    y: float
    residual_energy: float
    cluster_id: int | None = None
    role: int = MEMBER
    headset_services_this_round: int = 0

    @property
    def position(self) -> tuple[float, float]:
        return (self.x, self.y)


def make_rng(seed: int) -> np.random.Generator:
    """PCG64 stream; identical draws on every platform for the same seed."""
    return np.random.Generator(np.random.PCG64(int(seed) & (2**64 - 1)))


def generate_topology(cfg: NetworkConfig, seed: int) -> list[Node]:
    """Place ``cfg.n`` nodes uniformly at random in the square field."""
    rng = make_rng(seed)
    xy = rng.uniform(0.0, cfg.network_diameter, size=(cfg.n, 2))
    return [Node(i, float(x), float(y), cfg.e_init) for i, (x, y) in enumerate(xy)]


def assign_clusters(nodes, heads) -> np.ndarray:
    """Index of the nearest head for every node, ties going to the lower index.

    ``nodes`` is a sequence of :class:`Node` or an ``(n, 2)`` array; dead nodes
    get -1.  ``heads`` is a ``(k, 2)`` sequence of head positions.
    """
    heads = np.asarray(heads, dtype=float).reshape(-1, 2)
    if len(heads) == 0:
        raise ValueError("at least one head position is required")
    if isinstance(nodes, np.ndarray):
        xy = nodes.reshape(-1, 2)
        alive = np.ones(len(xy), dtype=bool)
    else:
        xy = np.array([(nd.x, nd.y) for nd in nodes], dtype=float).reshape(-1, 2)
        alive = np.array([nd.role != DEAD for nd in nodes], dtype=bool)
    dx = xy[:, None, 0] - heads[None, :, 0]
    dy = xy[:, None, 1] - heads[None, :, 1]
    # argmin returns the first minimum, which is the lowest cluster id
    labels = np.argmin(dx * dx + dy * dy, axis=1)
    return np.where(alive, labels, -1)


def export_topology(cfg: NetworkConfig, seed: int, nodes, path=None) -> dict:
    doc = {
        "seed": int(seed),
        "config": cfg.to_dict(),
        "nodes": [{"id": nd.id, "x": nd.x, "y": nd.y} for nd in nodes],
    }
    if path is not None:
        Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return doc


def import_topology(source) -> tuple[NetworkConfig, int, list[Node]]:
    """Inverse of :func:`export_topology`; accepts a path or a parsed document."""
    doc = source if isinstance(source, dict) else json.loads(Path(source).read_text())
    cfg = NetworkConfig.from_dict(doc["config"])
    nodes = [Node(int(r["id"]), float(r["x"]), float(r["y"]), cfg.e_init) for r in doc["nodes"]]
    if len(nodes) != cfg.n:
        raise ConfigError(f"topology has {len(nodes)} nodes, config says n={cfg.n}", ("nodes",))
    return cfg, int(doc["seed"]), nodes
