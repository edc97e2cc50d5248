"""Closed-form energy and timing model of a head-set clustered network.

All quantities are per cluster unless the name says otherwise.  ``n_f`` is the
number of data frames sent network-wide in one iteration; a cluster gets
``n_f / k`` of them, of which the fraction ``f1`` is carried by the active
head and ``f2`` by the ordinary members.  LEACH is the ``m = 1`` case.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import NamedTuple

from .errors import ConfigError, ConsistencyError
from .radio import tx_energy_short
from .topology import NetworkConfig

CONSISTENCY_RTOL = 1e-12


class FrameBudget(NamedTuple):
    n_f: float
    exhausted: bool


class PerNodeEnergy(NamedTuple):
    ch: float
    non_ch: float
    degenerate: bool


@dataclass(frozen=True)
class EnergyBreakdown:
    e_ch_election: float
    e_non_ch_election: float
    e_ch_per_frame: float
    e_non_ch_per_frame: float
    f1: float
    f2: float
    e_ch_data: float
    e_non_ch_data: float
    e_ch_iteration: float
    e_non_ch_iteration: float
    e_ch_per_node: float
    e_non_ch_per_node: float
    e_init_required: float
    n_f: float
    e_round: float               # whole network, one round
    elections_per_round: float
    degenerate: bool = False
    budget_exhausted: bool = False

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class TimingReport:
    t_msg: float
    t_frame: float
    t_iteration: float
    t_round: float

    def as_dict(self) -> dict:
        return asdict(self)


def election_energy(cfg: NetworkConfig, d_adv: float | None = None, d_intra: float | None = None):
    """Election-phase cost of the head and of a non-head node.

    The head advertises over ``d_adv`` and receives ``n/k - 1`` join replies;
    a non-head hears all ``k`` advertisements and answers over ``d_intra``.
    """
    d_adv = cfg.adv_distance if d_adv is None else d_adv
    d_intra = cfg.intra_distance if d_intra is None else d_intra
    if d_adv < 0 or d_intra < 0:
        raise ValueError("distances must be >= 0")
    p, l, nk, k = cfg.radio, cfg.l, cfg.cluster_size, cfg.k
    e_ch = nk * l * p.e_elec + l * p.e_agg * (nk - 1) + l * p.eps_amp_short * d_adv**2
    e_non_ch = l * p.e_elec * (1 + k) + k * l * p.e_agg + l * p.eps_amp_short * d_intra**2
    return e_ch, e_non_ch


def frame_energy(
    cfg: NetworkConfig,
    d_bs: float | None = None,
    d_intra: float | None = None,
    eq9_exponent: int | None = None,
):
    """Per-frame cost of the active head and of one reporting member.

    The head sends one aggregate to the base station and receives from the
    ``n/k - m`` members outside the head-set.  ``eq9_exponent=2`` reproduces
    the d**2 variant of the simplified head formula.
    """
    d_bs = cfg.d_bs if d_bs is None else d_bs
    d_intra = cfg.intra_distance if d_intra is None else d_intra
    exponent = cfg.eq9_exponent if eq9_exponent is None else eq9_exponent
    if exponent not in (2, 4):
        raise ConfigError("eq9_exponent must be 2 or 4", ("eq9_exponent",))
    if d_bs < 0 or d_intra < 0:
        raise ValueError("distances must be >= 0")
    p, l = cfg.radio, cfg.l
    senders = cfg.cluster_size - cfg.m
    if senders < 0:
        raise ConfigError(f"m={cfg.m} exceeds n/k={cfg.cluster_size:g}", ("m", "n", "k"))
    e_ch = l * p.eps_amp_long * d_bs**exponent + (senders + 1) * l * p.e_elec + l * senders * p.e_agg
    e_non_ch = tx_energy_short(l, d_intra, p)
    return e_ch, e_non_ch


def frame_fractions(cfg: NetworkConfig):
    senders = cfg.cluster_size - cfg.m
    if senders < 0:
        raise ConfigError(f"m={cfg.m} exceeds n/k={cfg.cluster_size:g}", ("m", "n", "k"))
    slots = (senders + 1) * cfg.k
    return 1.0 / slots, senders / slots


def data_phase_energy(n_f: float, frame_energies, fractions):
    if n_f < 0:
        raise ValueError("n_f must be >= 0")
    (e_ch_frame, e_non_ch_frame), (f1, f2) = frame_energies, fractions
    return f1 * n_f * e_ch_frame, f2 * n_f * e_non_ch_frame


def iteration_energy(election, data):
    return election[0] + data[0], election[1] + data[1]


def per_node_energy(cfg: NetworkConfig, iteration) -> PerNodeEnergy:
    """Split the head-set and member totals over the nodes that carry them.

    With ``m == n/k`` there are no ordinary members; the member share is 0 and
    ``degenerate`` is set.
    """
    e_ch_iter, e_non_ch_iter = iteration
    senders = cfg.cluster_size - cfg.m
    if senders <= 0:
        return PerNodeEnergy(e_ch_iter / cfg.m, 0.0, True)
    return PerNodeEnergy(e_ch_iter / cfg.m, e_non_ch_iter / senders, False)


def required_initial_energy(cfg: NetworkConfig, iteration, per_node: PerNodeEnergy | None = None) -> float:
    """Energy a node needs for one round, by two routes that must agree.

    Route one weights the per-role shares by how often a node plays each role
    in a round (head once, member ``n/(mk) - 1`` times); route two divides the
    cluster's iteration total by ``m``.
    """
    cfg.check_uniform()
    if per_node is None:
        per_node = per_node_energy(cfg, iteration)
    by_roles = per_node.ch + (cfg.iterations_per_round - 1) * per_node.non_ch
    by_totals = (iteration[0] + iteration[1]) / cfg.m
    scale = max(abs(by_roles), abs(by_totals))
    if abs(by_roles - by_totals) > CONSISTENCY_RTOL * scale:
        raise ConsistencyError(
            f"per-role ({by_roles!r}) and per-cluster ({by_totals!r}) initial energy disagree"
        )
    return by_totals


def energy_for_frames(cfg: NetworkConfig, n_f: float, election, frames, fractions) -> float:
    """Initial energy that sustains ``n_f`` frames per iteration for a round."""
    per_frame = fractions[0] * frames[0] + fractions[1] * frames[1]
    return (election[0] + election[1]) / cfg.m + n_f / cfg.m * per_frame


def frames_per_iteration(cfg: NetworkConfig, e_init: float, election, frames, fractions) -> FrameBudget:
    """Data frames per iteration that ``e_init`` can pay for (real valued)."""
    denominator = fractions[0] * frames[0] + fractions[1] * frames[1]
    if not denominator > 0:
        raise ValueError("per-frame energy is zero; the frame budget is unbounded")
    numerator = cfg.m * e_init - election[0] - election[1]
    if numerator <= 0:
        return FrameBudget(0.0, True)
    return FrameBudget(numerator / denominator, False)


def timing(cfg: NetworkConfig, n_f: float) -> TimingReport:
    if n_f < 0:
        raise ValueError("n_f must be >= 0")
    t_msg = cfg.l / cfg.r_b
    t_frame = (cfg.cluster_size - cfg.m + 1) * t_msg
    t_iteration = t_frame * n_f
    return TimingReport(t_msg, t_frame, t_iteration, t_iteration * cfg.iterations_per_round)


def evaluate(
    cfg: NetworkConfig,
    n_f: float | None = None,
    *,
    d_adv: float | None = None,
    d_intra: float | None = None,
    d_bs: float | None = None,
    eq9_exponent: int | None = None,
    strict: bool = True,
) -> EnergyBreakdown:
    """Run the whole closed-form chain for one configuration.

    ``n_f`` defaults to ``cfg.n_frames`` and, failing that, to the budget that
    ``cfg.e_init`` affords.  ``strict`` enforces equal clusters; the simulator
    passes ``strict=False`` to size schedules for ragged layouts.
    """
    if strict:
        cfg.check_uniform()
    election = election_energy(cfg, d_adv, d_intra)
    frames = frame_energy(cfg, d_bs, d_intra, eq9_exponent)
    fractions = frame_fractions(cfg)
    degenerate = cfg.cluster_size - cfg.m <= 0
    if degenerate:
        # no ordinary members exist to hear adverts or reply
        election = (election[0], 0.0)
    exhausted = False
    if n_f is None:
        n_f = cfg.n_frames
    if n_f is None:
        n_f, exhausted = frames_per_iteration(cfg, cfg.e_init, election, frames, fractions)
    data = data_phase_energy(n_f, frames, fractions)
    iteration = iteration_energy(election, data)
    per_node = per_node_energy(cfg, iteration)
    if strict:
        e_init_required = required_initial_energy(cfg, iteration, per_node)
    else:
        e_init_required = (iteration[0] + iteration[1]) / cfg.m
    return EnergyBreakdown(
        e_ch_election=election[0],
        e_non_ch_election=election[1],
        e_ch_per_frame=frames[0],
        e_non_ch_per_frame=frames[1],
        f1=fractions[0],
        f2=fractions[1],
        e_ch_data=data[0],
        e_non_ch_data=data[1],
        e_ch_iteration=iteration[0],
        e_non_ch_iteration=iteration[1],
        e_ch_per_node=per_node.ch,
        e_non_ch_per_node=per_node.non_ch,
        e_init_required=e_init_required,
        n_f=n_f,
        e_round=cfg.k * cfg.iterations_per_round * (iteration[0] + iteration[1]),
        elections_per_round=cfg.iterations_per_round,
        degenerate=degenerate,
        budget_exhausted=exhausted,
    )


def analyze(cfg: NetworkConfig, n_f: float | None = None, **kwargs):
    energy = evaluate(cfg, n_f, **kwargs)
    return energy, timing(cfg, energy.n_f)


def leach_baseline(cfg: NetworkConfig, n_f: float | None = None, **kwargs):
    """The same chain with a single head per cluster."""
    return analyze(cfg.replace(m=1), n_f, **kwargs)


def per_member_frame_energy(cfg: NetworkConfig, **kwargs) -> float:
    """Head-set frame cost amortized over its ``m`` rotating members."""
    return frame_energy(cfg, **kwargs)[0] / cfg.m


def cycles_per_iteration(cfg: NetworkConfig, n_f: float) -> float:
    """TDMA cycles a cluster runs when the network sends ``n_f`` data frames.

    Each cycle carries one slot for the active head and one per ordinary
    member, so a cluster's ``n_f / k`` frames make ``f1 * n_f`` cycles.
    """
    return frame_fractions(cfg)[0] * n_f

