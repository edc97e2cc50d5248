"""Exit criteria for the package, one test per criterion."""

import filecmp
import math
import subprocess
import sys
import time
from pathlib import Path

import numpy as np

import oracle
from cbhrp import analytic as am
from cbhrp import harness, sim
from cbhrp.radio import RadioParams, rx_energy, tx_energy_long, tx_energy_short
from cbhrp.topology import NetworkConfig, representative_intra_distance
from helpers import InvariantWatch

GOLDEN = Path(__file__).parent / "golden"


def random_uniform_config(rng):
    k = int(rng.integers(1, 60))
    m = int(rng.integers(1, 10))
    n = k * m * int(rng.integers(1, 15))
    return NetworkConfig(
        n=n, k=k, m=m,
        l=float(rng.uniform(100, 10_000)),
        r_b=float(rng.uniform(1e3, 1e7)),
        network_diameter=float(rng.uniform(10, 500)),
        d_bs=float(rng.uniform(0, 300)),
        e_init=float(rng.uniform(0.05, 5)),
        radio=RadioParams(*(float(c) * float(rng.uniform(0.2, 5)) for c in (50e-9, 0.0013e-12, 100e-12, 5e-9))),
    )


def test_1_algebraic_identities(criterion):
    rng = np.random.default_rng(20240601)
    start = time.perf_counter()
    worst = {"fractions": 0.0, "dual": 0.0, "inverse": 0.0}
    exact_timing = True
    for _ in range(1200):
        cfg = random_uniform_config(rng)
        f1, f2 = am.frame_fractions(cfg)
        worst["fractions"] = max(worst["fractions"], abs(f1 + f2 - 1 / cfg.k) * cfg.k)

        n_f = float(rng.uniform(0, 1e6))
        e = am.evaluate(cfg, n_f=n_f)
        by_roles = e.e_ch_per_node + (cfg.n / (cfg.m * cfg.k) - 1) * e.e_non_ch_per_node
        by_totals = (e.e_ch_iteration + e.e_non_ch_iteration) / cfg.m
        worst["dual"] = max(worst["dual"], abs(by_roles - by_totals) / by_totals)

        election = (e.e_ch_election, e.e_non_ch_election)
        frames = (e.e_ch_per_frame, e.e_non_ch_per_frame)
        back = am.frames_per_iteration(cfg, e.e_init_required, election, frames, (f1, f2)).n_f
        if n_f > 0:
            worst["inverse"] = max(worst["inverse"], abs(back - n_f) / n_f)

        t = am.timing(cfg, n_f)
        exact_timing &= t.t_round == t.t_iteration * (cfg.n / (cfg.k * cfg.m))
        exact_timing &= t.t_frame == (cfg.n / cfg.k - cfg.m + 1) * t.t_msg
    elapsed = time.perf_counter() - start
    ok = (
        worst["fractions"] <= 1e-12 and worst["dual"] <= 1e-12 and worst["inverse"] <= 1e-9
        and exact_timing and elapsed < 5
    )
    criterion(
        "1 algebraic identities (1200 configs)", ok,
        f"f1+f2 {worst['fractions']:.1e}, role/total routes {worst['dual']:.1e}, "
        f"inverse {worst['inverse']:.1e}, timing exact={exact_timing}, {elapsed:.2f}s",
    )


def test_2_worked_values_against_oracle(criterion):
    p = RadioParams()
    cfg = NetworkConfig(n=1000, k=50, m=2, l=2000, d_bs=100, r_b=1e6)
    d = representative_intra_distance(cfg)
    pairs = {
        "tx long": (tx_energy_long(2000, 100, p), oracle.TX_LONG_2000_100),
        "tx short": (tx_energy_short(2000, 50, p), oracle.TX_SHORT_2000_50),
        "rx 1 bit": (rx_energy(1, p), oracle.RX_1),
        "rx 2000 bits": (rx_energy(2000, p), oracle.RX_2000),
        "head election": (am.election_energy(cfg, 25, 25)[0], oracle.CH_ELECTION),
        "member election": (am.election_energy(cfg, 25, 25)[1], oracle.NON_CH_ELECTION),
        "head frame": (am.frame_energy(cfg, 100, 25)[0], oracle.CH_FRAME),
        "member frame": (am.frame_energy(cfg, 100, 25)[1], oracle.NON_CH_FRAME),
        "f1": (am.frame_fractions(cfg)[0], oracle.F1),
        "f2": (am.frame_fractions(cfg)[1], oracle.F2),
        "f1 (n=100,k=10,m=5)": (am.frame_fractions(NetworkConfig(n=100, k=10, m=5))[0], oracle.fractions(100, 10, 5)[0]),
        "head data": (am.evaluate(cfg, n_f=1000, d_adv=25, d_intra=25).e_ch_data, oracle.CH_DATA),
        "head iteration": (am.evaluate(cfg, n_f=1000, d_adv=25, d_intra=25).e_ch_iteration, oracle.CH_ITERATION),
        "head per node": (am.evaluate(cfg, n_f=1000, d_adv=25, d_intra=25).e_ch_per_node, oracle.CH_ITERATION / 2),
        "intra distance": (d, oracle.intra_distance(100, 50)),
        "initial energy": (am.evaluate(cfg, n_f=1000).e_init_required,
                           oracle.init_energy_for_frames(1000, 50, 2, 2000, 1000, d, d, 100)),
    }
    for got, want in zip(am.timing(cfg, 100).as_dict().values(), oracle.timing(1000, 50, 2, 2000, 1e6, 100)):
        pairs[f"timing {want:g}"] = (got, want)
    frozen = {
        oracle.TX_LONG_2000_100: 3.6e-4, oracle.TX_SHORT_2000_50: 6.0e-4, oracle.RX_2000: 1.1e-4,
        oracle.CH_ELECTION: 2.315e-3, oracle.NON_CH_ELECTION: 5.725e-3, oracle.CH_FRAME: 2.34e-3,
        oracle.NON_CH_FRAME: 2.25e-4, oracle.F1: 1 / 950, oracle.F2: 18 / 950, oracle.CH_ITERATION: 2.315e-3 + 2.34e-3 * 1000 / 950,
    }
    for got, want in frozen.items():
        pairs[f"frozen {want:g}"] = (got, want)
    worst = max(abs(g - w) / abs(w) for g, w in pairs.values())
    scan_ok = math.floor(am.evaluate(cfg.replace(e_init=0.5)).n_f) == oracle.scan_frames(
        1000, 50, 2, 2000, 0.5, d, d, 100
    )
    criterion(
        "2 worked values vs independent oracle", worst <= 1e-12 and scan_ok,
        f"{len(pairs)} values, worst rel err {worst:.1e}, frame scan match={scan_ok}",
    )


def test_3_leach_reduction(criterion):
    rng = np.random.default_rng(77)
    mismatches = 0
    for _ in range(100):
        cfg = random_uniform_config(rng)
        n_f = None if rng.random() < 0.5 else float(rng.uniform(0, 1e5))
        if am.leach_baseline(cfg, n_f) != am.analyze(cfg.replace(m=1), n_f):
            mismatches += 1
    criterion("3 LEACH is the m=1 case (100 configs)", mismatches == 0, f"{mismatches} mismatches")


def test_4_headset_advantage(criterion):
    cfg = NetworkConfig()
    table = harness.compare_protocols(cfg, (1, 2, 4, 8))
    per_member = [r["per_member_frame_energy"] for r in table]
    decreasing = all(a > b for a, b in zip(per_member, per_member[1:]))
    archived = harness.csv_text(table[:3], harness.COMPARE_HEADER) == (GOLDEN / "compare_default.csv").read_bytes().decode()

    paired = []
    for seed in range(3):
        for n_frames in (None, 20_000):
            c = cfg.replace(n_frames=n_frames)
            one = sim.run_to_extinction(c.replace(m=1), seed).rounds_to_first_death
            two = sim.run_to_extinction(c.replace(m=2), seed).rounds_to_first_death
            paired.append((one, two))
    lifetime = all(two >= one for one, two in paired)
    ratios = ", ".join(f"m={r['m']}: {r['improvement_vs_leach']:.2f}x" for r in table)
    criterion(
        "4 head-set advantage", decreasing and archived and lifetime,
        f"per-member frame energy falling={decreasing} ({ratios}); FND pairs m1/m2 {paired}",
    )


def test_5_simulation_matches_closed_form(criterion):
    start = time.perf_counter()
    worst, clock_exact = 0.0, True
    for k in (10, 25, 50):
        for m in (1, 2, 4):
            cfg = NetworkConfig(n=1000, k=k, m=m)
            state = sim.init_state(cfg, 0, "ideal")
            sim.run_iteration(state)
            e = am.evaluate(cfg)
            target = e.e_ch_iteration + e.e_non_ch_iteration
            worst = max(worst, max(abs(v - target) / target for v in state.last_iteration_energy.values()))
            clock_exact &= state.clock == am.timing(cfg, state.schedule.cycles).t_iteration
    elapsed = time.perf_counter() - start
    criterion(
        "5 simulated iteration energy vs closed form (3x3 k,m)", worst <= 0.01 and clock_exact and elapsed < 60,
        f"worst rel err {worst:.2e}, clock exact={clock_exact}, {elapsed:.2f}s",
    )


def test_6_figure_trends(criterion):
    fig1 = [r for r in harness.run_sweep(harness.preset("fig1")) if r["status"] == "ok"]
    fig1_ok = True
    for diameter in sorted({r["network_diameter"] for r in fig1}):
        col = {r["k"]: r["e_round"] for r in fig1 if r["network_diameter"] == diameter}
        fig1_ok &= all(v < col[10] for k, v in col.items() if 20 <= k <= 60)
    fig2 = [r for r in harness.run_sweep(harness.preset("fig2")) if r["status"] == "ok"]
    fig2_ok = True
    for m in sorted({r["m"] for r in fig2}):
        series = [r["e_round"] for r in sorted((r for r in fig2 if r["m"] == m), key=lambda r: r["d_bs"])]
        fig2_ok &= all(a <= b for a, b in zip(series, series[1:]))
    criterion(
        "6 figure trends", fig1_ok and fig2_ok and len(fig1) == 45 and len(fig2) == 45,
        f"fig1 k in [20,60] below k=10: {fig1_ok}; fig2 non-decreasing in d_bs: {fig2_ok}",
    )


def test_7_invariants_over_extinction_runs(criterion):
    cfg = NetworkConfig()
    violations, frames, unfinished = 0, 0, 0
    for seed in range(100, 120):
        watch = InvariantWatch(cfg.n, cfg.e_init)
        state = sim.init_state(cfg, seed, observers=(watch,))
        life = sim.run_to_extinction(cfg, seed, state=state)
        violations += len(watch.violations)
        frames += watch.frames_checked
        unfinished += life.truncated
    criterion(
        "7 conservation / one service / single active head (20 runs)", violations == 0 and unfinished == 0,
        f"{violations} violations over {frames} stints, {unfinished} runs not extinct",
    )


def test_8_deterministic_sweep(criterion, tmp_path):
    outs = []
    for i in range(2):
        out = tmp_path / f"run{i}.csv"
        subprocess.run(
            [sys.executable, "-m", "cbhrp", "sweep", "--preset", "fig3", "--seed", "7", "--out", str(out)],
            check=True,
        )
        outs.append(out)
    same = filecmp.cmp(outs[0], outs[1], shallow=False)
    rows = outs[0].read_text().count("\n") - 1
    criterion("8 repeated fig3 sweep is byte-identical", same and rows == 25, f"{rows} rows, identical={same}")
