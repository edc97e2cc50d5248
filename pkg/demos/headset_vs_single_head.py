"""
Head-sets against a single rotating head
========================================

The m = 1 case is the classic single-head protocol. Larger head-sets share
the long-haul forwarding, which shows up both in the closed form and in
paired simulations that reuse the same node layout.
"""

from cbhrp import analytic, harness, sim
from cbhrp.topology import NetworkConfig

cfg = NetworkConfig(n_frames=20_000)

print(" m   per-member frame (uJ)   gain vs m=1")
for row in harness.compare_protocols(cfg, (1, 2, 4, 8)):
    print(f"{row['m']:2d} {row['per_member_frame_energy'] * 1e6:18.2f} {row['improvement_vs_leach']:14.2f}")

base, clock = analytic.leach_baseline(cfg)
print(f"\nsingle-head energy per round: {base.e_round:.2f} J over {clock.t_round / 3600:.1f} h")

# Same seed means the same layout, so the lifetimes are directly comparable.
print("\nseed   first/half/last death (rounds)")
for seed in range(3):
    for m in (1, 2):
        life = sim.run_to_extinction(cfg.replace(m=m), seed)
        print(f"{seed:4d} m={m}  {life.rounds_to_first_death}/{life.rounds_to_half_death}/{life.rounds_to_last_death}")
