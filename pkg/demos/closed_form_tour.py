"""
The closed-form energy model, one step at a time
================================================

Builds the per-iteration energy of a clustered network with a head-set of
size m, then turns it around to ask how many frames a battery affords.
"""

from cbhrp import analytic
from cbhrp.topology import NetworkConfig

cfg = NetworkConfig(n=1000, k=50, m=2, d_bs=100, e_init=0.5)
print(cfg)

# Electing heads: one advertisement plus the joins it hears (head side),
# and the adverts heard plus one join sent (member side).
ch_elect, member_elect = analytic.election_energy(cfg, cfg.adv_distance, cfg.intra_distance)
print(f"\nelection  head {ch_elect * 1e3:.3f} mJ   member {member_elect * 1e3:.3f} mJ")

# One data frame: the active head collects and forwards, a member sends once.
ch_frame, member_frame = analytic.frame_energy(cfg, cfg.d_bs, cfg.intra_distance, cfg.eq9_exponent)
f1, f2 = analytic.frame_fractions(cfg)
print(f"frame     head {ch_frame * 1e3:.3f} mJ   member {member_frame * 1e3:.4f} mJ")
print(f"share of frames served as head {f1:.3e}, as member {f2:.3e} (sum x k = {(f1 + f2) * cfg.k:.12f})")

# The whole pipeline, sizing the frame budget from the initial energy.
e = analytic.evaluate(cfg)
print(f"\nframes affordable per iteration: {e.n_f:,.0f}")
print(f"energy per node per iteration, head {e.e_ch_per_node * 1e3:.2f} mJ, member {e.e_non_ch_per_node * 1e3:.4f} mJ")
print(f"required initial energy {e.e_init_required:.6f} J (budget {cfg.e_init} J)")

# Going the other way: energy needed for a fixed frame count.
for n_f in (1_000, 10_000, 100_000):
    print(f"  {n_f:>7,} frames need {analytic.evaluate(cfg, n_f=n_f).e_init_required:.4f} J")

t = analytic.timing(cfg, e.n_f)
print(f"\nmessage {t.t_msg * 1e3:.1f} ms, frame {t.t_frame * 1e3:.1f} ms, "
      f"iteration {t.t_iteration:.0f} s, round {t.t_round / 3600:.1f} h")
