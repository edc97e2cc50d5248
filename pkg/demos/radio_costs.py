"""
What a bit costs to move
========================

Walk through the first-order radio model: the fixed electronics cost, the
distance-dependent amplifier term, and where the two amplifier regimes cross.
"""

import numpy as np

from cbhrp.radio import RadioParams, crossover_distance, rx_energy, tx_energy_long, tx_energy_short

radio = RadioParams()
l = 2000  # bits per message

# Receiving only pays the electronics plus aggregation, independent of distance.
print(f"receive {l} bits: {rx_energy(l, radio) * 1e6:.1f} uJ")

# Transmitting grows with distance; the short-range model is quadratic,
# the long-range one quartic with a much smaller coefficient.
d = np.array([10, 25, 50, 100, 200, 277.4, 350])
short = tx_energy_short(l, d, radio)
long_ = tx_energy_long(l, d, radio)
print("\n distance   short(uJ)   long(uJ)")
for row in zip(d, short * 1e6, long_ * 1e6):
    print("{:9.1f} {:11.2f} {:10.2f}".format(*row))

# Beyond this distance the quartic term overtakes the quadratic one.
print(f"\namplifier crossover: {crossover_distance(radio):.1f} m")

# Scaling every coefficient scales every cost the same way.
cheap = radio.scaled(0.5)
print(f"half-cost radio, 100 m hop: {tx_energy_long(l, 100, cheap) * 1e6:.1f} uJ")
