"""Physical constants and unit conversions.

All energies in the package are stored as ordinary frequencies E/h in GHz,
and times in ns.  Evolution phases are 2*pi*f*t with f in GHz and t in ns.
"""

import math

# 1 hartree / h, expressed in GHz
HARTREE_GHZ = 6.579684e6

# Boltzmann constant over Planck constant, GHz per kelvin (CODATA exact values)
KB_GHZ_PER_K = 1.380649e-23 / 6.62607015e-34 / 1e9

# Reference peak Rabi frequency sqrt(1000) * 1e-9 hartree, in GHz
OMEGA12_MAX_GHZ = math.sqrt(1000.0) * 1e-9 * HARTREE_GHZ


def kelvin_to_ghz(temperature):
    """Thermal energy k_B*T as a frequency in GHz."""
    return KB_GHZ_PER_K * temperature
