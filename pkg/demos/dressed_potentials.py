"""Dressed-state potentials across three crossed Gaussian beams.

Three beams drive the 1-2, 2-3 and 1-3 vibrational transitions on
resonance.  Diagonalizing the local 3x3 coupling matrix along the
transverse coordinate gives three dressed branches whose eigenvalues act
as scalar potentials; the two enantiomers see mirror-image potential
landscapes because all three couplings change sign together.  Spatially
varying beam phases additionally induce a Berry connection (a synthetic
vector potential) on each branch.
"""

import numpy as np

from chiralsep.coupling import Enantiomer, GaussianBeam, LaserSpec
from chiralsep.dressed import FieldConfiguration, dress_field, scalar_potential, vector_potential


def beams():
    return [
        LaserSpec(drives=(1, 2), peak_rabi=1.0, beam=GaussianBeam(1.0, -0.5)),
        LaserSpec(drives=(2, 3), peak_rabi=1.0, beam=GaussianBeam(1.0, 0.5)),
        LaserSpec(drives=(1, 3), peak_rabi=1.0, beam=GaussianBeam(1.0, 0.0)),
    ]


def main():
    grid = np.linspace(-2.0, 2.0, 201)

    print("scalar potentials V_n(x) in units of the peak Rabi frequency")
    print(f"{'x':>6} {'V_1(L)':>9} {'V_2(L)':>9} {'V_3(L)':>9} {'V_1(R)':>9}")
    frames = {}
    for who in (Enantiomer.L, Enantiomer.R):
        cfg = FieldConfiguration.from_lasers(beams(), grid, who=who)
        frames[who] = dress_field(cfg)
    for k in range(0, len(grid), 25):
        vl = [scalar_potential(frames[Enantiomer.L], n)[k] for n in range(3)]
        vr = scalar_potential(frames[Enantiomer.R], 0)[k]
        print(f"{grid[k]:>6.2f} {vl[0]:>9.4f} {vl[1]:>9.4f} {vl[2]:>9.4f} {vr:>9.4f}")
    print("note: the R landscape is the L one mirrored in energy\n")

    # a beam phase gradient induces a synthetic vector potential
    profiles = [lambda x: 0.3 * np.sin(1.7 * x), lambda x: 0.0, lambda x: 0.0]
    frame = dress_field(FieldConfiguration.from_lasers(beams(), grid,
                                                       phase_profiles=profiles))
    print("Berry connection A_n(x) with a phase-modulated 1-2 beam")
    print(f"{'x':>6} {'A_1':>9} {'A_2':>9} {'A_3':>9}")
    a = [vector_potential(frame, n) for n in range(3)]
    for k in range(0, len(grid), 25):
        print(f"{grid[k]:>6.2f} {a[0][k]:>9.4f} {a[1][k]:>9.4f} {a[2][k]:>9.4f}")


if __name__ == "__main__":
    main()
