"""Rotational averaging suppresses chirality-dependent dressed potentials.

Runs the 1 mK x-x-z scenario for both enantiomers and compares the
time-averaged interaction energy of each dressed branch against the
restricted single-loop control (rotational structure frozen to one
resonant |J K M> = |1 1 1> loop).  With the full rotational manifold the
branch potentials collapse toward zero, while a residual L/R difference
survives in the time traces.
"""

import numpy as np

from chiralsep.scenarios import builtin_config, run_scenario


def main():
    print("full rotational manifold, T = 1 mK, x-x-z, partially dressed:")
    res = run_scenario(builtin_config("fig7-1mK-xxz"))
    for branch, per in sorted(res.traces.items(), key=str):
        diff = np.max(np.abs(per["L"].values - per["R"].values))
        print(f"  branch {branch}: <V>_L = {per['L'].time_average:+.4f}  "
              f"<V>_R = {per['R'].time_average:+.4f}  "
              f"max |L-R| = {diff:.4f}   (units of the 1-2 peak Rabi)")

    print("\nrestricted single-loop control (|1 1 1>, all z):")
    ctrl = run_scenario(builtin_config("restricted-loop"))
    for branch, per in sorted(ctrl.traces.items(), key=str):
        print(f"  branch {branch}: <V>_L = {per['L'].time_average:+.4f}  "
              f"<V>_R = {per['R'].time_average:+.4f}")

    print("\nthe control keeps O(1) chirality-dependent potentials; the")
    print("thermal rotational ensemble suppresses them by more than an")
    print("order of magnitude, yet the L and R traces remain distinguishable")


if __name__ == "__main__":
    main()
