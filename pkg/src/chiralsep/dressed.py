"""Rotationless three-level dressed states and effective gauge potentials.

For three beams driving the 1-2, 2-3 and 1-3 transitions the resonant
internal Hamiltonian at a transverse position x is the 3x3 zero-diagonal
matrix of local Rabi values.  Diagonalizing it on a grid yields dressed
branches; the scalar potential of branch n is its eigenvalue (plus a trap
expectation) and the vector potential is the Berry connection
i <chi_n | d/dx chi_n>, evaluated by central finite differences.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .coupling import Enantiomer, LaserSpec


class DegenerateFrameWarning(UserWarning):
    """Eigenvalue gap too small for a reliable gauge fixing."""


class DiscontinuousFrameError(RuntimeError):
    """Adjacent-point eigenvector overlap too small for finite differences."""


def loop_matrix(omega12: complex, omega23: complex, omega13: complex) -> np.ndarray:
    """Resonant 3-level loop Hamiltonian with the given Rabi entries."""
    return np.array(
        [
            [0, np.conj(omega12), np.conj(omega13)],
            [omega12, 0, np.conj(omega23)],
            [omega13, omega23, 0],
        ],
        dtype=complex,
    )


def dress(omegas, gap_warn: float = 1e-9):
    """Diagonalize the local 3-level loop Hamiltonian.

    `omegas` = (omega12, omega23, omega13).  Returns (eigenvalues ascending,
    eigenvectors as columns), gauge-fixed so the largest-magnitude component
    of each vector is real positive.  Warns on near-degeneracy.
    """
    h = loop_matrix(omegas[0], omegas[1], omegas[2])
    vals, vecs = np.linalg.eigh(h)
    scale = np.max(np.abs(omegas))
    if scale == 0 or np.min(np.diff(vals)) < gap_warn * scale:
        warnings.warn("near-degenerate dressed levels; gauge fixing unreliable",
                      DegenerateFrameWarning, stacklevel=2)
    for n in range(3):
        k = np.argmax(np.abs(vecs[:, n]))
        phase = vecs[k, n] / abs(vecs[k, n]) if vecs[k, n] != 0 else 1.0
        vecs[:, n] = vecs[:, n] / phase
    return vals, vecs


@dataclass(frozen=True)
class FieldConfiguration:
    """Local Rabi values of the three beams sampled on a transverse grid."""

    grid: np.ndarray              # x samples, uniform spacing
    omegas: np.ndarray            # shape (nx, 3): omega12, omega23, omega13

    @classmethod
    def from_lasers(cls, lasers: list[LaserSpec], grid,
                    who: Enantiomer = Enantiomer.L,
                    phase_profiles=None) -> "FieldConfiguration":
        """Evaluate three Gaussian beams on a grid.

        The rotationless reference uses the bare peak Rabi values (no
        orientation factor).  The enantiomer enters as a global sign on all
        three couplings.  `phase_profiles`, when given, is a list of three
        callables x -> phase (rad) multiplied onto each beam; nonconstant
        phases generate nonzero Berry connections.
        """
        grid = np.asarray(grid, dtype=float)
        by_pair = {tuple(l.drives): l for l in lasers}
        cols = []
        for k, pair in enumerate([(1, 2), (2, 3), (1, 3)]):
            laser = by_pair[pair]
            env = np.array([laser.peak_rabi * laser.beam(x) for x in grid], dtype=complex)
            if phase_profiles is not None:
                env = env * np.exp(1j * np.array([phase_profiles[k](x) for x in grid]))
            cols.append(env)
        om = np.stack(cols, axis=1)
        if who is Enantiomer.R:
            om = -om
        return cls(grid=grid, omegas=om)


@dataclass(frozen=True)
class DressedFrame:
    """Gauge-fixed dressed eigensystem on a grid."""

    grid: np.ndarray              # (nx,)
    eigenvalues: np.ndarray       # (nx, 3), ascending per point
    eigenvectors: np.ndarray      # (nx, 3, 3), columns are branches

    @property
    def spacing(self):
        return float(self.grid[1] - self.grid[0])


def dress_field(config: FieldConfiguration) -> DressedFrame:
    """Diagonalize at every grid point in a smooth deterministic gauge.

    Per branch, one anchor component (the largest at the grid midpoint) is
    made real positive everywhere.  This gauge is a pointwise function of x,
    so the Berry connection it induces is physical and grid-independent; an
    overlap-based parallel transport would instead null the connection by
    construction.  Points where the anchor component vanishes fall back to
    phase alignment with the previous grid point.
    """
    vals = np.empty((len(config.grid), 3))
    vecs = np.empty((len(config.grid), 3, 3), dtype=complex)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateFrameWarning)
        for k, om in enumerate(config.omegas):
            vals[k], vecs[k] = dress(om)
    mid = len(config.grid) // 2
    anchors = [int(np.argmax(np.abs(vecs[mid][:, n]))) for n in range(3)]
    for n in range(3):
        a = anchors[n]
        for k in range(len(config.grid)):
            c = vecs[k][a, n]
            if abs(c) > 1e-12:
                vecs[k][:, n] *= np.conj(c) / abs(c)
            elif k > 0:
                ov = np.vdot(vecs[k - 1][:, n], vecs[k][:, n])
                if ov != 0:
                    vecs[k][:, n] *= np.conj(ov) / abs(ov)
    return DressedFrame(grid=config.grid, eigenvalues=vals, eigenvectors=vecs)


def scalar_potential(frame: DressedFrame, n: int, trap=None) -> np.ndarray:
    """V_n(x) = eps_n(x) + <chi_n|V|chi_n> (trap defaults to zero)."""
    v = frame.eigenvalues[:, n].copy()
    if trap is not None:
        v += np.array([trap(x) for x in frame.grid])
    return v


def _check_continuity(frame: DressedFrame, n: int, min_overlap: float):
    vecs = frame.eigenvectors[:, :, n]
    ov = np.abs(np.sum(np.conj(vecs[:-1]) * vecs[1:], axis=1))
    if np.min(ov) < min_overlap:
        raise DiscontinuousFrameError(
            f"branch {n}: adjacent eigenvector overlap {np.min(ov):.3f} < {min_overlap}"
        )


def vector_potential(frame: DressedFrame, n: int, min_overlap: float = 0.9) -> np.ndarray:
    """Berry connection A_n(x) = i <chi_n | d/dx chi_n>, hbar = 1.

    Central differences in the interior, one-sided at the ends.  Real by
    construction for a normalized smooth frame.
    """
    _check_continuity(frame, n, min_overlap)
    vecs = frame.eigenvectors[:, :, n]
    dv = np.gradient(vecs, frame.grid, axis=0)
    conn = 1j * np.sum(np.conj(vecs) * dv, axis=1)
    return np.real(conn)


def offdiagonal_check(frame: DressedFrame, v_typ: float = 1.0,
                      gap_floor: float = 1e-9) -> float:
    """Max |v_typ <chi_n|d/dx chi_m>| / |eps_n - eps_m| over grid and n != m.

    Points with gaps below `gap_floor` (relative to the local eigenvalue
    scale) are masked out of the maximum.
    """
    vecs = frame.eigenvectors
    dv = np.gradient(vecs, frame.grid, axis=0)
    worst = 0.0
    for n in range(3):
        for m in range(3):
            if n == m:
                continue
            conn = np.abs(np.sum(np.conj(vecs[:, :, n]) * dv[:, :, m], axis=1))
            gap = np.abs(frame.eigenvalues[:, n] - frame.eigenvalues[:, m])
            scale = np.maximum(np.max(np.abs(frame.eigenvalues), axis=1), 1e-300)
            ok = gap > gap_floor * scale
            if np.any(ok):
                worst = max(worst, float(np.max(v_typ * conn[ok] / gap[ok])))
    return worst
