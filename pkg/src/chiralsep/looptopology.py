"""Spectral sensitivity of closed-loop Hamiltonians to Rabi sign flips.

A zero-diagonal Hermitian matrix of complex Rabi frequencies is viewed as a
weighted adjacency matrix.  Its spectrum changes under negation of a subset
of edges exactly when the subset flips the gauge-invariant phase of some
cycle, i.e. when an odd number of loop edges is negated; sign patterns on
tree-like parts are pure gauge.
"""

from __future__ import annotations

from dataclasses import dataclass

import networkx as nx
import numpy as np

SPECTRUM_CHANGED = "spectrum-changed"
SPECTRUM_UNCHANGED = "spectrum-unchanged"


class FlipIndeterminateError(RuntimeError):
    """Spectral change below tolerance although a loop phase changed."""


def _edge_key(a, b):
    return (a, b) if a <= b else (b, a)


@dataclass(frozen=True)
class LoopHamiltonian:
    """n-level Hamiltonian with zero diagonal, stored as a dense matrix."""

    matrix: np.ndarray

    @classmethod
    def from_upper(cls, n: int, omegas: dict) -> "LoopHamiltonian":
        """Build from {(i, j): omega} with 0 <= i < j < n."""
        h = np.zeros((n, n), dtype=complex)
        for (i, j), w in omegas.items():
            if not 0 <= i < j < n:
                raise ValueError(f"edge ({i}, {j}) out of range for n = {n}")
            h[i, j] = np.conj(w)
            h[j, i] = w
        return cls(h)

    @property
    def n(self):
        return self.matrix.shape[0]

    def edges(self):
        i, j = np.nonzero(np.triu(self.matrix, 1))
        return [(int(a), int(b)) for a, b in zip(i, j)]

    def with_flips(self, flips) -> "LoopHamiltonian":
        h = self.matrix.copy()
        for a, b in flips:
            if h[a, b] == 0:
                raise ValueError(f"edge ({a}, {b}) has zero coupling")
            h[a, b] = -h[a, b]
            h[b, a] = -h[b, a]
        return LoopHamiltonian(h)


@dataclass(frozen=True)
class SignPattern:
    """Subset of (undirected) edges whose Rabi frequencies are negated."""

    flips: frozenset

    @classmethod
    def of(cls, *edges):
        return cls(frozenset(_edge_key(a, b) for a, b in edges))


def spectrum(h: LoopHamiltonian) -> np.ndarray:
    """Real eigenvalues, ascending."""
    return np.linalg.eigvalsh(h.matrix)


def loop_phases(h: LoopHamiltonian, max_len: int = 8) -> dict[tuple, float]:
    """Gauge-invariant Re[product of couplings] around each simple cycle."""
    cycles = find_loops(h.edges(), max_len=max_len)
    out = {}
    for cyc in cycles:
        prod = 1.0 + 0j
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            prod *= h.matrix[b, a]
        out[tuple(cyc)] = float(np.real(prod))
    return out


def flip_sensitivity(
    h: LoopHamiltonian, pattern: SignPattern, tol: float = 1e-9
) -> str:
    """Classify a sign pattern as spectrum-changed or spectrum-unchanged.

    Raises FlipIndeterminateError when the sorted spectra agree within tol
    although the loop-phase product of some cycle changed sign (a degenerate
    coincidence; the caller should retry with perturbed couplings).
    """
    flipped = h.with_flips(pattern.flips)
    dist = float(np.max(np.abs(spectrum(h) - spectrum(flipped))))
    if dist > tol:
        return SPECTRUM_CHANGED
    before = loop_phases(h)
    after = loop_phases(flipped)
    scale = max((abs(v) for v in before.values()), default=0.0)
    for key, val in before.items():
        if abs(val - after[key]) > tol * max(1.0, scale):
            raise FlipIndeterminateError(
                f"loop phase of {key} changed but spectrum moved only {dist:.2e}"
            )
    return SPECTRUM_UNCHANGED


def find_loops(edges, max_len: int = 8) -> list[list]:
    """Deterministically enumerate simple cycles of length >= 3.

    `edges` is an iterable of node pairs (undirected simple graph).  Each
    cycle is rotated/reflected to a canonical node order; the list is sorted.
    """
    g = nx.Graph()
    g.add_edges_from(edges)
    seen = set()
    loops = []
    for cyc in nx.simple_cycles(g, length_bound=max_len):
        if len(cyc) < 3:
            continue
        canon = _canonical_cycle(cyc)
        if canon not in seen:
            seen.add(canon)
            loops.append(list(canon))
    loops.sort(key=lambda c: (len(c), c))
    return loops


def _canonical_cycle(cyc):
    k = cyc.index(min(cyc))
    rot = cyc[k:] + cyc[:k]
    rev = [rot[0]] + rot[1:][::-1]
    return tuple(min(rot, rev))


def random_loop_hamiltonian(
    n: int, rng: np.random.Generator, min_gap: float = 1e-6
) -> LoopHamiltonian:
    """Generic n-cycle Hamiltonian: |omega| in [0.5, 1.5], uniform phases.

    Draws are repeated until the spectrum is non-degenerate (gap > min_gap),
    since accidental degeneracies defeat the flip-parity classification.
    """
    ring = [(i, (i + 1) % n) for i in range(n)]
    while True:
        omegas = {
            _edge_key(a, b): rng.uniform(0.5, 1.5) * np.exp(2j * np.pi * rng.uniform())
            for a, b in ring
        }
        h = LoopHamiltonian.from_upper(n, omegas)
        eig = spectrum(h)
        if np.min(np.diff(eig)) > min_gap:
            return h
