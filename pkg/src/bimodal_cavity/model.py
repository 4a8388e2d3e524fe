"""Interaction-picture Hamiltonian with Gaussian STIRAP couplings.

Units: hbar = 1 and time in units of the pulse width tau, so couplings and the
detuning are the dimensionless products g*tau and Delta*tau.

    H(t) = Delta * sum_k |e_k><e_k|
           + sum_k g1_k(t) (|e_k><g_k| a + h.c.)
           + sum_k g2_k(t) (|e_k><f_k| b + h.c.)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .fock_basis import AtomLevel, Sector, coupling_moves


@dataclass(frozen=True)
class PulseSchedule:
    """Counterintuitive Gaussian pulse pair.

    The Stokes pulse (b mode, e<->f) peaks at t=0 and the pump pulse (a mode,
    g<->e) peaks at t=T. ``per_atom_scale`` holds one ``(s1, s2)`` multiplier
    pair per atom; ``None`` means every atom sees the same coupling.
    """

    g10: float = 15.0
    g20: float = 15.0
    tau: float = 1.0
    T: float = 4.0 / 3.0
    per_atom_scale: tuple[tuple[float, float], ...] | None = None

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError("tau must be positive")
        if self.g10 < 0 or self.g20 < 0:
            raise ValueError("pulse amplitudes must be non-negative")
        if not self.T > 0:
            raise ValueError("T must be positive (Stokes before pump)")
        if self.per_atom_scale is not None:
            object.__setattr__(
                self, "per_atom_scale",
                tuple((float(a), float(b)) for a, b in self.per_atom_scale),
            )

    def envelopes(self, t):
        """Unscaled pump and Stokes amplitudes ``(g1(t), g2(t))``; ``t`` may be an array."""
        t = np.asarray(t, dtype=float)
        g1 = self.g10 * np.exp(-((t - self.T) / self.tau) ** 2)
        g2 = self.g20 * np.exp(-(t / self.tau) ** 2)
        return g1, g2

    def scales(self, n_atoms: int) -> np.ndarray:
        if self.per_atom_scale is None:
            return np.ones((n_atoms, 2))
        if len(self.per_atom_scale) != n_atoms:
            raise ValueError(
                f"per_atom_scale has {len(self.per_atom_scale)} entries for {n_atoms} atoms"
            )
        return np.array(self.per_atom_scale, dtype=float)


def coupling_at(schedule: PulseSchedule, t: float, n_atoms: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-atom couplings ``(g1, g2)`` at time ``t``."""
    g1, g2 = schedule.envelopes(t)
    s = schedule.scales(n_atoms)
    return s[:, 0] * float(g1), s[:, 1] * float(g2)


@dataclass(frozen=True)
class ModelConfig:
    sector: Sector
    schedule: PulseSchedule = field(default_factory=PulseSchedule)
    delta: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.delta):
            raise ValueError("detuning must be finite")
        self.schedule.scales(self.sector.n_atoms)

    @property
    def n_atoms(self) -> int:
        return self.sector.n_atoms


@dataclass(frozen=True)
class HamiltonianParts:
    """``H(t) = detuning + g1(t) * pump + g2(t) * stokes`` with envelope factors
    pulled out of the static matrices."""

    detuning: np.ndarray
    pump: np.ndarray
    stokes: np.ndarray

    def at(self, g1: float, g2: float) -> np.ndarray:
        return self.detuning + g1 * self.pump + g2 * self.stokes


def leg_matrices(sector: Sector, scales: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Unit-amplitude pump and Stokes coupling matrices on ``sector``.

    Each atom's leg is weighted by its entry in ``scales`` (shape ``(N, 2)``).
    Moves that leave the sector are dropped, which only matters for the
    truncated product spaces used in tests.
    """
    d = len(sector)
    if scales is None:
        scales = np.ones((sector.n_atoms, 2))
    pump = np.zeros((d, d), dtype=complex)
    stokes = np.zeros((d, d), dtype=complex)
    for i, s in enumerate(sector.states):
        for k, mode, target, amp in coupling_moves(s):
            j = sector.index.get(target)
            if j is None:
                continue
            if mode == 1:
                pump[j, i] = scales[k, 0] * amp
            else:
                stokes[j, i] = scales[k, 1] * amp
    return pump, stokes


def excited_counts(sector: Sector) -> np.ndarray:
    return np.array([s.count(AtomLevel.E) for s in sector.states], dtype=float)


def hamiltonian_parts(config: ModelConfig) -> HamiltonianParts:
    pump, stokes = leg_matrices(config.sector, config.schedule.scales(config.n_atoms))
    detuning = np.diag(config.delta * excited_counts(config.sector)).astype(complex)
    return HamiltonianParts(detuning, pump, stokes)


def hamiltonian_at(config: ModelConfig, t: float) -> np.ndarray:
    g1, g2 = config.schedule.envelopes(t)
    return hamiltonian_parts(config).at(float(g1), float(g2))


def hamiltonian_from_couplings(
    sector: Sector, g1: np.ndarray, g2: np.ndarray, delta: float = 0.0
) -> np.ndarray:
    """Hamiltonian for explicit per-atom coupling values (no pulse shape)."""
    g1 = np.broadcast_to(np.asarray(g1, dtype=float), (sector.n_atoms,))
    g2 = np.broadcast_to(np.asarray(g2, dtype=float), (sector.n_atoms,))
    pump, stokes = leg_matrices(sector, np.column_stack([g1, g2]))
    return pump + stokes + np.diag(delta * excited_counts(sector))
