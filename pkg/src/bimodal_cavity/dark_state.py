"""Zero-energy states with no excited-level amplitude ("dark states").

The numeric route solves ``H[excited, e_free] @ x = 0``: e-free kets are never
coupled to each other and carry no detuning, so any such ``x`` is an exact zero
eigenvector for every detuning. The full zero-eigenvalue eigenspace is larger
than this for Delta = 0 and n >= 2 (extra zero modes living partly on |e>), and is
available separately from :func:`zero_energy_states`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import StateVector
from .errors import DegenerateDarkSpaceError, UndefinedStateError
from .fock_basis import AtomLevel, BasisState, Sector
from .model import ModelConfig, hamiltonian_at

PHASE_TIE_RTOL = 1e-8
G, F = AtomLevel.G, AtomLevel.F


def fix_phase(amplitudes: np.ndarray) -> np.ndarray:
    """Rotate the global phase so the largest component is real and positive.

    Ties (within a relative 1e-8) go to the lowest index, so states with
    several equal-magnitude components get a reproducible sign.
    """
    mags = np.abs(amplitudes)
    top = mags.max()
    if top == 0:
        return amplitudes
    i = int(np.argmax(mags >= top * (1 - PHASE_TIE_RTOL)))
    return amplitudes * (abs(amplitudes[i]) / amplitudes[i])


@dataclass(frozen=True)
class DarkStateCoefficients:
    """Symmetric-coupling two-atom amplitudes; ``P = sqrt(alpha^2 + beta^2 + 2 gamma^2)``."""

    alpha: float
    beta: float
    gamma: float

    @property
    def P(self) -> float:
        return math.sqrt(self.alpha**2 + self.beta**2 + 2 * self.gamma**2)


def symmetric_coefficients(g1: float, g2: float, n: int, mu: int) -> DarkStateCoefficients:
    return DarkStateCoefficients(
        alpha=g2**2 * math.sqrt((mu + 1) * (mu + 2)),
        beta=g1**2 * math.sqrt(n * (n - 1)),
        gamma=-g1 * g2 * math.sqrt(n * (mu + 2)),
    )


def dark_state_closed_form_2atom(
    g1A: float, g1B: float, g2A: float, g2B: float, n: int, mu: int, sector: Sector
) -> StateVector:
    """Two-atom dark state from the analytic amplitudes, embedded in ``sector``.

    ``sector`` must be built from ``|g,g; n, mu>``. For n = 1 the |f,f> ket does
    not exist and its coefficient vanishes anyway.
    """
    if n < 1:
        raise ValueError("closed form needs n >= 1")
    if sector.n_atoms != 2 or BasisState((G, G), n, mu) not in sector:
        raise ValueError("sector was not built from |g,g; n, mu>")
    terms = {
        BasisState((G, G), n, mu): g2A * g2B * math.sqrt((mu + 1) * (mu + 2)),
        BasisState((G, F), n - 1, mu + 1): -g1B * g2A * math.sqrt(n * (mu + 2)),
        BasisState((F, G), n - 1, mu + 1): -g1A * g2B * math.sqrt(n * (mu + 2)),
    }
    if n >= 2:
        terms[BasisState((F, F), n - 2, mu + 2)] = g1A * g1B * math.sqrt(n * (n - 1))
    amps = np.zeros(len(sector), dtype=complex)
    for ket, c in terms.items():
        amps[sector.position(ket)] = c
    norm = np.linalg.norm(amps)
    if norm == 0:
        raise UndefinedStateError("all dark-state coefficients vanish")
    return StateVector(amps / norm, sector)


def default_tol(H: np.ndarray) -> float:
    return 1e-10 * float(np.linalg.norm(H, 2))


def zero_energy_states(config: ModelConfig, t: float, tol: float | None = None) -> list[StateVector]:
    """Orthonormal eigenvectors of H(t) with ``|eigenvalue| <= tol``."""
    H = hamiltonian_at(config, t)
    tol = default_tol(H) if tol is None else tol
    w, v = np.linalg.eigh(H)
    return [StateVector(fix_phase(v[:, i]), config.sector, t)
            for i in np.flatnonzero(np.abs(w) <= tol)]


def dark_states_numeric(config: ModelConfig, t: float, tol: float | None = None) -> list[StateVector]:
    """Orthonormal basis of zero-energy states with no amplitude on |e> kets."""
    H = hamiltonian_at(config, t)
    tol = default_tol(H) if tol is None else tol
    if tol < 0:
        raise ValueError("tol must be non-negative")
    excited = config.sector.excited_mask()
    free = np.flatnonzero(~excited)
    block = H[np.ix_(np.flatnonzero(excited), free)]
    if block.shape[0] == 0:
        null = np.eye(len(free), dtype=complex)
    else:
        _, s, vh = np.linalg.svd(block)
        sv = np.zeros(len(free))
        sv[: len(s)] = s
        null = vh.conj().T[:, sv <= tol]
    out = []
    for col in null.T:
        amps = np.zeros(len(config.sector), dtype=complex)
        amps[free] = col
        out.append(StateVector(fix_phase(amps), config.sector, t))
    return out


def freeze_state(config: ModelConfig, t_freeze: float) -> StateVector:
    """Dark state at the instant the couplings are switched off.

    With the couplings at zero the interaction-picture Hamiltonian vanishes
    (apart from the detuning, which does not touch e-free kets), so the state
    stays put and every later measurement acts on it.

    The global phase makes the amplitude on the all-ground ket real and
    positive whenever it is resolvable (above 1e-8 of the largest component),
    which reproduces the sign convention of the analytic two-atom form. Past
    that, the largest-component convention of :func:`fix_phase` applies.
    """
    dark = dark_states_numeric(config, t_freeze)
    if len(dark) != 1:
        raise DegenerateDarkSpaceError(
            f"dark space at t={t_freeze} has dimension {len(dark)}, expected 1"
        )
    psi = dark[0]
    amps = psi.amplitudes
    i = ground_index(config.sector)
    if i is not None and abs(amps[i]) >= 1e-8 * np.abs(amps).max():
        amps = amps * (abs(amps[i]) / amps[i])
    return StateVector(amps, config.sector, t_freeze)


def ground_index(sector: Sector) -> int | None:
    """Position of the all-ground ket; the charges fix its photon numbers, so it is unique."""
    for i, s in enumerate(sector.states):
        if all(a == G for a in s.atoms):
            return i
    return None


def dark_gap(config: ModelConfig, t: float, dark: StateVector | None = None) -> float:
    """Smallest |eigenvalue| of H(t) on the complement of the dark state."""
    H = hamiltonian_at(config, t)
    if dark is None:
        dark = freeze_state(config, t)
    d = dark.amplitudes[:, None]
    q, _ = np.linalg.qr(np.hstack([d, np.eye(len(d))]))
    comp = q[:, 1:]
    w = np.linalg.eigvalsh(comp.conj().T @ H @ comp)
    return float(np.min(np.abs(w))) if len(w) else math.inf
