"""Fixed-step RK4 propagation of i dpsi/dt = H(t) psi on a sector."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import IntegrationError
from .fock_basis import BasisState, Sector
from .model import ModelConfig, hamiltonian_parts

log = logging.getLogger(__name__)

DEFAULT_STEPS = 8000
RENORM_THRESHOLD = 1e-9
FAIL_THRESHOLD = 1e-6


@dataclass(frozen=True)
class StateVector:
    """Amplitudes aligned with ``sector.states``."""

    amplitudes: np.ndarray
    sector: Sector
    t: float | None = None

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (len(self.sector),):
            raise ValueError(
                f"state has {amps.shape} amplitudes for a sector of {len(self.sector)}"
            )
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def basis(cls, sector: Sector, ket: BasisState, t: float | None = None) -> "StateVector":
        amps = np.zeros(len(sector), dtype=complex)
        amps[sector.position(ket)] = 1.0
        return cls(amps, sector, t)

    @classmethod
    def from_mapping(cls, sector: Sector, mapping: dict, t: float | None = None) -> "StateVector":
        """Build from ``{BasisState: amplitude}``, normalizing the result."""
        amps = np.zeros(len(sector), dtype=complex)
        for ket, c in mapping.items():
            amps[sector.position(ket)] += c
        return cls(amps / np.linalg.norm(amps), sector, t)

    @property
    def subsystems(self) -> tuple[str, ...]:
        return self.sector.subsystems

    @property
    def labels(self) -> tuple[tuple, ...]:
        return self.sector.labels

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def amplitude(self, ket: BasisState) -> complex:
        return complex(self.amplitudes[self.sector.position(ket)])


@dataclass(frozen=True)
class TimeGrid:
    t_start: float
    t_end: float
    steps: int = DEFAULT_STEPS

    def __post_init__(self):
        if not self.t_start < self.t_end:
            raise ValueError("t_start must precede t_end")
        if self.steps < 1:
            raise ValueError("steps must be >= 1")

    @classmethod
    def default(cls, T: float, tau: float = 1.0, steps: int = DEFAULT_STEPS) -> "TimeGrid":
        """Window [-5 tau, T + 5 tau]; both Gaussians are below 2e-11 of peak at the edges."""
        return cls(-5.0 * tau, T + 5.0 * tau, steps)

    @property
    def dt(self) -> float:
        return (self.t_end - self.t_start) / self.steps


@dataclass
class Trajectory:
    times: np.ndarray
    states: list[StateVector]
    norm_drift: float
    renormalized: bool
    norms: np.ndarray

    def __iter__(self):
        return iter(zip(self.times, self.states))

    def __len__(self) -> int:
        return len(self.states)

    @property
    def final(self) -> StateVector:
        return self.states[-1]


def propagate(
    config: ModelConfig,
    psi0: StateVector,
    grid: TimeGrid,
    record_every: int = 1,
) -> Trajectory:
    """Integrate the Schrodinger equation over ``grid`` with classical RK4.

    States are recorded at every ``record_every``-th step; the final step is
    always recorded. ``norm_drift`` is the largest ``| ||psi|| - 1 |`` seen at any
    step. Drift above 1e-9 renormalizes the recorded copies (with a warning);
    drift above 1e-6 raises :class:`IntegrationError`.
    """
    if psi0.sector is not config.sector and psi0.sector != config.sector:
        raise ValueError("initial state and model use different sectors")
    if abs(psi0.norm() - 1.0) > RENORM_THRESHOLD:
        raise ValueError("initial state is not normalized")
    if record_every < 1:
        raise ValueError("record_every must be >= 1")

    parts = hamiltonian_parts(config)
    d = len(config.sector)
    # stacked so one matvec gives the three partial products
    stacked = np.vstack([parts.detuning, parts.pump, parts.stokes])

    n = grid.steps
    dt = grid.dt
    half_times = grid.t_start + 0.5 * dt * np.arange(2 * n + 1)
    g1, g2 = config.schedule.envelopes(half_times)
    weights = np.column_stack([np.ones_like(g1), g1, g2]).astype(complex) * -1j

    def rhs(j: int, psi: np.ndarray) -> np.ndarray:
        return weights[j] @ (stacked @ psi).reshape(3, d)

    psi = psi0.amplitudes.copy()
    times = [grid.t_start]
    recorded = [psi.copy()]
    drift = 0.0
    for step in range(n):
        j = 2 * step
        k1 = rhs(j, psi)
        k2 = rhs(j + 1, psi + 0.5 * dt * k1)
        k3 = rhs(j + 1, psi + 0.5 * dt * k2)
        k4 = rhs(j + 2, psi + dt * k3)
        psi = psi + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        drift = max(drift, abs(np.linalg.norm(psi) - 1.0))
        if (step + 1) % record_every == 0 or step + 1 == n:
            times.append(grid.t_start + (step + 1) * dt)
            recorded.append(psi.copy())

    if drift > FAIL_THRESHOLD:
        raise IntegrationError(
            f"norm drift {drift:.3e} exceeds {FAIL_THRESHOLD:g}; increase the step count"
        )
    renormalized = drift > RENORM_THRESHOLD
    norms = np.array([np.linalg.norm(v) for v in recorded])
    if renormalized:
        log.warning("norm drift %.3e above %.0e; recorded states renormalized", drift,
                    RENORM_THRESHOLD)
        recorded = [v / n for v, n in zip(recorded, norms)]
    states = [StateVector(v, config.sector, t) for t, v in zip(times, recorded)]
    return Trajectory(np.array(times), states, drift, renormalized, norms)


def populations(psi: StateVector) -> list[tuple[BasisState, float]]:
    probs = np.abs(psi.amplitudes) ** 2
    return list(zip(psi.sector.states, probs.tolist()))


def charge_expectations(psi: StateVector) -> tuple[float, float]:
    """Normalized expectation values of K_a and K_b."""
    ka, kb = psi.sector.charge_operators()
    probs = np.abs(psi.amplitudes) ** 2
    total = probs.sum()
    return float(probs @ ka / total), float(probs @ kb / total)
