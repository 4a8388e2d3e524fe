"""Projective measurements on frozen dark states.

States are handled as labeled vectors: a tuple of subsystem names (``"A"``,
``"B"``, ..., ``"a"``, ``"b"``) and one label tuple per amplitude. Rank-one
projectors remove the subsystems they measure; the post-measurement state is
re-indexed on the surviving subsystems, in order of first appearance in the
parent basis. For a two-atom sector this puts the field kets of a qutrit
branch in the order (n, mu), (n-1, mu+1), (n-2, mu+2).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import ImpossibleOutcomeError
from .fock_basis import AtomLevel, atom_name

G, E, F = AtomLevel.G, AtomLevel.E, AtomLevel.F
MIN_PROBABILITY = 1e-14
SQRT_HALF = 1 / math.sqrt(2)


@dataclass(frozen=True)
class ReducedState:
    subsystems: tuple[str, ...]
    labels: tuple[tuple, ...]
    amplitudes: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "amplitudes", np.asarray(self.amplitudes, dtype=complex))
        if len(self.labels) != len(self.amplitudes):
            raise ValueError("labels and amplitudes differ in length")

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def as_dict(self) -> dict:
        return dict(zip(self.labels, self.amplitudes))

    def amplitude(self, label: tuple) -> complex:
        return complex(self.as_dict().get(tuple(label), 0.0))


def as_reduced(psi) -> ReducedState:
    """View any labeled state (sector ``StateVector`` or ``ReducedState``) as a ReducedState."""
    if isinstance(psi, ReducedState):
        return psi
    return ReducedState(tuple(psi.subsystems), tuple(psi.labels), psi.amplitudes)


# -- projectors -------------------------------------------------------------

@dataclass(frozen=True)
class FieldNumber:
    """Both cavity modes found in Fock state ``|n_a, n_b>``."""

    n_a: int
    n_b: int

    def subsystems(self):
        return ("a", "b")

    def range_kets(self):
        return [{(self.n_a, self.n_b): 1.0}]

    removes = True


@dataclass(frozen=True)
class AtomLevelProjector:
    """Atom ``atom`` found in ``level`` (G or F)."""

    atom: int
    level: AtomLevel

    def __post_init__(self):
        if AtomLevel(self.level) == E:
            raise ValueError("excited level is never populated in a dark state")
        object.__setattr__(self, "level", AtomLevel(self.level))

    def subsystems(self):
        return (atom_name(self.atom),)

    def range_kets(self):
        return [{(self.level,): 1.0}]

    removes = True


@dataclass(frozen=True)
class AtomSuperposition:
    """Atom ``atom`` found in (|g> + sign |f>)/sqrt(2), ``sign`` = +1 or -1."""

    atom: int
    sign: int

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")

    def subsystems(self):
        return (atom_name(self.atom),)

    def range_kets(self):
        return [{(G,): SQRT_HALF, (F,): self.sign * SQRT_HALF}]

    removes = True


@dataclass(frozen=True)
class UniformAtoms:
    """Rank-two projector onto span{|g...g>, |f...f>} of the listed atoms.

    Keeps the atoms as subsystems of the post-measurement state.
    """

    atoms: tuple[int, ...]

    def subsystems(self):
        return tuple(atom_name(k) for k in self.atoms)

    def range_kets(self):
        m = len(self.atoms)
        return [{(G,) * m: 1.0}, {(F,) * m: 1.0}]

    removes = False


SingleProjector = Union[FieldNumber, AtomLevelProjector, AtomSuperposition, UniformAtoms]
Projector = Union[SingleProjector, tuple]


@dataclass(frozen=True)
class MeasurementOutcome:
    probability: float
    post_state: ReducedState
    projector: Projector


def _factors(proj: Projector) -> tuple:
    return tuple(proj) if isinstance(proj, tuple) else (proj,)


def _apply(state: ReducedState, proj: SingleProjector) -> ReducedState:
    """Unnormalized ``P psi``, re-indexed when ``proj`` removes its subsystems."""
    names = proj.subsystems()
    try:
        pos = [state.subsystems.index(s) for s in names]
    except ValueError:
        raise ValueError(f"{proj} acts on {names}, state has {state.subsystems}") from None
    rest_pos = [i for i in range(len(state.subsystems)) if i not in pos]

    def split(label):
        return tuple(label[i] for i in pos), tuple(label[i] for i in rest_pos)

    # rest label -> {measured label: amplitude}
    blocks: dict[tuple, dict] = {}
    for label, amp in zip(state.labels, state.amplitudes):
        local, rest = split(label)
        blocks.setdefault(rest, {})[local] = amp

    def overlap(ket, block):
        return sum(np.conj(c) * block.get(loc, 0.0) for loc, c in ket.items())

    kets = proj.range_kets()
    out: dict[tuple, complex] = {}
    if proj.removes:
        (ket,) = kets
        for rest, block in blocks.items():
            if block.keys() & ket.keys():
                out[rest] = overlap(ket, block)
        subsystems = tuple(state.subsystems[i] for i in rest_pos)
    else:
        for label in state.labels:
            local, rest = split(label)
            hits = [k for k in kets if local in k]
            if hits:
                out[label] = sum(k[local] * overlap(k, blocks[rest]) for k in hits)
        subsystems = state.subsystems
    return ReducedState(subsystems, tuple(out), np.array(list(out.values()), dtype=complex))


def project(psi, proj: Projector) -> MeasurementOutcome:
    """Projection postulate: probability ``||P psi||^2`` and normalized ``P psi``."""
    state = as_reduced(psi)
    for factor in _factors(proj):
        state = _apply(state, factor)
    prob = float(np.vdot(state.amplitudes, state.amplitudes).real)
    if prob < MIN_PROBABILITY:
        raise ImpossibleOutcomeError(f"outcome {proj} has probability {prob:.3e}")
    post = ReducedState(state.subsystems, state.labels, state.amplitudes / math.sqrt(prob))
    return MeasurementOutcome(prob, post, proj)


def project_qutrit(psi, sign_a: int, sign_b: int) -> MeasurementOutcome:
    """Measure atoms A and B in the |g> +/- |f> basis; the field is left as two qutrits."""
    return project(psi, (AtomSuperposition(0, sign_a), AtomSuperposition(1, sign_b)))


def project_ghz(psi, atom: int, level: AtomLevel) -> tuple[MeasurementOutcome, MeasurementOutcome]:
    """Detect ``atom`` in ``level``, then keep only the uniform (all-g / all-f)
    configurations of the remaining atoms.

    Returns both stages; the second outcome's probability is the joint one. For
    two atoms the second stage is trivial on a dark state.
    """
    first = project(psi, AtomLevelProjector(atom, level))
    others = tuple(k for k in range(_n_atoms(psi)) if k != atom)
    second = project(psi, (AtomLevelProjector(atom, level), UniformAtoms(others)))
    return first, second


def _n_atoms(psi) -> int:
    return sum(1 for s in as_reduced(psi).subsystems if s not in ("a", "b"))


# -- complete measurements --------------------------------------------------

def _joint_kets(proj: Projector) -> tuple[tuple[str, ...], list[dict]]:
    names: tuple[str, ...] = ()
    kets = [{(): 1.0}]
    for factor in _factors(proj):
        names += factor.subsystems()
        kets = [
            {a + b: ca * cb for a, ca in k1.items() for b, cb in k2.items()}
            for k1 in kets
            for k2 in factor.range_kets()
        ]
    return names, kets


def _check_orthogonal(basis: Sequence[Projector]) -> None:
    spans = [_joint_kets(p) for p in basis]
    names = {n for n, _ in spans}
    if len(names) > 1:
        raise ValueError(f"projectors act on different subsystems: {sorted(names)}")
    for (i, (_, ki)), (j, (_, kj)) in itertools.combinations(enumerate(spans), 2):
        for u in ki:
            for v in kj:
                overlap = sum(np.conj(u[k]) * v[k] for k in u.keys() & v.keys())
                if abs(overlap) > 1e-12:
                    raise ValueError(f"projectors {basis[i]} and {basis[j]} are not orthogonal")


def outcome_distribution(psi, basis: Sequence[Projector], atol: float = 1e-12) -> list[tuple[Projector, float]]:
    """Probabilities of every outcome of a complete orthogonal measurement.

    Completeness is judged on the support of ``psi``: the probabilities must
    add up to one within ``atol``. Impossible outcomes report probability 0.
    """
    _check_orthogonal(basis)
    out = []
    for proj in basis:
        try:
            p = project(psi, proj).probability
        except ImpossibleOutcomeError:
            p = 0.0
        out.append((proj, p))
    total = sum(p for _, p in out)
    if abs(total - 1.0) > atol:
        raise ValueError(f"measurement basis is incomplete on this state (sum p = {total!r})")
    return out


def field_basis(psi) -> list[FieldNumber]:
    """Every field ket carried by ``psi``'s basis, in first-appearance order."""
    state = as_reduced(psi)
    ia, ib = state.subsystems.index("a"), state.subsystems.index("b")
    seen = dict.fromkeys((lab[ia], lab[ib]) for lab in state.labels)
    return [FieldNumber(na, nb) for na, nb in seen]


def qutrit_basis() -> list[tuple]:
    return [
        (AtomSuperposition(0, sa), AtomSuperposition(1, sb))
        for sa in (1, -1)
        for sb in (1, -1)
    ]
