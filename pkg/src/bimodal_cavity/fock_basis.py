"""Basis states of N Lambda atoms in a two-mode cavity and the conserved sectors.

Atom k couples |g_k> <-> |e_k> through mode a and |f_k> <-> |e_k> through mode b.
Two charges are conserved by every coupling term::

    K_a = n_a + N_e + N_f
    K_b = n_b - N_f

so the dynamics starting from one basis ket never leaves a finite sector.
"""

from __future__ import annotations

import enum
import itertools
import string
from collections import deque
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .errors import CapacityError

DEFAULT_CAPACITY = 100_000


class AtomLevel(enum.IntEnum):
    G = 0
    E = 1
    F = 2

    @property
    def label(self) -> str:
        return self.name.lower()


def atom_name(k: int) -> str:
    """Display name of atom ``k``: A, B, C, ... then A1, B1, ... past Z."""
    letters = string.ascii_uppercase
    q, r = divmod(k, len(letters))
    return letters[r] if q == 0 else f"{letters[r]}{q}"


@dataclass(frozen=True, order=True)
class BasisState:
    atoms: tuple[AtomLevel, ...]
    n_a: int
    n_b: int

    def __post_init__(self):
        if self.n_a < 0 or self.n_b < 0:
            raise ValueError(f"negative photon number in {self!r}")
        object.__setattr__(self, "atoms", tuple(AtomLevel(a) for a in self.atoms))

    @classmethod
    def from_string(cls, text: str) -> "BasisState":
        """Parse a compact ket such as ``"gf;0,1"``."""
        levels, photons = text.split(";")
        n_a, n_b = (int(x) for x in photons.split(","))
        return cls(tuple(AtomLevel[c.upper()] for c in levels.strip()), n_a, n_b)

    @property
    def n_atoms(self) -> int:
        return len(self.atoms)

    def count(self, level: AtomLevel) -> int:
        return sum(1 for a in self.atoms if a == level)

    def with_atom(self, k: int, level: AtomLevel, n_a: int, n_b: int) -> "BasisState":
        atoms = self.atoms[:k] + (level,) + self.atoms[k + 1:]
        return BasisState(atoms, n_a, n_b)

    @property
    def label(self) -> str:
        """CSV-safe label, e.g. ``gA.fB.na0.nb1``."""
        parts = [f"{a.label}{atom_name(k)}" for k, a in enumerate(self.atoms)]
        return ".".join(parts + [f"na{self.n_a}", f"nb{self.n_b}"])

    def key(self) -> tuple:
        """Flat label tuple aligned with :func:`subsystem_names`."""
        return (*self.atoms, self.n_a, self.n_b)

    def __str__(self) -> str:
        levels = "".join(a.label for a in self.atoms)
        return f"|{levels};{self.n_a},{self.n_b}>"


def subsystem_names(n_atoms: int) -> tuple[str, ...]:
    return tuple(atom_name(k) for k in range(n_atoms)) + ("a", "b")


def conserved_charges(s: BasisState) -> tuple[int, int]:
    n_e = s.count(AtomLevel.E)
    n_f = s.count(AtomLevel.F)
    return s.n_a + n_e + n_f, s.n_b - n_f


def coupling_moves(s: BasisState) -> Iterator[tuple[int, int, BasisState, float]]:
    """Yield ``(atom, mode, target, sqrt_factor)`` for every coupling term that
    moves population out of ``s``.

    ``mode`` is 1 for the a-mode (g <-> e) leg and 2 for the b-mode (e <-> f) leg.
    The bosonic factor is the one of the ladder operator acting on ``s``.
    """
    G, E, F = AtomLevel.G, AtomLevel.E, AtomLevel.F
    for k, level in enumerate(s.atoms):
        if level == G and s.n_a > 0:
            yield k, 1, s.with_atom(k, E, s.n_a - 1, s.n_b), float(np.sqrt(s.n_a))
        elif level == E:
            yield k, 1, s.with_atom(k, G, s.n_a + 1, s.n_b), float(np.sqrt(s.n_a + 1))
            yield k, 2, s.with_atom(k, F, s.n_a, s.n_b + 1), float(np.sqrt(s.n_b + 1))
        elif level == F and s.n_b > 0:
            yield k, 2, s.with_atom(k, E, s.n_a, s.n_b - 1), float(np.sqrt(s.n_b))


@dataclass(frozen=True)
class Sector:
    """Canonically ordered, closed set of basis states sharing both charges."""

    states: tuple[BasisState, ...]
    charge_a: int
    charge_b: int
    index: dict = field(compare=False, repr=False, default=None)

    def __post_init__(self):
        if self.index is None:
            object.__setattr__(self, "index", {s: i for i, s in enumerate(self.states)})

    def __len__(self) -> int:
        return len(self.states)

    def __iter__(self):
        return iter(self.states)

    def __getitem__(self, i: int) -> BasisState:
        return self.states[i]

    def __contains__(self, s) -> bool:
        return s in self.index

    @property
    def n_atoms(self) -> int:
        return self.states[0].n_atoms

    @property
    def subsystems(self) -> tuple[str, ...]:
        return subsystem_names(self.n_atoms)

    @property
    def labels(self) -> tuple[tuple, ...]:
        return tuple(s.key() for s in self.states)

    def position(self, s: BasisState) -> int:
        return self.index[s]

    def excited_mask(self) -> np.ndarray:
        """Boolean mask of states with at least one atom in level E."""
        return np.array([AtomLevel.E in s.atoms for s in self.states])

    def charge_operators(self) -> tuple[np.ndarray, np.ndarray]:
        """Diagonals of the K_a and K_b operators on this sector."""
        ka, kb = zip(*(conserved_charges(s) for s in self.states))
        return np.array(ka, dtype=float), np.array(kb, dtype=float)


def build_sector(initial: BasisState, capacity: int = DEFAULT_CAPACITY) -> Sector:
    """Breadth-first closure of ``initial`` under all coupling terms."""
    seen = {initial}
    queue = deque([initial])
    while queue:
        s = queue.popleft()
        for _, _, target, _ in coupling_moves(s):
            if target not in seen:
                seen.add(target)
                if len(seen) > capacity:
                    raise CapacityError(
                        f"sector from {initial} exceeds capacity {capacity}"
                    )
                queue.append(target)
    ka, kb = conserved_charges(initial)
    return Sector(tuple(sorted(seen)), ka, kb)


def product_space(n_atoms: int, max_a: int, max_b: int) -> Sector:
    """All kets with photon numbers up to the given caps, mixing charges.

    Not a sector in the dynamical sense; used to check that the Hamiltonian
    builder never couples different charges.
    """
    states = [
        BasisState(atoms, na, nb)
        for atoms in itertools.product(AtomLevel, repeat=n_atoms)
        for na in range(max_a + 1)
        for nb in range(max_b + 1)
    ]
    return Sector(tuple(sorted(states)), charge_a=-1, charge_b=-1)


def ground_state(n_atoms: int, n: int, mu: int) -> BasisState:
    return BasisState((AtomLevel.G,) * n_atoms, n, mu)
