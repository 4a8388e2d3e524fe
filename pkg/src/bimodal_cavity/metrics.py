"""Fidelities against named target states, reduced density matrices, concurrence."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .dark_state import symmetric_coefficients
from .fock_basis import AtomLevel, atom_name
from .measurement import ReducedState, as_reduced

G, E, F = AtomLevel.G, AtomLevel.E, AtomLevel.F


class TargetKind(enum.Enum):
    EPR2 = "epr2"
    W = "w"
    GHZ_PRIME = "ghz_prime"
    GHZ_DOUBLE_PRIME = "ghz_double_prime"
    QUTRIT_PLUS = "qutrit_plus"
    QUTRIT_MINUS = "qutrit_minus"


@dataclass(frozen=True)
class TargetState:
    """A named ideal state.

    Atom-only targets (EPR2, W) are expanded with the field ket the protocol
    leaves behind, |0, mu+1>, unless ``include_field`` is False. GHZ-equivalent
    targets take their two amplitudes explicitly (``coefficients``) so the
    same type covers any atom number; :meth:`ghz_two_atom` fills them from the
    couplings for N = 2.
    """

    kind: TargetKind
    n_atoms: int = 2
    n: int = 1
    mu: int = 0
    g1: float = 1.0
    g2: float = 1.0
    coefficients: tuple[float, float] | None = None
    include_field: bool = True

    @classmethod
    def epr(cls, mu: int = 0, include_field: bool = True) -> "TargetState":
        return cls(TargetKind.EPR2, n_atoms=2, mu=mu, include_field=include_field)

    @classmethod
    def w(cls, n_atoms: int, mu: int = 0, include_field: bool = True) -> "TargetState":
        return cls(TargetKind.W, n_atoms=n_atoms, mu=mu, include_field=include_field)

    @classmethod
    def qutrit(cls, sign: int, n: int, mu: int, g1: float, g2: float) -> "TargetState":
        kind = TargetKind.QUTRIT_PLUS if sign > 0 else TargetKind.QUTRIT_MINUS
        return cls(kind, n=n, mu=mu, g1=g1, g2=g2)

    @classmethod
    def ghz_two_atom(cls, level: AtomLevel, n: int, mu: int, g1: float, g2: float) -> "TargetState":
        """Remaining atom and field after detecting atom B in ``level``."""
        c = symmetric_coefficients(g1, g2, n, mu)
        if AtomLevel(level) == G:
            return cls(TargetKind.GHZ_PRIME, 2, n, mu, coefficients=(c.alpha, c.gamma))
        return cls(TargetKind.GHZ_DOUBLE_PRIME, 2, n, mu, coefficients=(c.beta, c.gamma))

    def expand(self) -> ReducedState:
        terms = self._terms()
        amps = np.array(list(terms.values()), dtype=complex)
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise ValueError(f"target {self.kind.value} vanishes for these parameters")
        return ReducedState(self._subsystems(), tuple(terms), amps / norm)

    def _subsystems(self) -> tuple[str, ...]:
        k = self.kind
        if k in (TargetKind.QUTRIT_PLUS, TargetKind.QUTRIT_MINUS):
            return ("a", "b")
        n_atoms = self.n_atoms if k in (TargetKind.EPR2, TargetKind.W) else self.n_atoms - 1
        atoms = tuple(atom_name(i) for i in range(n_atoms))
        return atoms + ("a", "b") if self.include_field else atoms

    def _terms(self) -> dict:
        k, n, mu, N = self.kind, self.n, self.mu, self.n_atoms
        field_after = (0, mu + 1) if self.include_field else ()
        if k in (TargetKind.EPR2, TargetKind.W):
            terms = {}
            for j in range(N):
                atoms = tuple(F if i == j else G for i in range(N))
                terms[atoms + field_after] = 1.0
            return terms
        if k in (TargetKind.QUTRIT_PLUS, TargetKind.QUTRIT_MINUS):
            c = symmetric_coefficients(self.g1, self.g2, n, mu)
            sign = 1 if k == TargetKind.QUTRIT_PLUS else -1
            terms = {(n, mu): c.alpha, (n - 1, mu + 1): sign * 2 * c.gamma}
            if n >= 2:
                terms[(n - 2, mu + 2)] = c.beta
            return terms
        first, second = self.coefficients
        g_all = (G,) * (N - 1)
        f_all = (F,) * (N - 1)
        if k == TargetKind.GHZ_PRIME:
            # measured atom in g: all-g keeps (n, mu); all-f moved N-1 photon pairs
            return {g_all + (n, mu): first, f_all + (n - N + 1, mu + N - 1): second}
        # measured atom in f: all-f moved N pairs; all-g moved just the measured one
        return {f_all + (n - N, mu + N): first, g_all + (n - 1, mu + 1): second}


def _as_target(target) -> ReducedState:
    return target.expand() if isinstance(target, TargetState) else as_reduced(target)


def overlap(psi, target) -> complex:
    """<target|psi>, matching basis kets by label."""
    a = as_reduced(psi)
    b = _as_target(target)
    if a.subsystems != b.subsystems:
        raise ValueError(f"subsystem mismatch: {a.subsystems} vs {b.subsystems}")
    amps = a.as_dict()
    missing = [lab for lab, c in zip(b.labels, b.amplitudes) if c != 0 and lab not in amps]
    if missing:
        raise ValueError(f"target kets {missing[:3]} are outside the state's basis")
    return complex(sum(np.conj(c) * amps.get(lab, 0.0) for lab, c in zip(b.labels, b.amplitudes)))


def fidelity(psi, target) -> float:
    return min(1.0, abs(overlap(psi, target)) ** 2)


# -- density matrices -------------------------------------------------------

@dataclass(frozen=True)
class DensityMatrix:
    subsystems: tuple[str, ...]
    labels: tuple[tuple, ...]
    matrix: np.ndarray

    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def purity(self) -> float:
        return float(np.trace(self.matrix @ self.matrix).real)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def check_physical(self, atol: float = 1e-12) -> None:
        m = self.matrix
        if not np.allclose(m, m.conj().T, atol=atol):
            raise ValueError("density matrix is not Hermitian")
        if abs(self.trace() - 1.0) > atol:
            raise ValueError(f"density matrix trace {self.trace()!r} != 1")
        if self.eigenvalues().min() < -atol:
            raise ValueError("density matrix has negative eigenvalues")


def density(psi) -> DensityMatrix:
    s = as_reduced(psi)
    v = s.amplitudes
    return DensityMatrix(s.subsystems, s.labels, np.outer(v, v.conj()))


def partial_trace(state, keep) -> DensityMatrix:
    """Reduced density matrix over the subsystems named in ``keep``.

    ``state`` is a pure labeled state or a :class:`DensityMatrix`. Kept kets are
    listed in order of first appearance in the parent basis; kept subsystems
    follow the order of ``keep``.
    """
    if isinstance(state, DensityMatrix):
        names, labels, rho = state.subsystems, state.labels, state.matrix
    else:
        s = as_reduced(state)
        names, labels, rho = s.subsystems, s.labels, None
    keep = tuple(keep)
    bad = [k for k in keep if k not in names]
    if bad or len(set(keep)) != len(keep):
        raise ValueError(f"cannot keep {keep} of subsystems {names}")
    kpos = [names.index(k) for k in keep]
    rpos = [i for i in range(len(names)) if i not in kpos]

    kept = {}
    rest = {}
    ki = np.empty(len(labels), dtype=int)
    ri = np.empty(len(labels), dtype=int)
    for i, lab in enumerate(labels):
        ki[i] = kept.setdefault(tuple(lab[p] for p in kpos), len(kept))
        ri[i] = rest.setdefault(tuple(lab[p] for p in rpos), len(rest))

    if rho is None:
        m = np.zeros((len(kept), len(rest)), dtype=complex)
        m[ki, ri] = as_reduced(state).amplitudes
        out = m @ m.conj().T
    else:
        out = np.zeros((len(kept), len(kept)), dtype=complex)
        same_rest = ri[:, None] == ri[None, :]
        rows, cols = np.nonzero(same_rest)
        np.add.at(out, (ki[rows], ki[cols]), rho[rows, cols])
    return DensityMatrix(keep, tuple(kept), out)


def qubit_block(rho: DensityMatrix, levels=(G, F)) -> tuple[np.ndarray, float]:
    """Restrict a two-atom reduced state to the {g, f} x {g, f} qubit block.

    Returns the block renormalized to unit trace, ordered (gg, gf, fg, ff),
    together with the population that was outside it (|e> leakage).
    """
    if len(rho.subsystems) != 2:
        raise ValueError("qubit_block needs a two-subsystem density matrix")
    index = {lab: i for i, lab in enumerate(rho.labels)}
    order = [(x, y) for x in levels for y in levels]
    block = np.zeros((4, 4), dtype=complex)
    for i, li in enumerate(order):
        for j, lj in enumerate(order):
            if li in index and lj in index:
                block[i, j] = rho.matrix[index[li], index[lj]]
    inside = float(np.trace(block).real)
    leakage = rho.trace() - inside
    if inside <= 0:
        raise ValueError("no population in the qubit block")
    return block / inside, leakage


_SYSY = np.kron(np.array([[0, -1j], [1j, 0]]), np.array([[0, -1j], [1j, 0]]))


def concurrence(rho, atol: float = 1e-12) -> float:
    """Wootters concurrence of a two-qubit density matrix."""
    m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    if m.shape != (4, 4):
        raise ValueError("concurrence needs a 4x4 density matrix")
    if np.linalg.eigvalsh((m + m.conj().T) / 2).min() < -atol:
        raise ValueError("density matrix has negative eigenvalues")
    flipped = _SYSY @ m.conj() @ _SYSY
    ev = np.linalg.eigvals(m @ flipped)
    lam = np.sort(np.sqrt(np.clip(ev.real, 0.0, None)))[::-1]
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def pair_concurrence(psi, atoms: tuple[int, int]) -> tuple[float, float]:
    """Concurrence of two atoms after tracing everything else; also returns |e> leakage."""
    rho = partial_trace(psi, [atom_name(atoms[0]), atom_name(atoms[1])])
    block, leakage = qubit_block(rho)
    return concurrence(block), leakage


def field_purity(psi) -> float:
    """Purity of the two-mode field reduced state; 1 when atoms and field factorize."""
    return partial_trace(psi, ["a", "b"]).purity()
