"""Named protocols, run reports, sweeps and their CSV artifacts.

Everything here is deterministic: identical configurations give byte-identical
CSV files.
"""

from __future__ import annotations

import configparser
import csv
import dataclasses
import io
import logging
import math
import re
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .dark_state import dark_gap, dark_states_numeric, freeze_state
from .dynamics import StateVector, TimeGrid, Trajectory, charge_expectations, propagate
from .errors import ConfigError, ImpossibleOutcomeError, IntegrationError
from .fock_basis import AtomLevel, atom_name, build_sector, ground_state
from .measurement import (
    AtomLevelProjector,
    MeasurementOutcome,
    ReducedState,
    FieldNumber,
    UniformAtoms,
    project,
    project_qutrit,
)
from .metrics import TargetState, fidelity, field_purity, pair_concurrence
from .model import ModelConfig, PulseSchedule, hamiltonian_parts

log = logging.getLogger(__name__)

CHARGE_TOL = 1e-9
FLOAT_FMT = ".12g"
DETERMINISTIC = ("epr2", "w", "custom")
PROJECTION = ("ghz_project", "qutrit_project")

# accepted spellings -> field names
ALIASES = {
    "n": "n_photons",
    "n_photons": "n_photons",
    "N": "atoms",
    "atoms": "atoms",
    "T_over_tau": "t_sep",
    "t_sep": "t_sep",
    "t_freeze_over_tau": "t_freeze",
    "t_freeze": "t_freeze",
}


@dataclass(frozen=True)
class ScenarioConfig:
    """Dimensionless run parameters (couplings and detuning in units of 1/tau,
    times in units of tau)."""

    scenario: str = "epr2"
    atoms: int | None = None
    n_photons: int | None = None
    mu: int = 0
    g10_tau: float = 15.0
    g20_tau: float = 15.0
    delta_tau: float = 0.0
    t_sep: float = 4.0 / 3.0
    steps: int = 8000
    t_freeze: float | None = None
    record_every: int = 10
    measure_atom: int | None = None

    def resolved(self) -> "ScenarioConfig":
        """Fill scenario defaults and validate; raises :class:`ConfigError`."""
        name, atoms, n = self.scenario, self.atoms, self.n_photons
        m = re.fullmatch(r"w\(?(\d+)\)?", name)
        if m:
            name, atoms = "w", int(m.group(1)) if atoms is None else atoms
            if atoms != int(m.group(1)):
                raise ConfigError(f"atoms: scenario {self.scenario} conflicts with atoms={atoms}")
        if name not in DETERMINISTIC + PROJECTION:
            raise ConfigError(f"scenario: unknown scenario {self.scenario!r}")
        if name == "epr2":
            atoms = 2 if atoms is None else atoms
            if atoms != 2:
                raise ConfigError("atoms: epr2 needs exactly 2 atoms")
        if name == "qutrit_project":
            atoms = 2 if atoms is None else atoms
            if atoms != 2:
                raise ConfigError("atoms: qutrit_project needs exactly 2 atoms")
        if atoms is None:
            atoms = 2
        if n is None:
            n = max(2, atoms) if name in PROJECTION else 1
        cfg = dataclasses.replace(self, scenario=name, atoms=atoms, n_photons=n)
        cfg._validate()
        return cfg

    def _validate(self) -> None:
        if self.atoms < 1:
            raise ConfigError("atoms: need at least one atom")
        if self.n_photons < 1:
            raise ConfigError("n_photons: scenarios start with at least one pump photon")
        if self.mu < 0:
            raise ConfigError("mu: photon number must be non-negative")
        if self.scenario in ("epr2", "w") and self.n_photons != 1:
            raise ConfigError(f"n_photons: {self.scenario} starts from a single a-mode photon")
        if self.scenario == "ghz_project" and self.n_photons < self.atoms:
            raise ConfigError("n_photons: ghz_project needs n >= number of atoms")
        for name in ("g10_tau", "g20_tau", "delta_tau", "t_sep"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"{name}: must be finite")
        if self.g10_tau < 0 or self.g20_tau < 0:
            raise ConfigError("g10_tau/g20_tau: amplitudes must be non-negative")
        if self.t_sep <= 0:
            raise ConfigError("t_sep: the pump must follow the Stokes pulse (T > 0)")
        if self.steps < 1:
            raise ConfigError("steps: must be positive")
        if self.record_every < 1:
            raise ConfigError("record_every: must be positive")
        if self.measure_atom is not None and not 0 <= self.measure_atom < self.atoms:
            raise ConfigError("measure_atom: index out of range")
        if self.t_freeze is not None and not math.isfinite(self.t_freeze):
            raise ConfigError("t_freeze: must be finite")

    @property
    def freeze_time(self) -> float:
        """Default freeze is halfway between the pulse centres."""
        return self.t_sep / 2 if self.t_freeze is None else self.t_freeze

    def model(self) -> ModelConfig:
        sector = build_sector(ground_state(self.atoms, self.n_photons, self.mu))
        schedule = PulseSchedule(self.g10_tau, self.g20_tau, 1.0, self.t_sep)
        return ModelConfig(sector, schedule, self.delta_tau)


FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(ScenarioConfig)}
NUMERIC_FIELDS = tuple(n for n in FIELD_TYPES if n not in ("scenario",))
INT_FIELDS = ("atoms", "n_photons", "mu", "steps", "record_every", "measure_atom")


def canonical_field(name: str) -> str:
    key = name.strip().replace("-", "_")
    key = ALIASES.get(key, key)
    if key not in FIELD_TYPES:
        raise ConfigError(f"{name}: unknown configuration field")
    return key


def coerce(name: str, value: Any) -> Any:
    key = canonical_field(name)
    if value is None or key == "scenario":
        return value
    try:
        if key in INT_FIELDS:
            f = float(value)
            if f != int(f):
                raise ValueError
            return int(f)
        return float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{key}: expected a number, got {value!r}") from None


def load_config(path: str | Path, overrides: dict | None = None) -> ScenarioConfig:
    """Read a flat INI file; ``overrides`` (e.g. command-line flags) win."""
    text = Path(path).read_text()
    parser = configparser.ConfigParser()
    try:
        parser.read_string(text if text.lstrip().startswith("[") else "[scenario]\n" + text,
                           source=str(path))
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None
    values = {}
    for section in parser.sections():
        for key, raw in parser.items(section):
            try:
                values[canonical_field(key)] = coerce(key, raw)
            except ConfigError as exc:
                raise ConfigError(f"{path}:{_line_of(text, key)}: {exc}") from None
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return ScenarioConfig(**values)


def _line_of(text: str, key: str) -> int:
    for i, line in enumerate(text.splitlines(), 1):
        if re.match(rf"\s*{re.escape(key)}\s*[=:]", line, re.IGNORECASE):
            return i
    return 0


# -- reports ---------------------------------------------------------------

@dataclass
class Branch:
    name: str
    probability: float
    post_state: ReducedState | None
    target_fidelity: float | None = None


SUMMARY_KEYS = (
    "scenario", "atoms", "n_photons", "mu", "g10_tau", "g20_tau", "delta_tau", "t_sep",
    "steps", "t_freeze", "fidelity", "norm_drift", "charge_drift", "min_gap",
    "field_purity", "pair_concurrence", "e_population",
)


@dataclass
class RunReport:
    config: ScenarioConfig
    final_populations: list[tuple[str, float]] = field(default_factory=list)
    fidelity: float | None = None
    norm_drift: float = 0.0
    charge_drift: float = 0.0
    min_gap: float | None = None
    field_purity: float | None = None
    pair_concurrence: float | None = None
    e_population: float | None = None
    branches: list[Branch] = field(default_factory=list)
    trajectory: Trajectory | None = field(default=None, repr=False)
    target: TargetState | None = field(default=None, repr=False)

    def summary(self) -> dict[str, Any]:
        """Flat, ordered key -> value mapping used by summary and sweep CSVs."""
        c = self.config
        values = [
            c.scenario, c.atoms, c.n_photons, c.mu, c.g10_tau, c.g20_tau, c.delta_tau,
            c.t_sep, c.steps, c.freeze_time if self.branches else None,
            self.fidelity, self.norm_drift, self.charge_drift, self.min_gap,
            self.field_purity, self.pair_concurrence, self.e_population,
        ]
        out: dict[str, Any] = dict(zip(SUMMARY_KEYS, values))
        for label, p in self.final_populations:
            out[f"pop_{label}"] = p
        for b in self.branches:
            out[f"p_{b.name}"] = b.probability
            if b.target_fidelity is not None:
                out[f"fid_{b.name}"] = b.target_fidelity
        return out


def _target_for(cfg: ScenarioConfig) -> TargetState | None:
    if cfg.scenario == "epr2":
        return TargetState.epr(cfg.mu)
    if cfg.scenario == "w":
        return TargetState.w(cfg.atoms, cfg.mu)
    return None


def check_charges(model: ModelConfig, traj: Trajectory) -> float:
    """Verify H commutes with both charges and charge expectations stay constant."""
    ka, kb = model.sector.charge_operators()
    parts = hamiltonian_parts(model)
    for m in (parts.detuning, parts.pump, parts.stokes):
        for k in (ka, kb):
            comm = m * k[None, :] - k[:, None] * m
            if np.abs(comm).max() > CHARGE_TOL:
                raise IntegrationError("Hamiltonian couples different charge sectors")
    exp = np.array([charge_expectations(s) for s in traj.states])
    drift = float(np.abs(exp - exp[0]).max())
    if drift > CHARGE_TOL:
        raise IntegrationError(f"charge expectation drifted by {drift:.3e}")
    return drift


def min_dark_gap(model: ModelConfig, times: np.ndarray, max_points: int = 200) -> float | None:
    """Smallest gap between the dark state and the rest of the spectrum.

    Sampled only where both pulses exceed 1% of their peak; outside that
    window every gap closes trivially because the couplings vanish.
    """
    g1, g2 = model.schedule.envelopes(times)
    s = model.schedule
    mask = (g1 >= 1e-2 * s.g10) & (g2 >= 1e-2 * s.g20)
    sample = times[mask]
    if len(sample) == 0:
        return None
    sample = sample[:: max(1, len(sample) // max_points)]
    gaps = []
    for t in sample:
        dark = dark_states_numeric(model, float(t))
        if len(dark) == 1:
            gaps.append(dark_gap(model, float(t), dark[0]))
    return min(gaps) if gaps else None


def run_deterministic(cfg: ScenarioConfig) -> RunReport:
    model = cfg.model()
    sector = model.sector
    psi0 = StateVector.basis(sector, ground_state(cfg.atoms, cfg.n_photons, cfg.mu))
    grid = TimeGrid.default(cfg.t_sep, steps=cfg.steps)
    traj = propagate(model, psi0, grid, cfg.record_every)
    report = RunReport(cfg, trajectory=traj, norm_drift=traj.norm_drift)
    report.charge_drift = check_charges(model, traj)
    final = traj.final
    probs = np.abs(final.amplitudes) ** 2
    report.final_populations = [(s.label, float(p)) for s, p in zip(sector.states, probs)]
    report.e_population = float(probs[sector.excited_mask()].sum())
    report.field_purity = field_purity(final)
    target = _target_for(cfg)
    report.target = target
    if target is not None:
        report.fidelity = fidelity(final, target)
    else:
        dark = dark_states_numeric(model, grid.t_end)
        report.fidelity = fidelity(final, dark[0]) if len(dark) == 1 else None
    if cfg.atoms >= 2:
        report.pair_concurrence = pair_concurrence(final, (0, 1))[0]
    report.min_gap = min_dark_gap(model, traj.times)
    return report


def _safe_project(psi, proj) -> MeasurementOutcome | None:
    try:
        return project(psi, proj)
    except ImpossibleOutcomeError:
        return None


def _branch(name, outcome, target=None) -> Branch:
    if outcome is None:
        return Branch(name, 0.0, None)
    fid = fidelity(outcome.post_state, target) if target is not None else None
    return Branch(name, outcome.probability, outcome.post_state, fid)


def run_projection(cfg: ScenarioConfig) -> RunReport:
    model = cfg.model()
    t_f = cfg.freeze_time
    psi = freeze_state(model, t_f)
    report = RunReport(cfg)
    g1, g2 = (float(x) for x in model.schedule.envelopes(t_f))
    n, mu, N = cfg.n_photons, cfg.mu, cfg.atoms
    report.field_purity = field_purity(psi)

    if cfg.scenario == "qutrit_project":
        for sa in (1, -1):
            for sb in (1, -1):
                name = f"qutrit{'+' if sa > 0 else '-'}{'+' if sb > 0 else '-'}"
                try:
                    out = project_qutrit(psi, sa, sb)
                except ImpossibleOutcomeError:
                    out = None
                target = TargetState.qutrit(sa, n, mu, g1, g2) if sa == sb else None
                report.branches.append(_branch(name, out, target))
        return report

    # field kets that carry an excited atom are impossible outcomes on a dark state
    dark_fields = dict.fromkeys(
        (s.n_a, s.n_b) for s in model.sector.states if AtomLevel.E not in s.atoms
    )
    for na, nb in dark_fields:
        out = _safe_project(psi, FieldNumber(na, nb))
        report.branches.append(_branch(f"field:{na}_{nb}", out))
    atom = N - 1 if cfg.measure_atom is None else cfg.measure_atom
    name = atom_name(atom)
    for level in (AtomLevel.G, AtomLevel.F):
        target = (TargetState.ghz_two_atom(level, n, mu, g1, g2)
                  if N == 2 and atom == 1 else None)
        out = _safe_project(psi, AtomLevelProjector(atom, level))
        report.branches.append(_branch(f"atom{name}={level.label}", out, target))
    if N >= 3:
        others = tuple(k for k in range(N) if k != atom)
        for level in (AtomLevel.G, AtomLevel.F):
            out = _safe_project(psi, (AtomLevelProjector(atom, level), UniformAtoms(others)))
            report.branches.append(_branch(f"ghz{name}={level.label}", out))
    return report


def run_scenario(cfg: ScenarioConfig) -> RunReport:
    cfg = cfg.resolved()
    t0 = time.perf_counter()
    report = run_projection(cfg) if cfg.scenario in PROJECTION else run_deterministic(cfg)
    log.info("%s finished in %.3f s", cfg.scenario, time.perf_counter() - t0)
    return report


# -- CSV ---------------------------------------------------------------------

def fmt(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), FLOAT_FMT)
    return str(value)


def _write(rows: Sequence[Sequence[Any]], path: Path | None) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text


def trajectory_csv(report: RunReport, path: Path | None = None) -> str:
    traj = report.trajectory
    sector = traj.final.sector
    schedule = report.config.model().schedule
    header = (["t_over_tau", "g1_tau", "g2_tau"]
              + [f"pop_{s.label}" for s in sector.states]
              + ["fidelity", "norm_drift"])
    rows = [header]
    for t, psi, norm in zip(traj.times, traj.states, traj.norms):
        g1, g2 = schedule.envelopes(t)
        fid = fidelity(psi, report.target) if report.target is not None else None
        rows.append([float(t), float(g1), float(g2),
                     *(np.abs(psi.amplitudes) ** 2).tolist(), fid, abs(norm - 1.0)])
    return _write(rows, path)


def summary_csv(report: RunReport, path: Path | None = None) -> str:
    return _write([["key", "value"], *report.summary().items()], path)


def reduced_label(subsystems: Sequence[str], label: Sequence) -> str:
    parts = []
    for name, v in zip(subsystems, label):
        if name == "a":
            parts.append(f"na{v}")
        elif name == "b":
            parts.append(f"nb{v}")
        else:
            parts.append(f"{AtomLevel(v).label}{name}")
    return ".".join(parts)


def branches_csv(report: RunReport, path: Path | None = None) -> str:
    """Branch table: ``branch, probability`` then real/imaginary amplitude
    columns for every post-state ket seen in any branch (blank where absent)."""
    columns: dict[str, None] = {}
    per_branch = []
    for b in report.branches:
        comps = {}
        if b.post_state is not None:
            for lab, amp in zip(b.post_state.labels, b.post_state.amplitudes):
                key = reduced_label(b.post_state.subsystems, lab)
                columns.setdefault(key, None)
                comps[key] = amp
        per_branch.append(comps)
    header = ["branch", "probability"]
    for key in columns:
        header += [f"re_{key}", f"im_{key}"]
    rows = [header]
    for b, comps in zip(report.branches, per_branch):
        row = [b.name, b.probability]
        for key in columns:
            amp = comps.get(key)
            row += [None, None] if amp is None else [amp.real + 0.0, amp.imag + 0.0]
        rows.append(row)
    return _write(rows, path)


PLOT_SCRIPT = '''"""Plot a trajectory CSV written by the simulate command."""
import sys

import matplotlib.pyplot as plt
import pandas as pd

path = sys.argv[1] if len(sys.argv) > 1 else "trajectory.csv"
df = pd.read_csv(path)
fig, (ax1, ax2) = plt.subplots(2, 1, sharex=True, figsize=(6, 6))
for col in df.columns:
    if col.startswith("pop_") and df[col].max() > 1e-3:
        ax1.plot(df["t_over_tau"], df[col], label=col[4:])
ax1.set_ylabel("population")
ax1.legend(fontsize="small")
if df["fidelity"].notna().any():
    ax2.plot(df["t_over_tau"], df["fidelity"])
ax2.set_ylabel("fidelity")
ax2.set_xlabel("t / tau")
fig.tight_layout()
fig.savefig(path.rsplit(".", 1)[0] + ".png", dpi=150)
'''


def write_artifacts(report: RunReport, out: Path, plot_script: bool = False) -> list[Path]:
    out.mkdir(parents=True, exist_ok=True)
    written = [out / "summary.csv"]
    summary_csv(report, written[0])
    if report.trajectory is not None:
        written.append(out / "trajectory.csv")
        trajectory_csv(report, written[-1])
        if plot_script:
            written.append(out / "plot_trajectory.py")
            written[-1].write_text(PLOT_SCRIPT)
    if report.branches:
        written.append(out / "branches.csv")
        branches_csv(report, written[-1])
    return written


# -- sweeps ------------------------------------------------------------------

# sweep-only axis that moves both pulse amplitudes together
JOINT_AXES = {"g0_tau": ("g10_tau", "g20_tau")}


def _sweep_row(args):
    template, axis, value = args
    targets = JOINT_AXES.get(axis, (axis,))
    cfg = dataclasses.replace(template, **{name: value for name in targets})
    return run_scenario(cfg).summary()


def sweep(template: ScenarioConfig, axis: str, values: Sequence, jobs: int = 1,
          path: Path | None = None) -> str:
    """One summary row per value of ``axis``; rows keep the input order.

    ``axis`` is a numeric :class:`ScenarioConfig` field or ``g0_tau``, which sets
    both pulse amplitudes.
    """
    if axis.replace("-", "_") in JOINT_AXES:
        axis = axis.replace("-", "_")
        values = [coerce("g10_tau", v) for v in values]
    else:
        axis = canonical_field(axis)
        if axis not in NUMERIC_FIELDS:
            raise ConfigError(f"{axis}: sweep axis must be a numeric field")
        values = [coerce(axis, v) for v in values]
    tasks = [(template, axis, v) for v in values]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            summaries = list(pool.map(_sweep_row, tasks))
    else:
        summaries = [_sweep_row(t) for t in tasks]
    columns: dict[str, None] = {axis: None}
    columns.update(dict.fromkeys(SUMMARY_KEYS))
    for s in summaries:
        columns.update(dict.fromkeys(s))
    rows = [list(columns)]
    for v, s in zip(values, summaries):
        rows.append([v if c == axis else s.get(c) for c in columns])
    return _write(rows, path)
