"""Freeze the dark state mid-pulse and list every measurement branch.

Usage: python3 scripts/measurement_branches.py [T_FREEZE_OVER_TAU]
"""

import sys

import numpy as np

from bimodal_cavity.scenarios import ScenarioConfig, reduced_label, run_scenario


def show(cfg: ScenarioConfig) -> None:
    report = run_scenario(cfg)
    c = report.config
    print(f"\n{c.scenario}: N={c.atoms}, n={c.n_photons}, mu={c.mu}, t_freeze={c.freeze_time:.4f}")
    for b in report.branches:
        if b.post_state is None:
            print(f"  {b.name:<12} p=0")
            continue
        names = b.post_state.subsystems
        terms = ", ".join(f"{np.real_if_close(a):+.4f} {reduced_label(names, lab)}"
                          for lab, a in zip(b.post_state.labels, b.post_state.amplitudes)
                          if abs(a) > 1e-12)
        fid = "" if b.target_fidelity is None else f"  F={b.target_fidelity:.6f}"
        print(f"  {b.name:<12} p={b.probability:.6f}{fid}  [{terms}]")


if __name__ == "__main__":
    t_freeze = float(sys.argv[1]) if len(sys.argv) > 1 else None
    show(ScenarioConfig("qutrit_project", t_freeze=t_freeze))
    show(ScenarioConfig("ghz_project", t_freeze=t_freeze))
    show(ScenarioConfig("ghz_project", atoms=3, t_freeze=t_freeze))
