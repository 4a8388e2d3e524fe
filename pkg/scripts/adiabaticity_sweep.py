"""EPR fidelity against pulse amplitude and detuning.

Usage: python3 scripts/adiabaticity_sweep.py [OUT_DIR] [JOBS]
"""

import sys
from pathlib import Path

from bimodal_cavity.scenarios import ScenarioConfig, sweep

AXES = {
    "g0_tau": [2.5, 5, 7.5, 10, 15, 20, 30],
    "delta_tau": [0, 1, 2, 5, 10],
    "t_sep": [0.5, 1, 4 / 3, 2, 3],
}


def main(out: Path, jobs: int) -> None:
    out.mkdir(parents=True, exist_ok=True)
    for axis, values in AXES.items():
        path = out / f"sweep_{axis}.csv"
        sweep(ScenarioConfig("epr2"), axis, values, jobs=jobs, path=path)
        print(path)


if __name__ == "__main__":
    main(Path(sys.argv[1]) if len(sys.argv) > 1 else Path("results"),
         int(sys.argv[2]) if len(sys.argv) > 2 else 1)
