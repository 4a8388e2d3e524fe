"""Command-line front end.

    simulate --scenario epr2|wN|custom [--config FILE] [flags] [--out DIR]
    project  --scenario ghz_project|qutrit_project [--t-freeze F] [flags]
    sweep    --scenario NAME --axis FIELD --values a,b,c [flags]

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 degenerate dark space.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .errors import CapacityError, ConfigError, DegenerateDarkSpaceError, IntegrationError
from .scenarios import (
    ScenarioConfig,
    branches_csv,
    load_config,
    run_scenario,
    summary_csv,
    sweep,
    write_artifacts,
)

EXIT_CONFIG, EXIT_NUMERIC, EXIT_DEGENERATE = 2, 3, 4

# flag -> ScenarioConfig field
FLAGS = {
    "--atoms": ("atoms", int),
    "--n-photons": ("n_photons", int),
    "--mu": ("mu", int),
    "--g10-tau": ("g10_tau", float),
    "--g20-tau": ("g20_tau", float),
    "--delta-tau": ("delta_tau", float),
    "--t-sep": ("t_sep", float),
    "--steps": ("steps", int),
    "--record-every": ("record_every", int),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--scenario", help="epr2, w3 (wN), custom, ghz_project, qutrit_project")
    p.add_argument("--config", type=Path, help="flat INI file; flags override it")
    for flag, (dest, typ) in FLAGS.items():
        p.add_argument(flag, dest=dest, type=typ)
    p.add_argument("--out", type=Path, help="directory for CSV artifacts")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bimodal-cavity", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="propagate an adiabatic-passage scenario")
    _common(p)
    p.add_argument("--plot-script", action="store_true",
                   help="also write a matplotlib script for the trajectory CSV")

    p = sub.add_parser("project", help="freeze the dark state and enumerate measurement branches")
    _common(p)
    p.add_argument("--t-freeze", dest="t_freeze", type=float)
    p.add_argument("--measure-atom", dest="measure_atom", type=int)

    p = sub.add_parser("sweep", help="one summary row per value of a numeric field")
    _common(p)
    p.add_argument("--t-freeze", dest="t_freeze", type=float)
    p.add_argument("--axis", required=True)
    p.add_argument("--values", required=True, help="comma-separated values (may be empty)")
    p.add_argument("--jobs", type=int, default=1)
    return parser


def config_from_args(args) -> ScenarioConfig:
    overrides = {dest: getattr(args, dest) for dest, _ in FLAGS.values()}
    for extra in ("t_freeze", "measure_atom"):
        overrides[extra] = getattr(args, extra, None)
    if args.scenario is not None:
        overrides["scenario"] = args.scenario
    if args.config is not None:
        return load_config(args.config, overrides)
    return ScenarioConfig(**{k: v for k, v in overrides.items() if v is not None})


def _run(args) -> int:
    cfg = config_from_args(args)
    if args.command == "sweep":
        values = [v for v in args.values.split(",") if v.strip()]
        text = sweep(cfg, args.axis, values, jobs=args.jobs,
                     path=args.out / "sweep.csv" if args.out else None)
        if args.out is None:
            sys.stdout.write(text)
        return 0

    kind = cfg.resolved().scenario
    if args.command == "simulate" and kind in ("ghz_project", "qutrit_project"):
        raise ConfigError(f"scenario: {kind} is run with the project command")
    if args.command == "project" and kind not in ("ghz_project", "qutrit_project"):
        raise ConfigError(f"scenario: project needs ghz_project or qutrit_project, got {kind}")
    report = run_scenario(cfg)
    if args.out is not None:
        for path in write_artifacts(report, args.out, getattr(args, "plot_script", False)):
            print(path)
    else:
        sys.stdout.write(branches_csv(report) if report.branches else summary_csv(report))
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return _run(args)
    except (ConfigError, CapacityError, FileNotFoundError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IntegrationError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except DegenerateDarkSpaceError as exc:
        print(f"degenerate dark space: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE


if __name__ == "__main__":
    sys.exit(main())
