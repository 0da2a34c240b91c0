"""Command-line driver.

Exit codes: 0 success, 2 configuration error, 3 solver abort,
4 failed scientific check (only with --check).
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import frozen
from .config import ConfigError, RunConfig, parse_config
from .diagnostics import (
    check_dissipation_budget,
    check_liapunov_monotone,
    check_mass_law,
    compute_record,
    write_csv,
)
from .elliptic import compute_velocity, gradient
from .experiments import (
    chemorepulsion_crosscheck,
    epsilon_sweep,
    run_limit,
    steady_state_study,
)
from .mild import picard_iterate
from .model import Monostable, ParameterError, SolverAbort
from .stepper import StepperConfig, run

log = logging.getLogger("artifact")

EXIT_OK, EXIT_CONFIG, EXIT_ABORT, EXIT_CHECK = 0, 2, 3, 4


def _num(v: float) -> str:
    return format(float(v), ".17g")


def snapshot_json(t: float, x, u, phi) -> str:
    """Snapshot document with 17-significant-digit floats."""
    arr = lambda a: "[" + ", ".join(_num(v) for v in a) + "]"  # noqa: E731
    return f'{{"t": {_num(t)}, "x": {arr(x)}, "u": {arr(u)}, "phi": {arr(phi)}}}\n'


def read_snapshot(path) -> dict:
    with open(path) as fh:
        doc = json.load(fh)
    return {k: (np.array(v) if isinstance(v, list) else v) for k, v in doc.items()}


class Runner:
    def __init__(self, cfg: RunConfig, out: Path):
        self.cfg, self.out = cfg, out
        self.grid = cfg.grid
        self.params = cfg.params
        self.checks: dict[str, bool] = {}
        self.summary: dict = {"case": cfg.case}

    # -- output ---------------------------------------------------------------
    def write_diag(self, records) -> None:
        if self.cfg.format == "csv":
            write_csv(records, self.out / "diag.csv")
        else:
            with open(self.out / "diag.json", "w") as fh:
                json.dump([r.as_dict() for r in records], fh, indent=1)
                fh.write("\n")

    def write_snapshots(self, snapshots, phi_of) -> None:
        for s in snapshots:
            name = f"snapshot_t{s.t:.6g}.json"
            (self.out / name).write_text(snapshot_json(s.t, self.grid.x, s.u, phi_of(s.u)))

    def write_summary(self) -> None:
        self.summary["checks"] = self.checks
        with open(self.out / "summary.json", "w") as fh:
            json.dump(self.summary, fh, indent=2, default=float)
            fh.write("\n")

    def velocity(self, u):
        return compute_velocity(u, self.grid, self.params)

    # -- cases ----------------------------------------------------------------
    def run_coupled(self):
        cfg = self.cfg
        res = run(cfg.initial_condition(), self.grid, self.params, cfg.stepper, cfg.t_final,
                  cfg.sample_every, snapshot_times=cfg.snapshot_times or None)
        self.write_diag(res.records)
        self.write_snapshots(res.snapshots if cfg.snapshot_times else [res.final], self.velocity)
        recs = res.records
        self.checks["mass_law"] = check_mass_law(recs, self.params) is None
        self.checks["nonnegative"] = min(r.min_u for r in recs) >= -1e-10
        if isinstance(self.params.law, Monostable):
            self.checks["liapunov_monotone"] = check_liapunov_monotone(recs, frozen.LIAPUNOV_SLACK) is None
            self.checks["dissipation_budget"] = check_dissipation_budget(
                recs, recs[0], frozen.BUDGET_SLACK) is None
        else:
            self.checks["bounded"] = max(r.max_u for r in recs) <= frozen.BISTABLE_SUP_CAP

    def run_limit(self):
        cfg = self.cfg
        res = run_limit(cfg.initial_condition(), self.grid, self.params, cfg.stepper, cfg.t_final,
                        cfg.sample_every, diagnostics=True,
                        snapshot_times=cfg.snapshot_times or None)
        self.write_diag(res.records)
        # Velocity of the limit problem: phi = -u_x.
        self.write_snapshots(res.snapshots if cfg.snapshot_times else [res.final],
                             lambda u: -gradient(u, self.grid.h))
        self.checks["mass_law"] = check_mass_law(res.records, self.params) is None

    def run_chemorepulsion(self):
        cfg = self.cfg
        dev = chemorepulsion_crosscheck(cfg.initial_condition(), self.grid, cfg.delta, cfg.epsilon,
                                        cfg.stepper, cfg.t_final, cfg.sample_every)
        self.summary.update(deviation=dev, cap=frozen.CHEMOREPULSION_CAP)
        self.checks["deviation_below_cap"] = dev <= frozen.CHEMOREPULSION_CAP

    def run_sweep(self):
        cfg = self.cfg
        res = epsilon_sweep(cfg.initial_condition(), self.grid, self.params, cfg.stepper,
                            cfg.t_final, cfg.epsilon_list, cfg.sample_every,
                            workers=cfg.workers or None)
        res.write_csv(self.out / "sweep.csv")
        self.summary.update(res.summary(frozen.SWEEP_ERR0))
        self.checks["strictly_decreasing"] = res.strictly_decreasing()
        self.checks["below_threshold"] = res.errors[-1] <= frozen.SWEEP_ERR0

    def run_steady(self):
        cfg = self.cfg
        res = steady_state_study(cfg.initial_condition(), self.grid, self.params, cfg.stepper,
                                 cfg.t_final, cfg.sample_every)
        records = [compute_record(s, self.params) for s in res.run.snapshots]
        self.write_diag(records)
        self.write_snapshots([res.run.final], self.velocity)
        self.summary.update(limit=res.limit, label=res.label, distance=res.distance,
                            detector_fired=res.converged, t_end=float(res.times[-1]))
        if cfg.r == 0:
            self.checks["converged_to_mean"] = res.distance <= frozen.STEADY_R0_TOL
        else:
            self.checks["classified"] = res.label in ("0", "1")

    def run_picard(self):
        cfg = self.cfg
        u0 = cfg.initial_condition()
        pic = picard_iterate(u0, self.grid, self.params, cfg.picard_t, cfg.picard_m,
                             cfg.picard_tol, cfg.picard_max_iter)
        ref = run(u0, self.grid, self.params, StepperConfig(cfg.dt, cfg.theta, cfg.cfl_safety),
                  cfg.picard_t, sample_every=10**9, diagnostics=False)
        diff = math.sqrt(self.grid.integrate((pic.final - ref.final.u) ** 2))
        self.summary.update(iterations=pic.iterations, residual=pic.residual, ratio=pic.ratio,
                            converged=pic.converged, l2_difference=diff, cap=frozen.PICARD_CAP)
        self.checks["contracting"] = pic.contracting
        self.checks["matches_stepper"] = diff <= frozen.PICARD_CAP

    def execute(self) -> bool:
        dispatch = {
            "bistable": self.run_coupled,
            "monostable": self.run_coupled,
            "limit": self.run_limit,
            "chemorepulsion-check": self.run_chemorepulsion,
            "epsilon-sweep": self.run_sweep,
            "steady-state": self.run_steady,
            "picard-check": self.run_picard,
        }
        dispatch[self.cfg.case]()
        self.write_summary()
        return all(self.checks.values())


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="artifact", description="Simulate the 1D individual-clustering model.")
    ap.add_argument("--config", required=True, help="path to a key = value config file")
    ap.add_argument("--output-dir", help="overrides output_dir from the config")
    ap.add_argument("--format", choices=("csv", "json"), help="diagnostics format")
    ap.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                    help="override a config key (repeatable)")
    ap.add_argument("--workers", type=int, help="worker processes for epsilon sweeps")
    ap.add_argument("--check", action="store_true", help="exit 4 if the case's checks fail")
    ap.add_argument("--quiet", action="store_true")
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)

    overrides = list(args.overrides)
    if args.format:
        overrides.append(f"format={args.format}")
    if args.workers is not None:
        overrides.append(f"workers={args.workers}")
    try:
        text = Path(args.config).read_text()
        cfg = parse_config(text, overrides)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    out = Path(args.output_dir or cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    runner = Runner(cfg, out)
    try:
        ok = runner.execute()
    except SolverAbort as exc:
        print(f"solver abort: {exc}", file=sys.stderr)
        return EXIT_ABORT
    except ParameterError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    for name, passed in runner.checks.items():
        if not args.quiet:
            print(f"{'PASS' if passed else 'FAIL'} {name}", file=sys.stderr)
    if args.check and not ok:
        return EXIT_CHECK
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
