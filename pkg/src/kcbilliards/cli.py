"""Command-line front end: simulate, verify, project, plot.

Exit codes: 0 success, 2 configuration error, 3 dynamics undetermined or
failed, 4 verification failure. The BILLIARD_LOG environment variable
sets the logging level.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from typing import List

import numpy as np
from scipy.integrate import solve_ivp

from . import io as out_io
from .billiard import billiard_map
from .errors import (
    BilliardError,
    ConfigError,
    PoleSingularity,
    SingularPosition,
    StepFailure,
    Undetermined,
)
from .integrals import integral_set
from .model import (
    PlanarState,
    RunConfig,
    SphericalState,
    SystemParams,
    load_config,
)
from .planar import flow_rhs
from .spherical import (
    integrate_spherical,
    planar_to_sphere,
    sphere_to_planar,
    spherical_energy_embedded,
    time_change_density,
)
from .verify import run_suite

log = logging.getLogger("kcbilliards")

_FLOW_SAMPLES = 1001


def _planar_row(t: float, s: PlanarState, params: SystemParams) -> List[float]:
    ints = integral_set(s, params)
    return [t, s.xi, s.eta, s.xi_dot, s.eta_dot, ints.E_pl, ints.L, ints.A_eta,
            ints.D, ints.E_sph]


def _spherical_row(t: float, s: SphericalState, params: SystemParams) -> List[float]:
    return [t, s.q[0], s.q[1], s.q[2], s.v[0], s.v[1], s.v[2],
            spherical_energy_embedded(s, params)]


def _drift(values: List[float]) -> float:
    vals = [v for v in values if not math.isnan(v)]
    if len(vals) < 2:
        return 0.0
    ref = vals[0]
    return max(abs(v - ref) for v in vals) / max(1.0, abs(ref))


def cmd_simulate(args) -> int:
    cfg: RunConfig = load_config(args.config)
    os.makedirs(args.out, exist_ok=True)
    params = cfg.model.params
    traj_path = os.path.join(args.out, "trajectory.csv")
    bounce_path = os.path.join(args.out, "bounces.csv")
    summary_path = os.path.join(args.out, "summary.json")

    if cfg.run.n_bounces == 0:
        ts = np.linspace(0.0, cfg.run.t_max, _FLOW_SAMPLES)
        if cfg.model.domain == "planar":
            sol = solve_ivp(
                lambda t, y: flow_rhs(t, y, params),
                (0.0, cfg.run.t_max),
                cfg.initial.as_array(),
                method="DOP853",
                rtol=cfg.integrator.rtol,
                atol=cfg.integrator.atol,
                max_step=cfg.integrator.max_step,
                t_eval=ts,
            )
            if not sol.success:
                raise StepFailure(f"flow integration failed: {sol.message}")
            rows = [
                _planar_row(float(t), PlanarState.from_array(y), params)
                for t, y in zip(sol.t, sol.y.T)
            ]
            out_io.write_planar_trajectory(traj_path, rows)
            drift_cols = {"E_pl": [r[5] for r in rows], "D": [r[8] for r in rows],
                          "E_sph": [r[9] for r in rows]}
        else:
            tss, ys = integrate_spherical(
                cfg.initial, (0.0, cfg.run.t_max), params,
                rtol=cfg.integrator.rtol, atol=cfg.integrator.atol,
                max_step=cfg.integrator.max_step, t_eval=ts,
            )
            rows = [
                _spherical_row(float(t), SphericalState.project(y[:3], y[3:]), params)
                for t, y in zip(tss, ys)
            ]
            out_io.write_spherical_trajectory(traj_path, rows)
            drift_cols = {"E_sph": [r[7] for r in rows]}
        out_io.write_bounces(bounce_path, [])
        summary = {
            "outcome": "flow",
            "n_bounces": 0,
            "t_final": cfg.run.t_max,
            "max_drift": {k: _drift(v) for k, v in sorted(drift_cols.items())},
        }
        out_io.write_summary(summary_path, summary)
        log.info("flow run written to %s", args.out)
        return 0

    run = billiard_map(
        cfg.initial,
        cfg.run.n_bounces,
        cfg.model,
        mode="numeric",
        integ=cfg.integrator,
        t_max_per_leg=cfg.run.t_max,
    )
    records = run.records
    if cfg.model.domain == "planar":
        rows = [_planar_row(0.0, cfg.initial, params)]
        rows += [_planar_row(r.t_hit, r.state_out, params) for r in records]
        out_io.write_planar_trajectory(traj_path, rows)
        e_series = [integral_set(cfg.initial, params).E_pl] + [
            r.integrals_in.E_pl for r in records
        ]
        d_series = [integral_set(cfg.initial, params).D] + [
            r.integrals_in.D for r in records
        ]
        es_series = [integral_set(cfg.initial, params).E_sph] + [
            r.integrals_in.E_sph for r in records
        ]
    else:
        rows = [_spherical_row(0.0, cfg.initial, params)]
        rows += [_spherical_row(r.t_hit, r.state_out, params) for r in records]
        out_io.write_spherical_trajectory(traj_path, rows)
        e_series = [r.integrals_in.E_pl for r in records]
        d_series = [r.integrals_in.D for r in records]
        es_series = [spherical_energy_embedded(cfg.initial, params)] + [
            r.integrals_in.E_sph for r in records
        ]
    out_io.write_bounces(bounce_path, records)
    summary = {
        "outcome": run.outcome,
        "n_bounces": run.n_bounces,
        "t_final": records[-1].t_hit if records else 0.0,
        "max_drift": {
            "D": _drift(d_series),
            "E_pl": _drift(e_series),
            "E_sph": _drift(es_series),
        },
    }
    out_io.write_summary(summary_path, summary)
    log.info("billiard run: %d bounces, outcome %s", run.n_bounces, run.outcome)
    return 0


def cmd_verify(args) -> int:
    report = run_suite(args.seed, args.cases, inject_fault=args.inject_fault)
    json.dump(report, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")
    return 0 if report["passed"] else 4


def cmd_project(args) -> int:
    header, rows = out_io.read_csv(args.infile)
    params = SystemParams(m=1.0, a=args.a)
    bad: List[int] = []
    out_rows: List[List[float]] = []
    if args.direction == "plane-to-sphere":
        if header[:5] != ["t", "xi", "eta", "xi_dot", "eta_dot"]:
            raise ConfigError("input does not look like a planar trajectory CSV")
        for i, row in enumerate(rows):
            s = PlanarState(row[1], row[2], row[3], row[4])
            sp = planar_to_sphere(s, params)
            out_rows.append(
                [row[0], *sp.q.tolist(), *sp.v.tolist(), time_change_density(sp)]
            )
        header_out = "t,qx,qy,qz,vx,vy,vz,dtau_dt"
    else:
        if header[:7] != ["t", "qx", "qy", "qz", "vx", "vy", "vz"]:
            raise ConfigError("input does not look like a spherical trajectory CSV")
        for i, row in enumerate(rows):
            try:
                sp = SphericalState.project(row[1:4], row[4:7])
                s = sphere_to_planar(sp, params)
            except BilliardError:
                bad.append(i)
                continue
            if sp.q[2] >= 0.0:
                bad.append(i)
                continue
            out_rows.append(
                [row[0], s.xi, s.eta, s.xi_dot, s.eta_dot, time_change_density(sp)]
            )
        header_out = "t,xi,eta,xi_dot,eta_dot,dtau_dt"
    with open(args.outfile, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header_out + "\n")
        for row in out_rows:
            fh.write(",".join(out_io.fmt(v) for v in row) + "\n")
    for i in bad:
        print(f"row {i}: not in the south hemisphere, skipped", file=sys.stderr)
    log.info("projected %d rows (%d skipped)", len(out_rows), len(bad))
    return 0


def cmd_plot(args) -> int:
    header, rows = out_io.read_csv(args.infile)
    points = []
    bounce_points = []
    if header[:3] == ["t", "xi", "eta"]:
        points = [(r[1], r[2]) for r in rows]
    elif header[:4] == ["t", "qx", "qy", "qz"]:
        points = [(r[1], r[2]) for r in rows]
    elif header[0] == "i" and "xi" in header:
        bounce_points = [(r[2], r[3]) for r in rows]
    elif header[0] == "i":
        bounce_points = [(r[2], r[3]) for r in rows]
    else:
        raise ConfigError("unrecognized CSV schema for plotting")
    wall = None
    center = (0.0, 0.0)
    if args.config:
        cfg = load_config(args.config)
        if cfg.model.domain == "planar":
            wall = cfg.model.wall
    out_io.svg_plot(
        args.outfile, points, bounce_points=bounce_points, wall=wall, center=center,
        title=os.path.basename(args.infile),
    )
    log.info("plot written to %s", args.outfile)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="kcbilliards",
        description="Kepler-Coulomb billiards: simulation, verification, projection",
    )
    sub = p.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("simulate", help="run a configured flow or billiard")
    ps.add_argument("--config", required=True, help="JSON configuration file")
    ps.add_argument("--out", required=True, help="output directory")
    ps.set_defaults(func=cmd_simulate)

    pv = sub.add_parser("verify", help="run the seeded property suite")
    pv.add_argument("--seed", type=int, default=0)
    pv.add_argument("--cases", type=int, default=10000)
    pv.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    pv.set_defaults(func=cmd_verify)

    pp = sub.add_parser("project", help="project a trajectory file")
    pp.add_argument("--in", dest="infile", required=True)
    pp.add_argument("--out", dest="outfile", required=True)
    pp.add_argument(
        "--direction",
        choices=("plane-to-sphere", "sphere-to-plane"),
        required=True,
    )
    pp.add_argument("--a", type=float, default=0.0, help="center offset parameter")
    pp.set_defaults(func=cmd_project)

    pl = sub.add_parser("plot", help="render a trajectory or bounce CSV as SVG")
    pl.add_argument("--in", dest="infile", required=True)
    pl.add_argument("--out", dest="outfile", required=True)
    pl.add_argument("--config", default=None, help="optional config to draw the wall")
    pl.set_defaults(func=cmd_plot)
    return p


def main(argv=None) -> int:
    level = os.environ.get("BILLIARD_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING))
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (Undetermined, StepFailure, SingularPosition, PoleSingularity) as exc:
        print(f"dynamics error: {exc}", file=sys.stderr)
        return 3
    except BilliardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
