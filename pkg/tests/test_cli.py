import json
import math
import os

import numpy as np
import pytest

from kcbilliards.cli import main
from kcbilliards.io import PLANAR_HEADER, SPHERICAL_HEADER, read_csv

H1 = -1.0 / math.sqrt(2.0)


def write_config(path, doc):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)


@pytest.fixture
def billiard_config(tmp_path):
    doc = {
        "system": {"model": "kepler", "m": 1.0, "a": 1.0, "beta": 0.0},
        "wall": {"kind": "planar-line", "side": -1},
        "initial": {"state": [0.5, H1, 0.3, -0.8]},
        "integrator": {"rtol": 1e-11, "atol": 1e-11, "max_step": 1.0},
        "run": {"n_bounces": 8, "t_max": 50.0},
    }
    p = tmp_path / "config.json"
    write_config(p, doc)
    return str(p)


@pytest.fixture
def flow_config(tmp_path):
    doc = {
        "system": {"model": "kepler", "m": 1.0, "a": 0.5, "beta": 0.0},
        "wall": {"kind": "planar-line", "side": -1},
        "initial": {"state": [1.0, 0.2, -0.1, 0.9]},
        "integrator": {"rtol": 1e-10, "atol": 1e-10, "max_step": 1.0},
        "run": {"n_bounces": 0, "t_max": 3.0},
    }
    p = tmp_path / "flow.json"
    write_config(p, doc)
    return str(p)


class TestSimulate:
    def test_billiard_run(self, billiard_config, tmp_path):
        out = tmp_path / "out"
        rc = main(["simulate", "--config", billiard_config, "--out", str(out)])
        assert rc == 0
        header, rows = read_csv(out / "trajectory.csv")
        assert ",".join(header) == PLANAR_HEADER
        assert len(rows) == 9  # initial sample plus 8 bounces
        summary = json.loads((out / "summary.json").read_text())
        assert summary["outcome"] == "completed"
        assert summary["n_bounces"] == 8
        assert summary["max_drift"]["E_pl"] < 1e-8
        assert summary["max_drift"]["D"] < 1e-8
        bh, brows = read_csv(out / "bounces.csv")
        assert len(brows) == 8

    def test_flow_run(self, flow_config, tmp_path):
        out = tmp_path / "out"
        rc = main(["simulate", "--config", flow_config, "--out", str(out)])
        assert rc == 0
        header, rows = read_csv(out / "trajectory.csv")
        assert ",".join(header) == PLANAR_HEADER
        assert len(rows) == 1001
        summary = json.loads((out / "summary.json").read_text())
        assert summary["outcome"] == "flow"
        assert summary["n_bounces"] == 0

    def test_escape_outcome(self, tmp_path):
        doc = {
            "system": {"model": "kepler", "m": -1.0, "a": 1.0, "beta": 0.0},
            "wall": {"kind": "planar-line", "side": -1},
            "initial": {"state": [0.0, -2.0, 0.0, -1.0]},
            "integrator": {"rtol": 1e-10, "atol": 1e-10, "max_step": 100.0},
            "run": {"n_bounces": 5, "t_max": 5000.0},
        }
        cfg = tmp_path / "esc.json"
        write_config(cfg, doc)
        out = tmp_path / "out"
        rc = main(["simulate", "--config", cfg.as_posix(), "--out", str(out)])
        assert rc == 0
        summary = json.loads((out / "summary.json").read_text())
        assert summary["outcome"] == "escape"

    def test_deterministic_outputs(self, billiard_config, tmp_path):
        out1, out2 = tmp_path / "o1", tmp_path / "o2"
        assert main(["simulate", "--config", billiard_config, "--out", str(out1)]) == 0
        assert main(["simulate", "--config", billiard_config, "--out", str(out2)]) == 0
        for name in ("trajectory.csv", "bounces.csv", "summary.json"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()

    def test_config_error_exit_code(self, tmp_path):
        doc = {
            "system": {"model": "kepler", "m": 0.0, "a": 1.0},
            "wall": {"kind": "planar-line", "side": -1},
            "initial": {"state": [0.5, H1, 0.3, -0.8]},
        }
        cfg = tmp_path / "bad.json"
        write_config(cfg, doc)
        rc = main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "o")])
        assert rc == 2

    def test_missing_config_file(self, tmp_path):
        rc = main(["simulate", "--config", str(tmp_path / "nope.json"),
                   "--out", str(tmp_path / "o")])
        assert rc == 2

    def test_spherical_run(self, tmp_path):
        import kcbilliards as kb

        params = kb.SystemParams(m=1.0, a=1.0)
        s0 = kb.chart_to_sphere(
            kb.denormalize_chart(kb.PlanarState(0.5, params.h, 0.3, -0.8), 1.0)
        )
        doc = {
            "system": {"model": "spherical", "m": 1.0, "a": 1.0, "beta": 0.0},
            "wall": {"kind": "spherical-great-circle", "side": -1},
            "initial": {"state": [*s0.q.tolist(), *s0.v.tolist()]},
            "integrator": {"rtol": 1e-11, "atol": 1e-11, "max_step": 1.0},
            "run": {"n_bounces": 5, "t_max": 50.0},
        }
        cfg = tmp_path / "sph.json"
        write_config(cfg, doc)
        out = tmp_path / "out"
        rc = main(["simulate", "--config", str(cfg), "--out", str(out)])
        assert rc == 0
        header, rows = read_csv(out / "trajectory.csv")
        assert ",".join(header) == SPHERICAL_HEADER
        summary = json.loads((out / "summary.json").read_text())
        assert summary["n_bounces"] == 5
        assert summary["max_drift"]["E_sph"] < 1e-8


class TestVerify:
    def test_passes_with_exit_zero(self, capsys):
        rc = main(["verify", "--seed", "1", "--cases", "500"])
        assert rc == 0
        report = json.loads(capsys.readouterr().out)
        assert report["passed"]

    def test_seed_stability(self, capsys):
        assert main(["verify", "--seed", "5", "--cases", "300"]) == 0
        out1 = capsys.readouterr().out
        assert main(["verify", "--seed", "5", "--cases", "300"]) == 0
        out2 = capsys.readouterr().out
        assert out1 == out2

    def test_injected_fault_exit_code(self, capsys):
        rc = main(["verify", "--seed", "1", "--cases", "100", "--inject-fault"])
        assert rc == 4


class TestProject:
    def test_round_trip(self, flow_config, tmp_path, capsys):
        out = tmp_path / "out"
        assert main(["simulate", "--config", flow_config, "--out", str(out)]) == 0
        sph = tmp_path / "sph.csv"
        back = tmp_path / "back.csv"
        rc = main([
            "project", "--in", str(out / "trajectory.csv"), "--out", str(sph),
            "--direction", "plane-to-sphere", "--a", "0.5",
        ])
        assert rc == 0
        header, rows = read_csv(sph)
        assert header == ["t", "qx", "qy", "qz", "vx", "vy", "vz", "dtau_dt"]
        # density column is 1/lambda^2 = q_z^2
        for r in rows[:20]:
            assert r[7] == pytest.approx(r[3] ** 2, rel=1e-12)
        rc = main([
            "project", "--in", str(sph), "--out", str(back),
            "--direction", "sphere-to-plane", "--a", "0.5",
        ])
        assert rc == 0
        h0, rows0 = read_csv(out / "trajectory.csv")
        h1, rows1 = read_csv(back)
        assert len(rows0) == len(rows1)
        for r0, r1 in zip(rows0[:50], rows1[:50]):
            np.testing.assert_allclose(r1[1:5], r0[1:5], rtol=1e-12, atol=1e-12)

    def test_south_pole_rest_point_is_fixed(self, tmp_path):
        src = tmp_path / "s.csv"
        with open(src, "w") as fh:
            fh.write("t,xi,eta,xi_dot,eta_dot\n0,0,0,0,0\n")
        # (0, 0) in the a = 0 chart is the singular center; use a tiny offset
        with open(src, "w") as fh:
            fh.write("t,xi,eta,xi_dot,eta_dot\n0,1e-12,0,0,0\n")
        dst = tmp_path / "d.csv"
        rc = main(["project", "--in", str(src), "--out", str(dst),
                   "--direction", "plane-to-sphere", "--a", "0"])
        assert rc == 0
        _, rows = read_csv(dst)
        np.testing.assert_allclose(rows[0][1:4], [0.0, 0.0, -1.0], atol=1e-9)

    def test_north_rows_reported(self, tmp_path, capsys):
        src = tmp_path / "s.csv"
        with open(src, "w") as fh:
            fh.write("t,qx,qy,qz,vx,vy,vz,E_sph\n")
            fh.write("0,0,0,1,0,1,0,0\n")   # north pole: skipped
            fh.write("1,0,0,-1,0,1,0,0\n")  # south pole: kept
        dst = tmp_path / "d.csv"
        rc = main(["project", "--in", str(src), "--out", str(dst),
                   "--direction", "sphere-to-plane", "--a", "0.5"])
        assert rc == 0
        err = capsys.readouterr().err
        assert "row 0" in err
        _, rows = read_csv(dst)
        assert len(rows) == 1
        # the south pole maps to the wall-chart point (0, h)
        h = -0.5 / math.sqrt(1.25)
        assert rows[0][1] == pytest.approx(0.0)
        assert rows[0][2] == pytest.approx(h)


class TestPlot:
    def test_svg_structure(self, flow_config, tmp_path):
        out = tmp_path / "out"
        assert main(["simulate", "--config", flow_config, "--out", str(out)]) == 0
        svg = tmp_path / "plot.svg"
        rc = main(["plot", "--in", str(out / "trajectory.csv"), "--out", str(svg),
                   "--config", flow_config])
        assert rc == 0
        text = svg.read_text()
        assert text.startswith("<?xml")
        assert "<polyline" in text and "</svg>" in text

    def test_empty_trajectory_draws_wall_only(self, tmp_path, billiard_config):
        src = tmp_path / "empty.csv"
        with open(src, "w") as fh:
            fh.write(PLANAR_HEADER + "\n")
        svg = tmp_path / "empty.svg"
        rc = main(["plot", "--in", str(src), "--out", str(svg),
                   "--config", billiard_config])
        assert rc == 0
        text = svg.read_text()
        assert "<line" in text  # the wall is drawn
        assert "</svg>" in text

    def test_byte_identical_for_identical_input(self, flow_config, tmp_path):
        out = tmp_path / "out"
        assert main(["simulate", "--config", flow_config, "--out", str(out)]) == 0
        s1, s2 = tmp_path / "p1.svg", tmp_path / "p2.svg"
        for s in (s1, s2):
            assert main(["plot", "--in", str(out / "trajectory.csv"),
                         "--out", str(s)]) == 0
        assert s1.read_bytes() == s2.read_bytes()

    def test_golden_file_match(self, tmp_path):
        here = os.path.dirname(__file__)
        fixture = os.path.join(here, "data", "fixture_trajectory.csv")
        golden = os.path.join(here, "data", "golden_plot.svg")
        out = tmp_path / "out.svg"
        rc = main(["plot", "--in", fixture, "--out", str(out)])
        assert rc == 0
        assert out.read_bytes() == open(golden, "rb").read()

    def test_bounce_plot_polyline_count(self, billiard_config, tmp_path):
        out = tmp_path / "out"
        assert main(["simulate", "--config", billiard_config, "--out", str(out)]) == 0
        svg = tmp_path / "b.svg"
        rc = main(["plot", "--in", str(out / "bounces.csv"), "--out", str(svg)])
        assert rc == 0
        text = svg.read_text()
        # one marker per bounce
        assert text.count('fill="#2ca02c"') == 8


class TestDynamicsExitCode:
    def test_undetermined_returns_three(self, tmp_path):
        # t_max far too small for the first wall return, and the orbit is
        # bound so no escape certificate exists
        doc = {
            "system": {"model": "kepler", "m": 1.0, "a": 1.0, "beta": 0.0},
            "wall": {"kind": "planar-line", "side": -1},
            "initial": {"state": [0.5, H1, 0.3, -0.8]},
            "integrator": {"rtol": 1e-10, "atol": 1e-10, "max_step": 0.001},
            "run": {"n_bounces": 1, "t_max": 0.01},
        }
        cfg = tmp_path / "short.json"
        write_config(cfg, doc)
        rc = main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "o")])
        assert rc == 3

    def test_log_env_smoke(self, tmp_path, billiard_config, monkeypatch):
        monkeypatch.setenv("BILLIARD_LOG", "INFO")
        out = tmp_path / "out"
        assert main(["simulate", "--config", billiard_config, "--out", str(out)]) == 0
