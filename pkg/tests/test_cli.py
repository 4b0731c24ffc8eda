import json
import math

import numpy as np

from spheretop.cli import main


def run(args):
    return main([str(a) for a in args])


class TestSimulate:
    def test_re_demo_conserves_everything(self, tmp_path, capsys):
        out = tmp_path / "demo.csv"
        code = run(["simulate", "--scenario", "re-acute-demo", "--T", "10",
                    "--out", out])
        assert code == 0
        drift = json.loads((tmp_path / "demo.csv.drift.json").read_text())
        assert all(v < 1e-8 for v in drift.values()), drift
        assert (tmp_path / "demo.csv.manifest.json").exists()
        manifest = json.loads((tmp_path / "demo.csv.manifest.json").read_text())
        assert manifest["command"] == "simulate"

    def test_antipodal_rest_is_constant(self, tmp_path):
        out = tmp_path / "rest.csv"
        code = run(["simulate", "--scenario", "antipodal-rest", "--T", "5",
                    "--space", "full", "--out", out])
        assert code == 0
        rows = out.read_text().strip().splitlines()
        first = rows[1].split(",")[1:17]
        for row in rows[2:]:
            assert row.split(",")[1:17] == first

    def test_collision_reports_time(self, tmp_path, capsys):
        out = tmp_path / "crash.csv"
        code = run(["simulate", "--scenario", "collision-course", "--T", "50",
                    "--out", out])
        assert code == 3
        assert "singularity encountered at t" in capsys.readouterr().err

    def test_deterministic_output(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for out in (a, b):
            assert run(["simulate", "--scenario", "random", "--seed", "7",
                        "--T", "2", "--potential", "linear:1.0", "--out", out]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_config_file_with_flag_override(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"scenario": "random", "seed": 3, "T": 1.0,
                                   "potential": "linear:0.5", "out": "ignored.csv"}))
        out = tmp_path / "run.csv"
        assert run(["simulate", "--config", cfg, "--out", out]) == 0
        manifest = json.loads((tmp_path / "run.csv.manifest.json").read_text())
        assert manifest["config"]["seed"] == 3
        assert manifest["config"]["out"] == str(out)

    def test_unknown_config_keys_rejected(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"scenari": "random"}))
        assert run(["simulate", "--config", cfg, "--out", tmp_path / "x.csv"]) == 4


class TestReduce:
    def test_cocircular_trajectory_is_so2(self, tmp_path):
        state = tmp_path / "state.json"
        th = 0.9
        state.write_text(json.dumps({
            "g1": [1, 0, 0, 0], "p1": [0, 1, 0, 0],
            "g2": [math.cos(th), math.sin(th), 0, 0],
            "p2": [-math.sin(th), math.cos(th), 0, 0],
        }))
        full = tmp_path / "full.csv"
        assert run(["simulate", "--state", state, "--space", "full", "--T", "3",
                    "--potential", "linear:1.0", "--out", full]) == 0
        inv = tmp_path / "inv.csv"
        assert run(["reduce", "--trajectory", full, "--potential", "linear:1.0",
                    "--out", inv]) == 0
        rows = inv.read_text().strip().splitlines()
        assert rows[0].split(",")[-1] == "stratum"
        assert all(r.split(",")[-1] == "so2_isotropy" for r in rows[1:])

    def test_generic_state_is_free(self, tmp_path):
        state = tmp_path / "state.json"
        state.write_text(json.dumps({
            "g1": [1, 0, 0, 0], "p1": [0, 1, 0, 0],
            "g2": [0, 0, 1, 0], "p2": [0, 0, 0, 1],
        }))
        out = tmp_path / "one.csv"
        assert run(["reduce", "--state", state, "--potential", "linear:1.0",
                    "--out", out]) == 0
        assert out.read_text().strip().splitlines()[1].split(",")[-1] == "free"

    def test_round_trip_matches_invariant_integration(self, tmp_path):
        state = tmp_path / "state.json"
        state.write_text(json.dumps({
            "g1": [1, 0, 0, 0], "p1": [0, 0.4, 0.1, 0],
            "g2": [0, 0, 1, 0], "p2": [0, 0.2, 0, -0.3],
        }))
        full = tmp_path / "full.csv"
        inv_direct = tmp_path / "inv_direct.csv"
        for space, out in (("full", full), ("invariants", inv_direct)):
            assert run(["simulate", "--state", state, "--space", space,
                        "--T", "10", "--sample-dt", "1.0",
                        "--potential", "linear:1.0", "--out", out]) == 0
        reduced = tmp_path / "reduced.csv"
        assert run(["reduce", "--trajectory", full, "--potential", "linear:1.0",
                    "--out", reduced]) == 0
        a = np.genfromtxt(reduced, delimiter=",", names=True)
        b = np.genfromtxt(inv_direct, delimiter=",", names=True)
        for col in ("k11", "k12", "k13", "k22", "k23", "k33", "delta", "r"):
            assert np.allclose(a[col], b[col], atol=1e-6), col


class TestClassify:
    def test_re_record(self, capsys):
        assert run(["re", "--theta", 1.0, "--eta", 1, "--m1", 1, "--m2", 1,
                    "--potential", "grav"]) == 0
        record = json.loads(capsys.readouterr().out)
        assert record["kind"] == "acute"
        assert abs(record["lever_residual"]) < 1e-10
        assert record["fixed_point_residual"] < 1e-10

    def test_right_angle_needs_equal_masses(self, capsys):
        assert run(["re", "--theta", math.pi / 2, "--eta", 1, "--m1", 3,
                    "--m2", 2, "--potential", "grav"]) == 4

    def test_stability_upright_top(self, capsys):
        assert run(["stability", "--potential", "lagrange", "--alpha", 2,
                    "--gamma", 1, "--theta", 0.3]) == 0
        record = json.loads(capsys.readouterr().out)
        assert record["classification"] == "linearly_unstable"
        assert record["zero_count"] == 4

    def test_stability_acute_two_body(self, capsys):
        assert run(["stability", "--theta", 0.9, "--eta", 1.2, "--m1", 3,
                    "--m2", 2, "--potential", "grav"]) == 0
        record = json.loads(capsys.readouterr().out)
        assert record["classification"] == "linearly_stable"
        eigs = [complex(a, b) for a, b in record["eigenvalues"]]
        assert sum(1 for e in eigs if abs(e) < 1e-8) == 4


class TestSurfaceCommand:
    def test_grid_rows_and_plot_script(self, tmp_path, capsys):
        out = tmp_path / "surf.csv"
        assert run(["ec-surface", "--family", "isosceles", "--m1", 1, "--m2", 1,
                    "--potential", "grav", "--grid", 10, 10,
                    "--theta-min", 0.4, "--theta-max", 2.6,
                    "--no-classify", "--plot-script", "--out", out]) == 0
        rows = out.read_text().strip().splitlines()
        assert rows[0] == "family,theta,tau,H,lam2,rho2,stability"
        assert len(rows) == 101
        assert (tmp_path / "surf.csv.plot.py").exists()
        assert (tmp_path / "surf.csv.manifest.json").exists()
