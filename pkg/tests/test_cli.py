import json
import math
import os

import numpy as np
import pytest

import spherecurve as sc
from spherecurve import cli


def run_cli(*argv):
    return cli.main(list(argv))


class TestGen:
    def test_circle_round_trip(self, tmp_path):
        out = tmp_path / "c.json"
        assert run_cli("gen", "circle", "--rho", str(math.pi / 4), "--k", "2",
                       "--kappa1", "0", "-o", str(out)) == 0
        curve = sc.load_curve(out)
        assert curve.closed
        assert abs(sc.total_curvature(curve) - 4 * math.pi) < 1e-6

    def test_deterministic_bytes(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        args = ["gen", "circle", "--rho", "0.8", "--k", "1", "--kappa1", "0"]
        assert run_cli(*args, "-o", str(a)) == 0
        assert run_cli(*args, "-o", str(b)) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_bending_frame_max_curvature(self, tmp_path):
        out = tmp_path / "b.json"
        assert run_cli("gen", "bending-frame", "--k", "1", "--s", "0.5",
                       "-n", "256", "-o", str(out)) == 0
        curve = sc.load_curve(out)
        assert abs(np.abs(curve.kappa).max() - 1.0) < 1e-6

    def test_gen_reclassifies_identically(self, tmp_path):
        out = tmp_path / "c.json"
        rep1, rep2 = tmp_path / "r1.json", tmp_path / "r2.json"
        run_cli("gen", "circle", "--rho", "0.7", "--k", "3", "--kappa1", "0",
                "-n", "256", "-o", str(out))
        assert run_cli("classify", str(out), "-o", str(rep1)) == 0
        assert run_cli("classify", str(out), "-o", str(rep2)) == 0
        assert rep1.read_bytes() == rep2.read_bytes()


class TestClassify:
    def test_circle_labels(self, tmp_path):
        out = tmp_path / "c.json"
        rep = tmp_path / "r.json"
        run_cli("gen", "circle", "--rho", "0.9", "--k", "3", "--kappa1", "0",
                "-n", "256", "-o", str(out))
        assert run_cli("classify", str(out), "-o", str(rep)) == 0
        doc = json.loads(rep.read_text())
        assert doc["n"] == 3 and doc["j"] == 3
        assert doc["nu"] == 3
        assert doc["parity"] == -1

    def test_sigma1_label(self, tmp_path):
        out, rep = tmp_path / "c.json", tmp_path / "r.json"
        run_cli("gen", "circle", "--rho", "0.9", "--k", "1", "--kappa1", "0",
                "-n", "256", "-o", str(out))
        run_cli("classify", str(out), "-o", str(rep))
        doc = json.loads(rep.read_text())
        assert (doc["n"], doc["j"], doc["nu"]) == (3, 1, 1)

    def test_malformed_json_exit_2(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert run_cli("classify", str(bad)) == 2

    def test_strict_borderline_exit_3(self, tmp_path):
        out, rep = tmp_path / "c.json", tmp_path / "r.json"
        # geodesic circle in kappa0 < 0: equatorial margin, borderline
        run_cli("gen", "circle", "--rho", str(math.pi / 2), "--k", "1",
                "--kappa1", "-1", "-n", "256", "-o", str(out))
        assert run_cli("classify", str(out), "--strict", "-o", str(rep)) == 3
        doc = json.loads(rep.read_text())
        assert doc["borderline"] is True


class TestStreams:
    def test_bend_jsonl(self, tmp_path):
        out = tmp_path / "bend.jsonl"
        assert run_cli("bend", "--k", "1", "--steps", "7", "-n", "256",
                       "-o", str(out)) == 0
        lines = out.read_text().strip().splitlines()
        assert len(lines) == 8
        report = json.loads(lines[-1])
        assert report["pass"] is True
        assert set(report["parities"]) == {-1}
        first = sc.curve_from_json(json.loads(lines[0]))
        assert abs(sc.total_curvature(first) - 2 * math.pi) < 1e-6

    def test_validate_stream(self, tmp_path):
        out = tmp_path / "bend.jsonl"
        rep = tmp_path / "rep.json"
        run_cli("bend", "--k", "1", "--steps", "5", "-n", "256", "-o", str(out))
        assert run_cli("validate", str(out), "-o", str(rep)) == 0
        assert json.loads(rep.read_text())["pass"] is True

    def test_loops_roundtrip(self, tmp_path):
        c = tmp_path / "c.json"
        out = tmp_path / "l.jsonl"
        run_cli("gen", "circle", "--rho", "0.8", "--k", "1", "--kappa1", "0",
                "-n", "256", "-o", str(c))
        assert run_cli("loops", str(c), "--t0", "0.5", "--n-loops", "1",
                       "--rho", "0.3", "--epsilon", "0.05", "-o", str(out)) == 0
        lines = out.read_text().strip().splitlines()
        report = json.loads(lines[-1])
        assert report["parity_after"] == -report["parity_before"]

    def test_graft_auto_on_diffuse_returns_immediately(self, tmp_path, diffuse_curve):
        c = tmp_path / "d.json"
        out = tmp_path / "g.jsonl"
        c.write_text(cli.dumps(sc.curve_to_json(diffuse_curve)))
        assert run_cli("graft", str(c), "--mode", "auto", "--budget", "1.0",
                       "-o", str(out)) == 0
        lines = out.read_text().strip().splitlines()
        report = json.loads(lines[-1])
        assert report["status"] in ("Diffuse", "Both")
        assert report["steps"] == 0

    def test_shrink_stream(self, tmp_path):
        c = tmp_path / "c.json"
        out = tmp_path / "s.jsonl"
        run_cli("gen", "circle", "--rho", "0.7", "--k", "2", "--kappa1", "0",
                "-n", "256", "-o", str(c))
        assert run_cli("shrink", str(c), "--steps", "9", "-o", str(out)) == 0
        lines = out.read_text().strip().splitlines()
        assert json.loads(lines[-1])["pass"] is True
        assert len(lines) == 10


class TestBands:
    def test_band_profiles_constant_for_circle(self, tmp_path):
        c = tmp_path / "c.json"
        out = tmp_path / "b.json"
        csv = tmp_path / "b.csv"
        run_cli("gen", "circle", "--rho", str(math.pi / 2 - 0.15), "--k", "1",
                "--kappa1", "-0.4", "-n", "256", "-o", str(c))
        tolf = tmp_path / "tol.json"
        tolf.write_text(json.dumps({"band_k_nodes": 512}))
        assert run_cli("--tol-profile", str(tolf), "bands", str(c),
                       "--csv", str(csv), "-o", str(out)) == 0
        doc = json.loads(out.read_text())
        assert doc["nu"] == 1
        tp = np.array(doc["theta_plus"])
        assert tp.max() - tp.min() < 2e-2
        rows = csv.read_text().strip().splitlines()
        assert rows[0] == "lam,theta_plus,theta_minus"
        assert len(rows) == 513

    def test_export_band_csv(self, tmp_path):
        c = tmp_path / "c.json"
        csv = tmp_path / "band.csv"
        run_cli("gen", "circle", "--rho", "0.8", "--k", "1", "--kappa1", "0",
                "-n", "64", "-o", str(c))
        assert run_cli("export-band", str(c), str(csv), "--caustic") == 0
        rows = csv.read_text().strip().splitlines()
        assert rows[0] == "t,theta,x,y,z"
        assert len(rows) > 64


class TestSeedEnv:
    def test_env_seed_changes_tolerance_seed(self, tmp_path, monkeypatch):
        monkeypatch.setenv("SPHERECURVE_SEED", "123")
        out = tmp_path / "c.json"
        assert run_cli("gen", "circle", "--rho", "0.8", "--k", "1",
                       "--kappa1", "0", "-n", "64", "-o", str(out)) == 0
        # deterministic generation is unaffected by the seed for circles
        doc = json.loads(out.read_text())
        assert doc["n"] == 64
