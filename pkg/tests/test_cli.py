"""Command line: exit codes, error reports, scenario handling and deterministic output."""

from __future__ import annotations

import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from relshock.cli import main

FAST = """
[energy]
identity_samples = 400
n_samples = 500
[geometry]
n_nodes = 1024
audit_n = 40
"""


def write(tmp_path: Path, text: str, name: str = "scenario.ini") -> Path:
    p = tmp_path / name
    p.write_text(text)
    return p


def run(tmp_path: Path, *argv: str, scenario: str | None = FAST, out: str = "out") -> tuple[int, Path]:
    args = list(argv) + ["--out", str(tmp_path / out)]
    if scenario is not None:
        args += ["--scenario", str(write(tmp_path, scenario))]
    return main(args), tmp_path / out


class TestCommands:
    def test_identities_pass(self, tmp_path, capsys):
        code, out = run(tmp_path, "check", "identities")
        assert code == 0
        status = json.loads(capsys.readouterr().out)
        assert status == {"command": "check", "out": str(out), "passed": True}
        report = json.loads((out / "check_identities.json").read_text())
        assert report["passed"]

    def test_boundary_reports_crease(self, tmp_path):
        code, out = run(tmp_path, "boundary")
        assert code == 0
        payload = json.loads((out / "boundary.json").read_text())
        assert payload["crease"]["t"] == pytest.approx(10.0, abs=1e-10)
        assert payload["crease"]["U"] == pytest.approx(0.0, abs=1e-10)
        assert payload["fits"]["t_sing_minus_T"]["exponent"] == pytest.approx(2.0, abs=2e-3)
        assert payload["fits"]["t_ch_minus_T"]["exponent"] == pytest.approx(3.0, abs=2e-3)
        assert (out / "boundary.csv").read_text().startswith("U,t_top,mu_top")

    def test_seed_and_solve_geo(self, tmp_path):
        assert run(tmp_path, "seed")[0] == 0
        code, out = run(tmp_path, "solve-geo")
        assert code == 0
        assert (out / "seed.csv").exists() and (out / "geo.csv").exists()
        assert json.loads((out / "geo.json").read_text())["sharp_estimates"]["passed"]

    def test_oracle_and_compare(self, tmp_path):
        scn = FAST + "[oracle]\nn = 256\ncompare_ladder = 128 256 512\n"
        code, out = run(tmp_path, "oracle", scenario=scn)
        summary = json.loads((out / "oracle.json").read_text())
        assert code == 0 and summary["dx"] == pytest.approx(4.0 / 256) and summary["t"] == pytest.approx(5.0)
        code, out = run(tmp_path, "compare", scenario=scn)
        assert code == 0
        ratios = json.loads((out / "compare.json").read_text())["l1_ratios"]
        assert all(1.6 < r < 2.4 for r in ratios)

    def test_map_and_plot(self, tmp_path):
        code, out = run(tmp_path, "map")
        assert code == 0 and json.loads((out / "map.json").read_text())["passed"]
        code, out = run(tmp_path, "plot")
        assert code == 0
        for name in ("seed_profile.svg", "geometric_region.svg", "cartesian_region.svg"):
            text = (out / name).read_text()
            assert text.startswith("<svg") or text.startswith("<?xml")
            assert text.rstrip().endswith("</svg>")

    def test_inline_comments_and_polytropic_eos(self, tmp_path):
        code, out = run(tmp_path, "seed", scenario="[eos]\nkind = polytropic  ; speed depends on H\nc_bar = 0.5\nkappa = 0.3\n")
        assert code == 0
        assert json.loads((out / "seed.json").read_text())["eos"]["kind"] == "polytropic"


class TestErrors:
    def test_seed_without_minimum(self, tmp_path, capsys):
        code, out = run(tmp_path, "seed", scenario="[seed]\ncoefficients = 0 1 0 0\n")
        assert code == 2
        err = json.loads(capsys.readouterr().err)
        assert err["error"] == "ViolatedMinimum"
        assert json.loads((out / "error.json").read_text())["error"] == "ViolatedMinimum"

    @pytest.mark.parametrize("text", ["[seed]\namplitude = -0.1\n", "[seed]\namplitude = big\n", "[oracle]\ncfl = fast\n", "[bogus]\nx = 1\n", "[data]\nnot_a_key = 1\n"])
    def test_malformed_scenarios(self, tmp_path, capsys, text):
        code, _ = run(tmp_path, "seed", scenario=text)
        assert code == 2
        assert json.loads(capsys.readouterr().err)["error"] == "ConfigError"

    def test_missing_scenario_file(self, tmp_path, capsys):
        code = main(["seed", "--scenario", str(tmp_path / "absent.ini"), "--out", str(tmp_path / "out")])
        assert code == 2
        assert json.loads(capsys.readouterr().err)["error"] == "ConfigError"


class TestDeterminism:
    def test_repeated_runs_are_byte_identical(self, tmp_path):
        run(tmp_path, "boundary", out="a")
        run(tmp_path, "boundary", out="b")
        for name in ("boundary.csv", "boundary.json"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_energy_scan_independent_of_workers(self, tmp_path):
        code1, a = run(tmp_path, "check", "energy-current", out="serial")
        code2, b = main(["check", "energy-current", "--workers", "2", "--scenario", str(tmp_path / "scenario.ini"), "--out", str(tmp_path / "par")]), tmp_path / "par"
        assert code1 == code2 == 0
        assert (a / "check_energy_current.json").read_bytes() == (b / "check_energy_current.json").read_bytes()


class TestEntryPoint:
    def test_environment_scenario(self, tmp_path):
        scn = write(tmp_path, "[seed]\namplitude = 0.1\nshift = 0.4\n", "env.ini")
        env = dict(os.environ, RELSHOCK_SCENARIO=str(scn))
        proc = subprocess.run([sys.executable, "-m", "relshock.cli", "boundary", "--out", str(tmp_path / "env")], env=env, capture_output=True, text=True, timeout=300)
        assert proc.returncode == 0, proc.stderr
        crease = json.loads((tmp_path / "env" / "boundary.json").read_text())["crease"]
        assert crease["U"] == pytest.approx(0.4, abs=1e-10)

    def test_help(self):
        proc = subprocess.run([sys.executable, "-m", "relshock.cli", "--help"], capture_output=True, text=True, timeout=60)
        assert proc.returncode == 0 and "check" in proc.stdout
