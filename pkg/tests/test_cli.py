"""Command-line interface: config handling, outputs, exit codes."""

import json
from pathlib import Path

import pytest

from cglblow.cli import main, parse_config


def write_cfg(tmp_path, text) -> str:
    p = tmp_path / "run.cfg"
    p.write_text(text)
    return str(p)


class TestConfig:
    def test_defaults(self):
        cfg = parse_config(None)
        assert cfg["p"] == "3" and cfg["scheme"] == "imex2"

    def test_unknown_key_rejected(self, tmp_path):
        path = write_cfg(tmp_path, "p = 3\nwibble = 1\n")
        with pytest.raises(ValueError):
            parse_config(path)

    def test_comments_and_overrides(self, tmp_path):
        path = write_cfg(tmp_path, "# hi\np = 2\ndelta = 1/3\n")
        cfg = parse_config(path)
        assert cfg["p"] == "2" and cfg["delta"] == "1/3"


class TestExitCodes:
    def test_domain_error_is_2(self, tmp_path, capsys):
        path = write_cfg(tmp_path, "p = 3\ndelta = 4\n")
        assert main(["constants", "--config", path,
                     "--output-dir", str(tmp_path / "o")]) == 2

    def test_unknown_key_is_2(self, tmp_path):
        path = write_cfg(tmp_path, "nope = 1\n")
        assert main(["constants", "--config", path]) == 2


@pytest.fixture(scope="module")
def cfgfile(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("cli")
    path = tmp / "run.cfg"
    path.write_text(
        "p = 3\ndelta = 1\ngrid.N = 1024\nds = 1e-3\ns_end = 100.05\n"
        f"output.dir = {tmp / 'out'}\n"
    )
    return str(path), tmp / "out"


class TestOutputs:

    def test_constants_json(self, cfgfile):
        path, out = cfgfile
        assert main(["constants", "--config", path]) == 0
        data = json.loads((out / "constants.json").read_text())
        assert data["params"]["b2"] == "1/63"
        assert data["ode"]["Htilde1_closed"] == "-379/252"
        assert data["params"]["mu_selfconsistent"]["exact"].startswith("-124/1323")

    def test_basis_golden_roundtrip(self, cfgfile):
        path, out = cfgfile
        assert main(["basis", "--config", path]) == 0
        text = (out / "basis.txt").read_text()
        assert "h_2 = " in text
        from cglblow.exact import parse_poly
        from cglblow.spectral import build_basis
        from fractions import Fraction as F

        basis = build_basis(6, F(3), F(1), F(1, 2))
        for line in text.splitlines():
            if line.startswith("h_2 = "):
                assert parse_poly(line[6:]) == basis.h[2]

    def test_profile_csv(self, cfgfile):
        path, out = cfgfile
        assert main(["profile", "--config", path]) == 0
        lines = (out / "profile.csv").read_text().splitlines()
        header = [ln for ln in lines if ln.startswith("#")]
        assert any("p = 3" in ln for ln in header)
        cols = [ln for ln in lines if not ln.startswith("#")][0]
        assert cols == "y,re_phi,im_phi,abs_R,abs_V1,abs_V2"

    def test_simulate_deterministic(self, cfgfile):
        path, out = cfgfile
        assert main(["simulate", "--config", path]) == 0
        first = (out / "simulate.csv").read_bytes()
        assert main(["simulate", "--config", path]) == 0
        second = (out / "simulate.csv").read_bytes()
        assert first == second

    def test_verify_passes(self, cfgfile):
        path, out = cfgfile
        assert main(["verify", "--config", path]) == 0
        text = (out / "verify.txt").read_text()
        assert "FAIL" not in text


class TestFailurePaths:
    def test_numerical_failure_is_3(self, tmp_path, monkeypatch):
        from cglblow import simulate

        def boom(self, spec, **kw):
            raise FloatingPointError("scheme blow-up at s = 100.1")

        monkeypatch.setattr(simulate.Simulator, "run", boom)
        path = write_cfg(
            tmp_path,
            f"p = 3\ndelta = 1\ngrid.N = 512\nds = 1e-3\ns_end = 100.01\n"
            f"output.dir = {tmp_path / 'o'}\n",
        )
        assert main(["simulate", "--config", path]) == 3

    def test_verification_failure_is_4(self, tmp_path, monkeypatch):
        import cglblow.verify as verify

        monkeypatch.setattr(
            verify, "verification_report",
            lambda p, d, full=True: [("synthetic", False, "forced failure")],
        )
        path = write_cfg(
            tmp_path, f"p = 3\ndelta = 1\noutput.dir = {tmp_path / 'o'}\n"
        )
        assert main(["verify", "--config", path]) == 4
