import csv
import io
import json
import math
import subprocess
import sys

import jsonschema
import pytest

from wignerbloch import cli
from wignerbloch.cli import SWEEP_COLUMNS, main, parse_config

NUMBER = {"type": "number"}
VEC3 = {"type": "array", "items": NUMBER, "minItems": 3, "maxItems": 3}
REPORT_SCHEMA = {
    "type": "object",
    "required": [
        "beta", "lambda", "mu_exact", "mu_approx", "purity_sq_exact", "purity_sq_exact_error",
        "purity_sq_formula", "purity_sq_bound", "moments", "regime_warning",
    ],
    "properties": {
        "beta": NUMBER,
        "lambda": NUMBER,
        "mu_exact": VEC3,
        "mu_approx": VEC3,
        "purity_sq_exact": NUMBER,
        "purity_sq_exact_error": NUMBER,
        "purity_sq_formula": NUMBER,
        "purity_sq_bound": NUMBER,
        "moments": {
            "type": "object",
            "required": ["mean_p", "cov_p", "pi_disp_sq", "x_disp_sq"],
            "properties": {
                "mean_p": VEC3,
                "cov_p": {"type": "array", "items": VEC3, "minItems": 3, "maxItems": 3},
                "pi_disp_sq": NUMBER,
                "x_disp_sq": NUMBER,
            },
        },
        "regime_warning": {"type": "boolean"},
    },
}


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def write_config(tmp_path, **fields):
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(fields))
    return str(path)


BASE = {"mass": 1.0, "sigma": [0.01, 0.01, 0.01], "boost_axis": [1, 0, 0], "beta": 1.0}


class TestPoint:
    def test_rest_observer(self, capsys):
        code, out, _ = run(capsys, "point", "--beta", "0")
        assert code == 0
        doc = json.loads(out)
        jsonschema.validate(doc, REPORT_SCHEMA)
        assert doc["mu_exact"] == pytest.approx([0, 0, 1], abs=1e-12)
        for key in ("purity_sq_exact", "purity_sq_formula", "purity_sq_bound"):
            assert doc[key] == pytest.approx(1.0, abs=1e-12)

    def test_nr_preset_deficit(self, capsys):
        code, out, _ = run(capsys, "point", "--preset", "paper-nr")
        doc = json.loads(out)
        assert code == 0
        assert 1 - doc["purity_sq_exact"] == pytest.approx(2.136e-5, rel=2e-3)
        assert all(math.isfinite(x) for x in doc["mu_exact"])

    def test_seventeen_digits(self, capsys):
        _, out, _ = run(capsys, "point")
        assert '"lambda": 0.46211715726000974' in out

    def test_csv_point(self, capsys):
        _, out, _ = run(capsys, "point", "--output", "csv")
        rows = list(csv.reader(io.StringIO(out)))
        assert tuple(rows[0]) == SWEEP_COLUMNS and len(rows) == 2

    def test_missing_mass(self, capsys, tmp_path):
        cfg = write_config(tmp_path, **{k: v for k, v in BASE.items() if k != "mass"})
        code, out, err = run(capsys, "point", "--config", cfg)
        assert code == 2 and out == ""
        assert "config.mass" in err

    @pytest.mark.parametrize(
        "override, path",
        [
            ({"sigma": [0.1, 0.1]}, "config.sigma"),
            ({"sigma": [0.1, "x", 0.1]}, "config.sigma[1]"),
            ({"sigma": [0.1, 0.1, -0.1]}, "config.sigma[2]"),
            ({"mass": -1.0}, "config.mass"),
            ({"beta": {"start": 0, "stop": 1, "count": 1}}, "config.beta.count"),
            ({"order_per_axis": 5}, "config (integrator): order_per_axis"),
            ({"boost_axis": [0, 0, 0]}, "config.boost_axis"),
            ({"colour": "red"}, "unknown fields"),
        ],
    )
    def test_bad_fields(self, capsys, tmp_path, override, path):
        code, _, err = run(capsys, "sweep" if "count" in str(override) else "point", "--config", write_config(tmp_path, **{**BASE, **override}))
        assert code == 2
        assert path in err

    def test_unreadable_config(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert run(capsys, "point", "--config", str(bad))[0] == 2

    def test_numerical_failure(self, capsys):
        code, _, err = run(capsys, "point", "--sigma", "0.3", "0.3", "0.3", "--order-per-axis", "4")
        assert code == 3
        assert "not converged" in err

    def test_regime_warning_keeps_exit_status(self, capsys):
        code, out, err = run(capsys, "point", "--sigma", "0.1", "0.1", "0.1")
        assert code == 0
        assert json.loads(out)["regime_warning"] is True
        assert "regime warning" in err

    def test_flags_override_config(self, capsys, tmp_path):
        _, out, _ = run(capsys, "point", "--config", write_config(tmp_path, **BASE), "--mass", "2.0", "--p0", "0", "0", "0.02")
        doc = json.loads(out)
        assert doc["moments"]["mean_p"][2] == pytest.approx(0.02, rel=1e-3)

    def test_out_file(self, capsys, tmp_path):
        target = tmp_path / "r.json"
        code, out, _ = run(capsys, "point", "--out", str(target))
        assert code == 0 and out == ""
        jsonschema.validate(json.loads(target.read_text()), REPORT_SCHEMA)


class TestSweep:
    SWEEP = '{"start": 0, "stop": 20, "count": 10, "spacing": "log"}'

    def test_log_sweep_to_ultrarelativistic(self, capsys):
        code, out, _ = run(capsys, "sweep", "--beta", self.SWEEP, "--output", "csv")
        assert code == 0
        rows = list(csv.DictReader(io.StringIO(out)))
        assert len(rows) == 10
        betas = [float(r["beta"]) for r in rows]
        assert betas[0] == 0 and betas[-1] == pytest.approx(20)
        purity = [float(r["purity_sq_exact"]) for r in rows]
        assert all(b <= a + 1e-15 for a, b in zip(purity, purity[1:]))
        # extreme limit 1 - (dPi)^2/m^2 with (dPi)^2 from the radial oracle
        assert 1 - purity[-1] == pytest.approx(9.999000599490546e-05, rel=2e-2)

    def test_minimal_sweep(self, capsys):
        _, out, _ = run(capsys, "sweep", "--beta", '{"start": 0.5, "stop": 1, "count": 2}', "--output", "csv")
        assert len(list(csv.DictReader(io.StringIO(out)))) == 2

    def test_csv_contract(self, capsys):
        _, out, _ = run(capsys, "sweep", "--beta", '{"start": 0, "stop": 2, "count": 3, "spacing": "linear"}', "--output", "csv")
        header = out.splitlines()[0]
        assert header == "beta,lambda,mu_x,mu_y,mu_z,mu_approx_z,purity_sq_exact,purity_sq_formula,purity_sq_bound,regime_warning"
        for row in csv.DictReader(io.StringIO(out)):
            assert set(row) == set(SWEEP_COLUMNS)
            assert row["regime_warning"] in ("true", "false")
            float(row["mu_z"])

    def test_json_sweep(self, capsys):
        _, out, _ = run(capsys, "sweep", "--beta", '{"start": 0, "stop": 2, "count": 3}')
        rows = json.loads(out)["rows"]
        assert [r["beta"] for r in rows] == [0, 1, 2]

    def test_point_beta_rejected(self, capsys):
        assert run(capsys, "sweep", "--beta", "1.0")[0] == 2

    def test_byte_identical(self, capsys):
        args = ("sweep", "--preset", "drift", "--beta", self.SWEEP, "--output", "csv", "--seed", "42")
        assert run(capsys, *args)[1] == run(capsys, *args)[1]

    def test_log_spacing(self):
        cfg = parse_config({**BASE, "beta": {"start": 0, "stop": 20, "count": 4, "spacing": "log"}})
        betas = cfg.betas()
        assert betas[0] == 0
        ratios = (1 + betas[1:]) / (1 + betas[:-1])
        assert ratios == pytest.approx(ratios[0])


class TestVerify:
    def test_default_passes(self, capsys):
        code, out, _ = run(capsys, "verify")
        doc = json.loads(out)
        assert code == 0 and doc["passed"]
        assert {c["status"] for c in doc["checks"]} <= {"pass", "skip"}

    def test_wide_packet_gating(self, capsys):
        _, out, _ = run(capsys, "verify", "--sigma", "0.5", "0.5", "0.5")
        checks = {c["name"]: c for c in json.loads(out)["checks"]}
        for name in ("depurification_law", "truncation_order", "quadrature_convergence", "monotone_in_boost"):
            assert checks[name]["status"] == "skip" and checks[name]["detail"]
        assert checks["physicality"]["status"] == "pass"
        assert checks["rest_frame_identity"]["status"] == "pass"

    def test_low_order_fails_cross_validation(self, capsys):
        code, out, _ = run(capsys, "verify", "--sigma", "0.3", "0.3", "0.3", "--order-per-axis", "4", "--output", "csv")
        assert code == 4
        rows = {r["name"]: r for r in csv.DictReader(io.StringIO(out))}
        assert rows["cross_validation"]["status"] == "fail"


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "wignerbloch.cli", "point", "--beta", "0", "--output", "csv"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("beta,lambda")


def test_presets_ship():
    for name in cli.PRESETS:
        cfg = parse_config(cli.load_preset(name))
        assert cfg.spec.nr_valid
