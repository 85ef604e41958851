import io
import math

import pytest

from pamstat.cli import EXIT_DOMAIN, EXIT_IO, EXIT_OK, UsageError, main, parse_command, run
from pamstat.datasets import read_sweep_csv

FESTO_CONFIG = """\
# rational model of the test muscle
model = festo
r0_cm = 1.09
l0_cm = 40
alpha0_deg = 25.5
c_bar = 0
d_bar = -10.5
e_bar2 = -779
R_cm = 2
eps_threshold = 0.025
p_min_bar = 0
p_max_bar = 5
"""


@pytest.fixture
def festo_toml(tmp_path):
    path = tmp_path / "festo.toml"
    path.write_text(FESTO_CONFIG)
    return str(path)


def _run(argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(parse_command(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def _value(text, name):
    for line in text.splitlines():
        if line.startswith(name + " ="):
            return float(line.split("=")[1].split()[0])
    raise AssertionError(f"{name} not in output:\n{text}")


def test_parse_roots():
    plan = parse_command(["roots", "--a2", "-6", "--a1", "11", "--a0", "-6"])
    assert plan.command == "roots"
    assert (plan.params["a2"], plan.params["a1"], plan.params["a0"]) == (-6.0, 11.0, -6.0)


def test_parse_sweep_plan(festo_toml, tmp_path):
    argv = ["sweep", "--model", "festo", "--k-min", "6", "--k-max", "9", "--k-step", "1",
            "--theta-max-deg", "125", "--theta-step-deg", "5", "--config", festo_toml, "--out", str(tmp_path / "f.csv")]
    plan = parse_command(argv)
    assert plan.params["theta_min_deg"] == -125.0
    assert plan.settings["d_bar"] == -10.5
    assert plan.out_path.endswith("f.csv")


@pytest.mark.parametrize(
    "argv,match",
    [
        (["bogus"], "invalid choice"),
        (["roots", "--a2", "1"], "required"),
        (["force", "--model", "mckibben", "--eps", "0.1", "--r0-mm", "10"], "unit-suffix mismatch"),
        (["fit-rational", "--anchor", "3:0.2"], "exactly two"),
        (["fit-rational", "--anchor", "3-0.2", "--anchor", "5:0.3"], "anchor"),
        (["actuator-direct", "--model", "festo", "--theta-deg", "0", "--p1-bar", "3"], "--p2-bar"),
    ],
)
def test_usage_errors(argv, match):
    with pytest.raises(UsageError, match=match):
        parse_command(argv)


def test_missing_config_file_is_usage_error(tmp_path):
    with pytest.raises(UsageError, match="cannot read config"):
        parse_command(["force", "--model", "festo", "--eps", "0", "--config", str(tmp_path / "nope.toml")])


def test_main_exit_code_for_usage(capsys):
    assert main(["roots"]) == EXIT_IO
    assert "usage error" in capsys.readouterr().err


def test_roots_output():
    code, out, _ = _run(["roots", "--a2", "-6", "--a1", "11", "--a0", "-6"])
    assert code == EXIT_OK
    assert [_value(out, f"x{i}") for i in (1, 2, 3)] == pytest.approx([1, 2, 3])


def test_fit_rational_prints_reference_values(festo_toml):
    code, out, _ = _run(["fit-rational", "--anchor", "3:0.225", "--anchor", "5:0.275", "--c", "0", "--config", festo_toml])
    assert code == EXIT_OK
    assert _value(out, "d") == pytest.approx(-10.5, abs=0.01)
    assert _value(out, "e") == pytest.approx(-779, abs=1)


def test_fit_polynomial_warns_on_stderr():
    argv = ["fit-polynomial"] + sum((["--anchor", a] for a in ("1:0.05", "2:0.15", "3:0.225", "4:0.26", "5:0.275")), [])
    code, out, err = _run(argv)
    assert code == EXIT_OK
    assert "wanders" in err and "wanders" not in out


def test_inverse_feasible_and_infeasible(festo_toml):
    code, out, _ = _run(["actuator-inverse", "--model", "festo", "--theta-deg", "0", "--k", "8", "--config", festo_toml])
    assert code == EXIT_OK
    assert _value(out, "P1") == pytest.approx(3.23, abs=0.01)
    code, _, err = _run(["actuator-inverse", "--model", "festo", "--theta-deg", "0", "--k", "12"])
    assert code == EXIT_DOMAIN
    assert "infeasible" in err


def test_force_domain_error_names_eps_max():
    code, out, err = _run(["force", "--model", "mckibben", "--eps", "0.5"])
    assert code == EXIT_DOMAIN
    assert "0.37" in err and out == ""


def test_force_and_stiffness_values():
    code, out, _ = _run(["force", "--model", "mckibben", "--eps", "0", "--p-bar", "5"])
    assert _value(out, "F") == pytest.approx(1504.6, abs=0.1)
    code, out, _ = _run(["stiffness", "--model", "festo", "--eps", "0.1", "--p-bar", "3"])
    assert _value(out, "K_M") == pytest.approx(9692, abs=1)
    code, out, _ = _run(["force", "--model", "hogan", "--eps", "0.185", "--u", "0.5", "--f-max-N", "1500"])
    assert _value(out, "F") == pytest.approx(375.0)


def test_actuator_direct_hogan_and_festo(festo_toml):
    code, out, _ = _run(["actuator-direct", "--model", "hogan", "--theta-deg", "0", "--u1", "0.5", "--u2", "0.5"])
    assert code == EXIT_OK and _value(out, "K") == pytest.approx(4.054, abs=1e-3)
    code, out, _ = _run(["actuator-direct", "--model", "festo", "--theta-deg", "0", "--p1-bar", "5", "--p2-bar", "5",
                         "--config", festo_toml])
    assert _value(out, "K") == pytest.approx(10.57, abs=0.01)
    assert _value(out, "theta_equ") == 0.0


def test_sweep_file_is_deterministic(festo_toml, tmp_path):
    paths = [tmp_path / f"sweep_{i}.csv" for i in range(2)]
    for p in paths:
        argv = ["sweep", "--model", "festo", "--k-min", "6", "--k-max", "9", "--k-step", "1", "--theta-max-deg", "125",
                "--theta-step-deg", "5", "--config", festo_toml, "--out", str(p)]
        code, out, err = _run(argv)
        assert code == EXIT_OK and out == ""
        assert "grid points" in err
    assert paths[0].read_bytes() == paths[1].read_bytes()
    rows = read_sweep_csv(paths[0])
    assert len(rows) == 4 * 51
    assert all(0 <= r["p1_bar"] <= 5 and 0 <= r["p2_bar"] <= 5 for r in rows if r["feasible"])


def test_sweep_to_stdout():
    code, out, _ = _run(["sweep", "--model", "mckibben", "--k-min", "1", "--k-max", "2", "--k-step", "1",
                         "--theta-max-deg", "10", "--theta-step-deg", "10"])
    assert code == EXIT_OK
    assert out.splitlines()[0].startswith("stiffness_Nm_per_rad,theta_deg")
    assert len(out.splitlines()) == 1 + 2 * 3


def test_residuals_command(tmp_path):
    data = tmp_path / "curve.csv"
    data.write_text("pressure_bar,contraction_ratio,force_N\n5,0,1504.59535\n5,0.5,0\n")
    code, out, err = _run(["residuals", "--model", "mckibben", "--data", str(data)])
    assert code == EXIT_OK
    assert _value(out, "evaluated") == 1
    assert _value(out, "rmse") == pytest.approx(0.0, abs=1e-4)
    assert "out_of_domain_rows = 3" in out
    assert "outside the model domain" in err


def test_residuals_bad_dataset_exit_1(tmp_path):
    data = tmp_path / "bad.csv"
    data.write_text("P,eps,F\n")
    code, _, err = _run(["residuals", "--model", "mckibben", "--data", str(data)])
    assert code == EXIT_IO and "pressure_bar" in err
    code, _, _ = _run(["residuals", "--model", "mckibben", "--data", str(tmp_path / "missing.csv")])
    assert code == EXIT_IO


def test_config_model_mismatch_noted(festo_toml):
    code, out, err = _run(["force", "--model", "mckibben", "--eps", "0", "--config", festo_toml])
    assert code == EXIT_OK
    assert "evaluating as 'mckibben'" in err


def test_fit_rational_takes_c_from_config(festo_toml):
    code, out, _ = _run(["fit-rational", "--anchor", "3:0.225", "--anchor", "5:0.275", "--c-bar", "2"])
    assert _value(out, "c") == 2.0
    code, out, _ = _run(["fit-rational", "--anchor", "3:0.225", "--anchor", "5:0.275", "--c-bar", "2", "--c", "0"])
    assert _value(out, "c") == 0.0
