import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from gmtransform.cli import main
from gmtransform.mtransform import MParams, m_transform
from gmtransform.pde import HeatProblem, build_heat_series, solve_heat_series
from gmtransform.funcdsl import to_handle
from oracles import E2_E1_2


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_laplace_of_one(capsys):
    code, out, _ = run(capsys, "transform", "--kind", "laplace", "-f", "1", "--u", "4")
    assert code == 0
    assert json.loads(out)["value_re"] == pytest.approx(0.25, abs=1e-13)


def test_m_transform_value(capsys):
    code, out, _ = run(capsys, "transform", "-f", "exp(-x)", "--rho", "1", "--m", "1",
                       "--u", "1", "--v", "0", "--omega", "1")
    assert code == 0
    rec = json.loads(out)
    assert rec["value_re"] == pytest.approx(E2_E1_2, rel=1e-12)
    # thin shell: identical to the library call
    lib = m_transform(to_handle("exp(-x)"), MParams(rho=1, m=1, u=1, v=0, omega=1))
    assert rec["value_re"] == complex(lib.value).real


def test_complex_flag(capsys):
    code, out, _ = run(capsys, "transform", "--kind", "laplace", "-f", "1", "--u", "1,1")
    rec = json.loads(out)
    assert code == 0
    assert complex(rec["value_re"], rec["value_im"]) == pytest.approx(1 / (1 + 1j), abs=1e-12)


def test_csv_format(capsys):
    code, out, _ = run(capsys, "transform", "--kind", "sumudu", "-f", "x", "--omega", "2.5",
                       "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and float(rows[0]["value_re"]) == pytest.approx(2.5)


@pytest.mark.parametrize("argv, code", [
    (["transform", "-f", "exp(-x)"], 2),                      # missing --u
    (["transform", "-f", "2+*3", "--u", "1"], 2),             # parse error
    (["transform", "-f", "1", "--u", "1", "--omega", "-1"], 3),
    (["transform", "-f", "exp(x)", "--kind", "laplace", "--u", "0.5"], 4),
    (["verify", "--only", "nonsense"], 2),
    (["frobnicate"], 2),
])
def test_exit_codes(capsys, argv, code):
    assert run(capsys, *argv)[0] == code


def test_verify_subset(capsys, tmp_path):
    out_file = tmp_path / "r.json"
    code, _, err = run(capsys, "verify", "--only", "scaling", "-o", str(out_file))
    assert code == 0
    recs = json.loads(out_file.read_text())
    assert recs and all(r["pass"] for r in recs)
    assert set(recs[0]) == {"identity_id", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "abs_residual",
                            "rel_residual", "tol", "pass", "n_evals_total"}
    assert "identities passed" in err


def test_verify_impossible_tolerance(capsys):
    code, _, _ = run(capsys, "verify", "--only", "scaling", "--tol", "1e-20")
    assert code == 1


def test_invert(capsys):
    code, out, _ = run(capsys, "invert", "--image", "1/(x+1)", "--t", "1", "--check")
    rec = json.loads(out)
    assert code == 0
    assert rec["value_re"] == pytest.approx(math.exp(-1), abs=1e-8)
    assert rec["rel_diff"] < 1e-4


def test_invert_m(capsys):
    # image of f = 1 with rho = 0, v = 0, w = 1 is 1/u
    code, out, _ = run(capsys, "invert", "--kind", "m", "--image", "1/x", "--x", "1.5")
    assert code == 0
    assert json.loads(out)["value_re"] == pytest.approx(1.0, abs=1e-8)


def test_transport_zero(capsys):
    code, out, _ = run(capsys, "solve-transport")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 16
    assert all(float(r["re(w)"]) == 0 and float(r["im(w)"]) == 0 for r in rows)


def test_transport_with_oracle(capsys):
    code, out, err = run(capsys, "solve-transport", "--r-time", "exp(-x)", "--rho", "1",
                         "--v", "0.5", "--t-grid", "0.5,1.5", "--x-grid", "1.0", "--with-oracle")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert all(float(r["abs_diff"]) < 1e-3 for r in rows)
    assert "max |transform - oracle|" in err


def test_heat_special(capsys):
    code, out, _ = run(capsys, "solve-heat", "--r-space", "sin(3*x)", "--r-time", "exp(-x)",
                       "--rho", "1", "--v", "0.25")
    assert code == 0
    prob = HeatProblem(r=lambda x, t: np.exp(-t) * np.sin(3 * x), rho=1, m=1, v=0.25)
    sol = build_heat_series(prob)
    for r in csv.DictReader(io.StringIO(out)):
        want = solve_heat_series(prob, float(r["x"]), float(r["t"]), solution=sol)
        assert float(r["re(w)"]) == pytest.approx(want, abs=1e-15)


def test_heat_zero_and_oracle(capsys):
    code, out, err = run(capsys, "solve-heat", "--with-oracle", "--nx", "60", "--nt", "60")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 25 and all(float(r["re(w)"]) == 0 for r in rows)
    assert "max |series - oracle|" in err


def test_heat_bad_initial_profile(capsys):
    assert run(capsys, "solve-heat", "--f-init", "cos(x)")[0] == 3


def test_config_file(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"kind": "laplace", "u": 4}))
    code, out, _ = run(capsys, "--config", str(cfg), "transform", "-f", "1")
    assert code == 0 and json.loads(out)["value_re"] == pytest.approx(0.25)


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "gmtransform.cli", "transform", "--kind", "laplace",
                          "-f", "1", "--u", "2"], capture_output=True, text=True)
    assert res.returncode == 0
    assert json.loads(res.stdout)["value_re"] == pytest.approx(0.5)
