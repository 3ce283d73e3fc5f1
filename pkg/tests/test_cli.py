import json
import subprocess
import sys

import numpy as np
import pytest

from qngcert import cli
from qngcert.gaussian_boundary import dx_opt


def run(capsys, *args):
    code = cli.main([str(a) for a in args])
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *args):
    code, out, err = run(capsys, *args)
    assert code == 0, err
    return json.loads(out)


def write_spec(tmp_path, spec):
    path = tmp_path / "state.json"
    path.write_text(json.dumps(spec))
    return path


def test_boundary_csv(capsys):
    code, out, _ = run(capsys, "boundary", "--T", 0.5, "--v-points", 11)
    assert code == 0
    lines = [l for l in out.splitlines() if not l.startswith("#")]
    assert lines[0] == "V,p0,q0,lambda,W_G,Delta,Delta_approx"
    assert len(lines) == 12
    assert lines[-1].split(",")[:6] == ["1", "1", "1", "0.5", "0.5", "0"]


def test_boundary_json_to_file(capsys, tmp_path):
    out = tmp_path / "b.json"
    code, stdout, _ = run(capsys, "boundary", "--T", 0.25, "--json", "--out", out)
    assert code == 0 and stdout == ""
    d = json.loads(out.read_text())
    assert d["metadata"]["T"] == 0.25
    assert len(d["columns"]["V"]) == 200


def test_certify_noisy_single_photon_spec(capsys, tmp_path):
    path = write_spec(tmp_path, {"model": "noisy_single_photon", "eta": 0.5, "nbar": 0.0})
    d = run_json(capsys, "certify", "--state", path, "--T", 0.5)
    assert d["verdict"] == "certified"
    assert set(d["witness"]) == {"lambda", "V", "W", "W_G"}


def test_certify_boundary_state_spec(capsys, tmp_path):
    path = write_spec(tmp_path, {"model": "squeezed_coherent", "V": 0.8, "dx": dx_opt(0.8, 0.5), "dp": 0.0})
    d = run_json(capsys, "certify", "--state", path, "--T", 0.5)
    assert d["verdict"] == "not_certified"
    assert abs(d["margin"]) < 1e-10


def test_certify_vacuum_fock_mixture(capsys, tmp_path):
    path = write_spec(tmp_path, {"model": "fock_mixture", "probs": [1.0]})
    d = run_json(capsys, "certify", "--state", path, "--T", 0.3)
    assert d["verdict"] == "not_certified"


def test_certify_direct_pair_with_counts(capsys):
    d = run_json(capsys, "certify", "--p0", 0.5, "--q0", 0.75, "--T", 0.5, "--N", 1000, "--scheme", "double")
    assert d["verdict"] == "certified"
    assert d["significance"] > 0
    assert d["pair"] == {"p0": 0.5, "q0": 0.75, "T": 0.5}


def test_certify_from_flags(capsys):
    d = run_json(capsys, "certify", "--eta", 0.1, "--nbar", 1e-3, "--T", 0.5)
    assert d["verdict"] == "certified"


def test_exit_code_nonphysical(capsys, caplog):
    code, out, _ = run(capsys, "certify", "--p0", 0.5, "--q0", 0.9, "--T", 0.5)
    assert code == cli.EXIT_NONPHYSICAL == 3
    assert out == "" and "nonphysical" in caplog.text


def test_exit_code_not_certifiable(capsys):
    code, _, err = run(capsys, "plan", "--nbar", 0.1, "--T", 0.5)
    assert code == cli.EXIT_NOT_CERTIFIABLE == 4


@pytest.mark.parametrize("args", [
    ["certify", "--T", "0.5"],
    ["certify", "--T", "1.5", "--eta", "0.5"],
    ["certify", "--T", "0.5", "--p0", "0.5"],
    ["certify", "--T", "0.5", "--eta", "1.5"],
    ["certify", "--T", "0.5", "--state", "/nonexistent/file.json"],
    ["simulate", "--T", "0.5", "--eta", "0.5", "--N", "10", "--scheme", "single", "--K", "10"],
    ["figure", "fig9"],
])
def test_exit_code_invalid_input(capsys, args):
    with pytest.raises(SystemExit) as exc:
        code = cli.main(args)
        raise SystemExit(code)
    assert exc.value.code == cli.EXIT_INPUT == 2


def test_unknown_flag_is_an_error(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["boundary", "--T", "0.5", "--colour", "red"])
    assert exc.value.code == 2


def test_bad_state_spec(capsys, caplog, tmp_path):
    path = write_spec(tmp_path, {"model": "thermal", "nbar": 1})
    code, _, _ = run(capsys, "certify", "--state", path, "--T", 0.5)
    assert code == 2 and "unknown model" in caplog.text


def test_plan_output(capsys):
    d = run_json(capsys, "plan", "--eta", 0.1, "--nbar", 1e-3, "--T", 0.5, "--N", 1000)
    assert d["runs_double"] == int(np.ceil(d["N_D"]))
    assert d["runs_single"] == int(np.ceil(d["N_S"]))
    assert d["N_S"] > 2 * d["N_D"]
    assert 1 <= d["K_opt"] <= 999


@pytest.mark.parametrize("fig,column", [("fig2", "Delta"), ("fig3", "eta_th"), ("fig4", "R_DS_min"), ("fig5", "N_S")])
def test_figure_tables(capsys, fig, column):
    code, out, _ = run(capsys, "figure", fig, "--points", 8)
    assert code == 0
    header = [l for l in out.splitlines() if not l.startswith("#")][0].split(",")
    assert column in header
    assert "nan" not in out.lower() and "inf" not in out.lower()


def test_figure_fig5_T_sweep_json(capsys):
    d = run_json(capsys, "figure", "fig5", "--sweep", "T", "--eta", 0.2, "--nbar", 1e-3, "--points", 6, "--json")
    assert d["metadata"]["sweep"] == "T"
    assert set(d["columns"]["eta"]) == {0.2}


def test_simulate_vacuum(capsys, tmp_path):
    path = write_spec(tmp_path, {"model": "fock_mixture", "probs": [1.0]})
    for scheme in ("single", "double"):
        d = run_json(capsys, "simulate", "--state", path, "--T", 0.5, "--N", 1000, "--scheme", scheme)
        assert (d["estimate"]["p0"], d["estimate"]["q0"]) == (1.0, 1.0)
        assert d["certification"]["verdict"] == "not_certified"


def test_simulate_reports_tally_and_no_shard_count(capsys):
    d = run_json(capsys, "simulate", "--eta", 0.3, "--T", 0.4, "--N", 5000, "--seed", 3, "--shards", 2)
    assert set(d["tally"]) == {"n_none", "n_b_only", "n_a", "N", "seed"}
    assert "shards" not in json.dumps(d)


def test_simulate_detector_efficiencies_use_effective_T(capsys):
    d = run_json(capsys, "simulate", "--eta", 0.3, "--T", 0.5, "--eta-A", 0.5, "--eta-B", 1.0, "--N", 1000)
    assert d["estimate"]["T"] == pytest.approx(0.25 / 0.75)


def test_simulate_at_planned_runs_gives_about_one_sigma(capsys):
    plan = run_json(capsys, "plan", "--eta", 0.5, "--T", 0.5)
    N = plan["runs_double"]
    sig = []
    for seed in range(100):
        d = run_json(capsys, "simulate", "--eta", 0.5, "--T", 0.5, "--N", N, "--seed", seed)
        assert d["expected_significance"] == pytest.approx(1.0, abs=0.01)
        sig.append(d["certification"]["significance"])
    # mean of 100 roughly unit-variance draws
    assert 0.6 < np.mean(sig) < 1.35


def test_simulate_single_scheme_byte_identical(capsys):
    args = ["simulate", "--eta", "0.2", "--nbar", "1e-3", "--T", "0.5", "--N", "100000", "--scheme", "single", "--seed", "4"]
    _, a, _ = run(capsys, *args)
    _, b, _ = run(capsys, *args, "--shards", "4")
    assert a == b


def test_console_script_entry_point():
    res = subprocess.run([sys.executable, "-m", "qngcert.cli", "certify", "--p0", "0.5", "--q0", "0.75", "--T", "0.5"],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert json.loads(res.stdout)["verdict"] == "certified"
