"""End-to-end checks of the linhyp command-line interface."""

import json

import pytest

from linhyp.cli import main
from linhyp.verify import enumerable_grid


def run_cli(capsys, *argv):
    rc = main(list(argv))
    captured = capsys.readouterr()
    return rc, captured.out, captured.err


def test_census_json_pins(capsys):
    rc, out, err = run_cli(capsys, "census", "--parts", "2,2,2", "--r", "3", "--m", "2")
    assert rc == 0 and err == ""
    payload = json.loads(out)
    assert payload["total"] == "28"
    assert payload["linear"] == "16"
    assert payload["by_cluster"] == {"0": "16", "1": "12"}
    assert payload["not_plus"] == "0"
    assert payload["parts"] == [2, 2, 2]
    assert (payload["r"], payload["m"]) == (3, 2)


def test_repeat_runs_byte_identical(capsys):
    argv = ("sample", "--uniform-n", "6", "--r", "3", "--m", "2", "--trials", "8192", "--seed", "7")
    first = run_cli(capsys, *argv)
    second = run_cli(capsys, *argv)
    assert first == second
    assert first[0] == 0


def test_sample_thread_count_does_not_change_output(capsys):
    base = ("sample", "--parts", "2,2,2", "--r", "3", "--m", "2", "--trials", "8192")
    _, out1, _ = run_cli(capsys, *base, "--threads", "1")
    _, out3, _ = run_cli(capsys, *base, "--threads", "3")
    assert out1 == out3
    payload = json.loads(out1)
    assert payload["trials"] == "8192"
    assert int(payload["hits"]) > 0


def test_workers_env_fallback(capsys, monkeypatch):
    base = ("sample", "--parts", "2,2,2", "--r", "3", "--m", "2", "--trials", "4096")
    _, expect, _ = run_cli(capsys, *base)
    monkeypatch.setenv("LINHYP_WORKERS", "3")
    rc, out, _ = run_cli(capsys, *base)
    assert rc == 0 and out == expect
    monkeypatch.setenv("LINHYP_WORKERS", "zero")
    rc, _, err = run_cli(capsys, *base)
    assert rc == 2 and "LINHYP_WORKERS" in err
    monkeypatch.delenv("LINHYP_WORKERS")
    rc, _, err = run_cli(capsys, *base, "--threads", "0")
    assert rc == 2


def test_estimate_uniform_decimal(capsys):
    rc, out, err = run_cli(
        capsys, "estimate", "--uniform-n", "20", "--r", "3", "--m", "1", "--variant", "uniform"
    )
    assert rc == 0 and err == ""
    payload = json.loads(out)
    assert payload["value_decimal"] == "1.140000000e+3"
    assert payload["correction"] == 0.0
    assert payload["variant"] == "uniform"


def test_estimate_partite_correction_field(capsys):
    rc, out, _ = run_cli(capsys, "estimate", "--parts", "2,2,2", "--r", "3", "--m", "2")
    assert rc == 0
    payload = json.loads(out)
    assert payload["correction_exact"] == "-27/4"
    assert payload["variant"] == "partite"


def test_estimate_dense_warning_goes_to_stderr(capsys):
    rc, out, err = run_cli(capsys, "estimate", "--parts", "2,2,2", "--r", "3", "--m", "6")
    assert rc == 0
    assert "warning" in err
    json.loads(out)
    rc, _, err = run_cli(capsys, "estimate", "--parts", "2,2,2", "--r", "3", "--m", "2")
    assert rc == 0 and err == ""


def test_estimate_refined_needs_uniform_n(capsys):
    rc, _, err = run_cli(
        capsys, "estimate", "--parts", "2,2,2", "--r", "3", "--m", "2", "--variant", "refined"
    )
    assert rc == 2 and "uniform-n" in err


def test_census_grid_csv(capsys):
    rc, out, err = run_cli(capsys, "census", "--grid")
    assert rc == 0 and err == ""
    lines = out.splitlines()
    assert lines[0] == "parts,r,m,n,total,linear,not_plus,cluster_cap,strata"
    assert len(lines) == 1 + len(enumerable_grid())
    pinned = [row for row in lines if row.startswith("2+2+2,3,2,")]
    assert len(pinned) == 1
    fields = pinned[0].split(",")
    assert fields[3:7] == ["6", "28", "16", "0"]
    assert fields[8] == "0:16|1:12"


def test_census_without_grid_needs_r_and_m(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["census", "--parts", "2,2,2"])
    assert exc.value.code == 2


def test_exit_code_on_domain_error(capsys):
    rc, _, err = run_cli(capsys, "census", "--parts", "2,2,2", "--r", "5", "--m", "1")
    assert rc == 2 and err.startswith("error:")
    rc, _, err = run_cli(capsys, "census", "--parts", "2,x", "--r", "3", "--m", "1")
    assert rc == 2 and "--parts" in err


def test_exit_code_on_work_ceiling(capsys):
    rc, _, err = run_cli(capsys, "census", "--uniform-n", "20", "--r", "3", "--m", "10")
    assert rc == 3 and "ceiling" in err
    rc, out, _ = run_cli(
        capsys, "audit-switchings", "--uniform-n", "20", "--r", "3", "--m", "10"
    )
    assert rc == 3


def test_audit_cli_smoke(capsys):
    rc, out, _ = run_cli(capsys, "audit-switchings", "--parts", "2,2,2", "--r", "3", "--m", "2")
    assert rc == 0
    payload = json.loads(out)
    assert payload["all_matched"] is True
    rec = payload["records"][0]
    assert rec["sum_forward"] == "384"
    assert rec["sum_reverse"] == "384"
    assert rec["matched"] is True


def test_series_cli_smoke(capsys):
    rc, out, _ = run_cli(
        capsys, "series-bounds", "--parts", "2,2,2", "--r", "3", "--m", "2", "--with-census"
    )
    assert rc == 0
    payload = json.loads(out)
    assert payload["a_value"] == 6.75
    assert payload["exact_sum"] == "7/4"
    assert payload["model_sum"] == pytest.approx(7.75)
    assert payload["applicability"]


def test_verify_cli_run(capsys):
    # default trial count: fewer samples make rare strata trip the 4-sigma
    # window on a single lucky hit, which the suite rightly reports
    rc = main(["verify", "--threads", "2"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "all checks passed" in out
    assert "FAIL" not in out
