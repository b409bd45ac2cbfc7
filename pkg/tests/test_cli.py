import json
import os

import pytest

from rdperiods import __version__, cli
from rdperiods.report import (CheckRecord, ConfigError, RunConfig, RunReport, VersionMismatch, atomic_write,
                              compare_reports, read_config_file)


def run_main(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr().out.strip().splitlines()
    return code, (json.loads(out[-1]) if out else None)


def load(path):
    return RunReport.from_json(json.loads(path.read_text()))


def test_dims_example(tmp_path, capsys):
    code, out = run_main(capsys, "dims", "--m1", "4", "--m2", "6", "--stratum", "crossing", "--output", str(tmp_path))
    assert code == 0
    assert out == {"dims_rd": {"2": 2, "3": 2}, "dims_dr": {"0": 2, "1": 2}, "duality": True}
    report = json.loads((tmp_path / "dims.json").read_text())
    assert report["seed"] == 0 and report["verdict"] == "pass" and report["version"] == __version__
    for rec in report["records"]:
        assert {"name", "inputs", "expected", "source", "computed", "passed", "runtime"} <= set(rec)


def test_truncdim_example(tmp_path, capsys):
    code, out = run_main(capsys, "truncdim", "--op", "D", "--m1", "2", "--m2", "3", "--T0", "16",
                         "--output", str(tmp_path))
    assert code == 0 and out == {"kernel_dim": 1, "stabilized": True}


def test_truncdim_dump(tmp_path, capsys):
    dump = tmp_path / "D.txt"
    code, _ = run_main(capsys, "truncdim", "--op", "rho", "--m", "2", "--dump-matrix", str(dump),
                       "--output", str(tmp_path))
    assert code == 0 and dump.read_text().startswith("# rho_onevar(2,0)")


@pytest.mark.parametrize("argv", [
    ["truncdim", "--op", "D", "--m1", "2", "--m2", "3", "--T0", "3"],
    ["dims", "--m1", "0", "--m2", "0"],
    ["truncdim", "--op", "nope"],
    ["chg-verify", "--a=1", "--b=1", "--strict-generic", "true"],
    ["chg-periods", "--tol", "-1"],
])
def test_config_errors_exit_2(tmp_path, capsys, argv):
    code, _ = run_main(capsys, *argv, "--output", str(tmp_path))
    assert code == 2


def test_check_failure_exit_1(tmp_path, capsys):
    code, _ = run_main(capsys, "gm-check", "--gm-tol", "1e-12", "--precision", "15", "--tol", "1e-9",
                       "--output", str(tmp_path))
    assert code == 1
    assert json.loads((tmp_path / "gm-check.json").read_text())["verdict"] == "fail"


def test_nonconvergence_exit_3(tmp_path, capsys):
    code, out = run_main(capsys, "chg-periods", "--max-level", "1", "--oracle", "false",
                         "--output", str(tmp_path))
    assert code == 3 and out["error"] == "NoConvergence"


def test_chg_periods_writes_csv(tmp_path, capsys):
    code, out = run_main(capsys, "chg-periods", "--points=-1,-2", "--precision", "15", "--tol", "1e-9",
                         "--output", str(tmp_path))
    assert code == 0
    assert out["periods"][0]["oracle_rel_diff"] <= 1e-8
    lines = (tmp_path / "periods.csv").read_text().splitlines()
    assert len(lines) == 2 and lines[0].startswith("a,b,c,alpha")


def test_config_file_and_flag_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# dims run\nm1 = 2\nm2 = 4  # inline\nseed = 11\n")
    conf = cli.resolve_config(["dims", "--config", str(cfg), "--m2", "6"])
    assert conf.options["m1"] == 2 and conf.options["m2"] == 6 and conf.seed == 11
    assert read_config_file(str(cfg))["m2"] == "4"
    with pytest.raises(ConfigError):
        cfg.write_text("bogus = 1\n")
        cli.resolve_config(["dims", "--config", str(cfg)])


def test_env_output_dir(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("RDPERIODS_OUTPUT_DIR", str(tmp_path / "env"))
    code, _ = run_main(capsys, "dims", "--m1", "1", "--m2", "1")
    assert code == 0 and (tmp_path / "env" / "dims.json").exists()


def test_atomic_write_leaves_no_temp(tmp_path):
    target = tmp_path / "sub" / "x.json"
    atomic_write(target, "one")
    atomic_write(target, "two")
    assert target.read_text() == "two"
    assert os.listdir(target.parent) == ["x.json"]


def test_run_config_validation():
    with pytest.raises(ConfigError):
        RunConfig("nope")
    with pytest.raises(ConfigError):
        RunConfig("gm-check", {"step": 0.0})


def test_report_roundtrip(tmp_path, capsys):
    run_main(capsys, "homology", "--model", "torus", "--output", str(tmp_path))
    report = load(tmp_path / "homology.json")
    again = RunReport.from_json(json.loads(json.dumps(report.to_json())))
    assert compare_reports(report, again) == []


def test_identical_seeds_reproduce(tmp_path, capsys):
    for d in ("a", "b"):
        run_main(capsys, "chg-verify", "--seed", "3", "--output", str(tmp_path / d))
    assert compare_reports(load(tmp_path / "a" / "chg-verify.json"), load(tmp_path / "b" / "chg-verify.json")) == []


def test_exact_checks_are_seed_independent(tmp_path, capsys):
    for d, seed in (("a", "1"), ("b", "2")):
        run_main(capsys, "truncdim", "--op", "E_on_P", "--m1", "2", "--m2", "3", "--cokernel", "true",
                 "--seed", seed, "--output", str(tmp_path / d))
        run_main(capsys, "dims", "--m1", "3", "--m2", "6", "--seed", seed, "--output", str(tmp_path / d))
    for name in ("truncdim.json", "dims.json"):
        assert compare_reports(load(tmp_path / "a" / name), load(tmp_path / "b" / name)) == []


def test_tolerance_change_only_moves_error_fields(tmp_path, capsys):
    for d, tol in (("a", "1e-6"), ("b", "1e-12")):
        run_main(capsys, "chg-periods", "--points=-1,-2;-2,-1", "--tol", tol,
                 "--oracle", "false", "--output", str(tmp_path / d))
    diff = compare_reports(load(tmp_path / "a" / "chg-periods.json"), load(tmp_path / "b" / "chg-periods.json"))
    assert diff
    assert all("err" in d["path"] for d in diff)


def test_version_mismatch():
    r1 = RunReport({"command": "dims"}, [CheckRecord("x", {}, 1, "formula", 1, True)])
    r2 = RunReport({"command": "dims"}, [CheckRecord("x", {}, 1, "formula", 1, True)], version="0.0.0")
    with pytest.raises(VersionMismatch):
        compare_reports(r1, r2)
    r3 = RunReport({"command": "dims"}, [CheckRecord("x", {}, 1, "formula", 2, True)])
    assert compare_reports(r1, r3) == [{"check": "x", "path": "", "a": 1, "b": 2}]


def test_full_suite(tmp_path, capsys):
    code, out = run_main(capsys, "full-suite", "--seed", "7", "--output", str(tmp_path))
    assert code == 0
    assert sorted(out["criteria"], key=int) == [str(n) for n in range(1, 9)]
    assert all(line.startswith("[PASS]") for line in out["criteria"].values())
