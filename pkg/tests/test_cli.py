"""End-to-end command-line behavior, exit codes, output formats."""

import json

import numpy as np
import pytest

from lossspec.cli import main, parse_data
from lossspec.dgp import DGPSpec, gen_sample
from lossspec.harness import load_report
from lossspec.kernels import kernel_constants, parse_kernel
from lossspec.stats import ols_fit


@pytest.fixture()
def data_csv(tmp_path):
    path = tmp_path / "data.csv"
    rc = main(["gen", "--dgp", "p1", "--theta", "0.4", "--n", "80", "--seed", "5", "--out", str(path)])
    assert rc == 0
    return path


def test_gen_round_trips_bitwise(tmp_path, data_csv):
    sample = gen_sample(DGPSpec(model="p1", n=80, seed=5, theta=0.4))
    parsed = parse_data(str(data_csv))
    np.testing.assert_array_equal(parsed.y, sample.y)
    np.testing.assert_array_equal(parsed.x, sample.x)


def test_gen_writes_header_and_stdout(capsys):
    rc = main(["gen", "--dgp", "s_null", "--n", "6", "--seed", "1"])
    assert rc == 0
    out = capsys.readouterr().out
    lines = out.strip().splitlines()
    assert lines[0] == "y,x1"
    assert len(lines) == 7


def test_test_bootstrap_text_runs_and_is_deterministic(data_csv, capsys):
    argv = [
        "test",
        "--data", str(data_csv),
        "--kernel", "uniform",
        "--bandwidth", "rot:2/9",
        "--methods", "loss_q,loss_q0,glr",
        "--loss", "linex:0.5,1",
        "--bootstrap", "49",
        "--seed", "9",
    ]
    assert main(argv) == 0
    first = capsys.readouterr().out
    assert main(argv) == 0
    second = capsys.readouterr().out
    assert first == second
    assert "loss_q[linex:0.5,1]" in first
    assert "p* = " in first
    assert "glr:" in first


def test_test_json_schema(data_csv, capsys):
    argv = [
        "test",
        "--data", str(data_csv),
        "--calibration", "asymptotic",
        "--methods", "loss_q,glr",
        "--format", "json",
    ]
    assert main(argv) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["schema_version"] == 1
    assert doc["command"] == "test"
    assert doc["n"] == 80 and doc["p"] == 1
    methods = [r["method"] for r in doc["results"]]
    assert methods == ["loss_q", "glr"]
    for r in doc["results"]:
        assert 0.0 <= r["p_value"] <= 1.0
        assert "centering" in r and "scaling" in r and "z" in r


def test_residual_injection_matches_data_path(tmp_path, data_csv, capsys):
    sample = parse_data(str(data_csv))
    null = ols_fit(sample)
    res_path = tmp_path / "resid.csv"
    lines = ["resid,x1"] + [
        f"{float(r)!r},{float(x)!r}" for r, x in zip(null.residuals, sample.x[:, 0])
    ]
    res_path.write_text("\n".join(lines) + "\n")

    base_argv = ["--calibration", "asymptotic", "--methods", "loss_q,glr", "--format", "json"]
    assert main(["test", "--data", str(data_csv)] + base_argv) == 0
    via_data = json.loads(capsys.readouterr().out)
    assert main(["test", "--residuals", str(res_path)] + base_argv) == 0
    via_resid = json.loads(capsys.readouterr().out)
    for a, b in zip(via_data["results"], via_resid["results"]):
        assert a["p_value"] == b["p_value"]
        assert a["statistic"] == b["statistic"]


def test_residuals_refuse_bootstrap(tmp_path, capsys):
    path = tmp_path / "resid.csv"
    path.write_text("resid,x1\n" + "\n".join(f"{v}.0,{v}.5" for v in range(10)) + "\n")
    rc = main(["test", "--residuals", str(path)])
    assert rc == 2
    assert "asymptotic" in capsys.readouterr().err


def test_missing_file_is_exit_2(capsys):
    assert main(["test", "--data", "/no/such/file.csv"]) == 2


def test_bad_cell_names_row_and_column(tmp_path, capsys):
    path = tmp_path / "bad.csv"
    path.write_text("y,x1\n1.0,2.0\nabc,3.0\n")
    assert main(["test", "--data", str(path)]) == 2
    err = capsys.readouterr().err
    assert "line 3" in err and "column y" in err and "'abc'" in err


def test_ragged_row_rejected(tmp_path, capsys):
    path = tmp_path / "ragged.csv"
    path.write_text("y,x1\n1.0,2.0\n3.0\n")
    assert main(["test", "--data", str(path)]) == 2
    assert "line 3" in capsys.readouterr().err


def test_too_many_regressors_cites_limit(tmp_path, capsys):
    path = tmp_path / "wide.csv"
    path.write_text("y,x1,x2,x3,x4\n" + "1,1,1,1,1\n" * 10)
    assert main(["test", "--data", str(path)]) == 2
    assert "p < 4" in capsys.readouterr().err


def test_nonfinite_cell_rejected(tmp_path, capsys):
    path = tmp_path / "inf.csv"
    path.write_text("y,x1\n1.0,2.0\ninf,3.0\n")
    assert main(["test", "--data", str(path)]) == 2
    assert "non-finite" in capsys.readouterr().err


def test_degenerate_data_is_exit_3(tmp_path, capsys):
    path = tmp_path / "flat.csv"
    path.write_text("y,x1\n" + "".join(f"{i}.0,{i}.0\n" for i in range(12)))
    rc = main(["test", "--data", str(path), "--calibration", "asymptotic"])
    assert rc == 3


def test_f_method_needs_bootstrap(data_csv, capsys):
    rc = main(["test", "--data", str(data_csv), "--methods", "f", "--calibration", "asymptotic"])
    assert rc == 2
    assert "bootstrap" in capsys.readouterr().err


def test_constants_json_matches_library(capsys):
    assert main(["constants", "--kernel", "biweight", "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    k = kernel_constants(parse_kernel("biweight"))
    assert doc["a"] == k.a and doc["b"] == k.b
    assert doc["c"] == k.c and doc["d"] == k.d and doc["t"] == k.t
    assert doc["p"] == 1


def test_are_accepts_fractions(capsys):
    assert main(["are", "--kernel", "uniform", "--omega", "2/9", "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["omega"] == pytest.approx(2.0 / 9.0)
    assert doc["are"] == pytest.approx(1.6743307558321165, rel=1e-9)
    assert doc["convention"] == "eq52"


def test_are_table_flags_convention_in_both_formats(capsys):
    assert main(["are-table"]) == 0
    text = capsys.readouterr().out
    assert "eq52" in text and "table1" in text
    assert "discrepancy" in text
    assert main(["are-table", "--format", "csv"]) == 0
    csv_text = capsys.readouterr().out
    assert csv_text.startswith("#")
    assert "discrepancy" in csv_text
    assert "reference[omega=1/5]" in csv_text


def test_mc_config_file_writes_loadable_report(tmp_path, capsys):
    config = tmp_path / "grid.cfg"
    config.write_text(
        "models = s_null\n"
        "tests = loss_q; glr\n"
        "reps = 6\n"
        "seed = 3\n"
        "ns = 40\n"
        "calibration = bootstrap:19\n"
    )
    out = tmp_path / "report.json"
    rc = main(["mc", "--config", str(config), "--out", str(out)])
    assert rc == 0
    table = capsys.readouterr().out
    assert table.startswith("model,theta,dist,n,test,level_pct")
    report = load_report(out)
    assert report.reps == 6


def test_mc_preset_smoke(tmp_path):
    out = tmp_path / "t4.json"
    rc = main(["mc", "table4", "--reps", "2", "--n", "40", "--b", "9", "--seed", "2", "--out", str(out)])
    assert rc == 0
    report = load_report(out)
    assert {c.theta for c in report.cells} == {0.1, 0.2, 0.3, 0.5, 1.0}


def test_mc_requires_exactly_one_source(tmp_path, capsys):
    assert main(["mc"]) == 2
    config = tmp_path / "c.cfg"
    config.write_text("models = s_null\ntests = glr\nreps = 2\nseed = 1\n")
    assert main(["mc", "table2", "--config", str(config)]) == 2


def test_mc_preset_knobs_rejected_with_config(tmp_path, capsys):
    config = tmp_path / "c.cfg"
    config.write_text("models = s_null\ntests = glr\nreps = 2\nseed = 1\n")
    # silently ignoring an explicit flag would misreport what ran
    assert main(["mc", "--config", str(config), "--reps", "25"]) == 2
    assert "presets only" in capsys.readouterr().err


def _help_text(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        main(argv + ["--help"])
    assert exc.value.code == 0
    return capsys.readouterr().out


def test_help_documents_every_grammar_token(capsys):
    top = _help_text([], capsys)
    for token in ("test", "gen", "mc", "are", "constants"):
        assert token in top
    test_help = _help_text(["test"], capsys)
    for token in (
        "fixed:<h>",
        "rot:<omega>",
        "cv:<c1>,<c2>,<grid>",
        "rot:2/9",
        "quadratic",
        "tq:<c>",
        "linex:<alpha>,<beta>",
        "uniform",
        "epanechnikov",
        "biweight",
        "triweight",
        "loss_q0",
        "glr",
        "resid,x1",
    ):
        assert token in test_help, token
    mc_help = _help_text(["mc"], capsys)
    for preset in ("table2", "table3", "table4", "table5", "table6"):
        assert preset in mc_help
    gen_help = _help_text(["gen"], capsys)
    for token in ("s_null", "p1", "p2", "p3", "local"):
        assert token in gen_help


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert "lossspec" in capsys.readouterr().out


def test_output_file_instead_of_stdout(tmp_path, data_csv, capsys):
    out = tmp_path / "result.json"
    rc = main([
        "test", "--data", str(data_csv), "--calibration", "asymptotic",
        "--methods", "loss_q", "--format", "json", "--out", str(out),
    ])
    assert rc == 0
    assert capsys.readouterr().out == ""
    doc = json.loads(out.read_text())
    assert doc["results"][0]["method"] == "loss_q"
