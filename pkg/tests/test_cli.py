import json

import numpy as np
import pytest

from engel_lorentz.cli import COLUMNS, EXIT_DOMAIN, EXIT_FAILED, EXIT_OK, EXIT_PARSE, main, read_table
from engel_lorentz.expmap import exp


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_trace_csv_matches_library(capsys):
    code, out, _ = run(capsys, "trace", "--causal", "timelike", "--theta", "0.3", "--c", "-0.5",
                       "--alpha", "0.7", "--t-end", "1.5", "--samples", "7")
    assert code == EXIT_OK
    table = read_table(out, "csv")
    assert table.shape == (7, len(COLUMNS))
    from engel_lorentz.vertical import Covector

    assert np.array_equal(table[:, 1:5], exp(Covector("timelike", 0.3, -0.5, 0.7), table[:, 0]))
    assert np.allclose(table[:, 7], -0.5)
    assert np.allclose(table[:, 8], table[0, 8], atol=1e-10)


@pytest.mark.parametrize("fmt", ["csv", "json"])
def test_round_trip_is_exact(tmp_path, capsys, fmt):
    path = tmp_path / f"t.{fmt}"
    code, _, _ = run(capsys, "trace", "--causal", "spacelike", "--theta", "0.2", "--c", "1.1",
                     "--alpha", "-0.4", "--t-end", "2", "--samples", "33", "--format", fmt, "--out", str(path))
    assert code == EXIT_OK
    table = read_table(path.read_text(), fmt)
    code, out, _ = run(capsys, "trace", "--causal", "spacelike", "--theta", "0.2", "--c", "1.1",
                       "--alpha", "-0.4", "--t-end", "2", "--samples", "33", "--format", fmt)
    assert np.array_equal(read_table(out, fmt), table)
    if fmt == "json":
        doc = json.loads(out)
        assert doc["stratum"] == "SL_C1" and doc["columns"] == list(COLUMNS)


def test_output_files_are_byte_identical(tmp_path, capsys):
    args = ["trace", "--causal", "timelike", "--theta", "-0.4", "--c", "0.9", "--alpha", "-1.2",
            "--t-end", "1.2", "--samples", "50"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(args + ["--out", str(a)]) == EXIT_OK
    assert main(args + ["--out", str(b)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


@pytest.mark.parametrize("fmt", ["csv", "json"])
def test_lightlike_rows(capsys, fmt):
    code, out, _ = run(capsys, "lightlike", "--branch", "-1", "--t-end", "2", "--samples", "5", "--format", fmt)
    assert code == EXIT_OK
    table = read_table(out, fmt)
    t = table[:, 0]
    assert np.array_equal(table[:, 1:5], np.column_stack([t, -t, 0 * t, -t ** 3 / 3]))
    assert np.all(np.isnan(table[:, [5, 6, 8]])) and np.all(table[:, 7] == 0)
    code, out2, _ = run(capsys, "trace", "--causal", "lightlike", "--branch", "-1", "--t-end", "2",
                        "--samples", "5", "--format", fmt)
    assert np.array_equal(read_table(out2, fmt), table, equal_nan=True)


def test_straight_timelike_line(capsys):
    code, out, _ = run(capsys, "trace", "--causal", "timelike", "--t-end", "1", "--samples", "3")
    table = read_table(out, "csv")
    assert code == EXIT_OK
    assert np.allclose(table[:, 1], -table[:, 0]) and np.allclose(table[:, 2:5], 0)


def test_classify_and_maxwell(capsys):
    code, out, _ = run(capsys, "classify", "--causal", "spacelike", "--theta", "2", "--c", "0.1", "--alpha", "1")
    doc = json.loads(out)
    assert code == EXIT_OK and doc["stratum"] == "SL_C2" and doc["t_supr"] > 0
    code, out, _ = run(capsys, "maxwell", "--causal", "spacelike", "--theta", "0.5", "--c", "0.9", "--alpha", "-0.8")
    doc = json.loads(out)
    assert code == EXIT_OK and doc["t_max1"] > doc["t_max2"]


@pytest.mark.parametrize("argv", [
    ["trace", "--causal", "timelike", "--t-end", "1", "--samples", "1"],
    ["trace", "--causal", "nullish", "--t-end", "1"],
    ["trace", "--causal", "timelike"],
    ["lightlike", "--branch", "2", "--t-end", "1"],
    ["validate", "--only", "nope"],
    [],
])
def test_argument_errors_exit_1(capsys, argv):
    assert run(capsys, *argv)[0] == EXIT_PARSE


@pytest.mark.parametrize("argv", [
    ["trace", "--causal", "spacelike", "--theta", "0.3", "--c", "0.5", "--alpha", "1", "--t-end", "50"],
    ["trace", "--causal", "timelike", "--t-end", "-1"],
])
def test_domain_errors_exit_2(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == EXIT_DOMAIN and "domain error" in err and out == ""


def test_validate_exit_codes(capsys):
    code, out, _ = run(capsys, "validate", "--only", "lightlike")
    assert code == EXIT_OK and json.loads(out)["passed"]
    code, out, err = run(capsys, "validate", "--only", "lightlike", "--tol", "1e-30")
    assert code == EXIT_FAILED
    assert "FAILED lightlike." in err
