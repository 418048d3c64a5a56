import csv
import io
import json
import subprocess
import sys

import pytest

from abundancy.cli import RunConfig, load_expectations, run, unexpected

COMMAND_ARGS = {
    "scan-robin": ["--limit", "2000"],
    "scan-lagarias": ["--limit", "2000"],
    "scan-totient": ["--limit", "2000"],
    "primorials": ["--limit", "10000", "--every", "100"],
    "mertens-grid": ["--limit", "100000", "--points", "20"],
    "products-grid": ["--limit", "100000", "--points", "20"],
    "constants": ["--limit", "100000"],
    "extremal": ["--limit", "5000"],
    "ca": ["--limit", "10000"],
    "erdos-kac": ["--limit", "10000"],
    "averages": ["--limit", "10000"],
    "r4": ["--limit", "1000", "--oracle-limit", "100"],
    "density": ["--limit", "10000", "--target", "0.9", "--eps", "0.001"],
    "identities": ["--limit", "100"],
    "errata": ["--limit", "100000"],
}


def invoke(argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(argv, out, err)
    return code, out.getvalue(), err.getvalue()


def body(text):
    lines = text.splitlines(keepends=True)
    assert lines[0].startswith("# generated ")
    return "".join(lines[1:])


@pytest.mark.parametrize("cmd", sorted(COMMAND_ARGS))
def test_every_command_runs(cmd):
    code, out, err = invoke([cmd] + COMMAND_ARGS[cmd])
    assert code == 0, err
    rows = list(csv.reader(io.StringIO(body(out))))
    assert rows and rows[0]


@pytest.mark.parametrize("cmd", ["scan-robin", "ca", "averages"])
def test_json_output(cmd):
    code, out, _ = invoke([cmd] + COMMAND_ARGS[cmd] + ["--format", "json"])
    doc = json.loads(body(out))
    assert set(doc) == {"columns", "rows", "summary"}
    assert all(len(r) == len(doc["columns"]) for r in doc["rows"])


def test_usage_errors():
    assert invoke([])[0] == 2
    assert invoke(["scan-robin", "--bogus"])[0] == 2
    assert invoke(["scan-robin", "--limit", "1"])[0] == 2
    assert invoke(["scan-robin", "--threads", "0"])[0] == 2


def test_unexpected_violation_exit_code():
    code, out, err = invoke(["scan-robin", "--variant", "unconditional", "--limit", "100"])
    assert code == 1 and "robin_unconditional n=12" in err


def test_expected_violations_pass():
    code, out, _ = invoke(["scan-robin", "--limit", "10000", "--violators"])
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(body(out).split("\n\n")[0])))
    assert [int(r["n"]) for r in rows][-1] == 5040 and len(rows) == 26


def test_expect_file(tmp_path):
    p = tmp_path / "exp.csv"
    p.write_text("criterion,n\nrobin_unconditional,12\n")
    assert invoke(["scan-robin", "--variant", "unconditional", "--limit", "100",
                   "--expect", str(p)])[0] == 0
    exp = load_expectations(str(p))
    assert unexpected([("robin_unconditional", 12), ("x", 1)], exp) == [("x", 1)]


def test_mertens_grid_header():
    _, out, _ = invoke(["mertens-grid", "--limit", "100000", "--points", "5", "--variant", "ap",
                        "--modulus", "4", "--residue", "1"])
    assert body(out).splitlines()[0] == "x,empirical,main_term,residual,envelope,within"


def test_thread_count_does_not_change_output():
    a = invoke(["scan-robin", "--limit", "50000", "--threads", "1"])[1]
    b = invoke(["scan-robin", "--limit", "50000", "--threads", "7"])[1]
    assert body(a) == body(b)


def test_modulus_filter():
    _, out, _ = invoke(["scan-robin", "--limit", "1000", "--modulus", "4", "--residue", "1"])
    rows = list(csv.DictReader(io.StringIO(body(out).split("\n\n")[0])))
    assert rows and all(int(r["n"]) % 4 == 1 for r in rows)


def test_run_config_validation():
    with pytest.raises(ValueError):
        RunConfig(limit=1)
    with pytest.raises(ValueError):
        RunConfig(limit=10, threads=0)


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "abundancy", "r4", "--limit", "200"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("# generated")
