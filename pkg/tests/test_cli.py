import io
import subprocess
import sys
from pathlib import Path

import pytest

from chenbar.cli import EXIT_DISAGREE, EXIT_OK, EXIT_PRECONDITION, EXIT_USAGE, run
from chenbar.connection import parse_connection
from chenbar.exact import ExactMatrix, I, parse_matrix

GOLDEN = Path(__file__).parent / "golden"


def invoke(*argv):
    out, err = io.StringIO(), io.StringIO()
    status = run([str(a) for a in argv], out, err)
    return status, out.getvalue(), err.getvalue()


def golden(name):
    return (GOLDEN / name).read_text(encoding="utf-8")


@pytest.mark.parametrize("argv,name", [
    (["ideals", "--g", "1", "--s", "1"], "ideals_g1_s1.txt"),
    (["monodromy", "--file", GOLDEN / "j2.conn", "--path", "a1"], "monodromy_j2_a1.txt"),
    (["monodromy", "--file", GOLDEN / "chain3.conn", "--path", "a1 b1 a1^-1"],
     "monodromy_chain3.txt"),
    (["classify", "--file", GOLDEN / "j2.conn"], "classify_j2.txt"),
    (["filtration", "--g", "1", "--s", "1", "--label", "F", "--level", "0"],
     "filtration_F0_g1_s1.txt"),
    (["invariants", "--g", "1", "--s", "2"], "invariants_g1_s2.txt"),
    (["verify", "--random", "60", "--seed", "7"], "verify_random_60_seed7.txt"),
])
def test_golden_reports(argv, name):
    status, out, err = invoke(*argv)
    assert status == EXIT_OK, err
    assert out == golden(name)
    assert err == ""


def test_reports_are_deterministic():
    first = invoke("verify", "--random", "30", "--seed", "11", "--g-max", "1")
    second = invoke("verify", "--random", "30", "--seed", "11", "--g-max", "1")
    assert first == second


def test_parallel_verify_matches_serial():
    serial = invoke("verify", "--random", "24", "--seed", "3")
    parallel = invoke("verify", "--random", "24", "--seed", "3", "--jobs", "3")
    assert serial == parallel


def test_seed_from_environment(monkeypatch):
    monkeypatch.setenv("CHENBAR_SEED", "7")
    assert invoke("verify", "--random", "60") == (EXIT_OK, golden("verify_random_60_seed7.txt"), "")
    monkeypatch.setenv("CHENBAR_SEED", "seven")
    status, _, err = invoke("verify", "--random", "5")
    assert status == EXIT_USAGE and "CHENBAR_SEED" in err


def test_random_mode_needs_a_seed(monkeypatch):
    monkeypatch.delenv("CHENBAR_SEED", raising=False)
    status, out, err = invoke("verify", "--random", "5")
    assert status == EXIT_USAGE
    assert out == "" and "--seed" in err


def test_printed_matrix_round_trips():
    _, out, _ = invoke("monodromy", "--file", GOLDEN / "j2.conn", "--path", "b1")
    m = parse_matrix("\n".join(out.splitlines()[1:]))
    assert m == ExactMatrix.from_rows([[1, I], [0, 1]])


def test_connection_files_round_trip():
    for name in ("j2.conn", "chain3.conn"):
        c = parse_connection(golden(name))
        assert parse_connection(golden(name).replace(" ", "  ")) == c


def test_not_flat_is_a_precondition_failure():
    for cmd in (["monodromy", "--path", "a1"], ["classify"], ["verify"]):
        status, out, err = invoke(*cmd, "--file", GOLDEN / "notflat.conn")
        assert status == EXIT_PRECONDITION
        assert "block (1,3) entry (1,1)" in err


def test_parse_errors_are_usage_failures():
    status, _, err = invoke("classify", "--file", GOLDEN / "lower.conn")
    assert status == EXIT_USAGE
    assert "line 3, column 7: lower-triangular entry" in err
    status, _, err = invoke("monodromy", "--file", GOLDEN / "j2.conn", "--path", "a1 q1")
    assert status == EXIT_USAGE and "column 4" in err
    status, _, err = invoke("classify", "--file", GOLDEN / "missing.conn")
    assert status == EXIT_USAGE


@pytest.mark.parametrize("argv", [
    [], ["invariants", "--g", "0", "--s", "1"], ["ideals", "--g", "1"],
    ["filtration", "--g", "1", "--s", "1", "--label", "X", "--level", "0"],
    ["verify", "--random", "5", "--file", "x.conn", "--seed", "1"],
    ["verify", "--random", "5", "--seed", "1", "--r-max", "1"],
])
def test_bad_arguments(argv):
    status, _, _ = invoke(*argv)
    assert status == EXIT_USAGE


def test_verify_file_agreement_and_disagreement(monkeypatch):
    status, out, _ = invoke("verify", "--file", GOLDEN / "j2.conn")
    assert status == EXIT_OK and out.rstrip().endswith("1/1 agree")

    # force a disagreement by swapping in the conjugate ideal: the certificate must reproduce it
    import chenbar.connection as connection
    real = connection.ideal_I
    monkeypatch.setattr(connection, "ideal_I", lambda g, s, conj=False: real(g, s, not conj))
    status, out, _ = invoke("verify", "--file", GOLDEN / "j2.conn")
    assert status == EXIT_DISAGREE
    assert "0/1 agree" in out and "counterexample certificate:" in out
    cert = out.split("counterexample certificate:\n", 1)[1]
    assert parse_connection(cert) == parse_connection(golden("j2.conn"))
    assert "# rho-bar(" in cert


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "chenbar", "ideals", "--g", "1", "--s", "1"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout == golden("ideals_g1_s1.txt")
