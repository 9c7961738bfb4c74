import subprocess
import sys

import pytest

from starext.cli import main
from starext.errors import ParseError
from starext.funlang import interpret
from starext.scenario import bundled_scenario_path, load_scenario, parse_scenario

MINI = """
[config]
horizon = 500
seed = 3
scale = quick

[functions]
def id = x
def parity = x mod 2
def2 add2 = p1(x) + p2(x)

[points]
omega = x
std0 = 0

[fragment]
functions = id, parity
points = omega
depth = 0
sample = 0..49

[formulas]
v + 0 = v

[closed]
E1 = [(parity, std0)]

[suites]
boolean, transfer
"""


def test_parse_minimal_scenario():
    sc = parse_scenario(MINI, name="mini")
    assert sc.horizon == 500
    assert sc.seed == 3
    assert list(sc.defs) == ["id", "parity"]
    assert interpret(sc.points["omega"], 5) == 5
    assert sc.binary_fns["add2"].apply(3, 4) == 7
    assert sc.fragment.functions == ["id", "parity"]
    assert sc.fragment.sample_stop == 50
    assert sc.closed_sets == {"E1": [("parity", "std0")]}
    assert sc.suites == ["boolean", "transfer"]
    assert len(sc.formulas) == 1


@pytest.mark.parametrize("mutation, fragment", [
    ("[bogus]", "unknown section"),
    ("[config]\nmystery = 3", "unknown config key"),
    ("[functions]\nparity = x", "expected 'def"),
    ("[points]\np = q(x)", "unknown name"),
    ("[fragment]\nfunctions = nope", "undefined"),
    ("[suites]\nwarp", "unknown suite"),
    ("[closed]\nE = [(missing, std0)]", "undefined"),
])
def test_scenario_parse_errors(mutation, fragment):
    base = "[functions]\ndef f = x\n[points]\nstd0 = 0\n"
    with pytest.raises(ParseError) as err:
        parse_scenario(base + mutation)
    assert fragment in str(err.value)


def test_bundled_scenarios_parse():
    for name in ("standard", "quick", "broken_diag", "broken_comp", "redundant"):
        sc = load_scenario(bundled_scenario_path(name))
        assert sc.suites


def test_standard_scenario_shape():
    sc = load_scenario(bundled_scenario_path("standard"))
    assert sc.horizon == 10_000
    assert len(sc.fragment.points) >= 5
    assert len(sc.fragment.functions) >= 10
    assert sc.fragment.sample_stop == 500
    assert sc.scale == "full"


# -- CLI ------------------------------------------------------------------------

def run_cli(*args) -> tuple[int, str]:
    proc = subprocess.run(
        [sys.executable, "-m", "starext.cli", *args],
        capture_output=True, text=True,
    )
    return proc.returncode, proc.stdout + proc.stderr


def test_cli_quick_run_green(tmp_path):
    code = main(["quick", "--out", str(tmp_path / "a")])
    assert code == 0
    report = (tmp_path / "a" / "report.txt").read_text()
    assert "verdict=ok" in report
    assert (tmp_path / "a" / "decisions.log").exists()


def test_cli_standard_scenario_green(tmp_path):
    # the bundled full-size scenario: every suite, zero failures
    code = main(["standard", "--out", str(tmp_path / "std")])
    assert code == 0
    report = (tmp_path / "std" / "report.txt").read_text()
    assert "verdict=ok" in report
    assert " fail=0 " in report.splitlines()[-1] or "fail=0" in report
    for section in ("[axioms]", "[negative]", "[boolean]", "[equalizer]",
                    "[finite]", "[nary]", "[transfer]", "[keisler]",
                    "[topology]"):
        assert section in report


def test_cli_negative_scenarios_exit_one(tmp_path):
    code = main(["broken_diag", "--out", str(tmp_path / "d")])
    assert code == 1
    report = (tmp_path / "d" / "report.txt").read_text()
    assert "diag\t0000\tfail" in report
    assert "succ" in report  # the witness names the functions involved

    code = main(["broken_comp", "--out", str(tmp_path / "c")])
    assert code == 1
    assert "comp\t0000\tfail" in (tmp_path / "c" / "report.txt").read_text()

    code = main(["redundant", "--out", str(tmp_path / "r")])
    assert code == 1
    assert "unreached point" in (tmp_path / "r" / "report.txt").read_text()


def test_cli_parse_error_exit_two(tmp_path):
    bad = tmp_path / "bad.scn"
    bad.write_text("[config]\nhorizon = pony\n")
    code, out = run_cli(str(bad), "--out", str(tmp_path / "o"))
    assert code == 2


def test_cli_missing_scenario_exit_two(tmp_path):
    code, out = run_cli("no-such-scenario", "--out", str(tmp_path / "o"))
    assert code == 2


def test_cli_unknown_suite_exit_two(tmp_path):
    code, out = run_cli("quick", "--suite", "warp", "--out", str(tmp_path / "o"))
    assert code == 2


def test_cli_suite_selection(tmp_path):
    code = main(["quick", "--suite", "finite", "--out", str(tmp_path / "s")])
    assert code == 0
    report = (tmp_path / "s" / "report.txt").read_text()
    assert "[finite]" in report
    assert "[axioms]" not in report


def test_cli_run_is_deterministic(tmp_path):
    assert main(["quick", "--out", str(tmp_path / "r1")]) == 0
    assert main(["quick", "--out", str(tmp_path / "r2")]) == 0
    r1 = (tmp_path / "r1" / "report.txt").read_bytes()
    r2 = (tmp_path / "r2" / "report.txt").read_bytes()
    assert r1 == r2
    l1 = (tmp_path / "r1" / "decisions.log").read_bytes()
    l2 = (tmp_path / "r2" / "decisions.log").read_bytes()
    assert l1 == l2


def test_cli_replay_reproduces_run(tmp_path):
    assert main(["quick", "--out", str(tmp_path / "first")]) == 0
    assert main([
        "quick", "--replay", str(tmp_path / "first" / "decisions.log"),
        "--out", str(tmp_path / "second"),
    ]) == 0
    assert (tmp_path / "first" / "report.txt").read_bytes() == \
        (tmp_path / "second" / "report.txt").read_bytes()
    assert (tmp_path / "first" / "decisions.log").read_bytes() == \
        (tmp_path / "second" / "decisions.log").read_bytes()


def test_cli_replay_mismatch_exit_three(tmp_path):
    assert main(["quick", "--out", str(tmp_path / "base")]) == 0
    log = (tmp_path / "base" / "decisions.log").read_text().splitlines()
    parts = log[3].split("\t")
    parts[2] = "reject" if parts[2] == "accept" else "accept"
    log[3] = "\t".join(parts)
    corrupted = tmp_path / "corrupted.log"
    corrupted.write_text("\n".join(log) + "\n")
    code, out = run_cli(
        "quick", "--replay", str(corrupted), "--out", str(tmp_path / "x")
    )
    assert code == 3
    assert "replay mismatch" in out


def test_cli_seed_override_changes_log(tmp_path):
    assert main(["quick", "--out", str(tmp_path / "s1")]) == 0
    assert main(["quick", "--seed", "99", "--out", str(tmp_path / "s2")]) == 0
    l1 = (tmp_path / "s1" / "decisions.log").read_bytes()
    l2 = (tmp_path / "s2" / "decisions.log").read_bytes()
    assert l1 != l2


def test_cli_seeded_tiebreak_scenario(tmp_path):
    scn = tmp_path / "seeded.scn"
    scn.write_text(
        "[config]\nhorizon = 500\nseed = 2\ntiebreak = seeded:11\nscale = quick\n"
        "[functions]\ndef id = x\n[points]\nomega = x\n[suites]\nfinite\n"
    )
    assert main([str(scn), "--out", str(tmp_path / "t1")]) == 0
    assert main([str(scn), "--out", str(tmp_path / "t2")]) == 0
    assert (tmp_path / "t1" / "decisions.log").read_bytes() == \
        (tmp_path / "t2" / "decisions.log").read_bytes()
    report = (tmp_path / "t1" / "report.txt").read_text()
    assert "tiebreak: seeded:11" in report
