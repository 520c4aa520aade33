import io
import json
import sys
from pathlib import Path

import pytest

from tfpvkit import FIXTURES
from tfpvkit.cli import run

ROOT = Path(__file__).resolve().parents[1]
FIXTURE_DIR = ROOT / "fixtures"
GOLDEN = Path(__file__).resolve().parent / "golden"
sys.path.insert(0, str(GOLDEN))
from regenerate import COMMANDS, render  # noqa: E402


def cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run([str(a) for a in argv], stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def fx(name):
    return FIXTURE_DIR / f"{name}.crn"


@pytest.mark.parametrize("name", FIXTURES)
@pytest.mark.parametrize("command", COMMANDS)
def test_golden_reports(name, command):
    assert render(name, command) == (GOLDEN / f"{name}.{command}.json").read_text(encoding="utf-8")


def test_bundled_fixtures_match_the_top_level_copies():
    for name in FIXTURES:
        bundled = ROOT / "src" / "tfpvkit" / "fixtures" / f"{name}.crn"
        assert bundled.read_text() == fx(name).read_text()


def test_analyze_text_and_json():
    code, out, _ = cli("analyze", fx("mm_rev"))
    assert code == 0
    assert "deficiency" in out
    code, out, _ = cli("analyze", fx("mm_rev"), "--json")
    data = json.loads(out)
    assert data["command"] == "analyze"
    assert data["summary"]["deficiency"] == 0


def test_tfpv_compinh_certificates():
    code, out, _ = cli("tfpv", fx("compinh"), "--json")
    assert code == 0
    certs = json.loads(out)["certificates"]
    assert sorted(c["dimension"] for c in certs) == [4, 4, 4, 5, 5, 5]
    assert all(c["verification"]["passed"] for c in certs)


def test_tfpv_options():
    code, out, _ = cli("tfpv", fx("lin3"), "--first-order", "--json")
    assert code == 0
    assert [c["off_labels"] for c in json.loads(out)["certificates"]] == [["k1", "km1"], ["k1", "km2"], ["k2", "km2"]]
    code, out, _ = cli("tfpv", fx("futile"), "--precheck", "--json")
    assert code == 0
    assert json.loads(out)["summary"]["verdict"] == "ExcludedByMinors"
    code, out, _ = cli("tfpv", fx("mm_rev"), "--verify-at", "1,1,0,0;1,1,1,0;3", "--json")
    assert code == 0
    assert json.loads(out)["summary"]["passed"] is True
    code, _, _ = cli("tfpv", fx("mm_rev"), "--verify-at", "1,1,1,1;1,1,1,1;3")
    assert code == 1


def test_nothing_found_exits_one():
    code, out, err = cli("tfpv", fx("minus"), "--json")
    assert code == 1
    assert json.loads(out)["summary"]["error"]["kind"] == "NothingFound"
    code, out, _ = cli("ltc", fx("inflow3"), "--json")
    assert code == 1
    assert json.loads(out)["warnings"]


def test_ltc_and_scale():
    code, out, _ = cli("ltc", fx("mm_rev"), "--json")
    assert code == 0
    assert [c["species"] for c in json.loads(out)["certificates"]] == [["X2", "X3"], ["X1", "X3", "X4"]]
    code, out, _ = cli("scale", fx("mm_rev"), "--species", "X2,X3")
    assert code == 0
    assert "dX2_s/dt" in out
    code, _, err = cli("scale", fx("mm_rev"), "--species", "X1")
    assert code == 1 and "NotLtc" in err


def test_scc_command():
    code, out, _ = cli(
        "scc", fx("compinh"), "--retain", "X1,X3,X6", "--theta", "e0=0,s0=1,i0=1", "--point", "1/2,0,0", "--kappa", "1,1,1,1,1,1", "--json"
    )
    assert code == 0
    assert json.loads(out)["summary"]["check"]["verdict"] == "TFPV for dimension one"


def test_simulate_command(tmp_path):
    target = tmp_path / "traj.csv"
    code, out, _ = cli("simulate", fx("mm_rev"), "--kappa", "1,1,1,1", "--x0", "2,1,0,0", "--t", "1", "--csv", target, "--json")
    assert code == 0
    assert target.read_text().splitlines()[0] == "t,X1,X2,X3,X4"
    code, out, _ = cli(
        "simulate", fx("mm_rev"), "--kappa", "1,1,0,0", "--x0", "1,1,1,0", "--probe", "--radius", "0.01", "--samples", "5", "--json"
    )
    assert code == 0
    assert json.loads(out)["summary"]["probe"]["fraction"] == 1.0


@pytest.mark.parametrize(
    "text, fragment",
    [("", "SyntaxError: line 1, column 1"), ("X1 -> X1 ; k\n", "SelfLoop"), ("X1 => X2 ; k\n", "SyntaxError")],
)
def test_input_errors_exit_two(tmp_path, text, fragment):
    path = tmp_path / "bad.crn"
    path.write_text(text)
    code, out, err = cli("analyze", path)
    assert code == 2
    assert fragment in err
    assert out == ""


def test_missing_file_and_bad_usage(tmp_path):
    assert cli("analyze", tmp_path / "nope.crn")[0] == 2
    assert cli("bogus")[0] == 2
    assert cli("scale", fx("mm_rev"), "--species", "X9")[0] == 2


@pytest.mark.parametrize("command", ["analyze", "tfpv", "ltc"])
def test_repeated_runs_are_byte_identical(command):
    first = cli(command, fx("compinh"), "--json")[1]
    assert all(cli(command, fx("compinh"), "--json")[1] == first for _ in range(3))
