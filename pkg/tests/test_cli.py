import os
import sys

import pytest
import simplejson

sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from halfweight import settings
from halfweight.coeffile import read_form
from halfweight.main import main


@pytest.fixture(scope="module")
def delta_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("forms") / "delta.txt"
    main(["build", "--form", "delta", "--prec", "1000", "--out", str(path)])
    return path


def body(path):
    return [line for line in path.read_text(encoding="utf-8").splitlines() if not line.startswith("#")]


def run_failing(argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    return exc.value.code


# ── build ─────────────────────────────────────────────────────────────────────
def test_build_delta(tmp_path, capsys):
    out = tmp_path / "delta.txt"
    main(["build", "--form", "delta", "--prec", "100", "--out", str(out)])
    assert body(out)[:3] == ["1\t1", "4\t-56", "5\t120"]
    assert "✔️" in capsys.readouterr().out


def test_build_g(tmp_path):
    out = tmp_path / "g.txt"
    main(["build", "--form", "g", "--prec", "60", "--out", str(out)])
    assert body(out)[:2] == ["3\t1", "4\t-1"]
    assert read_form(out).plus_space


def test_build_formspec(tmp_path):
    out = tmp_path / "delta24.txt"
    main(["build", "--form", "eta(1)^24", "--prec", "5", "--out", str(out)])
    assert body(out) == ["1\t1", "2\t-24", "3\t252", "4\t-1472", "5\t4830"]
    f = read_form(out)
    assert (f.weight, f.level) == (12, 1)


def test_build_bad_formspec(tmp_path, capsys):
    assert run_failing(["build", "--form", "eta(", "--out", str(tmp_path / "x.txt")]) == 2
    assert "at byte 4" in capsys.readouterr().err


def test_build_needs_huge(tmp_path, monkeypatch, capsys):
    monkeypatch.setattr(settings, "DEFAULT_PREC", 50)
    out = tmp_path / "d.txt"
    assert run_failing(["build", "--form", "delta", "--prec", "60", "--out", str(out)]) == 2
    assert "--huge" in capsys.readouterr().err
    main(["build", "--form", "delta", "--prec", "60", "--huge", "--out", str(out)])
    assert read_form(out).prec == 60


def test_missing_argument_is_usage_error():
    assert run_failing(["build", "--form", "delta"]) == 2


# ── lift / hecke ──────────────────────────────────────────────────────────────
def test_lift(delta_file, tmp_path):
    out = tmp_path / "lift.txt"
    main(["lift", "--in", str(delta_file), "--t", "1", "--out", str(out)])
    F = read_form(out)
    assert F.prec == 31 and F.weight == 12 and F.level == 2
    assert [F[n] for n in (1, 2, 3)] == [1, -56, 252]
    assert "lift_t: 1" in out.read_text(encoding="utf-8")


def test_hecke_eigenvalue(delta_file, tmp_path):
    out, report = tmp_path / "t9.txt", tmp_path / "eigen.json"
    main([
        "hecke", "--in", str(delta_file), "--op", "tsq", "--p", "3",
        "--out", str(out), "--verify-eigen", "--json", str(report),
    ])
    data = simplejson.loads(report.read_text(encoding="utf-8"))
    assert data["eigenvalue"] == 252 and data["is_eigen"]
    assert data["satake"]["norm"] == 3**11
    assert read_form(out)[1] == 252


def test_hecke_bad_prime(delta_file, capsys):
    code = run_failing(["hecke", "--in", str(delta_file), "--op", "tsq", "--p", "2"])
    assert code == 2
    assert "divides level" in capsys.readouterr().err


def test_hecke_tp_needs_integral_weight(delta_file):
    assert run_failing(["hecke", "--in", str(delta_file), "--op", "tp", "--p", "3"]) == 2


# ── signs ─────────────────────────────────────────────────────────────────────
def test_signs_csv(delta_file, tmp_path):
    out = tmp_path / "t1.csv"
    main(["signs", "--in", str(delta_file), "--X-list", "10", "--csv", str(out)])
    assert out.read_text(encoding="utf-8") == "X,R_tot,R_fund\n10,0.600,0.667\n"


def test_signs_default_cutoffs(delta_file, capsys):
    main(["signs", "--in", str(delta_file), "--stats", "tot"])
    lines = capsys.readouterr().out.splitlines()
    assert lines == ["X,R_tot,R_fund", "10,0.600,", "100,0.520,", "1000,0.518,"]


def test_signs_subsequence(delta_file, capsys):
    main(["signs", "--in", str(delta_file), "--t", "1"])
    data = simplejson.loads(capsys.readouterr().out)
    assert data["X"] == 31
    assert data["entries"][:4] == [1, -56, 9, -704]


def test_signs_powers_extended(delta_file, capsys):
    main(["signs", "--in", str(delta_file), "--powers-p", "3", "--extend", "3"])
    data = simplejson.loads(capsys.readouterr().out)
    assert data["entries"] == [1, 9, -174879, -45663831]
    assert data["sign_change_count"] == 1


def test_signs_bad_dprime(delta_file):
    assert run_failing(["signs", "--in", str(delta_file), "--dprime", "3+1"]) == 2


# ── verify ────────────────────────────────────────────────────────────────────
@pytest.mark.parametrize("suite", ["plus-space", "recurrence", "bounds", "prop2", "twists"])
def test_verify_suites_pass(delta_file, tmp_path, suite):
    report = tmp_path / f"{suite}.json"
    main(["verify", "--in", str(delta_file), "--suite", suite, "--json", str(report)])
    data = simplejson.loads(report.read_text(encoding="utf-8"))
    assert data["passed"] and data["suite"] == suite and data["precision"] == 1000


def test_verify_prop2_suite_name(delta_file, capsys):
    main(["verify", "--in", str(delta_file), "--suite", "prop2", "--p", "3"])
    data = simplejson.loads(capsys.readouterr().out)
    assert data["suite"] == "prop2" and data["passed"]
    assert [r["p"] for r in data["results"]] == [3]


def test_verify_failure_exits_one(tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text(
        "# halfweight-coefficients: 1\n# form: bad\n# weight: 13/2\n# level: 4\n"
        "# character: trivial:4\n# precision: 10\n# offset: 0\n# plus_space: false\n"
        "1\t1\n2\t5\n",
        encoding="utf-8",
    )
    assert run_failing(["verify", "--in", str(bad), "--suite", "plus-space"]) == 1
