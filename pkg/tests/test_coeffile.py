import os
import sys

import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from halfweight.coeffile import CoefficientFile, CoefficientFileError, read_form, write_form
from halfweight.forms import FORMS, HalfIntegralForm, delta_form

HEADER = """\
# halfweight-coefficients: 1
# form: delta
# weight: 13/2
# level: 4
# character: trivial:4
# precision: 10
# offset: 0
"""


@pytest.mark.parametrize("name", sorted(FORMS))
def test_round_trip_builtin_forms(tmp_path, name):
    f = FORMS[name](1000)
    path = tmp_path / f"{name}.txt"
    write_form(f, path)
    back = read_form(path)
    assert type(back) is type(f)
    assert (back.name, back.weight, back.level, back.character) == (
        f.name, f.weight, f.level, f.character
    )
    assert back.coeffs == f.coeffs
    if isinstance(f, HalfIntegralForm):
        assert back.plus_space == f.plus_space


def test_serialized_layout():
    text = CoefficientFile.from_form(delta_form(5), note="x").serialize()
    lines = text.splitlines()
    assert lines[0] == "# halfweight-coefficients: 1"
    assert "# weight: 13/2" in lines
    assert "# plus_space: true" in lines
    assert "# note: x" in lines
    assert lines[-3:] == ["1\t1", "4\t-56", "5\t120"]


def test_parse_keeps_extras():
    cf = CoefficientFile.parse(HEADER + "# source: delta\n1\t1\n4\t-56\n")
    assert cf.extras == {"source": "delta"}
    assert cf.coeffs == {1: 1, 4: -56}
    f = cf.to_form()
    assert f.prec == 10 and f[4] == -56 and f[2] == 0


@pytest.mark.parametrize(
    "text,match",
    [
        (HEADER + "1\t1\n# late: 1\n", "header after"),
        (HEADER + "# no colon\n", "without ':'"),
        (HEADER + "1 1\n", "expected"),
        (HEADER + "4\t-56\n1\t1\n", "ascending"),
        (HEADER + "1\t0\n", "zero"),
        (HEADER + "11\t1\n", "outside"),
        (HEADER.replace("# halfweight-coefficients: 1\n", ""), "halfweight-coefficients"),
        (HEADER.replace("# level: 4\n", ""), "level"),
        (HEADER.replace("precision: 10", "precision: ten"), "bad header"),
        (HEADER.replace("coefficients: 1", "coefficients: 2"), "version"),
    ],
)
def test_malformed_files(text, match):
    with pytest.raises(CoefficientFileError, match=match):
        CoefficientFile.parse(text)


def test_to_form_validates():
    bad = HEADER.replace("level: 4", "level: 6")
    with pytest.raises(CoefficientFileError):
        CoefficientFile.parse(bad).to_form()
    plus = HEADER + "# plus_space: true\n2\t1\n"
    with pytest.raises(CoefficientFileError, match="plus-space"):
        CoefficientFile.parse(plus).to_form()


def test_missing_file(tmp_path):
    with pytest.raises(CoefficientFileError, match="cannot read"):
        read_form(tmp_path / "absent.txt")
