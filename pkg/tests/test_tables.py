import os
import sys

import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from halfweight.forms import delta_form, g_form
from halfweight.hecke import recurrence_check
from halfweight.signs import r_plus_fund, r_plus_tot

pytestmark = pytest.mark.skipif(
    os.getenv("HALFWEIGHT_SLOW") != "1", reason="set HALFWEIGHT_SLOW=1 for the 10^5 runs"
)

X_MAX = 100_000
XS = (10, 100, 1_000, 10_000, 100_000)

DELTA_TOT = (0.600, 0.520, 0.518, 0.504600, 0.499600)
DELTA_FUND = (0.667, 0.548, 0.515, 0.501643, 0.500016)
G_TOT = (0.500, 0.500, 0.500, 0.496042, 0.501022)
G_FUND = {10_000: 0.491968, 100_000: 0.500861}


@pytest.fixture(scope="module")
def delta():
    return delta_form(X_MAX)


@pytest.fixture(scope="module")
def g():
    return g_form(X_MAX)


@pytest.mark.parametrize("X,tot,fund", zip(XS, DELTA_TOT, DELTA_FUND))
def test_delta_table(delta, X, tot, fund):
    assert abs(float(r_plus_tot(delta, X).ratio) - tot) <= 0.0005
    assert abs(float(r_plus_fund(delta, X).ratio) - fund) <= 0.005


@pytest.mark.parametrize("X,tot", zip(XS, G_TOT))
def test_g_table(g, X, tot):
    assert abs(float(r_plus_tot(g, X).ratio) - tot) <= 0.0005
    if X in G_FUND:
        assert abs(float(r_plus_fund(g, X).ratio) - G_FUND[X]) <= 0.01


# ── local recurrence at 10⁵ ───────────────────────────────────────────────────
@pytest.mark.parametrize(
    "t,p,checked_m",
    [(1, 3, 5), (1, 5, 3), (1, 7, 2), (5, 3, 4), (5, 5, 3), (5, 7, 2)],
)
def test_delta_recurrence(delta, t, p, checked_m):
    report = recurrence_check(delta, t, p)
    assert report.passed, report
    assert report.checked_m == checked_m


def test_delta_recurrence_entries(delta):
    entries = recurrence_check(delta, 1, 3).entries
    assert entries[:4] == [1, 9, -174879, -45663831]


@pytest.mark.parametrize("p,checked_m", [(3, 4), (5, 3), (7, 2)])
def test_g_recurrence(g, p, checked_m):
    report = recurrence_check(g, 3, p)
    assert report.passed, report
    assert report.checked_m == checked_m
