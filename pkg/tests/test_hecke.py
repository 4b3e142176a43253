import os
import sys

import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from halfweight.arith import DirichletCharacter, kronecker
from halfweight.forms import HalfIntegralForm, delta_form, g_form, ramanujan_delta, x0_11_form
from halfweight.hecke import (
    HeckeError,
    deligne_check,
    elementary_bound_check,
    extend_power_sequence,
    extract_eigenvalue,
    forced_eigenvalue_for,
    hecke_eigenvalue,
    integral_eigenvalue,
    is_exceptional_prime,
    lift_inversion_check,
    local_power_sequence,
    recurrence_check,
    satake,
    shimura_lift,
    t_integral,
    t_square_half,
    twisted_component,
    u_operator,
)

PREC = 10_000


@pytest.fixture(scope="module")
def delta():
    return delta_form(PREC)


@pytest.fixture(scope="module")
def g():
    return g_form(PREC)


@pytest.fixture(scope="module")
def tau():
    return ramanujan_delta(200)


@pytest.fixture(scope="module")
def G():
    return x0_11_form(200)


# ── operators ─────────────────────────────────────────────────────────────────
def test_t_square_examples(delta, g):
    b = t_square_half(3, delta)
    assert b.prec == PREC // 9
    assert b[1] == 252
    assert t_square_half(3, g)[3] == -1


def test_t_square_rejects_bad_primes(delta):
    with pytest.raises(HeckeError, match="divides level"):
        t_square_half(2, delta)
    with pytest.raises(HeckeError):
        t_square_half(9, delta)


def test_t_integral_examples(tau, G):
    assert t_integral(3, tau)[1] == 252
    assert t_integral(2, tau)[1] == -24
    assert t_integral(3, G)[1] == -1
    with pytest.raises(HeckeError):
        t_integral(11, G)


def test_u_operator(delta):
    u = u_operator(4, delta)
    assert u.prec == PREC // 4
    assert [u[n] for n in range(1, 5)] == [-56, -240, 1440, -704]
    assert not u.plus_space


# ── eigenvalues ───────────────────────────────────────────────────────────────
@pytest.mark.parametrize("p", [3, 5, 7, 13])
def test_delta_eigenvalues_are_tau(delta, tau, p):
    report = hecke_eigenvalue(delta, p)
    assert report.is_eigen and report.first_violation is None
    assert report.eigenvalue == tau[p]
    assert report.deligne and report.elementary_bound
    assert report.exceptional is False
    assert report.exceptional == (report.satake.discriminant_sign == 0)


@pytest.mark.parametrize("p", [3, 5, 7, 13])
def test_g_eigenvalues_are_x0_11_coefficients(g, G, p):
    report = hecke_eigenvalue(g, p)
    assert report.is_eigen
    assert report.eigenvalue == G[p]
    assert report.deligne and report.elementary_bound
    assert report.exceptional is False


def test_integral_eigenvalues(tau, G):
    assert integral_eigenvalue(tau, 2).eigenvalue == -24
    assert integral_eigenvalue(G, 5).eigenvalue == 1


def test_extract_detects_non_eigenform(delta):
    image = list(t_square_half(3, delta).coeffs)
    image[5] += 1
    report = extract_eigenvalue(delta, image)
    assert not report.is_eigen
    assert report.eigenvalue == 252
    assert report.first_violation == 5
    assert report.satake is None
    assert report.exceptional is None


def test_extract_non_integral_ratio():
    report = extract_eigenvalue([0, 2, 4], [0, 3, 6])
    assert not report.is_eigen and report.eigenvalue is None
    assert report.first_violation == 1
    with pytest.raises(HeckeError):
        extract_eigenvalue([0, 0, 0], [0, 1, 2])


def test_mixed_form_is_not_eigen(delta, g):
    trivial = DirichletCharacter.trivial(44)
    mix = HalfIntegralForm("mix", 13, 44, trivial, [a + b for a, b in zip(delta.coeffs, g.coeffs)])
    assert not hecke_eigenvalue(mix, 3).is_eigen


def test_satake_and_bounds():
    s = satake(252, 3, 6)
    assert (s.trace, s.norm, s.discriminant_sign) == (252, 177147, -1)
    s = satake(-1, 3, 1)
    assert (s.trace, s.norm, s.discriminant_sign) == (-1, 3, -1)
    assert deligne_check(252, 3, 6) and elementary_bound_check(252, 3, 6)
    assert deligne_check(-1, 3, 1) and elementary_bound_check(-1, 3, 1)
    assert not deligne_check(12, 3, 1) and not elementary_bound_check(12, 3, 1)
    assert not is_exceptional_prime(252, 3, 6)


def test_forced_eigenvalue_for_is_ruled_out(delta):
    forced = forced_eigenvalue_for(delta, 3, 1)
    assert forced == -(3**6 + 3**5)
    assert not elementary_bound_check(forced, 3, 6)


# ── Shimura lift ──────────────────────────────────────────────────────────────
def test_lift_of_delta(delta, tau):
    lift = shimura_lift(delta, 1)
    assert lift.prec == 100
    assert lift.level == 2 and lift.k == 6
    assert lift[1] == 1 and lift[2] == -56 and lift[3] == 252
    assert all(lift[n] == tau[n] for n in range(1, 100, 2))
    F = lift.as_form()
    assert F.weight == 12
    for p in (3, 5, 7):
        assert integral_eigenvalue(F, p).eigenvalue == tau[p]


def test_lift_of_g(g):
    lift = shimura_lift(g, 3)
    assert lift[1] == 1
    assert lift.prec == 57


def test_lift_errors(delta):
    with pytest.raises(HeckeError):
        shimura_lift(delta, 4)
    with pytest.raises(HeckeError):
        shimura_lift(delta_form(10), 11)


@pytest.mark.parametrize("t", [1, 5, 13])
def test_lift_inversion(delta, t):
    assert lift_inversion_check(delta, t).passed


# ── local recurrence ──────────────────────────────────────────────────────────
def test_local_power_sequence(delta, g):
    seq = local_power_sequence(delta, 1, 3)
    assert len(seq) == 5
    assert seq[:3] == [1, 9, -174879]
    assert local_power_sequence(g, 3, 3)[:2] == [1, -1]
    assert local_power_sequence(delta, 5, 3)[0] == 120


@pytest.mark.parametrize("t", [1, 5])
@pytest.mark.parametrize("p", [3, 5, 7])
def test_recurrence_delta(delta, t, p):
    report = recurrence_check(delta, t, p)
    assert report.passed, report
    assert report.checked_m >= 1


@pytest.mark.parametrize("p", [3, 5, 7])
def test_recurrence_g(g, p):
    assert recurrence_check(g, 3, p).passed


def test_recurrence_reports_violation(delta):
    report = recurrence_check(delta, 1, 3, eigenvalue=251)
    assert not report.passed
    assert report.first_violation_m == 1
    assert (report.expected, report.actual) == (8, 9)


def test_extend_power_sequence(delta):
    direct = local_power_sequence(delta, 1, 3)
    predicted = extend_power_sequence(1, 252, 1, 3, 6, 6)
    assert predicted[: len(direct)] == direct
    assert predicted[3] == -45663831
    count = sum(1 for x, y in zip(predicted, predicted[1:]) if x * y < 0)
    assert count >= 1


# ── twists ────────────────────────────────────────────────────────────────────
def test_twisted_components(delta):
    plus = twisted_component(delta, 3, 1)
    minus = twisted_component(delta, 3, -1)
    assert plus.level == 36
    assert [plus[n] for n in (1, 4, 13, 16)] == [1, -56, -1320, -704]
    assert plus[5] == 0 and minus[1] == 0
    assert [minus[n] for n in (5, 8, 17)] == [120, -240, -240]


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13])
def test_twist_partition(delta, p):
    plus = twisted_component(delta, p, 1).coeffs
    minus = twisted_component(delta, p, -1).coeffs
    for n, c in enumerate(delta.coeffs):
        rest = c if kronecker(n, p) == 0 else 0
        assert plus[n] + minus[n] + rest == c


def test_power_sequence_changes_sign_beyond_precision(tau):
    for p, limit in ((3, 6), (5, 4)):
        seq = extend_power_sequence(1, tau[p], 1, p, 6, limit)
        assert any(x * y < 0 for x, y in zip(seq, seq[1:]))
    assert extend_power_sequence(1, 4830, 1, 5, 6, 2) == [1, 1705, -40592975]
