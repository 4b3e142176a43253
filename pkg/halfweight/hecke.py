"""
hecke.py  —  Hecke operators, the Shimura lift and eigenvalue diagnostics
▪ T(p²) on half-integral weight, T(p) on integral weight, U_m on both
▪ A(n) = Σ_{d|n} χ_{t,N}(d) d^(k-1) a(n²t/d²)
▪ local recurrence of a(tp^(2m)), Satake data and the eigenvalue bounds

Every operator returns a form whose prec is the guaranteed-valid prefix; no check
reads past it.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from math import isqrt
from typing import Sequence

from pydantic import BaseModel
from sympy import isprime

from .arith import (
    ArithError,
    DirichletCharacter,
    chi_star,
    chi_t_N,
    divisors,
    is_squarefree,
    kronecker,
    moebius,
)
from .forms import Form, HalfIntegralForm, IntegralForm

SCHEMA_VERSION = 1


class HeckeError(ValueError):
    pass


# ── reports ───────────────────────────────────────────────────────────────────
class Satake(BaseModel):
    """α_p + β_p, α_p·β_p and the sign of (α_p − β_p)²."""

    trace: int
    norm: int
    discriminant_sign: int


class EigenReport(BaseModel):
    schema_version: int = SCHEMA_VERSION
    p: int | None = None
    k: int | None = None
    eigenvalue: int | None = None
    is_eigen: bool
    checked_up_to: int
    first_violation: int | None = None
    diagnostic: str | None = None
    satake: Satake | None = None
    deligne: bool | None = None
    elementary_bound: bool | None = None
    exceptional: bool | None = None


class RecurrenceReport(BaseModel):
    schema_version: int = SCHEMA_VERSION
    t: int
    p: int
    eigenvalue: int
    entries: list[int]
    checked_m: int
    passed: bool
    first_violation_m: int | None = None
    expected: int | None = None
    actual: int | None = None


class InversionReport(BaseModel):
    schema_version: int = SCHEMA_VERSION
    t: int
    checked_up_to: int
    passed: bool
    first_violation: int | None = None


# ── helpers ───────────────────────────────────────────────────────────────────
def _prime(p: int) -> int:
    if not isprime(p):
        raise HeckeError(f"{p} is not a prime")
    return p


def good_prime(p: int, level: int) -> int:
    _prime(p)
    if level % p == 0:
        raise HeckeError(f"p={p} divides level {level}")
    return p


def _squarefree_t(t: int, prec: int) -> int:
    if t < 1 or not is_squarefree(t):
        raise HeckeError(f"t={t} is not a square-free positive integer")
    if t > prec:
        raise HeckeError(f"t={t} is beyond the precision {prec}")
    return t


def _seq(x: Form | Sequence[int]) -> Sequence[int]:
    return x.coeffs if isinstance(x, (HalfIntegralForm, IntegralForm)) else x


# ── operators ─────────────────────────────────────────────────────────────────
def t_square_half(p: int, f: HalfIntegralForm) -> HalfIntegralForm:
    """b(n) = a(p²n) + χ*(p)(n/p)p^(k-1)a(n) + χ(p)²p^(2k-1)a(n/p²)."""
    good_prime(p, f.level)
    a, k, p2 = f.coeffs, f.k, p * p
    mid = chi_star(f.character, k, p) * p ** (k - 1)
    last = f.character.square()(p) * p ** (2 * k - 1)
    b = []
    for n in range(f.prec // p2 + 1):
        value = a[p2 * n]
        if mid:
            value += mid * kronecker(n, p) * a[n]
        if n % p2 == 0:
            value += last * a[n // p2]
        b.append(value)
    return f.with_coeffs(b, name=f"T({p}^2){f.name}")


def t_integral(p: int, F: IntegralForm) -> IntegralForm:
    """B(n) = A(pn) + χ²(p)p^(2k-1)A(n/p), 2k the weight."""
    good_prime(p, F.level)
    A = F.coeffs
    last = F.character.square()(p) * p ** (F.weight - 1)
    B = [A[p * n] + (last * A[n // p] if n % p == 0 else 0) for n in range(F.prec // p + 1)]
    return F.with_coeffs(B, name=f"T({p}){F.name}")


def u_operator(m: int, f: Form) -> Form:
    """b(n) = a(mn) up to floor(prec/m); level and character are kept as declared."""
    if m < 1:
        raise HeckeError(f"U index must be positive, got {m}")
    b = f.coeffs[:: m]
    changes = {"plus_space": False} if isinstance(f, HalfIntegralForm) else {}
    return f.with_coeffs(b, name=f"U({m}){f.name}", **changes)


# ── eigenvalues ───────────────────────────────────────────────────────────────
def satake(eigenvalue: int, p: int, k: int) -> Satake:
    norm = p ** (2 * k - 1)
    disc = eigenvalue * eigenvalue - 4 * norm
    return Satake(trace=eigenvalue, norm=norm, discriminant_sign=(disc > 0) - (disc < 0))


def deligne_check(eigenvalue: int, p: int, k: int) -> bool:
    return eigenvalue * eigenvalue <= 4 * p ** (2 * k - 1)


def elementary_bound_check(eigenvalue: int, p: int, k: int) -> bool:
    return abs(eigenvalue) < p**k + p ** (k - 1)


def is_exceptional_prime(eigenvalue: int, p: int, k: int) -> bool:
    """Real double Satake root: the one case a(tp^(2m)) may keep its sign."""
    return eigenvalue * eigenvalue == 4 * p ** (2 * k - 1)


def extract_eigenvalue(
    before: Form | Sequence[int],
    after: Form | Sequence[int],
    p: int | None = None,
    k: int | None = None,
) -> EigenReport:
    """λ with after(n) = λ·before(n) on the shared index range 1..; index 0 ignored."""
    before, after = _seq(before), _seq(after)
    top = min(len(before), len(after)) - 1
    n0 = next((n for n in range(1, top + 1) if before[n]), None)
    if n0 is None:
        raise HeckeError(f"source sequence vanishes on 1..{top}")
    base = dict(p=p, k=k, checked_up_to=top)
    if after[n0] % before[n0]:
        return EigenReport(
            **base,
            is_eigen=False,
            first_violation=n0,
            diagnostic=f"{after[n0]} / {before[n0]} at n={n0} is not an integer",
        )
    lam = after[n0] // before[n0]
    bad = next((n for n in range(1, top + 1) if after[n] != lam * before[n]), None)
    report = EigenReport(
        **base,
        eigenvalue=lam,
        is_eigen=bad is None,
        first_violation=bad,
        diagnostic=None if bad is None else f"{after[bad]} != {lam}·{before[bad]} at n={bad}",
    )
    if p is not None and k is not None:
        report.satake = satake(lam, p, k)
        report.deligne = deligne_check(lam, p, k)
        report.elementary_bound = elementary_bound_check(lam, p, k)
        report.exceptional = is_exceptional_prime(lam, p, k)
    return report


def hecke_eigenvalue(f: HalfIntegralForm, p: int) -> EigenReport:
    return extract_eigenvalue(f, t_square_half(p, f), p, f.k)


def integral_eigenvalue(F: IntegralForm, p: int) -> EigenReport:
    return extract_eigenvalue(F, t_integral(p, F), p, F.k)


def forced_eigenvalue_for(f: HalfIntegralForm, p: int, eps: int) -> int:
    """−ε·χ*(p)·(p^k + p^(k-1)): forced if the ε-twist of f had constant sign."""
    if eps not in (1, -1):
        raise HeckeError(f"eps must be ±1, got {eps}")
    return -eps * chi_star(f.character, f.k, p) * (p**f.k + p ** (f.k - 1))


# ── Shimura lift ──────────────────────────────────────────────────────────────
@dataclass(frozen=True)
class LiftResult:
    """coeffs[n] = A(n) for 1 <= n <= prec (coeffs[0] = 0)."""

    t: int
    k: int
    level: int
    character: DirichletCharacter
    coeffs: tuple[int, ...] = field(repr=False)
    source: str = ""

    @property
    def prec(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, n: int) -> int:
        return self.coeffs[n]

    def as_form(self) -> IntegralForm:
        return IntegralForm(
            f"lift({self.source},{self.t})", 2 * self.k, self.level, self.character, self.coeffs
        )


def shimura_lift(f: HalfIntegralForm, t: int) -> LiftResult:
    t = _squarefree_t(t, f.prec)
    k, N, a = f.k, f.level, f.coeffs
    prec_a = isqrt(f.prec // t)
    chi = [0] + [chi_t_N(k, N, t, d) * d ** (k - 1) for d in range(1, prec_a + 1)]
    A = [0]
    for n in range(1, prec_a + 1):
        A.append(sum(chi[d] * a[(n // d) ** 2 * t] for d in divisors(n) if chi[d]))
    logging.info("lifted %s at t=%d to precision %d", f.name, t, prec_a)
    # χ² is trivial for the real characters handled here
    return LiftResult(t, k, N // 2, DirichletCharacter.trivial(N // 2), tuple(A), f.name)


def lift_inversion_check(f: HalfIntegralForm, t: int) -> InversionReport:
    """a(tn²) = Σ_{d|n} μ(d)χ_{t,N}(d)d^(k-1)A(n/d) for n <= prec of the lift."""
    lift = shimura_lift(f, t)
    k, N = f.k, f.level
    for n in range(1, lift.prec + 1):
        rhs = sum(
            moebius(d) * chi_t_N(k, N, t, d) * d ** (k - 1) * lift[n // d] for d in divisors(n)
        )
        if rhs != f[t * n * n]:
            return InversionReport(t=t, checked_up_to=n, passed=False, first_violation=n)
    return InversionReport(t=t, checked_up_to=lift.prec, passed=True)


# ── local Euler factor ────────────────────────────────────────────────────────
def local_power_sequence(f: HalfIntegralForm, t: int, p: int) -> list[int]:
    """[a(t p^(2m))] for every m with t p^(2m) <= prec."""
    good_prime(p, f.level)
    t = _squarefree_t(t, f.prec)
    out, n = [], t
    while n <= f.prec:
        out.append(f[n])
        n *= p * p
    return out


def extend_power_sequence(
    a_t: int, eigenvalue: int, chi_t_p: int, p: int, k: int, m_max: int, chi_sq_p: int = 1
) -> list[int]:
    """a(tp^(2m)) for m = 0..m_max as predicted by the local Euler factor."""
    seq = [a_t]
    if m_max >= 1:
        seq.append(a_t * (eigenvalue - chi_t_p * p ** (k - 1)))
    norm = chi_sq_p * p ** (2 * k - 1)
    for _ in range(2, m_max + 1):
        seq.append(eigenvalue * seq[-1] - norm * seq[-2])
    return seq


def recurrence_check(
    f: HalfIntegralForm, t: int, p: int, eigenvalue: int | None = None
) -> RecurrenceReport:
    if eigenvalue is None:
        report = hecke_eigenvalue(f, p)
        if not report.is_eigen:
            raise HeckeError(f"{f.name} is not a T({p}^2) eigenform: {report.diagnostic}")
        eigenvalue = report.eigenvalue
    entries = local_power_sequence(f, t, p)
    try:
        chi_t_p = chi_t_N(f.k, f.level, t, p)
    except ArithError as e:
        raise HeckeError(str(e)) from e
    predicted = extend_power_sequence(
        entries[0], eigenvalue, chi_t_p, p, f.k, len(entries) - 1, f.character.square()(p)
    )
    base = dict(t=t, p=p, eigenvalue=eigenvalue, entries=entries, checked_m=len(entries) - 1)
    for m, (want, got) in enumerate(zip(predicted, entries)):
        if want != got:
            logging.warning("recurrence fails for %s at t=%d p=%d m=%d", f.name, t, p, m)
            return RecurrenceReport(
                **base, passed=False, first_violation_m=m, expected=want, actual=got
            )
    return RecurrenceReport(**base, passed=True)


# ── twists ────────────────────────────────────────────────────────────────────
def twisted_component(f: HalfIntegralForm, p: int, eps: int) -> HalfIntegralForm:
    """a(n) kept where (n/p) = eps; a form of level N·p²."""
    good_prime(p, f.level)
    if eps not in (1, -1):
        raise HeckeError(f"eps must be ±1, got {eps}")
    coeffs = [c if kronecker(n, p) == eps else 0 for n, c in enumerate(f.coeffs)]
    level = f.level * p * p
    return f.with_coeffs(
        coeffs,
        name=f"{f.name}[({p})={eps:+d}]",
        level=level,
        character=DirichletCharacter(f.character.top, level),
    )
