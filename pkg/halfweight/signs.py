"""
signs.py  —  sign changes and positive-coefficient ratios
▪ R⁺_tot(f, X) = #{n <= X : a(n) > 0} / #{n <= X : a(n) != 0}
▪ R⁺_fund(f, X): the same over n with (-1)^k n a fundamental discriminant
▪ subsequences a(tn²), a(t·n_t²) across square-free t, and twisted-class witnesses
"""

from __future__ import annotations

import logging
from fractions import Fraction
from typing import Iterable, Sequence

from pydantic import BaseModel

from .arith import is_squarefree, kronecker, squarefree_sieve
from .forms import Form, HalfIntegralForm
from .hecke import HeckeError, elementary_bound_check, forced_eigenvalue_for, good_prime

SCHEMA_VERSION = 1


class SignStatsError(ValueError):
    pass


# ── rendering ─────────────────────────────────────────────────────────────────
def render_ratio(ratio: Fraction, digits: int = 6) -> str:
    """Decimal rendering, rounding half away from zero."""
    ratio = Fraction(ratio)
    sign = "-" if ratio < 0 else ""
    num, den = abs(ratio.numerator), ratio.denominator
    scaled = (2 * num * 10**digits + den) // (2 * den)
    whole, frac = divmod(scaled, 10**digits)
    return f"{sign}{whole}.{frac:0{digits}d}" if digits else f"{sign}{whole}"


def table_digits(X: int) -> int:
    """Decimals printed in the ratio tables: 3 below 10⁴, 6 from there on."""
    return 3 if X < 10_000 else 6


# ── reports ───────────────────────────────────────────────────────────────────
class SurveyEntry(BaseModel):
    t: int
    n_t: int | None = None
    value: int | None = None


class SignStatsReport(BaseModel):
    schema_version: int = SCHEMA_VERSION
    label: str
    X: int
    n_pos: int
    n_neg: int
    n_zero_skipped: int
    numerator: int
    denominator: int
    ratio_text: str
    sign_change_count: int
    change_positions: list[int]
    entries: list[SurveyEntry] | list[int] | None = None

    @property
    def ratio(self) -> Fraction | None:
        return Fraction(self.numerator, self.denominator) if self.denominator else None


class Witness(BaseModel):
    n: int
    value: int


class TwistClass(BaseModel):
    eps: int
    negative: Witness | None = None
    positive: Witness | None = None
    forced_eigenvalue: int
    bound_rules_out: bool

    @property
    def both_signs(self) -> bool:
        return self.negative is not None and self.positive is not None


class TwistWitnessReport(BaseModel):
    schema_version: int = SCHEMA_VERSION
    form: str
    p: int
    X: int
    classes: list[TwistClass]

    @property
    def passed(self) -> bool:
        return all(c.both_signs for c in self.classes)


# ── sign changes ──────────────────────────────────────────────────────────────
def sign_changes(seq: Iterable[int]) -> tuple[int, list[int]]:
    """Flips between consecutive nonzero entries; positions are 1-based indices of
    the entry that starts the new sign."""
    positions, last = [], 0
    for i, value in enumerate(seq, start=1):
        if not value:
            continue
        sign = 1 if value > 0 else -1
        if last and sign != last:
            positions.append(i)
        last = sign
    return len(positions), positions


def _coeffs(f: Form | Sequence[int]) -> Sequence[int]:
    return f.coeffs if hasattr(f, "coeffs") else f


def first_negative(f: Form | Sequence[int]) -> int | None:
    a = _coeffs(f)
    return next((n for n in range(1, len(a)) if a[n] < 0), None)


def _within(f: Form, X: int) -> None:
    if X < 1:
        raise SignStatsError(f"cutoff must be positive, got {X}")
    if X > f.prec:
        raise SignStatsError(f"X={X} is beyond the precision {f.prec} of {f.name}")


def subseq_t_n2(f: Form, t: int, X: int) -> list[int]:
    """[a(t n²)] for 1 <= n <= X."""
    if t < 1 or not is_squarefree(t):
        raise SignStatsError(f"t={t} is not a square-free positive integer")
    if t * X * X > f.prec:
        raise SignStatsError(f"t·X² = {t * X * X} is beyond the precision {f.prec}")
    return [f[t * n * n] for n in range(1, X + 1)]


def sign_report(
    label: str, X: int, values: Sequence[int], digits: int = 6, allow_empty: bool = False
) -> SignStatsReport:
    """Counts over `values`; the ratio needs a nonzero entry unless `allow_empty`."""
    n_pos = sum(1 for v in values if v > 0)
    n_neg = sum(1 for v in values if v < 0)
    if n_pos + n_neg == 0 and not allow_empty:
        raise SignStatsError(f"{label}: no nonzero coefficient up to X={X}")
    count, positions = sign_changes(values)
    return SignStatsReport(
        label=label,
        X=X,
        n_pos=n_pos,
        n_neg=n_neg,
        n_zero_skipped=len(values) - n_pos - n_neg,
        numerator=n_pos,
        denominator=n_pos + n_neg,
        ratio_text=(
            render_ratio(Fraction(n_pos, n_pos + n_neg), digits) if n_pos + n_neg else "n/a"
        ),
        sign_change_count=count,
        change_positions=positions,
    )


# ── ratios ────────────────────────────────────────────────────────────────────
def r_plus_tot(f: Form, X: int) -> SignStatsReport:
    _within(f, X)
    return sign_report("R_tot", X, f.coeffs[1 : X + 1])


def fundamental_indices(X: int, sign: int) -> list[int]:
    """n <= X with sign·n a fundamental discriminant (1 included)."""
    flags = squarefree_sieve(X)
    out = []
    for n in range(1, X + 1):
        d = sign * n
        if d == 1:
            out.append(n)
        elif d % 4 == 1:
            if flags[n]:
                out.append(n)
        elif d % 4 == 0 and (d // 4) % 4 in (2, 3) and flags[n // 4]:
            out.append(n)
    return out


def r_plus_fund(f: HalfIntegralForm, X: int) -> SignStatsReport:
    _within(f, X)
    sign = -1 if f.k % 2 else 1
    values = [f[n] for n in fundamental_indices(X, sign)]
    return sign_report("R_fund", X, values)


# ── restricted sets of square-free t ──────────────────────────────────────────
def dprime_filter(
    T: Iterable[int], primes: Sequence[int] = (), eps: Sequence[int] = (), level: int | None = None
) -> list[int]:
    """t in T with (t/p_j) = ε_j for every j."""
    if len(primes) != len(eps):
        raise SignStatsError(f"{len(primes)} primes but {len(eps)} signs")
    if len(set(primes)) != len(primes):
        raise SignStatsError(f"primes must be distinct: {list(primes)}")
    if any(e not in (1, -1) for e in eps):
        raise SignStatsError(f"signs must be ±1: {list(eps)}")
    if level is not None:
        try:
            for p in primes:
                good_prime(p, level)
        except HeckeError as e:
            raise SignStatsError(str(e)) from e
    conditions = list(zip(primes, eps))
    return [t for t in T if all(kronecker(t, p) == e for p, e in conditions)]


def squarefree_sign_survey(
    f: HalfIntegralForm, X: int, primes: Sequence[int] = (), eps: Sequence[int] = ()
) -> SignStatsReport:
    """Sign of a(t·n_t²) over square-free t <= X, n_t the smallest n giving a nonzero
    coefficient within precision. Change positions are reported as values of t."""
    _within(f, X)
    flags = squarefree_sieve(X)
    ts = dprime_filter((t for t in range(1, X + 1) if flags[t]), primes, eps, f.level)
    entries = []
    for t in ts:
        n = 1
        while t * n * n <= f.prec and not f[t * n * n]:
            n += 1
        if t * n * n <= f.prec:
            entries.append(SurveyEntry(t=t, n_t=n, value=f[t * n * n]))
        else:
            entries.append(SurveyEntry(t=t))
    found = [e for e in entries if e.value is not None]
    report = sign_report("survey", X, [e.value for e in found], allow_empty=True)
    report.n_zero_skipped = len(entries) - len(found)
    report.change_positions = [found[i - 1].t for i in report.change_positions]
    report.entries = entries
    logging.info(
        "survey of %s up to t=%d: %d of %d t with a nonzero a(t·n²)",
        f.name, X, len(found), len(entries),
    )
    return report


# ── twisted classes ───────────────────────────────────────────────────────────
def twist_witnesses(f: HalfIntegralForm, p: int, X: int) -> TwistWitnessReport:
    """Smallest n, n' <= X in each class (n/p) = ε with a(n) < 0 < a(n')."""
    _within(f, X)
    try:
        good_prime(p, f.level)
    except HeckeError as e:
        raise SignStatsError(str(e)) from e
    classes = []
    for eps in (1, -1):
        neg = pos = None
        for n in range(1, X + 1):
            if kronecker(n, p) != eps or not f[n]:
                continue
            if f[n] < 0 and neg is None:
                neg = Witness(n=n, value=f[n])
            elif f[n] > 0 and pos is None:
                pos = Witness(n=n, value=f[n])
            if neg is not None and pos is not None:
                break
        forced = forced_eigenvalue_for(f, p, eps)
        classes.append(
            TwistClass(
                eps=eps,
                negative=neg,
                positive=pos,
                forced_eigenvalue=forced,
                bound_rules_out=not elementary_bound_check(forced, p, f.k),
            )
        )
    return TwistWitnessReport(form=f.name, p=p, X=X, classes=classes)
