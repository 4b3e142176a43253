"""
forms.py  —  finalized modular forms and the named constructors
▪ δ ∈ S⁺_{13/2}(4), g ∈ S⁺_{3/2}(44) on the half-integral side
▪ Δ, G = η(z)²η(11z)², E₄ on the integral side
▪ θ_{ψ,m} unary theta series

Level and character are declared metadata; no transformation law is checked.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable

from . import formspec
from . import qseries as qs
from .arith import DirichletCharacter


class FormError(ValueError):
    pass


def _check_coeffs(coeffs) -> tuple[int, ...]:
    coeffs = tuple(coeffs)
    if not coeffs:
        raise FormError("a form needs at least a(0)")
    bad = next((n for n, c in enumerate(coeffs) if not isinstance(c, int)), None)
    if bad is not None:
        raise FormError(f"a({bad}) = {coeffs[bad]!r} is not an integer")
    return coeffs


def _read(coeffs: tuple[int, ...], n: int) -> int:
    if n < 0:
        return 0
    if n >= len(coeffs):
        raise qs.PrecisionError(f"a({n}) is beyond the precision {len(coeffs) - 1}")
    return coeffs[n]


@dataclass(frozen=True)
class HalfIntegralForm:
    """Weight weight_num/2 = k + 1/2; coeffs[n] = a(n) for 0 <= n <= prec."""

    name: str
    weight_num: int
    level: int
    character: DirichletCharacter
    coeffs: tuple[int, ...] = field(repr=False)
    plus_space: bool = False

    def __post_init__(self):
        if self.weight_num < 1 or self.weight_num % 2 == 0:
            raise FormError(f"weight numerator must be odd and positive, got {self.weight_num}")
        if self.level < 1 or self.level % 4:
            raise FormError(f"level {self.level} is not divisible by 4")
        object.__setattr__(self, "coeffs", _check_coeffs(self.coeffs))
        if self.plus_space:
            bad = plus_space_violations(self.k, self.coeffs)
            if bad:
                raise FormError(f"{self.name}: plus-space condition fails at n={bad[:5]}")

    @property
    def k(self) -> int:
        return (self.weight_num - 1) // 2

    @property
    def weight(self) -> Fraction:
        return Fraction(self.weight_num, 2)

    @property
    def prec(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, n: int) -> int:
        return _read(self.coeffs, n)

    coefficient = __getitem__

    def with_coeffs(self, coeffs, **changes) -> "HalfIntegralForm":
        return replace(self, coeffs=tuple(coeffs), **changes)


@dataclass(frozen=True)
class IntegralForm:
    """Weight `weight` form with coeffs[n] = A(n) for 0 <= n <= prec."""

    name: str
    weight: int
    level: int
    character: DirichletCharacter
    coeffs: tuple[int, ...] = field(repr=False)

    def __post_init__(self):
        if self.weight < 0:
            raise FormError(f"weight must be non-negative, got {self.weight}")
        if self.level < 1:
            raise FormError(f"level must be positive, got {self.level}")
        object.__setattr__(self, "coeffs", _check_coeffs(self.coeffs))

    @property
    def prec(self) -> int:
        return len(self.coeffs) - 1

    @property
    def k(self) -> int:
        # half the weight, so p^(2k-1) = p^(weight-1) in the Hecke formulas
        return self.weight // 2

    @property
    def is_cusp(self) -> bool:
        return self.coeffs[0] == 0

    def __getitem__(self, n: int) -> int:
        return _read(self.coeffs, n)

    coefficient = __getitem__

    def with_coeffs(self, coeffs, **changes) -> "IntegralForm":
        return replace(self, coeffs=tuple(coeffs), **changes)


Form = HalfIntegralForm | IntegralForm


# ── plus space ────────────────────────────────────────────────────────────────
def plus_space_violations(k: int, coeffs) -> list[int]:
    sign = -1 if k % 2 else 1
    return [n for n, c in enumerate(coeffs) if c and (sign * n) % 4 in (2, 3)]


def plus_space_check(f: HalfIntegralForm) -> list[int]:
    """Indices n <= prec with a(n) != 0 although (-1)^k n ≡ 2, 3 mod 4."""
    return plus_space_violations(f.k, f.coeffs)


# ── finalization ──────────────────────────────────────────────────────────────
def finalize(series: qs.QSeries, prec: int) -> tuple[int, ...]:
    """Integer coefficients a(0..prec) of a series with integral offset."""
    if series.offset.denominator != 1:
        raise FormError(f"offset {series.offset} is fractional, not a q-expansion in q^n")
    off = int(series.offset)
    if off < 0:
        raise FormError(f"offset {off} is negative")
    if series.end < prec + 1:
        raise qs.PrecisionError(f"series known below q^{series.end}, a({prec}) requested")
    try:
        nums = series.integer_coefficients()
    except qs.NonIntegralError as e:
        raise FormError(f"coefficients are not integral: {e}") from e
    if off > prec:
        return (0,) * (prec + 1)
    return tuple([0] * off + nums[: prec + 1 - off])


def _timed(name: str, prec: int, build: Callable[[], tuple[int, ...]]) -> tuple[int, ...]:
    t0 = time.perf_counter()
    coeffs = build()
    logging.info("built %s to precision %d in %.2fs", name, prec, time.perf_counter() - t0)
    return coeffs


def _need(prec: int) -> None:
    if prec < 1:
        raise FormError(f"precision must be positive, got {prec}")


# ── half-integral weight ──────────────────────────────────────────────────────
def delta_series(prec: int) -> qs.QSeries:
    """(1/4)(2·E₄(4z)·Dθ − (DE₄)(4z)·θ), known below q^prec."""
    th = qs.theta(1, prec)
    e4 = qs.eisenstein_e4(-(-prec // 4))
    e4_4z = qs.dilate(4, e4, cap=prec)
    de4_4z = qs.dilate(4, qs.derive(e4), cap=prec)
    body = 2 * e4_4z * qs.derive(th) - de4_4z * th
    return qs.scale(Fraction(1, 4), body)


def delta_form(prec: int) -> HalfIntegralForm:
    _need(prec)
    coeffs = _timed("delta", prec, lambda: finalize(delta_series(prec + 1), prec))
    return HalfIntegralForm("delta", 13, 4, DirichletCharacter.trivial(4), coeffs, plus_space=True)


def g_series(prec: int) -> qs.QSeries:
    """(1/2)·(θ(11z)η(2z)η(22z)) | U₄ with a(n) known for n <= prec.

    Only the odd terms 2q^(11k²) of θ(11z) reach U₄, so the product is even;
    halving gives a(3) = 1.
    """
    work = 4 * prec
    product = qs.theta(11, work) * qs.eta(2, work) * qs.eta(22, work)
    return qs.scale(Fraction(1, 2), qs.u_op(4, product))


def g_form(prec: int) -> HalfIntegralForm:
    _need(prec)
    coeffs = _timed("g", prec, lambda: finalize(g_series(prec), prec))
    return HalfIntegralForm("g", 3, 44, DirichletCharacter.trivial(44), coeffs, plus_space=True)


def unary_theta_form(psi: DirichletCharacter, m: int, prec: int) -> HalfIntegralForm:
    """θ_{ψ,m} in S_{3/2}(4r²m, (−4m/·)ψ), r the modulus of ψ."""
    _need(prec)
    level = 4 * psi.modulus**2 * m
    coeffs = finalize(qs.theta_psi(psi, m, prec + 1), prec)
    character = DirichletCharacter(-4 * m * psi.top, level)
    return HalfIntegralForm(f"thetapsi({psi.top},{m})", 3, level, character, coeffs)


# ── integral weight ───────────────────────────────────────────────────────────
def ramanujan_delta(prec: int) -> IntegralForm:
    """Δ = η(z)²⁴, weight 12, level 1."""
    _need(prec)
    coeffs = _timed("Delta", prec, lambda: finalize(qs.eta(1, prec) ** 24, prec))
    return IntegralForm("Delta", 12, 1, DirichletCharacter.trivial(1), coeffs)


def x0_11_form(prec: int) -> IntegralForm:
    """G = η(z)²η(11z)², weight 2, level 11."""
    _need(prec)
    coeffs = _timed(
        "G11", prec, lambda: finalize(qs.eta(1, prec) ** 2 * qs.eta(11, prec) ** 2, prec)
    )
    return IntegralForm("G11", 2, 11, DirichletCharacter.trivial(11), coeffs)


def e4_form(prec: int) -> IntegralForm:
    _need(prec)
    coeffs = finalize(qs.eisenstein_e4(prec + 1), prec)
    return IntegralForm("E4", 4, 1, DirichletCharacter.trivial(1), coeffs)


FORMS: dict[str, Callable[[int], Form]] = {
    "delta": delta_form,
    "g": g_form,
    "Delta": ramanujan_delta,
    "G11": x0_11_form,
    "E4": e4_form,
}


# ── FormSpec strings ──────────────────────────────────────────────────────────
def form_from_spec(
    text: str,
    prec: int,
    level: int | None = None,
    character: DirichletCharacter | None = None,
) -> Form:
    """Finalize a FormSpec expression; weight is inferred, level/character declared."""
    _need(prec)
    spec = formspec.parse_formspec(text)
    weight = formspec.infer_weight(spec)
    level = level or formspec.default_level(spec)
    character = character or DirichletCharacter.trivial(level)
    coeffs = _timed(text, prec, lambda: finalize(formspec.evaluate(spec, prec + 1), prec))
    if weight.denominator == 2:
        return HalfIntegralForm(text, weight.numerator, level, character, coeffs)
    if weight.denominator != 1:
        raise FormError(f"weight {weight} is neither integral nor half-integral")
    return IntegralForm(text, int(weight), level, character, coeffs)


def build_form(name_or_spec: str, prec: int, **metadata) -> Form:
    if name_or_spec in FORMS:
        return FORMS[name_or_spec](prec)
    return form_from_spec(name_or_spec, prec, **metadata)
