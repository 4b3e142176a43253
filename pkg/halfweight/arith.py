"""
arith.py  —  number-theoretic primitives
▪ extended Kronecker symbol and the real characters built on it
▪ fundamental discriminants, square-free parts, divisors, Möbius
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd, lcm

import numpy as np
from sympy import divisors as _sympy_divisors
from sympy import factorint
from sympy.functions.combinatorial.numbers import jacobi_symbol


class ArithError(ValueError):
    pass


# ── Kronecker symbol ──────────────────────────────────────────────────────────
def kronecker(a: int, n: int) -> int:
    """Extended Kronecker symbol (a/n) for arbitrary integers a, n."""
    if n == 0:
        return 1 if a in (1, -1) else 0
    sign = 1
    if n < 0:
        n = -n
        if a < 0:
            sign = -1
    twos = (n & -n).bit_length() - 1
    if twos:
        if a % 2 == 0:
            return 0
        n >>= twos
        # (a/2) = -1 exactly for a ≡ ±3 mod 8
        if twos % 2 == 1 and a % 8 in (3, 5):
            sign = -sign
    if n == 1:
        return sign
    return sign * int(jacobi_symbol(a % n, n))


# ── factorisation helpers ─────────────────────────────────────────────────────
def _positive(n: int, what: str = "n") -> int:
    if n < 1:
        raise ArithError(f"{what} must be a positive integer, got {n}")
    return n


def is_squarefree(n: int) -> bool:
    if n == 0:
        return False
    return all(e == 1 for e in factorint(abs(n)).values())


def squarefree_sieve(limit: int) -> np.ndarray:
    """flags[n] is True iff n is square-free, for 0 <= n <= limit (flags[0] False)."""
    flags = np.ones(limit + 1, dtype=bool)
    flags[0] = False
    q = 2
    while q * q <= limit:
        flags[q * q :: q * q] = False
        q += 1
    return flags


def squarefree_decompose(n: int) -> tuple[int, int]:
    """n = t·m² with t square-free; returns (t, m)."""
    _positive(n)
    t, m = 1, 1
    for p, e in factorint(n).items():
        if e % 2:
            t *= p
        m *= p ** (e // 2)
    return t, m


def squarefree_kernel(d: int) -> int:
    """Square-free part of d, keeping the sign."""
    if d == 0:
        raise ArithError("square-free kernel of 0")
    t, _ = squarefree_decompose(abs(d))
    return t if d > 0 else -t


def divisors(n: int) -> list[int]:
    return list(_sympy_divisors(_positive(n)))


def moebius(n: int) -> int:
    exps = factorint(_positive(n)).values()
    if any(e > 1 for e in exps):
        return 0
    return -1 if len(exps) % 2 else 1


def is_fundamental_discriminant(d: int) -> bool:
    """d = 1, or d ≡ 1 mod 4 square-free, or d = 4m with m ≡ 2,3 mod 4 square-free."""
    if d == 0:
        raise ArithError("0 is not a discriminant")
    if d == 1:
        return True
    if d % 4 == 1:
        return is_squarefree(d)
    if d % 4 == 0:
        m = d // 4
        return m % 4 in (2, 3) and is_squarefree(m)
    return False


def field_discriminant(d: int) -> int:
    """Discriminant of Q(√d); 1 when d is a square."""
    t = squarefree_kernel(d)
    if t == 1:
        return 1
    return t if t % 4 == 1 else 4 * t


# ── characters ────────────────────────────────────────────────────────────────
@dataclass(frozen=True)
class DirichletCharacter:
    """Real character a ↦ (top/a) modulo `modulus` (0 on a not coprime to it)."""

    top: int
    modulus: int

    def __post_init__(self):
        if self.modulus < 1:
            raise ArithError(f"character modulus must be positive, got {self.modulus}")
        if self.top == 0:
            raise ArithError("(0/·) is not a character")
        # on units mod N, (top/·) = (disc/·) once the primes of top/disc divide N
        disc = abs(field_discriminant(self.top))
        _, m = squarefree_decompose(abs(self.top))
        if self.modulus % disc or any(self.modulus % p for p in factorint(m)):
            raise ArithError(
                f"(top={self.top}/·) is not a character modulo {self.modulus}"
            )

    @classmethod
    def trivial(cls, modulus: int) -> "DirichletCharacter":
        return cls(1, modulus)

    @classmethod
    def quadratic(cls, disc: int) -> "DirichletCharacter":
        """Primitive character (disc/·) of a fundamental discriminant."""
        if not is_fundamental_discriminant(disc) or disc == 1:
            raise ArithError(f"{disc} is not a non-trivial fundamental discriminant")
        return cls(disc, abs(disc))

    @classmethod
    def parse(cls, text: str) -> "DirichletCharacter":
        """Inverse of `spec`: 'trivial:<N>' or 'kronecker:<top>/mod:<N>'."""
        text = text.strip()
        try:
            if text.startswith("trivial:"):
                return cls.trivial(int(text[len("trivial:"):]))
            if text.startswith("kronecker:"):
                top, _, mod = text[len("kronecker:"):].partition("/mod:")
                return cls(int(top), int(mod))
        except ValueError as e:
            raise ArithError(f"bad character spec {text!r}: {e}") from e
        raise ArithError(f"bad character spec {text!r}")

    @property
    def spec(self) -> str:
        if self.is_trivial:
            return f"trivial:{self.modulus}"
        return f"kronecker:{self.top}/mod:{self.modulus}"

    @property
    def is_trivial(self) -> bool:
        return self.top == 1

    @property
    def is_odd(self) -> bool:
        return self.top < 0

    @property
    def conductor(self) -> int:
        return abs(field_discriminant(self.top))

    @property
    def is_primitive(self) -> bool:
        return self.conductor == self.modulus

    def __call__(self, a: int) -> int:
        return self.value(a)

    def value(self, a: int) -> int:
        if gcd(a, self.modulus) != 1:
            return 0
        return kronecker(self.top, a)

    def times(self, other: "DirichletCharacter") -> "DirichletCharacter":
        return DirichletCharacter(self.top * other.top, lcm(self.modulus, other.modulus))

    def square(self) -> "DirichletCharacter":
        return DirichletCharacter.trivial(self.modulus)


# ── the characters attached to a form ─────────────────────────────────────────
def chi_t_N(k: int, N: int, t: int, d: int) -> int:
    """χ_{t,N}(d) = ((-1)^k N² t / d)."""
    if N % 4:
        raise ArithError(f"level {N} is not divisible by 4")
    if t < 1 or not is_squarefree(t):
        raise ArithError(f"t={t} is not a square-free positive integer")
    return kronecker((-1) ** k * N * N * t, d)


def chi_star(chi: DirichletCharacter, k: int, a: int) -> int:
    """χ*(a) = (-4/a)^k χ(a)."""
    return kronecker(-4, a) ** k * chi.value(a)
