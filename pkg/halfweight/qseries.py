"""
qseries.py  —  exact truncated power series in q
▪ integer numerators over one common denominator (exact rationals)
▪ rational offsets with denominator dividing 24 (η-quotients)
▪ sparse storage for θ / pentagonal factors, numpy object arrays for dense ones

A series is known for exponents offset + i with 0 <= i < prec; reading past
prec raises PrecisionError instead of returning 0.
"""

from __future__ import annotations

import logging
import math
from bisect import bisect_left
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Iterable, Iterator

import numpy as np

from . import settings
from .arith import DirichletCharacter

OFFSET_DENOMINATOR = 24


class QSeriesError(ValueError):
    pass


class PrecisionError(QSeriesError):
    pass


class NonIntegralError(QSeriesError):
    pass


def _as_offset(value) -> Fraction:
    off = Fraction(value)
    if OFFSET_DENOMINATOR % off.denominator:
        raise QSeriesError(f"offset {off} has denominator not dividing 24")
    return off


def _zeros(n: int) -> np.ndarray:
    return np.zeros(n, dtype=object)


def _is_sparse_enough(nonzero: int, prec: int) -> bool:
    return nonzero * settings.SPARSE_RATIO <= prec


class QSeries:
    """Σ (num_i / den) q^(offset + i), i < prec."""

    __slots__ = ("offset", "prec", "den", "_dense", "_idx", "_val")

    def __init__(self, offset, prec: int, den: int = 1, *, dense=None, sparse=None):
        if prec < 1:
            raise QSeriesError(f"precision must be positive, got {prec}")
        if den == 0:
            raise QSeriesError("zero denominator")
        self.offset = _as_offset(offset)
        self.prec = int(prec)
        self.den = int(den)
        self._dense = None
        self._idx: tuple[int, ...] = ()
        self._val: tuple[int, ...] = ()
        if dense is not None:
            arr = np.asarray(dense, dtype=object)
            if len(arr) != self.prec:
                raise QSeriesError(f"dense length {len(arr)} != prec {self.prec}")
            self._dense = arr
        else:
            idx, val = sparse if sparse is not None else ((), ())
            if any(b <= a for a, b in zip(idx, idx[1:])):
                raise QSeriesError("sparse indices must be strictly increasing")
            if idx and (idx[0] < 0 or idx[-1] >= self.prec):
                raise QSeriesError("sparse index outside [0, prec)")
            self._idx, self._val = tuple(idx), tuple(val)
        self._normalize()

    # ── construction ──────────────────────────────────────────────────────────
    @classmethod
    def from_coefficients(cls, coeffs: Iterable, offset=0, prec: int | None = None) -> "QSeries":
        """Dense series from ints / Fractions; prec defaults to the list length."""
        values = [Fraction(c) for c in coeffs]
        if prec is None:
            prec = len(values)
        values = (values + [Fraction(0)] * prec)[:prec]
        den = math.lcm(*(v.denominator for v in values)) if values else 1
        return cls(offset, prec, den, dense=[v.numerator * (den // v.denominator) for v in values])

    @classmethod
    def from_terms(cls, terms: dict, prec: int, offset=0) -> "QSeries":
        """Series from {relative index: coefficient}, indices >= prec dropped."""
        items = sorted((i, Fraction(c)) for i, c in terms.items() if i < prec and c)
        den = math.lcm(*(c.denominator for _, c in items)) if items else 1
        return cls._pick(
            offset, prec, den, {i: c.numerator * (den // c.denominator) for i, c in items}
        )

    @classmethod
    def zero(cls, prec: int, offset=0) -> "QSeries":
        return cls(offset, prec)

    @classmethod
    def _pick(cls, offset, prec: int, den: int, acc: dict[int, int]) -> "QSeries":
        nz = sorted(i for i, v in acc.items() if v)
        if _is_sparse_enough(len(nz), prec):
            return cls(offset, prec, den, sparse=(nz, [acc[i] for i in nz]))
        arr = _zeros(prec)
        for i in nz:
            arr[i] = acc[i]
        return cls(offset, prec, den, dense=arr)

    @classmethod
    def _from_array(cls, offset, prec: int, den: int, arr: np.ndarray) -> "QSeries":
        nz = np.flatnonzero(arr)
        if _is_sparse_enough(len(nz), prec):
            return cls(offset, prec, den, sparse=(nz.tolist(), [arr[i] for i in nz]))
        return cls(offset, prec, den, dense=arr)

    def _normalize(self) -> None:
        if self.den < 0:
            self.den = -self.den
            self._negate_numerators()
        if self.den == 1:
            return
        nums = self._dense.tolist() if self._dense is not None else list(self._val)
        g = math.gcd(self.den, *nums)
        if g > 1:
            self.den //= g
            if self._dense is not None:
                self._dense = self._dense // g
            else:
                self._val = tuple(v // g for v in self._val)

    def _negate_numerators(self) -> None:
        if self._dense is not None:
            self._dense = -self._dense
        else:
            self._val = tuple(-v for v in self._val)

    # ── inspection ────────────────────────────────────────────────────────────
    @property
    def is_sparse(self) -> bool:
        return self._dense is None

    @property
    def density(self) -> str:
        return "sparse" if self.is_sparse else "dense"

    @property
    def end(self) -> Fraction:
        """First exponent that is no longer known."""
        return self.offset + self.prec

    @property
    def is_integral(self) -> bool:
        return self.den == 1

    def terms(self) -> Iterator[tuple[int, int]]:
        """Nonzero (relative index, numerator) pairs in increasing order."""
        if self._dense is None:
            yield from zip(self._idx, self._val)
        else:
            for i in np.flatnonzero(self._dense):
                yield int(i), self._dense[i]

    def nonzero_count(self) -> int:
        if self._dense is None:
            return len(self._idx)
        return int(np.count_nonzero(self._dense))

    def numerators(self) -> np.ndarray:
        """Dense numerator array of length prec (a copy)."""
        if self._dense is not None:
            return self._dense.copy()
        arr = _zeros(self.prec)
        for i, v in zip(self._idx, self._val):
            arr[i] = v
        return arr

    def coefficient(self, exponent) -> Fraction:
        rel = Fraction(exponent) - self.offset
        if rel.denominator != 1 or rel < 0:
            return Fraction(0)
        i = int(rel)
        if i >= self.prec:
            raise PrecisionError(f"q^{exponent} is beyond the known range (< q^{self.end})")
        if self._dense is not None:
            return Fraction(self._dense[i], self.den)
        pos = bisect_left(self._idx, i)
        if pos < len(self._idx) and self._idx[pos] == i:
            return Fraction(self._val[pos], self.den)
        return Fraction(0)

    __getitem__ = coefficient

    def coefficients(self) -> list[Fraction]:
        return [Fraction(v, self.den) for v in self.numerators().tolist()]

    def integer_coefficients(self) -> list[int]:
        if not self.is_integral:
            raise NonIntegralError(f"series has denominator {self.den}")
        return self.numerators().tolist()

    def to_dense(self) -> "QSeries":
        return QSeries(self.offset, self.prec, self.den, dense=self.numerators())

    def to_sparse(self) -> "QSeries":
        pairs = list(self.terms())
        return QSeries(
            self.offset, self.prec, self.den, sparse=([i for i, _ in pairs], [v for _, v in pairs])
        )

    def truncate(self, prec: int) -> "QSeries":
        if prec > self.prec:
            raise PrecisionError(f"cannot extend precision {self.prec} to {prec}")
        if self._dense is not None:
            return QSeries._from_array(self.offset, prec, self.den, self._dense[:prec].copy())
        keep = [(i, v) for i, v in zip(self._idx, self._val) if i < prec]
        return QSeries(self.offset, prec, self.den, sparse=([i for i, _ in keep], [v for _, v in keep]))

    def __eq__(self, other) -> bool:
        if not isinstance(other, QSeries):
            return NotImplemented
        return (
            self.offset == other.offset
            and self.prec == other.prec
            and self.den == other.den
            and list(self.terms()) == list(other.terms())
        )

    __hash__ = None

    def __repr__(self) -> str:
        shown = []
        for i, v in self.terms():
            c = Fraction(v, self.den)
            shown.append(f"{c}*q^({self.offset + i})")
            if len(shown) == 6:
                shown.append("...")
                break
        body = " + ".join(shown) or "0"
        return f"QSeries({body} + O(q^{self.end}), {self.density})"

    # ── operators ─────────────────────────────────────────────────────────────
    def __add__(self, other):
        return add(self, _coerce(other, self))

    __radd__ = __add__

    def __neg__(self):
        return scale(-1, self)

    def __sub__(self, other):
        return add(self, -_coerce(other, self))

    def __rsub__(self, other):
        return add(_coerce(other, self), -self)

    def __mul__(self, other):
        if isinstance(other, QSeries):
            return mul(self, other)
        return scale(other, self)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        return power(self, e)


def _coerce(value, like: QSeries) -> QSeries:
    if isinstance(value, QSeries):
        return value
    return QSeries.from_terms({0: Fraction(value)}, max(1, math.ceil(like.end)))


# ── arithmetic ────────────────────────────────────────────────────────────────
def scale(c, a: QSeries) -> QSeries:
    c = Fraction(c)
    if a._dense is not None:
        return QSeries(a.offset, a.prec, a.den * c.denominator, dense=a._dense * c.numerator)
    return QSeries(
        a.offset,
        a.prec,
        a.den * c.denominator,
        sparse=(a._idx, [v * c.numerator for v in a._val]) if c else ((), ()),
    )


def add(a: QSeries, b: QSeries) -> QSeries:
    """Coefficientwise sum on the common grid, known up to the smaller end."""
    shift = b.offset - a.offset
    if shift.denominator != 1:
        raise QSeriesError(f"offsets {a.offset} and {b.offset} are not on a common grid")
    offset = min(a.offset, b.offset)
    prec = int(min(a.end, b.end) - offset)
    den = math.lcm(a.den, b.den)
    parts = [(a, int(a.offset - offset), den // a.den), (b, int(b.offset - offset), den // b.den)]
    if a.is_sparse and b.is_sparse:
        acc: dict[int, int] = {}
        for s, sh, f in parts:
            for i, v in s.terms():
                if i + sh >= prec:
                    break
                acc[i + sh] = acc.get(i + sh, 0) + v * f
        return QSeries._pick(offset, prec, den, acc)
    out = _zeros(prec)
    for s, sh, f in parts:
        if sh >= prec:
            continue
        if s.is_sparse:
            for i, v in s.terms():
                if i + sh >= prec:
                    break
                out[i + sh] += v * f
        else:
            n = min(prec - sh, s.prec)
            out[sh : sh + n] += s._dense[:n] * f
    return QSeries._from_array(offset, prec, den, out)


def sub(a: QSeries, b: QSeries) -> QSeries:
    return add(a, scale(-1, b))


def _sparse_sparse(a: QSeries, b: QSeries, prec: int) -> dict[int, int]:
    acc: dict[int, int] = {}
    b_terms = list(b.terms())
    for i, x in a.terms():
        if i >= prec:
            break
        for j, y in b_terms:
            if i + j >= prec:
                break
            acc[i + j] = acc.get(i + j, 0) + x * y
    return acc


def _rows(dense: np.ndarray, terms: Iterable[tuple[int, int]], prec: int) -> np.ndarray:
    # O(prec) per sparse term
    out = _zeros(prec)
    for i, c in terms:
        if i >= prec:
            break
        out[i:] += c * dense[: prec - i]
    return out


def _schoolbook(x: np.ndarray, y: np.ndarray, prec: int) -> np.ndarray:
    out = _zeros(prec)
    nz = [int(i) for i in np.flatnonzero(x[:prec])]
    chunk = settings.CHUNK

    def fill(lo: int) -> None:
        hi = min(lo + chunk, prec)
        block = out[lo:hi]
        for i in nz:
            if i >= hi:
                break
            start = max(lo, i)
            block[start - lo :] += x[i] * y[start - i : hi - i]

    starts = range(0, prec, chunk)
    if settings.WORKERS > 1 and len(starts) > 1:
        # chunks write disjoint slices of `out`
        with ThreadPoolExecutor(max_workers=settings.WORKERS) as pool:
            list(pool.map(fill, starts))
    else:
        for lo in starts:
            fill(lo)
    return out


def mul(a: QSeries, b: QSeries) -> QSeries:
    """Truncated Cauchy product; cost O(prec·s) when one side has s terms."""
    offset = a.offset + b.offset
    prec = min(a.prec, b.prec)
    den = a.den * b.den
    if a.is_sparse and b.is_sparse:
        logging.debug("mul: sparse x sparse (%d x %d terms)", len(a._idx), len(b._idx))
        return QSeries._pick(offset, prec, den, _sparse_sparse(a, b, prec))
    if a.is_sparse or b.is_sparse:
        sparse, dense = (a, b) if a.is_sparse else (b, a)
        logging.debug("mul: dense x sparse (%d terms, prec %d)", len(sparse._idx), prec)
        return QSeries._from_array(offset, prec, den, _rows(dense._dense, sparse.terms(), prec))
    logging.debug("mul: dense x dense schoolbook, prec %d", prec)
    return QSeries._from_array(offset, prec, den, _schoolbook(a._dense, b._dense, prec))


def power(a: QSeries, e: int) -> QSeries:
    if e < 1:
        raise QSeriesError(f"exponent must be a positive integer, got {e}")
    out = a
    for _ in range(e - 1):
        out = mul(out, a)
    return out


def derive(a: QSeries) -> QSeries:
    """D = q·d/dq: the coefficient at exponent e is multiplied by e."""
    num, od = a.offset.numerator, a.offset.denominator
    if a.is_sparse:
        acc = {i: v * (num + i * od) for i, v in a.terms()}
        return QSeries._pick(a.offset, a.prec, a.den * od, acc)
    factors = np.arange(a.prec, dtype=object) * od + num
    return QSeries._from_array(a.offset, a.prec, a.den * od, a._dense * factors)


def dilate(m: int, a: QSeries, cap: int | None = None) -> QSeries:
    """q ↦ q^m; the known range scales to m·prec, optionally capped."""
    if m < 1:
        raise QSeriesError(f"dilation must be a positive integer, got {m}")
    prec = m * a.prec if cap is None else min(m * a.prec, cap)
    idx, val = [], []
    for i, v in a.terms():
        if m * i >= prec:
            break
        idx.append(m * i)
        val.append(v)
    return QSeries._pick(m * a.offset, prec, a.den, dict(zip(idx, val)))


def u_op(m: int, a: QSeries) -> QSeries:
    """U_m: coefficient of q^n becomes the coefficient of q^(mn)."""
    if m < 1:
        raise QSeriesError(f"U_m needs a positive integer m, got {m}")
    if a.offset.denominator != 1:
        raise QSeriesError(f"U_{m} on a series with fractional offset {a.offset}")
    off, end = int(a.offset), int(a.end)
    new_off = -(-off // m)
    new_end = -(-end // m)
    prec = new_end - new_off
    if prec < 1:
        raise PrecisionError(f"U_{m} leaves no known coefficients")
    if a.is_sparse:
        acc = {(off + i) // m - new_off: v for i, v in a.terms() if (off + i) % m == 0}
        return QSeries._pick(new_off, prec, a.den, acc)
    first = m * new_off - off
    picked = a._dense[first::m][:prec].copy()
    return QSeries._from_array(new_off, prec, a.den, picked)


# ── generators ────────────────────────────────────────────────────────────────
def _pentagonal(limit: int) -> Iterator[tuple[int, int]]:
    """(exponent, sign) of Σ (-1)^j q^(j(3j-1)/2) below limit, ascending."""
    yield 0, 1
    j = 1
    while True:
        lo = j * (3 * j - 1) // 2
        if lo >= limit:
            return
        sign = -1 if j % 2 else 1
        yield lo, sign
        hi = j * (3 * j + 1) // 2
        if hi < limit:
            yield hi, sign
        j += 1


def euler(prec: int, stride: int = 1) -> QSeries:
    """∏(1 - q^(stride·n)) by the pentagonal number theorem; sparse."""
    if prec < 1:
        raise QSeriesError(f"precision must be positive, got {prec}")
    idx, val = [], []
    for e, s in _pentagonal(-(-prec // stride)):
        if stride * e < prec:
            idx.append(stride * e)
            val.append(s)
    return QSeries(0, prec, sparse=(idx, val))


def eta(m: int, prec: int) -> QSeries:
    """η(mz) = q^(m/24) ∏(1 - q^(mn)), known for prec terms past the offset."""
    if m < 1:
        raise QSeriesError(f"eta needs a positive dilation, got {m}")
    base = euler(prec, stride=m)
    return QSeries(Fraction(m, 24), prec, sparse=(base._idx, base._val))


def theta(m: int, prec: int) -> QSeries:
    """θ(mz) = Σ_{n∈Z} q^(m n²)."""
    if m < 1:
        raise QSeriesError(f"theta needs a positive dilation, got {m}")
    if prec < 1:
        raise QSeriesError(f"precision must be positive, got {prec}")
    idx, val = [0], [1]
    n = 1
    while m * n * n < prec:
        idx.append(m * n * n)
        val.append(2)
        n += 1
    return QSeries(0, prec, sparse=(idx, val))


def theta_psi(psi: DirichletCharacter, m: int, prec: int) -> QSeries:
    """θ_{ψ,m} = Σ_{n∈Z} ψ(n) n q^(m n²) = 2 Σ_{n≥1} ψ(n) n q^(m n²) for odd ψ."""
    if not psi.is_odd:
        raise QSeriesError(f"θ_ψ needs an odd character, {psi.spec} is even")
    if not psi.is_primitive:
        raise QSeriesError(f"θ_ψ needs a primitive character, {psi.spec} is not")
    if m < 1 or prec < 1:
        raise QSeriesError("dilation and precision must be positive")
    idx, val = [], []
    n = 1
    while m * n * n < prec:
        c = psi.value(n)
        if c:
            idx.append(m * n * n)
            val.append(2 * c * n)
        n += 1
    return QSeries(0, prec, sparse=(idx, val))


def sigma3_table(limit: int) -> np.ndarray:
    """σ₃(n) for 0 <= n < limit by a divisor-power sieve (σ₃(0) stored as 0)."""
    sig = _zeros(limit)
    for d in range(1, limit):
        sig[d::d] += d**3
    return sig


def eisenstein_e4(prec: int) -> QSeries:
    """E₄ = 1 + 240 Σ σ₃(n) q^n."""
    if prec < 1:
        raise QSeriesError(f"precision must be positive, got {prec}")
    arr = sigma3_table(prec) * 240
    arr[0] = 1
    return QSeries(0, prec, dense=arr)
