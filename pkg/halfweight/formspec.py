"""
formspec.py  —  a small expression language for q-expansions

    expr   := term (('+'|'-') term)*
    term   := factor ('*' factor)*
    factor := primary ('^' int)? | rational '*' factor
    primary:= atom | '(' expr ')' | 'D(' expr ')' | 'U(' int ',' expr ')'
    atom   := 'eta(' int ')' | 'theta(' int ')' | 'thetapsi(' int ',' int ')' | 'E4(' int ')'

The integer inside an atom is the dilation m (the form evaluated at mz);
thetapsi(D, m) takes the discriminant D of an odd primitive character.
D is q·d/dq, U(m, ·) the operator a(n) ↦ a(mn).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from lark import Lark, Transformer, v_args
from lark.exceptions import UnexpectedEOF, UnexpectedInput, UnexpectedToken, VisitError

from . import qseries as qs
from .arith import ArithError, DirichletCharacter


class FormSpecError(ValueError):
    def __init__(self, message: str, offset: int | None = None):
        self.message, self.offset = message, offset
        if offset is not None:
            message = f"at byte {offset}: {message}"
        super().__init__(message)


GRAMMAR = r"""
?start: expr

?expr: term
     | expr "+" term            -> add
     | expr "-" term            -> sub

?term: factor
     | term "*" factor          -> mul

?factor: power
       | rational "*" factor    -> scale

?power: primary
      | primary "^" INT         -> pow

?primary: atom
        | "(" expr ")"
        | "D" "(" expr ")"              -> deriv
        | "U" "(" INT "," expr ")"      -> uop

?atom: "eta" "(" INT ")"                -> eta
     | "theta" "(" INT ")"              -> theta
     | "thetapsi" "(" signed "," INT ")" -> thetapsi
     | "E4" "(" INT ")"                 -> e4

rational: INT ("/" INT)?

signed: INT          -> pos_int
      | MINUS INT    -> neg_int

MINUS: "-"

%import common.INT
%import common.WS
%ignore WS
"""


# ── AST ───────────────────────────────────────────────────────────────────────
@dataclass(frozen=True)
class Eta:
    m: int


@dataclass(frozen=True)
class Theta:
    m: int


@dataclass(frozen=True)
class ThetaPsi:
    disc: int
    m: int


@dataclass(frozen=True)
class E4:
    m: int


@dataclass(frozen=True)
class Deriv:
    arg: "FormSpec"


@dataclass(frozen=True)
class UOp:
    m: int
    arg: "FormSpec"


@dataclass(frozen=True)
class Add:
    left: "FormSpec"
    right: "FormSpec"


@dataclass(frozen=True)
class Sub:
    left: "FormSpec"
    right: "FormSpec"


@dataclass(frozen=True)
class Mul:
    left: "FormSpec"
    right: "FormSpec"


@dataclass(frozen=True)
class Pow:
    base: "FormSpec"
    exp: int


@dataclass(frozen=True)
class Scale:
    factor: Fraction
    arg: "FormSpec"


FormSpec = Eta | Theta | ThetaPsi | E4 | Deriv | UOp | Add | Sub | Mul | Pow | Scale


# ── parser ────────────────────────────────────────────────────────────────────
def _positive(tok, what: str) -> int:
    value = int(tok)
    if value < 1:
        raise FormSpecError(f"{what} must be >= 1, got {value}", tok.start_pos)
    return value


@v_args(inline=True)
class _ToAst(Transformer):
    def add(self, left, right):
        return Add(left, right)

    def sub(self, left, right):
        return Sub(left, right)

    def mul(self, left, right):
        return Mul(left, right)

    def scale(self, factor, arg):
        return Scale(factor, arg)

    def pow(self, base, exp):
        return Pow(base, _positive(exp, "exponent"))

    def deriv(self, arg):
        return Deriv(arg)

    def uop(self, m, arg):
        return UOp(_positive(m, "U index"), arg)

    def eta(self, m):
        return Eta(_positive(m, "eta dilation"))

    def theta(self, m):
        return Theta(_positive(m, "theta dilation"))

    def e4(self, m):
        return E4(_positive(m, "E4 dilation"))

    def thetapsi(self, disc, m):
        value, pos = disc
        try:
            psi = DirichletCharacter.quadratic(value)
        except ArithError as e:
            raise FormSpecError(str(e), pos) from e
        if not psi.is_odd:
            raise FormSpecError(f"thetapsi needs an odd character, ({value}/·) is even", pos)
        return ThetaPsi(value, _positive(m, "thetapsi dilation"))

    def pos_int(self, tok):
        return int(tok), tok.start_pos

    def neg_int(self, minus, tok):
        return -int(tok), minus.start_pos

    def rational(self, num, den=None):
        if den is None:
            return Fraction(int(num))
        if int(den) == 0:
            raise FormSpecError("zero denominator", den.start_pos)
        return Fraction(int(num), int(den))


_PARSER = Lark(GRAMMAR, parser="lalr", propagate_positions=True)


def _byte_offset(text: str, pos: int) -> int:
    return len(text[:pos].encode("utf-8"))


def parse_formspec(text: str) -> FormSpec:
    try:
        tree = _PARSER.parse(text)
    except UnexpectedEOF as e:
        raise FormSpecError("unexpected end of input", _byte_offset(text, len(text))) from e
    except UnexpectedToken as e:
        if e.token.type == "$END":
            raise FormSpecError("unexpected end of input", _byte_offset(text, len(text))) from e
        raise FormSpecError(
            f"unexpected {e.token!r}", _byte_offset(text, e.token.start_pos)
        ) from e
    except UnexpectedInput as e:
        pos = e.pos_in_stream if e.pos_in_stream is not None else len(text)
        raise FormSpecError(
            f"unexpected character {text[pos:pos + 1]!r}", _byte_offset(text, pos)
        ) from e
    try:
        return _ToAst().transform(tree)
    except VisitError as e:
        if isinstance(e.orig_exc, FormSpecError):
            err = e.orig_exc
            offset = _byte_offset(text, err.offset) if err.offset is not None else None
            raise FormSpecError(err.message, offset) from e
        raise


# ── evaluation ────────────────────────────────────────────────────────────────
def evaluate(spec: FormSpec, prec: int) -> qs.QSeries:
    """q-expansion of `spec` with `prec` terms past its offset."""
    match spec:
        case Eta(m):
            return qs.eta(m, prec)
        case Theta(m):
            return qs.theta(m, prec)
        case ThetaPsi(disc, m):
            return qs.theta_psi(DirichletCharacter.quadratic(disc), m, prec)
        case E4(m):
            return qs.dilate(m, qs.eisenstein_e4(-(-prec // m)), cap=prec)
        case Deriv(arg):
            return qs.derive(evaluate(arg, prec))
        case UOp(m, arg):
            return qs.u_op(m, evaluate(arg, m * prec))
        case Add(left, right):
            return qs.add(evaluate(left, prec), evaluate(right, prec))
        case Sub(left, right):
            return qs.sub(evaluate(left, prec), evaluate(right, prec))
        case Mul(left, right):
            return qs.mul(evaluate(left, prec), evaluate(right, prec))
        case Pow(base, exp):
            return qs.power(evaluate(base, prec), exp)
        case Scale(factor, arg):
            return qs.scale(factor, evaluate(arg, prec))
    raise FormSpecError(f"not a FormSpec node: {spec!r}")


def infer_weight(spec: FormSpec) -> Fraction:
    match spec:
        case Eta() | Theta():
            return Fraction(1, 2)
        case ThetaPsi():
            return Fraction(3, 2)
        case E4():
            return Fraction(4)
        case Deriv(arg):
            return infer_weight(arg) + 2
        case UOp(_, arg) | Scale(_, arg):
            return infer_weight(arg)
        case Mul(left, right):
            return infer_weight(left) + infer_weight(right)
        case Pow(base, exp):
            return infer_weight(base) * exp
        case Add(left, right) | Sub(left, right):
            wl, wr = infer_weight(left), infer_weight(right)
            if wl != wr:
                raise FormSpecError(f"sum of weights {wl} and {wr}")
            return wl
    raise FormSpecError(f"not a FormSpec node: {spec!r}")


def dilations(spec: FormSpec) -> list[int]:
    """Dilation arguments of every atom (the discriminant level for thetapsi)."""
    match spec:
        case Eta(m) | Theta(m) | E4(m):
            return [m]
        case ThetaPsi(disc, m):
            return [disc * disc * m]
        case Deriv(arg) | UOp(_, arg) | Scale(_, arg) | Pow(arg, _):
            return dilations(arg)
        case Add(left, right) | Sub(left, right) | Mul(left, right):
            return dilations(left) + dilations(right)
    raise FormSpecError(f"not a FormSpec node: {spec!r}")


def default_level(spec: FormSpec) -> int:
    level = math.lcm(*dilations(spec))
    if infer_weight(spec).denominator == 2:
        level *= 4
    return level
