"""
coeffile.py  —  text format for coefficient tables

    # halfweight-coefficients: 1
    # form: delta
    # weight: 13/2
    # level: 4
    # character: trivial:4
    # precision: 100
    # offset: 0
    # plus_space: true          (optional extra keys are kept verbatim)
    1<TAB>1
    4<TAB>-56
    ...

Only nonzero coefficients appear in the body, in ascending order of n.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .arith import ArithError, DirichletCharacter
from .forms import Form, FormError, HalfIntegralForm, IntegralForm

FORMAT_KEY = "halfweight-coefficients"
FORMAT_VERSION = 1
REQUIRED = ("form", "weight", "level", "character", "precision", "offset")


class CoefficientFileError(ValueError):
    pass


@dataclass
class CoefficientFile:
    form: str
    weight: Fraction
    level: int
    character: str
    precision: int
    offset: int = 0
    coeffs: dict[int, int] = field(default_factory=dict, repr=False)
    extras: dict[str, str] = field(default_factory=dict)
    version: int = FORMAT_VERSION

    # ── conversions ──────────────────────────────────────────────────────────
    @classmethod
    def from_form(cls, f: Form, **extras) -> "CoefficientFile":
        if isinstance(f, HalfIntegralForm):
            extras = {"plus_space": "true" if f.plus_space else "false", **extras}
        return cls(
            form=f.name,
            weight=Fraction(f.weight),
            level=f.level,
            character=f.character.spec,
            precision=f.prec,
            coeffs={n: c for n, c in enumerate(f.coeffs) if c},
            extras={key: str(value) for key, value in extras.items()},
        )

    def to_form(self) -> Form:
        dense = [0] * (self.precision + 1)
        for n, c in self.coeffs.items():
            dense[n] = c
        try:
            character = DirichletCharacter.parse(self.character)
            if self.weight.denominator == 2:
                return HalfIntegralForm(
                    self.form,
                    self.weight.numerator,
                    self.level,
                    character,
                    dense,
                    plus_space=self.extras.get("plus_space") == "true",
                )
            if self.weight.denominator == 1:
                return IntegralForm(self.form, int(self.weight), self.level, character, dense)
        except (ArithError, FormError) as e:
            raise CoefficientFileError(f"{self.form}: {e}") from e
        raise CoefficientFileError(f"weight {self.weight} is neither integral nor half-integral")

    # ── text ─────────────────────────────────────────────────────────────────
    def serialize(self) -> str:
        header = {
            FORMAT_KEY: self.version,
            "form": self.form,
            "weight": self.weight,
            "level": self.level,
            "character": self.character,
            "precision": self.precision,
            "offset": self.offset,
            **self.extras,
        }
        lines = [f"# {key}: {value}" for key, value in header.items()]
        lines += [f"{n}\t{self.coeffs[n]}" for n in sorted(self.coeffs) if self.coeffs[n]]
        return "\n".join(lines) + "\n"

    @classmethod
    def parse(cls, text: str) -> "CoefficientFile":
        header: dict[str, str] = {}
        coeffs: dict[int, int] = {}
        last = None
        for lineno, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            if line.startswith("#"):
                if coeffs:
                    raise CoefficientFileError(f"line {lineno}: header after coefficients")
                key, sep, value = line[1:].partition(":")
                if not sep:
                    raise CoefficientFileError(f"line {lineno}: header without ':'")
                header[key.strip()] = value.strip()
                continue
            try:
                n_text, c_text = line.split("\t")
                n, c = int(n_text), int(c_text)
            except ValueError as e:
                raise CoefficientFileError(
                    f"line {lineno}: expected 'n<TAB>a(n)', got {line!r}"
                ) from e
            if last is not None and n <= last:
                raise CoefficientFileError(f"line {lineno}: index {n} is not ascending")
            if c == 0:
                raise CoefficientFileError(f"line {lineno}: zero coefficient listed")
            coeffs[n], last = c, n
        return cls._from_header(header, coeffs)

    @classmethod
    def _from_header(cls, header: dict[str, str], coeffs: dict[int, int]) -> "CoefficientFile":
        if FORMAT_KEY not in header:
            raise CoefficientFileError(f"missing '# {FORMAT_KEY}: <version>' header")
        missing = [key for key in REQUIRED if key not in header]
        if missing:
            raise CoefficientFileError(f"missing header keys: {', '.join(missing)}")
        try:
            version = int(header.pop(FORMAT_KEY))
            values = {key: header.pop(key) for key in REQUIRED}
            cf = cls(
                form=values["form"],
                weight=Fraction(values["weight"]),
                level=int(values["level"]),
                character=values["character"],
                precision=int(values["precision"]),
                offset=int(values["offset"]),
                coeffs=coeffs,
                extras=header,
                version=version,
            )
        except (ValueError, ZeroDivisionError) as e:
            raise CoefficientFileError(f"bad header value: {e}") from e
        if cf.version != FORMAT_VERSION:
            raise CoefficientFileError(f"unsupported format version {cf.version}")
        bad = [n for n in coeffs if n < cf.offset or n > cf.precision]
        if bad:
            raise CoefficientFileError(
                f"indices {bad[:5]} outside [{cf.offset}, {cf.precision}]"
            )
        return cf

    # ── files ────────────────────────────────────────────────────────────────
    @classmethod
    def read(cls, path: str | Path) -> "CoefficientFile":
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as e:
            raise CoefficientFileError(f"cannot read {path}: {e}") from e
        return cls.parse(text)

    def write(self, path: str | Path) -> None:
        Path(path).write_text(self.serialize(), encoding="utf-8")


def read_form(path: str | Path) -> Form:
    return CoefficientFile.read(path).to_form()


def write_form(f: Form, path: str | Path, **extras) -> CoefficientFile:
    cf = CoefficientFile.from_form(f, **extras)
    cf.write(path)
    return cf
