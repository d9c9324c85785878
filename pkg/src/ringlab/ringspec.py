"""Ring constructor expressions: AST and parser.

Grammar (case- and whitespace-insensitive)::

    ring := "zmod(" int ")" | "gf(" int ")" | "mat(" int "," ring ")"
          | "ut(" int "," ring ")" | "nil(" ring ")" | "prod(" ring {"," ring} ")"
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from .abelian import prime_power

GF_MAX = 16


class SpecError(ValueError):
    """Invalid ring expression; ``pos`` is the offending character offset."""

    def __init__(self, message: str, pos: int | None = None):
        self.pos = pos
        super().__init__(message)


@dataclass(frozen=True)
class ZMod:
    n: int

    def __str__(self):
        return f"zmod({self.n})"


@dataclass(frozen=True)
class GF:
    q: int

    def __str__(self):
        return f"gf({self.q})"


@dataclass(frozen=True)
class Mat:
    m: int
    base: "SpecAST"

    def __str__(self):
        return f"mat({self.m},{self.base})"


@dataclass(frozen=True)
class UT:
    m: int
    base: "SpecAST"

    def __str__(self):
        return f"ut({self.m},{self.base})"


@dataclass(frozen=True)
class Prod:
    factors: tuple["SpecAST", ...]

    def __str__(self):
        return "prod(" + ",".join(str(f) for f in self.factors) + ")"


@dataclass(frozen=True)
class Nil:
    base: "SpecAST"

    def __str__(self):
        return f"nil({self.base})"


SpecAST = Union[ZMod, GF, Mat, UT, Prod, Nil]


def spec_size(ast: SpecAST) -> int:
    if isinstance(ast, ZMod):
        return ast.n
    if isinstance(ast, GF):
        return ast.q
    if isinstance(ast, Mat):
        return spec_size(ast.base) ** (ast.m * ast.m)
    if isinstance(ast, UT):
        return spec_size(ast.base) ** (ast.m * (ast.m + 1) // 2)
    if isinstance(ast, Prod):
        return math.prod(spec_size(f) for f in ast.factors)
    if isinstance(ast, Nil):
        return spec_size(ast.base) ** 2
    raise TypeError(f"not a ring expression: {ast!r}")


def validate(ast: SpecAST) -> None:
    """Check argument ranges (recursively); raises SpecError."""
    if isinstance(ast, ZMod):
        if ast.n < 2:
            raise SpecError(f"zmod needs n >= 2, got {ast.n}")
    elif isinstance(ast, GF):
        if prime_power(ast.q) is None:
            raise SpecError(f"gf({ast.q}): {ast.q} is not a prime power")
        if ast.q > GF_MAX:
            raise SpecError(f"gf({ast.q}): only fields of order <= {GF_MAX} are tabulated")
    elif isinstance(ast, (Mat, UT)):
        if ast.m < 1:
            raise SpecError(f"matrix size must be >= 1, got {ast.m}")
        validate(ast.base)
    elif isinstance(ast, Prod):
        if not ast.factors:
            raise SpecError("prod needs at least one factor")
        for f in ast.factors:
            validate(f)
    elif isinstance(ast, Nil):
        validate(ast.base)
    else:
        raise TypeError(f"not a ring expression: {ast!r}")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.low = text.lower()
        self.pos = 0

    def error(self, msg: str, pos: int | None = None):
        p = self.pos if pos is None else pos
        raise SpecError(f"{msg} at position {p} in {self.text!r}", p)

    def skip(self):
        while self.pos < len(self.low) and self.low[self.pos].isspace():
            self.pos += 1

    def expect(self, ch: str):
        self.skip()
        if self.pos >= len(self.low) or self.low[self.pos] != ch:
            found = self.text[self.pos] if self.pos < len(self.text) else "end of input"
            self.error(f"expected {ch!r}, found {found!r}")
        self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.low[self.pos] if self.pos < len(self.low) else ""

    def integer(self) -> int:
        self.skip()
        start = self.pos
        while self.pos < len(self.low) and self.low[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            self.error("expected an integer")
        return int(self.low[start : self.pos])

    def name(self) -> tuple[str, int]:
        self.skip()
        start = self.pos
        while self.pos < len(self.low) and self.low[self.pos].isalpha():
            self.pos += 1
        return self.low[start : self.pos], start

    def ring(self) -> SpecAST:
        name, start = self.name()
        if not name:
            self.error("expected a ring constructor")
        self.expect("(")
        if name == "zmod":
            node = ZMod(self.integer())
        elif name == "gf":
            q_pos = self.pos
            q = self.integer()
            if prime_power(q) is None:
                self.error(f"gf argument {q} is not a prime power", q_pos)
            node = GF(q)
        elif name in ("mat", "ut"):
            m = self.integer()
            self.expect(",")
            base = self.ring()
            node = Mat(m, base) if name == "mat" else UT(m, base)
        elif name == "nil":
            node = Nil(self.ring())
        elif name == "prod":
            factors = [self.ring()]
            while self.peek() == ",":
                self.pos += 1
                factors.append(self.ring())
            node = Prod(tuple(factors))
        else:
            self.error(f"unknown constructor {name!r}", start)
        self.expect(")")
        return node


def parse_ring_spec(text: str) -> SpecAST:
    """Parse a ring expression such as ``"mat(2, gf(2))"``."""
    p = _Parser(text)
    ast = p.ring()
    p.skip()
    if p.pos != len(p.low):
        p.error("unexpected trailing input")
    try:
        validate(ast)
    except SpecError as exc:
        raise SpecError(f"{exc} in {text!r}") from None
    return ast
