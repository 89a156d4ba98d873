"""Exact multivariate polynomials over the rationals.

Coefficients are ``fractions.Fraction``; floats only appear when a
polynomial is evaluated at a float point.  Terms are kept in a canonical
sorted order with no zero coefficients, so ``==`` is structural equality.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

Monomial = tuple[int, ...]

__all__ = [
    "Poly",
    "PolyParseError",
    "parse_poly",
    "default_var_names",
    "coeff_distance",
]


class PolyParseError(ValueError):
    """Malformed polynomial expression."""


def _coerce(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, Rational):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(value)  # exact binary expansion
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, int):
        return Fraction(value)
    raise TypeError(f"cannot use {type(value).__name__} as a coefficient")


@dataclass(frozen=True)
class Poly:
    """A polynomial in ``n_vars`` variables with rational coefficients."""

    n_vars: int
    terms: tuple  # tuple[(Monomial, Fraction), ...], canonical

    def __post_init__(self) -> None:
        collected: dict[Monomial, Fraction] = {}
        items = self.terms.items() if isinstance(self.terms, dict) else self.terms
        for exponents, coeff in items:
            exponents = tuple(int(e) for e in exponents)
            if len(exponents) != self.n_vars:
                raise ValueError(
                    f"monomial {exponents} has {len(exponents)} exponents, "
                    f"expected {self.n_vars}"
                )
            if any(e < 0 for e in exponents):
                raise ValueError(f"negative exponent in {exponents}")
            coeff = _coerce(coeff)
            if coeff:
                collected[exponents] = collected.get(exponents, Fraction(0)) + coeff
        canonical = tuple(
            (m, c) for m, c in sorted(collected.items()) if c != 0
        )
        object.__setattr__(self, "terms", canonical)

    # -- constructors --------------------------------------------------

    @classmethod
    def zero(cls, n_vars: int) -> "Poly":
        return cls(n_vars, ())

    @classmethod
    def one(cls, n_vars: int) -> "Poly":
        return cls.constant(1, n_vars)

    @classmethod
    def constant(cls, value, n_vars: int) -> "Poly":
        return cls(n_vars, (((0,) * n_vars, _coerce(value)),))

    @classmethod
    def variable(cls, index: int, n_vars: int) -> "Poly":
        if not 0 <= index < n_vars:
            raise ValueError(f"variable index {index} out of range for {n_vars}")
        exps = tuple(1 if i == index else 0 for i in range(n_vars))
        return cls(n_vars, ((exps, Fraction(1)),))

    # -- queries --------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        """Total degree; 0 for the zero polynomial."""
        if not self.terms:
            return 0
        return max(sum(m) for m, _ in self.terms)

    def coefficient(self, exponents: Monomial) -> Fraction:
        exponents = tuple(int(e) for e in exponents)
        for m, c in self.terms:
            if m == exponents:
                return c
        return Fraction(0)

    # -- arithmetic -------------------------------------------------------

    def _check(self, other: "Poly") -> None:
        if self.n_vars != other.n_vars:
            raise ValueError(
                f"polynomials in {self.n_vars} and {other.n_vars} variables"
            )

    def __add__(self, other):
        if isinstance(other, Poly):
            self._check(other)
            return Poly(self.n_vars, self.terms + other.terms)
        return self + Poly.constant(other, self.n_vars)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.n_vars, tuple((m, -c) for m, c in self.terms))

    def __sub__(self, other):
        return self + (-other if isinstance(other, Poly) else Poly.constant(-_coerce(other), self.n_vars))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Poly):
            self._check(other)
            out: dict[Monomial, Fraction] = {}
            for m1, c1 in self.terms:
                for m2, c2 in other.terms:
                    key = tuple(a + b for a, b in zip(m1, m2))
                    out[key] = out.get(key, Fraction(0)) + c1 * c2
            return Poly(self.n_vars, out)
        scalar = _coerce(other)
        return Poly(self.n_vars, tuple((m, c * scalar) for m, c in self.terms))

    __rmul__ = __mul__

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = Poly.one(self.n_vars)
        base = self
        e = exponent
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    # -- calculus ---------------------------------------------------------

    def partial(self, index: int) -> "Poly":
        """Partial derivative with respect to variable ``index``."""
        if not 0 <= index < self.n_vars:
            raise ValueError(f"variable index {index} out of range")
        out = []
        for m, c in self.terms:
            e = m[index]
            if e:
                lowered = tuple(
                    v - 1 if i == index else v for i, v in enumerate(m)
                )
                out.append((lowered, c * e))
        return Poly(self.n_vars, tuple(out))

    def evaluate(self, point):
        """Evaluate at a point; exact for rational coordinates."""
        values = list(point)
        if len(values) != self.n_vars:
            raise ValueError(
                f"point of length {len(values)}, expected {self.n_vars}"
            )
        total = 0
        for m, c in self.terms:
            term = c
            for v, e in zip(values, m):
                if e:
                    term = term * v**e
            total = total + term
        return total

    def subs_linear(self, matrix) -> "Poly":
        """Compose with a linear substitution: p(M x).

        ``matrix`` is a sequence of rows; entries are coerced to Fraction,
        so the composition is exact.
        """
        rows = [[_coerce(entry) for entry in row] for row in matrix]
        if len(rows) != self.n_vars or any(len(r) != self.n_vars for r in rows):
            raise ValueError("substitution matrix has the wrong shape")
        images = [
            Poly(
                self.n_vars,
                tuple(
                    (
                        tuple(1 if k == j else 0 for k in range(self.n_vars)),
                        rows[i][j],
                    )
                    for j in range(self.n_vars)
                ),
            )
            for i in range(self.n_vars)
        ]
        result = Poly.zero(self.n_vars)
        for m, c in self.terms:
            term = Poly.constant(c, self.n_vars)
            for i, e in enumerate(m):
                if e:
                    term = term * images[i] ** e
            result = result + term
        return result

    # -- formatting ---------------------------------------------------------

    def __str__(self) -> str:
        return self.to_str()

    def to_str(self, names: list[str] | None = None) -> str:
        if names is None:
            names = default_var_names(self.n_vars)
        if not self.terms:
            return "0"
        ordered = sorted(
            self.terms, key=lambda t: (-sum(t[0]), tuple(-e for e in t[0]))
        )
        pieces = []
        for m, c in ordered:
            factors = []
            for name, e in zip(names, m):
                if e == 1:
                    factors.append(name)
                elif e > 1:
                    factors.append(f"{name}^{e}")
            mag = abs(c)
            if not factors:
                body = str(mag)
            elif mag == 1:
                body = "*".join(factors)
            else:
                body = str(mag) + "*" + "*".join(factors)
            sign = "-" if c < 0 else "+"
            pieces.append((sign, body))
        first_sign, first_body = pieces[0]
        out = ("-" if first_sign == "-" else "") + first_body
        for sign, body in pieces[1:]:
            out += f" {sign} {body}"
        return out


def default_var_names(n_vars: int) -> list[str]:
    if n_vars <= 4:
        return ["x", "y", "z", "w"][:n_vars]
    return [f"x{i}" for i in range(n_vars)]


_TOKEN = re.compile(
    r"\s*(?:(?P<number>\d+/\d+|\d+\.\d+|\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[\^*+\-()]))"
)


def _tokenize(text: str) -> list[tuple[str, str]]:
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if not match:
            raise PolyParseError(f"unexpected character at {text[pos:]!r}")
        pos = match.end()
        for kind in ("number", "name", "op"):
            value = match.group(kind)
            if value is not None:
                tokens.append((kind, value))
                break
    return tokens


class _Parser:
    """Recursive-descent parser for +, -, *, ^ and parentheses."""

    def __init__(self, tokens, n_vars: int, names: dict[str, int]):
        self.tokens = tokens
        self.pos = 0
        self.n_vars = n_vars
        self.names = names

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None)

    def take(self):
        tok = self.peek()
        self.pos += 1
        return tok

    def expr(self) -> Poly:
        kind, value = self.peek()
        negate = False
        if kind == "op" and value in "+-":
            self.take()
            negate = value == "-"
        result = self.term()
        if negate:
            result = -result
        while True:
            kind, value = self.peek()
            if kind == "op" and value in "+-":
                self.take()
                rhs = self.term()
                result = result - rhs if value == "-" else result + rhs
            else:
                return result

    def term(self) -> Poly:
        result = self.factor()
        while True:
            kind, value = self.peek()
            if kind == "op" and value == "*":
                self.take()
                result = result * self.factor()
            else:
                return result

    def factor(self) -> Poly:
        kind, value = self.peek()
        if kind == "op" and value == "-":
            self.take()
            return -self.factor()
        base = self.atom()
        kind, value = self.peek()
        if kind == "op" and value == "^":
            self.take()
            kind, value = self.take()
            if kind != "number" or not value.isdigit():
                raise PolyParseError("exponent must be a nonnegative integer")
            return base ** int(value)
        return base

    def atom(self) -> Poly:
        kind, value = self.take()
        if kind == "number":
            return Poly.constant(Fraction(value), self.n_vars)
        if kind == "name":
            if value not in self.names:
                raise PolyParseError(f"unknown variable {value!r}")
            return Poly.variable(self.names[value], self.n_vars)
        if kind == "op" and value == "(":
            inner = self.expr()
            kind, value = self.take()
            if not (kind == "op" and value == ")"):
                raise PolyParseError("missing closing parenthesis")
            return inner
        if kind is None:
            raise PolyParseError("unexpected end of input")
        raise PolyParseError(f"unexpected token {value!r}")


def parse_poly(text: str, n_vars: int, names: list[str] | None = None) -> Poly:
    """Parse an expression like ``"3/2*x*y^2 - z + 1"``.

    Default variable names are x, y, z, w for up to four variables; the
    aliases x0, x1, ... are always accepted.
    """
    if names is None:
        names = default_var_names(n_vars)
    table = {name: i for i, name in enumerate(names)}
    for i in range(n_vars):
        table.setdefault(f"x{i}", i)
    parser = _Parser(_tokenize(text), n_vars, table)
    result = parser.expr()
    if parser.pos != len(parser.tokens):
        raise PolyParseError(f"trailing input in {text!r}")
    return result


def coeff_distance(a: Poly, b: Poly) -> float:
    """Largest coefficient difference, as a float."""
    if a.n_vars != b.n_vars:
        raise ValueError("polynomials in different variable counts")
    diff = a - b
    if not diff.terms:
        return 0.0
    return max(abs(float(c)) for _, c in diff.terms)
