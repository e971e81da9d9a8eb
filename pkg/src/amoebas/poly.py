"""Bivariate Laurent polynomials with complex coefficients.

A polynomial is a mapping from exponent pairs ``(a1, a2)`` (powers of ``z``
and ``w``, possibly negative) to nonzero complex coefficients.  This sparse
dict representation keeps construction exact and makes the Newton polygon
and fiber restrictions cheap to extract.

Input grammar (whitespace insignificant)::

    poly   := term (('+'|'-') term)* ;
    term   := coef ('*'? mono)? | mono ;
    coef   := number | '(' number (('+'|'-') number 'i')? ')' | number 'i' ;
    mono   := var ('^' int)? ('*' var ('^' int)?)? ;
    var    := 'z' | 'w' ;
    int    := '-'? digit+ ;   number := decimal literal.

A leading sign on the first term and a bare ``i`` coefficient are accepted
as conveniences beyond the grammar above.
"""

from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping

import numpy as np

from .errors import DegenerateFiberError, DomainError, EmptyPolynomialError, ParseError

# Coefficients below this modulus are treated as exact zeros produced by
# cancellation; user-level pruning is a separate explicit operation.
ZERO_DROP = 1e-300

# Relative tolerance under which a whole fiber is declared degenerate.
FIBER_DEGENERACY_TOL = 1e-14

Exponent = tuple[int, int]


def _check_finite(c: complex, what: str) -> None:
    if not (math.isfinite(c.real) and math.isfinite(c.imag)):
        raise ValueError(f"non-finite {what}: {c!r}")


class LaurentPoly2:
    """Immutable bivariate Laurent polynomial.

    Terms with modulus below ``ZERO_DROP`` are dropped at construction;
    an empty term set raises :class:`EmptyPolynomialError`.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Exponent, complex]):
        cleaned: dict[Exponent, complex] = {}
        for (a1, a2), c in terms.items():
            c = complex(c)
            _check_finite(c, "coefficient")
            if abs(c) < ZERO_DROP:
                continue
            cleaned[(int(a1), int(a2))] = c
        if not cleaned:
            raise EmptyPolynomialError("all terms cancelled or zero")
        self._terms = MappingProxyType(dict(sorted(cleaned.items())))
        self._hash = hash(tuple(self._terms.items()))

    @property
    def terms(self) -> Mapping[Exponent, complex]:
        return self._terms

    def __eq__(self, other) -> bool:
        if not isinstance(other, LaurentPoly2):
            return NotImplemented
        return dict(self._terms) == dict(other._terms)

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"LaurentPoly2({self.render()!r})"

    # -- basic queries -----------------------------------------------------

    def support(self) -> list[Exponent]:
        """Exponent pairs in canonical (lexicographic) order."""
        return list(self._terms.keys())

    @property
    def min_z_exp(self) -> int:
        return min(a1 for a1, _ in self._terms)

    @property
    def min_w_exp(self) -> int:
        return min(a2 for _, a2 in self._terms)

    def coefficient_scale(self) -> float:
        return max(abs(c) for c in self._terms.values())

    def transpose(self) -> "LaurentPoly2":
        """Swap the roles of z and w."""
        return LaurentPoly2({(a2, a1): c for (a1, a2), c in self._terms.items()})

    # -- evaluation ---------------------------------------------------------

    def evaluate(self, z: complex, w: complex) -> complex:
        """Evaluate by grouped Horner: inner Horner in w per z-exponent,
        then a sparse Horner over z-exponents."""
        z = complex(z)
        w = complex(w)
        if z == 0 and self.min_z_exp < 0:
            raise DomainError("z=0 with negative z-exponent present")
        if w == 0 and self.min_w_exp < 0:
            raise DomainError("w=0 with negative w-exponent present")
        groups: dict[int, list[tuple[int, complex]]] = {}
        for (a1, a2), c in self._terms.items():
            groups.setdefault(a1, []).append((a2, c))
        outer = [(a1, _sparse_horner(pairs, w)) for a1, pairs in sorted(groups.items())]
        return _sparse_horner(outer, z)

    # -- fiber restrictions --------------------------------------------------

    def fiber_in_w(self, z0: complex) -> "UniPoly":
        """Restrict z to ``z0``: the univariate polynomial ``w -> P(z0, w)``
        with its Laurent valuation in w cleared into ``shift``."""
        return self._fiber(complex(z0), axis=0)

    def fiber_in_z(self, w0: complex) -> "UniPoly":
        """Restrict w to ``w0``: the univariate polynomial ``z -> P(z, w0)``."""
        return self._fiber(complex(w0), axis=1)

    def _fiber(self, v0: complex, axis: int) -> "UniPoly":
        var_exp = 0 if axis == 0 else 1  # exponent index of the substituted variable
        free_exp = 1 - var_exp
        if v0 == 0:
            if min(k[var_exp] for k in self._terms) < 0:
                raise DomainError("substituting 0 with a negative exponent present")
            kept = {k: c for k, c in self._terms.items() if k[var_exp] == 0}
            if not kept:
                # every term carries a positive power of the substituted
                # variable, so the fiber polynomial is identically zero
                raise DegenerateFiberError("fiber vanishes identically at 0")
            sums: dict[int, complex] = {}
            scale = 0.0
            for k, c in kept.items():
                sums[k[free_exp]] = sums.get(k[free_exp], 0.0) + c
                scale += abs(c)
        else:
            sums = {}
            scale = 0.0
            for k, c in self._terms.items():
                val = c * v0 ** k[var_exp]
                sums[k[free_exp]] = sums.get(k[free_exp], 0.0) + val
                scale += abs(val)
        lo = min(sums)
        hi = max(sums)
        coeffs = np.zeros(hi - lo + 1, dtype=np.complex128)
        for e, c in sums.items():
            coeffs[e - lo] = c
        if not np.any(np.abs(coeffs) > FIBER_DEGENERACY_TOL * max(scale, 1e-300)):
            raise DegenerateFiberError(
                f"all fiber coefficients below {FIBER_DEGENERACY_TOL} * scale"
            )
        # clear numerically-zero leading coefficients so the invariant
        # "leading coefficient nonzero" holds
        top = len(coeffs) - 1
        while top > 0 and abs(coeffs[top]) <= FIBER_DEGENERACY_TOL * max(scale, 1e-300):
            top -= 1
        return UniPoly(coeffs[: top + 1], lo)


def _sparse_horner(pairs: Iterable[tuple[int, complex]], x: complex) -> complex:
    """Horner evaluation of a sparse univariate polynomial given as
    (exponent, coefficient) pairs; exponents may be negative, x != 0 then."""
    items = sorted(pairs, reverse=True)
    acc = 0j
    prev = None
    for e, c in items:
        if prev is not None:
            acc *= x ** (prev - e)
        acc += c
        prev = e
    if prev is not None and prev != 0:
        acc *= x**prev
    return acc


@dataclass(frozen=True)
class UniPoly:
    """Univariate polynomial ``coeffs[0] + coeffs[1] x + ...`` with the
    cleared Laurent valuation recorded in ``shift`` (the full fiber value is
    ``x**shift * poly(x)``)."""

    coeffs: np.ndarray
    shift: int = 0

    def __post_init__(self):
        object.__setattr__(self, "coeffs", np.asarray(self.coeffs, dtype=np.complex128))
        if self.coeffs.ndim != 1 or self.coeffs.size == 0:
            raise ValueError("coeffs must be a nonempty 1-d array")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x: complex) -> complex:
        acc = 0j
        for c in self.coeffs[::-1]:
            acc = acc * x + c
        return acc

    def derivative(self) -> "UniPoly":
        if self.degree == 0:
            return UniPoly(np.zeros(1, dtype=np.complex128), 0)
        k = np.arange(1, len(self.coeffs))
        return UniPoly(self.coeffs[1:] * k, 0)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def torus_transform(p: LaurentPoly2, a: complex, b: complex, c: complex) -> LaurentPoly2:
    """Coefficient map of ``a * P(b z, c w)``: the coefficient at (a1, a2)
    becomes ``a * coeff * b**a1 * c**a2``."""
    a, b, c = complex(a), complex(b), complex(c)
    if a == 0 or b == 0 or c == 0:
        raise DomainError("a, b, c must be nonzero")
    return LaurentPoly2(
        {(a1, a2): a * co * b**a1 * c**a2 for (a1, a2), co in p.terms.items()}
    )


def is_real(p: LaurentPoly2, tol: float) -> bool:
    """True iff every coefficient satisfies |Im c| <= tol * (1 + |c|)."""
    if tol < 0:
        raise ValueError("tol must be >= 0")
    return all(abs(c.imag) <= tol * (1.0 + abs(c)) for c in p.terms.values())


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<imag>i)
  | (?P<var>[zw])
  | (?P<op>[-+*^()])
    """,
    re.VERBOSE,
)


@dataclass
class _Token:
    kind: str
    text: str
    pos: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(_Token("op" if kind == "op" else kind, m.group(), pos))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> _Token | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def next(self) -> _Token:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input", len(self.text))
        self.i += 1
        return tok

    def expect_op(self, op: str) -> _Token:
        tok = self.next()
        if tok.kind != "op" or tok.text != op:
            raise ParseError(f"expected {op!r}, found {tok.text!r}", tok.pos)
        return tok

    def parse(self) -> dict[Exponent, complex]:
        terms: dict[Exponent, complex] = {}
        sign = 1.0
        tok = self.peek()
        if tok is not None and tok.kind == "op" and tok.text in "+-":
            self.next()
            sign = -1.0 if tok.text == "-" else 1.0
        self._term(terms, sign)
        while (tok := self.peek()) is not None:
            if tok.kind != "op" or tok.text not in "+-":
                raise ParseError(f"expected '+' or '-', found {tok.text!r}", tok.pos)
            self.next()
            self._term(terms, -1.0 if tok.text == "-" else 1.0)
        return terms

    def _term(self, terms: dict[Exponent, complex], sign: float) -> None:
        tok = self.peek()
        if tok is None:
            raise ParseError("expected a term", len(self.text))
        coeff = 1 + 0j
        have_coeff = False
        if tok.kind in ("number", "imag") or (tok.kind == "op" and tok.text == "("):
            coeff = self._coef()
            have_coeff = True
        exps = (0, 0)
        tok = self.peek()
        if have_coeff and tok is not None and tok.kind == "op" and tok.text == "*":
            self.next()
            exps = self._mono()
        elif tok is not None and tok.kind == "var":
            exps = self._mono()
        elif not have_coeff:
            raise ParseError(f"expected a term, found {tok.text!r}", tok.pos)
        val = sign * coeff
        terms[exps] = terms.get(exps, 0j) + val

    def _coef(self) -> complex:
        tok = self.next()
        if tok.kind == "imag":
            return 1j
        if tok.kind == "number":
            value = float(tok.text)
            nxt = self.peek()
            if nxt is not None and nxt.kind == "imag":
                self.next()
                return value * 1j
            return complex(value)
        if tok.kind == "op" and tok.text == "(":
            re_tok = self.next()
            if re_tok.kind != "number":
                raise ParseError(f"expected a number, found {re_tok.text!r}", re_tok.pos)
            re_val = float(re_tok.text)
            nxt = self.peek()
            if nxt is not None and nxt.kind == "imag":
                # pure-imaginary parenthesized literal such as (2i)
                self.next()
                self.expect_op(")")
                return re_val * 1j
            if nxt is not None and nxt.kind == "op" and nxt.text in "+-":
                self.next()
                im_tok = self.next()
                if im_tok.kind != "number":
                    raise ParseError(
                        f"expected a number, found {im_tok.text!r}", im_tok.pos
                    )
                im_val = float(im_tok.text)
                i_tok = self.next()
                if i_tok.kind != "imag":
                    raise ParseError(f"expected 'i', found {i_tok.text!r}", i_tok.pos)
                self.expect_op(")")
                return complex(re_val, -im_val if nxt.text == "-" else im_val)
            self.expect_op(")")
            return complex(re_val)
        raise ParseError(f"expected a coefficient, found {tok.text!r}", tok.pos)

    def _mono(self) -> Exponent:
        e = {"z": 0, "w": 0}
        var_tok = self.next()
        if var_tok.kind != "var":
            raise ParseError(f"expected 'z' or 'w', found {var_tok.text!r}", var_tok.pos)
        e[var_tok.text] += self._opt_exponent()
        tok = self.peek()
        if tok is not None and tok.kind == "op" and tok.text == "*":
            nxt = self.tokens[self.i + 1] if self.i + 1 < len(self.tokens) else None
            if nxt is not None and nxt.kind == "var":
                self.next()
                var2 = self.next()
                e[var2.text] += self._opt_exponent()
        return (e["z"], e["w"])

    def _opt_exponent(self) -> int:
        tok = self.peek()
        if tok is None or tok.kind != "op" or tok.text != "^":
            return 1
        self.next()
        sign = 1
        tok = self.peek()
        if tok is not None and tok.kind == "op" and tok.text == "-":
            self.next()
            sign = -1
        num = self.next()
        if num.kind != "number" or not num.text.isdigit():
            raise ParseError(f"expected an integer exponent, found {num.text!r}", num.pos)
        return sign * int(num.text)


def parse_poly(text: str) -> LaurentPoly2:
    """Parse polynomial text; equal exponents are summed and cancelled terms
    dropped.  Raises :class:`ParseError` with a byte offset on bad syntax and
    :class:`EmptyPolynomialError` if everything cancels."""
    terms = _Parser(text).parse()
    terms = {k: v for k, v in terms.items() if abs(v) >= ZERO_DROP}
    if not terms:
        raise EmptyPolynomialError("all terms cancel")
    return LaurentPoly2(terms)


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------


def _fmt_float(x: float) -> str:
    if x == int(x) and abs(x) < 1e16:
        return str(int(x))
    return repr(x)


def _fmt_coeff(c: complex) -> tuple[str, bool]:
    """Return (text, negate_handled): when the coefficient is real-negative
    the sign is left to the term separator and text is the magnitude."""
    if c.imag == 0.0:
        return _fmt_float(abs(c.real)), c.real < 0
    if c.real == 0.0:
        return f"{_fmt_float(abs(c.imag))}i", c.imag < 0
    re_s = _fmt_float(c.real)
    im_s = _fmt_float(abs(c.imag))
    op = "-" if c.imag < 0 else "+"
    return f"({re_s}{op}{im_s}i)", False


def render(p: LaurentPoly2) -> str:
    """Canonical text form: terms in lexicographic exponent order; parsing
    the result reproduces ``p`` exactly."""
    parts: list[str] = []
    for (a1, a2), c in p.terms.items():
        coeff_s, neg = _fmt_coeff(c)
        mono: list[str] = []
        if a1 != 0:
            mono.append("z" if a1 == 1 else f"z^{a1}")
        if a2 != 0:
            mono.append("w" if a2 == 1 else f"w^{a2}")
        if mono and coeff_s == "1":
            body = "*".join(mono)
        elif mono:
            body = coeff_s + "*" + "*".join(mono)
        else:
            body = coeff_s
        if not parts:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append(("- " if neg else "+ ") + body)
    return " ".join(parts)
