"""Noncommutative *-polynomials over indexed generators.

Generators are written ``T1, T2, ...`` and carry a formal adjoint marked by
a trailing apostrophe (``T1'``).  Words in these letters form a free monoid;
polynomials are finite complex combinations of words with no rewriting rules
beyond the unit.  Everything downstream (matrix evaluation, moment oracles,
tensor-leg operators) is built on top of this module.

Text grammar accepted by :func:`parse`:

* generators ``T<n>`` with ``n >= 1``, adjoint suffix ``'``
* operators ``+ - *``, integer powers ``^p`` (p >= 0), parentheses
* scalars: ``2``, ``3.5``, ``2i``, ``(1+2i)``; whitespace is ignored

Monomials serialize as space-separated letters, e.g. ``T1 T2' T1``; the
empty word prints as ``1``.
"""

from __future__ import annotations

import re
from typing import Iterable, NamedTuple

import numpy as np

PRUNE_REL = 1e-15


class ParseError(ValueError):
    """Syntax error in polynomial or word text, carries the offending position."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


class Letter(NamedTuple):
    index: int
    star: bool

    def adjoint(self) -> "Letter":
        return Letter(self.index, not self.star)

    def __str__(self) -> str:
        return f"T{self.index}'" if self.star else f"T{self.index}"


# A monomial is a tuple of Letter; the empty tuple is the unit word.
Monomial = tuple


def monomial_adjoint(word: Monomial) -> Monomial:
    return tuple(let.adjoint() for let in reversed(word))


def monomial_str(word: Monomial) -> str:
    if not word:
        return "1"
    return " ".join(str(let) for let in word)


def parse_monomial(text: str) -> Monomial:
    """Parse a space-separated word such as ``T1 T2' T1`` (``1`` is the unit)."""
    stripped = text.strip()
    if stripped == "1" or stripped == "":
        return ()
    letters = []
    for pos, token in enumerate(stripped.split()):
        m = re.fullmatch(r"T(\d+)(')?", token)
        if not m:
            raise ParseError(f"bad letter {token!r}", pos)
        idx = int(m.group(1))
        if idx < 1:
            raise ParseError("generator index must be >= 1", pos)
        letters.append(Letter(idx, m.group(2) is not None))
    return tuple(letters)


def _monomial_sort_key(word: Monomial):
    return (len(word), tuple((let.index, let.star) for let in word))


class NcPoly:
    """A finite complex combination of free *-monomials.

    Instances are immutable; arithmetic returns new polynomials.  After any
    arithmetic, coefficients of modulus below ``1e-15 * max|coeff|`` are
    pruned so symbolic powers do not accumulate numerical dust.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: dict | None = None):
        self._terms = _normalize(dict(terms) if terms else {})

    # -- constructors ----------------------------------------------------

    @classmethod
    def zero(cls) -> "NcPoly":
        return cls({})

    @classmethod
    def one(cls) -> "NcPoly":
        return cls({(): 1.0})

    @classmethod
    def scalar(cls, c: complex) -> "NcPoly":
        return cls({(): complex(c)})

    @classmethod
    def generator(cls, index: int, star: bool = False) -> "NcPoly":
        if index < 1:
            raise ValueError("generator index must be >= 1")
        return cls({(Letter(index, star),): 1.0})

    @classmethod
    def from_monomial(cls, word: Iterable[Letter], coeff: complex = 1.0) -> "NcPoly":
        return cls({tuple(word): complex(coeff)})

    # -- inspection ------------------------------------------------------

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    @property
    def degree(self) -> int:
        return max((len(w) for w in self._terms), default=0)

    @property
    def nterms(self) -> int:
        return len(self._terms)

    def max_generator_index(self) -> int:
        return max((let.index for w in self._terms for let in w), default=0)

    def is_zero(self) -> bool:
        return not self._terms

    def coefficient(self, word: Monomial) -> complex:
        return self._terms.get(tuple(word), 0.0 + 0.0j)

    # -- algebra ---------------------------------------------------------

    def adjoint(self) -> "NcPoly":
        return NcPoly(
            {monomial_adjoint(w): np.conj(c) for w, c in self._terms.items()}
        )

    def __add__(self, other) -> "NcPoly":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self._terms)
        for w, c in other._terms.items():
            out[w] = out.get(w, 0.0) + c
        return NcPoly(out)

    __radd__ = __add__

    def __neg__(self) -> "NcPoly":
        return NcPoly({w: -c for w, c in self._terms.items()})

    def __sub__(self, other) -> "NcPoly":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "NcPoly":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other) -> "NcPoly":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out: dict = {}
        for w1, c1 in self._terms.items():
            for w2, c2 in other._terms.items():
                w = w1 + w2
                out[w] = out.get(w, 0.0) + c1 * c2
        return NcPoly(out)

    def __rmul__(self, other) -> "NcPoly":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self

    def __pow__(self, p: int) -> "NcPoly":
        if not isinstance(p, int) or p < 0:
            raise ValueError("powers must be nonnegative integers")
        out = NcPoly.one()
        for _ in range(p):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def substitute(self, mapping: dict) -> "NcPoly":
        """Replace each generator index by an NcPoly (stars map to adjoints)."""
        out = NcPoly.zero()
        for w, c in self._terms.items():
            factor = NcPoly.scalar(c)
            for let in w:
                g = mapping.get(let.index)
                if g is None:
                    g = NcPoly.generator(let.index)
                factor = factor * (g.adjoint() if let.star else g)
            out = out + factor
        return out

    # -- evaluation ------------------------------------------------------

    def evaluate(self, matrices) -> np.ndarray:
        """Substitute matrices for the generators (stars become adjoints)."""
        mats = [np.asarray(m, dtype=complex) for m in matrices]
        if not mats:
            raise ValueError("need at least one matrix")
        k = mats[0].shape[0]
        top = self.max_generator_index()
        if top > len(mats):
            raise IndexError(
                f"polynomial uses T{top} but only {len(mats)} matrices given"
            )
        acc = np.zeros((k, k), dtype=complex)
        for w, c in self._terms.items():
            prod = np.eye(k, dtype=complex)
            for let in w:
                m = mats[let.index - 1]
                prod = prod @ (m.conj().T if let.star else m)
            acc += c * prod
        return acc

    # -- formatting ------------------------------------------------------

    def __str__(self) -> str:
        return format_poly(self)

    def __repr__(self) -> str:
        return f"NcPoly({format_poly(self)!r})"


def _coerce(x):
    if isinstance(x, NcPoly):
        return x
    if isinstance(x, (int, float, complex, np.integer, np.floating, np.complexfloating)):
        return NcPoly.scalar(complex(x))
    return NotImplemented


def _normalize(terms: dict) -> dict:
    if not terms:
        return {}
    max_abs = max(abs(c) for c in terms.values())
    if max_abs == 0.0:
        return {}
    cut = PRUNE_REL * max_abs
    return {w: complex(c) for w, c in terms.items() if abs(c) > cut}


def evaluate(poly: NcPoly, matrices) -> np.ndarray:
    return poly.evaluate(matrices)


def adjoint(poly: NcPoly) -> NcPoly:
    return poly.adjoint()


def multiply(p: NcPoly, q: NcPoly) -> NcPoly:
    return p * q


# -- text format ---------------------------------------------------------


def _format_coeff(c: complex) -> str:
    re_, im = c.real, c.imag

    def num(x: float) -> str:
        if x == int(x) and abs(x) < 1e16:
            return str(int(x))
        return repr(x)

    if im == 0.0:
        return num(re_)
    if re_ == 0.0:
        return f"{num(im)}i"
    sign = "+" if im >= 0 else "-"
    return f"({num(re_)}{sign}{num(abs(im))}i)"


def format_poly(poly: NcPoly) -> str:
    """Canonical text form; ``parse(format_poly(P)) == P``.

    Terms are ordered length-lexicographically on (index, star) so output
    is deterministic.
    """
    if poly.is_zero():
        return "0"
    parts = []
    for w in sorted(poly._terms, key=_monomial_sort_key):
        c = poly._terms[w]
        word_txt = "*".join(str(let) for let in w)
        cs = _format_coeff(c)
        if not w:
            body = cs
        elif cs == "1":
            body = word_txt
        elif cs == "-1":
            body = f"-{word_txt}"
        else:
            body = f"{cs}*{word_txt}"
        if parts and not body.startswith("-"):
            parts.append("+ " + body)
        elif parts:
            parts.append("- " + body[1:])
        else:
            parts.append(body)
    return " ".join(parts)


_TOKEN_RE = re.compile(
    r"""\s*(?:
        (?P<gen>T(?P<genidx>\d+))
      | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)(?P<imag>i)?
      | (?P<iunit>i)
      | (?P<op>[-+*^()'])
    )""",
    re.VERBOSE,
)


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            if text[pos:].strip() == "":
                break
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        if m.group("gen"):
            tokens.append(("gen", int(m.group("genidx")), m.start()))
        elif m.group("num"):
            val = float(m.group("num"))
            if m.group("imag"):
                tokens.append(("num", complex(0.0, val), m.start()))
            else:
                tokens.append(("num", complex(val, 0.0), m.start()))
        elif m.group("iunit"):
            tokens.append(("num", 1j, m.start()))
        else:
            tokens.append(("op", m.group("op"), m.start()))
        pos = m.end()
    tokens.append(("end", None, len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str):
        kind, val, pos = self.peek()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r}", pos)
        return self.advance()

    def parse(self) -> NcPoly:
        poly = self.expr()
        kind, _, pos = self.peek()
        if kind != "end":
            raise ParseError("trailing input", pos)
        return poly

    def expr(self) -> NcPoly:
        sign = 1.0
        kind, val, _ = self.peek()
        if kind == "op" and val in "+-":
            self.advance()
            sign = -1.0 if val == "-" else 1.0
        acc = sign * self.term()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.advance()
                rhs = self.term()
                acc = acc + rhs if val == "+" else acc - rhs
            else:
                return acc

    def term(self) -> NcPoly:
        acc = self.factor()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val == "*":
                self.advance()
                acc = acc * self.factor()
            else:
                return acc

    def factor(self) -> NcPoly:
        acc = self.atom()
        while True:
            kind, val, pos = self.peek()
            if kind == "op" and val == "'":
                self.advance()
                acc = acc.adjoint()
            elif kind == "op" and val == "^":
                self.advance()
                k2, v2, p2 = self.advance()
                if k2 != "num" or v2.imag != 0 or v2.real != int(v2.real) or v2.real < 0:
                    raise ParseError("power must be a nonnegative integer", p2)
                acc = acc ** int(v2.real)
            else:
                return acc

    def atom(self) -> NcPoly:
        kind, val, pos = self.advance()
        if kind == "gen":
            if val < 1:
                raise ParseError("generator index must be >= 1", pos)
            return NcPoly.generator(val)
        if kind == "num":
            return NcPoly.scalar(val)
        if kind == "op" and val == "(":
            inner = self.expr()
            self.expect_op(")")
            return inner
        raise ParseError("expected generator, number, or '('", pos)


def parse(text: str) -> NcPoly:
    """Parse polynomial text; raises :class:`ParseError` with a position."""
    return _Parser(text).parse()


def all_monomials(ngens: int, max_degree: int, stars: bool = True):
    """Yield every word of degree <= max_degree over ngens generators.

    With ``stars`` the alphabet includes adjoint letters.  Words come out in
    length-lex order, the unit first.
    """
    alphabet = []
    for idx in range(1, ngens + 1):
        alphabet.append(Letter(idx, False))
        if stars:
            alphabet.append(Letter(idx, True))
    level: list[Monomial] = [()]
    yield ()
    for _ in range(max_degree):
        nxt = []
        for w in level:
            for let in alphabet:
                nw = w + (let,)
                nxt.append(nw)
                yield nw
        level = nxt
