"""Exact moment oracles for free semicircular and free Haar-unitary families.

These are the limit objects that finite matrix ensembles are compared
against.  Semicircular mixed moments are counts of index-matching
non-crossing pair partitions; Haar-unitary moments are indicators of
trivial reduced words in the free group.  Tensor-leg words factor into a
left-leg and a right-leg moment because the legs commute.

The limit operator norm of a polynomial is recovered from its moment
sequence: ``m_q = moment((P* P)^q)`` gives certified lower bounds
``m_q ** (1 / 2q)`` which increase to the norm, and a three-parameter
fit ``log m_q ~ 2 q log(rho) - alpha log(q) + c`` extrapolates past the
truncation (the ``q^(-alpha)`` factor models the square-root spectral
edge that makes raw bounds converge slowly).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .ncpoly import NcPoly

DEFAULT_LETTER_BUDGET = 28
DEFAULT_TERM_CAP = 5_000_000


class BudgetExceededError(RuntimeError):
    """Raised when a symbolic computation would exceed its declared budget."""


@dataclass(frozen=True)
class GeneratorSpec:
    """Limit family: r free semicirculars (mean, variance) or r free Haars."""

    kind: str
    count: int
    mean: float = 0.0
    variance: float = 1.0

    def __post_init__(self):
        if self.kind not in ("semicircular", "haar_unitary", "haar"):
            raise ValueError(f"unknown generator kind {self.kind!r}")
        if self.kind == "haar":
            object.__setattr__(self, "kind", "haar_unitary")
        if self.count < 1:
            raise ValueError("count must be >= 1")
        if self.kind == "semicircular" and self.variance <= 0:
            raise ValueError("variance must be positive")

    @property
    def sigma(self) -> float:
        return math.sqrt(self.variance)

    def norm_radius(self) -> float:
        if self.kind == "semicircular":
            return abs(self.mean) + 2.0 * self.sigma
        return 1.0


class OracleLetter(NamedTuple):
    leg: str | None       # "left" | "right" | None for single-algebra words
    index: int
    star: bool


OracleWord = tuple  # tuple[OracleLetter, ...]


def semicircular_moment(word: Sequence[int]) -> float:
    """Mixed moment of centered variance-1 free semicirculars.

    ``word`` lists generator indices; the value is the number of
    non-crossing pair partitions whose pairs match indices (0 for odd
    length).  Computed by the interval-splitting recursion with
    memoization on subwords; the memo table lives only for this call.
    """
    w = tuple(int(i) for i in word)
    memo: dict = {}

    def count(sub: tuple) -> int:
        if not sub:
            return 1
        if len(sub) % 2 == 1:
            return 0
        cached = memo.get(sub)
        if cached is not None:
            return cached
        total = 0
        first = sub[0]
        # the partner of position 0 must sit at an odd offset
        for m in range(1, len(sub), 2):
            if sub[m] == first:
                inner = count(sub[1:m])
                if inner:
                    total += inner * count(sub[m + 1:])
        memo[sub] = total
        return total

    return float(count(w))


def haar_unitary_moment(word: Sequence[tuple]) -> int:
    """1 if the word (index, exponent +-1) reduces to the identity, else 0."""
    stack: list[tuple] = []
    for index, exp in word:
        index = int(index)
        exp = int(exp)
        if exp not in (1, -1):
            raise ValueError("exponents must be +1 or -1")
        if stack and stack[-1] == (index, -exp):
            stack.pop()
        else:
            stack.append((index, exp))
    return 1 if not stack else 0


def _single_leg_moment(letters: Sequence[OracleLetter], spec: GeneratorSpec) -> complex:
    if spec.kind == "semicircular":
        # generators are self-adjoint, stars are the identity
        return complex(semicircular_moment([let.index for let in letters]))
    return complex(
        haar_unitary_moment([(let.index, -1 if let.star else 1) for let in letters])
    )


def tensor_moment(word: Sequence[OracleLetter], spec: GeneratorSpec) -> complex:
    """Moment of a tensor-leg word: the legs commute, so the word splits
    into its left and right subsequences and the moments multiply.

    Requires centered variance-1 semicirculars; general (mean, variance)
    enters through the polynomial-level substitution in :func:`poly_moment`.
    """
    left = [let for let in word if let.leg in ("left", None)]
    right = [let for let in word if let.leg == "right"]
    return _single_leg_moment(left, spec) * _single_leg_moment(right, spec)


def _word_to_oracle(word, r: int) -> OracleWord:
    out = []
    for let in word:
        if let.index <= r:
            out.append(OracleLetter("left", let.index, let.star))
        elif let.index <= 2 * r:
            out.append(OracleLetter("right", let.index - r, let.star))
        else:
            raise IndexError(
                f"generator T{let.index} outside the 2r = {2 * r} tensor convention"
            )
    return tuple(out)


def poly_moment(poly: NcPoly, spec: GeneratorSpec) -> complex:
    """Linear extension of :func:`tensor_moment` to polynomials.

    Generator indices 1..r are the left tensor leg, r+1..2r the right leg;
    plain single-algebra polynomials are the special case where only the
    left leg appears.  Subword moments are memoized across all terms of the
    polynomial, which is what keeps high symbolic powers tractable.
    """
    if spec.kind == "semicircular" and (spec.mean != 0.0 or spec.variance != 1.0):
        subs = {}
        for idx in range(1, 2 * spec.count + 1):
            subs[idx] = NcPoly.scalar(spec.mean) + spec.sigma * NcPoly.generator(idx)
        poly = poly.substitute(subs)
        spec = GeneratorSpec(spec.kind, spec.count)

    r = spec.count
    semicircular = spec.kind == "semicircular"
    memo: dict = {}

    def pairing_count(sub: tuple) -> int:
        if not sub:
            return 1
        if len(sub) % 2 == 1:
            return 0
        cached = memo.get(sub)
        if cached is not None:
            return cached
        total = 0
        first = sub[0]
        for m in range(1, len(sub), 2):
            if sub[m] == first:
                inner = pairing_count(sub[1:m])
                if inner:
                    total += inner * pairing_count(sub[m + 1:])
        memo[sub] = total
        return total

    top = poly.max_generator_index()
    if top > 2 * r:
        raise IndexError(
            f"generator T{top} outside the 2r = {2 * r} tensor convention"
        )

    total = 0.0 + 0.0j
    for word, coeff in poly.terms.items():
        if semicircular:
            left = tuple(let.index for let in word if let.index <= r)
            right = tuple(let.index - r for let in word if let.index > r)
            value = float(pairing_count(left)) * float(pairing_count(right))
        else:
            left = tuple(
                (let.index, -1 if let.star else 1)
                for let in word if let.index <= r
            )
            right = tuple(
                (let.index - r, -1 if let.star else 1)
                for let in word if let.index > r
            )
            value = float(haar_unitary_moment(left)) * float(haar_unitary_moment(right))
        total += coeff * value
    return total


class LimitNorm(NamedTuple):
    raw_lower_bounds: tuple
    extrapolated: float
    moments: tuple


def limit_norm(
    poly: NcPoly,
    spec: GeneratorSpec,
    q_max: int,
    letter_budget: int = DEFAULT_LETTER_BUDGET,
    term_cap: int = DEFAULT_TERM_CAP,
) -> LimitNorm:
    """Certified lower bounds and an extrapolation for the limit operator norm.

    ``m_q = moment((P* P)^q)`` is computed symbolically for q = 1..q_max.
    Each ``m_q ** (1/2q)`` is a true lower bound; the extrapolation fits
    ``log m_q ~ 2 q log(rho) - alpha log(q) + c`` over the upper half of the
    q range and reports ``rho``.  Raises :class:`BudgetExceededError` when
    the word length or term count budget would be exceeded, and
    ``ArithmeticError`` if any m_q comes out negative (positivity makes that
    impossible for a correct oracle).
    """
    if q_max < 1:
        raise ValueError("q_max must be >= 1")
    deg = poly.degree
    if 2 * deg * q_max > letter_budget:
        raise BudgetExceededError(
            f"word length 2*{deg}*{q_max} exceeds the budget of {letter_budget} letters"
        )
    base = poly.adjoint() * poly
    moments = []
    power = NcPoly.one()
    for q in range(1, q_max + 1):
        power = power * base
        if power.nterms > term_cap:
            raise BudgetExceededError(
                f"(P*P)^{q} has {power.nterms} terms, cap is {term_cap}"
            )
        val = poly_moment(power, spec)
        scale = 1.0 + abs(val)
        if val.real < -1e-12 * scale or abs(val.imag) > 1e-9 * scale:
            raise ArithmeticError(
                f"moment of (P*P)^{q} is {val}; positivity is violated"
            )
        moments.append(max(val.real, 0.0))

    raws = tuple(m ** (1.0 / (2.0 * q)) for q, m in enumerate(moments, start=1))
    extrapolated = _extrapolate(moments)
    return LimitNorm(raws, extrapolated, tuple(moments))


def _extrapolate(moments: Sequence[float]) -> float:
    q_max = len(moments)
    qs = [q for q in range(q_max // 2 + 1, q_max + 1)]
    if len(qs) < 3:
        qs = list(range(1, q_max + 1))
    vals = [moments[q - 1] for q in qs]
    if any(v <= 0.0 for v in vals):
        # vanishing moments (element is 0 in the trace norm): fall back to
        # the best certified bound
        raws = [m ** (1.0 / (2.0 * q)) for q, m in enumerate(moments, start=1) if m > 0]
        return max(raws, default=0.0)
    if len(qs) < 3:
        return vals[-1] ** (1.0 / (2.0 * qs[-1]))
    a = np.array([[2.0 * q, -math.log(q), 1.0] for q in qs])
    b = np.array([math.log(v) for v in vals])
    coef, *_ = np.linalg.lstsq(a, b, rcond=None)
    return float(math.exp(coef[0]))
