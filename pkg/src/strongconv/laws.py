"""Truncated tracial laws, empirical laws of matrix tuples, and microstates.

A law stores every *-monomial moment up to a degree cap together with the
norm radii of its generators.  Empirical laws use the normalized trace; the
limit laws come from the moment oracles in :mod:`strongconv.freeprob`.
Microstate membership is the conjunction of a moment-box test and the norm
radius bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import freeprob, spectral, tensorops
from .ensembles import MatTuple
from .freeprob import BudgetExceededError, GeneratorSpec
from .ncpoly import (
    Letter,
    Monomial,
    NcPoly,
    all_monomials,
    monomial_adjoint,
    monomial_str,
    parse_monomial,
)

UNIT_TOL = 1e-9
HERM_TOL = 1e-9
RADIUS_SLACK = 1e-9


@dataclass(frozen=True)
class Law:
    """Finite map from *-monomials (degree <= degree_cap) to moments."""

    moments: dict
    degree_cap: int
    radii: tuple
    ngens: int

    def __post_init__(self):
        object.__setattr__(self, "moments", dict(self.moments))
        object.__setattr__(self, "radii", tuple(float(r) for r in self.radii))
        if len(self.radii) != self.ngens:
            raise ValueError("one radius per generator required")
        unit = self.moments.get((), None)
        if unit is None or abs(unit - 1.0) > UNIT_TOL:
            raise ValueError("a law must send the unit to 1")
        for word, value in self.moments.items():
            star = self.moments.get(monomial_adjoint(word))
            if star is not None and abs(np.conj(star) - value) > HERM_TOL:
                raise ValueError(f"hermitian symmetry fails at {monomial_str(word)}")
            bound = 1.0
            for let in word:
                bound *= self.radii[let.index - 1]
            if math.isfinite(bound) and abs(value) > bound + RADIUS_SLACK:
                raise ValueError(
                    f"moment of {monomial_str(word)} exceeds its radius bound {bound}"
                )

    def __call__(self, word: Monomial) -> complex:
        return self.moments[tuple(word)]

    def to_jsonable(self) -> dict:
        return {
            "degree_cap": self.degree_cap,
            "ngens": self.ngens,
            "radii": ["inf" if math.isinf(r) else r for r in self.radii],
            "moments": {
                monomial_str(w): [float(np.real(v)), float(np.imag(v))]
                for w, v in sorted(self.moments.items(), key=lambda kv: (len(kv[0]), monomial_str(kv[0])))
            },
        }

    @classmethod
    def from_jsonable(cls, data: dict) -> "Law":
        radii = tuple(math.inf if r == "inf" else float(r) for r in data["radii"])
        moments = {
            parse_monomial(key): complex(re, im)
            for key, (re, im) in data["moments"].items()
        }
        return cls(moments, int(data["degree_cap"]), radii, int(data["ngens"]))


@dataclass(frozen=True)
class NeighborhoodSpec:
    """A moment box around a center law: sup over monomials of degree <= D."""

    center: Law
    epsilon: float

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("tolerance must be positive")


def empirical_law(a: MatTuple, degree_cap: int) -> Law:
    """Law of a matrix tuple under the normalized trace.

    Word values are evaluated along a prefix tree so each extra letter costs
    one matrix product.
    """
    if degree_cap < 1:
        raise ValueError("degree cap must be >= 1")
    k = a.dim
    letters = {}
    for j, m in enumerate(a.entries, start=1):
        letters[(j, False)] = m
        letters[(j, True)] = m.conj().T
    eye = np.eye(k, dtype=complex)
    products = {(): eye}
    moments = {(): 1.0 + 0.0j}
    level = [()]
    for _ in range(degree_cap):
        nxt = []
        for w in level:
            base = products[w]
            for (idx, star), mat in letters.items():
                nw = w + (Letter(idx, star),)
                prod = base @ mat
                products[nw] = prod
                moments[nw] = complex(np.trace(prod) / k)
                nxt.append(nw)
        level = nxt
        # keep only the last level of products to bound memory
        products = {w: products[w] for w in level}
        products[()] = eye
    return Law(moments, degree_cap, a.radii, a.r)


def oracle_law(spec: GeneratorSpec, degree_cap: int, ngens: int | None = None,
               radii: tuple | None = None) -> Law:
    """Law of the limit family, truncated at ``degree_cap``.

    ``ngens`` defaults to ``spec.count`` (single-leg words); pass
    ``2 * spec.count`` for tensor-leg laws.
    """
    n = spec.count if ngens is None else ngens
    if n > 2 * spec.count:
        raise ValueError("ngens cannot exceed 2 * spec.count")
    if radii is None:
        radii = (spec.norm_radius(),) * n
    moments = {}
    for w in all_monomials(n, degree_cap):
        moments[w] = freeprob.poly_moment(NcPoly.from_monomial(w), spec)
    return Law(moments, degree_cap, radii, n)


def law_distance(l1: Law, l2: Law, degree_cap: int | None = None) -> float:
    """Sup over shared monomials of degree <= cap of the moment gap."""
    if l1.ngens != l2.ngens:
        raise ValueError("laws have different generator counts")
    cap = min(l1.degree_cap, l2.degree_cap) if degree_cap is None else degree_cap
    if cap > min(l1.degree_cap, l2.degree_cap):
        raise ValueError("degree cap exceeds a stored law")
    worst = 0.0
    for w in all_monomials(l1.ngens, cap):
        worst = max(worst, abs(l1.moments[w] - l2.moments[w]))
    return worst


def is_microstate(a: MatTuple, nbhd: NeighborhoodSpec) -> bool:
    """Moment-box membership plus the norm radius bounds of the center."""
    center = nbhd.center
    if any(not math.isfinite(r) for r in center.radii):
        raise ValueError("microstate tests need finite radii on the center law")
    if a.r != center.ngens:
        raise ValueError("tuple length does not match the law")
    for m, radius in zip(a.entries, center.radii):
        if np.linalg.norm(m, 2) > radius + RADIUS_SLACK:
            return False
    emp = empirical_law(a, center.degree_cap)
    return law_distance(emp, center) < nbhd.epsilon


def strong_discrepancy(
    a,
    spec: GeneratorSpec,
    test_polys: Sequence[NcPoly],
    q_max: int,
    norm_tol: float = 1e-8,
    seed=None,
) -> list:
    """Moment and norm gaps between a finite tuple and the limit oracles.

    ``a`` is either a plain :class:`MatTuple` (single-leg polynomials) or a
    pair ``(X, Y)`` of tuples interpreted as the two tensor legs.  Each row
    reports the finite-size moment/norm, the oracle values, and signed gaps;
    oracle budget violations are reported per row instead of aborting.
    """
    rows = []
    tensor_pair = isinstance(a, tuple) and len(a) == 2
    for poly in test_polys:
        row = {"poly": str(poly)}
        if tensor_pair:
            x, y = a
            op = tensorops.eval_tensor_poly(poly, x, y)
            fin_moment = tensorops.tensor_trace(op)
            fin_norm = tensorops.tensor_norm(op, tol=norm_tol, seed=seed)
        else:
            mat = poly.evaluate(a.entries)
            fin_moment = complex(np.trace(mat) / a.dim)
            fin_norm = spectral.op_norm(mat)
        row["moment_fin"] = fin_moment
        row["norm_fin"] = fin_norm
        oracle_moment = freeprob.poly_moment(poly, spec)
        row["moment_oracle"] = oracle_moment
        row["moment_gap"] = abs(fin_moment - oracle_moment)
        try:
            ln = freeprob.limit_norm(poly, spec, q_max)
            row["norm_oracle"] = ln.extrapolated
            row["norm_raw_max"] = max(ln.raw_lower_bounds)
            row["norm_gap"] = fin_norm - ln.extrapolated
            row["error"] = ""
        except BudgetExceededError as exc:
            row["norm_oracle"] = math.nan
            row["norm_raw_max"] = math.nan
            row["norm_gap"] = math.nan
            row["error"] = str(exc)
        rows.append(row)
    return rows
