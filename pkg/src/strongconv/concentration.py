"""Concentration functions on finite metric-measure spaces and empirical
deviation profiles for matrix ensembles.

The exact concentration function
``alpha(eps) = worst-case mu(outside the eps-neighborhood of E) over Borel
E with mu(E) >= 1/2`` is computed by full subset enumeration (n <= 16); it
is the smallest constant with ``mu(N_eps(E)) >= 1 - alpha`` for every
half-mass E.  The matrix-space analogue
is intractable, so ensembles are probed instead through tail profiles of
unitarily invariant observables: the diagnostic is whether
``-log(tail) / k^2`` grows with k, the signature of concentration at the
square-of-dimension scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import spectral
from .ensembles import SeedSpec, sample_tuple
from .ncpoly import NcPoly

MAX_EXACT_POINTS = 16
METRIC_TOL = 1e-12


@dataclass(frozen=True)
class FiniteMMSpace:
    """n points, a pseudometric matrix, and a probability vector."""

    dist: np.ndarray
    weights: np.ndarray

    def __init__(self, dist, weights):
        d = np.asarray(dist, dtype=float)
        w = np.asarray(weights, dtype=float)
        n = d.shape[0]
        if d.shape != (n, n):
            raise ValueError("distance matrix must be square")
        if w.shape != (n,):
            raise ValueError("one weight per point required")
        if np.any(d < 0) or np.any(np.abs(np.diagonal(d)) > METRIC_TOL):
            raise ValueError("distances must be nonnegative with zero diagonal")
        if np.linalg.norm(d - d.T) > METRIC_TOL:
            raise ValueError("distance matrix must be symmetric")
        through = np.min(d[:, :, None] + d[None, :, :], axis=1)
        if np.any(d > through + METRIC_TOL):
            raise ValueError("triangle inequality fails")
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-9:
            raise ValueError("weights must form a probability vector")
        object.__setattr__(self, "dist", d)
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return self.dist.shape[0]


def _subset_weights(weights: np.ndarray) -> np.ndarray:
    """Vector of subset masses indexed by bitmask."""
    acc = np.zeros(1)
    for w in weights:
        acc = np.concatenate([acc, acc + w])
    return acc


def _subset_neighborhoods(dist: np.ndarray, eps: float) -> np.ndarray:
    """Bitmask of the open eps-neighborhood of every subset."""
    n = dist.shape[0]
    point_masks = np.zeros(n, dtype=np.int64)
    for i in range(n):
        mask = 0
        for j in range(n):
            if dist[i, j] < eps:
                mask |= 1 << j
        point_masks[i] = mask
    acc = np.zeros(1, dtype=np.int64)
    for i in range(n):
        acc = np.concatenate([acc, acc | point_masks[i]])
    return acc


def alpha_exact(space: FiniteMMSpace, eps: float) -> float:
    """Exact concentration function by enumerating all half-mass subsets.

    Worst case over subsets, so ``alpha <= 1/2`` always (the neighborhood
    contains the set itself) and alpha is nonincreasing in eps.
    """
    if space.n > MAX_EXACT_POINTS:
        raise ValueError(
            f"exact enumeration capped at {MAX_EXACT_POINTS} points; "
            "use the sampling profile instead"
        )
    if eps <= 0:
        raise ValueError("eps must be positive")
    masses = _subset_weights(space.weights)
    hoods = _subset_neighborhoods(space.dist, eps)
    half = masses >= 0.5
    outside = 1.0 - masses[hoods[half]]
    return float(min(max(outside.max(), 0.0), 1.0))


def _mask_of(subset, n: int) -> int:
    if isinstance(subset, (int, np.integer)):
        return int(subset)
    mask = 0
    for i, flag in enumerate(subset):
        if flag:
            mask |= 1 << i
    return mask


def expansion_check(space: FiniteMMSpace, omega, eps: float) -> bool:
    """Instance check of the expansion property of the concentration function.

    If ``mu(omega) > alpha(eps)`` then the 2*eps-neighborhood of omega must
    carry mass at least ``1 - alpha(eps)``; instances where the antecedent
    fails pass vacuously.  The antecedent is strict, so rounding-level ties
    (within 1e-12) count as vacuous rather than as violations.  This holds
    for every space, so a False here is a bug in the caller or in
    :func:`alpha_exact`.
    """
    n = space.n
    mask = _mask_of(omega, n)
    masses = _subset_weights(space.weights)
    mu_omega = float(masses[mask])
    alpha = alpha_exact(space, eps)
    if mu_omega <= alpha + 1e-12:
        return True
    hood2 = _subset_neighborhoods(space.dist, 2.0 * eps)
    mu_hood = float(masses[hood2[mask]])
    return mu_hood >= 1.0 - alpha - 1e-12


DEFAULT_EPS_GRID = (0.05, 0.1, 0.2, 0.5)


def deviation_profile(
    kind: str,
    observable: NcPoly,
    statistic: str,
    ks: Sequence[int],
    reps: int,
    seed: SeedSpec,
    eps_grid: Sequence[float] = DEFAULT_EPS_GRID,
    r: int | None = None,
) -> list:
    """Empirical tail profile of a unitarily invariant matrix observable.

    For each dimension k, ``reps`` tuples are sampled and the observable is
    evaluated (``trace_moment`` takes the real part of the normalized trace,
    ``op_norm`` the operator norm).  Rows report the empirical probability
    of deviating from the sample median by more than eps and the normalized
    log-tail ``-log(p) / k^2``; empty tails are censored at ``1/reps`` and
    flagged.
    """
    if statistic not in ("trace_moment", "op_norm"):
        raise ValueError("statistic must be trace_moment or op_norm")
    ngens = r if r is not None else max(observable.max_generator_index(), 1)
    rows = []
    for ki, k in enumerate(ks):
        values = np.empty(reps)
        for rep in range(reps):
            tup = sample_tuple(kind, ngens, k, seed.child(ki, rep))
            mat = observable.evaluate(tup.entries)
            if statistic == "trace_moment":
                values[rep] = float(np.real(np.trace(mat))) / k
            else:
                values[rep] = spectral.op_norm(mat)
        med = float(np.median(values))
        dev = np.abs(values - med)
        for eps in eps_grid:
            tail = float(np.mean(dev > eps))
            censored = tail == 0.0
            p_eff = max(tail, 1.0 / reps)
            rows.append({
                "k": k,
                "epsilon": float(eps),
                "tail_prob": tail,
                "neg_log_tail_over_k2": -math.log(p_eff) / (k * k),
                "censored_flag": censored,
            })
    return rows
