"""Matrix-free tensor-product operators acting on Hilbert-Schmidt space.

An element ``sum_i c_i (L_i (x) R_i)`` of the matrix tensor square acts on a
k x k matrix C by ``C -> sum_i c_i L_i C R_i^T`` (transpose, not adjoint).
This action is a *-isomorphism onto the bounded operators of the
trace-inner-product space of k x k matrices, so tensor operator norms can be
computed by Lanczos on the k^2-dimensional action without forming dense
Kronecker matrices.  The vectorization convention (column stacking, dense
matrix ``kron(R, L)``) is pinned by the matrix-unit tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .ensembles import MatTuple, SeedSpec
from .ncpoly import NcPoly
from .spectral import HermOpHandle, lanczos_extremes

UNITARY_TOL = 1e-8
DENSE_GAP_DIM = 2048


@dataclass(frozen=True)
class TensorOp:
    """Finite sum of elementary tensors (L, R, coeff) on a common dimension."""

    terms: tuple
    dim: int

    def __init__(self, terms: Sequence, dim: int | None = None):
        packed = []
        for left, right, coeff in terms:
            left = np.asarray(left, dtype=complex)
            right = np.asarray(right, dtype=complex)
            packed.append((left, right, complex(coeff)))
        if not packed and dim is None:
            raise ValueError("dimension required for an empty operator")
        k = dim if dim is not None else packed[0][0].shape[0]
        for left, right, _ in packed:
            if left.shape != (k, k) or right.shape != (k, k):
                raise ValueError("all factors must be k x k")
        object.__setattr__(self, "terms", tuple(packed))
        object.__setattr__(self, "dim", int(k))

    # -- algebra ---------------------------------------------------------

    def apply(self, c: np.ndarray) -> np.ndarray:
        c = np.asarray(c, dtype=complex)
        if c.shape != (self.dim, self.dim):
            raise ValueError("operand dimension mismatch")
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for left, right, coeff in self.terms:
            out += coeff * (left @ c @ right.T)
        return out

    def adjoint(self) -> "TensorOp":
        return TensorOp(
            [(l.conj().T, r.conj().T, np.conj(c)) for l, r, c in self.terms],
            dim=self.dim,
        )

    def __add__(self, other: "TensorOp") -> "TensorOp":
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        return TensorOp(self.terms + other.terms, dim=self.dim)

    def __mul__(self, other: "TensorOp") -> "TensorOp":
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        prods = [
            (l1 @ l2, r1 @ r2, c1 * c2)
            for l1, r1, c1 in self.terms
            for l2, r2, c2 in other.terms
        ]
        return TensorOp(prods, dim=self.dim)

    def scale(self, c: complex) -> "TensorOp":
        return TensorOp([(l, r, c * c0) for l, r, c0 in self.terms], dim=self.dim)

    def to_dense(self) -> np.ndarray:
        """Dense k^2 x k^2 matrix in the column-stacking convention."""
        k = self.dim
        out = np.zeros((k * k, k * k), dtype=complex)
        for left, right, coeff in self.terms:
            out += coeff * np.kron(right, left)
        return out

    def is_hermitian_action(self, seed: SeedSpec | None = None, tol: float = 1e-10) -> bool:
        rng = (seed or SeedSpec(0x7E45)).generator()
        for _ in range(2):
            c1 = rng.standard_normal((self.dim, self.dim)) * (1 + 0j)
            c1 += 1j * rng.standard_normal((self.dim, self.dim))
            c2 = rng.standard_normal((self.dim, self.dim)) * (1 + 0j)
            c2 += 1j * rng.standard_normal((self.dim, self.dim))
            lhs = np.vdot(c2.ravel(), self.apply(c1).ravel())
            rhs = np.vdot(self.apply(c2).ravel(), c1.ravel())
            scale = 1.0 + abs(lhs) + abs(rhs)
            if abs(lhs - rhs) > tol * scale:
                return False
        return True


def sharp_apply(x: TensorOp, c: np.ndarray) -> np.ndarray:
    return x.apply(c)


def tensor_trace(x: TensorOp) -> complex:
    """Normalized trace (both legs normalized) of the tensor element."""
    k = x.dim
    return sum(c * np.trace(l) * np.trace(r) for l, r, c in x.terms) / (k * k)


def eval_tensor_poly(poly: NcPoly, x: MatTuple, y: MatTuple) -> TensorOp:
    """Evaluate a polynomial in tensor-leg generators.

    Indices 1..r act as ``X_i (x) 1`` and r+1..2r as ``1 (x) Y_i`` with
    r = len(x); starred letters use adjoints.  The legs commute, so each
    word contributes the ordered product of its left letters tensor the
    ordered product of its right letters.
    """
    if x.dim != y.dim:
        raise ValueError("leg dimensions differ")
    r = x.r
    k = x.dim
    eye = np.eye(k, dtype=complex)
    terms = []
    for word, coeff in poly.terms.items():
        left = eye
        right = eye
        for let in word:
            if let.index <= r:
                m = x.entries[let.index - 1]
                left = left @ (m.conj().T if let.star else m)
            elif let.index <= r + y.r:
                m = y.entries[let.index - r - 1]
                right = right @ (m.conj().T if let.star else m)
            else:
                raise IndexError(
                    f"generator T{let.index} outside the tensor convention"
                )
        terms.append((left, right, coeff))
    return TensorOp(terms, dim=k)


def _vec(c: np.ndarray) -> np.ndarray:
    return c.reshape(-1, order="F")


def _unvec(v: np.ndarray, k: int) -> np.ndarray:
    return v.reshape((k, k), order="F")


class NormEstimate(float):
    """A norm value that also carries its certification status.

    Behaves as a float (the best certified lower bound found); ``converged``
    says whether a Lanczos stopping rule was satisfied, and ``iterations``
    how much work was spent.  Soft spectral edges (extreme eigenvalue not
    isolated) are flagged, never silently truncated.
    """

    converged: bool
    iterations: int

    def __new__(cls, value: float, converged: bool, iterations: int):
        obj = super().__new__(cls, value)
        obj.converged = bool(converged)
        obj.iterations = int(iterations)
        return obj


def _identity_start(k: int, blocks: int) -> np.ndarray:
    e = _vec(np.eye(k, dtype=complex)) / math.sqrt(k)
    v = np.concatenate([e] * blocks)
    return v / np.linalg.norm(v)


def tensor_norm(
    x: TensorOp,
    tol: float = 1e-9,
    max_iter: int | None = None,
    seed: SeedSpec | None = None,
) -> NormEstimate:
    """Operator norm of the action on Hilbert-Schmidt space, matrix-free.

    Hermitian actions go through Lanczos directly; otherwise the Hermitian
    dilation ``[[0, x], [x*, 0]]`` is used (its spectrum is symmetric, so
    the top edge carries the norm).  Two passes run: one from the pure
    identity vector, which closes the Krylov space exactly when the
    identity generates a small invariant subspace (averaged conjugations
    have this structure), and one from a seeded random vector that explores
    the global edge.  Every Ritz value is a certified lower bound; the
    maximum is returned as a :class:`NormEstimate` whose flag reports
    whether a stopping rule was actually satisfied.
    """
    k = x.dim
    seed = seed or SeedSpec(0x7E50)

    if x.is_hermitian_action():
        handle = HermOpHandle(
            k * k, lambda v: _vec(x.apply(_unvec(v, k))), check=False,
        )
        blocks = 1
        which = "both"
        value_of = lambda res: max(abs(res.lambda_min), abs(res.lambda_max))
    else:
        xadj = x.adjoint()

        def dilated(v: np.ndarray) -> np.ndarray:
            top, bottom = v[: k * k], v[k * k:]
            out_top = _vec(x.apply(_unvec(bottom, k)))
            out_bottom = _vec(xadj.apply(_unvec(top, k)))
            return np.concatenate([out_top, out_bottom])

        handle = HermOpHandle(2 * k * k, dilated, check=False)
        blocks = 2
        which = "max"
        value_of = lambda res: abs(res.lambda_max)

    if max_iter is None:
        max_iter = min(handle.dim, 320)

    # structured pass: exact closure when the identity generates an
    # invariant subspace
    res_eye = lanczos_extremes(
        handle, tol=tol, max_iter=min(80, max_iter), start=_identity_start(k, blocks),
        which=which, stagnation_tol=None,
    )
    eye_closed = res_eye.converged and res_eye.iterations < min(80, max_iter)
    eye_val = value_of(res_eye) if res_eye.converged else 0.0

    # generic pass: global edge from a random start
    rng = seed.generator()
    g = rng.standard_normal(handle.dim) + 1j * rng.standard_normal(handle.dim)
    probe_iter = min(120, max_iter) if eye_closed else max_iter
    res_rand = lanczos_extremes(
        handle, tol=tol, max_iter=probe_iter, start=g,
        which=which, stagnation_tol=tol,
    )
    rand_val = value_of(res_rand)

    scale = 1.0 + max(eye_val, rand_val)
    if eye_closed and rand_val <= eye_val + 1e-10 * scale:
        return NormEstimate(max(eye_val, rand_val), True,
                            res_eye.iterations + res_rand.iterations)
    return NormEstimate(max(eye_val, rand_val), res_rand.converged,
                        res_eye.iterations + res_rand.iterations)


def haagerup_witness(u: MatTuple, v: MatTuple, tol: float = 1e-9,
                     seed: SeedSpec | None = None) -> float:
    """Norm of ``(1/r) sum_j U_j (x) conj(V_j)`` on Hilbert-Schmidt space.

    The action is ``C -> (1/r) sum_j U_j C V_j*``.  With U = V the identity
    is a fixed point and the value is exactly 1; values strictly below 1
    witness nonamenability-style behavior of the pair.
    """
    if u.dim != v.dim or u.r != v.r:
        raise ValueError("tuples must share shape")
    for tup in (u, v):
        for m in tup.entries:
            if np.linalg.norm(m.conj().T @ m - np.eye(tup.dim), 2) > UNITARY_TOL:
                raise ValueError("witness requires unitary coordinates")
    r = u.r
    terms = [(u.entries[j], v.entries[j].conj(), 1.0 / r) for j in range(r)]
    return tensor_norm(TensorOp(terms, dim=u.dim), tol=tol, seed=seed)


class LaplacianGap(NamedTuple):
    lambda_min: float
    lambda_gap: float
    converged: bool


def nonamen_laplacian(
    x: MatTuple,
    mu: Sequence[float],
    tol: float = 1e-9,
    max_iter: int | None = None,
    seed: SeedSpec | None = None,
) -> LaplacianGap:
    """Spectral floor and gap of ``sum_j mu_j |X_j (x) 1 - 1 (x) X_j^T|^2``.

    The action of each difference is the commutator ``C -> X_j C - C X_j``,
    so the identity is always in the kernel and ``lambda_min`` must be 0 up
    to rounding.  ``lambda_gap`` is the smallest eigenvalue on the
    orthogonal complement of the kernel: near-zero directions found after
    deflating the identity are deflated in turn, so commuting tuples report
    the first genuinely positive eigenvalue.
    """
    weights = np.asarray(mu, dtype=float)
    if weights.shape != (x.r,) or np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-9:
        raise ValueError("mu must be a probability vector over the tuple index")
    if not x.is_hermitian():
        raise ValueError("the self-adjoint form needs Hermitian coordinates")
    k = x.dim
    eye = np.eye(k, dtype=complex)
    terms = []
    for w, m in zip(weights, x.entries):
        mt = m.T
        terms += [
            (m @ m, eye, w),
            (m, mt, -w),
            (m, mt, -w),
            (eye, mt @ mt, w),
        ]
    lap = TensorOp(terms, dim=k)

    n = k * k
    if n <= DENSE_GAP_DIM:
        dense = lap.to_dense()
        vals = np.linalg.eigvalsh((dense + dense.conj().T) / 2)
        lam_min = float(vals[0])
        ztol = 1e-9 * (1.0 + abs(float(vals[-1])))
        above = vals[vals > ztol]
        lam_gap = float(above[0]) if len(above) else 0.0
        return LaplacianGap(lam_min, lam_gap, True)

    handle = HermOpHandle(n, lambda vec: _vec(lap.apply(_unvec(vec, k))), check=False)
    res = lanczos_extremes(handle, tol=tol, max_iter=max_iter,
                           seed=(seed or SeedSpec(0x9A9)), which="min",
                           stagnation_tol=tol)
    lam_min = res.lambda_min
    scale = 1.0 + abs(res.lambda_max)
    ztol = 1e-8 * scale
    converged = res.converged

    deflate = [_vec(eye) / math.sqrt(k)]
    lam_gap = 0.0
    for _ in range(8):
        h = HermOpHandle(
            n,
            lambda vec: _vec(lap.apply(_unvec(vec, k))),
            deflate=np.column_stack(deflate),
            check=False,
        )
        r2 = lanczos_extremes(h, tol=tol, max_iter=max_iter,
                              seed=(seed or SeedSpec(0x9A9)).child(len(deflate)),
                              which="min", stagnation_tol=tol)
        converged = converged and r2.converged
        if r2.lambda_min > ztol:
            lam_gap = r2.lambda_min
            break
        vec = r2.vector_min
        for d in deflate:
            vec = vec - d * np.vdot(d, vec)
        nv = np.linalg.norm(vec)
        if nv < 1e-8:
            break
        deflate.append(vec / nv)
    return LaplacianGap(float(lam_min), float(lam_gap), converged)


def schatten_norm(a: np.ndarray, p: float) -> float:
    """Trace-normalized Schatten p-norm; p = inf is the operator norm."""
    if p < 1:
        raise ValueError("p must be >= 1")
    a = np.asarray(a, dtype=complex)
    s = np.linalg.svd(a, compute_uv=False)
    if math.isinf(p):
        return float(s[0]) if len(s) else 0.0
    return float(np.mean(s ** p) ** (1.0 / p))


def norm_inf_one_lower(
    x: TensorOp,
    trials: int = 12,
    seed: SeedSpec | None = None,
    ascent_steps: int = 12,
) -> float:
    """Heuristic lower bound on the sup-to-trace norm of the action.

    Maximizes ``||x # C||_1`` over contractions C by sampling unitaries and
    signed projections, then alternating polar-factor ascent (the maximizer
    of ``Re tr(D* B)`` over contractions D is the polar unitary of B).
    Every evaluation uses an exactly admissible C, so the result is a true
    lower bound, never an estimate of the norm itself.
    """
    k = x.dim
    seed = seed or SeedSpec(0x1F01)
    xadj = x.adjoint()

    def polar(m: np.ndarray) -> np.ndarray:
        uu, _, vh = np.linalg.svd(m)
        return uu @ vh

    def one_norm(m: np.ndarray) -> float:
        return float(np.mean(np.linalg.svd(m, compute_uv=False)))

    best = 0.0
    for t in range(max(trials, 1)):
        rng = seed.child(t).generator()
        if t == 0:
            c = np.eye(k, dtype=complex)
        elif t % 2 == 1:
            z = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
            q, r = np.linalg.qr(z)
            c = q * (np.diagonal(r) / np.abs(np.diagonal(r)))
        else:
            z = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
            q, _ = np.linalg.qr(z)
            signs = np.where(rng.standard_normal(k) >= 0, 1.0, -1.0)
            c = q @ np.diag(signs) @ q.conj().T
        best = max(best, one_norm(x.apply(c)))
        for _ in range(ascent_steps):
            b = x.apply(c)
            d = polar(b)
            c = polar(xadj.apply(d))
            best = max(best, one_norm(x.apply(c)))
    return best
