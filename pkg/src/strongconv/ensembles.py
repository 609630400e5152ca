"""Seeded samplers for GUE and Haar-unitary matrix ensembles.

Randomness contract
-------------------
Every sample is a pure function of a :class:`SeedSpec`.  A SeedSpec names a
counter-based Philox stream via numpy's ``SeedSequence(master_seed,
spawn_key=stream_path)``, so identical specs give bit-identical matrices
regardless of thread scheduling, and disjoint ``stream_path`` values give
statistically independent streams.

The seed-to-value map is pinned as follows and must not be reordered:

* GUE: draw ``G = standard_normal((k, k)) + 1j * standard_normal((k, k))``
  (real block first), return ``(G + G.conj().T) / (2 sqrt(k))``.  Diagonal
  entries then have variance ``1/k`` and off-diagonal real/imaginary parts
  variance ``1/(2k)``.
* Haar: draw ``Z = (standard_normal + 1j standard_normal) / sqrt(2)``
  (real block first), QR-factor, and rescale each column of Q by the
  conjugate phase of the matching diagonal entry of R.  The phase correction
  is what makes the law exactly Haar; plain QR is biased and is not used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_U64 = 2**64


@dataclass(frozen=True)
class SeedSpec:
    """Address of one random stream: a master seed plus a path of indices."""

    master_seed: int
    stream_path: tuple = ()

    def __post_init__(self):
        if not (0 <= int(self.master_seed) < _U64):
            raise ValueError("master_seed must fit in 64 bits")
        path = tuple(int(p) for p in self.stream_path)
        if any(p < 0 for p in path):
            raise ValueError("stream_path entries must be nonnegative")
        object.__setattr__(self, "master_seed", int(self.master_seed))
        object.__setattr__(self, "stream_path", path)

    def child(self, *indices: int) -> "SeedSpec":
        return SeedSpec(self.master_seed, self.stream_path + tuple(indices))

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.master_seed, spawn_key=self.stream_path)
        return np.random.Generator(np.random.Philox(ss))

    def serialize(self) -> str:
        path = ".".join(str(p) for p in self.stream_path)
        return f"{self.master_seed}/{path}"

    @classmethod
    def deserialize(cls, text: str) -> "SeedSpec":
        master, _, path = text.partition("/")
        parts = tuple(int(p) for p in path.split(".") if p != "")
        return cls(int(master), parts)


NORM_SLACK = 1e-8


@dataclass(frozen=True)
class MatTuple:
    """An ordered tuple of k x k complex matrices with declared norm radii."""

    entries: tuple
    dim: int
    radii: tuple

    def __init__(self, entries, radii=None):
        mats = tuple(np.asarray(m, dtype=complex) for m in entries)
        if not mats:
            raise ValueError("empty tuple")
        k = mats[0].shape[0]
        for m in mats:
            if m.shape != (k, k):
                raise ValueError("all matrices must be square of common dimension")
        if k < 1:
            raise ValueError("dimension must be >= 1")
        if radii is None:
            rad = (math.inf,) * len(mats)
        else:
            rad = tuple(float(r) for r in radii)
            if len(rad) != len(mats):
                raise ValueError("one radius per coordinate required")
            for m, r in zip(mats, rad):
                if math.isfinite(r) and np.linalg.norm(m, 2) > r + NORM_SLACK:
                    raise ValueError(f"operator norm exceeds declared radius {r}")
        object.__setattr__(self, "entries", mats)
        object.__setattr__(self, "dim", k)
        object.__setattr__(self, "radii", rad)

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, j: int) -> np.ndarray:
        return self.entries[j]

    def __iter__(self):
        return iter(self.entries)

    @property
    def r(self) -> int:
        return len(self.entries)

    def conj(self) -> "MatTuple":
        return MatTuple(tuple(m.conj() for m in self.entries))

    def transpose(self) -> "MatTuple":
        return MatTuple(tuple(m.T for m in self.entries))

    def is_hermitian(self, tol: float = 1e-10) -> bool:
        return all(
            np.linalg.norm(m - m.conj().T) <= tol * (1.0 + np.linalg.norm(m))
            for m in self.entries
        )


def sample_gue(k: int, seed: SeedSpec) -> np.ndarray:
    """One GUE matrix: Hermitian, entry variances 1/k as documented above."""
    if k < 1:
        raise ValueError("dimension must be >= 1")
    rng = seed.generator()
    g = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
    return (g + g.conj().T) / (2.0 * math.sqrt(k))


def sample_haar_unitary(k: int, seed: SeedSpec) -> np.ndarray:
    """One Haar-distributed unitary via QR with diagonal phase correction."""
    if k < 1:
        raise ValueError("dimension must be >= 1")
    rng = seed.generator()
    z = (rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))) / math.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


_SAMPLERS = {"gue": sample_gue, "haar": sample_haar_unitary}


def sample_tuple(kind: str, r: int, k: int, seed: SeedSpec) -> MatTuple:
    """r independent coordinates drawn from disjoint child streams."""
    if kind not in _SAMPLERS:
        raise ValueError(f"unknown ensemble kind {kind!r}")
    if r < 1:
        raise ValueError("tuple length must be >= 1")
    sampler = _SAMPLERS[kind]
    return MatTuple(tuple(sampler(k, seed.child(j)) for j in range(r)))


def sample_tuple_bounded(
    kind: str,
    r: int,
    k: int,
    seed: SeedSpec,
    radius: float = 2.5,
    max_attempts: int = 64,
):
    """Sample whole tuples until every coordinate norm is within ``radius``.

    Conditioning on the norm event is done by discarding entire tuples, so
    the accepted law is the product measure restricted to the norm box.
    Returns ``(MatTuple with radii set, rejection_count)``.
    """
    for attempt in range(max_attempts):
        tup = sample_tuple(kind, r, k, seed.child(attempt))
        if all(np.linalg.norm(m, 2) <= radius for m in tup):
            bounded = MatTuple(tup.entries, radii=(radius,) * r)
            return bounded, attempt
    raise RuntimeError(f"no admissible sample in {max_attempts} attempts")
