import math

import numpy as np
import pytest

from strongconv.ensembles import (
    MatTuple,
    SeedSpec,
    sample_gue,
    sample_haar_unitary,
    sample_tuple,
    sample_tuple_bounded,
)
from strongconv.laws import empirical_law

SEED = SeedSpec(0xC0FFEE)


def test_seedspec_validation_and_serialization():
    s = SeedSpec(12, (3, 4))
    assert s.child(5).stream_path == (3, 4, 5)
    assert SeedSpec.deserialize(s.serialize()) == s
    assert SeedSpec.deserialize(SeedSpec(9).serialize()) == SeedSpec(9)
    with pytest.raises(ValueError):
        SeedSpec(-1)
    with pytest.raises(ValueError):
        SeedSpec(1, (-2,))


def test_gue_rejects_zero_dim():
    with pytest.raises(ValueError):
        sample_gue(0, SEED)


def test_gue_is_hermitian_and_deterministic():
    x = sample_gue(16, SEED.child(0))
    assert np.array_equal(x, x.conj().T) or np.linalg.norm(x - x.conj().T) == 0.0
    y = sample_gue(16, SEED.child(0))
    assert np.array_equal(x, y)
    z = sample_gue(16, SEED.child(1))
    assert not np.array_equal(x, z)


def test_gue_trace_square_matches_entry_variances():
    # E tr(X^2) = (1/k) sum E|X_ij|^2 = 1 for every k
    k, reps = 8, 10_000
    vals = np.empty(reps)
    for i in range(reps):
        x = sample_gue(k, SEED.child(2, i))
        vals[i] = np.real(np.trace(x @ x)) / k
    se = vals.std(ddof=1) / math.sqrt(reps)
    assert abs(vals.mean() - 1.0) <= 4.0 * se


def test_haar_is_unitary_to_tolerance():
    for k in (1, 2, 7, 32):
        u = sample_haar_unitary(k, SEED.child(3, k))
        assert np.linalg.norm(u.conj().T @ u - np.eye(k), 2) <= 1e-12


def test_haar_first_moment_vanishes():
    k, reps = 4, 10_000
    acc = np.empty(reps, dtype=complex)
    for i in range(reps):
        u = sample_haar_unitary(k, SEED.child(4, i))
        acc[i] = np.trace(u) / k
    se = acc.std(ddof=1) / math.sqrt(reps)
    assert abs(acc.mean()) <= 4.0 * se


def test_haar_second_moment_is_one():
    # E |Tr U|^2 = 1 for Haar measure on any U(k)
    k, reps = 4, 10_000
    vals = np.empty(reps)
    for i in range(reps):
        u = sample_haar_unitary(k, SEED.child(5, i))
        vals[i] = abs(np.trace(u)) ** 2
    se = vals.std(ddof=1) / math.sqrt(reps)
    assert abs(vals.mean() - 1.0) <= 4.0 * se


def test_tuple_coordinates_are_distinct_and_unitary():
    t = sample_tuple("haar", 2, 8, SEED.child(6))
    assert not np.array_equal(t[0], t[1])
    for u in t:
        assert np.linalg.norm(u.conj().T @ u - np.eye(8), 2) <= 1e-12
    with pytest.raises(ValueError):
        sample_tuple("wishart", 1, 4, SEED)
    with pytest.raises(ValueError):
        sample_tuple("gue", 0, 4, SEED)


def test_tuple_cross_moment_vanishes():
    k, reps = 8, 10_000
    vals = np.empty(reps)
    for i in range(reps):
        t = sample_tuple("gue", 2, k, SEED.child(7, i))
        vals[i] = np.real(np.trace(t[0] @ t[1])) / k
    se = vals.std(ddof=1) / math.sqrt(reps)
    assert abs(vals.mean()) <= 4.0 * se


def _mc_law(kind, transform, k, reps, degree, path):
    laws = []
    for i in range(reps):
        t = sample_tuple(kind, 1, k, SEED.child(path, i))
        t = MatTuple((transform(t[0]),))
        laws.append(empirical_law(t, degree))
    words = list(laws[0].moments)
    mean = {w: np.mean([l.moments[w] for l in laws]) for w in words}
    return mean


def test_gue_unitary_conjugation_invariance_of_moments():
    k, reps = 16, 300
    v = sample_haar_unitary(k, SEED.child(8))
    base = _mc_law("gue", lambda x: x, k, reps, 4, 9)
    conj = _mc_law("gue", lambda x: v @ x @ v.conj().T, k, reps, 4, 9)
    gaps = [abs(base[w] - conj[w]) for w in base]
    # same samples conjugated: traces agree up to rounding
    assert max(gaps) <= 1e-12


def test_gue_transpose_invariance_of_moments():
    k, reps = 16, 400
    base = _mc_law("gue", lambda x: x, k, reps, 4, 10)
    trans = _mc_law("gue", lambda x: x.T, k, reps, 4, 11)
    gaps = [abs(base[w] - trans[w]) for w in base]
    # independent Monte-Carlo runs of the same law
    assert max(gaps) <= 0.15


def test_mat_tuple_radius_enforcement():
    big = np.diag([3.0, 0.0])
    with pytest.raises(ValueError):
        MatTuple((big,), radii=(2.0,))
    ok = MatTuple((big,), radii=(3.0,))
    assert ok.radii == (3.0,)
    unbounded = MatTuple((big,))
    assert math.isinf(unbounded.radii[0])


def test_bounded_sampling_reports_rejections():
    tup, rejections = sample_tuple_bounded("gue", 2, 32, SEED.child(12), radius=2.5)
    assert rejections >= 0
    assert all(np.linalg.norm(m, 2) <= 2.5 for m in tup)
    assert tup.radii == (2.5, 2.5)
    # a radius that cannot be met reports failure
    with pytest.raises(RuntimeError):
        sample_tuple_bounded("gue", 1, 64, SEED.child(13), radius=0.05,
                             max_attempts=3)
