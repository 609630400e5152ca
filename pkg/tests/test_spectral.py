import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from strongconv.ensembles import SeedSpec, sample_gue, sample_haar_unitary
from strongconv.spectral import (
    HermOpHandle,
    SpectrumSet,
    hausdorff,
    herm_eig,
    lanczos_extremes,
    op_norm,
    spectrum_set,
)

SEED = SeedSpec(0x5BEC)


def test_herm_eig_examples():
    w, _ = herm_eig(np.diag([3.0, 1.0, 2.0]))
    assert np.allclose(w, [1.0, 2.0, 3.0])
    w, _ = herm_eig(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert np.allclose(w, [-1.0, 1.0])


def test_herm_eig_reconstructs():
    rng = np.random.default_rng(1)
    g = rng.standard_normal((16, 16)) + 1j * rng.standard_normal((16, 16))
    h = (g + g.conj().T) / 2
    w, v = herm_eig(h)
    assert np.linalg.norm(v @ np.diag(w) @ v.conj().T - h) <= 1e-8
    res = h @ v - v * w
    assert np.linalg.norm(res, 2) <= 1e-9 * (1 + np.linalg.norm(h, 2))


def test_herm_eig_rejects_non_hermitian():
    with pytest.raises(ValueError):
        herm_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_herm_eig_dimension_cap():
    with pytest.raises(ValueError):
        herm_eig(np.eye(2049))


def test_lanczos_matches_dense_at_moderate_dim():
    h = sample_gue(256, SEED.child(20))
    w = np.linalg.eigvalsh(h)
    res = lanczos_extremes(HermOpHandle.from_dense(h), tol=1e-10,
                           seed=SEED.child(21))
    assert res.converged
    assert abs(res.lambda_min - w[0]) <= 1e-7
    assert abs(res.lambda_max - w[-1]) <= 1e-7


def test_op_norm_examples():
    assert op_norm(np.eye(5)) == pytest.approx(1.0)
    assert op_norm(np.diag([-3.0, 2.0])) == pytest.approx(3.0)
    assert op_norm(np.array([[0.0, 2.0], [0.0, 0.0]])) == pytest.approx(2.0)


def test_op_norm_unitary_invariance():
    rng_k = 16
    a = sample_gue(rng_k, SEED.child(0))
    u = sample_haar_unitary(rng_k, SEED.child(1))
    v = sample_haar_unitary(rng_k, SEED.child(2))
    assert abs(op_norm(u @ a @ v) - op_norm(a)) <= 1e-9


def test_handle_spot_checks_hermiticity():
    h = np.array([[0.0, 1.0], [0.0, 0.0]])
    with pytest.raises(ValueError):
        HermOpHandle(2, lambda v: h @ v)
    ok = HermOpHandle(2, lambda v: (h + h.T) @ v)
    assert ok.dim == 2


def test_lanczos_on_spiked_diagonal():
    d = np.zeros(40)
    d[-1] = 5.0
    handle = HermOpHandle.from_dense(np.diag(d))
    res = lanczos_extremes(handle, tol=1e-10, seed=SEED.child(3))
    assert res.converged
    assert res.lambda_max == pytest.approx(5.0, abs=1e-8)


def test_lanczos_matches_dense_extremes():
    h = sample_gue(32, SEED.child(4))
    w = np.linalg.eigvalsh(h)
    res = lanczos_extremes(HermOpHandle.from_dense(h), tol=1e-10, seed=SEED.child(5))
    assert res.converged
    assert res.lambda_min == pytest.approx(w[0], abs=1e-8)
    assert res.lambda_max == pytest.approx(w[-1], abs=1e-8)


def test_lanczos_deflation_removes_known_eigenvector():
    # spectrum {0, 1, 2, ...}: deflating the ground vector exposes the next one
    d = np.arange(12, dtype=float)
    vecs = np.eye(12)
    handle = HermOpHandle.from_dense(np.diag(d), deflate=vecs[:, [0]])
    res = lanczos_extremes(handle, tol=1e-10, seed=SEED.child(6))
    assert res.converged
    assert res.lambda_min == pytest.approx(1.0, abs=1e-8)


def test_lanczos_reports_nonconvergence_via_flag():
    h = sample_gue(64, SEED.child(7))
    res = lanczos_extremes(HermOpHandle.from_dense(h), tol=1e-12, max_iter=3,
                           seed=SEED.child(8))
    assert not res.converged


def test_spectrum_set_dedup():
    assert spectrum_set(np.diag([1.0, 1.0, 2.0])).points == (1.0, 2.0)
    assert spectrum_set(np.zeros((3, 3))).points == (0.0,)


def test_spectrum_set_gue_is_simple():
    x = sample_gue(64, SEED.child(9))
    assert len(spectrum_set(x)) == 64


def test_hausdorff_examples():
    assert hausdorff([0.0], [0.0, 1.0]) == pytest.approx(1.0)
    assert hausdorff([-2.0, 0.0, 2.0], [(-2.0, 2.0)]) == pytest.approx(1.0)
    e = SpectrumSet((0.0, 0.5, 1.5), 3)
    assert hausdorff(e, e) == 0.0


def test_hausdorff_interval_side_candidates():
    # farthest interval point from {0} within [0, 4] is the endpoint 4
    assert hausdorff([0.0], [(0.0, 4.0)]) == pytest.approx(4.0)
    # two intervals
    assert hausdorff([0.0, 10.0], [(-1.0, 1.0), (9.0, 11.0)]) == pytest.approx(1.0)


def test_hausdorff_rejects_empty():
    with pytest.raises(ValueError):
        hausdorff([], [0.0])


points_sets = st.lists(
    st.floats(min_value=-10, max_value=10, allow_nan=False), min_size=1, max_size=6
).map(lambda xs: sorted(xs))


@settings(max_examples=150, deadline=None)
@given(points_sets, points_sets, points_sets)
def test_hausdorff_is_a_metric_on_finite_sets(a, b, c):
    dab = hausdorff(a, b)
    dba = hausdorff(b, a)
    assert dab == pytest.approx(dba, abs=1e-12)
    assert hausdorff(a, a) == 0.0
    dac = hausdorff(a, c)
    dcb = hausdorff(c, b)
    assert dab <= dac + dcb + 1e-12
    if dab == 0.0:
        assert set(np.round(a, 12)) == set(np.round(b, 12))
