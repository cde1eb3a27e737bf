import numpy as np
import pytest

from lpsubspace import (
    Dataset,
    NonDifferentiable,
    ParameterError,
    SingularPointError,
    Subspace,
    d_matrix,
    energy,
    frame_matrices,
    geodesic_derivative,
    geodesic_derivative_tp,
    geodesic_point,
    nuclear_norm,
    on_subspace_mask,
    outlying_correlation,
    principal_decomposition,
    random_subspace,
)
from conftest import example_data, line_at


def test_energy_trivial_cases(x_axis):
    on = Dataset(np.array([[1.0, 0.0], [-2.5, 0.0]]))
    for p in (0.5, 1.0, 2.0, 3.7):
        assert energy(on, x_axis, p) == 0.0
    single = Dataset(np.array([[0.0, 2.0]]))
    assert energy(single, x_axis, 1.0) == pytest.approx(2.0)
    assert energy(single, x_axis, 0.5) == pytest.approx(np.sqrt(2.0))
    with pytest.raises(ParameterError):
        energy(single, x_axis, 0.0)
    with pytest.raises(ParameterError):
        energy(single, x_axis, -1.0)


def test_energy_single_tilted_point(x_axis):
    t0, theta0 = 1.7, 0.6
    data = example_data([0.5, -1.0, 2.0], t0, theta0)
    assert energy(data, x_axis, 1.0) == pytest.approx(t0 * np.sin(theta0), abs=1e-12)


def test_energy_rotation_invariance():
    rng = np.random.default_rng(8)
    data = Dataset(rng.normal(size=(40, 4)))
    l = random_subspace(4, 2, 3)
    for seed in range(5):
        q, r = np.linalg.qr(np.random.default_rng(seed).normal(size=(4, 4)))
        q = q * np.sign(np.diag(r))
        rotated = Dataset(data.points @ q.T)
        l_rot = Subspace(q @ l.basis)
        for p in (0.5, 1.0, 2.0):
            assert energy(rotated, l_rot, p) == pytest.approx(
                energy(data, l, p), abs=1e-9
            )


def test_outlying_correlation_example_values(x_axis):
    a = [0.5, -1.2, 2.0, 0.3]
    t0, theta0 = 2.0, 0.7
    data = example_data(a, t0, theta0)
    B0 = outlying_correlation(data, x_axis).matrix
    assert B0.shape == (1, 1)
    assert B0[0, 0] == pytest.approx(t0 * np.cos(theta0), abs=1e-12)
    Bp = outlying_correlation(data, line_at(theta0)).matrix
    assert abs(Bp[0, 0]) == pytest.approx(
        np.cos(theta0) * np.sum(np.abs(a)), abs=1e-12
    )


def test_outlying_correlation_all_on_subspace(x_axis):
    data = Dataset(np.array([[1.0, 0.0], [2.0, 0.0]]))
    assert np.all(outlying_correlation(data, x_axis).matrix == 0.0)


def test_outlying_correlation_additivity():
    rng = np.random.default_rng(1)
    l = random_subspace(5, 2, 0)
    a = Dataset(rng.normal(size=(30, 5)))
    b = Dataset(rng.normal(size=(20, 5)))
    both = Dataset(np.vstack([a.points, b.points]))
    total = outlying_correlation(both, l).matrix
    parts = outlying_correlation(a, l).matrix + outlying_correlation(b, l).matrix
    assert np.allclose(total, parts, atol=1e-12)


def test_d_matrix_cases(x_axis):
    # p = 2: exponent vanishes
    x = np.array([1.0, 1.0])
    m = d_matrix(x, x_axis, 2.0)
    assert m == pytest.approx(np.array([[1.0]]))
    # hand evaluation at p = 1: P_L = 1, P_perp = 1, dist = 1
    assert d_matrix(x, x_axis, 1.0) == pytest.approx(np.array([[1.0]]))
    # orthogonal point: zero matrix
    assert np.all(d_matrix(np.array([0.0, 2.0]), x_axis, 1.0) == 0.0)
    # on-subspace point with p < 2 is singular
    with pytest.raises(SingularPointError):
        d_matrix(np.array([3.0, 0.0]), x_axis, 1.0)
    # but harmless for p >= 2
    assert np.all(d_matrix(np.array([3.0, 0.0]), x_axis, 2.0) == 0.0)


def test_d_matrix_rank_and_norm():
    rng = np.random.default_rng(2)
    l = random_subspace(6, 2, 4)
    for p in (0.5, 1.0, 1.5, 2.0, 3.0):
        x = rng.normal(size=6)
        m = d_matrix(x, l, p)
        assert m.shape == (2, 4)
        assert np.linalg.matrix_rank(m, tol=1e-10) <= 1
        tang = l.basis.T @ x
        dist = np.linalg.norm(l.complement_basis.T @ x)
        assert np.linalg.norm(m) == pytest.approx(
            np.linalg.norm(tang) * dist ** (p - 1.0), rel=1e-12
        )


def test_nuclear_norm_values():
    assert nuclear_norm(np.zeros((3, 4))) == 0.0
    assert nuclear_norm(np.diag([3.0, 4.0])) == pytest.approx(7.0)


def test_nuclear_norm_trace_maximization_oracle():
    # max over row-orthonormal U of tr(m U^T): random draws stay below, the
    # SVD-built U attains it exactly
    rng = np.random.default_rng(3)
    m = rng.normal(size=(3, 5))
    nuc = nuclear_norm(m)
    best_random = -np.inf
    for _ in range(10_000):
        q, _ = np.linalg.qr(rng.normal(size=(5, 3)))
        u = q.T  # 3 x 5, orthonormal rows
        best_random = max(best_random, np.trace(m @ u.T))
    assert best_random <= nuc + 1e-12
    w, _, zt = np.linalg.svd(m, full_matrices=False)
    u_opt = w @ zt
    assert np.trace(m @ u_opt.T) == pytest.approx(nuc, abs=1e-10)


def test_frame_matrices_shapes_and_orthogonality():
    a = random_subspace(6, 2, 0)
    b = random_subspace(6, 2, 1)
    dec = principal_decomposition(a, b)
    C, V, U = frame_matrices(dec)
    assert C.shape == (2, 2) and V.shape == (2, 2) and U.shape == (2, 4)
    assert np.allclose(V @ V.T, np.eye(2), atol=1e-12)
    assert np.allclose(U @ U.T, np.eye(2), atol=1e-10)  # k = 2 here
    assert np.allclose(np.diag(C), dec.angles)


def test_split_tolerance_is_relative(x_axis):
    data = Dataset(np.array([[1.0, 0.0], [1.0, 1e-12], [1.0, 1e-6]]))
    mask = on_subspace_mask(data, x_axis)
    assert mask.tolist() == [True, True, False]


def test_geodesic_derivative_all_on_subspace_p2():
    a = random_subspace(4, 2, 5)
    b = random_subspace(4, 2, 6)
    dec = principal_decomposition(a, b)
    coords = np.random.default_rng(0).normal(size=(10, 2))
    data = Dataset(coords @ a.basis.T)
    assert geodesic_derivative(data, dec, 2.0, 0.0) == 0.0


def test_geodesic_derivative_l1_closed_form(x_axis):
    a = [0.5, -1.2, 2.0, 0.3]
    t0, theta0 = 2.0, 0.7
    data = example_data(a, t0, theta0)
    dec = principal_decomposition(x_axis, line_at(theta0))
    expected = theta0 * (np.sum(np.abs(a)) - t0 * np.cos(theta0))
    assert geodesic_derivative(data, dec, 1.0, 0.0) == pytest.approx(
        expected, abs=1e-12
    )


def test_geodesic_derivative_matches_finite_differences():
    rng = np.random.default_rng(7)
    checked = 0
    for seed in range(4):
        D, d = [(3, 1), (4, 2), (5, 2), (6, 3)][seed]
        a = random_subspace(D, d, 2 * seed + 10)
        b = random_subspace(D, d, 2 * seed + 11)
        dec = principal_decomposition(a, b)
        data = Dataset(rng.normal(size=(25, D)))
        for p in (1.0, 1.5, 2.0, 3.0):
            for t in (0.0, 0.2, 0.6):
                an = geodesic_derivative(data, dec, p, t)
                h = 1e-5
                fd = (
                    energy(data, geodesic_point(dec, t + h), p)
                    - energy(data, geodesic_point(dec, t - h), p)
                ) / (2 * h)
                assert an == pytest.approx(fd, rel=1e-5)
                checked += 1
    assert checked == 48


def test_geodesic_derivative_inliers_one_sided():
    a = random_subspace(4, 2, 20)
    b = random_subspace(4, 2, 21)
    dec = principal_decomposition(a, b)
    rng = np.random.default_rng(5)
    on = rng.normal(size=(8, 2)) @ a.basis.T
    data = Dataset(np.vstack([on, rng.normal(size=(12, 4))]))
    an = geodesic_derivative(data, dec, 1.0, 0.0)
    h = 1e-6
    f = [energy(data, geodesic_point(dec, k * h), 1.0) for k in range(3)]
    fd = (-3 * f[0] + 4 * f[1] - f[2]) / (2 * h)
    assert an == pytest.approx(fd, rel=1e-6)


def test_geodesic_derivative_p_less_1_with_inliers_raises(x_axis):
    data = example_data([1.0, 2.0], 1.0, 0.5)
    dec = principal_decomposition(x_axis, line_at(0.5))
    with pytest.raises(NonDifferentiable):
        geodesic_derivative(data, dec, 0.5, 0.0)
    # fine at t > 0
    geodesic_derivative(data, dec, 0.5, 0.1)


def test_geodesic_derivative_tp_values(x_axis):
    dec = principal_decomposition(x_axis, line_at(0.5))
    # no inliers: zero
    off = Dataset(np.array([[0.3, 1.0], [-1.0, 0.4]]))
    assert geodesic_derivative_tp(off, dec, 0.5) == 0.0
    # single inlier with known speed
    data = Dataset(np.array([[1.0, 0.0]]))
    speed = 0.5 * 1.0  # theta * |coordinate|
    assert geodesic_derivative_tp(data, dec, 0.5) == pytest.approx(np.sqrt(speed))
    with pytest.raises(ParameterError):
        geodesic_derivative_tp(data, dec, 1.5)


def test_geodesic_derivative_tp_p1_matches_derivative(x_axis):
    a = [0.5, -1.2, 2.0, 0.3]
    t0, theta0 = 2.0, 0.7
    data = example_data(a, t0, theta0)
    dec = principal_decomposition(x_axis, line_at(theta0))
    assert geodesic_derivative_tp(data, dec, 1.0) == geodesic_derivative(
        data, dec, 1.0, 0.0
    )
    # closed form: theta * (sum |a_i| - t0 cos theta0)
    expected = theta0 * (np.sum(np.abs(a)) - t0 * np.cos(theta0))
    assert geodesic_derivative_tp(data, dec, 1.0) == pytest.approx(expected, abs=1e-12)


def test_geodesic_derivative_tp_nonnegative_for_p_below_1():
    rng = np.random.default_rng(9)
    for seed in range(10):
        a = random_subspace(4, 2, 30 + seed)
        b = random_subspace(4, 2, 60 + seed)
        dec = principal_decomposition(a, b)
        on = rng.normal(size=(6, 2)) @ a.basis.T
        data = Dataset(np.vstack([on, rng.normal(size=(10, 4))]))
        for p in (0.3, 0.5, 0.9):
            assert geodesic_derivative_tp(data, dec, p) >= 0.0


def test_dataset_csv_roundtrip(tmp_path):
    rng = np.random.default_rng(4)
    data = Dataset(rng.normal(size=(20, 3)), labels=rng.integers(0, 3, size=20))
    path = tmp_path / "data.csv"
    data.to_csv(path)
    with open(path) as fh:
        assert fh.readline().strip() == "x0,x1,x2,label"
    back = Dataset.from_csv(path)
    assert np.array_equal(back.points, data.points)
    assert np.array_equal(back.labels, data.labels)
    unlabeled = Dataset(rng.normal(size=(5, 2)))
    unlabeled.to_csv(path)
    with open(path) as fh:
        assert fh.readline().strip() == "x0,x1"
    back = Dataset.from_csv(path)
    assert back.labels is None
    assert np.array_equal(back.points, unlabeled.points)


def test_dataset_norm_bound(x_axis):
    data = Dataset(np.array([[0.5, 0.0], [0.0, 2.0]]))
    data.check_norm_bound(2.0)
    with pytest.raises(Exception):
        data.check_norm_bound(1.0)
