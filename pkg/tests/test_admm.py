import numpy as np
import pytest

from tenspca import (
    AdmmParams,
    DegenerateComponent,
    MaxIterExceeded,
    NotPositiveDefinite,
    RankWarning,
    ShapeMismatch,
    auto_rho,
    center,
    deflate,
    extract_component,
    fit,
    pca_fit,
    pca_transform,
    soft_threshold,
    transform,
    x_update,
    y_update,
    z_update,
)
from tenspca.admm import _run_iteration


def spectrum_matrix(rng, n, p, svals):
    """n x p matrix with prescribed singular values and zero column means.

    The left factor is orthonormalized against the all-ones vector, so the
    matrix equals its own centering and its spectrum survives center().
    """
    svals = np.asarray(svals, dtype=float)
    k = svals.size
    basis = np.column_stack([np.ones(n)] + [rng.standard_normal(n) for _ in range(k)])
    q, _ = np.linalg.qr(basis)
    u = q[:, 1 : k + 1]
    v, _ = np.linalg.qr(rng.standard_normal((p, k)))
    return u @ np.diag(svals) @ v.T


# ---------------------------------------------------------------- center


def test_center_constant_rows():
    v = np.array([2.0, -1.0, 7.0])
    d = np.tile(v, (4, 1))
    cd = center(d)
    assert np.array_equal(cd.mu, v)
    assert np.array_equal(cd.dtilde, np.zeros((4, 3)))


def test_center_small_example():
    cd = center(np.array([[1.0, 3.0], [3.0, 5.0]]))
    assert np.array_equal(cd.mu, np.array([2.0, 4.0]))
    assert np.array_equal(cd.dtilde, np.array([[-1.0, -1.0], [1.0, 1.0]]))


def test_center_columns_sum_to_zero():
    rng = np.random.default_rng(0)
    cd = center(rng.standard_normal((5, 3)))
    assert np.all(np.abs(cd.dtilde.sum(axis=0)) <= 1e-12)


# ---------------------------------------------------------------- auto_rho


def test_auto_rho_zero_matrix():
    assert auto_rho(np.zeros((3, 2))) == 1.0


def test_auto_rho_identity():
    assert auto_rho(np.eye(2)) == pytest.approx(2.2, rel=1e-12)


def test_auto_rho_diagonal():
    assert auto_rho(np.array([[3.0, 0.0], [0.0, 0.0]])) == pytest.approx(
        19.8, rel=1e-12
    )


def test_auto_rho_dominates_spectrum():
    rng = np.random.default_rng(1)
    for _ in range(10):
        d = rng.standard_normal((rng.integers(2, 12), rng.integers(2, 12)))
        smax = np.linalg.svd(d, compute_uv=False)[0]
        assert auto_rho(d) >= 2.2 * smax**2 - 1e-9
        assert auto_rho(d) >= 1.0


# ---------------------------------------------------------------- x_update


def test_x_update_zero_data():
    rng = np.random.default_rng(2)
    z = rng.standard_normal(4)
    y = rng.standard_normal(4)
    out = x_update(np.zeros((3, 4)), z, y, rho=2.0)
    assert np.allclose(out, z - y / 2.0, atol=1e-14)


def test_x_update_zero_rhs():
    rng = np.random.default_rng(3)
    d = rng.standard_normal((5, 3))
    z = rng.standard_normal(3)
    rho = auto_rho(d)
    out = x_update(d, z, rho * z, rho)
    assert np.allclose(out, 0.0, atol=1e-12)


@pytest.mark.parametrize("shape", [(6, 4), (4, 9)])  # tall (direct) and wide (reduced)
def test_x_update_against_dense_solve(shape):
    rng = np.random.default_rng(4)
    for _ in range(20):
        d = rng.standard_normal(shape)
        z = rng.standard_normal(shape[1])
        y = rng.standard_normal(shape[1])
        rho = auto_rho(d)
        x = x_update(d, z, y, rho)
        m = -2.0 * d.T @ d + rho * np.eye(shape[1])
        rhs = rho * z - y
        oracle = np.linalg.solve(m, rhs)
        assert np.linalg.norm(m @ x - rhs) <= 1e-8 * (1 + np.linalg.norm(rhs))
        assert np.linalg.norm(x - oracle) <= 1e-8 * (1 + np.linalg.norm(oracle))


def test_x_update_not_positive_definite():
    rng = np.random.default_rng(5)
    d = rng.standard_normal((6, 4))
    smax = np.linalg.svd(d, compute_uv=False)[0]
    with pytest.raises(NotPositiveDefinite):
        x_update(d, np.zeros(4), np.zeros(4), rho=0.5 * smax**2)


def test_x_update_shape_mismatch():
    with pytest.raises(ShapeMismatch):
        x_update(np.zeros((3, 4)), np.zeros(3), np.zeros(4), 1.0)


# ---------------------------------------------------------------- soft_threshold / z_update / y_update


def test_soft_threshold_scalars():
    assert soft_threshold(np.array([0.5]), 0.2)[0] == pytest.approx(0.3, abs=1e-15)
    assert soft_threshold(np.array([-0.5]), 0.2)[0] == pytest.approx(-0.3, abs=1e-15)
    assert soft_threshold(np.array([0.1]), 0.2)[0] == 0.0


def test_soft_threshold_negative_kappa():
    with pytest.raises(ValueError):
        soft_threshold(np.array([1.0]), -0.1)


def test_z_update_zero_lambda_is_exact():
    rng = np.random.default_rng(6)
    x = rng.standard_normal(5)
    y = rng.standard_normal(5)
    assert np.array_equal(z_update(x, y, rho=1.7, lam=0.0), x + y / 1.7)


def test_z_update_zero_input():
    assert np.array_equal(z_update(np.zeros(3), np.zeros(3), 2.0, 1.0), np.zeros(3))


def grid_minimize_scalar(x, y, rho, lam, lo=-2.0, hi=2.0, step=1e-3):
    """Brute-force argmin of lam*|z| - y*z + rho/2*(x - z)^2 on a grid."""
    grid = np.arange(lo, hi + step / 2, step)
    obj = lam * np.abs(grid) - y * grid + 0.5 * rho * (x - grid) ** 2
    return grid[int(np.argmin(obj))]


def test_z_update_against_grid_oracle():
    rng = np.random.default_rng(7)
    for _ in range(200):
        x = rng.uniform(-0.8, 0.8)
        y = rng.uniform(-0.8, 0.8)
        rho = rng.uniform(1.0, 3.0)
        lam = rng.uniform(0.0, 1.0)
        z = z_update(np.array([x]), np.array([y]), rho, lam)[0]
        assert abs(z) <= 2.0
        assert abs(z - grid_minimize_scalar(x, y, rho, lam)) <= 1e-3


def test_z_update_dead_zone_exact():
    rng = np.random.default_rng(8)
    x = rng.standard_normal(200)
    y = rng.standard_normal(200)
    rho, lam = 2.0, 1.0
    z = z_update(x, y, rho, lam)
    inside = np.abs(x + y / rho) <= lam / rho
    assert np.all(z[inside] == 0.0)
    assert np.all(z[~inside] != 0.0)
    # optimality cases: the sign of z matches the shifted point leaving the zone
    assert np.all((x + y / rho)[z > 0] > lam / rho)
    assert np.all((x + y / rho)[z < 0] < -lam / rho)


def test_y_update_fixed_point_and_example():
    y = np.array([3.0, -1.0])
    x = np.array([0.5, 0.5])
    assert np.array_equal(y_update(y, x, x, rho=2.5), y)
    out = y_update(np.zeros(2), np.array([1.0, -1.0]), np.zeros(2), rho=2.0)
    assert np.array_equal(out, np.array([2.0, -2.0]))


def test_y_update_componentwise():
    rng = np.random.default_rng(9)
    y, x, z = (rng.standard_normal(6) for _ in range(3))
    out = y_update(y, x, z, rho=1.3)
    for i in range(6):
        assert out[i] == y[i] + 1.3 * (x[i] - z[i])


# ---------------------------------------------------------------- extract_component


def test_extract_matches_top_eigenvector_lambda0():
    rng = np.random.default_rng(10)
    d = spectrum_matrix(rng, 20, 8, [3.0, 2.0, 1.0, 0.5])
    x = extract_component(d, AdmmParams(lam=0.0, seed=1))
    w, v = np.linalg.eigh(d.T @ d)
    assert abs(x @ v[:, -1]) >= 0.999


def test_extract_single_nonzero_column():
    rng = np.random.default_rng(11)
    d = np.zeros((12, 5))
    d[:, 2] = rng.standard_normal(12)
    d -= d.mean(axis=0)
    rho = auto_rho(d)
    x = extract_component(d, AdmmParams(lam=0.05 * rho, seed=0))
    e2 = np.zeros(5)
    e2[2] = 1.0
    assert min(np.linalg.norm(x - e2), np.linalg.norm(x + e2)) <= 1e-6
    w, v = np.linalg.eigh(d.T @ d)
    assert abs(x @ v[:, -1]) >= 0.999


def test_extract_huge_lambda_degenerates():
    rng = np.random.default_rng(12)
    d = rng.standard_normal((10, 6))
    rho = auto_rho(d)
    with pytest.raises(DegenerateComponent):
        extract_component(d, AdmmParams(lam=1e6 * rho, seed=0))


def test_extract_zero_matrix_degenerates():
    with pytest.raises(DegenerateComponent):
        extract_component(np.zeros((4, 3)), AdmmParams(seed=0))


def test_extract_max_iter_exceeded():
    rng = np.random.default_rng(13)
    d = rng.standard_normal((10, 6))
    with pytest.raises(MaxIterExceeded):
        extract_component(d, AdmmParams(lam=0.0, seed=0, max_iter=2))


def test_extract_deterministic():
    rng = np.random.default_rng(14)
    d = rng.standard_normal((15, 7))
    a = extract_component(d, AdmmParams(seed=5))
    b = extract_component(d, AdmmParams(seed=5))
    assert np.array_equal(a, b)


def test_extract_unit_norm_and_sign():
    rng = np.random.default_rng(15)
    for seed in range(5):
        d = rng.standard_normal((12, 6))
        x = extract_component(d, AdmmParams(seed=seed))
        assert np.linalg.norm(x) == pytest.approx(1.0, abs=1e-12)
        assert x[int(np.argmax(np.abs(x)))] > 0


def test_primal_feasibility_at_convergence():
    rng = np.random.default_rng(16)
    tol = 1e-10
    for seed in range(5):
        d = spectrum_matrix(rng, 15, 6, [3.0, 1.8, 0.9])
        x, z, _ = _run_iteration(d, AdmmParams(tol=tol, seed=seed))
        assert np.linalg.norm(x - z) <= 10 * tol * (1 + np.linalg.norm(x))


# ---------------------------------------------------------------- deflate


def test_deflate_basis_vector():
    rng = np.random.default_rng(17)
    d = rng.standard_normal((6, 4))
    e1 = np.zeros(4)
    e1[0] = 1.0
    out = deflate(d, e1)
    assert np.allclose(out[:, 0], 0.0, atol=1e-15)
    assert np.array_equal(out[:, 1:], d[:, 1:])


def test_deflate_rank_one_annihilation():
    rng = np.random.default_rng(18)
    x = rng.standard_normal(5)
    x /= np.linalg.norm(x)
    d = np.tile(x, (7, 1))
    out = deflate(d, x)
    assert np.linalg.norm(out) <= 1e-12 * np.linalg.norm(d)


def test_deflate_random_annihilation():
    rng = np.random.default_rng(19)
    d = rng.standard_normal((10, 6))
    x = rng.standard_normal(6)
    x /= np.linalg.norm(x)
    assert np.linalg.norm(deflate(d, x) @ x) <= 1e-10


def test_deflate_requires_unit_norm():
    with pytest.raises(ValueError):
        deflate(np.zeros((3, 3)), np.array([1.0, 1.0, 0.0]))


# ---------------------------------------------------------------- fit / transform


def test_fit_dim1_equals_extract():
    rng = np.random.default_rng(20)
    d = rng.standard_normal((12, 5))
    params = AdmmParams(seed=3)
    model = fit(d, 1, params)
    direct = extract_component(center(d).dtilde, params)
    assert np.array_equal(model.loadings[:, 0], direct)
    assert np.array_equal(model.mu, d.mean(axis=0))


def principal_angles(a, b):
    qa, _ = np.linalg.qr(a)
    qb, _ = np.linalg.qr(b)
    s = np.linalg.svd(qa.T @ qb, compute_uv=False)
    return np.arccos(np.clip(s, -1, 1))


def test_fit_lambda0_spans_top_eigenvectors():
    rng = np.random.default_rng(21)
    d = spectrum_matrix(rng, 30, 5, [4.0, 2.5, 1.5, 0.7, 0.3])
    model = fit(d, 3, AdmmParams(lam=0.0, seed=0))
    _, v = np.linalg.eigh(center(d).dtilde.T @ center(d).dtilde)
    top3 = v[:, ::-1][:, :3]
    assert np.max(principal_angles(model.loadings, top3)) <= 1e-2


def test_fit_beyond_rank_warns_and_completes():
    rng = np.random.default_rng(22)
    d = rng.standard_normal((8, 12))
    with pytest.warns(RankWarning):
        model = fit(d, 10, AdmmParams(seed=0))
    norms = np.linalg.norm(model.loadings, axis=0)
    assert np.allclose(norms, 1.0, atol=1e-9)
    # beyond-rank directions are orthogonal to the data's row space
    dtilde = center(d).dtilde
    for j in range(7, 10):
        assert np.linalg.norm(dtilde @ model.loadings[:, j]) <= 1e-6


def test_fit_deflation_annihilation_replay():
    rng = np.random.default_rng(23)
    d = rng.standard_normal((14, 6))
    model = fit(d, 4, AdmmParams(seed=1))
    current = center(d).dtilde.copy()
    for j in range(4):
        x = model.loadings[:, j]
        current = deflate(current, x)
        assert np.linalg.norm(current @ x) <= 1e-8 * max(np.linalg.norm(d), 1.0)


def test_fit_sparsity_monotone_in_lambda():
    rng = np.random.default_rng(24)
    d = rng.standard_normal((30, 10))
    lam0 = 0.01 * auto_rho(center(d).dtilde)
    x_small = fit(d, 1, AdmmParams(lam=lam0, seed=0)).loadings[:, 0]
    x_large = fit(d, 1, AdmmParams(lam=5 * lam0, seed=0)).loadings[:, 0]
    assert np.count_nonzero(x_large) <= np.count_nonzero(x_small)


def test_fit_deterministic():
    rng = np.random.default_rng(25)
    d = rng.standard_normal((20, 8))
    a = fit(d, 4, AdmmParams(seed=9))
    b = fit(d, 4, AdmmParams(seed=9))
    assert np.array_equal(a.loadings, b.loadings)
    assert np.array_equal(a.mu, b.mu)


def test_fit_annotates_component_errors():
    rng = np.random.default_rng(26)
    d = rng.standard_normal((10, 5))
    with pytest.raises(MaxIterExceeded, match="component 0"):
        fit(d, 2, AdmmParams(lam=0.0, seed=0, max_iter=2))


def test_fit_dim_bounds():
    with pytest.raises(ShapeMismatch):
        fit(np.zeros((4, 3)), 0)
    with pytest.raises(ShapeMismatch):
        fit(np.zeros((4, 3)), 4)


def test_transform_mean_row_is_zero():
    rng = np.random.default_rng(27)
    d = rng.standard_normal((9, 4))
    model = fit(d, 2, AdmmParams(seed=0))
    out = transform(model, model.mu[None, :])
    assert np.allclose(out, 0.0, atol=1e-12)


def test_transform_lambda0_matches_pca_projection():
    rng = np.random.default_rng(28)
    d = spectrum_matrix(rng, 25, 6, [5.0, 3.0, 1.6, 0.8]) + rng.standard_normal(6)
    spca = fit(d, 3, AdmmParams(lam=0.0, seed=0))
    pca = pca_fit(d, 3)
    ours = transform(spca, d)
    theirs = pca_transform(pca, d)
    for j in range(3):
        col = ours[:, j]
        ref = theirs[:, j]
        assert min(
            np.linalg.norm(col - ref), np.linalg.norm(col + ref)
        ) <= 1e-6 * (1 + np.linalg.norm(ref))


def test_transform_shapes():
    rng = np.random.default_rng(29)
    model = fit(rng.standard_normal((10, 6)), 2, AdmmParams(seed=0))
    assert transform(model, rng.standard_normal((7, 6))).shape == (7, 2)
    with pytest.raises(ShapeMismatch):
        transform(model, rng.standard_normal((7, 5)))


def test_params_validation():
    with pytest.raises(ValueError):
        AdmmParams(rho=0.0)
    with pytest.raises(ValueError):
        AdmmParams(lam=-1.0)
    with pytest.raises(ValueError):
        AdmmParams(tol=0.0)
    with pytest.raises(ValueError):
        AdmmParams(max_iter=0)
