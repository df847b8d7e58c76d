"""Smoke tests for the python bindings: one happy path per exposed operation."""

import numpy as np
import pytest

import stcov

LMATERN = np.array([1.0, 0.6, 0.4, 0.3, 0.0, 0.1, 0.1, 0.0, 0.05])


def random_points(n, seed):
    rng = np.random.default_rng(seed)
    return rng.uniform(0.0, 2.0, (n, 2)), rng.uniform(0.0, 3.0, n)


def test_family_and_param_names():
    assert stcov.family_names() == [
        "lgauss", "lmatern", "lch", "lgh", "gl_matern", "gl_ch",
    ]
    names = stcov.param_names("lmatern")
    assert names[:3] == ["sigma2", "nu", "phi"]
    assert names[-1] == "tau2"
    with pytest.raises(ValueError):
        stcov.param_names("nope")


def test_eval_cov_origin_and_symmetry():
    h = np.array([[0.0, 0.0], [0.4, -0.2], [-0.4, 0.2]])
    u = np.array([0.0, 0.7, 0.7])
    v = stcov.eval_cov("lmatern", LMATERN, h, u)
    # nugget applies at the exact-zero lag only
    assert v[0] == pytest.approx(1.0 * 1.05)
    # lambda0 > 0 makes opposite spatial lags differ
    assert abs(v[1] - v[2]) > 1e-6


def test_cov_matrix_matches_eval():
    coords, times = random_points(6, 11)
    K = stcov.cov_matrix("lmatern", LMATERN, coords, times)
    assert K.shape == (6, 6)
    h = (coords[2] - coords[5])[None, :]
    u = np.array([times[2] - times[5]])
    assert K[2, 5] == pytest.approx(stcov.eval_cov("lmatern", LMATERN, h, u)[0], rel=1e-12)
    assert np.all(np.diag(K) == pytest.approx(1.05))


def test_simulate_deterministic():
    coords, times = random_points(30, 12)
    a = stcov.simulate("lmatern", LMATERN, coords, times, seed=5)
    b = stcov.simulate("lmatern", LMATERN, coords, times, seed=5)
    c = stcov.simulate("lmatern", LMATERN, coords, times, seed=6)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert np.all(np.isfinite(a))


def test_loglik_exact_vs_vecchia():
    coords, times = random_points(25, 13)
    z = stcov.simulate("lmatern", LMATERN, coords, times, seed=7)
    exact = stcov.loglik("lmatern", LMATERN, coords, times, z)
    full = stcov.loglik("lmatern", LMATERN, coords, times, z, vecchia_m=24)
    assert exact["loglik"] == pytest.approx(full["loglik"], rel=1e-10)
    zero = stcov.loglik("lmatern", LMATERN, coords, times, z, mean="zero")
    assert zero["mean_hat"] == 0.0
    assert exact["loglik"] >= zero["loglik"]


def test_default_init_and_fit():
    coords, times = random_points(36, 14)
    z = stcov.simulate("lmatern", LMATERN, coords, times, seed=8)
    init = stcov.default_init("lmatern", coords, times, z)
    assert init.shape == (9,)
    assert init[0] == pytest.approx(np.var(z, ddof=1))

    free = [True, False, True, False, False, False, False, False, False]
    res = stcov.fit("lmatern", coords, times, z, init=LMATERN.copy(), free=free,
                    starts=1, max_evals=200)
    assert res["family"] == "lmatern"
    assert res["k_params"] == 2
    assert res["n_evals"] <= 200
    assert np.isfinite(res["loglik"]) and np.isfinite(res["aic"])
    # fixed entries must be untouched
    assert res["params"][1] == pytest.approx(0.6)
    # the fit cannot be worse than its own starting point
    start = stcov.loglik("lmatern", LMATERN, coords, times, z)
    assert res["loglik"] >= start["loglik"] - 1e-9


def test_fit_rejects_bad_init():
    coords, times = random_points(12, 15)
    z = stcov.simulate("lmatern", LMATERN, coords, times, seed=9)
    bad = LMATERN.copy()
    bad[0] = -1.0
    with pytest.raises(stcov.InitError):
        stcov.fit("lmatern", coords, times, z, init=bad, starts=1)


def test_asymmetry_antisymmetric():
    rng = np.random.default_rng(16)
    ns, nt = 4, 40
    stations = rng.uniform(0.0, 1.0, (ns, 2))
    z = rng.normal(size=(ns, nt))
    observed = rng.uniform(size=(ns, nt)) > 0.1
    observed[:, 0] = True
    out = stcov.asymmetry(stations, list(range(nt)), z, observed, lags=[1, 2])
    assert out["lags"] == [1, 2]
    assert out["delta_bar"].shape == (ns, 2)
    for D in out["delta"]:
        assert np.array_equal(D, -D.T)
        assert np.all(np.diag(D) == 0.0)
    # the station average matches the delta matrix column mean
    assert out["delta_bar"][1, 0] == pytest.approx(out["delta"][0][:, 1].mean())


def test_insufficient_data_error():
    stations = np.array([[0.0, 0.0], [1.0, 0.0]])
    z = np.zeros((2, 3))
    observed = np.array([[True, True, False], [False, False, True]])
    with pytest.raises(stcov.InsufficientDataError):
        stcov.asymmetry(stations, [0, 1, 2], z, observed, lags=[0])
