import json
import math

import pytest

import scalemix


def test_density_examples():
    g = scalemix.MixingDistribution.point_mass(1.0)
    assert scalemix.log_mixture_density(0.0, 0.0, g) == pytest.approx(-0.9189385332046727, rel=1e-14)
    half = scalemix.MixingDistribution([1.0, 2.0], [0.5, 0.5])
    phi0 = 1.0 / math.sqrt(2.0 * math.pi)
    assert scalemix.log_mixture_density(0.0, 0.0, half) == pytest.approx(math.log(0.75 * phi0), rel=1e-14)
    assert scalemix.total_log_likelihood([1.0, -1.0], 0.0, g) == pytest.approx(2 * (-0.5 - 0.9189385332046727))


def test_bad_weights_raise():
    with pytest.raises(scalemix.Error):
        scalemix.MixingDistribution([1.0], [0.5])


def test_fit_joint_three_points():
    rep = scalemix.fit_joint([1.0, 2.0, 3.0])
    assert abs(rep["mu_hat"] - 2.0) < 1e-3
    assert sum(rep["weights"]) == pytest.approx(1.0)


def test_fit_npmle_single_scale():
    rep = scalemix.fit_npmle([-1.0, 1.0])
    assert rep["atoms"] == pytest.approx([1.0])


def test_baselines():
    assert scalemix.sample_median([4.0, 2.0, 3.0, 1.0]) == 2.0
    assert scalemix.oracle_linear([0.0, 10.0], [1.0, 2.0]) == pytest.approx(2.0)
    data = [0.0, 0.0, 100.0]
    assert scalemix.iterative_truncation(data, mu0=0.0, B=1.0, shrink=0.5, iterations=3) == pytest.approx(7 / 36)


def test_simulate_is_deterministic():
    cfg = json.dumps(
        {
            "prior": {"kind": "equal_variance", "sigma": 1.0},
            "n_grid": [20, 40],
            "replications": 3,
            "estimators": ["median", "oracle_linear"],
        }
    )
    a = scalemix.simulate(cfg)
    assert a == scalemix.simulate(cfg)
    lines = a.strip().split("\n")
    assert lines[0] == "estimator,n,replications,mean_abs_error,std_abs_error,failures"
    assert len(lines) == 5
    with pytest.raises(scalemix.Error):
        scalemix.simulate(json.dumps({"replications": 0}))


def test_hellinger_and_modulus():
    g = scalemix.MixingDistribution.point_mass(1.0)
    assert scalemix.hellinger_sq(2.0, g, 0.0, g) == pytest.approx(2 - 2 * math.exp(-0.5), abs=1e-7)
    assert scalemix.modulus_of_continuity(g, 0.5) == pytest.approx(math.sqrt(8 * math.log(4 / 3)), rel=2e-4)


def test_chebyshev():
    c = scalemix.chebyshev_coefficients(0.0, 3.0, 4)
    assert c[0] == pytest.approx(1.0, abs=1e-12)
    assert scalemix.bernstein_bound(0.0, 10) == 0.001953125
    r = scalemix.minimal_degree(1.0, 1.0, 1e-6)
    assert r["L_found"] <= r["L_pred"]
    e = scalemix.separable_expansion((0.5, 2.0), (0.5, 2.0), 30)
    assert e["measured_sup_error"] <= 1e-6
