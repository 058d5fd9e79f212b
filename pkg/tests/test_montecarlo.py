"""Monte Carlo engine tests.

Statistical agreement with the closed-form engine is checked here only in
regimes where the outage probability is moderate (so binomial standard
errors are trustworthy at 2e4 realizations).  The heavy cross-validation
runs at the published operating points live in test_acceptance.py.
"""

import math

import numpy as np
import pytest

from pinchnet import analysis as an
from pinchnet import montecarlo as mc
from pinchnet.channel import link_budget, sinr_threshold
from pinchnet.errors import InvalidParameterError
from pinchnet.geometry import default_params

CFG = an.AnalysisConfig()


def _report_tuple(report):
    return (report.estimate, report.std_error, report.n)


# ---------------------------------------------------------------- config

def test_simconfig_defaults():
    sim = mc.SimConfig()
    assert sim.n_realizations == 100_000
    assert sim.R_sim == 5000.0
    assert sim.seed == 12345
    assert sim.pinned_d0 is None
    assert sim.workers == 1


@pytest.mark.parametrize("kwargs", [
    {"n_realizations": 0},
    {"n_realizations": True},
    {"R_sim": 0.0},
    {"R_sim": -5.0},
    {"seed": -1},
    {"seed": 2.5},
    {"batch_size": 0},
    {"pinned_d0": 0.0},
    {"pinned_d0": -3.0},
    {"workers": 0},
])
def test_simconfig_validation(kwargs):
    with pytest.raises(InvalidParameterError):
        mc.SimConfig(**kwargs)


def test_region_must_cover_cluster():
    # truncation radius has to dominate the cluster scale
    params = default_params(R=3000.0, L=100.0)
    with pytest.raises(InvalidParameterError):
        mc.estimate_outage(params, mc.SimConfig(n_realizations=10))


def test_pinned_distance_below_height_rejected():
    sim = mc.SimConfig(n_realizations=10, pinned_d0=1.0)
    with pytest.raises(InvalidParameterError):
        mc.estimate_outage(default_params(H=3.0), sim)


# ---------------------------------------------------------- determinism

def test_estimates_reproducible():
    params = default_params()
    sim = mc.SimConfig(n_realizations=2000, seed=77)
    first = mc.estimate_outage(params, sim)
    second = mc.estimate_outage(params, sim)
    assert _report_tuple(first) == _report_tuple(second)


def test_batch_size_invariance():
    params = default_params()
    ref = mc.estimate_ergodic_rate(
        params, mc.SimConfig(n_realizations=2000, seed=5, batch_size=2000))
    for batch in (137, 500, 1999):
        got = mc.estimate_ergodic_rate(
            params, mc.SimConfig(n_realizations=2000, seed=5, batch_size=batch))
        assert _report_tuple(got) == _report_tuple(ref)


def test_worker_count_invariance():
    params = default_params()
    ref = mc._simulate_values(
        params, mc.SimConfig(n_realizations=2000, seed=9, batch_size=250),
        mode="outage")
    par = mc._simulate_values(
        params,
        mc.SimConfig(n_realizations=2000, seed=9, batch_size=250, workers=3),
        mode="outage")
    assert np.array_equal(ref, par)


def test_worker_count_invariance_reports():
    params = default_params()
    a = mc.estimate_outage(
        params, mc.SimConfig(n_realizations=2000, seed=41, batch_size=300))
    b = mc.estimate_outage(
        params,
        mc.SimConfig(n_realizations=2000, seed=41, batch_size=300, workers=4))
    assert _report_tuple(a) == _report_tuple(b)


def test_report_metadata():
    sim = mc.SimConfig(n_realizations=500, seed=3)
    report = mc.estimate_outage(default_params(), sim)
    assert report.n == 500
    assert report.seed == 3
    assert report.wall_time > 0.0


# ------------------------------------------------------------- trivials

def test_zero_threshold_never_outage():
    params = default_params(Rbar=0.0)
    report = mc.estimate_outage(params, mc.SimConfig(n_realizations=500, seed=2))
    assert report.estimate == 0.0
    assert report.std_error == 0.0


def test_outage_flag_matches_sinr():
    params = default_params()
    rng = np.random.default_rng(8)
    threshold = sinr_threshold(params.Rbar)
    sim = mc.SimConfig(n_realizations=10)
    for _ in range(50):
        sinr, outage, rate = mc.run_realization(params, sim, rng)
        assert outage == int(sinr < threshold)
        assert rate == pytest.approx(math.log2(1.0 + sinr))


def test_no_clusters_means_no_interference():
    params = default_params(lam=0.0)
    sim = mc.SimConfig(n_realizations=10)
    geom, unif, gamma = (np.random.default_rng(4) for _ in range(3))
    for _ in range(20):
        signal, interference = mc._run_one(params, sim, geom, unif, gamma)
        assert interference == 0.0
        assert signal > 0.0


def test_pinned_fading_gives_deterministic_sinr():
    # no interferers, unit gain, forced distance: sinr is pure path loss
    params = default_params(lam=0.0, beta=0.0)
    xi = link_budget(params).xi
    d0 = 5.0
    sim = mc.SimConfig(n_realizations=64, seed=6, pinned_d0=d0)
    hooks = mc._Hooks(pin_fading=True)
    expected = d0 ** (-params.alpha_L) / xi
    report = mc.estimate_ergodic_rate(params, sim, _hooks=hooks)
    assert report.estimate == pytest.approx(math.log2(1.0 + expected), rel=1e-12)
    # identical samples, but the running mean can sit one ulp off the value
    assert report.std_error < 1e-13


def test_laplace_at_zero_is_one():
    report = mc.estimate_laplace(
        0.0, default_params(), mc.SimConfig(n_realizations=200, seed=1))
    assert report.estimate == 1.0
    assert report.std_error == 0.0


def test_laplace_without_clusters_is_one():
    report = mc.estimate_laplace(
        3.0, default_params(lam=0.0), mc.SimConfig(n_realizations=200, seed=1))
    assert report.estimate == 1.0


def test_laplace_rejects_negative_argument():
    with pytest.raises(InvalidParameterError):
        mc.estimate_laplace(-1.0, default_params(), mc.SimConfig(n_realizations=10))


# ------------------------------------------------- statistical behaviour

def test_standard_error_scales_with_sample_size():
    params = default_params()
    small = mc.estimate_ergodic_rate(params, mc.SimConfig(n_realizations=1000, seed=13))
    large = mc.estimate_ergodic_rate(params, mc.SimConfig(n_realizations=4000, seed=13))
    ratio = small.std_error / large.std_error
    assert 1.8 <= ratio <= 2.2


def test_truncation_radius_insensitive():
    # common seed nests the point process, so the shift is pure truncation
    params = default_params()
    near = mc.estimate_outage(
        params, mc.SimConfig(n_realizations=5000, seed=31, R_sim=2500.0))
    far = mc.estimate_outage(
        params, mc.SimConfig(n_realizations=5000, seed=31, R_sim=5000.0))
    assert abs(near.estimate - far.estimate) <= max(near.std_error, 1e-12)


def test_matches_analysis_without_interference():
    # lam = 0 with a large blockage exponent exercises the NLoS branch alone
    params = default_params(lam=0.0, beta=1e3, Np=1, Rbar=4.0)
    analytic = an.outage_probability(an.OutageInputs.from_system(params), CFG)
    report = mc.estimate_outage(params, mc.SimConfig(n_realizations=20_000, seed=17))
    assert abs(report.estimate - analytic) <= 3.0 * report.std_error


def test_pinned_distance_matches_conditional_outage():
    params = default_params(Rbar=3.0)
    d0 = 15.0
    analytic = an.conditional_outage(d0, an.OutageInputs.from_system(params), CFG)
    report = mc.estimate_outage(
        params, mc.SimConfig(n_realizations=20_000, seed=23, pinned_d0=d0))
    assert abs(report.estimate - analytic) <= 3.0 * report.std_error


def test_more_presets_raise_rate():
    params = default_params()
    single = mc.estimate_ergodic_rate(
        params.with_(Np=1), mc.SimConfig(n_realizations=4000, seed=21))
    many = mc.estimate_ergodic_rate(
        params.with_(Np=11), mc.SimConfig(n_realizations=4000, seed=21))
    combined = math.hypot(single.std_error, many.std_error)
    assert many.estimate - single.estimate > 3.0 * combined


def test_dense_deployment_collapses_rate():
    # 1e-2 clusters per m^2 drowns the link in interference
    params = default_params(lam=1e-2)
    report = mc.estimate_ergodic_rate(
        params, mc.SimConfig(n_realizations=2000, seed=4, R_sim=60.0))
    assert report.estimate < 0.5
