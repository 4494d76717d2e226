import math

import pytest

import acr


def test_onemax_spectral_radius():
    model = acr.onemax_lumped(10)
    est = acr.spectral_radius(model)
    assert abs(est["rho"] - 0.9) < 1e-10
    assert est["collatz_lower"] <= est["rho"] <= est["collatz_upper"]
    assert abs(acr.asymptotic_rate(model) - 0.1) < 1e-10


def test_hitting_time():
    m = acr.hitting_times(acr.onemax_lumped(10))
    assert max(m) == pytest.approx(10 * sum(1 / k for k in range(1, 11)), rel=1e-12)


def test_exact_rate_curve():
    model = acr.onemax_lumped(10)
    r = acr.exact_rate_curve(model, acr.binomial_init(10), 50)
    assert r[0] is None
    assert all(abs(x - 0.1) < 1e-12 for x in r[1:])


def test_model_round_trip():
    model = acr.onemax_full(3)
    back = acr.TransitionModel.from_json(model.to_json())
    assert back.labels == model.labels
    assert back.Q == model.Q
    assert back.B == model.B


def test_custom_model():
    model = acr.TransitionModel(["a", "b"], [[0.5, 0.2], [0.1, 0.6]], [0.3, 0.3], [0.0, 1.0], 2.0)
    assert model.validate() == []
    assert len(model) == 2
    rho = acr.spectral_radius(model)["rho"]
    q0 = acr.perron_init(model)
    r = acr.exact_rate_curve(model, q0, 20)
    assert all(abs(x - (1 - rho)) < 1e-9 for x in r[1:])
    bad = acr.TransitionModel(["a"], [[0.7]], [0.7], [0.0], 1.0)
    assert bad.validate()
    with pytest.raises(acr.ValidationError):
        acr.analyze(bad, [1.0])


def test_rates():
    f = [10 - 5 * 0.9**t for t in range(31)]
    assert acr.geometric_rate(f, 10.0)[5] == pytest.approx(0.1)
    assert acr.logarithmic_rate(f, 10.0)[5] == pytest.approx(-math.log(0.9))
    alt = acr.alternative_rate(f, 10)
    assert alt[9] is None and alt[21] is None
    assert alt[15] == pytest.approx(0.1)


def test_objectives():
    assert acr.onemax([1, 0, 1]) == 2
    assert acr.ackley([-math.e] * 3) == pytest.approx(0.0, abs=1e-12)


def test_estimate_deterministic():
    cfg = {"objective": {"name": "onemax", "dimension": 8}, "generations": 20, "runs": 30, "seed": 4}
    a = acr.estimate(cfg)
    b = acr.estimate(cfg, jobs=3)
    assert a == b
    assert len(a["R_geom"]) == 21
    traces = acr.run_traces(cfg)
    assert len(traces) == 30 and all(len(t) == 21 for t in traces)


def test_config_error():
    with pytest.raises(acr.ConfigError):
        acr.estimate({"bogus": 1})
    with pytest.raises(ValueError):
        acr.estimate("{")
