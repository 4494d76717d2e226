"""Average convergence rate of evolutionary algorithms: exact Markov-chain
analysis and Monte-Carlo estimation."""

import json as _json

from ._acr import (
    ConfigError,
    DimensionError,
    NumericalError,
    TransitionModel,
    ValidationError,
    __version__,
    ackley,
    alternative_rate,
    analyze,
    asymptotic_rate,
    binomial_init,
    exact_gap_curve,
    exact_rate_curve,
    g_condition,
    geometric_rate,
    hitting_times,
    logarithmic_rate,
    onemax,
    onemax_full,
    onemax_lumped,
    perron_init,
    spectral_radius,
)
from ._acr import estimate as _estimate
from ._acr import run_traces as _run_traces


def _as_json(config):
    return config if isinstance(config, str) else _json.dumps(config)


def estimate(config, jobs=1):
    """Run an experiment (dict or JSON text); returns the rate table as columns."""
    return _estimate(_as_json(config), jobs)


def run_traces(config, jobs=1):
    """Best-fitness trace of every run in an experiment."""
    return _run_traces(_as_json(config), jobs)
