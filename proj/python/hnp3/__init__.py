"""Topic-marked multivariate Hawkes process engine with online SMC inference."""

import json as _json

from ._core import (
    Event,
    GammaPrior,
    Hyperparams,
    InferOptions,
    ModelMode,
    ParticleFilter,
    adjusted_rand_index,
    hyperparams_from_json,
    load_events,
    next_event_time_loglik,
    relative_error,
    save_events,
)
from ._core import simulate as _simulate

__all__ = [
    "Event",
    "GammaPrior",
    "Hyperparams",
    "InferOptions",
    "ModelMode",
    "ParticleFilter",
    "adjusted_rand_index",
    "hyperparams",
    "load_events",
    "next_event_time_loglik",
    "relative_error",
    "save_events",
    "simulate",
]


def simulate(config, seed=None):
    """Generate a synthetic stream from a config dict or JSON string.

    Returns (events, truth, t_end) where truth carries the generator's
    rates, influence matrix, per-topic kernel rates, token distributions,
    and latent records.
    """
    if not isinstance(config, str):
        config = _json.dumps(config)
    return _simulate(config, seed)


def hyperparams(config):
    """Model constants parsed from a config dict or JSON string."""
    if not isinstance(config, str):
        config = _json.dumps(config)
    return hyperparams_from_json(config)
