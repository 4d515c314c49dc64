"""Batched weighted average learning on Markov data."""

import json as _json

from . import _core

from ._core import (
    BoundInputs,
    BoundResult,
    Certificate,
    Chain,
    Fixture,
    Space,
    WeightState,
    effective_sample_size,
    fit_certificate,
    fixture,
    fixture_names,
    lemma1_ne,
    lemma2_ne,
    n_from_ne,
    normalized_weights,
    posterior_masses,
    predict,
    predict_mcmc,
    theorem2_ne,
    theorem4_guarantee,
    train,
    weight_domination_threshold,
)


def run_experiment(kind, config):
    """Run consistency, robustness or domination; returns (report_csv, summary dict)."""
    csv, summary = _core._run_experiment(kind, _json.dumps(config))
    return csv, _json.loads(summary)


def bound_table(config):
    return _json.loads(_core._bound_table(_json.dumps(config)))


def verify(only=()):
    """Acceptance criteria results as a list of dicts."""
    return _core._verify(list(only))

