"""Python bindings for the elicit engine.

Inputs and outputs use the same JSON documents as the CLI and HTTP API,
exchanged here as plain dicts.
"""

import json as _json
import os

from . import _core

__all__ = [
    "ElicitError",
    "fit",
    "pool",
    "cm_weights",
    "crossval",
    "dataset",
    "scores",
    "correlations",
    "checks",
    "relative_entropy",
    "calibration_score",
    "bundle",
]


class ElicitError(ValueError):
    """Engine error with its machine-readable code and optional details."""

    def __init__(self, code, message, details=None):
        super().__init__(f"[{code}] {message}")
        self.code = code
        self.message = message
        self.details = details or {}


def _engine(fn, *args):
    try:
        return fn(*args)
    except _core.EngineError as e:
        body = _json.loads(str(e))
        raise ElicitError(body["code"], body["message"], body.get("details")) from None


def _call(fn, *args):
    return _json.loads(_engine(fn, *args))


def _text(csv):
    """CSV text, or a path (str or PathLike) to read it from."""
    if isinstance(csv, os.PathLike) or ("\n" not in csv and os.path.isfile(csv)):
        with open(csv, encoding="utf-8") as f:
            return f.read()
    return csv


def fit(judgment, family="auto", families=None):
    body = {"judgment": judgment, "family": family}
    if families is not None:
        body["families"] = families
    return _call(_core.fit, _json.dumps(body))


def pool(distributions, weights=None, method="linear", expert_ids=None):
    body = {"distributions": distributions, "method": method}
    if weights is not None:
        body["weights"] = weights
    if expert_ids is not None:
        body["expert_ids"] = expert_ids
    return _call(_core.pool, _json.dumps(body))


def cm_weights(seeds_csv, dataset_id="seeds", alpha=0.05, optimize_alpha=False):
    """`seeds_csv` is CSV text or a path."""
    opts = _json.dumps({"alpha": alpha, "optimize_alpha": optimize_alpha})
    return _call(_core.cm_weights, _text(seeds_csv), dataset_id, opts)


def crossval(seeds_csv, dataset_id="seeds", alpha=0.05, optimize_alpha=False, consensus_csv=None):
    opts = _json.dumps({"alpha": alpha, "optimize_alpha": optimize_alpha})
    consensus = _text(consensus_csv) if consensus_csv is not None else ""
    return _call(_core.crossval, _text(seeds_csv), dataset_id, opts, consensus)


def dataset(seeds_csv, dataset_id="seeds", facilitator=False):
    return _call(_core.dataset, _text(seeds_csv), dataset_id, facilitator)


def scores(evaluands, truths, options=None):
    body = {"evaluands": evaluands, "truths": truths}
    if options is not None:
        body["options"] = options
    return _call(_core.scores, _json.dumps(body))


def correlations(evaluands, truths):
    return _call(_core.correlations, _json.dumps({"evaluands": evaluands, "truths": truths}))


def checks(params, total=100, draws=10000, level=0.9, seed=20190321):
    return _call(_core.checks, _json.dumps(params), total, draws, level, seed)


def relative_entropy(s, p):
    return _engine(_core.relative_entropy, list(s), list(p))


def calibration_score(relent, q, r=4):
    return _engine(_core.calibration_score, relent, q, r)


def bundle(entries):
    """Stored zip archive of {name: text} entries, as bytes."""
    return _engine(_core.bundle, list(entries.items()))
