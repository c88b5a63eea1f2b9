"""Python front end for the covlab C++ core.

Configs and reports are plain dicts; they cross into C++ as JSON text.
"""

import json as _json

from . import _core
from ._core import ConfigError, NumericalError

__all__ = [
    "ConfigError",
    "NumericalError",
    "check",
    "covariance",
    "kernel",
    "kernel_csv",
    "oracle_verify",
    "run_suite",
    "theorem_ids",
]


def _text(obj):
    return obj if isinstance(obj, str) else _json.dumps(obj)


def theorem_ids():
    return list(_core.theorem_ids())


def check(theorem, config):
    """Run one theorem checker; returns the report dict."""
    return _json.loads(_core.check(theorem, _text(config)))


def run_suite(config=None):
    """Run a suite config (defaults when None); returns {"reports": [...], "summary": {...}}."""
    return _json.loads(_core.run_suite("" if config is None else _text(config)))


def kernel(measure, x, y):
    return _core.kernel(_text(measure), float(x), float(y))


def kernel_csv(measure, grid=200):
    return _core.kernel_csv(_text(measure), int(grid))


def covariance(measure, f, g, quadrature=None):
    """Cov_mu(f, g) as (value, error estimate)."""
    return _core.covariance(_text(measure), _text(f), _text(g), "" if quadrature is None else _text(quadrature))


def oracle_verify(seed=20240601, instances=500):
    return _json.loads(_core.oracle_verify(int(seed), int(instances)))
