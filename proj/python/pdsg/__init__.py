"""Primal-dual subgradient methods with optimality certificates.

Thin wrapper over the C++ core; structured results come back as dicts.
"""

import json as _json

from ._core import (  # noqa: F401
    Instance,
    Schedule,
    alpha_from_lambda,
    divergence_horizon,
    eigen_extremes,
    gen_constrained,
    gen_l1_ls,
    gen_quadratic,
    lambda_from_alpha,
    prop1_rhs,
    theorem2_rhs,
    toy_divergent,
)
from . import _core

__all__ = [
    "Instance",
    "Schedule",
    "alpha_from_lambda",
    "divergence",
    "divergence_horizon",
    "eigen_extremes",
    "equivalence",
    "fig1",
    "gen_constrained",
    "gen_l1_ls",
    "gen_quadratic",
    "lambda_from_alpha",
    "prop1_rhs",
    "run",
    "table1",
    "theorem2_rhs",
    "toy_divergent",
]


def run(instance, schedule, mode="primal", T=1000, criterion="", eps=0.05, seed=0, records=False):
    """Run a solver and return the summary dict (plus per-iteration records if asked)."""
    return _json.loads(_core._run(instance, schedule, mode, T, criterion, eps, seed, records))


def fig1(seed=1, small=True, T=0, threads=0):
    return _json.loads(_core._fig1(seed, small, T, threads))


def table1(seed=1, small=True, eps=0.05, schedules=(), threads=0):
    return _json.loads(_core._table1(seed, small, eps, list(schedules), threads))


def divergence(seed=1, small=False, sigmas=(), threads=0):
    return _json.loads(_core._divergence(seed, small, list(sigmas), threads))


def equivalence(T=1000, threads=0):
    return _json.loads(_core._equivalence(T, threads))
