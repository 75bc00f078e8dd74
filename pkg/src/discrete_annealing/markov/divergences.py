"""Divergences between distributions and variance / entropy functionals."""

from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike
from scipy.special import rel_entr, xlogy

from discrete_annealing.errors import AbsoluteContinuity
from discrete_annealing.graph.measures import ProbVector


def _as_array(v: ProbVector | ArrayLike) -> np.ndarray:
    # boundary measures (zeros allowed) arrive as plain arrays
    if isinstance(v, ProbVector):
        return v.values
    return np.asarray(v, dtype=float)


def kl(mu: ProbVector | ArrayLike, nu: ProbVector | ArrayLike) -> float:
    """KL(mu || nu) = sum mu log(mu / nu)."""
    m, n = _as_array(mu), _as_array(nu)
    terms = rel_entr(m, n)
    if np.any(np.isinf(terms)):
        x = int(np.flatnonzero(np.isinf(terms))[0])
        raise AbsoluteContinuity(f"Reference vanishes at state {x} where mu = {m[x]!r}")
    return max(float(terms.sum()), 0.0)


def chi2(mu: ProbVector | ArrayLike, nu: ProbVector | ArrayLike) -> float:
    """chi^2(mu || nu) = sum (mu - nu)^2 / nu."""
    m, n = _as_array(mu), _as_array(nu)
    if np.any((n == 0.0) & (m != 0.0)):
        raise AbsoluteContinuity("Reference vanishes where mu does not")
    live = n > 0.0
    return float(np.sum((m[live] - n[live]) ** 2 / n[live]))


def entropy_functional(pi: ProbVector, f: ArrayLike) -> float:
    """Ent_pi[f] = E[f log f] - E[f] log E[f] for f >= 0."""
    fv = np.asarray(f, dtype=float)
    mean = pi.expectation(fv)
    return float(np.dot(pi.values, xlogy(fv, fv)) - xlogy(mean, mean))


def variance_functional(pi: ProbVector, f: ArrayLike) -> float:
    """Var_pi[f] = E[f^2] - E[f]^2, computed around the mean."""
    fv = np.asarray(f, dtype=float)
    centered = fv - pi.expectation(fv)
    return float(np.dot(pi.values, centered**2))


def tv_distance(mu: ProbVector | ArrayLike, nu: ProbVector | ArrayLike) -> float:
    return 0.5 * float(np.abs(_as_array(mu) - _as_array(nu)).sum())
