"""Acquisition functions and their maximization over the unit hypercube.

Everything follows the minimization convention: scores are oriented so that
"maximize the score" always means "query here next".  UCB therefore returns
the negated lower confidence bound, and EI / PI measure improvement below
the incumbent best.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize
from scipy.special import ndtr
from scipy.stats import qmc

from .gp import posterior_batch

__all__ = [
    "AcquisitionSpec",
    "ucb_score",
    "ei_score",
    "pi_score",
    "acquisition_values",
    "maximize_acquisition",
]

_SQRT_2PI = np.sqrt(2.0 * np.pi)


@dataclass(frozen=True)
class AcquisitionSpec:
    """Acquisition choice: kind in {"ucb", "ei", "pi"} plus its knobs.

    ``beta_t`` is the UCB exploration weight (the score uses sqrt(beta_t));
    ``xi`` the EI/PI improvement margin.
    """

    kind: str = "ucb"
    beta_t: float = 4.0
    xi: float = 0.01

    def __post_init__(self):
        if self.kind not in ("ucb", "ei", "pi"):
            raise ValueError(f"unknown acquisition kind {self.kind!r}")
        if not self.beta_t > 0:
            raise ValueError("beta_t must be > 0")
        if self.xi < 0:
            raise ValueError("xi must be nonnegative")


def _norm_pdf(z):
    return np.exp(-0.5 * z * z) / _SQRT_2PI


def ucb_score(mean, std, spec):
    """Negated lower confidence bound -(mu - sqrt(beta_t) * sigma)."""
    return -(np.asarray(mean, dtype=float) - np.sqrt(spec.beta_t) * np.asarray(std, dtype=float))


def ei_score(mean, std, best_so_far, spec):
    """Expected improvement below ``best_so_far`` minus the margin xi.

    Collapses to max(0, best - xi - mu) at zero posterior deviation.
    """
    mean = np.asarray(mean, dtype=float)
    std = np.asarray(std, dtype=float)
    imp = best_so_far - spec.xi - mean
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(std > 0, imp / np.where(std > 0, std, 1.0), 0.0)
    ei = np.where(std > 0, imp * ndtr(z) + std * _norm_pdf(z), np.maximum(imp, 0.0))
    return np.maximum(ei, 0.0)


def pi_score(mean, std, best_so_far, spec):
    """Probability of improving on ``best_so_far`` by more than xi.

    A 0/1 step function at zero posterior deviation.
    """
    mean = np.asarray(mean, dtype=float)
    std = np.asarray(std, dtype=float)
    imp = best_so_far - spec.xi - mean
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(std > 0, imp / np.where(std > 0, std, 1.0), 0.0)
    return np.where(std > 0, ndtr(z), (imp > 0).astype(float))


def acquisition_values(state, spec, queries, best_so_far=None):
    """Score a batch of unit-cube query rows under a fitted GP state."""
    mean, var = posterior_batch(state, queries)
    std = np.sqrt(var)
    if spec.kind == "ucb":
        return ucb_score(mean, std, spec)
    if best_so_far is None:
        best_so_far = float(np.min(state.y_mean + state.y_scale * state.y))
    if spec.kind == "ei":
        return ei_score(mean, std, best_so_far, spec)
    return pi_score(mean, std, best_so_far, spec)


def maximize_acquisition(
    state,
    spec,
    seed=0,
    best_so_far=None,
    n_candidates=None,
    n_refine_starts=4,
    refine_evals=200,
):
    """Pick the next query point by two-stage acquisition maximization.

    Stage 1 scores ``1024 * d`` scrambled-Sobol candidates in one batch;
    stage 2 polishes the top ``n_refine_starts`` with a bounded simplex
    search sharing a budget of ``refine_evals`` evaluations.  Deterministic
    given the seed; the returned point scores at least as high as every
    candidate evaluated, with ties broken toward the lowest candidate index.
    """
    d = state.X.shape[1]
    if n_candidates is None:
        n_candidates = 1024 * d
    if best_so_far is None:
        best_so_far = float(np.min(state.y_mean + state.y_scale * state.y))

    sampler = qmc.Sobol(d=d, scramble=True, seed=np.random.default_rng(seed))
    n_draw = int(2 ** np.ceil(np.log2(n_candidates)))
    cands = sampler.random(n_draw)[:n_candidates]
    scores = acquisition_values(state, spec, cands, best_so_far)

    best_idx = int(np.argmax(scores))
    best_x, best_score = cands[best_idx].copy(), float(scores[best_idx])

    order = np.argsort(-scores, kind="stable")[:n_refine_starts]
    budget = max(refine_evals // max(len(order), 1), 1)

    def negated(x):
        return -float(acquisition_values(state, spec, x[None, :], best_so_far)[0])

    for idx in order:
        res = minimize(
            negated,
            cands[idx],
            method="Nelder-Mead",
            bounds=[(0.0, 1.0)] * d,
            options={"maxfev": budget, "xatol": 1e-6, "fatol": 1e-12},
        )
        if -res.fun > best_score:
            best_score = -float(res.fun)
            best_x = np.clip(res.x, 0.0, 1.0)
    return best_x
