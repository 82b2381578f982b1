"""Exact Gaussian-process regression with Cholesky-based inference.

The posterior mean and variance at a query x are

    mu(x)    = k(x)^T (K + s2 I)^{-1} y
    var(x)   = k(x, x) - k(x)^T (K + s2 I)^{-1} k(x)

computed through one Cholesky factorization and triangular solves.  Targets
are standardized by default (zero mean, unit scale) and predictions mapped
back, which stands in for an unknown constant mean function.  Bandwidths /
lengthscales are fitted by multistart maximization of the log marginal
likelihood.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cholesky, solve_triangular
from scipy.optimize import minimize
from scipy.stats import qmc

from .kernels import KernelSpec, kernel_cross, kernel_diag, kernel_matrix

__all__ = [
    "GPState",
    "PosteriorMoments",
    "IllConditionedModelError",
    "fit",
    "posterior",
    "posterior_batch",
    "prior_variance",
    "log_marginal_likelihood",
    "optimize_hyperparameters",
]

DEFAULT_NOISE_VAR = 1e-6

# Diagonal inflation ladder tried when the raw Cholesky fails; the Beta
# kernel at small h can make clustered designs numerically singular.
_JITTERS = (0.0, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6, 1e-5, 1e-4)

# Log-scale hyperparameter search boxes.
H_BOUNDS = (0.05, 2.0)
LENGTHSCALE_BOUNDS = (0.01, 10.0)
NOISE_BOUNDS = (1e-8, 1e-1)


class IllConditionedModelError(RuntimeError):
    """Covariance matrix stayed non-positive-definite after maximum jitter."""


@dataclass(frozen=True)
class PosteriorMoments:
    mean: float
    variance: float

    @property
    def std(self):
        return float(np.sqrt(self.variance))


@dataclass(frozen=True, eq=False)
class GPState:
    """Immutable fitted posterior.

    ``y`` holds the internal (possibly standardized) targets that the
    Cholesky factor and ``alpha_vec`` refer to; ``y_mean``/``y_scale`` map
    predictions back to the raw target units.
    """

    X: np.ndarray
    y: np.ndarray
    y_mean: float
    y_scale: float
    noise_var: float
    kernel: KernelSpec
    chol: np.ndarray
    alpha_vec: np.ndarray
    jitter: float


def fit(X, y, kernel, noise_var=DEFAULT_NOISE_VAR, standardize=True):
    """Fit an exact GP to (X, y) under the given kernel spec.

    On Cholesky failure the diagonal is inflated along a fixed jitter ladder
    (recorded in the returned state); exhausting the ladder raises
    :class:`IllConditionedModelError`.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float).ravel()
    if X.shape[0] != y.size:
        raise ValueError("X and y must have matching lengths")
    if y.size < 1:
        raise ValueError("need at least one observation")
    if noise_var < 0:
        raise ValueError("noise variance must be nonnegative")

    if standardize:
        y_mean = float(np.mean(y))
        y_scale = float(np.std(y))
        if y_scale < 1e-12:
            y_scale = 1.0
    else:
        y_mean, y_scale = 0.0, 1.0
    y_int = (y - y_mean) / y_scale

    K = kernel_matrix(X, kernel)
    n = y.size
    last_err = None
    for jitter in _JITTERS:
        try:
            L = cholesky(K + (noise_var + jitter) * np.eye(n), lower=True)
        except np.linalg.LinAlgError as err:
            last_err = err
            continue
        alpha = solve_triangular(L, y_int, lower=True)
        alpha = solve_triangular(L.T, alpha, lower=False)
        return GPState(
            X=X,
            y=y_int,
            y_mean=y_mean,
            y_scale=y_scale,
            noise_var=float(noise_var),
            kernel=kernel,
            chol=L,
            alpha_vec=alpha,
            jitter=jitter,
        )
    raise IllConditionedModelError(
        f"Cholesky failed for n={n} even with jitter {_JITTERS[-1]:g}"
    ) from last_err


def posterior_batch(state, queries):
    """Posterior means and variances (raw target units) at query rows."""
    Q = np.atleast_2d(np.asarray(queries, dtype=float))
    if Q.shape[1] != state.X.shape[1]:
        raise ValueError("query dimension does not match the training design")
    Kq = kernel_cross(state.X, Q, state.kernel)
    mean = state.y_mean + state.y_scale * (Kq.T @ state.alpha_vec)
    V = solve_triangular(state.chol, Kq, lower=True)
    var = kernel_diag(Q, state.kernel) - np.sum(V * V, axis=0)
    var = state.y_scale**2 * np.clip(var, 0.0, None)
    return mean, var


def posterior(state, x):
    """Posterior moments at a single query point."""
    mean, var = posterior_batch(state, np.atleast_2d(np.asarray(x, dtype=float)))
    return PosteriorMoments(mean=float(mean[0]), variance=float(var[0]))


def log_marginal_likelihood(state):
    """Log marginal likelihood of the state's internal targets."""
    n = state.y.size
    return float(
        -0.5 * state.y @ state.alpha_vec
        - np.sum(np.log(np.diag(state.chol)))
        - 0.5 * n * np.log(2.0 * np.pi)
    )


def prior_variance(state, x):
    """Prior variance k(x, x) in raw target units (scaled by y_scale^2)."""
    X = np.atleast_2d(np.asarray(x, dtype=float))
    return state.y_scale**2 * kernel_diag(X, state.kernel)


def _spec_from_log_params(kernel_kind, theta, d, nu):
    if kernel_kind == "beta":
        return KernelSpec.beta(np.exp(theta[:d]))
    return KernelSpec(kind=kernel_kind, lengthscale=float(np.exp(theta[0])), nu=nu)


def optimize_hyperparameters(
    X,
    y,
    kernel_kind,
    noise_var=DEFAULT_NOISE_VAR,
    learn_noise=False,
    restarts=8,
    seed=0,
    initial_specs=(),
    maxfev=None,
    nu=2.5,
    standardize=True,
):
    """Maximize the log marginal likelihood over the hyperparameter box.

    Runs a derivative-free simplex search from ``restarts`` quasi-random
    starting points (plus any ``initial_specs`` warm starts) in log space and
    keeps the best restart, so the returned likelihood dominates every
    starting point.  Returns ``(KernelSpec, noise_var)``.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float).ravel()
    if y.size < 2:
        raise ValueError("hyperparameter fitting needs at least two points")
    d = X.shape[1]

    if kernel_kind == "beta":
        lo = np.full(d, np.log(H_BOUNDS[0]))
        hi = np.full(d, np.log(H_BOUNDS[1]))
    elif kernel_kind in ("rbf", "matern"):
        lo = np.array([np.log(LENGTHSCALE_BOUNDS[0])])
        hi = np.array([np.log(LENGTHSCALE_BOUNDS[1])])
    else:
        raise ValueError(f"unknown kernel kind {kernel_kind!r}")
    if learn_noise:
        lo = np.append(lo, np.log(NOISE_BOUNDS[0]))
        hi = np.append(hi, np.log(NOISE_BOUNDS[1]))
    n_params = lo.size

    def objective(theta):
        s2 = np.exp(theta[-1]) if learn_noise else noise_var
        spec = _spec_from_log_params(kernel_kind, theta, d, nu)
        try:
            state = fit(X, y, spec, noise_var=s2, standardize=standardize)
        except IllConditionedModelError:
            return 1e20
        return -log_marginal_likelihood(state)

    starts = []
    for spec in initial_specs:
        if spec.kind == "beta":
            theta = np.log(np.clip(spec.bandwidths(d), *H_BOUNDS))
        else:
            theta = np.array([np.log(np.clip(spec.lengthscale, *LENGTHSCALE_BOUNDS))])
        if learn_noise:
            theta = np.append(theta, np.log(np.clip(noise_var, *NOISE_BOUNDS)))
        starts.append(theta)
    if restarts > 0:
        sampler = qmc.Sobol(d=n_params, scramble=True, seed=np.random.default_rng(seed))
        draw = sampler.random(int(2 ** np.ceil(np.log2(max(restarts, 1)))))[:restarts]
        starts.extend(lo + (hi - lo) * row for row in draw)

    best_val, best_theta = np.inf, None
    n_failed = 0
    for theta0 in starts:
        f0 = objective(theta0)
        if f0 >= 1e20:
            n_failed += 1
            continue
        res = minimize(
            objective,
            theta0,
            method="Nelder-Mead",
            bounds=list(zip(lo, hi)),
            options={
                "maxfev": maxfev or 200 * n_params,
                "xatol": 1e-3,
                "fatol": 1e-6,
            },
        )
        val, theta = (res.fun, res.x) if res.fun <= f0 else (f0, theta0)
        if val < best_val:
            best_val, best_theta = val, theta
    if best_theta is None:
        raise IllConditionedModelError(
            f"all {n_failed} hyperparameter restarts failed to factorize"
        )

    fitted_noise = float(np.exp(best_theta[-1])) if learn_noise else noise_var
    return _spec_from_log_params(kernel_kind, best_theta, d, nu), fitted_noise
