"""The Bayesian-optimization driver.

A run is: scrambled-Sobol initialization, then repeat {refit hyperparameters
per policy, fit the GP on everything seen, maximize the acquisition, evaluate
the objective at the chosen point}.  All modeling happens in unit-cube
coordinates regardless of kernel, so bandwidths and lengthscales are directly
comparable across kernels.

One master seed drives everything: it is split into independent streams for
Sobol scrambling, acquisition candidates, duplicate-query perturbations, and
hyperparameter restarts, so identical (config, seed) pairs give identical
trajectories.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.stats import qmc

from .acquisition import AcquisitionSpec, maximize_acquisition
from .benchmarks import boundary_distance, from_unit
from .gp import DEFAULT_NOISE_VAR, fit, optimize_hyperparameters
from .kernels import KernelSpec

__all__ = [
    "BORecord",
    "Trajectory",
    "HyperfitPolicy",
    "BlackBoxRunError",
    "sobol_init",
    "run_bo",
    "summarize",
    "Summary",
]


class BlackBoxRunError(RuntimeError):
    """Objective evaluation failed mid-run; carries the partial trajectory."""

    def __init__(self, message, trajectory):
        super().__init__(message)
        self.trajectory = trajectory


@dataclass(frozen=True)
class BORecord:
    index: int
    x_unit: np.ndarray
    x_raw: np.ndarray
    y: float
    best: float
    boundary: float


@dataclass
class Trajectory:
    records: list
    config: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.records)

    @property
    def best_curve(self):
        return np.array([r.best for r in self.records])

    @property
    def boundary_curve(self):
        return np.array([r.boundary for r in self.records])

    @property
    def final_best(self):
        return self.records[-1].best


@dataclass(frozen=True)
class HyperfitPolicy:
    """How and how often kernel hyperparameters are refitted during a run.

    ``refit_every=0`` disables refitting (fixed hyperparameters).  With
    ``warm_start`` the previous optimum joins the restart pool, which lets a
    small ``restarts`` count track the likelihood surface incrementally.
    """

    refit_every: int = 1
    restarts: int = 4
    warm_start: bool = True
    maxfev: Optional[int] = None
    noise_var: float = DEFAULT_NOISE_VAR
    learn_noise: bool = False


def sobol_init(d, n, seed, scramble=True):
    """First ``n`` points of a (scrambled) Sobol sequence in [0, 1)^d.

    The power-of-two block is drawn and sliced so the same prefix comes back
    for any ``n``, deterministically under the seed.
    """
    if d < 1 or n < 1:
        raise ValueError("need d >= 1 and n >= 1")
    sampler = qmc.Sobol(d=d, scramble=scramble, seed=np.random.default_rng(seed))
    n_draw = int(2 ** np.ceil(np.log2(n)))
    return sampler.random(n_draw)[:n]


def _initial_spec(kernel_kind, d, nu):
    if kernel_kind == "beta":
        return KernelSpec.beta(np.full(d, 0.5))
    return KernelSpec(kind=kernel_kind, lengthscale=0.5, nu=nu)


def run_bo(
    black_box,
    kernel_kind="beta",
    acq=AcquisitionSpec(),
    n_init=None,
    n_iter=100,
    seed=0,
    hyperfit=HyperfitPolicy(),
    nu=2.5,
):
    """Run one seeded GP-BO minimization and return its Trajectory.

    ``n_init`` defaults to 3 * d.  If the black box raises, the partial
    trajectory is attached to the :class:`BlackBoxRunError`.
    """
    box = black_box.domain
    d = box.dim
    if n_init is None:
        n_init = 3 * d
    if n_init < 1 or n_iter < 0:
        raise ValueError("need n_init >= 1 and n_iter >= 0")

    ss = np.random.SeedSequence(seed)
    sobol_ss, acq_ss, perturb_ss, hyper_ss = ss.spawn(4)
    acq_seeds = np.random.default_rng(acq_ss).integers(2**63, size=max(n_iter, 1))
    hyper_seeds = np.random.default_rng(hyper_ss).integers(2**63, size=max(n_iter, 1))
    perturb_rng = np.random.default_rng(perturb_ss)

    config = {
        "kernel": kernel_kind,
        "acquisition": acq.kind,
        "beta_t": acq.beta_t,
        "xi": acq.xi,
        "n_init": n_init,
        "n_iter": n_iter,
        "seed": seed,
        "noise_var": hyperfit.noise_var,
        "refit_every": hyperfit.refit_every,
        "black_box": black_box.name,
    }
    trajectory = Trajectory(records=[], config=config)

    def evaluate(u, index, best):
        x_raw = from_unit(u, box)
        try:
            y = float(black_box.evaluate(x_raw))
        except Exception as err:
            raise BlackBoxRunError(
                f"objective failed at record {index}: {err}", trajectory
            ) from err
        best = y if best is None else min(best, y)
        trajectory.records.append(
            BORecord(
                index=index,
                x_unit=np.array(u, dtype=float),
                x_raw=x_raw,
                y=y,
                best=best,
                boundary=boundary_distance(u),
            )
        )
        return best

    U = sobol_init(d, n_init, np.random.default_rng(sobol_ss))
    best = None
    for i, u in enumerate(U):
        best = evaluate(u, i, best)

    spec = _initial_spec(kernel_kind, d, nu)
    noise_var = hyperfit.noise_var
    X_unit = [r.x_unit for r in trajectory.records]
    y_obs = [r.y for r in trajectory.records]

    for it in range(n_iter):
        if hyperfit.refit_every and it % hyperfit.refit_every == 0:
            warm = (spec,) if hyperfit.warm_start else ()
            spec, noise_var = optimize_hyperparameters(
                np.array(X_unit),
                np.array(y_obs),
                kernel_kind,
                noise_var=hyperfit.noise_var,
                learn_noise=hyperfit.learn_noise,
                restarts=hyperfit.restarts,
                seed=hyper_seeds[it],
                initial_specs=warm,
                maxfev=hyperfit.maxfev,
                nu=nu,
            )
        state = fit(np.array(X_unit), np.array(y_obs), spec, noise_var=noise_var)
        u = maximize_acquisition(state, acq, seed=acq_seeds[it], best_so_far=best)
        if np.min(np.max(np.abs(np.array(X_unit) - u), axis=1)) < 1e-9:
            u = np.clip(u + perturb_rng.uniform(-1e-3, 1e-3, size=d), 0.0, 1.0)
        best = evaluate(u, n_init + it, best)
        X_unit.append(trajectory.records[-1].x_unit)
        y_obs.append(trajectory.records[-1].y)

    return trajectory


@dataclass(frozen=True)
class Summary:
    mean_final_best: float
    stderr: float
    mean_best_curve: np.ndarray
    mean_boundary_curve: np.ndarray
    n_runs: int


def summarize(trajectories):
    """Aggregate equal-length trajectories across seeds.

    The standard error is the sample standard deviation of the final bests
    divided by sqrt(n); a single trajectory reports 0.
    """
    if not trajectories:
        raise ValueError("need at least one trajectory")
    lengths = {len(t) for t in trajectories}
    if len(lengths) != 1:
        raise ValueError(f"trajectories have mismatched lengths {sorted(lengths)}")
    finals = np.array([t.final_best for t in trajectories])
    n = finals.size
    stderr = float(np.std(finals, ddof=1) / np.sqrt(n)) if n > 1 else 0.0
    return Summary(
        mean_final_best=float(np.mean(finals)),
        stderr=stderr,
        mean_best_curve=np.mean([t.best_curve for t in trajectories], axis=0),
        mean_boundary_curve=np.mean([t.boundary_curve for t in trajectories], axis=0),
        n_runs=n,
    )
