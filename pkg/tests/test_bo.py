"""Tests for Sobol initialization, the BO driver, and run aggregation."""

import numpy as np
import pytest

from betabo.acquisition import AcquisitionSpec
from betabo.benchmarks import BlackBox, DomainBox
from betabo.bo import (
    BlackBoxRunError,
    BORecord,
    HyperfitPolicy,
    Trajectory,
    run_bo,
    sobol_init,
    summarize,
)

FAST_HYPERFIT = HyperfitPolicy(refit_every=2, restarts=2, maxfev=60)


def _quadratic_box():
    return BlackBox(
        evaluate=lambda x: float((x[0] - 0.3) ** 2),
        domain=DomainBox((0.0,), (1.0,)),
        known_optimum=(np.array([0.3]), 0.0),
        name="quadratic",
    )


class TestSobolInit:
    def test_unscrambled_prefix(self):
        pts = sobol_init(1, 2, seed=0, scramble=False)
        np.testing.assert_array_equal(pts.ravel(), [0.0, 0.5])

    def test_deterministic(self):
        np.testing.assert_array_equal(sobol_init(3, 17, seed=5), sobol_init(3, 17, seed=5))

    def test_in_half_open_cube(self):
        pts = sobol_init(4, 100, seed=1)
        assert np.all(pts >= 0.0) and np.all(pts < 1.0)

    def test_low_discrepancy_mean(self):
        pts = sobol_init(5, 1000, seed=2)
        np.testing.assert_allclose(pts.mean(axis=0), 0.5, atol=0.02)

    def test_validation(self):
        with pytest.raises(ValueError):
            sobol_init(0, 5, seed=0)
        with pytest.raises(ValueError):
            sobol_init(2, 0, seed=0)


class TestRunBO:
    def test_constant_objective(self):
        bb = BlackBox(
            evaluate=lambda x: 7.0, domain=DomainBox((0.0,), (1.0,)), name="const"
        )
        traj = run_bo(bb, "rbf", n_init=3, n_iter=5, seed=0, hyperfit=FAST_HYPERFIT)
        assert all(r.best == 7.0 for r in traj.records)
        assert len(traj) == 8

    def test_quadratic_converges(self):
        traj = run_bo(
            _quadratic_box(), "beta", AcquisitionSpec("ucb"),
            n_init=3, n_iter=30, seed=1,
        )
        assert traj.final_best <= 1e-3

    def test_best_monotone_and_points_in_box(self):
        bb = BlackBox(
            evaluate=lambda x: float(np.sum(x * x)),
            domain=DomainBox((-1.0, -1.0), (2.0, 2.0)),
            name="sphere",
        )
        traj = run_bo(bb, "matern", n_init=4, n_iter=6, seed=3, hyperfit=FAST_HYPERFIT)
        bests = traj.best_curve
        assert np.all(np.diff(bests) <= 0.0 + 1e-15)
        for r in traj.records:
            assert np.all(r.x_unit >= 0.0) and np.all(r.x_unit <= 1.0)
            assert np.all(r.x_raw >= -1.0) and np.all(r.x_raw <= 2.0)

    def test_deterministic_under_seed(self):
        a = run_bo(_quadratic_box(), "beta", n_init=3, n_iter=8, seed=11,
                   hyperfit=FAST_HYPERFIT)
        b = run_bo(_quadratic_box(), "beta", n_init=3, n_iter=8, seed=11,
                   hyperfit=FAST_HYPERFIT)
        for ra, rb in zip(a.records, b.records):
            np.testing.assert_array_equal(ra.x_unit, rb.x_unit)
            assert ra.y == rb.y and ra.best == rb.best

    def test_default_n_init_is_3d(self):
        bb = BlackBox(
            evaluate=lambda x: float(np.sum(x)),
            domain=DomainBox((0.0, 0.0), (1.0, 1.0)),
            name="sum",
        )
        traj = run_bo(bb, "rbf", n_iter=1, seed=0, hyperfit=FAST_HYPERFIT)
        assert len(traj) == 6 + 1

    def test_blackbox_failure_attaches_partial(self):
        calls = {"n": 0}

        def flaky(x):
            calls["n"] += 1
            if calls["n"] > 4:
                raise RuntimeError("hardware on fire")
            return float(x[0])

        bb = BlackBox(evaluate=flaky, domain=DomainBox((0.0,), (1.0,)), name="flaky")
        with pytest.raises(BlackBoxRunError) as excinfo:
            run_bo(bb, "rbf", n_init=3, n_iter=10, seed=0, hyperfit=FAST_HYPERFIT)
        assert len(excinfo.value.trajectory) == 4

    def test_record_config_snapshot(self):
        traj = run_bo(_quadratic_box(), "beta", n_init=2, n_iter=1, seed=9,
                      hyperfit=FAST_HYPERFIT)
        assert traj.config["kernel"] == "beta"
        assert traj.config["seed"] == 9
        assert traj.config["n_init"] == 2


def _synthetic_trajectory(finals, boundary=1.0):
    records = [
        BORecord(index=i, x_unit=np.array([0.5]), x_raw=np.array([0.5]),
                 y=v, best=min(finals[: i + 1]), boundary=boundary)
        for i, v in enumerate(finals)
    ]
    return Trajectory(records=records)


class TestSummarize:
    def test_single_trajectory(self):
        s = summarize([_synthetic_trajectory([3.0, 2.0, 2.0])])
        assert s.mean_final_best == 2.0
        assert s.stderr == 0.0

    def test_two_trajectories_hand_arithmetic(self):
        s = summarize([_synthetic_trajectory([1.0]), _synthetic_trajectory([3.0])])
        assert s.mean_final_best == 2.0
        assert s.stderr == pytest.approx(1.0, abs=1e-15)

    def test_center_boundary_curve(self):
        s = summarize([_synthetic_trajectory([5.0, 4.0], boundary=1.0)])
        np.testing.assert_array_equal(s.mean_boundary_curve, [1.0, 1.0])

    def test_mismatched_lengths_rejected(self):
        with pytest.raises(ValueError):
            summarize([_synthetic_trajectory([1.0]), _synthetic_trajectory([1.0, 2.0])])

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            summarize([])
