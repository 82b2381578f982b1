"""Tests for the command-line front end.

Everything drives ``main(argv)`` in-process; runs use tiny budgets so the
whole module stays fast.
"""

import csv
import sys

import numpy as np
import pytest

from betabo.cli import ConfigError, _fmt, load_config, main

FAST_OPT = [
    "--set", "n_iter=4", "--set", "n_init=4", "--set", "restarts=1",
    "--set", "maxfev=20", "--set", "refit_every=2",
]


def _read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


class TestConfig:
    def test_defaults_complete(self):
        cfg = load_config("optimize")
        assert cfg["function"] == "levy"
        assert cfg["n_iter"] == 300

    def test_file_and_overrides(self, tmp_path):
        ini = tmp_path / "run.ini"
        ini.write_text("[optimize]\nn_iter = 7\nkernel = matern\n")
        cfg = load_config("optimize", str(ini), ["n_iter=9"])
        assert cfg["n_iter"] == 9  # --set beats the file
        assert cfg["kernel"] == "matern"

    def test_unknown_key_rejected(self, tmp_path):
        ini = tmp_path / "run.ini"
        ini.write_text("[optimize]\nwibble = 3\n")
        with pytest.raises(ConfigError):
            load_config("optimize", str(ini))
        with pytest.raises(ConfigError):
            load_config("optimize", None, ["wibble=3"])

    def test_unknown_section_rejected(self, tmp_path):
        ini = tmp_path / "run.ini"
        ini.write_text("[mystery]\nx = 1\n")
        with pytest.raises(ConfigError):
            load_config("optimize", str(ini))

    def test_bad_value_rejected(self):
        with pytest.raises(ConfigError):
            load_config("optimize", None, ["n_iter=many"])
        with pytest.raises(ConfigError):
            load_config("optimize", None, ["warm_start=perhaps"])

    def test_bool_coercion(self):
        assert load_config("optimize", None, ["warm_start=off"])["warm_start"] is False
        assert load_config("optimize", None, ["learn_noise=1"])["learn_noise"] is True

    def test_missing_file(self):
        with pytest.raises(ConfigError):
            load_config("optimize", "/nonexistent.ini")

    def test_fmt_round_trips(self):
        rng = np.random.default_rng(50)
        for v in rng.normal(scale=1e3, size=200):
            assert float(_fmt(v)) == v
        assert float(_fmt(1e-300)) == 1e-300


class TestSpectrumCommand:
    ARGS = [
        "spectrum", "--set", "h_grid=0.5 1.0", "--set", "d_grid=2",
        "--set", "n_matrices=3", "--set", "n_points=15",
    ]

    def test_writes_expected_rows(self, tmp_path):
        out = tmp_path / "s"
        assert main(self.ARGS + ["--out", str(out)]) == 0
        eig = _read_csv(out / "spectrum.csv")
        reg = _read_csv(out / "spectrum_regression.csv")
        assert eig[0] == ["kernel", "d", "h_or_ell", "j", "mean_eigenvalue"]
        assert len(eig) == 1 + 2 * 15  # two cells, 15 eigenvalues each
        assert len(reg) == 1 + 2

    def test_rerun_byte_identical(self, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        main(self.ARGS + ["--out", str(out1)])
        main(self.ARGS + ["--out", str(out2)])
        for name in ("spectrum.csv", "spectrum_regression.csv"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()

    def test_stationary_kernels_included(self, tmp_path):
        out = tmp_path / "s"
        code = main(
            ["spectrum", "--out", str(out), "--set", "kernels=beta rbf matern",
             "--set", "h_grid=1.0", "--set", "ell_grid=1.0", "--set", "d_grid=2",
             "--set", "n_matrices=2", "--set", "n_points=10"]
        )
        assert code == 0
        kinds = {row[0] for row in _read_csv(out / "spectrum_regression.csv")[1:]}
        assert kinds == {"beta", "rbf", "matern"}

    def test_empty_grid_is_config_error(self, tmp_path):
        assert main(["spectrum", "--out", str(tmp_path), "--set", "d_grid="]) == 2


class TestOptimizeCommand:
    def test_trajectory_row_count(self, tmp_path):
        out = tmp_path / "o"
        code = main(
            ["optimize", "--out", str(out), "--set", "function=levy",
             "--set", "dimension=2", "--set", "setting=1", "--set", "seeds=0",
             "--set", "n_iter=10", "--set", "n_init=6", "--set", "restarts=1",
             "--set", "maxfev=20"]
        )
        assert code == 0
        rows = _read_csv(out / "trajectory_0.csv")
        assert len(rows) == 1 + 16
        assert rows[0][:3] == ["iter", "x_unit_0", "x_unit_1"]
        summary = _read_csv(out / "summary.csv")
        assert summary[0] == ["kernel", "acq", "setting", "mean_final_best", "stderr"]
        assert len(summary) == 2

    def test_multi_seed_summary(self, tmp_path):
        out = tmp_path / "o"
        code = main(
            ["optimize", "--out", str(out), "--set", "seeds=0 1 2"] + FAST_OPT
        )
        assert code == 0
        for seed in (0, 1, 2):
            assert (out / f"trajectory_{seed}.csv").exists()
        row = _read_csv(out / "summary.csv")[1]
        finals = [
            float(_read_csv(out / f"trajectory_{s}.csv")[-1][-2]) for s in (0, 1, 2)
        ]
        assert float(row[3]) == pytest.approx(np.mean(finals), rel=1e-15)
        assert float(row[4]) == pytest.approx(
            np.std(finals, ddof=1) / np.sqrt(3), rel=1e-12
        )

    def test_failing_external_preserves_partial(self, tmp_path):
        out = tmp_path / "o"
        counter = tmp_path / "count.txt"
        script = tmp_path / "bad.py"
        script.write_text(
            "import os, sys\n"
            "vals = [float(t) for t in sys.stdin.read().split()]\n"
            f"path = {str(counter)!r}\n"
            "n = int(open(path).read()) if os.path.exists(path) else 0\n"
            "open(path, 'w').write(str(n + 1))\n"
            "if n >= 4:\n"
            "    sys.exit(1)\n"
            "print(vals[0] * vals[0])\n"
        )
        code = main(
            ["optimize", "--out", str(out),
             "--set", f"external_command={sys.executable} {script}",
             "--set", "external_lower=0", "--set", "external_upper=1",
             "--set", "seeds=0", "--set", "n_iter=3", "--set", "restarts=1",
             "--set", "maxfev=20"]
        )
        assert code == 3
        partial = _read_csv(out / "trajectory_0.csv")
        assert len(partial) - 1 == 4

    def test_external_bounds_validated(self, tmp_path):
        code = main(
            ["optimize", "--out", str(tmp_path),
             "--set", "external_command=echo 1",
             "--set", "external_lower=0 0", "--set", "external_upper=1"]
        )
        assert code == 2


class TestBenchCommand:
    def test_small_grid(self, tmp_path):
        out = tmp_path / "b"
        code = main(
            ["bench", "--out", str(out), "--set", "functions=levy",
             "--set", "dimension=2", "--set", "settings=1",
             "--set", "kernels=beta matern", "--set", "seeds=0 1",
             "--set", "n_iter=3", "--set", "n_init=4",
             "--set", "restarts=1", "--set", "maxfev=20"]
        )
        assert code == 0
        rows = _read_csv(out / "table2_style.csv")
        assert len(rows) == 1 + 2
        assert all(row[-1] == "ok" for row in rows[1:])

    def test_failed_cell_marked_and_run_continues(self, tmp_path, monkeypatch):
        import betabo.cli as cli_mod

        real_job = cli_mod._optimize_job

        def flaky_job(payload):
            if payload[3] == "rbf":
                return {"seed": payload[2], "ok": False, "error": "boom"}
            return real_job(payload)

        monkeypatch.setattr(cli_mod, "_optimize_job", flaky_job)
        out = tmp_path / "b"
        code = main(
            ["bench", "--out", str(out), "--set", "functions=levy",
             "--set", "dimension=2", "--set", "settings=1",
             "--set", "kernels=rbf beta", "--set", "seeds=0",
             "--set", "n_iter=2", "--set", "n_init=4",
             "--set", "restarts=1", "--set", "maxfev=20"]
        )
        assert code == 0
        rows = _read_csv(out / "table2_style.csv")
        by_kernel = {row[3]: row for row in rows[1:]}
        assert by_kernel["rbf"][-1].startswith("failed")
        assert by_kernel["beta"][-1] == "ok"

    def test_empty_kernels_is_config_error(self, tmp_path):
        assert main(["bench", "--out", str(tmp_path), "--set", "kernels="]) == 2
