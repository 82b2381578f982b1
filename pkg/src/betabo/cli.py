"""Command-line front end: experiment orchestration and CSV emission.

Three subcommands cover the toolkit's surfaces:

  spectrum   eigenvalue-decay tables over (kernel, d, bandwidth) grids
  optimize   BO runs on one benchmark (or an external command) across seeds
  bench      the full function x setting x kernel x seed comparison grid

Configuration is an INI file with one section per command; ``--set
key=value`` overrides individual keys.  Unknown sections or keys are
rejected.  All floats are written with 17 significant digits so parsing a
CSV back recovers the exact values, and every random draw descends from the
configured seeds, making reruns byte-identical.

Exit codes: 0 success, 2 configuration error, 3 black-box/runtime error.
"""

import argparse
import concurrent.futures
import configparser
import csv
import os
import sys

import numpy as np

from .acquisition import AcquisitionSpec
from .benchmarks import (
    BenchmarkSpec,
    DomainBox,
    make_benchmark,
    subprocess_blackbox,
)
from .bo import BlackBoxRunError, HyperfitPolicy, run_bo, summarize
from .kernels import KernelSpec
from .spectrum import decay_report_suite, eigendecay_regression, expected_spectrum

__all__ = ["main", "entrypoint", "ConfigError", "cmd_spectrum", "cmd_optimize", "cmd_bench"]


class ConfigError(ValueError):
    """Invalid configuration (unknown key, bad value, empty grid)."""


_DEFAULTS = {
    "spectrum": {
        "kernels": "beta",
        "h_grid": "0.1 0.25 0.5 0.75 1 1.5",
        "d_grid": "5 10 20 50",
        "ell_grid": "1.0",
        "nu": 2.5,
        "n_matrices": 300,
        "n_points": 100,
        "floor": 1e-12,
        "seed": 0,
    },
    "optimize": {
        "function": "levy",
        "dimension": 2,
        "setting": 1,
        "margin": 0.05,
        "kernel": "beta",
        "nu": 2.5,
        "acquisition": "ucb",
        "beta_t": 4.0,
        "xi": 0.01,
        "n_init": 0,
        "n_iter": 300,
        "seeds": "0",
        "noise_var": 1e-6,
        "learn_noise": False,
        "refit_every": 1,
        "restarts": 4,
        "warm_start": True,
        "maxfev": 0,
        "external_command": "",
        "external_lower": "",
        "external_upper": "",
    },
    "bench": {
        "functions": "levy",
        "dimension": 8,
        "settings": "1 2 3",
        "margin": 0.05,
        "kernels": "beta matern",
        "nu": 2.5,
        "acquisition": "ucb",
        "beta_t": 4.0,
        "xi": 0.01,
        "n_init": 0,
        "n_iter": 150,
        "seeds": "0 1 2",
        "noise_var": 1e-6,
        "learn_noise": False,
        "refit_every": 1,
        "restarts": 4,
        "warm_start": True,
        "maxfev": 0,
    },
}


def _coerce(key, default, raw):
    raw = raw.strip()
    try:
        if isinstance(default, bool):
            low = raw.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(raw)
        return raw
    except ValueError as err:
        raise ConfigError(f"bad value for {key!r}: {raw!r}") from err


def load_config(command, config_file=None, overrides=()):
    """Merge defaults, an optional INI file, and --set overrides."""
    cfg = dict(_DEFAULTS[command])
    if config_file:
        parser = configparser.ConfigParser()
        read = parser.read(config_file)
        if not read:
            raise ConfigError(f"cannot read config file {config_file!r}")
        for section in parser.sections():
            if section not in _DEFAULTS:
                raise ConfigError(f"unknown config section [{section}]")
            if section != command:
                continue
            for key, raw in parser.items(section):
                if key not in cfg:
                    raise ConfigError(f"unknown key {key!r} in section [{section}]")
                cfg[key] = _coerce(key, cfg[key], raw)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, raw = item.split("=", 1)
        key = key.strip()
        if key not in cfg:
            raise ConfigError(f"unknown key {key!r} for command {command!r}")
        cfg[key] = _coerce(key, cfg[key], raw)
    return cfg


def _split(value, convert=str):
    return [convert(tok) for tok in str(value).split()]


def _fmt(value):
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _use_color(stream):
    return stream.isatty() and not os.environ.get("NO_COLOR")


def _log(message, color=None, stream=None):
    stream = stream or sys.stderr
    if color and _use_color(stream):
        codes = {"green": "32", "red": "31"}
        message = f"\x1b[{codes[color]}m{message}\x1b[0m"
    print(message, file=stream)


def _map_jobs(fn, payloads, workers):
    if workers <= 1 or len(payloads) <= 1:
        return [fn(p) for p in payloads]
    with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, payloads))


# ---------------------------------------------------------------------------
# spectrum
# ---------------------------------------------------------------------------


def cmd_spectrum(cfg, out_dir, workers=1):
    """Write spectrum.csv and spectrum_regression.csv for the grids."""
    kernels = _split(cfg["kernels"])
    d_grid = _split(cfg["d_grid"], int)
    h_grid = _split(cfg["h_grid"], float)
    ell_grid = _split(cfg["ell_grid"], float)
    if not kernels or not d_grid:
        raise ConfigError("kernel list and d_grid must be non-empty")
    for kind in kernels:
        if kind not in ("beta", "rbf", "matern"):
            raise ConfigError(f"unknown kernel {kind!r}")
    if "beta" in kernels and not h_grid:
        raise ConfigError("h_grid must be non-empty for the beta kernel")
    if any(k in ("rbf", "matern") for k in kernels) and not ell_grid:
        raise ConfigError("ell_grid must be non-empty for stationary kernels")

    beta_seed, stationary_seed = np.random.SeedSequence(cfg["seed"]).spawn(2)
    results = []
    if "beta" in kernels:
        reports = decay_report_suite(
            h_grid,
            d_grid,
            seed=beta_seed,
            n_matrices=cfg["n_matrices"],
            n_points=cfg["n_points"],
            floor=cfg["floor"],
        )
        results.extend(
            ("beta", rep.d, rep.kernel.h[0], rep.mean_eigenvalues, rep.regression)
            for rep in reports
        )
    stationary = [k for k in kernels if k != "beta"]
    cells = [(k, d, ell) for k in stationary for d in d_grid for ell in ell_grid]
    for (kind, d, ell), child in zip(cells, stationary_seed.spawn(max(len(cells), 1))):
        spec = KernelSpec(kind=kind, lengthscale=ell, nu=cfg["nu"])
        lam = expected_spectrum(
            spec, d, n_matrices=cfg["n_matrices"], n_points=cfg["n_points"], seed=child
        )
        results.append((kind, d, ell, lam, eigendecay_regression(lam, floor=cfg["floor"])))

    eig_rows, reg_rows = [], []
    for kind, d, param, lam, reg in results:
        eig_rows.extend(
            (kind, d, _fmt(param), j + 1, _fmt(v)) for j, v in enumerate(lam)
        )
        reg_rows.append(
            (
                kind,
                d,
                _fmt(param),
                _fmt(reg.slope),
                _fmt(reg.intercept),
                _fmt(reg.p_value),
                _fmt(reg.log10_p),
                _fmt(reg.r_squared),
                reg.n_retained,
            )
        )
    _write_csv(
        os.path.join(out_dir, "spectrum.csv"),
        ["kernel", "d", "h_or_ell", "j", "mean_eigenvalue"],
        eig_rows,
    )
    _write_csv(
        os.path.join(out_dir, "spectrum_regression.csv"),
        ["kernel", "d", "h_or_ell", "slope", "intercept", "p_value",
         "log10_p", "r2", "n_retained"],
        reg_rows,
    )
    _log(f"spectrum: wrote {len(reg_rows)} regression rows to {out_dir}", "green")
    return 0


# ---------------------------------------------------------------------------
# optimize / bench
# ---------------------------------------------------------------------------


def _build_black_box(cfg):
    if cfg["external_command"]:
        lower = _split(cfg["external_lower"], float)
        upper = _split(cfg["external_upper"], float)
        if not lower or len(lower) != len(upper):
            raise ConfigError(
                "external_lower/external_upper must list matching bounds"
            )
        box = DomainBox(lower=tuple(lower), upper=tuple(upper))
        return subprocess_blackbox(cfg["external_command"], box), 5
    spec = BenchmarkSpec(
        name=cfg["function"],
        d=cfg["dimension"],
        setting=cfg["setting"],
        margin=cfg["margin"],
    )
    return make_benchmark(spec), 3 * spec.d


def _hyperfit_from(cfg):
    return HyperfitPolicy(
        refit_every=cfg["refit_every"],
        restarts=cfg["restarts"],
        warm_start=cfg["warm_start"],
        maxfev=cfg["maxfev"] or None,
        noise_var=cfg["noise_var"],
        learn_noise=cfg["learn_noise"],
    )


def _acq_from(cfg):
    return AcquisitionSpec(kind=cfg["acquisition"], beta_t=cfg["beta_t"], xi=cfg["xi"])


def _write_trajectory(path, trajectory):
    d = trajectory.records[0].x_unit.size if trajectory.records else 0
    header = (
        ["iter"]
        + [f"x_unit_{i}" for i in range(d)]
        + [f"x_raw_{i}" for i in range(d)]
        + ["y", "best", "delta_boundary"]
    )
    rows = [
        [r.index]
        + [_fmt(v) for v in r.x_unit]
        + [_fmt(v) for v in r.x_raw]
        + [_fmt(r.y), _fmt(r.best), _fmt(r.boundary)]
        for r in trajectory.records
    ]
    _write_csv(path, header, rows)


def _optimize_job(payload):
    cfg, out_dir, seed, kernel = payload
    black_box, auto_init = _build_black_box(cfg)
    n_init = cfg["n_init"] or auto_init
    try:
        trajectory = run_bo(
            black_box,
            kernel_kind=kernel,
            acq=_acq_from(cfg),
            n_init=n_init,
            n_iter=cfg["n_iter"],
            seed=seed,
            hyperfit=_hyperfit_from(cfg),
            nu=cfg["nu"],
        )
    except BlackBoxRunError as err:
        if out_dir is not None:
            _write_trajectory(
                os.path.join(out_dir, f"trajectory_{seed}.csv"), err.trajectory
            )
        return {"seed": seed, "ok": False, "error": str(err)}
    if out_dir is not None:
        _write_trajectory(os.path.join(out_dir, f"trajectory_{seed}.csv"), trajectory)
    return {"seed": seed, "ok": True, "trajectory": trajectory}


def cmd_optimize(cfg, out_dir, workers=1):
    """Run one benchmark/external objective across seeds; write CSVs."""
    seeds = _split(cfg["seeds"], int)
    if not seeds:
        raise ConfigError("seeds must be non-empty")
    _build_black_box(cfg)  # validate before spawning workers
    payloads = [(cfg, out_dir, seed, cfg["kernel"]) for seed in seeds]
    results = _map_jobs(_optimize_job, payloads, workers)

    failures = [r for r in results if not r["ok"]]
    if failures:
        for r in failures:
            _log(f"seed {r['seed']}: {r['error']}", "red")
        return 3
    summary = summarize([r["trajectory"] for r in results])
    setting = 0 if cfg["external_command"] else cfg["setting"]
    _write_csv(
        os.path.join(out_dir, "summary.csv"),
        ["kernel", "acq", "setting", "mean_final_best", "stderr"],
        [(cfg["kernel"], cfg["acquisition"], setting,
          _fmt(summary.mean_final_best), _fmt(summary.stderr))],
    )
    _log(
        f"optimize: {len(seeds)} seed(s), mean final best "
        f"{summary.mean_final_best:.6g} +/- {summary.stderr:.3g}",
        "green",
    )
    return 0


def _bench_job(payload):
    cfg, function, setting, kernel, seed = payload
    sub = dict(cfg)
    sub.update(
        {
            "function": function,
            "setting": setting,
            "kernel": kernel,
            "external_command": "",
            "external_lower": "",
            "external_upper": "",
        }
    )
    result = _optimize_job((sub, None, seed, kernel))
    if result["ok"]:
        return {"ok": True, "final_best": result["trajectory"].final_best}
    return {"ok": False, "error": result["error"]}


def cmd_bench(cfg, out_dir, workers=1):
    """Run the (function x setting x kernel x seed) grid; write one CSV."""
    functions = _split(cfg["functions"])
    settings = _split(cfg["settings"], int)
    kernels = _split(cfg["kernels"])
    seeds = _split(cfg["seeds"], int)
    if not functions or not settings or not kernels or not seeds:
        raise ConfigError("functions, settings, kernels, and seeds must be non-empty")

    cells = [
        (function, setting, kernel)
        for function in functions
        for setting in settings
        for kernel in kernels
    ]
    payloads = [
        (cfg, function, setting, kernel, seed)
        for (function, setting, kernel) in cells
        for seed in seeds
    ]
    results = _map_jobs(_bench_job, payloads, workers)

    rows = []
    idx = 0
    for function, setting, kernel in cells:
        cell = results[idx : idx + len(seeds)]
        idx += len(seeds)
        errors = [r["error"] for r in cell if not r["ok"]]
        if errors:
            rows.append(
                (function, cfg["dimension"], setting, kernel, cfg["acquisition"],
                 len(seeds), "", "", f"failed: {errors[0]}")
            )
            _log(f"{function} s{setting} {kernel}: FAILED ({errors[0]})", "red")
            continue
        finals = np.array([r["final_best"] for r in cell])
        stderr = float(np.std(finals, ddof=1) / np.sqrt(len(finals))) if len(finals) > 1 else 0.0
        rows.append(
            (function, cfg["dimension"], setting, kernel, cfg["acquisition"],
             len(seeds), _fmt(float(np.mean(finals))), _fmt(stderr), "ok")
        )
        _log(
            f"{function} s{setting} {kernel}: {np.mean(finals):.6g} +/- {stderr:.3g}"
        )
    _write_csv(
        os.path.join(out_dir, "table2_style.csv"),
        ["function", "d", "setting", "kernel", "acq", "n_seeds",
         "mean_final_best", "stderr", "status"],
        rows,
    )
    _log(f"bench: wrote {len(rows)} cells to {out_dir}", "green")
    return 0


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="betabo",
        description="Beta-kernel Bayesian optimization toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("spectrum", "eigenvalue-decay tables over kernel/dimension grids"),
        ("optimize", "BO runs on a benchmark or external objective"),
        ("bench", "full function x setting x kernel x seed comparison"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="INI config file")
        p.add_argument(
            "--set",
            dest="overrides",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="override one config key",
        )
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--workers", type=int, default=1, help="parallel jobs")
    return parser


_COMMANDS = {"spectrum": cmd_spectrum, "optimize": cmd_optimize, "bench": cmd_bench}


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        cfg = load_config(args.command, args.config, args.overrides)
        os.makedirs(args.out, exist_ok=True)
        return _COMMANDS[args.command](cfg, args.out, max(args.workers, 1))
    except ConfigError as err:
        _log(f"config error: {err}", "red")
        return 2
    except BlackBoxRunError as err:
        _log(f"black-box error: {err}", "red")
        return 3
    except (ValueError, RuntimeError) as err:
        _log(f"error: {err}", "red")
        return 3


def entrypoint():
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
