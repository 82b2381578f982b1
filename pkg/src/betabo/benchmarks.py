"""Synthetic benchmark functions, domain boxes, and optima-location settings.

Each benchmark has a canonical box and a known first optimum.  Three settings
control where that optimum sits inside the box that the optimizer sees:

  1. the canonical box (optimum near the center),
  2. dimension 1 cropped so the optimum sits at relative position eps of the
     width (near a face),
  3. every dimension cropped the same way (near a vertex).

Cropping moves lower bounds only; upper bounds stay canonical.  The module
also hosts the generic black-box interface, including a subprocess protocol
(point on stdin, one value on stdout) for external objectives.
"""

import shlex
import subprocess
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

__all__ = [
    "DomainBox",
    "BenchmarkSpec",
    "BlackBox",
    "BlackBoxError",
    "InfeasibleSettingError",
    "BENCHMARK_NAMES",
    "evaluate_function",
    "canonical_domain",
    "first_optimum",
    "shift_domain",
    "make_benchmark",
    "subprocess_blackbox",
    "to_unit",
    "from_unit",
    "boundary_distance",
    "partition_volumes",
]


class BlackBoxError(RuntimeError):
    """An objective evaluation failed (bad subprocess exit, garbage output)."""


class InfeasibleSettingError(ValueError):
    """Requested optimum placement falls outside the canonical domain."""


@dataclass(frozen=True)
class DomainBox:
    """Per-dimension bounds [lower_i, upper_i] of a raw search domain."""

    lower: tuple
    upper: tuple

    def __post_init__(self):
        lo = tuple(float(v) for v in np.atleast_1d(self.lower))
        hi = tuple(float(v) for v in np.atleast_1d(self.upper))
        if len(lo) != len(hi):
            raise ValueError("lower and upper bounds must have equal length")
        if not all(a < b for a, b in zip(lo, hi)):
            raise ValueError("need lower < upper in every dimension")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def dim(self):
        return len(self.lower)

    def lower_array(self):
        return np.asarray(self.lower)

    def upper_array(self):
        return np.asarray(self.upper)


@dataclass(frozen=True)
class BenchmarkSpec:
    """A named benchmark at a dimension, optima-location setting, and margin."""

    name: str
    d: int
    setting: int = 1
    margin: float = 0.05

    def __post_init__(self):
        object.__setattr__(self, "name", _canonical_name(self.name))
        if self.d < 1:
            raise ValueError("dimension must be >= 1")
        if self.setting not in (1, 2, 3):
            raise ValueError("setting must be 1, 2, or 3")
        if not 0.0 < self.margin < 0.5:
            raise ValueError("margin must lie in (0, 0.5)")
        _check_dimension(self.name, self.d)


@dataclass(frozen=True)
class BlackBox:
    """Minimization objective over a raw box, with optional known optimum."""

    evaluate: Callable[[np.ndarray], float]
    domain: DomainBox
    known_optimum: Optional[tuple] = None
    name: str = ""


# ---------------------------------------------------------------------------
# benchmark functions
# ---------------------------------------------------------------------------

BENCHMARK_NAMES = (
    "levy",
    "griewank",
    "ackley",
    "branin_repeated",
    "hartmann6_repeated",
)

_ALIASES = {
    "branin": "branin_repeated",
    "hartmann": "hartmann6_repeated",
    "hartmann6": "hartmann6_repeated",
    "braninrepeated": "branin_repeated",
    "hartmann6repeated": "hartmann6_repeated",
}


def _canonical_name(name):
    key = name.strip().lower().replace("-", "_")
    key = _ALIASES.get(key, key)
    if key not in BENCHMARK_NAMES:
        raise ValueError(f"unknown benchmark {name!r}; choose from {BENCHMARK_NAMES}")
    return key


def _check_dimension(name, d):
    if name == "branin_repeated" and d % 2 != 0:
        raise ValueError("branin_repeated requires an even dimension")
    if name == "hartmann6_repeated" and d < 6:
        raise ValueError("hartmann6_repeated requires d >= 6")


def _levy(x):
    w = 1.0 + (x - 1.0) / 4.0
    head = np.sin(np.pi * w[0]) ** 2
    tail = (w[-1] - 1.0) ** 2 * (1.0 + np.sin(2.0 * np.pi * w[-1]) ** 2)
    mid = np.sum((w[:-1] - 1.0) ** 2 * (1.0 + 10.0 * np.sin(np.pi * w[:-1] + 1.0) ** 2))
    return float(head + mid + tail)


def _griewank(x):
    i = np.arange(1, x.size + 1)
    return float(np.sum(x * x) / 4000.0 - np.prod(np.cos(x / np.sqrt(i))) + 1.0)


def _ackley(x):
    d = x.size
    return float(
        -20.0 * np.exp(-0.2 * np.sqrt(np.sum(x * x) / d))
        - np.exp(np.sum(np.cos(2.0 * np.pi * x)) / d)
        + 20.0
        + np.e
    )


_BRANIN_B = 5.1 / (4.0 * np.pi**2)
_BRANIN_C = 5.0 / np.pi
_BRANIN_T = 1.0 / (8.0 * np.pi)
# Standard optimizers in lexicographic order; the first is the canonical x*.
_BRANIN_OPTIMA = ((-np.pi, 12.275), (np.pi, 2.275), (9.42478, 2.475))


def _branin2(x1, x2):
    return (
        (x2 - _BRANIN_B * x1**2 + _BRANIN_C * x1 - 6.0) ** 2
        + 10.0 * (1.0 - _BRANIN_T) * np.cos(x1)
        + 10.0
    )


def _branin_repeated(x):
    return float(sum(_branin2(x[k], x[k + 1]) for k in range(0, x.size, 2)))


_HARTMANN6_ALPHA = np.array([1.0, 1.2, 3.0, 3.2])
_HARTMANN6_A = np.array(
    [
        [10.0, 3.0, 17.0, 3.5, 1.7, 8.0],
        [0.05, 10.0, 17.0, 0.1, 8.0, 14.0],
        [3.0, 3.5, 1.7, 10.0, 17.0, 8.0],
        [17.0, 8.0, 0.05, 10.0, 0.1, 14.0],
    ]
)
_HARTMANN6_P = 1e-4 * np.array(
    [
        [1312, 1696, 5569, 124, 8283, 5886],
        [2329, 4135, 8307, 3736, 1004, 9991],
        [2348, 1451, 3522, 2883, 3047, 6650],
        [4047, 8828, 8732, 5743, 1091, 381],
    ]
)
_HARTMANN6_XSTAR = (0.20169, 0.150011, 0.476874, 0.275332, 0.311652, 0.6573)


def _hartmann6(x6):
    inner = np.sum(_HARTMANN6_A * (x6[None, :] - _HARTMANN6_P) ** 2, axis=1)
    return float(-np.sum(_HARTMANN6_ALPHA * np.exp(-inner)))


def _hartmann6_repeated(x):
    # Trailing d % 6 dimensions are inactive padding.
    n_blocks = x.size // 6
    return float(sum(_hartmann6(x[6 * k : 6 * k + 6]) for k in range(n_blocks)))


_EVALUATORS = {
    "levy": _levy,
    "griewank": _griewank,
    "ackley": _ackley,
    "branin_repeated": _branin_repeated,
    "hartmann6_repeated": _hartmann6_repeated,
}


def evaluate_function(name, x_raw):
    """Evaluate a named benchmark at a raw point."""
    key = _canonical_name(name)
    x = np.asarray(x_raw, dtype=float).ravel()
    _check_dimension(key, x.size)
    if x.size < 1:
        raise ValueError("point must have at least one coordinate")
    return _EVALUATORS[key](x)


def canonical_domain(name, d):
    """Standard-literature box for a named benchmark at dimension d."""
    key = _canonical_name(name)
    _check_dimension(key, d)
    if key == "levy":
        lo, hi = [-10.0] * d, [10.0] * d
    elif key == "griewank":
        lo, hi = [-600.0] * d, [600.0] * d
    elif key == "ackley":
        lo, hi = [-32.768] * d, [32.768] * d
    elif key == "branin_repeated":
        lo = [-5.0, 0.0] * (d // 2)
        hi = [10.0, 15.0] * (d // 2)
    else:
        lo, hi = [0.0] * d, [1.0] * d
    return DomainBox(lower=tuple(lo), upper=tuple(hi))


def first_optimum(name, d):
    """Known first global optimizer and its objective value.

    For multi-optimum Branin the lexicographically smallest optimizer is
    used; repeated variants tile the base optimizer over blocks (cyclically
    into any inactive trailing dimensions).
    """
    key = _canonical_name(name)
    _check_dimension(key, d)
    if key == "levy":
        x = np.ones(d)
    elif key in ("griewank", "ackley"):
        x = np.zeros(d)
    elif key == "branin_repeated":
        x = np.resize(np.asarray(_BRANIN_OPTIMA[0]), d)
    else:
        x = np.resize(np.asarray(_HARTMANN6_XSTAR), d)
    return x, evaluate_function(key, x)


def shift_domain(spec):
    """Domain box realizing the spec's optima-location setting.

    Settings 2 and 3 move lower bounds so the first optimum x* sits at
    relative position ``margin`` of the new width: solving
    ``x* - m = margin * (M - m)`` with M held canonical gives
    ``m = (x* - margin * M) / (1 - margin)``.
    """
    box = canonical_domain(spec.name, spec.d)
    if spec.setting == 1:
        return box
    x_star, _ = first_optimum(spec.name, spec.d)
    lo, hi = list(box.lower), box.upper
    dims = range(spec.d) if spec.setting == 3 else (0,)
    for i in dims:
        if x_star[i] > hi[i]:
            raise InfeasibleSettingError(
                f"optimum coordinate {x_star[i]} exceeds upper bound {hi[i]}"
            )
        lo[i] = (x_star[i] - spec.margin * hi[i]) / (1.0 - spec.margin)
        if not lo[i] < x_star[i]:
            raise InfeasibleSettingError(
                f"cannot place optimum at relative position {spec.margin} "
                f"in dimension {i}"
            )
    return DomainBox(lower=tuple(lo), upper=hi)


def make_benchmark(spec):
    """Build the BlackBox for a benchmark spec (function + shifted box)."""
    key = spec.name
    x_star, f_star = first_optimum(key, spec.d)
    return BlackBox(
        evaluate=lambda x: evaluate_function(key, x),
        domain=shift_domain(spec),
        known_optimum=(x_star, f_star),
        name=f"{key}-d{spec.d}-s{spec.setting}",
    )


def subprocess_blackbox(command, domain, name="external"):
    """Wrap an external command as a BlackBox.

    Protocol: the raw point is written to the child's stdin as
    whitespace-separated decimals; the child prints one decimal objective
    value on stdout and exits 0.  Any nonzero exit or unparsable output
    raises :class:`BlackBoxError`.
    """
    argv = shlex.split(command) if isinstance(command, str) else list(command)

    def evaluate(x):
        payload = " ".join(repr(float(v)) for v in np.asarray(x, dtype=float).ravel())
        try:
            proc = subprocess.run(
                argv, input=payload, capture_output=True, text=True, timeout=600
            )
        except OSError as err:
            raise BlackBoxError(f"failed to launch {argv[0]!r}: {err}") from err
        if proc.returncode != 0:
            raise BlackBoxError(
                f"{argv[0]!r} exited with status {proc.returncode}: "
                f"{proc.stderr.strip()[:200]}"
            )
        try:
            return float(proc.stdout.strip().split()[-1])
        except (IndexError, ValueError) as err:
            raise BlackBoxError(
                f"{argv[0]!r} wrote no parsable objective: {proc.stdout!r}"
            ) from err

    return BlackBox(evaluate=evaluate, domain=domain, name=name)


# ---------------------------------------------------------------------------
# unit-cube geometry
# ---------------------------------------------------------------------------


def to_unit(x_raw, box):
    """Map a raw in-box point to the unit hypercube."""
    x = np.asarray(x_raw, dtype=float).ravel()
    lo, hi = box.lower_array(), box.upper_array()
    if x.size != box.dim:
        raise ValueError("point dimension does not match the box")
    width = hi - lo
    u = (x - lo) / width
    if np.any(u < -1e-9) or np.any(u > 1.0 + 1e-9):
        raise ValueError("point lies outside the domain box")
    return np.clip(u, 0.0, 1.0)


def from_unit(u, box):
    """Map a unit-hypercube point back to raw coordinates."""
    uu = np.asarray(u, dtype=float).ravel()
    if uu.size != box.dim:
        raise ValueError("point dimension does not match the box")
    if np.any(uu < -1e-9) or np.any(uu > 1.0 + 1e-9):
        raise ValueError("point lies outside the unit hypercube")
    lo, hi = box.lower_array(), box.upper_array()
    return lo + np.clip(uu, 0.0, 1.0) * (hi - lo)


def boundary_distance(u):
    """Normalized L-infinity distance to the boundary: 1 - 2 max|u - 1/2|.

    Equals 1 at the center of the unit cube and 0 on any face.
    """
    uu = np.asarray(u, dtype=float).ravel()
    if np.any(uu < -1e-9) or np.any(uu > 1.0 + 1e-9):
        raise ValueError("point lies outside the unit hypercube")
    return float(max(1.0 - 2.0 * np.max(np.abs(uu - 0.5)), 0.0))


def partition_volumes(d, eps):
    """Volumes of the center / face / vertex partitions of the unit cube.

    Returns ``((1-2e)^d, 1 - (1-2e)^d - (2e)^d, (2e)^d)``; the components
    sum to 1 by construction.
    """
    if d < 1 or int(d) != d:
        raise ValueError("d must be a positive integer")
    if not 0.0 < eps < 0.5:
        raise ValueError("eps must lie in (0, 0.5)")
    v_center = (1.0 - 2.0 * eps) ** d
    v_vertex = (2.0 * eps) ** d
    return v_center, 1.0 - v_center - v_vertex, v_vertex
