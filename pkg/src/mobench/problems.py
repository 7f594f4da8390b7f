"""Bi-objective benchmark problems exposed uniformly on the unit cube.

Suites: ZDT (1,2,3,4,6), DTLZ (1-7, two objectives, k = d-1 distance
variables), and six 2-D problems from the CEC'19 multimodal multiobjective
collection (MMF). Evaluation maps the unit-cube point affinely onto each
problem's native box before applying the published formula; both objectives
are minimized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DomainError, UnknownProblemError

__all__ = [
    "ProblemId",
    "NativeBounds",
    "evaluate",
    "native_bounds",
    "list_problems",
    "parse_problem_id",
]

_VALID_INDICES = {"zdt": (1, 2, 3, 4, 6), "dtlz": (1, 2, 3, 4, 5, 6, 7), "mmf": (1, 2, 4, 5, 7, 8)}
_VALID_DIMS = {"zdt": (2, 10), "dtlz": (2, 10), "mmf": (2,)}


@dataclass(frozen=True)
class ProblemId:
    suite: str
    index: int
    dim: int

    def __post_init__(self):
        if self.suite not in _VALID_INDICES:
            raise UnknownProblemError(f"unknown suite {self.suite!r}")
        if self.index not in _VALID_INDICES[self.suite]:
            raise UnknownProblemError(f"unknown problem {self.suite}{self.index}")
        if self.dim not in _VALID_DIMS[self.suite]:
            raise UnknownProblemError(
                f"{self.suite}{self.index} does not support dim {self.dim}"
            )

    def __str__(self) -> str:
        return f"{self.suite}{self.index}-d{self.dim}"


@dataclass(frozen=True)
class NativeBounds:
    lower: np.ndarray
    upper: np.ndarray


def parse_problem_id(text: str) -> ProblemId:
    """Parse ids of the form 'zdt1-d2', 'dtlz3-d10', 'mmf4-d2'."""
    try:
        name, dim_part = text.strip().lower().split("-d")
        dim = int(dim_part)
        for suite in _VALID_INDICES:
            if name.startswith(suite):
                return ProblemId(suite, int(name[len(suite):]), dim)
    except (ValueError, UnknownProblemError):
        pass
    raise UnknownProblemError(f"cannot parse problem id {text!r}")


def list_problems() -> list[ProblemId]:
    """All valid problems in stable (suite, index, dim) order."""
    out = []
    for suite, indices in _VALID_INDICES.items():
        for index in indices:
            for dim in _VALID_DIMS[suite]:
                out.append(ProblemId(suite, index, dim))
    return out


# --- ZDT ---------------------------------------------------------------


def _zdt1(x):
    f1 = x[0]
    g = 1.0 + 9.0 * float(np.sum(x[1:])) / (len(x) - 1)
    return f1, g * (1.0 - math.sqrt(f1 / g))


def _zdt2(x):
    f1 = x[0]
    g = 1.0 + 9.0 * float(np.sum(x[1:])) / (len(x) - 1)
    return f1, g * (1.0 - (f1 / g) ** 2)


def _zdt3(x):
    f1 = x[0]
    g = 1.0 + 9.0 * float(np.sum(x[1:])) / (len(x) - 1)
    r = f1 / g
    return f1, g * (1.0 - math.sqrt(r) - r * math.sin(10.0 * math.pi * f1))


def _zdt4(x):
    f1 = x[0]
    tail = x[1:]
    g = 1.0 + 10.0 * (len(x) - 1) + float(
        np.sum(tail * tail - 10.0 * np.cos(4.0 * math.pi * tail))
    )
    return f1, g * (1.0 - math.sqrt(f1 / g))


def _zdt6(x):
    f1 = 1.0 - math.exp(-4.0 * x[0]) * math.sin(6.0 * math.pi * x[0]) ** 6
    g = 1.0 + 9.0 * (float(np.sum(x[1:])) / (len(x) - 1)) ** 0.25
    return f1, g * (1.0 - (f1 / g) ** 2)


# --- DTLZ with two objectives (k = d - 1 distance variables) -------------


def _dtlz_g1(tail):
    k = len(tail)
    return 100.0 * (
        k + float(np.sum((tail - 0.5) ** 2 - np.cos(20.0 * math.pi * (tail - 0.5))))
    )


def _dtlz1(x):
    g = _dtlz_g1(x[1:])
    return 0.5 * x[0] * (1.0 + g), 0.5 * (1.0 - x[0]) * (1.0 + g)


def _dtlz2(x):
    g = float(np.sum((x[1:] - 0.5) ** 2))
    angle = 0.5 * math.pi * x[0]
    return (1.0 + g) * math.cos(angle), (1.0 + g) * math.sin(angle)


def _dtlz3(x):
    g = _dtlz_g1(x[1:])
    angle = 0.5 * math.pi * x[0]
    return (1.0 + g) * math.cos(angle), (1.0 + g) * math.sin(angle)


def _dtlz4(x, alpha=100.0):
    g = float(np.sum((x[1:] - 0.5) ** 2))
    angle = 0.5 * math.pi * x[0] ** alpha
    return (1.0 + g) * math.cos(angle), (1.0 + g) * math.sin(angle)


def _dtlz5(x):
    # with two objectives the theta mapping leaves the first angle untouched
    return _dtlz2(x)


def _dtlz6(x):
    g = float(np.sum(x[1:] ** 0.1))
    angle = 0.5 * math.pi * x[0]
    return (1.0 + g) * math.cos(angle), (1.0 + g) * math.sin(angle)


def _dtlz7(x):
    g = 1.0 + 9.0 * float(np.mean(x[1:]))
    f1 = x[0]
    h = 2.0 - f1 / (1.0 + g) * (1.0 + math.sin(3.0 * math.pi * f1))
    return f1, (1.0 + g) * h


# --- MMF (CEC'19 multimodal multiobjective selection) ---------------------


def _mmf1(x):
    f1 = abs(x[0] - 2.0)
    return f1, 1.0 - math.sqrt(f1) + 2.0 * (x[1] - math.sin(6.0 * math.pi * f1 + math.pi)) ** 2


def _mmf2(x):
    f1 = x[0]
    root = math.sqrt(x[0])
    y2 = x[1] - root if x[1] < 1.0 else x[1] - 1.0 - root
    return f1, 1.0 - root + 2.0 * (
        4.0 * y2 * y2 - 2.0 * math.cos(20.0 * y2 * math.pi / math.sqrt(2.0)) + 2.0
    )


def _mmf4(x):
    f1 = abs(x[0])
    y2 = x[1] - math.sin(math.pi * f1) if x[1] < 1.0 else x[1] - 1.0 - math.sin(math.pi * f1)
    return f1, 1.0 - x[0] * x[0] + 2.0 * y2 * y2


def _mmf5(x):
    f1 = abs(x[0] - 2.0)
    s = math.sin(6.0 * math.pi * f1 + math.pi)
    y2 = x[1] - s if x[1] < 1.0 else x[1] - 1.0 - s
    return f1, 1.0 - math.sqrt(f1) + 2.0 * y2 * y2


def _mmf7(x):
    f1 = abs(x[0] - 2.0)
    amp = 0.3 * f1 * f1 * math.cos(24.0 * math.pi * f1 + 4.0 * math.pi) + 0.6 * f1
    return f1, 1.0 - math.sqrt(f1) + (x[1] - amp * math.sin(6.0 * math.pi * f1 + math.pi)) ** 2


def _mmf8(x):
    s = math.sin(abs(x[0]))
    f1 = s
    base = s + abs(x[0])
    y2 = x[1] - base if x[1] < 4.0 else x[1] - 4.0 - base
    return f1, math.sqrt(max(1.0 - s * s, 0.0)) + 2.0 * y2 * y2


_EVALUATORS = {
    ("zdt", 1): _zdt1,
    ("zdt", 2): _zdt2,
    ("zdt", 3): _zdt3,
    ("zdt", 4): _zdt4,
    ("zdt", 6): _zdt6,
    ("dtlz", 1): _dtlz1,
    ("dtlz", 2): _dtlz2,
    ("dtlz", 3): _dtlz3,
    ("dtlz", 4): _dtlz4,
    ("dtlz", 5): _dtlz5,
    ("dtlz", 6): _dtlz6,
    ("dtlz", 7): _dtlz7,
    ("mmf", 1): _mmf1,
    ("mmf", 2): _mmf2,
    ("mmf", 4): _mmf4,
    ("mmf", 5): _mmf5,
    ("mmf", 7): _mmf7,
    ("mmf", 8): _mmf8,
}

_MMF_BOUNDS = {
    1: ([1.0, -1.0], [3.0, 1.0]),
    2: ([0.0, 0.0], [1.0, 2.0]),
    4: ([-1.0, 0.0], [1.0, 2.0]),
    5: ([1.0, -1.0], [3.0, 3.0]),
    7: ([1.0, -1.0], [3.0, 1.0]),
    8: ([-math.pi, 0.0], [math.pi, 9.0]),
}


def _build_bounds(pid: ProblemId) -> NativeBounds:
    if pid.suite == "mmf":
        lower, upper = _MMF_BOUNDS[pid.index]
        return NativeBounds(np.array(lower), np.array(upper))
    if pid.suite == "zdt" and pid.index == 4:
        lower = np.full(pid.dim, -5.0)
        upper = np.full(pid.dim, 5.0)
        lower[0], upper[0] = 0.0, 1.0
        return NativeBounds(lower, upper)
    return NativeBounds(np.zeros(pid.dim), np.ones(pid.dim))


_BOUNDS_CACHE: dict[ProblemId, NativeBounds] = {}


def native_bounds(pid: ProblemId) -> NativeBounds:
    """Published variable bounds of the problem's native search space."""
    cached = _BOUNDS_CACHE.get(pid)
    if cached is None:
        cached = _BOUNDS_CACHE[pid] = _build_bounds(pid)
        cached.lower.setflags(write=False)
        cached.upper.setflags(write=False)
    return cached


def evaluate(pid: ProblemId, x_unit) -> tuple[float, float]:
    """Evaluate a problem at a unit-cube point.

    Args:
        pid: Problem identity (suite, index, search dimension).
        x_unit: Point in [0,1]^dim.

    Returns:
        Objective pair (f1, f2), minimization convention.
    """
    x = np.asarray(x_unit, dtype=float)
    if x.shape != (pid.dim,):
        raise DimensionError(f"expected shape ({pid.dim},), got {x.shape}")
    if not ((x >= 0.0) & (x <= 1.0)).all():  # also catches NaN
        if not np.all(np.isfinite(x)):
            raise DomainError("point coordinates must be finite")
        raise DomainError("point coordinates must lie in [0, 1]")
    bounds = native_bounds(pid)
    native = bounds.lower + x * (bounds.upper - bounds.lower)
    f1, f2 = _EVALUATORS[(pid.suite, pid.index)](native)
    return float(f1), float(f2)
