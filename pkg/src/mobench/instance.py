"""Composition of a base problem with search- and objective-space transforms.

An instance evaluates a point the algorithm proposes (x_seen) by warping it
into the base problem's unit cube, evaluating there, and optionally warping
the objective values the algorithm gets to see. Both the warped and the
original objectives are recorded; all indicator computation downstream uses
the original ones.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, NumericError, ParameterError
from .problems import ProblemId, evaluate
from .specfun import inv_reg_inc_beta, reg_inc_beta
from .transforms import BETA_CDF, IDENTITY, SPHERED_ROTATION, TransformSpec, apply_forward

__all__ = [
    "ProblemInstance",
    "EvaluationRecord",
    "evaluate_instance",
    "evaluate_instance_batch",
    "warp_objectives",
    "unwarp_objectives",
]


@dataclass(frozen=True)
class ProblemInstance:
    """A base problem plus one transform per space, evaluable on [0,1]^d."""

    problem: ProblemId
    search_t: TransformSpec
    objective_t: TransformSpec

    def __post_init__(self):
        if self.objective_t.kind not in (IDENTITY, BETA_CDF):
            raise ParameterError(
                f"objective transform must be identity or beta_cdf, got {self.objective_t.kind}"
            )
        if (
            self.search_t.kind == SPHERED_ROTATION
            and self.search_t.rotation.dim != self.problem.dim
        ):
            raise DimensionError(
                f"search rotation dim {self.search_t.rotation.dim} does not match "
                f"problem dim {self.problem.dim}"
            )

    @property
    def descriptor(self) -> str:
        return f"{self.problem}__s:{self.search_t.descriptor()}__o:{self.objective_t.descriptor()}"

    @property
    def is_base(self) -> bool:
        """True when both transforms act as the identity."""
        return self.search_t.is_neutral and self.objective_t.is_neutral


@dataclass(frozen=True, slots=True)
class EvaluationRecord:
    """One evaluation as logged: algorithm view plus original objectives."""

    eval_index: int
    x_seen: np.ndarray
    f_seen: tuple[float, float]
    f_original: tuple[float, float]


def _check_finite_pair(f) -> tuple[float, float]:
    a, b = float(f[0]), float(f[1])
    if not (a == a and b == b and abs(a) != float("inf") and abs(b) != float("inf")):
        raise NumericError(f"objective pair must be finite, got {f!r}")
    return a, b


def warp_objectives(t: TransformSpec, f) -> tuple[float, float]:
    """Warp an objective pair through a Beta CDF on the unit region.

    Components inside [0, 1] pass through the CDF; components outside pass
    through unchanged, which keeps the map continuous (the CDF fixes 0 and 1)
    and strictly increasing, so dominance relations are preserved.
    """
    a, b = _check_finite_pair(f)
    if t.kind == IDENTITY:
        return a, b
    if t.kind != BETA_CDF:
        raise ParameterError(f"objective transform must be identity or beta_cdf, got {t.kind}")
    if 0.0 <= a <= 1.0:
        a = reg_inc_beta(a, t.shape)
    if 0.0 <= b <= 1.0:
        b = reg_inc_beta(b, t.shape)
    return a, b


def unwarp_objectives(t: TransformSpec, f_seen) -> tuple[float, float]:
    """Invert warp_objectives (percent point function on the unit region)."""
    a, b = _check_finite_pair(f_seen)
    if t.kind == IDENTITY:
        return a, b
    if t.kind != BETA_CDF:
        raise ParameterError(f"objective transform must be identity or beta_cdf, got {t.kind}")
    if 0.0 <= a <= 1.0:
        a = inv_reg_inc_beta(a, t.shape)
    if 0.0 <= b <= 1.0:
        b = inv_reg_inc_beta(b, t.shape)
    return a, b


def evaluate_instance(inst: ProblemInstance, x_seen, eval_index: int) -> EvaluationRecord:
    """Evaluate one algorithm-space point.

    Args:
        inst: The composed instance.
        x_seen: Point in [0,1]^d as proposed by the algorithm.
        eval_index: 1-based position of this evaluation in the run log.

    Returns:
        The full evaluation record (x_seen is copied).
    """
    x = np.array(x_seen, dtype=float)
    x_inner = apply_forward(inst.search_t, x)
    f_original = evaluate(inst.problem, x_inner)
    f_seen = warp_objectives(inst.objective_t, f_original)
    return EvaluationRecord(eval_index, x, f_seen, f_original)


def evaluate_instance_batch(
    inst: ProblemInstance, x_seen: np.ndarray, start_index: int
) -> list[EvaluationRecord]:
    """Evaluate a batch of points, assigning consecutive eval indices.

    Equivalent to calling evaluate_instance row by row with indices
    start_index, start_index+1, ... but warps the whole batch at once.
    """
    pts = np.asarray(x_seen, dtype=float)
    if pts.ndim != 2:
        raise DimensionError(f"expected a (n, d) batch, got shape {pts.shape}")
    inner = apply_forward(inst.search_t, pts)
    f_orig = np.empty((len(pts), 2))
    for i, row in enumerate(inner):
        f_orig[i] = evaluate(inst.problem, row)
    if not np.all(np.isfinite(f_orig)):
        raise NumericError("objective values must be finite")
    if inst.objective_t.kind == IDENTITY:
        f_seen = f_orig
    else:
        f_seen = f_orig.copy()
        mask = (f_orig >= 0.0) & (f_orig <= 1.0)
        if mask.any():
            f_seen[mask] = reg_inc_beta(f_orig[mask], inst.objective_t.shape)
    return [
        EvaluationRecord(
            start_index + i,
            pts[i].copy(),
            (float(f_seen[i, 0]), float(f_seen[i, 1])),
            (float(f_orig[i, 0]), float(f_orig[i, 1])),
        )
        for i in range(len(pts))
    ]
