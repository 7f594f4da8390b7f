"""Pareto archiving, exact bi-objective hypervolume, and density diagnostics.

The archive keeps every non-dominated original-space objective vector seen
during a run (no capacity bound) together with the evaluation index of its
first attainment. Hypervolume is the exact 2-D sweep; normalization maps
pooled objective extrema onto the unit box with reference point (1, 1).
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import (
    DegenerateBaseError,
    DegenerateNormalizationError,
    DimensionError,
    NumericError,
    ParameterError,
)
from .transforms import TransformSpec, apply_forward

__all__ = [
    "ParetoArchive",
    "NormalizationBox",
    "hypervolume_2d",
    "compute_normalization",
    "normalized_hv",
    "relative_hv",
    "wasserstein_1d",
    "density_change",
]


class ParetoArchive:
    """Unbounded set of mutually non-dominated objective pairs.

    Entries are kept sorted by the first objective (second objective then
    strictly decreasing), which makes insertion O(log n + removed). The
    acceptance history records every inserted (eval_index, f1, f2) so the
    archive state at any evaluation index can be replayed later.
    """

    def __init__(self):
        self._f1: list[float] = []
        self._f2: list[float] = []
        self._idx: list[int] = []
        self.history: list[tuple[int, float, float]] = []

    def __len__(self) -> int:
        return len(self._f1)

    def insert(self, f_original, eval_index: int) -> bool:
        """Insert an objective pair; returns True when accepted.

        Accepted iff no incumbent dominates (or equals) it; dominated
        incumbents are removed.
        """
        f1, f2 = float(f_original[0]), float(f_original[1])
        if not (math.isfinite(f1) and math.isfinite(f2)):
            raise NumericError(f"objective pair must be finite, got {f_original!r}")
        pos = bisect_left(self._f1, f1)
        if pos > 0 and self._f2[pos - 1] <= f2:
            return False
        if pos < len(self._f1) and self._f1[pos] == f1 and self._f2[pos] <= f2:
            return False
        j = pos
        while j < len(self._f1) and self._f2[j] >= f2:
            j += 1
        del self._f1[pos:j], self._f2[pos:j], self._idx[pos:j]
        self._f1.insert(pos, f1)
        self._f2.insert(pos, f2)
        self._idx.insert(pos, eval_index)
        self.history.append((eval_index, f1, f2))
        return True

    def points(self) -> list[tuple[float, float]]:
        return list(zip(self._f1, self._f2))

    def entries(self) -> list[tuple[float, float, int]]:
        """(f1, f2, eval_index of first attainment) per archive member."""
        return list(zip(self._f1, self._f2, self._idx))


@dataclass(frozen=True)
class NormalizationBox:
    ideal: tuple[float, float]
    nadir: tuple[float, float]

    def __post_init__(self):
        if not (self.ideal[0] < self.nadir[0] and self.ideal[1] < self.nadir[1]):
            raise DegenerateNormalizationError(
                f"ideal {self.ideal} must be strictly below nadir {self.nadir}"
            )


def hypervolume_2d(points, ref) -> float:
    """Exact hypervolume of a 2-D minimization point set.

    Lebesgue measure of the union of boxes [f1, ref1] x [f2, ref2], by
    lexicographic sort and staircase sweep; points with any component at or
    beyond the reference contribute nothing.
    """
    r1, r2 = float(ref[0]), float(ref[1])
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(pts):
        pts = pts[(pts[:, 0] < r1) & (pts[:, 1] < r2)]
    if not len(pts):
        return 0.0
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    f1 = pts[order, 0]
    f2 = pts[order, 1]
    keep = np.empty(len(f2), dtype=bool)
    keep[0] = True
    keep[1:] = f2[1:] < np.minimum.accumulate(f2)[:-1]
    s1, s2 = f1[keep], f2[keep]
    widths = np.append(s1[1:], r1) - s1
    return float(np.sum(widths * (r2 - s2)))


def compute_normalization(fronts: Iterable[Iterable]) -> NormalizationBox:
    """Extrema of the globally non-dominated subset of all runs' fronts.

    Pooling re-filters the union, so the box spans the best front attained
    across every run rather than the spread of individual archives; without
    the re-filter the nadir blows up on problems with large objective ranges
    and normalized hypervolume saturates for every algorithm.

    Args:
        fronts: One point collection per run (each already non-dominated).

    Returns:
        Ideal/nadir box spanning the pooled non-dominated set.
    """
    pooled = ParetoArchive()
    seen = False
    for front in fronts:
        for f in front:
            seen = True
            pooled.insert(f, 0)
    if not seen:
        raise DegenerateNormalizationError("no points to normalize")
    pts = np.asarray(pooled.points())
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    return NormalizationBox(ideal=(float(lo[0]), float(lo[1])), nadir=(float(hi[0]), float(hi[1])))


def normalized_hv(points, box: NormalizationBox) -> float:
    """Hypervolume after affine normalization into the unit box, ref (1, 1).

    Points with any normalized component above 1 are dropped; components are
    floored at 0 so the result always lies in [0, 1].
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if not len(pts):
        return 0.0
    ideal = np.array(box.ideal)
    extent = np.array(box.nadir) - ideal
    scaled = (pts - ideal) / extent
    scaled = scaled[(scaled <= 1.0).all(axis=1)]
    return min(1.0, hypervolume_2d(np.maximum(scaled, 0.0), (1.0, 1.0)))


def relative_hv(transformed_hv: float, base_hv: float) -> float:
    """Ratio of an instance's hypervolume to its untransformed base value."""
    if not base_hv > 0.0:
        raise DegenerateBaseError(f"base hypervolume must be positive, got {base_hv}")
    return transformed_hv / base_hv


def wasserstein_1d(a, b) -> float:
    """W1 distance of two equal-size empirical samples (sorted mean |diff|)."""
    xa = np.sort(np.asarray(a, dtype=float))
    xb = np.sort(np.asarray(b, dtype=float))
    if xa.shape != xb.shape or xa.ndim != 1 or xa.size == 0:
        raise DimensionError(
            f"samples must be equal-size non-empty 1-D, got {np.shape(a)} and {np.shape(b)}"
        )
    return float(np.mean(np.abs(xa - xb)))


def _pairwise_distances(pts: np.ndarray) -> np.ndarray:
    diff = pts[:, np.newaxis, :] - pts[np.newaxis, :, :]
    dist = np.sqrt(np.sum(diff * diff, axis=-1))
    iu = np.triu_indices(len(pts), k=1)
    return dist[iu]


def density_change(t: TransformSpec, n: int, dim: int, seed: int) -> float:
    """Wasserstein distance between pairwise distances before/after a warp.

    Samples n uniform points in [0,1]^dim, applies the transform, and
    compares the two pairwise-distance samples. Zero exactly for isometries
    of the construction (identity, right-angle sphered rotations).
    """
    if n < 2:
        raise ParameterError(f"need at least 2 points, got {n}")
    pts = np.random.default_rng(seed).random((n, dim))
    before = _pairwise_distances(pts)
    after = _pairwise_distances(apply_forward(t, pts))
    return wasserstein_1d(before, after)
