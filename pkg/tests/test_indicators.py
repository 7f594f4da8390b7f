"""Tests for archiving, hypervolume, normalization, and density diagnostics."""

import math

import numpy as np
import pytest

from mobench.errors import (
    DegenerateBaseError,
    DegenerateNormalizationError,
    DimensionError,
    NumericError,
    ParameterError,
)
from mobench.indicators import (
    NormalizationBox,
    ParetoArchive,
    compute_normalization,
    density_change,
    hypervolume_2d,
    normalized_hv,
    relative_hv,
    wasserstein_1d,
)
from mobench.transforms import TransformSpec, rotation_matrix_2d


def brute_force_front(points):
    """O(n^2) non-dominated filter with first-attainment indices."""
    front = {}
    for i, p in enumerate(points, start=1):
        p = (float(p[0]), float(p[1]))
        dominated = any(
            q[0] <= p[0] and q[1] <= p[1] and q != p for q in front
        ) or p in front
        if dominated:
            continue
        for q in list(front):
            if p[0] <= q[0] and p[1] <= q[1] and p != q:
                del front[q]
        front[p] = i
    return front


class TestArchive:
    def test_insert_into_empty(self):
        a = ParetoArchive()
        assert a.insert((1.0, 1.0), 1)
        assert a.points() == [(1.0, 1.0)]

    def test_dominated_rejected(self):
        a = ParetoArchive()
        a.insert((1.0, 1.0), 1)
        assert not a.insert((2.0, 2.0), 2)
        assert a.points() == [(1.0, 1.0)]

    def test_dominating_removes_both(self):
        a = ParetoArchive()
        a.insert((0.0, 1.0), 1)
        a.insert((1.0, 0.0), 2)
        assert a.insert((0.0, 0.0), 3)
        assert a.points() == [(0.0, 0.0)]
        assert a.entries() == [(0.0, 0.0, 3)]

    def test_duplicates_not_duplicated(self):
        a = ParetoArchive()
        assert a.insert((0.5, 0.5), 1)
        assert not a.insert((0.5, 0.5), 2)
        assert a.entries() == [(0.5, 0.5, 1)]

    def test_matches_brute_force(self):
        rng = np.random.default_rng(3)
        for trial in range(20):
            # quantized coordinates force duplicates and ties
            pts = np.round(rng.random((300, 2)) * 20) / 20
            a = ParetoArchive()
            for i, p in enumerate(pts, start=1):
                a.insert(p, i)
            expected = brute_force_front(pts)
            assert dict(((f1, f2), i) for f1, f2, i in a.entries()) == expected

    def test_non_finite_rejected(self):
        a = ParetoArchive()
        with pytest.raises(NumericError):
            a.insert((float("nan"), 1.0), 1)

    def test_history_replay(self):
        rng = np.random.default_rng(5)
        pts = rng.random((500, 2))
        a = ParetoArchive()
        for i, p in enumerate(pts, start=1):
            a.insert(p, i)
        # replaying accepted points reconstructs every prefix front
        for cut in (10, 100, 500):
            replay = ParetoArchive()
            for idx, f1, f2 in a.history:
                if idx <= cut:
                    replay.insert((f1, f2), idx)
            expected = brute_force_front(pts[:cut])
            assert dict(((f1, f2), i) for f1, f2, i in replay.entries()) == expected


class TestHypervolume:
    def test_single_box(self):
        assert hypervolume_2d([(1.0, 1.0)], (2.0, 2.0)) == 1.0

    def test_two_points(self):
        assert hypervolume_2d([(0.0, 1.0), (1.0, 0.0)], (2.0, 2.0)) == 3.0

    def test_three_points(self):
        pts = [(0.0, 1.0), (0.5, 0.5), (1.0, 0.0)]
        assert hypervolume_2d(pts, (2.0, 2.0)) == 3.25

    def test_empty_and_outside(self):
        assert hypervolume_2d([], (1.0, 1.0)) == 0.0
        assert hypervolume_2d([(2.0, 0.5), (0.5, 1.0)], (1.0, 1.0)) == 0.0

    def test_monte_carlo_oracle(self):
        rng = np.random.default_rng(7)
        ref = (1.5, 1.5)
        for _ in range(5):
            pts = rng.random((8, 2))
            hv = hypervolume_2d(pts, ref)
            samples = rng.random((200_000, 2)) * 1.5
            dominated = np.zeros(len(samples), dtype=bool)
            for f1, f2 in pts:
                dominated |= (samples[:, 0] >= f1) & (samples[:, 1] >= f2)
            p = dominated.mean()
            est = p * 1.5 * 1.5
            se = math.sqrt(p * (1 - p) / len(samples)) * 1.5 * 1.5
            assert abs(hv - est) <= 3 * se + 1e-12

    def test_monotone_under_insertion(self):
        rng = np.random.default_rng(9)
        ref = (2.0, 2.0)
        pts = list(map(tuple, rng.random((50, 2))))
        hv = 0.0
        for k in range(1, len(pts) + 1):
            new = hypervolume_2d(pts[:k], ref)
            assert new >= hv - 1e-15
            hv = new

    def test_dominated_points_do_not_matter(self):
        rng = np.random.default_rng(11)
        ref = (2.0, 2.0)
        pts = rng.random((40, 2))
        front = brute_force_front(pts)
        assert hypervolume_2d(pts, ref) == pytest.approx(
            hypervolume_2d(list(front), ref), abs=1e-14
        )


class TestNormalization:
    def test_single_run(self):
        box = compute_normalization([[(0.0, 1.0), (1.0, 0.0)]])
        assert box.ideal == (0.0, 0.0)
        assert box.nadir == (1.0, 1.0)

    def test_pooled_runs(self):
        box = compute_normalization([[(0.0, 2.0)], [(1.0, 0.0)]])
        assert box.ideal == (0.0, 0.0)
        assert box.nadir == (1.0, 2.0)

    def test_pooled_front_hv_in_unit(self):
        fronts = [[(0.0, 2.0)], [(1.0, 0.0)], [(0.5, 0.7)]]
        box = compute_normalization(fronts)
        hv = normalized_hv([f for fr in fronts for f in fr], box)
        assert 0.0 < hv <= 1.0

    def test_degenerate(self):
        with pytest.raises(DegenerateNormalizationError):
            compute_normalization([[(1.0, 0.0), (1.0, 1.0)]])
        with pytest.raises(DegenerateNormalizationError):
            compute_normalization([[]])

    def test_normalized_hv_examples(self):
        box = NormalizationBox((0.0, 0.0), (2.0, 4.0))
        assert normalized_hv([(0.0, 0.0)], box) == 1.0
        assert normalized_hv([(5.0, 5.0)], box) == 0.0
        assert normalized_hv([(1.0, 2.0)], box) == pytest.approx(0.25, abs=1e-15)

    def test_bounds_always_unit(self):
        rng = np.random.default_rng(13)
        box = NormalizationBox((0.0, 0.0), (1.0, 1.0))
        for _ in range(50):
            pts = rng.uniform(-0.5, 1.5, size=(20, 2))
            v = normalized_hv(pts, box)
            assert 0.0 <= v <= 1.0


class TestRelativeHv:
    def test_ratio(self):
        assert relative_hv(0.45, 0.5) == pytest.approx(0.9)
        assert relative_hv(0.5, 0.5) == 1.0

    def test_degenerate_base(self):
        with pytest.raises(DegenerateBaseError):
            relative_hv(0.5, 0.0)


class TestWasserstein:
    def test_identical(self):
        assert wasserstein_1d([1.0, 2.0, 3.0], [3.0, 1.0, 2.0]) == 0.0

    def test_hand_value(self):
        assert wasserstein_1d([0.0, 1.0], [0.0, 2.0]) == 0.5

    def test_translation(self):
        rng = np.random.default_rng(17)
        a = rng.random(100)
        c = 0.37
        assert wasserstein_1d(a, a + c) == pytest.approx(c, abs=1e-12)

    def test_metric_properties(self):
        rng = np.random.default_rng(19)
        for _ in range(20):
            a, b, c = rng.random((3, 50))
            dab = wasserstein_1d(a, b)
            dba = wasserstein_1d(b, a)
            dac = wasserstein_1d(a, c)
            dcb = wasserstein_1d(c, b)
            assert dab == pytest.approx(dba, abs=1e-12)
            assert dab <= dac + dcb + 1e-12

    def test_size_mismatch(self):
        with pytest.raises(DimensionError):
            wasserstein_1d([1.0, 2.0], [1.0])


class TestDensityChange:
    def test_identity_zero(self):
        assert density_change(TransformSpec.identity(), 200, 2, seed=1) == 0.0

    def test_right_angle_zero(self):
        t = TransformSpec.sphered_rotation(rotation_matrix_2d(math.pi / 2))
        assert density_change(t, 500, 2, seed=1) <= 1e-12

    def test_beta_ordering(self):
        flat = density_change(TransformSpec.beta_cdf(1, 1), 300, 2, seed=5)
        peaked = density_change(TransformSpec.beta_cdf(5, 5), 300, 2, seed=5)
        assert peaked > flat
        assert flat <= 1e-12  # CDF path is identity only to rounding

    def test_deterministic(self):
        t = TransformSpec.beta_cdf(0.5, 2.0)
        assert density_change(t, 100, 2, seed=9) == density_change(t, 100, 2, seed=9)

    def test_small_n(self):
        with pytest.raises(ParameterError):
            density_change(TransformSpec.identity(), 1, 2, seed=0)
