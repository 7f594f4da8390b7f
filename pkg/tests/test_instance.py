"""Tests for problem-instance composition and objective warping."""

import math

import numpy as np
import pytest

from mobench.errors import DimensionError, NumericError, ParameterError
from mobench.instance import (
    ProblemInstance,
    evaluate_instance,
    evaluate_instance_batch,
    unwarp_objectives,
    warp_objectives,
)
from mobench.problems import ProblemId
from mobench.transforms import TransformSpec


def make_instance(problem=("zdt", 1, 2), search=None, objective=None):
    return ProblemInstance(
        problem=ProblemId(*problem),
        search_t=search or TransformSpec.identity(),
        objective_t=objective or TransformSpec.identity(),
    )


class TestEvaluateInstance:
    def test_neutral_composition(self):
        rec = evaluate_instance(make_instance(), [0.0, 0.0], 1)
        assert rec.f_seen == rec.f_original == (0.0, 1.0)
        assert rec.eval_index == 1

    def test_search_warp_composition(self):
        # BetaCdf(2,1) maps 0.5 -> 0.25; ZDT1 at (0.25, 0.25): g = 3.25
        inst = make_instance(search=TransformSpec.beta_cdf(2, 1))
        rec = evaluate_instance(inst, [0.5, 0.5], 7)
        assert rec.f_original[0] == pytest.approx(0.25, abs=1e-12)
        expected_f2 = 3.25 * (1.0 - math.sqrt(0.25 / 3.25))
        assert rec.f_original[1] == pytest.approx(expected_f2, abs=1e-9)
        assert rec.f_seen == rec.f_original

    def test_objective_warp_leaves_original(self):
        inst = make_instance(
            problem=("dtlz", 1, 2), objective=TransformSpec.beta_cdf(1, 2)
        )
        rec = evaluate_instance(inst, [0.5, 0.5], 1)
        assert rec.f_original == pytest.approx((0.25, 0.25), abs=1e-12)
        # 1 - (1 - 0.25)^2 = 0.4375
        assert rec.f_seen == pytest.approx((0.4375, 0.4375), abs=1e-12)

    def test_batch_matches_single(self):
        inst = make_instance(
            problem=("dtlz", 3, 2),
            search=TransformSpec.sphered_rotation(dim=2, seed=3),
            objective=TransformSpec.beta_cdf(0.5, 2.0),
        )
        rng = np.random.default_rng(0)
        pts = rng.random((50, 2))
        batch = evaluate_instance_batch(inst, pts, 10)
        for i, rec in enumerate(batch):
            single = evaluate_instance(inst, pts[i], 10 + i)
            assert rec.eval_index == single.eval_index == 10 + i
            # paths may differ by an ulp in the warped point; the problem's
            # gradient amplifies that slightly
            np.testing.assert_allclose(rec.f_original, single.f_original, rtol=1e-9)
            np.testing.assert_allclose(rec.f_seen, single.f_seen, rtol=1e-9, atol=1e-12)

    def test_descriptor(self):
        inst = make_instance(
            problem=("dtlz", 1, 2),
            search=TransformSpec.sphered_rotation(dim=2, seed=3),
        )
        assert inst.descriptor == "dtlz1-d2__s:rot-seed3__o:id"
        assert make_instance().descriptor == "zdt1-d2__s:id__o:id"

    def test_is_base(self):
        assert make_instance().is_base
        assert make_instance(search=TransformSpec.beta_cdf(1.0, 1.0)).is_base
        assert not make_instance(search=TransformSpec.beta_cdf(2.0, 1.0)).is_base

    def test_invariant_errors(self):
        with pytest.raises(ParameterError):
            make_instance(objective=TransformSpec.sphered_rotation(dim=2, seed=1))
        with pytest.raises(DimensionError):
            make_instance(
                problem=("zdt", 1, 10),
                search=TransformSpec.sphered_rotation(dim=2, seed=1),
            )


class TestWarpObjectives:
    def test_identity_passthrough(self):
        assert warp_objectives(TransformSpec.identity(), (0.3, 7.2)) == (0.3, 7.2)

    def test_beta_inside_outside(self):
        got = warp_objectives(TransformSpec.beta_cdf(1, 2), (0.5, 2.0))
        assert got[0] == pytest.approx(0.75, abs=1e-12)
        assert got[1] == 2.0

    def test_endpoints_fixed(self):
        assert warp_objectives(TransformSpec.beta_cdf(2, 1), (1.0, 0.0)) == (1.0, 0.0)

    def test_unwarp_examples(self):
        assert unwarp_objectives(TransformSpec.identity(), (0.3, 7.2)) == (0.3, 7.2)
        got = unwarp_objectives(TransformSpec.beta_cdf(1, 2), (0.75, 2.0))
        assert got[0] == pytest.approx(0.5, abs=1e-12)
        assert got[1] == 2.0

    def test_roundtrip_random_pairs(self):
        rng = np.random.default_rng(5)
        for shape in [(1.0, 2.0), (2.0, 1.0), (2.0, 2.0), (0.5, 2.0)]:
            t = TransformSpec.beta_cdf(*shape)
            for _ in range(250):
                f = tuple(rng.uniform(-0.5, 2.5, size=2))
                back = unwarp_objectives(t, warp_objectives(t, f))
                assert back == pytest.approx(f, abs=1e-9)

    def test_continuity_at_unit_edges(self):
        t = TransformSpec.beta_cdf(0.2, 5.0)
        just_in = warp_objectives(t, (1.0, 0.0))
        just_out = warp_objectives(t, (1.0 + 1e-12, -1e-12))
        assert just_in[0] == 1.0 and just_in[1] == 0.0
        assert just_out[0] == pytest.approx(1.0, abs=1e-11)
        assert just_out[1] == pytest.approx(0.0, abs=1e-11)

    def test_non_finite_errors(self):
        t = TransformSpec.beta_cdf(2, 2)
        with pytest.raises(NumericError):
            warp_objectives(t, (float("nan"), 0.5))
        with pytest.raises(NumericError):
            unwarp_objectives(t, (float("inf"), 0.5))


def dominates(a, b):
    return a[0] <= b[0] and a[1] <= b[1] and a != b


class TestDominancePreservation:
    def test_dominance_preserved_exactly(self):
        rng = np.random.default_rng(11)
        n = 100_000
        fa = rng.random((n, 2))
        fb = rng.random((n, 2))
        for shape in [(0.2, 5.0), (5.0, 0.2), (2.0, 2.0)]:
            t = TransformSpec.beta_cdf(*shape)
            from mobench.specfun import reg_inc_beta

            wa = reg_inc_beta(fa, t.shape)
            wb = reg_inc_beta(fb, t.shape)
            before = (fa[:, 0] <= fb[:, 0]) & (fa[:, 1] <= fb[:, 1]) & np.any(fa != fb, axis=1)
            after = (wa[:, 0] <= wb[:, 0]) & (wa[:, 1] <= wb[:, 1]) & np.any(wa != wb, axis=1)
            np.testing.assert_array_equal(before, after)

    def test_pareto_front_invariance(self):
        # the same x points yield the same original-space non-dominated set
        # whether or not the objective warp is applied
        rng = np.random.default_rng(13)
        pts = rng.random((200, 2))
        plain = make_instance(problem=("zdt", 3, 2))
        warped = make_instance(problem=("zdt", 3, 2), objective=TransformSpec.beta_cdf(0.2, 5.0))
        f_plain = [evaluate_instance(plain, p, i + 1).f_original for i, p in enumerate(pts)]
        f_warped = [evaluate_instance(warped, p, i + 1).f_original for i, p in enumerate(pts)]
        assert f_plain == f_warped

    def test_search_bijectivity_spot_check(self):
        rng = np.random.default_rng(17)
        pts = rng.random((100_000, 2))
        from mobench.transforms import apply_forward

        out = apply_forward(TransformSpec.beta_cdf(0.2, 5.0), pts)
        n_in = len(np.unique(pts, axis=0))
        n_out = len(np.unique(out, axis=0))
        assert n_out >= n_in - 5  # allow for float collisions only
