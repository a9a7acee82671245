import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from perfdrift.detect import (
    DetectionConfig,
    DetectionError,
    biweight_loss,
    brute_force_detect,
    detect,
    estimate_sigma,
    evaluate_boundaries,
    segment_cost,
)


def cfg(**kw):
    kw.setdefault("min_length", 1)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return DetectionConfig(**kw)


class TestEstimateSigma:
    def test_constant_series_falls_back_to_one(self):
        assert estimate_sigma([5, 5, 5, 5]) == 1.0

    def test_alternating_series_hand_value(self):
        # diffs [1,-1,1,-1], MAD 1 -> 1/(0.6745*sqrt(2))
        expected = 1 / (0.6745 * math.sqrt(2))
        assert estimate_sigma([0, 1, 0, 1, 0]) == pytest.approx(expected, abs=1e-12)

    def test_gaussian_monte_carlo(self):
        rng = np.random.default_rng(3)
        sigma = estimate_sigma(rng.normal(0, 2.0, 1000))
        assert 1.7 <= sigma <= 2.3

    def test_too_short(self):
        with pytest.raises(DetectionError, match="too short"):
            estimate_sigma([1.0])

    def test_zero_mad_falls_back_to_std(self):
        # diffs [0,0,9]: MAD of |d - median| is 0, but the series varies
        sigma = estimate_sigma([1, 1, 1, 10])
        assert sigma == pytest.approx(np.std([1, 1, 1, 10], ddof=1))


class TestBiweightLoss:
    def test_identity(self):
        assert biweight_loss(3.2, 3.2, 0.6) == 0.0

    def test_saturates_at_k_squared(self):
        assert biweight_loss(0.0, 10.0, 1.0) == 1.0

    def test_below_cap(self):
        assert biweight_loss(1.2, 1.0, 0.6) == pytest.approx(0.04)

    def test_symmetry(self):
        assert biweight_loss(1.0, 4.0, 0.7) == biweight_loss(4.0, 1.0, 0.7)


class TestSegmentCost:
    def test_identical_values(self):
        theta, cost = segment_cost([5, 5, 5], 0.6)
        assert theta == 5.0 and cost == 0.0

    def test_tie_breaks_to_smallest_theta(self):
        theta, cost = segment_cost([0, 10], 1.0)
        assert cost == pytest.approx(1.0)
        assert theta == 0.0

    def test_one_outlier_saturated(self):
        theta, cost = segment_cost([0, 0, 0, 100], 2.0)
        assert theta == 0.0 and cost == pytest.approx(4.0)

    def test_empty_input(self):
        with pytest.raises(DetectionError):
            segment_cost([], 0.6)

    @given(
        values=st.lists(st.floats(-50, 50), min_size=1, max_size=10),
        k=st.floats(0.3, 3.0),
    )
    @settings(max_examples=200)
    def test_never_beats_grid_and_upper_bounds(self, values, k):
        y = np.asarray(values)
        theta, cost = segment_cost(y, k)
        grid = np.linspace(y.min() - k - 1, y.max() + k + 1, 4001)
        grid_min = np.minimum((y[None, :] - grid[:, None]) ** 2, k * k).sum(1).min()
        assert cost <= grid_min + 1e-9
        assert cost <= len(y) * k * k + 1e-12
        assert cost <= np.sum((y - y.mean()) ** 2) + 1e-9


class TestDetect:
    def test_constant_series_no_changepoints(self):
        r = detect([3.0] * 10, config=DetectionConfig())
        assert r.boundaries == ()
        assert r.total_cost == 0.0

    def test_clear_step_found(self):
        y = [0.0] * 5 + [10.0] * 5
        r = detect(y, config=cfg(k=3.0, beta=2 * math.log(10), standardize=False))
        assert r.boundaries == (5,)
        assert r.total_cost == pytest.approx(2 * math.log(10))

    def test_single_outlier_ignored(self):
        y = [0.0] * 4 + [100.0] + [0.0] * 5
        r = detect(y, config=cfg(k=1.0, beta=2 * math.log(10), standardize=False))
        assert r.boundaries == ()
        assert r.total_cost == pytest.approx(1.0)

    def test_short_series_returns_single_segment_with_warning(self):
        r = detect([1.0, 2.0, 50.0], config=DetectionConfig())
        assert r.boundaries == ()
        assert r.warnings and "min_length" in r.warnings[0]

    def test_length_mismatch(self):
        with pytest.raises(DetectionError, match="mismatch"):
            detect([1.0, 2.0], timestamps=[1], config=cfg())

    def test_non_finite_rejected(self):
        with pytest.raises(DetectionError, match="non-finite"):
            detect([1.0, float("nan"), 2.0], config=cfg())

    def test_deterministic_across_calls(self):
        rng = np.random.default_rng(5)
        y = rng.normal(0, 1, 300)
        y[150:] += 4
        a = detect(y, config=DetectionConfig())
        b = detect(y, config=DetectionConfig())
        assert a == b

    def test_pruned_matches_baseline(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            n = int(rng.integers(5, 60))
            y = rng.normal(0, 1, n)
            if rng.random() < 0.5:
                y[n // 2:] += rng.uniform(1, 6)
            c = cfg(k=float(rng.uniform(0.3, 1.0)), beta=float(rng.uniform(1, 10)))
            fast = detect(y, config=c, method="pruned")
            slow = detect(y, config=c, method="baseline")
            assert fast.boundaries == slow.boundaries
            assert fast.total_cost == pytest.approx(slow.total_cost, abs=1e-9)

    def test_cost_recomputable_from_boundaries(self):
        rng = np.random.default_rng(2)
        y = rng.normal(0, 1, 120)
        y[40:] += 3
        y[80:] -= 5
        c = DetectionConfig()
        r = detect(y, config=c)
        assert evaluate_boundaries(y, r.boundaries, c) == pytest.approx(
            r.total_cost, abs=1e-9
        )


class TestOracleEquivalence:
    @given(data=st.data())
    @settings(max_examples=120, deadline=None)
    def test_detect_matches_brute_force(self, data):
        n = data.draw(st.integers(2, 12))
        y = np.array(data.draw(st.lists(
            st.floats(-20, 20, allow_nan=False), min_size=n, max_size=n)))
        k = data.draw(st.floats(0.3, 1.0))
        beta = data.draw(st.sampled_from([2 * math.log(n), k * k, 10.0]))
        standardize = data.draw(st.booleans())
        c = cfg(k=k, beta=beta, standardize=standardize)
        fast = detect(y, config=c)
        oracle = brute_force_detect(y, config=c)
        assert fast.total_cost == pytest.approx(oracle.total_cost, abs=1e-9)
        assert evaluate_boundaries(y, fast.boundaries, c) == pytest.approx(
            oracle.total_cost, abs=1e-9
        )

    def test_brute_force_refuses_long_series(self):
        with pytest.raises(DetectionError, match="15"):
            brute_force_detect(np.zeros(16), config=cfg())

    def test_two_point_hand_case(self):
        r = brute_force_detect([0.0, 10.0], config=cfg(k=1.0, beta=10.0, standardize=False))
        assert r.boundaries == ()
        assert r.total_cost == pytest.approx(1.0)


class TestInvariants:
    def test_outlier_immunity(self):
        rng = np.random.default_rng(9)
        for _ in range(30):
            n = int(rng.integers(5, 40))
            k = float(rng.uniform(0.3, 1.0))
            y = np.full(n, float(rng.uniform(-5, 5)))
            y[rng.integers(0, n)] += float(rng.uniform(1, 1e6)) * k
            c = cfg(k=k, beta=k * k + float(rng.uniform(0.1, 5)), standardize=False)
            assert detect(y, config=c).boundaries == ()

    def test_affine_invariance(self):
        rng = np.random.default_rng(13)
        for _ in range(20):
            y = rng.normal(0, 1, 80)
            y[40:] += 4
            a = float(rng.uniform(0.1, 10))
            c0 = float(rng.uniform(-100, 100))
            conf = DetectionConfig()
            base = detect(y, config=conf)
            scaled = detect(a * y + c0, config=conf)
            assert base.boundaries == scaled.boundaries
            assert scaled.sigma_hat == pytest.approx(a * base.sigma_hat, rel=1e-9)

    def test_k_outside_supported_range_warns(self):
        with pytest.warns(UserWarning, match="supported tuning range"):
            DetectionConfig(k=2.0)

    def test_invalid_config_rejected(self):
        with pytest.raises(ValueError):
            DetectionConfig(k=-1)
        with pytest.raises(ValueError):
            DetectionConfig(beta=0.0)
        with pytest.raises(ValueError):
            DetectionConfig(beta="bogus")
