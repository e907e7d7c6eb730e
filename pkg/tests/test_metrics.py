import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from evidscreen.errors import TargetNotReachedError, ValidationError
from evidscreen.metrics import (
    HeIrCurve,
    ScreeningStats,
    build_curve,
    effort_saved,
    he_at_target,
    hours_saved,
    human_effort,
    inclusion_rate,
    summary_report,
)


class TestHumanEffort:
    def test_bounds(self):
        assert human_effort(0, 68539) == 0.0
        assert human_effort(68539, 68539) == 1.0

    def test_quarter_of_corpus(self):
        assert human_effort(17272, 68539) == pytest.approx(0.252, abs=5e-4)

    def test_zero_corpus_rejected(self):
        with pytest.raises(ValidationError):
            human_effort(0, 0)

    def test_out_of_range_rejected(self):
        with pytest.raises(ValidationError):
            human_effort(11, 10)


class TestInclusionRate:
    def test_bounds(self):
        assert inclusion_rate(5281, 5281) == 1.0
        assert inclusion_rate(0, 5281) == 0.0

    def test_eighty_percent(self):
        assert inclusion_rate(4225, 5281) == pytest.approx(0.80004, abs=5e-6)

    def test_zero_included_rejected(self):
        with pytest.raises(ValidationError):
            inclusion_rate(0, 0)


class TestBuildCurve:
    def test_all_included_corpus_is_diagonal(self):
        order = [f"d{i}" for i in range(10)]
        oracle = {d: 1 for d in order}
        curve = build_curve(order, oracle, 10, 10)
        for p in curve.points:
            assert p.he == p.ir
        assert curve.points[-1] == curve.points[-1].__class__(10, 10, 1.0, 1.0)

    def test_ideal_ordering_endpoint(self):
        included = [f"i{k}" for k in range(10)]
        excluded = [f"e{k}" for k in range(90)]
        oracle = {**{d: 1 for d in included}, **{d: 0 for d in excluded}}
        curve = build_curve(included + excluded, oracle, 100, 10)
        assert curve.points[9].ir == 1.0
        assert curve.points[9].he == pytest.approx(0.1)

    def test_random_order_ir_tracks_he_in_expectation(self):
        # Monte-Carlo mirror of the no-assistance diagonal
        n, n_inc = 400, 80
        ids = [f"d{i}" for i in range(n)]
        oracle = {d: (1 if i < n_inc else 0) for i, d in enumerate(ids)}
        probe = n // 2
        total = 0.0
        runs = 40
        for seed in range(runs):
            rng = random.Random(seed)
            order = ids[:]
            rng.shuffle(order)
            curve = build_curve(order, oracle, n, n_inc)
            total += curve.points[probe - 1].ir
        mean_ir = total / runs
        assert mean_ir == pytest.approx(probe / n, abs=0.03)

    def test_missing_oracle_entry(self):
        with pytest.raises(ValidationError):
            build_curve(["a"], {}, 4, 2)

    def test_duplicate_screened_id(self):
        with pytest.raises(ValidationError):
            build_curve(["a", "a"], {"a": 1}, 4, 2)

    @given(st.integers(2, 60), st.integers(1, 30), st.integers(0, 10_000))
    @settings(max_examples=50)
    def test_monotone_and_steps(self, n, n_inc_raw, seed):
        n_inc = min(n_inc_raw, n)
        rng = random.Random(seed)
        ids = [f"d{i}" for i in range(n)]
        included = set(rng.sample(ids, n_inc))
        oracle = {d: (1 if d in included else 0) for d in ids}
        order = ids[:]
        rng.shuffle(order)
        curve = build_curve(order, oracle, n, n_inc)
        prev_he, prev_ir = 0.0, 0.0
        for p in curve.points:
            assert p.he >= prev_he and p.ir >= prev_ir
            step = p.ir - prev_ir
            assert step == pytest.approx(0.0, abs=1e-12) or step == pytest.approx(
                1.0 / n_inc, abs=1e-12
            )
            prev_he, prev_ir = p.he, p.ir
        assert curve.points[-1].he == 1.0
        assert curve.points[-1].ir == 1.0


class TestHeAtTarget:
    def ideal_curve(self):
        included = [f"i{k}" for k in range(10)]
        excluded = [f"e{k}" for k in range(90)]
        oracle = {**{d: 1 for d in included}, **{d: 0 for d in excluded}}
        return build_curve(included + excluded, oracle, 100, 10)

    def test_ideal_curve(self):
        assert he_at_target(self.ideal_curve(), 0.8) == pytest.approx(0.08)

    def test_paper_shaped_lookup(self):
        # a curve hitting IR 0.8 exactly at screen 17,272 of 68,539
        n, n_inc = 68539, 5281
        need = int(0.8 * n_inc) + 1  # 4225 -> IR 0.80004
        order, oracle = [], {}
        for i in range(17272):
            d = f"d{i}"
            order.append(d)
            oracle[d] = 1 if i >= 17272 - need else 0
        curve = build_curve(order, oracle, n, n_inc)
        assert he_at_target(curve, 0.8) == pytest.approx(0.252, abs=5e-4)

    def test_unreachable_target(self):
        curve = self.ideal_curve()
        with pytest.raises(TargetNotReachedError) as exc:
            he_at_target(
                HeIrCurve(n=curve.n, n_included=curve.n_included, points=curve.points[:7]),
                0.8,
            )
        assert exc.value.details["max_ir"] == pytest.approx(0.7)

    def test_domination_monotonicity(self):
        fast = self.ideal_curve()
        ids = [f"i{k}" for k in range(10)] + [f"e{k}" for k in range(90)]
        oracle = {d: (1 if d.startswith("i") else 0) for d in ids}
        interleaved = []
        for k in range(10):
            interleaved.append(f"i{k}")
            interleaved.extend(f"e{j}" for j in range(9 * k, 9 * k + 9))
        slow = build_curve(interleaved, oracle, 100, 10)
        for target in (0.2, 0.5, 0.8, 1.0):
            assert he_at_target(fast, target) <= he_at_target(slow, target)


class TestSavings:
    def test_agriculture_row(self):
        _, rel = effort_saved(0.53, 0.28)
        assert rel == pytest.approx(0.4717, abs=5e-5)

    def test_abstract_numbers(self):
        _, rel = effort_saved(0.80, 0.252)
        assert rel == pytest.approx(0.685, abs=1e-3)
        _, rel = effort_saved(0.303, 0.252)
        assert rel == pytest.approx(0.168, abs=2e-3)

    def test_absolute_points(self):
        absolute, _ = effort_saved(0.252, 0.174)
        assert absolute == pytest.approx(0.078, abs=1e-12)

    def test_zero_baseline_rejected(self):
        with pytest.raises(ValidationError):
            effort_saved(0.0, 0.1)

    @given(
        st.floats(0.01, 1.0, allow_nan=False), st.floats(0.0, 1.0, allow_nan=False)
    )
    def test_relative_bounded_above_by_one(self, baseline, new):
        _, rel = effort_saved(baseline, new)
        assert rel <= 1.0
        if new == baseline:
            assert rel == 0.0


class TestHoursSaved:
    def test_no_assistance_comparison(self):
        assert hours_saved(0.80, 0.174, 68539, 38.6) == pytest.approx(1111.5, abs=0.1)

    def test_vs_weaker_model(self):
        assert hours_saved(0.303, 0.174, 68539, 38.6) == pytest.approx(229.1, abs=0.1)

    def test_identity(self):
        assert hours_saved(0.4, 0.4, 12345, 10.0) == 0.0

    def test_bad_rate(self):
        with pytest.raises(ValidationError):
            hours_saved(0.8, 0.2, 100, 0.0)


class TestBruteForceTraces:
    """Curves and lookups must match a naive recomputation exactly."""

    def test_100_random_traces(self):
        rng = random.Random(1234)
        for trial in range(100):
            n = rng.randint(2, 200)
            n_inc = rng.randint(1, n)
            ids = [f"t{trial}d{i}" for i in range(n)]
            included = set(rng.sample(ids, n_inc))
            oracle = {d: (1 if d in included else 0) for d in ids}
            k = rng.randint(1, n)
            order = rng.sample(ids, k)

            curve = build_curve(order, oracle, n, n_inc)

            # naive loop recomputation
            found = 0
            for j, doc in enumerate(order, start=1):
                found += oracle[doc]
                p = curve.points[j - 1]
                assert p.screened == j
                assert p.identified == found
                assert p.he == j / n
                assert p.ir == found / n_inc
                assert human_effort(j, n) == p.he
                assert inclusion_rate(found, n_inc) == p.ir
                ScreeningStats(
                    n=n, n_included=n_inc, n_screened=j, n_identified=found
                )

            max_ir = curve.points[-1].ir if curve.points else 0.0
            if max_ir > 0:
                target = rng.uniform(1e-9, max_ir)
                expected = next(p.he for p in curve.points if p.ir >= target)
                assert he_at_target(curve, target) == expected


class TestSummaryReport:
    def test_default_target_includes_he_at_80_key(self):
        included = [f"i{k}" for k in range(10)]
        excluded = [f"e{k}" for k in range(90)]
        oracle = {**{d: 1 for d in included}, **{d: 0 for d in excluded}}
        curve = build_curve(included + excluded, oracle, 100, 10)
        report = summary_report(curve, 0.8, f1=0.9)
        assert report["he_at_80"] == report["he_at_target"] == pytest.approx(0.08)
        assert report["target_reached"]
        assert report["f1"] == 0.9
        assert report["effort_saved_rel"] == pytest.approx(0.9)
        assert report["hours_saved"] == pytest.approx((0.8 - 0.08) * 100 / 38.6)

    def test_unreached_target(self):
        oracle = {"a": 0, "b": 0, "c": 1}
        curve = build_curve(["a", "b"], oracle, 3, 1)
        report = summary_report(curve, 0.8)
        assert not report["target_reached"]
        assert report["he_at_target"] is None

    def test_csv_export_round_trips(self):
        oracle = {"a": 1, "b": 0, "c": 1}
        curve = build_curve(["a", "b", "c"], oracle, 3, 2)
        text = curve.to_csv()
        lines = text.strip().splitlines()
        assert lines[0] == "screened,identified,he,ir"
        assert len(lines) == 4
        first = lines[1].split(",")
        assert int(first[0]) == 1 and int(first[1]) == 1
        assert float(first[2]) == pytest.approx(1 / 3)
