import json

import pytest

from reliefmatch.evaluation import (
    EvalReport,
    Judgment,
    evaluate,
    geo_correct,
    load_judgments,
    precision_at_k,
    recall_any,
)
from reliefmatch.extraction import ExtractedRecord, LocationField, ResourceMention
from reliefmatch.matching import MatchResult
from tests.conftest import FIXTURES


def result(need_id, avail_ids):
    ranked = [(a, 1.0 - 0.1 * i, 1.0, None) for i, a in enumerate(avail_ids)]
    return MatchResult(need_id, "P2b", ranked)


def located(tid, lat, lon):
    return ExtractedRecord(
        tweet_id=tid,
        kind="need",
        resources=[ResourceMention("water", "water", "food", (-1, -1))],
        locations=[LocationField("x", lat, lon)],
    )


@pytest.fixture(scope="module")
def fixture_results():
    results = []
    with open(FIXTURES / "match_report_eval.jsonl", encoding="utf-8") as fh:
        for line in fh:
            obj = json.loads(line)
            results.append(
                MatchResult(
                    obj["need_id"],
                    obj["method"],
                    [(r["avail_id"], r["total"], r["resource"], r["proximity"])
                     for r in obj["ranked"]],
                )
            )
    return results


@pytest.fixture(scope="module")
def fixture_judgments():
    return load_judgments(FIXTURES / "judgments_eval.csv")


class TestPrecision:
    def test_all_correct(self):
        judgments = {("n", f"a{i}"): "correct" for i in range(5)}
        assert precision_at_k([result("n", [f"a{i}" for i in range(5)])], judgments) == 1.0

    def test_seven_of_twenty(self, fixture_results, fixture_judgments):
        assert precision_at_k(fixture_results, fixture_judgments) == pytest.approx(0.35)

    def test_all_unjudged_scores_zero(self):
        results = [result("n", ["a", "b"])]
        assert precision_at_k(results, {}) == 0.0
        report = evaluate(results, {})
        assert report.unjudged_pairs == 2 and report.judged_pairs == 0

    def test_empty_results_error(self):
        with pytest.raises(ValueError):
            precision_at_k([], {})
        with pytest.raises(ValueError):
            precision_at_k([MatchResult("n", "P1", [])], {})


class TestRecall:
    def test_every_need_has_correct(self):
        judgments = {("n1", "a"): "correct", ("n2", "b"): "correct"}
        results = [result("n1", ["a", "x"]), result("n2", ["y", "b"])]
        assert recall_any(results, judgments) == 1.0

    def test_no_need_has_correct(self):
        results = [result("n1", ["a"]), result("n2", ["b"])]
        assert recall_any(results, {("n1", "a"): "incorrect"}) == 0.0

    def test_three_of_four(self, fixture_results, fixture_judgments):
        assert recall_any(fixture_results, fixture_judgments) == pytest.approx(0.75)


class TestEvaluate:
    def test_fixture_report_exact(self, fixture_results, fixture_judgments):
        report = evaluate(fixture_results, fixture_judgments)
        assert report.precision == pytest.approx(0.35)
        assert report.recall == pytest.approx(0.75)
        assert report.f_score == pytest.approx(2 * 0.35 * 0.75 / (0.35 + 0.75))
        assert report.f_score == pytest.approx(21 / 44)
        assert report.judged_pairs == 20 and report.unjudged_pairs == 0

    def test_f_zero_when_either_zero(self):
        report = evaluate([result("n", ["a"])], {("n", "a"): "incorrect"})
        assert report.precision == 0.0 and report.f_score == 0.0

    def test_row_order_invariance(self, fixture_results, fixture_judgments):
        shuffled = dict(reversed(list(fixture_judgments.items())))
        a = evaluate(fixture_results, fixture_judgments)
        b = evaluate(fixture_results, shuffled)
        assert a == b

    def test_metrics_bounded(self, fixture_results, fixture_judgments):
        report = evaluate(fixture_results, fixture_judgments)
        for v in (report.precision, report.recall, report.f_score):
            assert 0.0 <= v <= 1.0
        assert report.f_score <= max(report.precision, report.recall)

    def test_json_and_table_render(self, fixture_results, fixture_judgments):
        report = evaluate(fixture_results, fixture_judgments)
        obj = json.loads(report.to_json())
        assert obj["precision"] == pytest.approx(0.35)
        assert "precision" in report.table()


class TestJudgmentIO:
    def test_load(self, fixture_judgments):
        assert fixture_judgments[("e1", "v1")] == "correct"
        assert fixture_judgments[("e4", "v16")] == "incorrect"
        assert len(fixture_judgments) == 20

    def test_duplicate_pair_rejected(self, tmp_path):
        p = tmp_path / "j.csv"
        p.write_text("need_id,avail_id,label\nn,a,correct\nn,a,incorrect\n")
        with pytest.raises(ValueError, match="duplicate"):
            load_judgments(p)

    def test_bad_header_rejected(self, tmp_path):
        p = tmp_path / "j.csv"
        p.write_text("a,b\n1,2\n")
        with pytest.raises(ValueError, match="header"):
            load_judgments(p)

    def test_bad_label_rejected(self):
        with pytest.raises(ValueError):
            Judgment("n", "a", "maybe")


class TestGeoCorrect:
    def test_zero_distance_true(self):
        a = located("n", 27.7, 85.3)
        b = located("a", 27.7, 85.3)
        assert geo_correct(a, b, 100.0) is True

    def test_exact_threshold_false(self):
        # two points on a meridian with d computed first, then used as threshold
        from reliefmatch.geo import haversine_km

        a = located("n", 27.0, 85.0)
        b = located("a", 28.0, 85.0)
        d = haversine_km((27.0, 85.0), (28.0, 85.0))
        assert geo_correct(a, b, d) is False
        assert geo_correct(a, b, d + 1e-9) is True

    def test_missing_coordinates_indeterminate(self):
        a = located("n", 27.7, 85.3)
        b = ExtractedRecord(tweet_id="x", kind="availability")
        assert geo_correct(a, b, 100.0) is None
