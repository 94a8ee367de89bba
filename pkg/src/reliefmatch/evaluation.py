"""Precision@k / recall / F-score over judged match reports, plus the
geographic-correctness predicate with per-event distance thresholds.

Retrieved pairs without a judgment count as incorrect for precision (the
conservative choice) and are tallied separately so pooling bias stays
visible.  Geographic correctness substitutes great-circle distance for
the road distances a human evaluation would use, at the same thresholds.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

from .extraction import ExtractedRecord
from .matching import MatchResult, min_location_distance_km

__all__ = [
    "Judgment",
    "EvalReport",
    "load_judgments",
    "precision_at_k",
    "recall_any",
    "evaluate",
    "geo_correct",
]

LABELS = ("correct", "incorrect")


@dataclass(frozen=True)
class Judgment:
    need_id: str
    avail_id: str
    label: str

    def __post_init__(self):
        if self.label not in LABELS:
            raise ValueError(f"judgment label must be correct/incorrect, got {self.label!r}")


@dataclass(frozen=True)
class EvalReport:
    method: str
    precision: float
    recall: float
    f_score: float
    judged_pairs: int
    unjudged_pairs: int

    def to_json(self) -> str:
        return json.dumps(
            {
                "method": self.method,
                "precision": self.precision,
                "recall": self.recall,
                "f_score": self.f_score,
                "judged_pairs": self.judged_pairs,
                "unjudged_pairs": self.unjudged_pairs,
            }
        )

    def table(self) -> str:
        rows = [
            ("method", self.method),
            ("precision", f"{self.precision:.4f}"),
            ("recall", f"{self.recall:.4f}"),
            ("f-score", f"{self.f_score:.4f}"),
            ("judged pairs", str(self.judged_pairs)),
            ("unjudged pairs", str(self.unjudged_pairs)),
        ]
        width = max(len(k) for k, _ in rows)
        return "\n".join(f"{k.ljust(width)}  {v}" for k, v in rows)


def load_judgments(path) -> dict[tuple[str, str], str]:
    """Read the judgment CSV (header need_id,avail_id,label); later rows
    for a repeated pair are rejected."""
    judgments: dict[tuple[str, str], str] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        required = {"need_id", "avail_id", "label"}
        if reader.fieldnames is None or not required <= set(reader.fieldnames):
            raise ValueError(f"{path}: expected header need_id,avail_id,label")
        for row in reader:
            j = Judgment(row["need_id"].strip(), row["avail_id"].strip(), row["label"].strip())
            key = (j.need_id, j.avail_id)
            if key in judgments:
                raise ValueError(f"{path}: duplicate judgment for pair {key}")
            judgments[key] = j.label
    return judgments


def _pair_counts(results: list[MatchResult], judgments) -> tuple[int, int, int]:
    correct = judged = total = 0
    for res in results:
        for avail_id, *_ in res.ranked:
            total += 1
            label = judgments.get((res.need_id, avail_id))
            if label is not None:
                judged += 1
                if label == "correct":
                    correct += 1
    if total == 0:
        raise ValueError("no retrieved pairs to evaluate")
    return correct, judged, total


def precision_at_k(results: list[MatchResult], judgments) -> float:
    """Fraction of all retrieved pairs judged correct (unjudged pairs
    count as incorrect)."""
    correct, _judged, total = _pair_counts(results, judgments)
    return correct / total


def recall_any(results: list[MatchResult], judgments) -> float:
    """Fraction of needs with at least one correct pair in their list."""
    if not results:
        raise ValueError("no results to evaluate")
    hit = sum(
        1
        for res in results
        if any(judgments.get((res.need_id, a)) == "correct" for a, *_ in res.ranked)
    )
    return hit / len(results)


def evaluate(results: list[MatchResult], judgments, method: str | None = None) -> EvalReport:
    correct, judged, total = _pair_counts(results, judgments)
    precision = correct / total
    recall = recall_any(results, judgments)
    if precision == 0.0 or recall == 0.0:
        f_score = 0.0
    else:
        f_score = 2 * precision * recall / (precision + recall)
    return EvalReport(
        method=method or (results[0].method if results else "unknown"),
        precision=precision,
        recall=recall,
        f_score=f_score,
        judged_pairs=judged,
        unjudged_pairs=total - judged,
    )


def geo_correct(
    need: ExtractedRecord, avail: ExtractedRecord, threshold_km: float
) -> bool | None:
    """True when the closest located pair lies strictly under the event
    threshold (100 km country-scale, 20 km city-scale); None when either
    record has no coordinates (excluded from geo metrics)."""
    d = min_location_distance_km(need, avail)
    if d is None:
        return None
    return d < threshold_km
