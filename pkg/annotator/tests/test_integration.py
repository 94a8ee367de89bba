"""Handshake with the matching engine: annotator output must be accepted
by the engine's `extract` command as-is (file contract only)."""

import json
import shutil
import subprocess
from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"
ENGINE = shutil.which("reliefmatch")


@pytest.mark.skipif(ENGINE is None, reason="matching engine CLI not installed")
def test_engine_consumes_annotator_output(tmp_path):
    annotated = tmp_path / "annotated.jsonl"
    subprocess.run(
        ["tweet-annotator", "annotate", "--input", str(FIXTURES / "tweets_50.jsonl"),
         "--output", str(annotated)],
        check=True,
        capture_output=True,
    )
    records = tmp_path / "records.jsonl"
    proc = subprocess.run(
        [ENGINE, "extract", "--input", str(annotated), "--output", str(records)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    rows = [json.loads(l) for l in records.read_text().splitlines()]
    assert len(rows) == 50
    # the degraded tweet must have fallen back to baseline extraction
    by_id = {r["tweet_id"]: r for r in rows}
    assert by_id["c50"]["method"] == "baseline"
    # at least the clear-cut rows carry extracted resources
    assert any(r["resources"] for r in rows)
