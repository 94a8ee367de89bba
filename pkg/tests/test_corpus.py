import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reliefmatch.corpus import (
    Tweet,
    clean_text,
    dedup_bag,
    deduplicate,
    ingest,
    jaccard,
    preprocess,
    write_tweets,
)


def _write_jsonl(path, rows):
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(row + "\n")


class TestIngest:
    def test_well_formed_lines_in_order(self, tmp_path):
        p = tmp_path / "tweets.jsonl"
        _write_jsonl(
            p,
            [
                json.dumps({"id": "a", "text": "one", "kind": "need"}),
                json.dumps({"id": "b", "text": "two", "kind": "availability"}),
                json.dumps({"id": "c", "text": "three", "kind": "need"}),
            ],
        )
        result = ingest(p)
        assert [t.id for t in result] == ["a", "b", "c"]
        assert result.skipped == 0

    def test_malformed_line_skipped_with_count(self, tmp_path):
        p = tmp_path / "tweets.jsonl"
        _write_jsonl(
            p,
            [
                json.dumps({"id": "a", "text": "one"}),
                "{not json",
                json.dumps({"id": "b", "text": "two"}),
            ],
        )
        result = ingest(p, kind="need")
        assert [t.id for t in result] == ["a", "b"]
        assert all(t.kind == "need" for t in result)
        assert result.skipped == 1

    def test_empty_file(self, tmp_path):
        p = tmp_path / "tweets.jsonl"
        p.write_text("")
        result = ingest(p)
        assert list(result) == [] and result.skipped == 0

    def test_unreadable_file_raises(self, tmp_path):
        with pytest.raises(OSError):
            ingest(tmp_path / "missing.jsonl")

    def test_roundtrip(self, tmp_path):
        tweets = [Tweet("a", "text one", "need"), Tweet("b", "text two", "availability", "2015-04-25T12:00:00Z")]
        p = tmp_path / "out.jsonl"
        assert write_tweets(tweets, p) == 2
        back = ingest(p)
        assert [t.id for t in back] == ["a", "b"]
        assert back.tweets[1].timestamp == "2015-04-25T12:00:00Z"


class TestPreprocess:
    def test_alphanumeric_joint_split(self):
        assert "Nepal 2015" in clean_text("Nepal2015")

    def test_removal_rules_keep_email(self):
        assert clean_text("RT @user help http://t.co/x mail me a@b.org") == "help mail me a@b.org"

    def test_camelcase_split(self):
        assert clean_text("EarthquakeRelief") == "Earthquake Relief"

    def test_no_case_folding(self):
        assert clean_text("Tents NEEDED in Kathmandu") == "Tents NEEDED in Kathmandu"

    def test_hash_brackets_ellipses_emoji_stripped(self):
        out = clean_text("help (urgent) [now] #Nepal & more ... … \U0001f622")
        assert out == "help urgent now Nepal more"

    def test_emoji_removed_mentions_removed(self):
        t = Tweet("x", "water \U0001f4a7 needed @relief_org")
        pre = preprocess(t)
        assert pre.clean_text == "water needed"
        assert pre.tokens_for_dedup == frozenset({"water", "needed"})

    def test_stopwords_removed_from_bag_not_text(self):
        t = Tweet("x", "the tents are in the camp")
        pre = preprocess(t, stopwords=frozenset({"the", "are", "in"}))
        assert "the" in pre.clean_text
        assert pre.tokens_for_dedup == frozenset({"tents", "camp"})

    @given(st.text(max_size=200))
    @settings(max_examples=200, deadline=None)
    def test_idempotent(self, text):
        once = clean_text(text)
        assert clean_text(once) == once


class TestJaccard:
    def test_identical_bags(self):
        assert jaccard(frozenset({"a", "b"}), frozenset({"a", "b"})) == 1.0

    def test_disjoint_bags(self):
        assert jaccard(frozenset({"a"}), frozenset({"b"})) == 0.0

    @given(
        st.frozensets(st.text(min_size=1, max_size=4), max_size=8),
        st.frozensets(st.text(min_size=1, max_size=4), max_size=8),
    )
    @settings(max_examples=200, deadline=None)
    def test_symmetric_and_bounded(self, a, b):
        assert jaccard(a, b) == jaccard(b, a)
        assert 0.0 <= jaccard(a, b) <= 1.0


def _pre(tid, text, stop=frozenset()):
    return preprocess(Tweet(tid, text), stop)


class TestDeduplicate:
    def test_identical_pair_keeps_first(self):
        tweets = [_pre("a", "tents needed now"), _pre("b", "tents needed now")]
        assert deduplicate(tweets, 0.8) == ["a"]

    def test_disjoint_pair_keeps_both(self):
        tweets = [_pre("a", "tents blankets"), _pre("b", "water food")]
        assert deduplicate(tweets, 0.8) == ["a", "b"]

    def test_boundary_is_strict(self):
        # bags {w,x,y,z} vs {w,x,y,q}: J = 3/5 = 0.6 -> both kept at 0.6
        a = _pre("a", "w x y z")
        b = _pre("b", "w x y q")
        assert deduplicate([a, b], threshold=0.6) == ["a", "b"]
        assert deduplicate([a, b], threshold=0.59) == ["a"]

    def test_output_subset_and_idempotent(self):
        tweets = [
            _pre("a", "tents needed in Kathmandu"),
            _pre("b", "tents needed in Kathmandu today"),
            _pre("c", "water available"),
            _pre("d", "water available"),
        ]
        kept = deduplicate(tweets, 0.5)
        assert set(kept) <= {"a", "b", "c", "d"}
        again = deduplicate([t for t in tweets if t.id in set(kept)], 0.5)
        assert again == kept

    def test_prefilter_matches_plain_scan(self):
        tweets = [
            _pre(str(i), text)
            for i, text in enumerate(
                ["tents camp", "tents camp now", "water food", "water food",
                 "blood bank", "blood bank open", "xyz"]
            )
        ]
        assert deduplicate(tweets, 0.6, prefilter=True) == deduplicate(
            tweets, 0.6, prefilter=False
        )

    def test_invalid_threshold(self):
        with pytest.raises(ValueError):
            deduplicate([], threshold=1.5)

    @given(
        st.lists(
            st.frozensets(st.sampled_from("abcdefgh"), min_size=0, max_size=5),
            max_size=12,
        ),
        st.floats(min_value=0.0, max_value=1.0),
    )
    @settings(max_examples=150, deadline=None)
    def test_greedy_matches_bruteforce_oracle(self, bags, threshold):
        from reliefmatch.corpus import PreprocessedTweet

        tweets = [PreprocessedTweet(str(i), "", bag) for i, bag in enumerate(bags)]
        # Brute-force oracle: literal all-pairs greedy, no index tricks.
        kept, kept_bags = [], []
        for t in tweets:
            if not any(jaccard(t.tokens_for_dedup, kb) > threshold for kb in kept_bags):
                kept.append(t.id)
                kept_bags.append(t.tokens_for_dedup)
        assert deduplicate(tweets, threshold) == kept
