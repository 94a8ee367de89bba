"""Tweet ingestion, text cleanup and near-duplicate elimination.

Cleanup keeps the original word casing (proper nouns matter downstream)
and never touches email addresses, while URLs, @-mentions, RT markers,
hashes, brackets and non-ASCII codepoints are stripped.  CamelCase words
and glued letter/digit terms are split apart.
"""

from __future__ import annotations

import html
import json
import re
from dataclasses import dataclass, field

__all__ = [
    "Tweet",
    "PreprocessedTweet",
    "IngestResult",
    "ingest",
    "preprocess",
    "clean_text",
    "dedup_bag",
    "jaccard",
    "deduplicate",
    "write_tweets",
]

KINDS = ("need", "availability", "unlabeled")

_EMAIL_RE = re.compile(r"[A-Za-z0-9][A-Za-z0-9_.]*@[A-Za-z0-9_.]+\.[A-Za-z]{2,6}")
_URL_RE = re.compile(r"(?:https?://\S+|www\.\S+|\bt\.co/\S+)", re.IGNORECASE)
_MENTION_RE = re.compile(r"@\w+")
_RT_RE = re.compile(r"\bRT\b")
_STRIP_CHARS_RE = re.compile(r"[#&()\[\]{}]|\.{3,}")
_NON_ASCII_RE = re.compile(r"[^\x00-\x7f]")
_CAMEL_RE = re.compile(r"(?<=[a-z])(?=[A-Z])")
_ALNUM_RE1 = re.compile(r"(?<=[A-Za-z])(?=[0-9])")
_ALNUM_RE2 = re.compile(r"(?<=[0-9])(?=[A-Za-z])")
_WS_RE = re.compile(r"\s+")
_WORD_RE = re.compile(r"[A-Za-z0-9']+")


@dataclass(frozen=True)
class Tweet:
    """One raw microblog post with its need/availability label."""

    id: str
    text: str
    kind: str = "unlabeled"
    timestamp: str | None = None

    def __post_init__(self):
        if not self.id:
            raise ValueError("tweet id must be non-empty")
        if not self.text.strip():
            raise ValueError(f"tweet {self.id}: text is empty")
        if self.kind not in KINDS:
            raise ValueError(f"tweet {self.id}: unknown kind {self.kind!r}")


@dataclass(frozen=True)
class PreprocessedTweet:
    id: str
    clean_text: str
    tokens_for_dedup: frozenset[str] = field(default_factory=frozenset)


@dataclass
class IngestResult:
    tweets: list[Tweet]
    skipped: int = 0

    def __iter__(self):
        return iter(self.tweets)

    def __len__(self):
        return len(self.tweets)


def ingest(path, kind: str | None = None) -> IngestResult:
    """Read tweets from a JSONL file, one object per line.

    Malformed lines are skipped and counted in ``IngestResult.skipped``;
    an unreadable file raises OSError.
    """
    tweets: list[Tweet] = []
    skipped = 0
    seen_ids: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                tweet = Tweet(
                    id=str(obj["id"]),
                    text=obj["text"],
                    kind=kind or obj.get("kind", "unlabeled"),
                    timestamp=obj.get("timestamp"),
                )
            except (json.JSONDecodeError, KeyError, TypeError, ValueError):
                skipped += 1
                continue
            if tweet.id in seen_ids:
                skipped += 1
                continue
            seen_ids.add(tweet.id)
            tweets.append(tweet)
    return IngestResult(tweets, skipped)


def write_tweets(tweets, path) -> int:
    """Write tweets as JSONL; returns the number of records written."""
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for t in tweets:
            obj = {"id": t.id, "text": t.text, "kind": t.kind}
            if t.timestamp:
                obj["timestamp"] = t.timestamp
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")
            n += 1
    return n


def clean_text(text: str) -> str:
    """Clean one tweet's text.

    Removes URLs (email addresses survive untouched), @-mentions, RT
    markers, bracket/hash/ampersand characters, ellipses and every
    non-ASCII codepoint; splits CamelCase words and letter/digit joints.
    Case is preserved throughout; idempotent.
    """
    text = html.unescape(text)
    # Dropping non-ASCII first keeps the pass idempotent (a stray byte
    # inside "@x" or "http" would otherwise surface a new match later);
    # NUL is cleared up front so it can serve as the email placeholder.
    text = text.replace("\x00", " ")
    text = _NON_ASCII_RE.sub("", text)

    # Shield emails so mention/split rules cannot chew on them.
    emails: list[str] = []

    def _stash(m: re.Match) -> str:
        emails.append(m.group(0))
        return f"\x00{len(emails) - 1}\x00"

    text = _EMAIL_RE.sub(_stash, text)
    text = _URL_RE.sub(" ", text)
    text = _MENTION_RE.sub(" ", text)
    text = _STRIP_CHARS_RE.sub(" ", text)
    text = _CAMEL_RE.sub(" ", text)
    text = _ALNUM_RE1.sub(" ", text)
    text = _ALNUM_RE2.sub(" ", text)
    # RT markers only become free-standing after the splits ("0RT" -> "0 RT").
    text = _RT_RE.sub(" ", text)
    text = re.sub(r"\x00(\d+)\x00", lambda m: emails[int(m.group(1))], text)
    return _WS_RE.sub(" ", text).strip()


def dedup_bag(clean: str, stopwords: set[str] | frozenset[str] = frozenset()) -> frozenset[str]:
    """Lowercased word set used for Jaccard-based duplicate detection."""
    words = (w.lower().strip("'") for w in _WORD_RE.findall(clean))
    return frozenset(w for w in words if w and w not in stopwords)


def preprocess(tweet: Tweet, stopwords: set[str] | frozenset[str] = frozenset()) -> PreprocessedTweet:
    clean = clean_text(tweet.text)
    return PreprocessedTweet(tweet.id, clean, dedup_bag(clean, stopwords))


def jaccard(a: frozenset[str] | set[str], b: frozenset[str] | set[str]) -> float:
    """Set Jaccard similarity; two empty bags count as identical."""
    if not a and not b:
        return 1.0
    union = len(a | b)
    return len(a & b) / union


def deduplicate(tweets, threshold: float = 0.8, prefilter: bool = True) -> list[str]:
    """Greedy first-seen-wins duplicate removal over word-bag Jaccard.

    A tweet is dropped when its bag is *strictly more* similar than
    ``threshold`` to an already retained tweet; the earliest tweet of any
    duplicate group therefore survives.  Returns retained ids in input
    order.  The inverted-index prefilter only skips pairs sharing no
    token and never changes the result.
    """
    if not 0.0 <= threshold <= 1.0:
        raise ValueError("threshold must lie in [0, 1]")
    retained: list[str] = []
    kept_bags: list[frozenset[str]] = []
    index: dict[str, set[int]] = {}
    for pt in tweets:
        bag = pt.tokens_for_dedup
        if prefilter:
            candidates = sorted(set().union(*(index.get(w, set()) for w in bag)) if bag else set())
            # Empty bags never share a token, yet two empty bags are duplicates.
            if not bag:
                candidates = [i for i, kb in enumerate(kept_bags) if not kb]
        else:
            candidates = range(len(kept_bags))
        duplicate = any(jaccard(bag, kept_bags[i]) > threshold for i in candidates)
        if duplicate:
            continue
        pos = len(kept_bags)
        kept_bags.append(bag)
        retained.append(pt.id)
        for w in bag:
            index.setdefault(w, set()).add(pos)
    return retained
