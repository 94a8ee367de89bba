"""Word lists backing extraction: trigger words, the five-class resource
ontology, location affixes, stopwords, unigram counts and the semantic
similarity table.

Everything is loaded once from plain data files and kept immutable, so a
LexiconSet can be shared freely across workers.  Resource terms may span
several words ("bottled water", "rescue dogs"); matching is
case-insensitive and tolerant of plain plural/singular variation.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources as importlib_resources
from pathlib import Path

__all__ = [
    "LexiconSet",
    "SimilarityOracle",
    "load_lexicons",
    "default_lexicon_dir",
    "is_resource",
    "is_numeric_token",
    "word_forms",
]

RESOURCE_CLASSES = ("cash", "health", "logistics", "shelter", "food")
AFFIX_TYPES = ("landforms", "roads", "buildings", "towns", "directions")

DEFAULT_PREPOSITIONS = frozenset({"at", "in", "from", "to", "near", "outside"})

# Small built-in fallback; the shipped stopwords.txt is the real list.
_FALLBACK_STOPWORDS = frozenset(
    """a an and are as at be but by for from has have in is it its of on or
    that the this to was were will with""".split()
)

_NUMBER_WORDS = {
    "zero": 0, "one": 1, "two": 2, "three": 3, "four": 4, "five": 5,
    "six": 6, "seven": 7, "eight": 8, "nine": 9, "ten": 10,
    "eleven": 11, "twelve": 12, "thirteen": 13, "fourteen": 14,
    "fifteen": 15, "sixteen": 16, "seventeen": 17, "eighteen": 18,
    "nineteen": 19, "twenty": 20, "thirty": 30, "forty": 40,
    "fifty": 50, "sixty": 60, "seventy": 70, "eighty": 80, "ninety": 90,
    "hundred": 100, "thousand": 1000, "lakh": 100_000, "million": 1_000_000,
}
_SCALE_WORDS = {"hundred": 100, "thousand": 1000, "lakh": 100_000, "million": 1_000_000}

_DIGIT_RE = re.compile(r"^\d{1,3}(?:,\d{3})+$|^\d+$")
_FLOAT_RE = re.compile(r"^(\d+)\.\d+$")
_RANGE_RE = re.compile(r"^(\d+)\s*-\s*\d+$")


def word_forms(word: str) -> set[str]:
    """Lowercase spelling variants a lexicon word is indexed under."""
    w = word.lower()
    forms = {w}
    if len(w) > 3 and w.endswith("ies"):
        forms.add(w[:-3] + "y")
    elif len(w) > 3 and w.endswith("es") and w[-3] in "sxzh":
        forms.add(w[:-2])
    elif len(w) > 2 and w.endswith("s") and not w.endswith("ss"):
        forms.add(w[:-1])
    return forms


@dataclass(frozen=True)
class SimilarityOracle:
    """Pre-computed semantic similarity between corpus words and resource
    terms; identical strings always score 1.0."""

    table: dict[tuple[str, str], float] = field(default_factory=dict)
    threshold: float = 0.8

    def score(self, word: str, resource: str) -> float:
        word, resource = word.lower(), resource.lower()
        if word == resource:
            return 1.0
        return self.table.get((word, resource), 0.0)

    def best_match(self, word: str, resources) -> tuple[str, float] | None:
        """Highest-scoring resource strictly above the threshold; ties go
        to the lexicographically smallest resource term."""
        best: tuple[str, float] | None = None
        for r in resources:
            s = self.score(word, r)
            if s <= self.threshold:
                continue
            if best is None or s > best[1] or (s == best[1] and r < best[0]):
                best = (r, s)
        return best


@dataclass(frozen=True)
class LexiconSet:
    need_words: frozenset[str]
    availability_words: frozenset[str]
    resources_by_class: dict[str, tuple[str, ...]]
    location_affixes: dict[str, frozenset[str]]
    location_prepositions: frozenset[str]
    stopwords: frozenset[str]
    unigram_counts: dict[str, int]
    # term word-tuple -> (canonical term, class); includes plural variants
    _term_index: dict[tuple[str, ...], tuple[str, str]] = field(default_factory=dict, repr=False)

    def class_of(self, term: str) -> str | None:
        got = self._term_index.get(tuple(term.lower().split()))
        return got[1] if got else None

    def canonical(self, term: str) -> tuple[str, str] | None:
        """Resolve a surface term to (canonical term, class) if listed."""
        return self._term_index.get(tuple(term.lower().split()))

    def all_terms(self):
        for cls in RESOURCE_CLASSES:
            yield from self.resources_by_class.get(cls, ())

    def is_trigger(self, surface: str, lemma: str = "") -> str | None:
        """'need'/'availability' when the word is a trigger word, else None."""
        for w in (surface.lower(), lemma.lower()):
            if w in self.need_words:
                return "need"
            if w in self.availability_words:
                return "availability"
        return None

    def affix_words(self, *types: str) -> frozenset[str]:
        picked = types or AFFIX_TYPES
        out: set[str] = set()
        for t in picked:
            out |= self.location_affixes.get(t, frozenset())
        return frozenset(out)


def _read_lines(path: Path) -> list[str]:
    out = []
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            out.append(line)
    return out


def _read_tsv(path: Path, ncols: int) -> list[list[str]]:
    rows = []
    for line in _read_lines(path):
        parts = line.split("\t")
        if len(parts) < ncols:
            raise ValueError(f"{path.name}: expected {ncols} columns in {line!r}")
        rows.append(parts[:ncols])
    return rows


def default_lexicon_dir() -> Path:
    return Path(importlib_resources.files("reliefmatch") / "data" / "lexicons")


def load_lexicons(directory=None) -> tuple[LexiconSet, SimilarityOracle]:
    """Load every lexicon file from ``directory`` (the packaged defaults
    when omitted).  resources.tsv is mandatory; every other file falls
    back to a built-in default when absent or empty."""
    directory = Path(directory) if directory else default_lexicon_dir()

    res_path = directory / "resources.tsv"
    if not res_path.is_file():
        raise FileNotFoundError(f"mandatory lexicon file missing: {res_path}")

    by_class: dict[str, list[str]] = {c: [] for c in RESOURCE_CLASSES}
    term_index: dict[tuple[str, ...], tuple[str, str]] = {}
    for cls, term in _read_tsv(res_path, 2):
        cls = cls.strip().lower()
        term = term.strip().lower()
        if cls not in by_class:
            raise ValueError(f"resources.tsv: unknown class {cls!r}")
        if not term:
            continue
        by_class[cls].append(term)
        words = term.split()
        variants = [tuple(words)]
        # Index a depluralized variant of the last word too ("tent"->"tents").
        for form in word_forms(words[-1]):
            variants.append(tuple(words[:-1] + [form]))
        for v in variants:
            term_index.setdefault(v, (term, cls))

    def _optional_lines(name: str, default: frozenset[str]) -> frozenset[str]:
        p = directory / name
        if p.is_file():
            got = frozenset(w.lower() for w in _read_lines(p))
            if got:
                return got
        return default

    need_words = _optional_lines("needwords.txt", frozenset({"need", "require"}))
    avail_words = _optional_lines(
        "availwords.txt", frozenset({"available", "distribute", "send", "donate"})
    )
    stopwords = _optional_lines("stopwords.txt", _FALLBACK_STOPWORDS)
    prepositions = _optional_lines("prepositions.txt", DEFAULT_PREPOSITIONS)

    affixes: dict[str, set[str]] = {t: set() for t in AFFIX_TYPES}
    affix_path = directory / "affixes.tsv"
    if affix_path.is_file():
        for typ, term in _read_tsv(affix_path, 2):
            typ = typ.strip().lower()
            if typ not in affixes:
                raise ValueError(f"affixes.tsv: unknown affix type {typ!r}")
            affixes[typ].add(term.strip().lower())

    unigrams: dict[str, int] = {}
    uni_path = directory / "unigrams.tsv"
    if uni_path.is_file():
        for word, count in _read_tsv(uni_path, 2):
            unigrams[word.lower()] = int(count)

    table: dict[tuple[str, str], float] = {}
    sim_path = directory / "similarity.tsv"
    if sim_path.is_file():
        for word, resource, score in _read_tsv(sim_path, 3):
            table[(word.lower(), resource.lower())] = float(score)

    lex = LexiconSet(
        need_words=need_words,
        availability_words=avail_words,
        resources_by_class={c: tuple(v) for c, v in by_class.items()},
        location_affixes={t: frozenset(v) for t, v in affixes.items()},
        location_prepositions=prepositions,
        stopwords=stopwords,
        unigram_counts=unigrams,
        _term_index=term_index,
    )
    for cls, terms in lex.resources_by_class.items():
        if not terms:
            raise ValueError(f"resource class {cls!r} has no terms")
    return lex, SimilarityOracle(table=table)


def is_resource(term: str, oracle: SimilarityOracle, lex: LexiconSet) -> tuple[str, str] | None:
    """Resolve a word/phrase to (canonical resource term, class).

    Exact list membership wins; otherwise the best oracle match strictly
    above the similarity threshold; otherwise None.
    """
    if not term or not term.strip():
        raise ValueError("term must be non-empty")
    exact = lex.canonical(term)
    if exact:
        return exact
    best = oracle.best_match(term, lex.all_terms())
    if best:
        canonical, _cls = lex.canonical(best[0]) or (best[0], None)
        cls = lex.class_of(canonical)
        if cls:
            return canonical, cls
    return None


def is_numeric_token(token: str) -> int | None:
    """Integer value of a numeric token, else None.

    Handles plain digit strings, comma-grouped digits, simple ranges
    ("2-3" -> 2, first number wins), decimals (truncated) and English
    number words up to "million" (including pairs like "two thousand"
    when passed with a space).
    """
    tok = token.strip().lower()
    if not tok:
        return None
    if _DIGIT_RE.match(tok):
        return int(tok.replace(",", ""))
    m = _RANGE_RE.match(tok)
    if m:
        return int(m.group(1))
    m = _FLOAT_RE.match(tok)
    if m:
        return int(m.group(1))
    if " " in tok:
        parts = tok.split()
        if len(parts) == 2 and parts[1] in _SCALE_WORDS:
            base = is_numeric_token(parts[0])
            if base is not None:
                return base * _SCALE_WORDS[parts[1]]
        return None
    return _NUMBER_WORDS.get(tok)
