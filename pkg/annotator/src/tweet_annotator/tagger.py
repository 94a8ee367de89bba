"""Rule-based POS tagging and lemmatization.

A deterministic cascade: punctuation and numerals first, then the
closed-class lexicon, then verb/adjective stem lists with inflection
handling, then capitalization (proper nouns), defaulting to NOUN.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources as importlib_resources

__all__ = ["Lexicon", "load_lexicon", "tag"]

_NUM_RE = re.compile(r"^\+?\d[\d,]*(?:\.\d+)?(?:-\d[\d,]*)?$")
_PUNCT_RE = re.compile(r"^[^\w\s]$")
_EMAIL_RE = re.compile(r"^\S+@\S+\.\S+$")

_NUMBER_WORDS = {
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight",
    "nine", "ten", "eleven", "twelve", "thirteen", "fourteen", "fifteen",
    "sixteen", "seventeen", "eighteen", "nineteen", "twenty", "thirty",
    "forty", "fifty", "sixty", "seventy", "eighty", "ninety", "hundred",
    "thousand", "lakh", "million",
}

_DIRECTION_WORDS = {
    "north", "south", "east", "west", "northern", "southern", "eastern",
    "western",
}


@dataclass(frozen=True)
class Lexicon:
    closed_class: dict[str, str]
    verbs: frozenset[str]
    adjectives: frozenset[str]
    irregular: dict[str, str]


def _data_lines(name: str) -> list[str]:
    root = importlib_resources.files("tweet_annotator") / "data" / name
    out = []
    for line in root.read_text(encoding="utf-8").splitlines():
        line = line.rstrip()
        if line and not line.startswith("#"):
            out.append(line)
    return out


def load_lexicon() -> Lexicon:
    closed = {}
    for line in _data_lines("closed_class.tsv"):
        word, pos = line.split("\t")
        closed[word] = pos
    irregular = {}
    for line in _data_lines("irregular_lemmas.tsv"):
        surface, lemma = line.split("\t")
        irregular[surface] = lemma
    return Lexicon(
        closed_class=closed,
        verbs=frozenset(_data_lines("verbs.txt")),
        adjectives=frozenset(_data_lines("adjectives.txt")),
        irregular=irregular,
    )


def _strip_plural(word: str) -> str:
    if len(word) > 3 and word.endswith("ies"):
        return word[:-3] + "y"
    if len(word) > 3 and word.endswith("es") and word[-3] in "sxzh":
        return word[:-2]
    if len(word) > 2 and word.endswith("s") and not word.endswith("ss"):
        return word[:-1]
    return word


def _verb_stem(word: str, verbs: frozenset[str]) -> str | None:
    """Base form when the word is an inflection of a known verb stem."""
    if word in verbs:
        return word
    for suffix in ("ing", "ed", "es", "s"):
        if not word.endswith(suffix) or len(word) <= len(suffix) + 1:
            continue
        stem = word[: -len(suffix)]
        for candidate in (stem, stem + "e", stem[:-1] if stem[-1:] == stem[-2:-1] else stem):
            if candidate in verbs:
                return candidate
    return None


def lemma_of(surface: str, pos: str, lex: Lexicon) -> str:
    low = surface.lower()
    if low in lex.irregular:
        return lex.irregular[low]
    if pos == "VERB":
        stem = _verb_stem(low, lex.verbs)
        if stem:
            return stem
    if pos in ("NOUN", "PROPN"):
        stripped = _strip_plural(low)
        return surface if pos == "PROPN" else stripped
    return low if pos != "PROPN" else surface


def tag(tokens: list[str], lex: Lexicon) -> list[tuple[str, str, str]]:
    """(surface, lemma, universal POS tag) for each token."""
    out: list[tuple[str, str, str]] = []
    sentence_start = True
    for i, tok in enumerate(tokens):
        low = tok.lower()
        pos = None
        if _PUNCT_RE.match(tok):
            pos = "PUNCT"
        elif _EMAIL_RE.match(tok):
            pos = "X"
        elif _NUM_RE.match(tok) or low in _NUMBER_WORDS:
            pos = "NUM"
        elif low in lex.closed_class:
            pos = lex.closed_class[low]
        elif low in lex.adjectives:
            pos = "ADJ"
        elif _verb_stem(low, lex.verbs):
            pos = "VERB"
            # participles directly before a noun behave adjectivally but
            # keep VERB here; the parser decides the attachment
        elif low in _DIRECTION_WORDS:
            pos = "ADJ"
        elif tok[0].isupper() and not sentence_start:
            pos = "PROPN"
        elif tok[0].isupper() and sentence_start and len(tokens) > i + 1:
            # Sentence-initial capitalized unknown: proper noun when the
            # next token is capitalized too, else common noun.
            nxt = tokens[i + 1]
            pos = "PROPN" if nxt[:1].isupper() else "NOUN"
        elif low.endswith("ly") and len(low) > 4:
            pos = "ADV"
        else:
            pos = "NOUN"
        out.append((tok, lemma_of(tok, pos, lex), pos))
        sentence_start = tok in ".!?"
    return out
