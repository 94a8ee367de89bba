"""Entity span detection over tagged tokens.

Deterministic and lexicon-driven: known names (countries, cities,
organizations) come from a data file; titles mark persons; remaining
all-caps words become organizations.  Spans never overlap; longest
match wins.
"""

from __future__ import annotations

from importlib import resources as importlib_resources

__all__ = ["load_entity_names", "detect"]

PERSON_TITLES = {"dr", "mr", "mrs", "ms", "prof", "dr.", "mr.", "mrs.", "ms."}


def load_entity_names() -> dict[tuple[str, ...], str]:
    path = importlib_resources.files("tweet_annotator") / "data" / "entities.tsv"
    table: dict[tuple[str, ...], str] = {}
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        name, label = line.split("\t")
        table[tuple(name.lower().split())] = label
    return table


def detect(tagged, names: dict[tuple[str, ...], str]) -> list[dict]:
    """Entity spans as {start, end, label} dicts, token-index based."""
    n = len(tagged)
    spans: list[dict] = []
    taken = [False] * n
    max_len = max((len(k) for k in names), default=1)

    # Known multi-word names first, longest window first.
    for length in range(max_len, 0, -1):
        for i in range(0, n - length + 1):
            if any(taken[i : i + length]):
                continue
            window = tuple(tagged[j][0].lower() for j in range(i, i + length))
            label = names.get(window)
            if label:
                spans.append({"start": i, "end": i + length, "label": label})
                for j in range(i, i + length):
                    taken[j] = True

    # Title + capitalized run -> PERSON.
    i = 0
    while i < n - 1:
        if tagged[i][0].lower() in PERSON_TITLES and not taken[i]:
            j = i + 1
            while j < n and tagged[j][2] == "PROPN" and not taken[j]:
                j += 1
            if j > i + 1:
                spans.append({"start": i, "end": j, "label": "PERSON"})
                for k in range(i, j):
                    taken[k] = True
                i = j
                continue
        i += 1

    # Leftover all-caps alphabetic words of length >= 2 -> ORG.
    for i in range(n):
        surface = tagged[i][0]
        if (
            not taken[i]
            and len(surface) >= 2
            and surface.isalpha()
            and surface.isupper()
        ):
            spans.append({"start": i, "end": i + 1, "label": "ORG"})
            taken[i] = True

    spans.sort(key=lambda s: s["start"])
    return spans
