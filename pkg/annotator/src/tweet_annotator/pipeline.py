"""Batch annotation and the similarity-table export."""

from __future__ import annotations

import json
from pathlib import Path

from .entities import detect, load_entity_names
from .parser import ParseOverflow, parse
from .tagger import load_lexicon, tag
from .taxonomy import load_taxonomy
from .tokenizer import clean, tokenize

__all__ = ["annotate_text", "annotate", "export_similarity_table", "validate_record"]


def annotate_text(text: str, lexicon=None, entity_names=None) -> dict:
    """Token/arc/entity payload for one tweet text (without id fields)."""
    lexicon = lexicon or load_lexicon()
    entity_names = entity_names if entity_names is not None else load_entity_names()
    cleaned = clean(text)
    tokens = tokenize(cleaned)
    tagged = tag(tokens, lexicon)
    degraded = False
    try:
        arcs = parse(tagged)
    except ParseOverflow:
        arcs = [(-1, "dep")] * len(tagged)
        degraded = True
    return {
        "tokens": [
            {"t": surface, "lemma": lemma, "pos": pos, "head": head, "deprel": rel}
            for (surface, lemma, pos), (head, rel) in zip(tagged, arcs)
        ],
        "entities": detect(tagged, entity_names),
        "degraded": degraded,
    }


def annotate(input_path, output_path) -> int:
    """Annotate a tweet JSONL file into annotated JSONL, input order
    preserved; returns the number of records written.

    Input records are expected to be preprocessed already; the cleanup
    applied here is idempotent, so clean text passes through untouched.
    """
    lexicon = load_lexicon()
    entity_names = load_entity_names()
    count = 0
    with open(input_path, encoding="utf-8") as src, open(
        output_path, "w", encoding="utf-8"
    ) as dst:
        for lineno, line in enumerate(src, 1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                tweet_id, text = str(obj["id"]), obj["text"]
            except (json.JSONDecodeError, KeyError) as exc:
                raise ValueError(f"{input_path}:{lineno}: bad tweet record: {exc}") from exc
            payload = annotate_text(text, lexicon, entity_names)
            record = {"id": tweet_id, "text": text, "kind": obj.get("kind", "unlabeled")}
            if obj.get("timestamp"):
                record["timestamp"] = obj["timestamp"]
            record.update(payload)
            dst.write(json.dumps(record, ensure_ascii=False) + "\n")
            count += 1
    return count


def export_similarity_table(
    resource_list_path, vocabulary_path, output_path, threshold: float = 0.8
) -> int:
    """Emit word<TAB>resource<TAB>score rows (4 decimals) for every
    vocabulary/resource pair whose taxonomy similarity reaches the
    threshold; words missing from the taxonomy are omitted.  Rows are
    sorted for stable diffs.  Returns the number of rows written.
    """

    def read_words(path):
        out = []
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            line = line.strip()
            if line and not line.startswith("#"):
                out.append(line.split("\t")[-1] if "\t" in line else line)
        return out

    taxonomy = load_taxonomy()
    resources = read_words(resource_list_path)
    vocabulary = read_words(vocabulary_path)
    rows = []
    for word in sorted(set(w.lower() for w in vocabulary)):
        for resource in sorted(set(r.lower() for r in resources)):
            score = 1.0 if word == resource else taxonomy.wu_palmer(word, resource)
            if score is not None and score >= threshold:
                rows.append(f"{word}\t{resource}\t{score:.4f}")
    Path(output_path).write_text("\n".join(rows) + ("\n" if rows else ""), encoding="utf-8")
    return len(rows)


def validate_record(obj: dict) -> list[str]:
    """Schema problems for one annotated record; empty list when valid."""
    problems = []
    tokens = obj.get("tokens")
    if not isinstance(obj.get("id"), str) or not obj["id"]:
        problems.append("id missing")
    if not isinstance(tokens, list):
        return problems + ["tokens missing"]
    n = len(tokens)
    roots = 0
    for i, tok in enumerate(tokens):
        for key in ("t", "lemma", "pos", "head", "deprel"):
            if key not in tok:
                problems.append(f"token {i}: missing {key}")
        head = tok.get("head", -1)
        if head == -1:
            roots += 1
        elif not 0 <= head < n:
            problems.append(f"token {i}: head {head} out of range")
        if head == i:
            problems.append(f"token {i}: self-headed")
    if n and roots == 0 and not obj.get("degraded"):
        problems.append("no root token")
    # acyclicity
    for start in range(n):
        seen = set()
        i = start
        while i != -1 and not problems:
            if i in seen:
                problems.append(f"cycle through token {start}")
                break
            seen.add(i)
            i = tokens[i].get("head", -1)
    last_end = 0
    for span in sorted(obj.get("entities", []), key=lambda s: s["start"]):
        if not 0 <= span["start"] < span["end"] <= n:
            problems.append(f"entity span {span} out of bounds")
        elif span["start"] < last_end:
            problems.append(f"entity span {span} overlaps")
        else:
            last_end = span["end"]
    return problems
