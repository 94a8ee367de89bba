"""Annotated-tweet records: tokens, POS tags, dependency arcs, entities.

This is the boundary contract between the engine and whatever annotation
tool produced the JSONL.  Dependency relation labels follow Universal
Dependencies naming; a few legacy aliases (dobj, pobj, prep, ...) are
normalized on load so older annotators keep working.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

__all__ = [
    "Token",
    "EntitySpan",
    "AnnotationBundle",
    "normalize_deprel",
    "load_annotated",
    "write_annotated",
]

ENTITY_LABELS = ("GPE", "LOC", "FACILITY", "PERSON", "NORP", "ORG", "other")
GEO_ENTITY_LABELS = frozenset({"GPE", "LOC", "FACILITY"})

NOUN_TAGS = frozenset({"NOUN", "PROPN"})

_DEPREL_ALIASES = {
    "dobj": "obj",
    "pobj": "obj",
    "dative": "iobj",
    "nsubjpass": "nsubj:pass",
    "csubjpass": "csubj:pass",
    "relcl": "acl:relcl",
    "poss": "nmod:poss",
    "npadvmod": "obl",
    "attr": "obj",
    "oprd": "xcomp",
}

_ENTITY_ALIASES = {"FAC": "FACILITY"}


def normalize_deprel(rel: str) -> str:
    rel = rel.strip()
    return _DEPREL_ALIASES.get(rel.lower(), rel.lower())


@dataclass(frozen=True)
class Token:
    surface: str
    lemma: str
    pos: str
    head: int  # token index, -1 for a sentence root
    deprel: str

    @property
    def is_noun(self) -> bool:
        return self.pos in NOUN_TAGS


@dataclass(frozen=True)
class EntitySpan:
    start: int  # inclusive token index
    end: int  # exclusive token index
    label: str

    def indices(self) -> range:
        return range(self.start, self.end)


@dataclass
class AnnotationBundle:
    tweet_id: str
    text: str
    kind: str = "unlabeled"
    timestamp: str | None = None
    tokens: list[Token] = field(default_factory=list)
    entities: list[EntitySpan] = field(default_factory=list)
    degraded: bool = False

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        n = len(self.tokens)
        for i, tok in enumerate(self.tokens):
            if tok.head != -1 and not 0 <= tok.head < n:
                raise ValueError(f"{self.tweet_id}: token {i} head {tok.head} out of range")
            if tok.head == i:
                raise ValueError(f"{self.tweet_id}: token {i} is its own head")
        if self.tokens and not self.degraded and not any(t.head == -1 for t in self.tokens):
            raise ValueError(f"{self.tweet_id}: no root token")
        self._check_acyclic()
        last_end = 0
        for span in sorted(self.entities, key=lambda s: s.start):
            if not (0 <= span.start < span.end <= n):
                raise ValueError(f"{self.tweet_id}: entity span {span} out of bounds")
            if span.start < last_end:
                raise ValueError(f"{self.tweet_id}: overlapping entity spans")
            last_end = span.end

    def _check_acyclic(self) -> None:
        for start in range(len(self.tokens)):
            seen = set()
            i = start
            while i != -1:
                if i in seen:
                    raise ValueError(f"{self.tweet_id}: dependency cycle at token {start}")
                seen.add(i)
                i = self.tokens[i].head

    @property
    def clean_text(self) -> str:
        return " ".join(t.surface for t in self.tokens)

    def roots(self) -> list[int]:
        return [i for i, t in enumerate(self.tokens) if t.head == -1]

    def children(self, index: int) -> list[int]:
        return [i for i, t in enumerate(self.tokens) if t.head == index]

    def surface(self, indices) -> str:
        return " ".join(self.tokens[i].surface for i in indices)

    def entity_label_at(self, index: int) -> str | None:
        for span in self.entities:
            if span.start <= index < span.end:
                return span.label
        return None

    def dependency_distance(self, a: int, b: int) -> int | None:
        """Number of arcs on the tree path between two tokens; None when
        they sit in different sentences."""
        if a == b:
            return 0
        path_a: dict[int, int] = {}
        i, d = a, 0
        while i != -1:
            path_a[i] = d
            i, d = self.tokens[i].head, d + 1
        i, d = b, 0
        while i != -1:
            if i in path_a:
                return d + path_a[i]
            i, d = self.tokens[i].head, d + 1
        return None


def _bundle_from_obj(obj: dict) -> AnnotationBundle:
    tokens = [
        Token(
            surface=t["t"],
            lemma=t.get("lemma", t["t"]),
            pos=t.get("pos", "X"),
            head=int(t.get("head", -1)),
            deprel=normalize_deprel(t.get("deprel", "dep")),
        )
        for t in obj.get("tokens", [])
    ]
    entities = [
        EntitySpan(
            int(e["start"]),
            int(e["end"]),
            _ENTITY_ALIASES.get(e.get("label", "other").upper(), e.get("label", "other")),
        )
        for e in obj.get("entities", [])
    ]
    return AnnotationBundle(
        tweet_id=str(obj["id"]),
        text=obj.get("text", ""),
        kind=obj.get("kind", "unlabeled"),
        timestamp=obj.get("timestamp"),
        tokens=tokens,
        entities=entities,
        degraded=bool(obj.get("degraded", False)),
    )


def bundle_to_obj(bundle: AnnotationBundle) -> dict:
    obj = {
        "id": bundle.tweet_id,
        "text": bundle.text,
        "kind": bundle.kind,
    }
    if bundle.timestamp:
        obj["timestamp"] = bundle.timestamp
    obj["tokens"] = [
        {"t": t.surface, "lemma": t.lemma, "pos": t.pos, "head": t.head, "deprel": t.deprel}
        for t in bundle.tokens
    ]
    obj["entities"] = [
        {"start": e.start, "end": e.end, "label": e.label} for e in bundle.entities
    ]
    obj["degraded"] = bundle.degraded
    return obj


def load_annotated(path) -> list[AnnotationBundle]:
    bundles = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                bundles.append(_bundle_from_obj(json.loads(line)))
            except (json.JSONDecodeError, KeyError, ValueError) as exc:
                raise ValueError(f"{path}:{lineno}: bad annotated record: {exc}") from exc
    return bundles


def write_annotated(bundles, path) -> int:
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for b in bundles:
            fh.write(json.dumps(bundle_to_obj(b), ensure_ascii=False) + "\n")
            n += 1
    return n
