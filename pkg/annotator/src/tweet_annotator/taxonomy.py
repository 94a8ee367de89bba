"""Wu-Palmer similarity over the committed noun taxonomy.

Each taxonomy node carries synonym lemmas; a word can map to several
nodes, and pair similarity takes the maximum over node pairs:
    wup(a, b) = 2 * depth(lcs) / (depth(a) + depth(b))
with the root at depth 1.  Words absent from the taxonomy have no
similarity to anything (callers omit those pairs).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources as importlib_resources

__all__ = ["Taxonomy", "load_taxonomy"]


def _normalize(word: str) -> str:
    w = word.strip().lower()
    if len(w) > 3 and w.endswith("ies"):
        return w[:-3] + "y"
    if len(w) > 3 and w.endswith("es") and w[-3] in "sxzh":
        return w[:-2]
    if len(w) > 2 and w.endswith("s") and not w.endswith("ss"):
        return w[:-1]
    return w


@dataclass
class Taxonomy:
    parent: dict[str, str | None] = field(default_factory=dict)
    senses: dict[str, list[str]] = field(default_factory=dict)
    _depth: dict[str, int] = field(default_factory=dict)

    def depth(self, node: str) -> int:
        if node not in self._depth:
            p = self.parent[node]
            self._depth[node] = 1 if p is None else self.depth(p) + 1
        return self._depth[node]

    def _ancestors(self, node: str) -> list[str]:
        chain = [node]
        while self.parent[chain[-1]] is not None:
            chain.append(self.parent[chain[-1]])
        return chain

    def nodes_for(self, word: str) -> list[str]:
        """Taxonomy nodes a surface word maps to (lemma-normalized);
        multi-word phrases normalize their last word only."""
        phrase = word.strip().lower()
        if not phrase:
            return []
        words = phrase.split()
        key = " ".join(words[:-1] + [_normalize(words[-1])]) if words else phrase
        return self.senses.get(key, self.senses.get(phrase, []))

    def wu_palmer(self, a: str, b: str) -> float | None:
        """Max Wu-Palmer similarity over sense pairs; None when either
        word is absent from the taxonomy."""
        nodes_a = self.nodes_for(a)
        nodes_b = self.nodes_for(b)
        if not nodes_a or not nodes_b:
            return None
        best = 0.0
        for na in nodes_a:
            chain_a = self._ancestors(na)
            rank_a = {node: i for i, node in enumerate(chain_a)}
            for nb in nodes_b:
                lcs = None
                node = nb
                while node is not None:
                    if node in rank_a:
                        lcs = node
                        break
                    node = self.parent[node]
                if lcs is None:
                    continue
                score = 2.0 * self.depth(lcs) / (self.depth(na) + self.depth(nb))
                best = max(best, score)
        return best


def load_taxonomy() -> Taxonomy:
    path = importlib_resources.files("tweet_annotator") / "data" / "taxonomy.tsv"
    tax = Taxonomy()
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.rstrip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        node, parent = parts[0], parts[1]
        tax.parent[node] = None if parent == "-" else parent
        synonyms = parts[2].split(",") if len(parts) > 2 and parts[2] else []
        for syn in [node] + synonyms:
            syn = syn.strip().lower()
            if syn:
                tax.senses.setdefault(syn, [])
                if node not in tax.senses[syn]:
                    tax.senses[syn].append(node)
    missing = [n for p in tax.parent.values() if p is not None and p not in tax.parent for n in [p]]
    if missing:
        raise ValueError(f"taxonomy refers to undefined parents: {missing}")
    return tax
