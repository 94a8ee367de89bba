"""Deterministic dependency attacher producing Universal Dependencies
style arcs.

This is a rule cascade, not a statistical parser: it finds one root per
sentence, attaches function words locally (case, det, aux, nummod,
amod, compound), links nominals to predicates (nsubj, obj, obl) or to a
preceding nominal (nmod), and chains coordinated items (conj).  Output
is a projective-ish tree: every token gets exactly one head, cycles are
impossible by construction, leftover tokens fall back to "dep" on the
sentence root.
"""

from __future__ import annotations

__all__ = ["ParseOverflow", "parse"]

NOMINAL = ("NOUN", "PROPN", "PRON", "NUM", "X")
SENTENCE_END = {".", "!", "?"}

# Guard for degenerate input; longer sentences degrade to a flat record.
MAX_SENTENCE_TOKENS = 120


class ParseOverflow(RuntimeError):
    pass


def _sentences(tagged) -> list[tuple[int, int]]:
    spans = []
    start = 0
    for i, (surface, _lemma, _pos) in enumerate(tagged):
        if surface in SENTENCE_END:
            spans.append((start, i + 1))
            start = i + 1
    if start < len(tagged):
        spans.append((start, len(tagged)))
    return spans


def _find_root(tagged, lo, hi) -> int:
    for i in range(lo, hi):
        if tagged[i][2] == "VERB":
            return i
    # copular clause: prefer an adjective following an AUX
    for i in range(lo + 1, hi):
        if tagged[i][2] == "ADJ" and tagged[i - 1][2] == "AUX":
            return i
    for pos_want in ("NOUN", "PROPN", "ADJ", "NUM"):
        for i in range(lo, hi):
            if tagged[i][2] == pos_want:
                return i
    return lo


def _next_of(tagged, i, hi, kinds) -> int | None:
    for j in range(i + 1, hi):
        if tagged[j][2] in kinds:
            return j
    return None


def _nominal_head_right(tagged, i, hi) -> int | None:
    """Head of the nominal group starting at/after i: the last token of a
    contiguous NOUN/PROPN/NUM/ADJ/DET run that is a noun."""
    j = i
    while j < hi and tagged[j][2] in ("DET", "ADJ", "NUM", "NOUN", "PROPN", "ADV"):
        j += 1
    for k in range(j - 1, i - 1, -1):
        if tagged[k][2] in ("NOUN", "PROPN", "NUM", "PRON"):
            return k
    return None


def _parse_sentence(tagged, lo, hi, heads, rels) -> None:
    if hi - lo > MAX_SENTENCE_TOKENS:
        raise ParseOverflow(f"sentence of {hi - lo} tokens")
    root = _find_root(tagged, lo, hi)
    heads[root] = -1
    rels[root] = "root"
    verbs = [i for i in range(lo, hi) if tagged[i][2] == "VERB" or i == root]

    def attach(i: int, h: int, rel: str) -> None:
        """Set head[i]=h unless that would close a cycle; fall back to
        the sentence root then (keeps the output a tree by construction)."""
        cur = h
        while cur is not None and cur != -1:
            if cur == i:
                heads[i] = root if i != root else -1
                rels[i] = "advcl" if rel in ("acl", "advcl") else "dep"
                return
            cur = heads[cur]
        heads[i], rels[i] = h, rel

    def nearest_verb(i: int) -> int:
        best = root
        best_d = abs(i - root)
        for v in verbs:
            if abs(i - v) < best_d:
                best, best_d = v, abs(i - v)
        return best

    # Pass 1: local function-word attachments.
    for i in range(lo, hi):
        surface, _lemma, pos = tagged[i]
        if heads[i] is not None:
            continue
        if pos == "DET":
            j = _nominal_head_right(tagged, i + 1, hi)
            if j is not None:
                attach(i, j, "det")
        elif pos == "NUM":
            j = _nominal_head_right(tagged, i + 1, hi)
            if j is not None and j - i <= 3:
                attach(i, j, "nummod")
        elif pos == "ADJ":
            j = _nominal_head_right(tagged, i + 1, hi)
            if j is not None and j - i <= 3:
                attach(i, j, "amod")
        elif pos == "ADP":
            j = _nominal_head_right(tagged, i + 1, hi)
            if j is not None:
                attach(i, j, "case")
            else:
                attach(i, nearest_verb(i), "advmod")
        elif pos == "AUX":
            j = _next_of(tagged, i, hi, ("VERB",))
            if j is not None and j - i <= 3:
                attach(i, j, "aux")
            else:
                k = _next_of(tagged, i, hi, ("ADJ", "NOUN", "PROPN"))
                if k is not None:
                    attach(i, k, "cop")
        elif pos == "ADV":
            attach(i, nearest_verb(i), "advmod")
        elif pos in ("PART", "INTJ", "SCONJ"):
            attach(i, nearest_verb(i), {"PART": "advmod", "INTJ": "discourse", "SCONJ": "mark"}[pos])

    # Pass 2: noun compounds (nominal directly before another nominal).
    for i in range(lo, hi - 1):
        if heads[i] is not None:
            continue
        if tagged[i][2] in ("NOUN", "PROPN") and tagged[i + 1][2] in ("NOUN", "PROPN"):
            j = i + 1
            while j + 1 < hi and tagged[j + 1][2] in ("NOUN", "PROPN") and heads[j] is None:
                j += 1
            if j < hi and j != i:
                attach(i, j, "compound")

    def group_start(i: int) -> int:
        """First token of the nominal group headed at i (skips preceding
        determiners, numerals, adjectives and compounds attached to i)."""
        k = i
        while k - 1 >= lo:
            prev_pos = tagged[k - 1][2]
            if prev_pos in ("DET", "NUM", "ADJ") and heads[k - 1] in (i, None):
                k -= 1
            elif prev_pos in ("NOUN", "PROPN") and heads[k - 1] == i and rels[k - 1] == "compound":
                k -= 1
            else:
                break
        return k

    # Pass 3: clause-level nominal attachment.
    first_obj_seen = False
    last_nominal = None
    for i in range(lo, hi):
        surface, _lemma, pos = tagged[i]
        if heads[i] is not None or i == root:
            if pos in ("NOUN", "PROPN", "PRON") and (heads[i] is None or rels[i] != "compound"):
                last_nominal = i
            continue
        if pos in ("NOUN", "PROPN", "PRON", "NUM", "X"):
            start = group_start(i)
            before = tagged[start - 1] if start - 1 >= lo else None
            has_case = any(
                heads[k] == i and rels[k] == "case" for k in range(lo, i)
            )
            if (
                before is not None
                and (before[0] == "," or before[2] == "CCONJ")
                and not has_case
                and last_nominal is not None
                and last_nominal != i
            ):
                # UD attaches every conjunct to the first one in the chain.
                anchor = last_nominal
                while rels[anchor] == "conj" and heads[anchor] is not None and heads[anchor] >= 0:
                    anchor = heads[anchor]
                attach(i, anchor, "conj")
                last_nominal = i
                continue
            if has_case:
                case_idx = max(k for k in range(lo, i) if heads[k] == i and rels[k] == "case")
                anchor = None
                for k in range(case_idx - 1, lo - 1, -1):
                    if tagged[k][2] in ("NOUN", "PROPN"):
                        anchor = k
                        break
                    if tagged[k][2] == "VERB" or k == root:
                        break
                if anchor is not None and rels[anchor] != "case":
                    attach(i, anchor, "nmod")
                else:
                    attach(i, nearest_verb(i), "obl")
            elif i < root:
                attach(i, root, "nsubj")
            elif not first_obj_seen:
                attach(i, nearest_verb(i), "obj")
                first_obj_seen = True
            else:
                attach(i, nearest_verb(i), "obl")
            last_nominal = i

    # Pass 4: secondary verbs (participles, coordinated clauses).
    for i in range(lo, hi):
        if heads[i] is not None or i == root:
            continue
        if tagged[i][2] == "VERB":
            prev = tagged[i - 1] if i > lo else None
            if prev is not None and prev[2] == "CCONJ":
                attach(i, root, "conj")
            elif tagged[i][0].endswith("ing") or tagged[i][0].endswith("ed"):
                anchor = None
                for k in range(i - 1, lo - 1, -1):
                    if tagged[k][2] in ("NOUN", "PROPN"):
                        anchor = k
                        break
                attach(i, anchor, "acl") if anchor is not None else attach(i, root, "advcl")
            else:
                attach(i, root, "conj")

    # Pass 5: punctuation and anything left.
    for i in range(lo, hi):
        if heads[i] is None:
            if tagged[i][2] == "PUNCT":
                attach(i, root, "punct")
            else:
                attach(i, root, "dep")

    # CCONJ attaches to the following conjunct per UD.
    for i in range(lo, hi):
        if tagged[i][2] == "CCONJ":
            j = None
            for k in range(i + 1, hi):
                if rels[k] == "conj":
                    j = k
                    break
            attach(i, j, "cc") if j is not None else attach(i, root, "cc")


def parse(tagged: list[tuple[str, str, str]]) -> list[tuple[int, str]]:
    """(head, deprel) per token; raises ParseOverflow on absurd input."""
    n = len(tagged)
    heads: list[int | None] = [None] * n
    rels: list[str | None] = [None] * n
    for lo, hi in _sentences(tagged):
        _parse_sentence(tagged, lo, hi, heads, rels)
    return [(h if h is not None else -1, r or "dep") for h, r in zip(heads, rels)]
