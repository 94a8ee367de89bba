"""Tweet text cleanup and tokenization.

Cleanup mirrors the conventions of the annotated-JSONL contract: URLs,
@-mentions, RT markers, hash/ampersand/bracket characters, ellipses and
non-ASCII codepoints go away, email addresses survive, CamelCase and
letter/digit joints split, case never folds.  Cleanup is idempotent, so
already-clean input passes through unchanged.
"""

from __future__ import annotations

import html
import re

__all__ = ["clean", "tokenize"]

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

# One token: email, number (with separators), hyphenated word, word with
# apostrophe, or a single punctuation/symbol character.
_TOKEN_RE = re.compile(
    r"[A-Za-z0-9][A-Za-z0-9_.]*@[A-Za-z0-9_.]+\.[A-Za-z]{2,6}"  # email
    r"|\+?\d[\d,]*(?:\.\d+)?(?:-\d[\d,]*)?"  # numbers, ranges, phone chunks
    r"|[A-Za-z]+(?:['-][A-Za-z]+)*"  # words, wi-fi, don't
    r"|[^\sA-Za-z0-9]"  # single punctuation mark
)


def clean(text: str) -> str:
    text = html.unescape(text)
    text = text.replace("\x00", " ")
    text = _NON_ASCII_RE.sub("", text)
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
    text = _RT_RE.sub(" ", text)
    text = re.sub(r"\x00(\d+)\x00", lambda m: emails[int(m.group(1))], text)
    return _WS_RE.sub(" ", text).strip()


def tokenize(clean_text: str) -> list[str]:
    return _TOKEN_RE.findall(clean_text)
