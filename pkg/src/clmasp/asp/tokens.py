"""Tokenizer for the ASP fragment.

Recognises identifiers, variables, quoted strings, integers, the rule arrow,
punctuation, comparison and additive arithmetic operators, and the interval
operator. `%` starts a comment running to end of line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import LexError


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    offset: int

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"{self.kind}({self.text!r}@{self.offset})"


# Longest-match alternatives must precede their prefixes (".." before ".",
# ":-" before ":", "<=" before "<").
_TOKEN_SPEC = [
    ("WS", r"[ \t\r\n]+"),
    ("COMMENT", r"%[^\n]*"),
    ("IMPLIES", r":-"),
    ("DOTDOT", r"\.\."),
    ("DOT", r"\."),
    ("COMMA", r","),
    ("SEMI", r";"),
    ("PIPE", r"\|"),
    ("COLON", r":"),
    ("LPAREN", r"\("),
    ("RPAREN", r"\)"),
    ("NEQ", r"!="),
    ("LE", r"<="),
    ("GE", r">="),
    ("EQEQ", r"=="),
    ("EQ", r"="),
    ("LT", r"<"),
    ("GT", r">"),
    ("PLUS", r"\+"),
    ("MINUS", r"-"),
    ("NUMBER", r"\d+"),
    ("STRING", r'"(?:\\.|[^"\\])*"'),
    ("IDENT", r"[a-z][A-Za-z0-9_]*"),
    ("VAR", r"[A-Z_][A-Za-z0-9_]*"),
]

_MASTER = re.compile("|".join(f"(?P<{name}>{pat})" for name, pat in _TOKEN_SPEC))

KEYWORDS = {"not": "NOT"}


def tokenize(text: str) -> list[Token]:
    """Tokenize `text`, skipping whitespace and comments.

    Raises LexError (with the offending offset) on any character outside the
    fragment's alphabet, including unterminated string literals.
    """
    tokens: list[Token] = []
    pos = 0
    n = len(text)
    while pos < n:
        m = _MASTER.match(text, pos)
        if m is None:
            raise LexError(f"illegal character {text[pos]!r}", offset=pos)
        kind = m.lastgroup
        value = m.group()
        if kind not in ("WS", "COMMENT"):
            if kind == "IDENT" and value in KEYWORDS:
                kind = KEYWORDS[value]
            tokens.append(Token(kind, value, pos))
        pos = m.end()
    tokens.append(Token("EOF", "", n))
    return tokens
