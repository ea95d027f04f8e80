"""Tokenizer for the supported C subset.

Comments and preprocessor directive lines are dropped; everything else is
emitted as a flat token stream with 1-based line/column positions.
String/char literals keep their exact source lexeme, quotes included.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import LexError

KEYWORDS = frozenset(
    """
    auto break case char const continue default do double else enum extern
    float for goto if inline int long register restrict return short signed
    sizeof static struct switch typedef union unsigned void volatile while
    _Bool _Complex _Atomic _Noreturn
    """.split()
)

# Longest-match-first operator table. `...` is scanned before `.`.
OPERATORS = (
    "<<=", ">>=",
    "->", "++", "--", "<<", ">>", "<=", ">=", "==", "!=", "&&", "||",
    "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=",
    "=", "+", "-", "*", "/", "%", "<", ">", "&", "|", "^", "~", "!", "?", ".",
)
PUNCTUATORS = ("...", "(", ")", "{", "}", "[", "]", ";", ",", ":")

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_HEX_RE = re.compile(r"0[xX][0-9a-fA-F]+[uUlL]*")
_BIN_RE = re.compile(r"0[bB][01]+[uUlL]*")
_FLOAT_RE = re.compile(r"(?:\d+\.\d*|\.\d+)(?:[eE][+-]?\d+)?[fFlL]?|\d+[eE][+-]?\d+[fFlL]?")
_INT_RE = re.compile(r"\d+[uUlL]*")
_SYMBOL_RE = re.compile(
    "|".join(re.escape(s) for s in sorted(OPERATORS + PUNCTUATORS, key=len, reverse=True))
)
_PUNCT_SET = frozenset(PUNCTUATORS)


@dataclass(frozen=True)
class Token:
    kind: str  # identifier | keyword | integer_literal | float_literal |
    #            char_literal | string_literal | punctuator | operator
    text: str
    line: int
    column: int

    def __repr__(self):
        return f"Token({self.kind}, {self.text!r}, {self.line}:{self.column})"


def strip_directives(source: str) -> str:
    """Blank out preprocessor directive lines, preserving line numbers.

    A directive is a line whose first non-whitespace character is '#';
    backslash continuations extend it over following lines.
    """
    out = []
    in_directive = False
    for line in source.splitlines(keepends=True):
        if in_directive or line.lstrip().startswith("#"):
            in_directive = line.rstrip("\r\n").endswith("\\")
            out.append("\n" if line.endswith("\n") else "")
        else:
            in_directive = False
            out.append(line)
    return "".join(out)


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.col = 1

    def advance(self, n: int):
        chunk = self.text[self.pos : self.pos + n]
        newlines = chunk.count("\n")
        if newlines:
            self.line += newlines
            self.col = n - chunk.rfind("\n")
        else:
            self.col += n
        self.pos += n

    def error(self, message):
        raise LexError(message, self.line, self.col)

    def scan_quoted(self, quote: str, what: str) -> str:
        start = self.pos
        i = self.pos + 1
        text = self.text
        while i < len(text):
            ch = text[i]
            if ch == "\\":
                i += 2
                continue
            if ch == "\n":
                break
            if ch == quote:
                return text[start : i + 1]
            i += 1
        self.error(f"unterminated {what} literal")


def tokenize(source: str) -> list[Token]:
    """Lex C source into tokens; raises LexError with a position on failure."""
    text = strip_directives(source)
    sc = _Scanner(text)
    tokens: list[Token] = []
    n = len(text)
    while sc.pos < n:
        ch = text[sc.pos]
        if ch in " \t\r\n\f\v":
            sc.advance(1)
            continue
        if text.startswith("//", sc.pos):
            end = text.find("\n", sc.pos)
            sc.advance((end if end != -1 else n) - sc.pos)
            continue
        if text.startswith("/*", sc.pos):
            end = text.find("*/", sc.pos + 2)
            if end == -1:
                sc.error("unterminated block comment")
            sc.advance(end + 2 - sc.pos)
            continue
        line, col = sc.line, sc.col
        if ch == '"':
            lexeme = sc.scan_quoted('"', "string")
            tokens.append(Token("string_literal", lexeme, line, col))
            sc.advance(len(lexeme))
            continue
        if ch == "'":
            lexeme = sc.scan_quoted("'", "char")
            if lexeme == "''":
                sc.error("empty char literal")
            tokens.append(Token("char_literal", lexeme, line, col))
            sc.advance(len(lexeme))
            continue
        m = _IDENT_RE.match(text, sc.pos)
        if m:
            word = m.group()
            kind = "keyword" if word in KEYWORDS else "identifier"
            tokens.append(Token(kind, word, line, col))
            sc.advance(len(word))
            continue
        if ch.isdigit() or (ch == "." and sc.pos + 1 < n and text[sc.pos + 1].isdigit()):
            for pattern, kind in (
                (_HEX_RE, "integer_literal"),
                (_BIN_RE, "integer_literal"),
                (_FLOAT_RE, "float_literal"),
                (_INT_RE, "integer_literal"),
            ):
                m = pattern.match(text, sc.pos)
                if m:
                    tokens.append(Token(kind, m.group(), line, col))
                    sc.advance(len(m.group()))
                    break
            else:
                sc.error(f"malformed number starting at {ch!r}")
            continue
        m = _SYMBOL_RE.match(text, sc.pos)
        if m:
            sym = m.group()
            kind = "punctuator" if sym in _PUNCT_SET else "operator"
            tokens.append(Token(kind, sym, line, col))
            sc.advance(len(sym))
            continue
        sc.error(f"illegal character {ch!r}")
    return tokens
