"""Tokenizer for ``.chq`` scenario files.

Statements end at a newline unless a bracket, brace or parenthesis is
still open, which lets matrix literals span several lines.  ``#`` starts
a comment that runs to the end of the line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from ..errors import ParseError

NAME, NUMBER, IMAG, STRING, OP, NEWLINE, EOF = "NAME", "NUMBER", "IMAG", "STRING", "OP", "NEWLINE", "EOF"

_OPENERS = {"(": ")", "[": "]", "{": "}"}
_CLOSERS = {v: k for k, v in _OPENERS.items()}

_NUMBER_RE = re.compile(r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")
_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_STRING_RE = re.compile(r'"([^"\\\n]*)"')
_OPS = ("->", "(", ")", "[", "]", "{", "}", ",", ":", "=", "+", "-", "*", "/", "@", ".")


@dataclass(frozen=True)
class Token:
    kind: str
    value: Union[str, float]
    line: int
    column: int

    def describe(self) -> str:
        if self.kind == NEWLINE:
            return "end of line"
        if self.kind == EOF:
            return "end of input"
        if self.kind == STRING:
            return f'"{self.value}"'
        return repr(self.value) if self.kind != NUMBER else str(self.value)


def decode(source: Union[str, bytes]) -> str:
    if isinstance(source, str):
        return source
    try:
        return source.decode("utf-8")
    except UnicodeDecodeError as exc:
        prefix = source[: exc.start]
        line = prefix.count(b"\n") + 1
        column = exc.start - (prefix.rfind(b"\n") + 1) + 1
        raise ParseError(line, column, f"invalid UTF-8 byte 0x{source[exc.start]:02x}") from None


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    stack: list[Token] = []
    line, col_base, i, n = 1, 0, 0, len(text)
    while i < n:
        ch = text[i]
        col = i - col_base + 1
        if ch == "\n":
            if not stack and tokens and tokens[-1].kind != NEWLINE:
                tokens.append(Token(NEWLINE, "\n", line, col))
            line += 1
            i += 1
            col_base = i
            continue
        if ch in " \t\r":
            i += 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        m = _NUMBER_RE.match(text, i)
        if m and (ch.isdigit() or ch == "."):
            j = m.end()
            try:
                value = float(m.group())
            except ValueError:
                raise ParseError(line, col, f"malformed number {m.group()!r}") from None
            if value != value or value in (float("inf"), float("-inf")):
                raise ParseError(line, col, f"number {m.group()!r} is not finite")
            if j < n and text[j] == "i" and not (j + 1 < n and (text[j + 1].isalnum() or text[j + 1] == "_")):
                tokens.append(Token(IMAG, value, line, col))
                j += 1
            elif j < n and (text[j].isalpha() or text[j] == "_"):
                raise ParseError(line, col + j - i, f"unexpected character {text[j]!r} after number")
            else:
                tokens.append(Token(NUMBER, value, line, col))
            i = j
            continue
        m = _NAME_RE.match(text, i)
        if m:
            tokens.append(Token(NAME, m.group(), line, col))
            i = m.end()
            continue
        if ch == '"':
            m = _STRING_RE.match(text, i)
            if not m:
                raise ParseError(line, col, "unterminated string", 'closing "')
            tokens.append(Token(STRING, m.group(1), line, col))
            i = m.end()
            continue
        for op in _OPS:
            if text.startswith(op, i):
                tok = Token(OP, op, line, col)
                if op in _OPENERS:
                    stack.append(tok)
                elif op in _CLOSERS:
                    if not stack:
                        raise ParseError(line, col, f"unmatched {op!r}")
                    if stack[-1].value != _CLOSERS[op]:
                        o = stack[-1]
                        raise ParseError(
                            line, col, f"{op!r} does not close {o.value!r} opened at line {o.line}, column {o.column}",
                            repr(_OPENERS[o.value]),
                        )
                    stack.pop()
                tokens.append(tok)
                i += len(op)
                break
        else:
            raise ParseError(line, col, f"unexpected character {ch!r}")
    if stack:
        o = stack[-1]
        raise ParseError(o.line, o.column, f"unterminated {o.value!r}", repr(_OPENERS[o.value]))
    col = n - col_base + 1
    if tokens and tokens[-1].kind != NEWLINE:
        tokens.append(Token(NEWLINE, "\n", line, col))
    tokens.append(Token(EOF, "", line, col))
    return tokens
