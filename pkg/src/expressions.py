# src/expressions.py
from __future__ import annotations

import regex as re
from typing import Dict, List, Sequence, Tuple

# Tokens of a divisor expression such as 4H-2(R1+R2+R3)-R4:
# - integers
# - basis labels (letter followed by optional digits: H, P, Q, R12, D3)
# - operators and parentheses
TOKEN_RE = re.compile(
    r"""
    (?P<num>\p{N}+)
    |
    (?P<name>\p{L}\p{N}*)
    |
    (?P<op>[+\-()*])
    |
    (?P<space>\s+)
    """,
    re.VERBOSE | re.UNICODE,
)

INT_LIST_RE = re.compile(r"-?\p{N}+", re.UNICODE)


class ExpressionError(ValueError):
    pass


def normalize_text(s: str) -> str:
    s = s.replace("−", "-")      # minus sign
    s = s.replace("–", "-")      # en dash
    s = s.replace(" ", " ")      # nbsp
    s = s.replace("·", "*")      # middle dot
    return re.sub(r"\s+", " ", s).strip()


def tokenize(expr: str) -> List[Tuple[str, str]]:
    text = normalize_text(expr)
    tokens: List[Tuple[str, str]] = []
    pos = 0
    while pos < len(text):
        m = TOKEN_RE.match(text, pos)
        if m is None:
            raise ExpressionError(f"unexpected character {text[pos]!r} in {expr!r}")
        pos = m.end()
        kind = m.lastgroup
        if kind != "space":
            tokens.append((kind, m.group(0)))
    return tokens


class _Parser:
    def __init__(self, tokens: List[Tuple[str, str]], labels: Sequence[str], source: str):
        self.tokens = tokens
        self.pos = 0
        self.labels = {lab.upper(): lab for lab in labels}
        self.source = source

    def peek(self) -> Tuple[str, str]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else ("end", "")

    def take(self) -> Tuple[str, str]:
        tok = self.peek()
        self.pos += 1
        return tok

    def fail(self, msg: str) -> ExpressionError:
        return ExpressionError(f"{msg} in {self.source!r}")

    def expr(self) -> Dict[str, int]:
        total: Dict[str, int] = {}
        sign = 1
        if self.peek() in (("op", "+"), ("op", "-")):
            sign = -1 if self.take()[1] == "-" else 1
        while True:
            for k, v in self.term().items():
                total[k] = total.get(k, 0) + sign * v
            nxt = self.peek()
            if nxt in (("op", "+"), ("op", "-")):
                self.take()
                sign = -1 if nxt[1] == "-" else 1
                continue
            return total

    def term(self) -> Dict[str, int]:
        coeff = 1
        kind, text = self.peek()
        if kind == "num":
            self.take()
            coeff = int(text)
            if self.peek() == ("op", "*"):
                self.take()
            kind, text = self.peek()
        if kind == "name":
            self.take()
            key = text.upper()
            if key not in self.labels:
                raise self.fail(f"unknown basis element {text!r}")
            return {self.labels[key]: coeff}
        if (kind, text) == ("op", "("):
            self.take()
            inner = self.expr()
            if self.take() != ("op", ")"):
                raise self.fail("missing ')'")
            return {k: coeff * v for k, v in inner.items()}
        if coeff != 1 or kind == "num":
            raise self.fail("bare integer without a basis element")
        raise self.fail(f"unexpected token {text!r}")


def parse_linear(expr: str, labels: Sequence[str]) -> Dict[str, int]:
    """
    Parse an integer linear combination of basis labels.

    >>> parse_linear("4H-2(R1+R2)-R3", ["H", "R1", "R2", "R3"])
    {'H': 4, 'R1': -2, 'R2': -2, 'R3': -1}
    """
    tokens = tokenize(expr)
    if not tokens:
        raise ExpressionError("empty expression")
    if tokens == [("num", "0")]:
        return {}
    parser = _Parser(tokens, labels, expr)
    out = parser.expr()
    if parser.pos != len(tokens):
        raise parser.fail(f"trailing input {parser.peek()[1]!r}")
    return {k: v for k, v in out.items() if v != 0}


def parse_vector(expr: str, labels: Sequence[str]) -> List[int]:
    coeffs = parse_linear(expr, labels)
    return [coeffs.get(lab, 0) for lab in labels]


def parse_int_list(text: str) -> List[int]:
    """
    '-2,-2,-1,-3' or '(-2, -2, -1)' or unicode minus variants -> list of ints.
    """
    text = normalize_text(text)
    vals = [int(m.group(0)) for m in INT_LIST_RE.finditer(text)]
    if not vals:
        raise ExpressionError(f"no integers found in {text!r}")
    return vals
