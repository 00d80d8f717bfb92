"""
Parser for the linear constraint DSL, e.g. "x0 + x1 <= 1" or "2*x0 - x3 > 0".

Strict senses are shifted onto integer bounds: "< b" becomes "<= b-1" and
"> b" becomes ">= b+1".
"""
import re
from typing import Dict, List, Optional, Sequence, Tuple

from .problem import LinearConstraint, Sense

_TOKEN = re.compile(r"\s*(?:(?P<var>x\d+)|(?P<int>\d+)|(?P<sense><=|>=|==|=|<|>)|(?P<op>[+\-*]))")

_SENSES = {
    "=": (Sense.EQ, 0),
    "==": (Sense.EQ, 0),
    "<=": (Sense.LE, 0),
    ">=": (Sense.GE, 0),
    "<": (Sense.LE, -1),
    ">": (Sense.GE, 1),
}


class ConstraintParseError(ValueError):
    def __init__(self, message: str, text: str, position: int):
        self.text = text
        self.position = position
        super().__init__(f"{message} at position {position}: {text!r}")


def _tokenize(text: str) -> List[Tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        match = _TOKEN.match(text, pos)
        if not match:
            start = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ConstraintParseError(f"Unexpected character {text[start]!r}", text, start)
        kind = match.lastgroup
        tokens.append((kind, match.group(kind), match.start(kind)))
        pos = match.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> Tuple[str, str, int]:
        return self.tokens[self.i]

    def take(self) -> Tuple[str, str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, message: str, tok: Tuple[str, str, int]):
        raise ConstraintParseError(message, self.text, tok[2])

    def term(self, sign: int, coeffs: Dict[int, int]) -> None:
        kind, value, _ = tok = self.take()
        factor = 1
        if kind == "int":
            factor = int(value)
            if self.peek()[:2] == ("op", "*"):
                self.take()
            kind, value, _ = tok = self.take()
        if kind != "var":
            self.fail("Expected a variable like x0", tok)
        idx = int(value[1:])
        coeffs[idx] = coeffs.get(idx, 0) + sign * factor

    def signed_int(self) -> int:
        sign = 1
        if self.peek()[0] == "op" and self.peek()[1] in "+-":
            sign = -1 if self.take()[1] == "-" else 1
        tok = self.take()
        if tok[0] != "int":
            self.fail("Expected an integer right-hand side", tok)
        return sign * int(tok[1])

    def constraint(self) -> Tuple[Dict[int, int], Sense, int]:
        coeffs: Dict[int, int] = {}
        sign = 1
        if self.peek()[0] == "op" and self.peek()[1] in "+-":
            sign = -1 if self.take()[1] == "-" else 1
        self.term(sign, coeffs)
        while self.peek()[0] == "op":
            tok = self.take()
            if tok[1] not in "+-":
                self.fail(f"Unexpected operator {tok[1]!r}", tok)
            self.term(-1 if tok[1] == "-" else 1, coeffs)
        tok = self.take()
        if tok[0] != "sense":
            self.fail("Expected one of =, <=, >=, <, >", tok)
        sense, shift = _SENSES[tok[1]]
        rhs = self.signed_int() + shift
        tok = self.peek()
        if tok[0] != "end":
            self.fail(f"Unexpected trailing {tok[1]!r}", tok)
        if not any(coeffs.values()):
            raise ConstraintParseError("Constraint has an empty support", self.text, 0)
        return coeffs, sense, rhs


def parse_constraint(text: str, n: Optional[int] = None) -> LinearConstraint:
    return parse_constraints([text], n)[0]


def parse_constraints(texts: Sequence[str], n: Optional[int] = None) -> List[LinearConstraint]:
    """Parse several constraints onto a common variable count (max index + 1 unless n is given)."""
    parsed = [_Parser(t).constraint() for t in texts]
    width = max((max(c) + 1 for c, _, _ in parsed), default=0)
    if n is not None:
        if n < width:
            raise ValueError(f"Constraints reference x{width - 1} but only n={n} variables were declared")
        width = n
    out = []
    for coeffs, sense, rhs in parsed:
        full = [0] * width
        for idx, c in coeffs.items():
            full[idx] = c
        out.append(LinearConstraint(tuple(full), sense, rhs))
    return out


def split_constraints(text: str) -> List[str]:
    """'x0 + x1 = 1; x0 + x2 = 1' -> one string per constraint."""
    return [part.strip() for part in text.split(";") if part.strip()]
