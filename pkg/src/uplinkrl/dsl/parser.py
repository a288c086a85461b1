"""Tokenizer and recursive-descent parser for reward expressions.

Grammar (binary operators left-associative):

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-' factor | atom
    atom   := NUMBER | IDENT | IDENT '(' expr (',' expr)* ')' | '(' expr ')'

Unary minus binds tighter than '*' and '/', so "-a * b" is (-a) * b.
Error positions are zero-based offsets into the source text.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional, Sequence

from ..errors import DslSyntaxError, UnknownFeatureError
from .nodes import FUNCTIONS, MAX_DEPTH, BinOp, Const, Expr, Feature, Func, Neg

_TOKEN_RE = re.compile(
    r"""
    (?P<num>(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[+\-*/(),])
  | (?P<ws>\s+)
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # 'num', 'ident', 'op', 'end'
    text: str
    pos: int


def tokenize(source: str) -> list:
    tokens = []
    pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise DslSyntaxError(f"unexpected character {source[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(Token(kind, m.group(), pos))
        pos = m.end()
    tokens.append(Token("end", "", len(source)))
    return tokens


class _Parser:
    def __init__(self, source: str, schema: Optional[Sequence[str]]):
        self.source = source
        self.tokens = tokenize(source)
        self.i = 0
        self.schema = set(schema) if schema is not None else None

    def peek(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, text: str) -> Token:
        tok = self.peek()
        if tok.kind != "op" or tok.text != text:
            raise DslSyntaxError(f"expected {text!r}, found {tok.text or 'end of input'!r}", tok.pos)
        return self.advance()

    def parse(self) -> Expr:
        expr = self.expr(1)
        tok = self.peek()
        if tok.kind != "end":
            raise DslSyntaxError(f"unexpected trailing input {tok.text!r}", tok.pos)
        return expr

    def _check_depth(self, d: int, pos: int) -> None:
        if d > MAX_DEPTH:
            raise DslSyntaxError(f"expression nests deeper than {MAX_DEPTH} levels", pos)

    def expr(self, d: int) -> Expr:
        self._check_depth(d, self.peek().pos)
        node = self.term(d + 1)
        while self.peek().kind == "op" and self.peek().text in "+-":
            op = self.advance().text
            rhs = self.term(d + 1)
            node = BinOp(op, node, rhs)
        return node

    def term(self, d: int) -> Expr:
        self._check_depth(d, self.peek().pos)
        node = self.factor(d + 1)
        while self.peek().kind == "op" and self.peek().text in "*/":
            op = self.advance().text
            rhs = self.factor(d + 1)
            node = BinOp(op, node, rhs)
        return node

    def factor(self, d: int) -> Expr:
        self._check_depth(d, self.peek().pos)
        tok = self.peek()
        if tok.kind == "op" and tok.text == "-":
            self.advance()
            return Neg(self.factor(d + 1))
        return self.atom(d + 1)

    def atom(self, d: int) -> Expr:
        self._check_depth(d, self.peek().pos)
        tok = self.advance()
        if tok.kind == "num":
            return Const(float(tok.text))
        if tok.kind == "ident":
            if self.peek().kind == "op" and self.peek().text == "(":
                return self.call(tok, d)
            if tok.text in FUNCTIONS:
                raise DslSyntaxError(f"function {tok.text!r} used without arguments", tok.pos)
            if self.schema is not None and tok.text not in self.schema:
                raise UnknownFeatureError(
                    f"unknown feature {tok.text!r} (position {tok.pos})"
                )
            return Feature(tok.text)
        if tok.kind == "op" and tok.text == "(":
            inner = self.expr(d + 1)
            self.expect_op(")")
            return inner
        found = tok.text or "end of input"
        raise DslSyntaxError(f"expected a value, found {found!r}", tok.pos)

    def call(self, name_tok: Token, d: int) -> Expr:
        name = name_tok.text
        if name not in FUNCTIONS:
            raise DslSyntaxError(f"unknown function {name!r}", name_tok.pos)
        self.expect_op("(")
        args = [self.expr(d + 1)]
        while self.peek().kind == "op" and self.peek().text == ",":
            self.advance()
            args.append(self.expr(d + 1))
        self.expect_op(")")
        arity = FUNCTIONS[name]
        if len(args) != arity:
            raise DslSyntaxError(
                f"{name} takes {arity} argument{'s' if arity != 1 else ''}, got {len(args)}",
                name_tok.pos,
            )
        return Func(name, tuple(args))


def parse(source: str, schema: Optional[Sequence[str]] = None) -> Expr:
    """Parse source text into an AST.

    With a schema, identifiers that are not function names must be listed
    in it; without one, resolution is deferred to validate/evaluate.
    """
    return _Parser(source, schema).parse()
