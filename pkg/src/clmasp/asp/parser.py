"""Recursive-descent parser for the ASP fragment.

Accepted statements: facts (with `;` argument pooling and `..` intervals),
disjunctive fact lines whose heads are separated by `,`, `;` or `|`, normal
rules, integrity constraints, conditional body literals with `:` guards,
comparisons, and additive arithmetic. Anything else, including trailing
natural-language prose, raises ParseError with the failing offset.
"""

from __future__ import annotations

from .errors import LexError, ParseError
from .syntax import (
    Atom,
    Bin,
    Comparison,
    CondLiteral,
    Interval,
    Neg,
    NotLit,
    Num,
    Program,
    Rule,
    StrConst,
    SymConst,
    Term,
    Var,
)
from .tokens import Token, tokenize

_COMPARISON_OPS = {
    "EQ": "=",
    "NEQ": "!=",
    "LT": "<",
    "GT": ">",
    "LE": "<=",
    "GE": ">=",
    "EQEQ": "==",
}

_HEAD_SEPARATORS = ("COMMA", "SEMI", "PIPE")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.pos = 0
        self.anon_count = 0

    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def accept(self, kind: str) -> Token | None:
        if self.peek().kind == kind:
            return self.advance()
        return None

    def expect(self, *kinds: str) -> Token:
        tok = self.peek()
        if tok.kind in kinds:
            return self.advance()
        raise ParseError(
            f"expected {' or '.join(sorted(kinds))}, found {tok.kind} {tok.text!r}",
            offset=tok.offset,
            expected=frozenset(kinds),
        )

    def fail(self, message: str, expected: frozenset[str] = frozenset()) -> ParseError:
        tok = self.peek()
        return ParseError(f"{message} (found {tok.kind} {tok.text!r})", offset=tok.offset, expected=expected)

    # terms ------------------------------------------------------------

    def parse_term(self) -> Term:
        left = self.parse_additive()
        if self.accept("DOTDOT"):
            right = self.parse_additive()
            return Interval(left, right)
        return left

    def parse_additive(self) -> Term:
        left = self.parse_unary()
        while self.peek().kind in ("PLUS", "MINUS"):
            op = self.advance()
            right = self.parse_unary()
            left = Bin("+" if op.kind == "PLUS" else "-", left, right)
        return left

    def parse_unary(self) -> Term:
        if self.accept("MINUS"):
            return Neg(self.parse_unary())
        return self.parse_primary()

    def parse_primary(self) -> Term:
        tok = self.peek()
        if tok.kind == "NUMBER":
            self.advance()
            return Num(int(tok.text))
        if tok.kind == "STRING":
            self.advance()
            return StrConst(tok.text[1:-1])
        if tok.kind == "VAR":
            self.advance()
            if tok.text == "_":
                name = f"_A{self.anon_count}"
                self.anon_count += 1
                return Var(name, is_anon=True)
            return Var(tok.text)
        if tok.kind == "IDENT":
            if self.peek(1).kind == "LPAREN":
                raise ParseError(
                    "function terms are not part of the fragment",
                    offset=tok.offset,
                    expected=frozenset({"NUMBER", "STRING", "VAR", "IDENT"}),
                )
            self.advance()
            return SymConst(tok.text)
        raise self.fail("expected a term", frozenset({"NUMBER", "STRING", "VAR", "IDENT", "MINUS"}))

    # atoms and literals -------------------------------------------------

    def parse_atom(self) -> Atom:
        name = self.expect("IDENT")
        if not self.accept("LPAREN"):
            return Atom(name.text, ((),))
        pools = [self.parse_pool()]
        while self.accept("SEMI"):
            pools.append(self.parse_pool())
        self.expect("RPAREN")
        return Atom(name.text, tuple(pools))

    def parse_pool(self) -> tuple[Term, ...]:
        terms = [self.parse_term()]
        while self.accept("COMMA"):
            terms.append(self.parse_term())
        return tuple(terms)

    def parse_simple_literal(self):
        """An atom, a negated atom, or a comparison."""
        if self.accept("NOT"):
            return NotLit(self.parse_atom())
        tok = self.peek()
        if tok.kind == "IDENT" and self.peek(1).kind == "LPAREN":
            atom = self.parse_atom()
            if self.peek().kind in _COMPARISON_OPS:
                raise self.fail("an atom cannot appear in a comparison")
            return atom
        left = self.parse_term()
        op_tok = self.peek()
        if op_tok.kind in _COMPARISON_OPS:
            self.advance()
            right = self.parse_term()
            return Comparison(_COMPARISON_OPS[op_tok.kind], left, right)
        if isinstance(left, SymConst):
            return Atom(left.name, ((),))
        raise self.fail("expected a comparison operator", frozenset(_COMPARISON_OPS))

    def parse_body_elem(self):
        lit = self.parse_simple_literal()
        if self.accept("COLON"):
            if isinstance(lit, NotLit):
                raise self.fail("a negated literal cannot carry a condition")
            conds = [self.parse_simple_literal()]
            while self.accept("COMMA"):
                conds.append(self.parse_simple_literal())
            return CondLiteral(lit, tuple(conds))
        return lit

    def parse_body(self) -> tuple:
        elems = [self.parse_body_elem()]
        while True:
            prev_cond = isinstance(elems[-1], CondLiteral)
            # after a conditional literal, only ';' continues the body
            if prev_cond:
                if self.accept("SEMI"):
                    elems.append(self.parse_body_elem())
                else:
                    break
            elif self.accept("COMMA") or self.accept("SEMI"):
                elems.append(self.parse_body_elem())
            else:
                break
        return tuple(elems)

    # statements ---------------------------------------------------------

    def parse_statement(self) -> tuple[Rule, tuple[int, int]]:
        start = self.peek().offset
        self.anon_count = 0
        if self.accept("IMPLIES"):
            body = self.parse_body()
            end_tok = self.expect("DOT")
            return Rule((), body), (start, end_tok.offset + 1)
        heads = [self.parse_atom()]
        while self.peek().kind in _HEAD_SEPARATORS:
            self.advance()
            heads.append(self.parse_atom())
        if self.accept("IMPLIES"):
            body = self.parse_body()
        else:
            body = ()
        end_tok = self.expect("DOT")
        return Rule(tuple(heads), body), (start, end_tok.offset + 1)

    def parse_program(self) -> Program:
        rules = []
        spans = []
        if self.peek().kind == "EOF":
            raise ParseError("empty program", offset=0)
        while self.peek().kind != "EOF":
            rule, span = self.parse_statement()
            rules.append(rule)
            spans.append(span)
        return Program(tuple(rules), tuple(spans))


def parse(text: str) -> Program:
    """Parse `text` into a Program, or raise LexError / ParseError."""
    return _Parser(text).parse_program()


def check_syntax(text: str) -> int:
    """Admission function: 1 iff the text parses as a non-empty program."""
    try:
        parse(text)
    except (LexError, ParseError):
        return 0
    return 1
