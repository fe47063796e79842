"""AST for the ASP fragment, plus canonical rendering.

The structures are immutable; `parse(render(program))` reproduces the same
structure (source spans are excluded from equality).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union


@dataclass(frozen=True)
class Num:
    value: int


@dataclass(frozen=True)
class SymConst:
    name: str


@dataclass(frozen=True)
class StrConst:
    """Quoted string; `text` holds the raw inner characters, escapes intact."""

    text: str


@dataclass(frozen=True)
class Var:
    name: str
    is_anon: bool = False


@dataclass(frozen=True)
class Neg:
    operand: "Term"


@dataclass(frozen=True)
class Bin:
    op: str  # "+" or "-"
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Interval:
    lo: "Term"
    hi: "Term"


Term = Union[Num, SymConst, StrConst, Var, Neg, Bin, Interval]


@dataclass(frozen=True)
class Atom:
    """Predicate with argument pools: `p(a,b; c,d)` has two pools.

    A plain atom has exactly one pool; a zero-arity atom one empty pool.
    """

    pred: str
    pools: tuple[tuple[Term, ...], ...] = ((),)

    @property
    def args(self) -> tuple[Term, ...]:
        return self.pools[0]

    @property
    def arity(self) -> int:
        return len(self.pools[0])

    @property
    def is_pooled(self) -> bool:
        return len(self.pools) > 1


@dataclass(frozen=True)
class NotLit:
    atom: Atom


@dataclass(frozen=True)
class Comparison:
    op: str  # one of = != < > <= >= ==
    left: Term
    right: Term


Literal = Union[Atom, NotLit, Comparison]


@dataclass(frozen=True)
class CondLiteral:
    """Guarded body element `head : cond1, cond2` (a conditional literal)."""

    head: Union[Atom, Comparison]
    conds: tuple[Literal, ...]


BodyElem = Union[Atom, NotLit, Comparison, CondLiteral]


@dataclass(frozen=True)
class Rule:
    """Heads and body; empty body means a fact line, several heads mean a
    disjunctive statement, an empty head tuple an integrity constraint."""

    heads: tuple[Atom, ...]
    body: tuple[BodyElem, ...] = ()

    @property
    def is_fact_line(self) -> bool:
        return not self.body and len(self.heads) >= 1

    @property
    def is_constraint(self) -> bool:
        return not self.heads


@dataclass(frozen=True)
class Program:
    rules: tuple[Rule, ...]
    spans: tuple[tuple[int, int], ...] = field(default=(), compare=False)


def render_term(t: Term) -> str:
    if isinstance(t, Num):
        return str(t.value)
    if isinstance(t, SymConst):
        return t.name
    if isinstance(t, StrConst):
        return f'"{t.text}"'
    if isinstance(t, Var):
        return "_" if t.is_anon else t.name
    if isinstance(t, Neg):
        return f"-{render_term(t.operand)}"
    if isinstance(t, Bin):
        return f"{render_term(t.left)}{t.op}{render_term(t.right)}"
    if isinstance(t, Interval):
        return f"{render_term(t.lo)}..{render_term(t.hi)}"
    raise TypeError(f"not a term: {t!r}")


def render_atom(a: Atom) -> str:
    if a.pools == ((),):
        return a.pred
    pools = "; ".join(", ".join(render_term(t) for t in pool) for pool in a.pools)
    return f"{a.pred}({pools})"


def render_literal(lit: Literal) -> str:
    if isinstance(lit, Atom):
        return render_atom(lit)
    if isinstance(lit, NotLit):
        return f"not {render_atom(lit.atom)}"
    if isinstance(lit, Comparison):
        return f"{render_term(lit.left)}{lit.op}{render_term(lit.right)}"
    raise TypeError(f"not a literal: {lit!r}")


def render_body_elem(elem: BodyElem) -> str:
    if isinstance(elem, CondLiteral):
        head = render_literal(elem.head)
        conds = ", ".join(render_literal(c) for c in elem.conds)
        return f"{head}: {conds}"
    return render_literal(elem)


def render_rule(rule: Rule) -> str:
    head = "; ".join(render_atom(a) for a in rule.heads)
    if not rule.body:
        return f"{head}."
    body_parts = []
    for i, elem in enumerate(rule.body):
        sep = "" if i == 0 else ("; " if isinstance(rule.body[i - 1], CondLiteral) else ", ")
        body_parts.append(sep + render_body_elem(elem))
    body = "".join(body_parts)
    if not rule.heads:
        return f":- {body}."
    return f"{head} :- {body}."


def render_program(program: Program) -> str:
    return "\n".join(render_rule(r) for r in program.rules) + "\n"


def term_vars(t: Term) -> set[str]:
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, Neg):
        return term_vars(t.operand)
    if isinstance(t, Bin):
        return term_vars(t.left) | term_vars(t.right)
    if isinstance(t, Interval):
        return term_vars(t.lo) | term_vars(t.hi)
    return set()


def literal_vars(lit: Literal) -> set[str]:
    if isinstance(lit, Atom):
        out: set[str] = set()
        for pool in lit.pools:
            for t in pool:
                out |= term_vars(t)
        return out
    if isinstance(lit, NotLit):
        return literal_vars(lit.atom)
    if isinstance(lit, Comparison):
        return term_vars(lit.left) | term_vars(lit.right)
    raise TypeError(f"not a literal: {lit!r}")
