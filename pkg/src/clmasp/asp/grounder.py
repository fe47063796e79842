"""Grounding: instantiating rule variables against derivable atoms.

The grounder saturates the possible-atom set bottom-up (semi-naive: each
round only re-joins rules through atoms derived in the previous round) and
records every successful rule instantiation as a ground rule.

Rule bodies are compiled once per (rule, seeded literal) into a join plan:
a fixed literal order chosen by bound-variable analysis, with comparisons
evaluated as soon as their variables are bound, single-variable equalities
solved symbolically instead of enumerating integer domains, and guard
conditionals applied as checks or assignments. Execution is then a plain
indexed nested-loop join over compact argument specs.

Ground values are plain Python values: integers stay int, symbolic constants
are bare strings, quoted string literals keep their double quotes so the two
constant kinds never collide.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import ResourceLimitError, SafetyError, UnsupportedProgramError
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
    literal_vars,
    render_rule,
    term_vars,
)

GroundAtom = tuple  # (pred, (v0, v1, ...))


@dataclass(frozen=True)
class SolveLimits:
    max_atoms: int = 2_000_000
    max_iterations: int = 10_000
    max_branches: int = 16
    integer_domain: int = 1_000_000  # widest interval a single fact may span


DEFAULT_LIMITS = SolveLimits()


class _ArithError(Exception):
    """Arithmetic over non-integers; the instantiation path is dropped."""


# ---------------------------------------------------------------------------
# ground-term evaluation (used for facts and at compile time)


def eval_ground_term(term: Term):
    """Evaluate a variable-free term; raises _ArithError on type errors and
    SafetyError when a variable sneaks in."""
    if isinstance(term, Num):
        return term.value
    if isinstance(term, SymConst):
        return term.name
    if isinstance(term, StrConst):
        return f'"{term.text}"'
    if isinstance(term, Var):
        raise SafetyError(f"unsafe variable {term.name} in a fact")
    if isinstance(term, Neg):
        v = eval_ground_term(term.operand)
        if not isinstance(v, int):
            raise _ArithError
        return -v
    if isinstance(term, Bin):
        lv = eval_ground_term(term.left)
        rv = eval_ground_term(term.right)
        if not isinstance(lv, int) or not isinstance(rv, int):
            raise _ArithError
        return lv + rv if term.op == "+" else lv - rv
    if isinstance(term, Interval):
        raise UnsupportedProgramError("intervals are only supported in fact arguments")
    raise TypeError(f"not a term: {term!r}")


# ---------------------------------------------------------------------------
# compiled terms: ('c', value) | ('v', name) | ('neg', ct) | ('+', l, r) | ('-', l, r)


def compile_term(term: Term):
    if isinstance(term, Num):
        return ("c", term.value)
    if isinstance(term, SymConst):
        return ("c", term.name)
    if isinstance(term, StrConst):
        return ("c", f'"{term.text}"')
    if isinstance(term, Var):
        return ("v", term.name)
    if isinstance(term, Neg):
        inner = compile_term(term.operand)
        if inner[0] == "c":
            if not isinstance(inner[1], int):
                return ("dead",)
            return ("c", -inner[1])
        return ("neg", inner)
    if isinstance(term, Bin):
        left = compile_term(term.left)
        right = compile_term(term.right)
        if left[0] == "c" and right[0] == "c":
            if not isinstance(left[1], int) or not isinstance(right[1], int):
                return ("dead",)
            return ("c", left[1] + right[1] if term.op == "+" else left[1] - right[1])
        return (term.op, left, right)
    if isinstance(term, Interval):
        raise UnsupportedProgramError("intervals are only supported in fact arguments")
    raise TypeError(f"not a term: {term!r}")


def eval_ct(ct, binding):
    """Evaluate a compiled term under `binding`; None when undefined
    (unbound variable or arithmetic over non-integers)."""
    tag = ct[0]
    if tag == "c":
        return ct[1]
    if tag == "v":
        return binding.get(ct[1])
    if tag == "neg":
        v = eval_ct(ct[1], binding)
        return -v if isinstance(v, int) else None
    if tag == "dead":
        return None
    lv = eval_ct(ct[1], binding)
    rv = eval_ct(ct[2], binding)
    if not isinstance(lv, int) or not isinstance(rv, int):
        return None
    return lv + rv if tag == "+" else lv - rv


def _ct_vars(ct) -> set[str]:
    tag = ct[0]
    if tag == "v":
        return {ct[1]}
    if tag == "neg":
        return _ct_vars(ct[1])
    if tag in ("+", "-"):
        return _ct_vars(ct[1]) | _ct_vars(ct[2])
    return set()


class _NonLinear(Exception):
    pass


def _linearize_ct(ct, bound: set[str]):
    """Express a compiled term as (var|None, coeff, const, parts) where parts
    is a tuple of (sign, ct-over-bound-vars) summands."""
    tag = ct[0]
    if tag == "c":
        if not isinstance(ct[1], int):
            raise _NonLinear
        return None, 0, ct[1], ()
    if tag == "v":
        if ct[1] in bound:
            return None, 0, 0, ((1, ct),)
        return ct[1], 1, 0, ()
    if tag == "neg":
        var, coeff, const, parts = _linearize_ct(ct[1], bound)
        return var, -coeff, -const, tuple((-s, p) for s, p in parts)
    if tag in ("+", "-"):
        lvar, lc, lk, lp = _linearize_ct(ct[1], bound)
        rvar, rc, rk, rp = _linearize_ct(ct[2], bound)
        sign = 1 if tag == "+" else -1
        if lvar is not None and rvar is not None:
            raise _NonLinear
        var = lvar if lvar is not None else rvar
        coeff = (lc if lvar is not None else 0) + sign * (rc if rvar is not None else 0)
        return var, coeff, lk + sign * rk, lp + tuple((sign * s, p) for s, p in rp)
    raise _NonLinear  # 'dead'


def _solve_form(lct, rct, bound: set[str]):
    """Compile `lct = rct` into ('solve', var, coeff, const, parts) binding
    the single unbound variable, or None when not of that shape."""
    try:
        lvar, lc, lk, lp = _linearize_ct(lct, bound)
        rvar, rc, rk, rp = _linearize_ct(rct, bound)
    except _NonLinear:
        return None
    if (lvar is None) == (rvar is None):
        return None
    # coeff*var + const + sum(parts) = 0
    if lvar is not None:
        var, coeff = lvar, lc
        const = lk - rk
        parts = lp + tuple((-s, p) for s, p in rp)
    else:
        var, coeff = rvar, rc
        const = rk - lk
        parts = rp + tuple((-s, p) for s, p in lp)
    if coeff not in (1, -1):
        return None
    return ("solve", var, coeff, const, parts)


def _run_solve(step, binding) -> bool:
    _, var, coeff, const, parts = step
    total = const
    for sign, ct in parts:
        v = eval_ct(ct, binding)
        if not isinstance(v, int):
            return False
        total += sign * v
    binding[var] = -total if coeff == 1 else total
    return True


def _run_check(op: str, lct, rct, binding) -> bool:
    lv = eval_ct(lct, binding)
    rv = eval_ct(rct, binding)
    if lv is None or rv is None:
        return False
    if op in ("=", "=="):
        return lv == rv
    if op == "!=":
        return lv != rv
    if not isinstance(lv, int) or not isinstance(rv, int):
        return False
    if op == "<":
        return lv < rv
    if op == ">":
        return lv > rv
    if op == "<=":
        return lv <= rv
    return lv >= rv


# ---------------------------------------------------------------------------
# fact store


class FactStore:
    """Ground atoms grouped by (predicate, arity) with per-position indexes."""

    def __init__(self) -> None:
        self.tables: dict[tuple[str, int], list[tuple]] = {}
        self.sets: dict[tuple[str, int], set[tuple]] = {}
        self.indexes: dict[tuple[str, int, int], dict] = {}
        self.size = 0

    def contains(self, pred: str, args: tuple) -> bool:
        return args in self.sets.get((pred, len(args)), ())

    def add(self, atom: GroundAtom) -> bool:
        pred, args = atom
        key = (pred, len(args))
        bucket = self.sets.get(key)
        if bucket is None:
            bucket = set()
            self.sets[key] = bucket
            self.tables[key] = []
        if args in bucket:
            return False
        bucket.add(args)
        self.tables[key].append(args)
        self.size += 1
        for (p, a, pos), index in self.indexes.items():
            if p == pred and a == len(args):
                index.setdefault(args[pos], []).append(args)
        return True

    def table(self, pred: str, arity: int) -> list[tuple]:
        return self.tables.get((pred, arity), _EMPTY_LIST)

    def lookup(self, pred: str, arity: int, pos: int, value) -> list[tuple]:
        key = (pred, arity, pos)
        index = self.indexes.get(key)
        if index is None:
            index = {}
            for args in self.tables.get((pred, arity), ()):
                index.setdefault(args[pos], []).append(args)
            self.indexes[key] = index
        return index.get(value, _EMPTY_LIST)


_EMPTY_LIST: list = []


# ---------------------------------------------------------------------------
# join plans
#
# Argument specs inside a match step:
#   ('c', value)                     constant, compare
#   ('vf', name)                     first occurrence of a free var, bind
#   ('vb', name)                     bound var, compare
#   ('ev', ct)                       evaluable expression, compare
#   ('es', var, coeff, const, parts) solvable expression, bind var
#   ('dead',)                        never matches
#
# Deterministic steps between matches:
#   ('check', op, lct, rct)
#   ('solve', var, coeff, const, parts)
#   ('guard', conds, enforce)        conds: tuple of cond specs; enforce step
#   ('test', pred, arity, argspecs)  fully bound atom, membership test
# Guard condition specs: ('cmp', op, lct, rct) or ('atom', pred, arity, cts).


def _atom_argspecs(atom: Atom, bound: set[str]):
    """Compile args against the statically known bound set; returns
    (specs, newly_bound_vars, bound_positions)."""
    specs = []
    new_vars: list[str] = []
    bound_positions: list[int] = []
    local_bound = set(bound)
    for i, term in enumerate(atom.args):
        ct = compile_term(term)
        tag = ct[0]
        if tag == "c":
            specs.append(ct)
            bound_positions.append(i)
        elif tag == "v":
            name = ct[1]
            if name in local_bound:
                specs.append(("vb", name))
                bound_positions.append(i)
            else:
                specs.append(("vf", name))
                local_bound.add(name)
                new_vars.append(name)
        elif tag == "dead":
            specs.append(("dead",))
        else:
            vs = _ct_vars(ct)
            if vs <= local_bound:
                specs.append(("ev", ct))
                bound_positions.append(i)
            else:
                # ct = row value: solvable iff ct = 0 is, with the matched
                # value folded into the constant at runtime
                solved = _solve_form(ct, ("c", 0), local_bound)
                if solved is None:
                    specs.append(("dead",))
                else:
                    _, var, coeff, const, parts = solved
                    specs.append(("es", var, coeff, const, parts))
                    local_bound.add(var)
                    new_vars.append(var)
    return specs, new_vars, bound_positions


def _unify_row(specs, row, binding, owned: bool):
    """Match a candidate row against arg specs; returns (binding, owned) or
    None. Copy-on-write: `binding` is only mutated when owned."""
    for spec, val in zip(specs, row):
        k = spec[0]
        if k == "c":
            if spec[1] != val:
                return None
        elif k == "vb":
            if binding.get(spec[1]) != val:
                return None
        elif k == "vf":
            if not owned:
                binding = dict(binding)
                owned = True
            binding[spec[1]] = val
        elif k == "ev":
            if eval_ct(spec[1], binding) != val:
                return None
        elif k == "es":
            if not isinstance(val, int):
                return None
            total = spec[3] - val  # coeff*var + const + parts = val
            ok = True
            for sign, ct in spec[4]:
                v = eval_ct(ct, binding)
                if not isinstance(v, int):
                    ok = False
                    break
                total += sign * v
            if not ok:
                return None
            if not owned:
                binding = dict(binding)
                owned = True
            binding[spec[1]] = -total if spec[2] == 1 else total
        else:  # dead
            return None
    return binding, owned


def _apply_dets(dets, binding, owned, store: FactStore):
    """Run deterministic steps; returns (binding, owned) or None."""
    for step in dets:
        kind = step[0]
        if kind == "check":
            if not _run_check(step[1], step[2], step[3], binding):
                return None
        elif kind == "solve":
            if not owned:
                binding = dict(binding)
                owned = True
            if not _run_solve(step, binding):
                return None
        elif kind == "test":
            args = []
            ok = True
            for ct in step[3]:
                v = eval_ct(ct, binding)
                if v is None:
                    ok = False
                    break
                args.append(v)
            if not ok or not store.contains(step[1], tuple(args)):
                return None
        elif kind == "guard":
            conds_true = True
            for cond in step[1]:
                if cond[0] == "cmp":
                    if not _run_check(cond[1], cond[2], cond[3], binding):
                        conds_true = False
                        break
                else:  # ('atom', pred, arity, cts)
                    args = []
                    ok = True
                    for ct in cond[3]:
                        v = eval_ct(ct, binding)
                        if v is None:
                            ok = False
                            break
                        args.append(v)
                    if not ok or not store.contains(cond[1], tuple(args)):
                        conds_true = False
                        break
            if not conds_true:
                continue  # vacuously satisfied
            # enforce the guard head: compare when its variables carry values,
            # otherwise bind through the precompiled solved form
            _, op, lct, rct, sform = step[2]
            lv = eval_ct(lct, binding)
            rv = eval_ct(rct, binding)
            if lv is not None and rv is not None:
                if op in ("=", "=="):
                    ok = lv == rv
                elif op == "!=":
                    ok = lv != rv
                elif not isinstance(lv, int) or not isinstance(rv, int):
                    ok = False
                elif op == "<":
                    ok = lv < rv
                elif op == ">":
                    ok = lv > rv
                elif op == "<=":
                    ok = lv <= rv
                else:
                    ok = lv >= rv
                if not ok:
                    return None
            elif sform is not None:
                if not owned:
                    binding = dict(binding)
                    owned = True
                if not _run_solve(sform, binding):
                    return None
            else:
                return None
    return binding, owned


@dataclass
class _Plan:
    """Stages of a compiled body: leading deterministic steps, then
    (match, dets) pairs. `seeded` marks plans whose first match reads the
    delta candidates."""

    lead: tuple
    stages: tuple  # of (pred, arity, argspecs, bound_positions, dets)
    seeded: bool


def _compile_cond_literal(elem: CondLiteral, bound: set[str], guard_bound: set[str]):
    """Compile a guard once its condition variables are bound; None if not
    ready under `bound`.

    A variable bound only by guards of the same group may still be unbound
    at runtime (its binder's condition was false), so the enforce step
    always carries the solved form alongside the comparison when one exists.
    """
    conds = []
    for c in elem.conds:
        if isinstance(c, Comparison):
            lct, rct = compile_term(c.left), compile_term(c.right)
            if not (_ct_vars(lct) | _ct_vars(rct)) <= bound:
                return None
            conds.append(("cmp", c.op, lct, rct))
        elif isinstance(c, Atom):
            cts = tuple(compile_term(t) for t in c.args)
            cond_vars: set[str] = set()
            for ct in cts:
                cond_vars |= _ct_vars(ct)
            if not cond_vars <= bound:
                return None
            conds.append(("atom", c.pred, len(cts), cts))
        else:
            raise UnsupportedProgramError("negated condition in a conditional literal")
    head = elem.head
    lct, rct = compile_term(head.left), compile_term(head.right)
    head_vars = _ct_vars(lct) | _ct_vars(rct)
    maybe_unbound = (head_vars - bound) | (head_vars & guard_bound)
    sform = None
    new_var = None
    if head.op == "=" and len(maybe_unbound) == 1:
        target = next(iter(maybe_unbound))
        sform = _solve_form(lct, rct, (bound | head_vars) - {target})
        if target not in bound:
            new_var = target
    if head_vars - bound and sform is None:
        return None  # cannot enforce yet; atoms may bind the variable later
    return ("guard", tuple(conds), ("enforce", head.op, lct, rct, sform)), new_var


def _compile_comparison(elem: Comparison, bound: set[str]):
    """('check', ...) or ('solve', ...) if ready under `bound`, else None.
    Second element of the result is the newly bound variable, if any."""
    lct, rct = compile_term(elem.left), compile_term(elem.right)
    vs = _ct_vars(lct) | _ct_vars(rct)
    if vs <= bound:
        return ("check", elem.op, lct, rct), None
    if elem.op == "=":
        solved = _solve_form(lct, rct, bound)
        if solved is not None:
            return solved, solved[1]
    return None


def compile_plan(rule: Rule, seed_idx: int | None) -> _Plan | None:
    """Build the join plan for `rule` with body literal `seed_idx` (a
    positive atom) seeded from the delta; None when the body can never be
    completed (some guard or comparison stays undecidable)."""
    bound: set[str] = set()
    guard_bound: set[str] = set()
    remaining = list(enumerate(rule.body))
    stages: list = []
    lead: list = []

    def ready_dets(sink: list) -> None:
        progress = True
        while progress:
            progress = False
            for item in list(remaining):
                _, elem = item
                if isinstance(elem, Comparison):
                    compiled = _compile_comparison(elem, bound)
                elif isinstance(elem, CondLiteral):
                    compiled = _compile_cond_literal(elem, bound, guard_bound)
                else:
                    continue
                if compiled is None:
                    continue
                step, new_var = compiled
                sink.append(step)
                if new_var is not None:
                    bound.add(new_var)
                    if isinstance(elem, CondLiteral):
                        guard_bound.add(new_var)
                remaining.remove(item)
                progress = True

    def add_match(item) -> None:
        idx, atom = item
        remaining.remove(item)
        specs, new_vars, bound_positions = _atom_argspecs(atom, bound)
        bound.update(new_vars)
        dets: list = []
        ready_dets(dets)
        stages.append((atom.pred, atom.arity, tuple(specs), tuple(bound_positions), dets))

    if seed_idx is not None:
        seed_item = next(item for item in remaining if item[0] == seed_idx)
        add_match(seed_item)
    else:
        ready_dets(lead)

    while True:
        atoms = [item for item in remaining if isinstance(item[1], Atom)]
        if not atoms:
            break
        best = None
        best_score = None
        for item in atoms:
            specs, new_vars, bound_positions = _atom_argspecs(item[1], bound)
            if len(bound_positions) == item[1].arity:
                cls = 0  # fully bound: existence test
            elif bound_positions:
                cls = 1  # indexed lookup available
            else:
                cls = 2  # full table scan
            score = (cls, len(new_vars), item[0])
            if best_score is None or score < best_score:
                best, best_score = item, score
        if best_score[0] == 0:
            # fully bound atom: record as membership test, not a match stage
            idx, atom = best
            remaining.remove(best)
            specs, _, _ = _atom_argspecs(atom, bound)
            cts = tuple(("c", s[1]) if s[0] == "c" else ("v", s[1]) if s[0] in ("vb", "vf") else s[1] for s in specs)
            sink = stages[-1][4] if stages else lead
            sink.append(("test", atom.pred, atom.arity, cts))
            ready_dets(sink)
            continue
        add_match(best)

    if remaining:
        return None  # undecidable guards or comparisons: the rule cannot fire
    return _Plan(
        lead=tuple(lead),
        stages=tuple(
            (pred, ar, specs, bpos, tuple(dets)) for pred, ar, specs, bpos, dets in stages
        ),
        seeded=seed_idx is not None,
    )


def run_plan(plan: _Plan, store: FactStore, seed_rows, emit) -> None:
    """Execute a compiled plan, calling `emit(binding)` per solution.
    `seed_rows` feeds the first match stage when the plan is seeded."""
    base = _apply_dets(plan.lead, {}, True, store)
    if base is None:
        return
    stages = plan.stages

    def descend(si: int, binding: dict, owned: bool) -> None:
        if si == len(stages):
            emit(binding)
            return
        pred, arity, specs, bound_positions, dets = stages[si]
        if si == 0 and plan.seeded:
            rows = seed_rows
        elif not bound_positions:
            rows = store.table(pred, arity)
        else:
            rows = None
            for pos in bound_positions:
                spec = specs[pos]
                if spec[0] == "c":
                    val = spec[1]
                elif spec[0] == "vb":
                    val = binding.get(spec[1])
                else:  # 'ev'
                    val = eval_ct(spec[1], binding)
                if val is None:
                    rows = _EMPTY_LIST
                    break
                cand = store.lookup(pred, arity, pos, val)
                if rows is None or len(cand) < len(rows):
                    rows = cand
                if not rows:
                    break
        for row in rows:
            matched = _unify_row(specs, row, binding, False)
            if matched is None:
                continue
            nb, nowned = matched
            after = _apply_dets(dets, nb, nowned, store)
            if after is None:
                continue
            descend(si + 1, after[0], after[1])

    descend(0, base[0], base[1])


# ---------------------------------------------------------------------------
# program expansion


@dataclass
class ExpandedProgram:
    facts: set
    choices: list  # one entry per disjunctive fact line: list of frozensets
    rules: list


@dataclass
class GroundRule:
    head: GroundAtom | None  # None encodes an integrity constraint
    body: tuple


@dataclass
class GroundProgram:
    facts: frozenset
    choices: tuple
    rules: tuple
    atom_count: int
    iterations: int

    @property
    def atoms(self) -> frozenset:
        out = set(self.facts)
        for group in self.choices:
            for alt in group:
                out |= alt
        for r in self.rules:
            if r.head is not None:
                out.add(r.head)
        return frozenset(out)


def _expand_fact_atom(atom: Atom, limits: SolveLimits) -> set:
    """All ground atoms denoted by a fact head (pools, intervals, arithmetic)."""
    out = set()
    for pool in atom.pools:
        columns = []
        for term in pool:
            if isinstance(term, Interval):
                try:
                    lo = eval_ground_term(term.lo)
                    hi = eval_ground_term(term.hi)
                except _ArithError:
                    columns = None
                    break
                if not isinstance(lo, int) or not isinstance(hi, int):
                    columns = None
                    break
                if hi - lo + 1 > limits.integer_domain:
                    raise ResourceLimitError(
                        f"interval {lo}..{hi} exceeds the integer domain limit"
                    )
                columns.append(range(lo, hi + 1))
            else:
                try:
                    v = eval_ground_term(term)
                except _ArithError:
                    columns = None
                    break
                columns.append((v,))
        if columns is None:
            continue  # undefined arithmetic: the fact denotes nothing
        for combo in itertools.product(*columns):
            out.add((atom.pred, combo))
    return out


def _check_rule(rule: Rule) -> None:
    if len(rule.heads) > 1:
        raise UnsupportedProgramError(
            "disjunctive heads are only supported on fact lines, not on rules with bodies"
        )
    for head in rule.heads:
        if head.is_pooled:
            raise UnsupportedProgramError("argument pooling is only supported in facts")
        for t in head.args:
            if isinstance(t, Interval):
                raise UnsupportedProgramError("intervals are only supported in fact arguments")
    bound: set[str] = set()
    required: set[str] = set()
    for head in rule.heads:
        required |= literal_vars(head)
    for elem in rule.body:
        if isinstance(elem, NotLit):
            raise UnsupportedProgramError(
                "negation as failure (not) is accepted by the parser but not evaluated"
            )
        if isinstance(elem, Atom):
            if elem.is_pooled:
                raise UnsupportedProgramError("argument pooling is only supported in facts")
            for t in elem.args:
                if isinstance(t, Interval):
                    raise UnsupportedProgramError("intervals are only supported in fact arguments")
            bound |= literal_vars(elem)
        elif isinstance(elem, CondLiteral):
            if isinstance(elem.head, Comparison):
                bound |= term_vars(elem.head.left) | term_vars(elem.head.right)
            else:
                raise UnsupportedProgramError("conditional literal heads must be comparisons")
            for c in elem.conds:
                if isinstance(c, NotLit):
                    raise UnsupportedProgramError("negated condition in a conditional literal")
    missing = required - bound
    if missing:
        raise SafetyError(f"unsafe variables {sorted(missing)} in rule: {render_rule(rule)}")


def expand_program(program: Program, limits: SolveLimits = DEFAULT_LIMITS) -> ExpandedProgram:
    facts: set = set()
    choices: list = []
    rules: list = []
    for rule in program.rules:
        if rule.is_fact_line:
            expansions = [frozenset(_expand_fact_atom(h, limits)) for h in rule.heads]
            if len(expansions) == 1:
                facts |= expansions[0]
            else:
                alts = [alt for alt in expansions if alt]
                if alts:
                    choices.append(alts)
        else:
            _check_rule(rule)
            rules.append(rule)
    return ExpandedProgram(facts=facts, choices=choices, rules=rules)


def ground(program: Program, limits: SolveLimits = DEFAULT_LIMITS) -> GroundProgram:
    """Instantiate every rule against the derivable-atom closure."""
    exp = expand_program(program, limits)
    store = FactStore()
    delta: dict[tuple[str, int], list[tuple]] = {}

    def seed_atom(atom: GroundAtom) -> None:
        if store.add(atom):
            delta.setdefault((atom[0], len(atom[1])), []).append(atom[1])

    for a in exp.facts:
        seed_atom(a)
    for group in exp.choices:
        for alt in group:
            for a in alt:
                seed_atom(a)

    # compile one plan per (rule, positive body literal) plus an unseeded
    # plan for bodies without positive atoms
    compiled: list[tuple[Rule, tuple, list]] = []
    for rule in exp.rules:
        head = rule.heads[0] if rule.heads else None
        head_cts = tuple(compile_term(t) for t in head.args) if head is not None else None
        body_specs = tuple(
            (e.pred, tuple(compile_term(t) for t in e.args))
            for e in rule.body
            if isinstance(e, Atom)
        )
        plans = []
        positives = [(i, e) for i, e in enumerate(rule.body) if isinstance(e, Atom)]
        if positives:
            for idx, atom in positives:
                plan = compile_plan(rule, idx)
                if plan is not None:
                    plans.append(((atom.pred, atom.arity), plan))
        else:
            plan = compile_plan(rule, None)
            if plan is not None:
                plans.append((None, plan))
        compiled.append((rule, (head.pred if head else None, head_cts, body_specs), plans))

    ground_rules: list[GroundRule] = []
    seen: set = set()
    iterations = 0
    first_round = True

    while delta or first_round:
        iterations += 1
        if iterations > limits.max_iterations:
            raise ResourceLimitError(f"exceeded {limits.max_iterations} grounding iterations")
        new_atoms: list[GroundAtom] = []

        for rule, (head_pred, head_cts, body_specs), plans in compiled:

            def emit(binding: dict) -> None:
                head_atom = None
                if head_pred is not None:
                    args = []
                    for ct in head_cts:
                        v = eval_ct(ct, binding)
                        if v is None:
                            return  # a guard group never fired for this binding
                        args.append(v)
                    head_atom = (head_pred, tuple(args))
                body_atoms = []
                for pred, cts in body_specs:
                    body_atoms.append((pred, tuple(eval_ct(ct, binding) for ct in cts)))
                key = (head_atom, tuple(body_atoms))
                if key in seen:
                    return
                seen.add(key)
                ground_rules.append(GroundRule(head_atom, tuple(body_atoms)))
                if head_atom is not None and store.add(head_atom):
                    new_atoms.append(head_atom)
                    if store.size > limits.max_atoms:
                        raise ResourceLimitError(f"exceeded {limits.max_atoms} ground atoms")

            for seed_key, plan in plans:
                if seed_key is None:
                    if first_round:
                        run_plan(plan, store, _EMPTY_LIST, emit)
                    continue
                rows = delta.get(seed_key)
                if rows:
                    run_plan(plan, store, rows, emit)

        delta = {}
        for a in new_atoms:
            delta.setdefault((a[0], len(a[1])), []).append(a[1])
        first_round = False

    return GroundProgram(
        facts=frozenset(exp.facts),
        choices=tuple(tuple(group) for group in exp.choices),
        rules=tuple(ground_rules),
        atom_count=store.size,
        iterations=iterations,
    )
