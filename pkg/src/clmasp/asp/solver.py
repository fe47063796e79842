"""Model computation and the outcome classifier.

Programs in the fragment are definite apart from disjunctive fact lines, so
each choice of one disjunct per line yields a least model; the answer sets
are the minimal models among those, deduplicated and ordered
lexicographically by their rendered atoms.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum

from ..relations import Relation
from .errors import AspError
from .grounder import DEFAULT_LIMITS, GroundProgram, SolveLimits, ground
from .parser import parse
from .syntax import Program


def render_ground_atom(atom: tuple) -> str:
    pred, args = atom
    if not args:
        return pred
    return f"{pred}({','.join(str(a) for a in args)})"


@dataclass(frozen=True)
class AnswerSet:
    atoms: frozenset

    def rendered(self) -> tuple[str, ...]:
        return tuple(sorted(render_ground_atom(a) for a in self.atoms))

    def answer_values(self) -> list:
        """Arguments of answer/1 atoms, sorted for determinism."""
        vals = [args[0] for pred, args in self.atoms if pred == "answer" and len(args) == 1]
        return sorted(vals, key=str)


@dataclass
class SolveStats:
    ground_atoms: int = 0
    ground_rules: int = 0
    iterations: int = 0
    branches: int = 0
    branches_truncated: bool = False
    unsat_branches: int = 0


@dataclass
class SolveResult:
    answer_sets: tuple[AnswerSet, ...]
    stats: SolveStats = field(default_factory=SolveStats)


def _least_model(base: set, rules: tuple) -> tuple[set, bool]:
    """Propagate ground rules over `base`; returns (model, constraint_ok)."""
    model = set(base)
    counts: list[int] = []
    watchers: dict[tuple, list[int]] = {}
    queue: list[tuple] = []
    fired: list[bool] = []

    def fire(idx: int) -> bool:
        head = rules[idx].head
        if head is None:
            return False  # integrity constraint violated
        if head not in model:
            model.add(head)
            queue.append(head)
        return True

    ok = True
    for idx, rule in enumerate(rules):
        missing = {a for a in rule.body if a not in model}
        counts.append(len(missing))
        fired.append(False)
        if not missing:
            fired[idx] = True
            if not fire(idx):
                ok = False
        else:
            for a in missing:
                watchers.setdefault(a, []).append(idx)
    while queue and ok:
        atom = queue.pop()
        for idx in watchers.pop(atom, ()):
            if fired[idx]:
                continue
            counts[idx] -= 1
            if counts[idx] == 0:
                fired[idx] = True
                if not fire(idx):
                    ok = False
                    break
    return model, ok


def solve_ground(gp: GroundProgram, limits: SolveLimits = DEFAULT_LIMITS) -> SolveResult:
    stats = SolveStats(
        ground_atoms=gp.atom_count,
        ground_rules=len(gp.rules),
        iterations=gp.iterations,
    )
    groups = [list(g) for g in gp.choices]
    total_branches = 1
    for g in groups:
        total_branches *= len(g)
    stats.branches = min(total_branches, limits.max_branches)
    stats.branches_truncated = total_branches > limits.max_branches

    models: list[frozenset] = []
    for combo in itertools.islice(itertools.product(*groups), limits.max_branches):
        base = set(gp.facts)
        for alt in combo:
            base |= alt
        model, ok = _least_model(base, gp.rules)
        if not ok:
            stats.unsat_branches += 1
            continue
        frozen = frozenset(model)
        if frozen not in models:
            models.append(frozen)

    minimal = [m for m in models if not any(other < m for other in models)]
    answer_sets = sorted((AnswerSet(m) for m in minimal), key=lambda s: s.rendered())
    return SolveResult(answer_sets=tuple(answer_sets), stats=stats)


def solve(program: Program, limits: SolveLimits = DEFAULT_LIMITS) -> SolveResult:
    """All answer sets of the program, in deterministic order."""
    return solve_ground(ground(program, limits), limits)


def solve_text(text: str, limits: SolveLimits = DEFAULT_LIMITS) -> SolveResult:
    """Parse and solve; raises AspError subclasses on any failure."""
    return solve(parse(text), limits)


class Outcome(Enum):
    EMPTY = "empty"
    NO_ANSWER_ATOM = "no_answer_atom"
    MULTIPLE_ANSWER_ATOMS = "multiple_answer_atoms"
    SINGLE_WRONG = "single_wrong"
    SINGLE_CORRECT = "single_correct"
    MULTIPLE_ANSWER_SETS = "multiple_answer_sets"


@dataclass(frozen=True)
class Classification:
    outcome: Outcome
    note: str = ""


def classify_outcome(result: SolveResult | AspError, gold: Relation) -> Classification:
    """Map a solve result (or failure) to the five-way error taxonomy plus
    the correct case."""
    if isinstance(result, AspError):
        return Classification(Outcome.EMPTY, f"{type(result).__name__}: {result.message}")
    sets = result.answer_sets
    if not sets:
        return Classification(Outcome.EMPTY, "no model satisfies the program")
    if len(sets) > 1:
        return Classification(Outcome.MULTIPLE_ANSWER_SETS, f"{len(sets)} answer sets")
    answers = sets[0].answer_values()
    if not answers:
        return Classification(Outcome.NO_ANSWER_ATOM, "answer set has no answer atom")
    if len(answers) > 1:
        return Classification(
            Outcome.MULTIPLE_ANSWER_ATOMS, "answers: " + ", ".join(str(a) for a in answers)
        )
    got = answers[0]
    if got == gold.asp_name:
        return Classification(Outcome.SINGLE_CORRECT)
    return Classification(Outcome.SINGLE_WRONG, f"answer {got} instead of {gold.asp_name}")


def classify_text(text: str, gold: Relation, limits: SolveLimits = DEFAULT_LIMITS) -> Classification:
    """Convenience: parse, solve and classify, mapping failures to Empty."""
    try:
        result = solve_text(text, limits)
    except AspError as exc:
        return classify_outcome(exc, gold)
    return classify_outcome(result, gold)
