"""Parser, grounder and evaluator for the ASP fragment used by the pipeline."""

from .errors import (
    AspError,
    EvaluationError,
    LexError,
    ParseError,
    ResourceLimitError,
    SafetyError,
    UnsupportedProgramError,
)
from .grounder import DEFAULT_LIMITS, GroundProgram, GroundRule, SolveLimits, ground
from .parser import check_syntax, parse
from .postprocess import DEFAULT_STOP_TOKENS, post_process
from .solver import (
    AnswerSet,
    Classification,
    Outcome,
    SolveResult,
    classify_outcome,
    classify_text,
    render_ground_atom,
    solve,
    solve_text,
)
from .syntax import Program, Rule, render_program, render_rule
from .tokens import Token, tokenize

__all__ = [
    "AspError",
    "AnswerSet",
    "Classification",
    "DEFAULT_LIMITS",
    "DEFAULT_STOP_TOKENS",
    "EvaluationError",
    "GroundProgram",
    "GroundRule",
    "LexError",
    "Outcome",
    "ParseError",
    "Program",
    "ResourceLimitError",
    "Rule",
    "SafetyError",
    "SolveLimits",
    "SolveResult",
    "Token",
    "UnsupportedProgramError",
    "check_syntax",
    "classify_outcome",
    "classify_text",
    "ground",
    "parse",
    "post_process",
    "render_ground_atom",
    "render_program",
    "render_rule",
    "solve",
    "solve_text",
    "tokenize",
]
