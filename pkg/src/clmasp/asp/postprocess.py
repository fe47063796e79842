"""Cleanup of raw model output before the syntax check.

Generation often truncates mid-statement at the token limit or runs past the
program into a new prompt section. Cleanup truncates at the first stop token
and strips trailing incomplete statements (lines that do not end with `.`),
leaving comment lines alone.
"""

from __future__ import annotations

DEFAULT_STOP_TOKENS: tuple[str, ...] = ("### Instruction", "```")


def post_process(raw_text: str, stop_tokens: tuple[str, ...] = DEFAULT_STOP_TOKENS) -> str:
    text = raw_text
    cut = -1
    for stop in stop_tokens:
        idx = text.find(stop)
        if idx >= 0 and (cut < 0 or idx < cut):
            cut = idx
    if cut >= 0:
        text = text[:cut]

    lines = text.splitlines(keepends=True)
    changed = cut >= 0
    while True:
        i = len(lines) - 1
        while i >= 0 and not lines[i].strip():
            i -= 1
        if i < 0:
            break
        stripped = lines[i].strip()
        if stripped.startswith("%") or stripped.endswith("."):
            break
        del lines[i:]
        changed = True
    return "".join(lines) if changed else raw_text
