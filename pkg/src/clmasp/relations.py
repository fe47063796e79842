"""The nine spatial relations and their integer offsets.

Every relation maps to a unit offset (dx, dy) with components in {-1, 0, 1};
the answer of a spatial query is the relation whose offset matches the sign
of the queried node's displacement.
"""

from __future__ import annotations

from enum import Enum


class Relation(Enum):
    RIGHT = "right"
    TOP_RIGHT = "top_right"
    TOP = "top"
    TOP_LEFT = "top_left"
    LEFT = "left"
    BOTTOM_LEFT = "bottom_left"
    BOTTOM = "bottom"
    BOTTOM_RIGHT = "bottom_right"
    OVERLAP = "overlap"

    @property
    def offset(self) -> tuple[int, int]:
        return OFFSETS[self]

    @property
    def asp_name(self) -> str:
        """Predicate name used in ASP programs (bottom* is spelled down*)."""
        return ASP_NAMES[self]

    def inverse(self) -> "Relation":
        dx, dy = OFFSETS[self]
        return relation_from_signs(-dx, -dy)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"Relation.{self.name}"


OFFSETS: dict[Relation, tuple[int, int]] = {
    Relation.OVERLAP: (0, 0),
    Relation.TOP: (0, 1),
    Relation.BOTTOM: (0, -1),
    Relation.LEFT: (-1, 0),
    Relation.RIGHT: (1, 0),
    Relation.TOP_LEFT: (-1, 1),
    Relation.TOP_RIGHT: (1, 1),
    Relation.BOTTOM_LEFT: (-1, -1),
    Relation.BOTTOM_RIGHT: (1, -1),
}

ASP_NAMES: dict[Relation, str] = {
    Relation.RIGHT: "right",
    Relation.TOP_RIGHT: "top_right",
    Relation.TOP: "top",
    Relation.TOP_LEFT: "top_left",
    Relation.LEFT: "left",
    Relation.BOTTOM_LEFT: "down_left",
    Relation.BOTTOM: "down",
    Relation.BOTTOM_RIGHT: "down_right",
    Relation.OVERLAP: "overlap",
}

_BY_SIGNS = {off: rel for rel, off in OFFSETS.items()}
_BY_ASP_NAME = {name: rel for rel, name in ASP_NAMES.items()}

ALL_RELATIONS: tuple[Relation, ...] = tuple(Relation)


def relation_from_signs(dx: int, dy: int) -> Relation:
    """Relation whose offset equals (sign(dx), sign(dy))."""
    sx = (dx > 0) - (dx < 0)
    sy = (dy > 0) - (dy < 0)
    return _BY_SIGNS[(sx, sy)]


def relation_from_asp_name(name: str) -> Relation | None:
    return _BY_ASP_NAME.get(name)
