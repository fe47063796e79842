"""StepGame-style benchmark generation.

Entries are simple chains of spatial relations between lettered agents. A
story describes one edge per sentence (in shuffled order), the query asks
for the relation between the two chain endpoints, and the gold answer is
computed by direct coordinate propagation, independent of any logic
evaluation. Each entry also carries the ASP facts a perfect translator
would emit, so a reference program can be assembled for any entry.
"""

from __future__ import annotations

import json
import random
import re
import string
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .relations import ALL_RELATIONS, Relation, relation_from_asp_name, relation_from_signs

MIN_HOPS = 1
MAX_HOPS = 24

# Generic solving rules shared by every reference program: anchor the second
# query node at the origin, propagate locations along edges in both
# directions over the declared integer domain, and read the answer off the
# sign of the first query node's displacement.
GOLD_RULE_BLOCK = """\
location(Q2, 0, 0) :- query(_, Q2).

answer(R) :- query(Q1, _), location(Q1, X, Y), offset(R, Ox, Oy), Ox=-1: X<0; Ox=0: X=0; Ox=1: X>0; Oy=-1: Y<0; Oy=0: Y=0; Oy=1: Y>0.

is(A, top, B) :- top(A, B).
is(A, top, B) :- up(A, B).
is(A, down, B) :- down(A, B).
is(A, left, B) :- left(A, B).
is(A, right, B) :- right(A, B).
is(A, top_left, B) :- top_left(A, B).
is(A, top_right, B) :- top_right(A, B).
is(A, down_left, B) :- down_left(A, B).
is(A, down_right, B) :- down_right(A, B).
is(A, east, B) :- east(A, B).
is(A, west, B) :- west(A, B).
is(A, south, B) :- south(A, B).
is(A, north, B) :- north(A, B).

synonyms(north, northOf; south, southOf; west, westOf; east, eastOf; top, northOf; down, southOf; left, westOf; right, eastOf).
synonyms(A, B) :- synonyms(B, A).
synonyms(A, C) :- synonyms(A, B), synonyms(B, C), A!=C.

offset(overlap,0,0; top,0,1; down,0,-1; left,-1,0; right,1,0; top_left,-1,1; top_right,1,1; down_left,-1,-1; down_right,1,-1).

is(A, R1, B) :- is(A, R2, B), synonyms(R1, R2).
is(A, R1, B) :- is(B, R2, A), offset(R2,X,Y), offset(R1,-X,-Y).

nums(-100..100).

location(A, Xa, Ya) :- location(B, Xb, Yb), nums(Xa), nums(Ya), is(A, Kind, B), offset(Kind, Dx, Dy), Xa-Xb=Dx, Ya-Yb=Dy.

location(B, Xb, Yb) :- location(A, Xa, Ya), nums(Xb), nums(Yb), is(A, Kind, B), offset(Kind, Dx, Dy), Xa-Xb=Dx, Ya-Yb=Dy.
"""


@dataclass(frozen=True)
class Edge:
    """Directed spatial statement: `frm` is `rel` of `to`."""

    frm: str
    to: str
    rel: Relation

    def __post_init__(self) -> None:
        if self.frm == self.to:
            raise ValueError(f"edge endpoints must differ, got {self.frm!r} twice")


@dataclass
class Entry:
    id: str
    hops: int
    edges: list[Edge]
    story: list[str]
    query: tuple[str, str]
    gold_answer: Relation
    gold_facts: list[str]

    def nodes(self) -> set[str]:
        out: set[str] = set()
        for e in self.edges:
            out.add(e.frm)
            out.add(e.to)
        return out


@dataclass
class DatasetSplit:
    name: str
    entries: list[Entry]

    @property
    def hop_distribution(self) -> dict[int, int]:
        dist: dict[int, int] = {}
        for e in self.entries:
            dist[e.hops] = dist.get(e.hops, 0) + 1
        return dist


def oracle_answer(edges: list[Edge], query: tuple[str, str]) -> Relation:
    """Answer a query by propagating coordinates along the edge graph.

    The second query node is placed at the origin; an edge rel(a, b) puts a
    at b + offset(rel). The answer is the relation matching the sign of the
    first query node's final coordinates.
    """
    q1, q2 = query
    if q1 == q2:
        known = {n for e in edges for n in (e.frm, e.to)}
        if q1 not in known and edges:
            raise ValueError(f"query node {q1!r} does not appear in the graph")
        return Relation.OVERLAP

    neighbours: dict[str, list[tuple[str, int, int]]] = {}
    for e in edges:
        dx, dy = e.rel.offset
        neighbours.setdefault(e.to, []).append((e.frm, dx, dy))
        neighbours.setdefault(e.frm, []).append((e.to, -dx, -dy))

    coords: dict[str, tuple[int, int]] = {q2: (0, 0)}
    frontier = [q2]
    while frontier:
        node = frontier.pop()
        x, y = coords[node]
        for other, dx, dy in neighbours.get(node, ()):
            pos = (x + dx, y + dy)
            seen = coords.get(other)
            if seen is None:
                coords[other] = pos
                frontier.append(other)
            elif seen != pos:
                raise ValueError(f"inconsistent coordinates for node {other!r}: {seen} vs {pos}")

    if q1 not in coords:
        raise ValueError(f"query nodes {q1!r} and {q2!r} are not connected")
    x, y = coords[q1]
    return relation_from_signs(x, y)


def node_coordinates(edges: list[Edge], anchor: str) -> dict[str, tuple[int, int]]:
    """Coordinates of every node reachable from `anchor` (placed at origin)."""
    neighbours: dict[str, list[tuple[str, int, int]]] = {}
    for e in edges:
        dx, dy = e.rel.offset
        neighbours.setdefault(e.to, []).append((e.frm, dx, dy))
        neighbours.setdefault(e.frm, []).append((e.to, -dx, -dy))
    coords = {anchor: (0, 0)}
    frontier = [anchor]
    while frontier:
        node = frontier.pop()
        x, y = coords[node]
        for other, dx, dy in neighbours.get(node, ()):
            if other not in coords:
                coords[other] = (x + dx, y + dy)
                frontier.append(other)
    return coords


_TEMPLATE_CACHE: dict[str, list[str]] | None = None


def default_templates() -> dict[str, list[str]]:
    """Sentence templates per relation, loaded from the packaged asset."""
    global _TEMPLATE_CACHE
    if _TEMPLATE_CACHE is None:
        text = resources.files("clmasp.data").joinpath("templates.json").read_text("utf-8")
        _TEMPLATE_CACHE = json.loads(text)
    return _TEMPLATE_CACHE


def render_story(
    entry_edges: list[Edge],
    template_table: dict[str, list[str]] | None = None,
    rng: random.Random | int = 0,
) -> list[str]:
    """One numbered sentence per edge, template drawn per edge relation."""
    if isinstance(rng, int):
        rng = random.Random(rng)
    table = template_table if template_table is not None else default_templates()
    sentences = []
    for i, edge in enumerate(entry_edges):
        options = table.get(edge.rel.value)
        if not options:
            raise KeyError(f"no sentence template for relation {edge.rel.value!r}")
        tpl = rng.choice(options)
        sentences.append(f"{i + 1} " + tpl.format(a=edge.frm, b=edge.to))
    return sentences


def fact_for_edge(edge: Edge) -> str:
    """ASP fact a perfect translator would emit for this edge.

    Overlap has no bridging rule in the generic block, so overlap edges are
    stated directly on the is/3 relation that the block propagates.
    """
    if edge.rel is Relation.OVERLAP:
        return f'is("{edge.frm}", overlap, "{edge.to}").'
    return f'{edge.rel.asp_name}("{edge.frm}", "{edge.to}").'


_FACT_RE = re.compile(r'^(\w+)\("([A-Z])", "([A-Z])"\)\.$')
_IS_FACT_RE = re.compile(r'^is\("([A-Z])", (\w+), "([A-Z])"\)\.$')


def edge_from_fact(fact: str) -> Edge:
    m = _IS_FACT_RE.match(fact)
    if m:
        frm, name, to = m.groups()
    else:
        m = _FACT_RE.match(fact)
        if not m:
            raise ValueError(f"unrecognised gold fact: {fact!r}")
        name, frm, to = m.groups()
    rel = relation_from_asp_name(name)
    if rel is None:
        raise ValueError(f"unknown relation in gold fact: {fact!r}")
    return Edge(frm, to, rel)


def generate_entry(
    hops: int,
    seed: int,
    template_table: dict[str, list[str]] | None = None,
    shuffle_sentences: bool = True,
    entry_id: str | None = None,
) -> Entry:
    """Generate one chain entry; a pure function of (hops, seed)."""
    if not MIN_HOPS <= hops <= MAX_HOPS:
        raise ValueError(f"hops must be in [{MIN_HOPS}, {MAX_HOPS}], got {hops}")
    rng = random.Random(seed)
    nodes = rng.sample(string.ascii_uppercase, hops + 1)
    edges = []
    for i in range(hops):
        rel = rng.choice(ALL_RELATIONS)
        if rng.random() < 0.5:
            edges.append(Edge(nodes[i], nodes[i + 1], rel))
        else:
            edges.append(Edge(nodes[i + 1], nodes[i], rel))
    query = (nodes[-1], nodes[0])
    if rng.random() < 0.5:
        query = (nodes[0], nodes[-1])
    if shuffle_sentences:
        rng.shuffle(edges)
    story = render_story(edges, template_table, rng)
    return Entry(
        id=entry_id if entry_id is not None else f"h{hops}-s{seed}",
        hops=hops,
        edges=edges,
        story=story,
        query=query,
        gold_answer=oracle_answer(edges, query),
        gold_facts=[fact_for_edge(e) for e in edges],
    )


def gold_program(entry: Entry) -> str:
    """Reference ASP program: per-edge facts, query fact, generic rule block."""
    parts = list(entry.gold_facts)
    parts.append(f'query("{entry.query[0]}", "{entry.query[1]}").')
    return "\n\n".join(parts) + "\n\n" + GOLD_RULE_BLOCK


def _seed_stream(master_seed: int, tag: str) -> random.Random:
    return random.Random(f"{master_seed}/{tag}")


def _allocate_counts(total: int, hop_mix: dict[int, float]) -> dict[int, int]:
    """Split `total` across hops proportionally to hop_mix, exactly."""
    weight_sum = sum(hop_mix.values())
    if weight_sum <= 0:
        raise ValueError("hop mix weights must sum to a positive value")
    shares = {h: total * w / weight_sum for h, w in hop_mix.items() if w > 0}
    counts = {h: int(s) for h, s in shares.items()}
    remainder = total - sum(counts.values())
    leftovers = sorted(shares, key=lambda h: (-(shares[h] - counts[h]), h))
    for h in leftovers[:remainder]:
        counts[h] += 1
    return {h: c for h, c in counts.items() if c > 0}


def build_splits(
    totals: dict[str, int],
    hop_mix: dict[int, float] | None = None,
    seed: int = 0,
    shuffle_sentences: bool = True,
) -> dict[str, DatasetSplit]:
    """Deterministic, disjoint dataset splits with the requested hop mix."""
    if hop_mix is None:
        hop_mix = {h: 1.0 for h in range(MIN_HOPS, MAX_HOPS + 1)}
    for h in hop_mix:
        if not MIN_HOPS <= h <= MAX_HOPS:
            raise ValueError(f"hop {h} outside supported range")
    splits: dict[str, DatasetSplit] = {}
    for name, total in totals.items():
        rng = _seed_stream(seed, name)
        counts = _allocate_counts(total, hop_mix)
        hop_sequence = [h for h in sorted(counts) for _ in range(counts[h])]
        rng.shuffle(hop_sequence)
        entries = []
        for i, hop in enumerate(hop_sequence):
            entries.append(
                generate_entry(
                    hop,
                    rng.getrandbits(62),
                    shuffle_sentences=shuffle_sentences,
                    entry_id=f"{name}-{i:06d}",
                )
            )
        splits[name] = DatasetSplit(name=name, entries=entries)
    return splits


def sample_test_slice(split: DatasetSplit, hop: int, n: int, seed: int = 0) -> list[Entry]:
    """n distinct entries with the given hop count, sampled without replacement."""
    if n == 0:
        return []
    candidates = [e for e in split.entries if e.hops == hop]
    if n > len(candidates):
        raise ValueError(
            f"requested {n} entries with {hop} hops from split {split.name!r}, "
            f"only {len(candidates)} available"
        )
    return _seed_stream(seed, f"slice/{split.name}/{hop}/{n}").sample(candidates, n)


def entry_to_json(entry: Entry) -> dict:
    return {
        "id": entry.id,
        "hops": entry.hops,
        "story": entry.story,
        "query": list(entry.query),
        "answer": entry.gold_answer.value,
        "gold_facts": entry.gold_facts,
    }


def entry_from_json(obj: dict) -> Entry:
    edges = [edge_from_fact(f) for f in obj["gold_facts"]]
    return Entry(
        id=obj["id"],
        hops=obj["hops"],
        edges=edges,
        story=list(obj["story"]),
        query=(obj["query"][0], obj["query"][1]),
        gold_answer=Relation(obj["answer"]),
        gold_facts=list(obj["gold_facts"]),
    )


def write_jsonl(path: str | Path, entries: list[Entry]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for e in entries:
            fh.write(json.dumps(entry_to_json(e), sort_keys=True) + "\n")


def read_jsonl(path: str | Path) -> list[Entry]:
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(entry_from_json(json.loads(line)))
    return out
