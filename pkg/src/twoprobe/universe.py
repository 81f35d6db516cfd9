"""Nodes, edges and paths over a scheme's sets, i-Universes, and bad elements.

A node ``(e, f)_T`` is an ordered pair of distinct members of one set of table
``T``.  An edge joins ``(e_k, f_k)_T`` to ``(f_{k+1}, h_{k+1})_{T'}`` for the
other table ``T'``.  Universes grow one index per level and alternate tables;
an element is *i-bad* when two members of one of its first ``i`` universes
share a set of the table the next level would expand through.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, NamedTuple

from .model import Element, Scheme, SetRecord, Table, index_add, path_cap, peers


class CapError(ValueError):
    """Requested path length or universe depth beyond ``b // 2 - 1``."""


class Node(NamedTuple):
    table: Table
    antecedent: Element
    consequent: Element

    def __str__(self) -> str:
        return f"({self.antecedent},{self.consequent})_{self.table}"

    @classmethod
    def parse(cls, text: str) -> "Node":
        """Parse ``"a:1,b:1,B"``."""
        first, second, table = (tok.strip() for tok in text.split(","))
        return cls(Table(table.upper()), Element.parse(first), Element.parse(second))


@dataclass(frozen=True)
class Path:
    nodes: tuple[Node, ...]

    @property
    def length(self) -> int:
        return len(self.nodes) - 1

    @property
    def first(self) -> Node:
        return self.nodes[0]

    @property
    def last(self) -> Node:
        return self.nodes[-1]

    def elements(self) -> list[Element]:
        return [x for node in self.nodes for x in (node.antecedent, node.consequent)]

    def __str__(self) -> str:
        return " -> ".join(str(n) for n in self.nodes)

    def to_list(self) -> list[list[str]]:
        return [[str(n.antecedent), str(n.consequent), n.table.value] for n in self.nodes]


def _check_cap(b: int, depth: int, override: bool) -> None:
    if depth < 0:
        raise CapError(f"depth must be non-negative, got {depth}")
    if not override and depth > path_cap(b):
        raise CapError(f"depth {depth} exceeds b//2 - 1 = {path_cap(b)} for b = {b}")


def is_node(scheme: Scheme, node: Node) -> bool:
    e, f = node.antecedent, node.consequent
    return e != f and scheme.has_element(e) and f in peers(scheme, e, node.table)


def path_problems(scheme: Scheme, path: Path, *, override_cap: bool = False) -> list[str]:
    """Everything wrong with ``path``; empty when it is a genuine path."""
    out = []
    if not path.nodes:
        return ["empty path"]
    for pos, node in enumerate(path.nodes):
        if not is_node(scheme, node):
            out.append(f"node {pos} {node} is not a pair of distinct same-set elements")
    for pos, (left, right) in enumerate(zip(path.nodes, path.nodes[1:])):
        if left.table == right.table:
            out.append(f"edge {pos}: both nodes in table {left.table}")
        if right.antecedent.index != index_add(left.consequent.index, 1, scheme.b):
            out.append(f"edge {pos}: index does not advance by one")
        if right.antecedent.block != left.consequent.block:
            out.append(f"edge {pos}: consequent and next antecedent lie in different blocks")
    if not override_cap and path.length > path_cap(scheme.b):
        out.append(f"length {path.length} exceeds {path_cap(scheme.b)}")
    elems = path.elements()
    if len(set(elems)) != len(elems):
        out.append("an element occurs twice")
    return out


def edges_from(scheme: Scheme, node: Node) -> list[Node]:
    table = node.table.other
    nxt = Element(node.consequent.block, index_add(node.consequent.index, 1, scheme.b))
    return [Node(table, nxt, h) for h in sorted(peers(scheme, nxt, table))]


def _extend(scheme: Scheme, prefix: list[Node], remaining: int) -> Iterator[Path]:
    if remaining == 0:
        yield Path(tuple(prefix))
        return
    for nxt in edges_from(scheme, prefix[-1]):
        prefix.append(nxt)
        yield from _extend(scheme, prefix, remaining - 1)
        prefix.pop()


def enumerate_paths(scheme: Scheme, start: Node, length: int, *, override_cap: bool = False) -> list[Path]:
    """All paths of exactly ``length`` edges beginning at ``start``, depth first."""
    _check_cap(scheme.b, length, override_cap)
    if not is_node(scheme, start):
        raise ValueError(f"{start} is not a node of the scheme")
    return list(_extend(scheme, [start], length))


def start_nodes(scheme: Scheme, e: Element, table: Table) -> list[Node]:
    return [Node(table, e, f) for f in sorted(peers(scheme, e, table))]


def one_universe(scheme: Scheme, e: Element, table: Table) -> frozenset[Element]:
    return frozenset(Element(u.block, index_add(u.index, 1, scheme.b)) for u in peers(scheme, e, table))


def level_table(table: Table, level: int) -> Table:
    """Table through which level ``level`` of a universe w.r.t. ``table`` expands."""
    return table if level % 2 == 1 else table.other


def witness_table(table: Table, level: int) -> Table:
    """Table of the last node of a length-``level`` path, and of the badness witness at that level."""
    return table if level % 2 == 0 else table.other


def universe_levels(scheme: Scheme, e: Element, table: Table, depth: int) -> list[frozenset[Element]]:
    """``[U^1, ..., U^depth]`` without any cap check."""
    levels = []
    current = frozenset([e])
    for level in range(1, depth + 1):
        through = table if level == 1 else level_table(table, level)
        current = frozenset().union(*(one_universe(scheme, u, through) for u in current))
        levels.append(current)
    return levels


def i_universe(scheme: Scheme, e: Element, table: Table, i: int, *, override_cap: bool = False) -> frozenset[Element]:
    _check_cap(scheme.b, i, override_cap)
    if i == 0:
        return frozenset([e])
    return universe_levels(scheme, e, table, i)[-1]


def universe_via_paths(scheme: Scheme, e: Element, table: Table, i: int, *, override_cap: bool = False) -> frozenset[Element]:
    """Last antecedents of all length-``i`` paths whose first node has antecedent ``e`` in ``table``."""
    _check_cap(scheme.b, i, override_cap)
    if i == 0:
        return frozenset([e])
    out = set()
    last_table = witness_table(table, i)
    for start in start_nodes(scheme, e, table):
        for path in _extend(scheme, [start], i):
            assert path.last.table is last_table
            out.add(path.last.antecedent)
    return frozenset(out)


@dataclass(frozen=True)
class BadnessCertificate:
    element: Element
    table: Table
    j: int
    u: Element
    v: Element
    witness_set: SetRecord

    def to_dict(self) -> dict:
        return {
            "element": str(self.element),
            "table": self.table.value,
            "j": self.j,
            "u": str(self.u),
            "v": str(self.v),
            "witness_set": {"table": self.witness_set.table.value, "bit": self.witness_set.bit,
                            "index": self.witness_set.index},
        }


def badness(scheme: Scheme, e: Element, table: Table, i: int, *, override_cap: bool = False) -> BadnessCertificate | None:
    """The smallest-level, lexicographically first witness that ``e`` is i-bad; ``None`` if i-good."""
    _check_cap(scheme.b, i, override_cap)
    for j, level in enumerate(universe_levels(scheme, e, table, i), start=1):
        shared = witness_table(table, j)
        members = sorted(level)
        for u in members:
            rec = scheme.set_of(u, shared)
            for v in members:
                if v != u and v in rec.members:
                    return BadnessCertificate(e, table, j, u, v, rec)
    return None
