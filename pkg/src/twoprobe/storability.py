"""Query simulation and the decision procedure for storing a subset.

A block is *stored in B* when its table-A bit is 0 and *stored in C* when it
is 1.  Once every block has a table, the set bits are forced: a set's bit is 1
exactly when one of its members stored in that table belongs to the subset.
So storability reduces to choosing a table per block such that no set mixes a
member of the subset with a non-member among the blocks stored in that table,
a 2-SAT instance over the blocks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping

import numpy as np

from .model import Element, Scheme, Table, format_subset
from .twosat import TwoSat, lit

BRUTEFORCE_MAX_BLOCKS = 20
SMALL_BLOCKS = 10


@dataclass
class Assignment:
    a_bits: dict[str, int]
    b_bits: dict[int, int]
    c_bits: dict[int, int]

    def bits(self, table: Table) -> dict[int, int]:
        return self.b_bits if table is Table.B else self.c_bits

    def to_dict(self) -> dict:
        return {
            "a_bits": dict(sorted(self.a_bits.items())),
            "b_bits": {str(k): v for k, v in sorted(self.b_bits.items())},
            "c_bits": {str(k): v for k, v in sorted(self.c_bits.items())},
        }

    @classmethod
    def zeros(cls, scheme: Scheme) -> "Assignment":
        return cls(
            {blk: 0 for blk in scheme.blocks},
            {r.bit: 0 for r in scheme.table_b},
            {r.bit: 0 for r in scheme.table_c},
        )


@dataclass
class StorabilityResult:
    assignment: Assignment | None = None
    conflict: list[str] = field(default_factory=list)

    @property
    def storable(self) -> bool:
        return self.assignment is not None

    def to_dict(self) -> dict:
        if self.storable:
            return {"outcome": "storable", "assignment": self.assignment.to_dict()}
        return {"outcome": "unstorable", "conflict": list(self.conflict)}


class Forced(str, Enum):
    FORCED_B = "ForcedB"
    FORCED_C = "ForcedC"
    FREE = "Free"
    UNSTORABLE = "Unstorable"


def answer_query(scheme: Scheme, asg: Assignment, e: Element) -> bool:
    table = Table.B if asg.a_bits[e.block] == 0 else Table.C
    return asg.bits(table)[scheme.set_of(e, table).bit] == 1


@dataclass(frozen=True)
class QueryMismatch:
    element: Element
    expected: bool

    def __str__(self) -> str:
        said = "Yes" if not self.expected else "No"
        return f"{self.element} answers {said}"


def verify_assignment(scheme: Scheme, asg: Assignment, subset: Iterable[Element]) -> list[QueryMismatch]:
    subset = frozenset(subset)
    return [
        QueryMismatch(e, e in subset)
        for e in scheme.universe
        if answer_query(scheme, asg, e) != (e in subset)
    ]


def _check_subset(scheme: Scheme, subset) -> frozenset[Element]:
    subset = frozenset(subset)
    stray = [e for e in subset if not scheme.has_element(e)]
    if stray:
        raise ValueError(f"elements outside the universe: {format_subset(stray)}")
    return subset


def assignment_from_tables(scheme: Scheme, subset, placement: Mapping[str, Table]) -> Assignment:
    """Fill in the set bits implied by a block-to-table placement."""
    a_bits = {blk: 0 if placement[blk] is Table.B else 1 for blk in scheme.blocks}
    tables = {}
    for table in Table:
        tables[table] = {
            rec.bit: int(any(e in subset and placement[e.block] is table for e in rec.members))
            for rec in scheme.records(table)
        }
    return Assignment(a_bits, tables[Table.B], tables[Table.C])


def _mixed_sets(scheme: Scheme, subset):
    """Sets holding both a subset member and a non-member: the only constraints."""
    for table in Table:
        for rec in scheme.records(table):
            inside = [e for e in rec.members if e in subset]
            if inside and len(inside) < len(rec.members):
                outside = [e for e in rec.members if e not in subset]
                yield table, rec, inside, outside


def _describe(step, blocks) -> str:
    src_blk, src_tab = blocks[step.src // 2], "C" if step.src % 2 == 0 else "B"
    dst_blk, dst_tab = blocks[step.dst // 2], "C" if step.dst % 2 == 0 else "B"
    head = f"{src_blk}->{src_tab} => {dst_blk}->{dst_tab}"
    reason = step.reason
    if reason is None:
        return head
    if reason[0] == "pin":
        return f"{head} (pinned {reason[1]} to {reason[2]})"
    table, rec, e, f = reason
    return f"{head} (set {table}#{rec.bit} at index {rec.index}: {e} in S, {f} not in S)"


def can_store(scheme: Scheme, subset: Iterable[Element], pins: Mapping[str, Table] | None = None) -> StorabilityResult:
    """Decide whether ``subset`` can be stored, optionally with some blocks pinned to a table."""
    subset = _check_subset(scheme, subset)
    blocks = sorted(scheme.blocks)
    var = {blk: i for i, blk in enumerate(blocks)}
    sat = TwoSat(len(blocks))
    for table, rec, inside, outside in _mixed_sets(scheme, subset):
        # True means "stored in C"; two blocks may not both sit in `table`.
        in_table = table is Table.C
        for e in inside:
            for f in outside:
                sat.add_clause(lit(var[e.block], not in_table), lit(var[f.block], not in_table), (table, rec, e, f))
    for blk, table in (pins or {}).items():
        if blk not in var:
            raise KeyError(f"unknown block {blk!r}")
        sat.force(lit(var[blk], table is Table.C), ("pin", blk, table))

    values, cycle = sat.solve()
    if values is None:
        return StorabilityResult(conflict=[_describe(step, blocks) for step in cycle])
    placement = {blk: Table.C if values[var[blk]] else Table.B for blk in blocks}
    return StorabilityResult(assignment_from_tables(scheme, subset, placement))


def storable(scheme: Scheme, subset: Iterable[Element]) -> bool:
    """Yes/no storability without a trace or assignment; for bulk sweeps.

    Only sets containing a member of the subset can be mixed, so those are
    found through the element lookup instead of scanning every set.  With few
    blocks, trying every placement as a bit mask beats building the graph.
    """
    subset = frozenset(subset)
    pos = {blk: i for i, blk in enumerate(scheme.blocks)}
    n = len(pos)
    rules = {Table.B: set(), Table.C: set()}
    for table, found in rules.items():
        lookup = scheme._lookup[table]
        for e in subset:
            rec = lookup.get(e)
            if rec is None:
                continue
            in_mask = out_mask = 0
            for x in rec.members:
                if x in subset:
                    in_mask |= 1 << pos[x.block]
                else:
                    out_mask |= 1 << pos[x.block]
            if out_mask:
                found.add((in_mask, out_mask))
    if n <= SMALL_BLOCKS:
        full = (1 << n) - 1
        on_b, on_c = rules[Table.B], rules[Table.C]
        # bit i of a placement is 1 when block i is stored in C
        for placement in range(1 << n):
            here = full ^ placement
            if any(here & i and here & o for i, o in on_b):
                continue
            if any(placement & i and placement & o for i, o in on_c):
                continue
            return True
        return False
    sat = TwoSat(n)
    for table, found in rules.items():
        in_table = table is Table.C
        for in_mask, out_mask in found:
            for a in range(n):
                if in_mask >> a & 1:
                    for c in range(n):
                        if out_mask >> c & 1:
                            sat.add_clause(lit(a, not in_table), lit(c, not in_table))
    comp = sat._components()
    return all(comp[2 * v] != comp[2 * v + 1] for v in range(n))


def can_store_bruteforce(scheme: Scheme, subset: Iterable[Element], pins: Mapping[str, Table] | None = None) -> StorabilityResult:
    """Try every block placement.  Only for schemes with at most 20 blocks."""
    subset = _check_subset(scheme, subset)
    blocks = sorted(scheme.blocks)
    if len(blocks) > BRUTEFORCE_MAX_BLOCKS:
        raise ValueError(f"brute force limited to {BRUTEFORCE_MAX_BLOCKS} blocks, scheme has {len(blocks)}")
    pos = {blk: i for i, blk in enumerate(blocks)}
    # bit i of a placement is 1 when block i is stored in C
    placements = np.arange(1 << len(blocks), dtype=np.int64)
    ok = np.ones(placements.shape, dtype=bool)
    for blk, table in (pins or {}).items():
        on_c = (placements >> pos[blk]) & 1
        ok &= on_c == (1 if table is Table.C else 0)
    for table in Table:
        stored_here = placements if table is Table.C else ~placements
        for rec in scheme.records(table):
            in_mask = sum(1 << pos[e.block] for e in rec.members if e in subset)
            out_mask = sum(1 << pos[e.block] for e in rec.members if e not in subset)
            if in_mask and out_mask:
                ok &= ~(((stored_here & in_mask) != 0) & ((stored_here & out_mask) != 0))
    hits = np.flatnonzero(ok)
    if hits.size == 0:
        return StorabilityResult(conflict=[f"none of the {1 << len(blocks)} block placements answers every query correctly"])
    best = int(hits[0])
    placement = {blk: Table.C if (best >> pos[blk]) & 1 else Table.B for blk in blocks}
    return StorabilityResult(assignment_from_tables(scheme, subset, placement))


def forced_table(scheme: Scheme, subset: Iterable[Element], block: str) -> Forced:
    if block not in scheme.blocks:
        raise KeyError(f"unknown block {block!r}")
    in_b = can_store(scheme, subset, {block: Table.B}).storable
    in_c = can_store(scheme, subset, {block: Table.C}).storable
    if in_b and in_c:
        return Forced.FREE
    if in_b:
        return Forced.FORCED_B
    if in_c:
        return Forced.FORCED_C
    return Forced.UNSTORABLE
