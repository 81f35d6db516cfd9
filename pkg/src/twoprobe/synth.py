"""Exhaustive search for the smallest restricted scheme storing every small subset.

Space is measured as the number of bits of tables B and C, ``max(|B|, |C|)``;
table A always has one bit per block.  The search fixes the table-B partition
of index 1 to one representative per shape (block relabelling is a symmetry),
extends index by index, and prunes as soon as a subset living on the indices
placed so far cannot be stored, since later indices cannot constrain it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator

from .fixtures import block_names
from .model import Element, Scheme, build_scheme
from .storability import can_store, verify_assignment


def partitions_without_singletons(k: int) -> list[tuple[tuple[int, ...], ...]]:
    """All partitions of ``range(k)`` into parts of size at least two."""

    def grow(pos: int, parts: list[list[int]]) -> Iterator[list[list[int]]]:
        if pos == k:
            yield parts
            return
        for part in parts:
            part.append(pos)
            yield from grow(pos + 1, parts)
            part.pop()
        parts.append([pos])
        yield from grow(pos + 1, parts)
        parts.pop()

    out = [tuple(tuple(p) for p in parts) for parts in grow(0, []) if all(len(p) >= 2 for p in parts)]
    return sorted(out, key=lambda parts: (len(parts), parts))


def shape_representatives(k: int) -> list[tuple[tuple[int, ...], ...]]:
    """One partition per multiset of part sizes, parts laid out consecutively."""
    reps = {}
    for parts in partitions_without_singletons(k):
        shape = tuple(sorted((len(p) for p in parts), reverse=True))
        if shape not in reps:
            pos, layout = 0, []
            for size in shape:
                layout.append(tuple(range(pos, pos + size)))
                pos += size
            reps[shape] = tuple(layout)
    return sorted(reps.values(), key=lambda parts: (len(parts), parts))


def _storable(k: int, subset, part_masks) -> bool:
    """Brute force over block placements; ``part_masks[(table, index)][block]`` is the set mask."""
    constraints = []
    for table in (0, 1):
        touched: dict[tuple[int, int], int] = {}
        for blk, idx in subset:
            mask = part_masks[(table, idx)][blk]
            touched[(idx, mask)] = touched.get((idx, mask), 0) | (1 << blk)
        for (idx, mask), inside in touched.items():
            outside = mask & ~inside
            if outside:
                constraints.append((table, inside, outside))
    if not constraints:
        return True
    full = (1 << k) - 1
    for placement in range(1 << k):
        # bit set: block stored in C (table 1)
        for table, inside, outside in constraints:
            here = placement if table == 1 else full & ~placement
            if here & inside and here & outside:
                break
        else:
            return True
    return False


@dataclass
class SynthResult:
    n: int
    m: int
    b: int
    minimal_s: int | None
    witness: Scheme | None
    exhaustive: bool
    examined: int

    def row(self) -> dict:
        return {"n": self.n, "m": self.m, "b": self.b,
                "minimal_s": "" if self.minimal_s is None else self.minimal_s,
                "exhaustive": self.exhaustive}


SYNTH_COLUMNS = ["n", "m", "b", "minimal_s", "exhaustive"]


def _masks(parts) -> list[int]:
    out = {}
    for part in parts:
        mask = sum(1 << x for x in part)
        for x in part:
            out[x] = mask
    return [out[x] for x in sorted(out)]


def synth_min_space(n: int, m: int, b: int) -> SynthResult:
    if b < 1 or m % b:
        raise ValueError(f"m = {m} is not a multiple of b = {b}")
    k = m // b
    if k < 2:
        return SynthResult(n, m, b, None, None, True, 0)
    all_parts = partitions_without_singletons(k)
    masks = {parts: _masks(parts) for parts in all_parts}
    best: list = [None, None]  # table size, (B partitions, C partitions)
    examined = 0

    def subsets_ending_at(idx: int):
        newer = [(blk, idx) for blk in range(k)]
        older = [(blk, j) for j in range(1, idx) for blk in range(k)]
        for size in range(1, n + 1):
            for fresh in range(1, size + 1):
                for a in itertools.combinations(newer, fresh):
                    for c in itertools.combinations(older, size - fresh):
                        yield a + c

    subset_cache = {idx: list(subsets_ending_at(idx)) for idx in range(1, b + 1)}

    def search(idx: int, chosen_b: list, chosen_c: list, part_masks: dict) -> None:
        nonlocal examined
        if idx > b:
            examined += 1
            size = max(sum(map(len, chosen_b)), sum(map(len, chosen_c)))
            if best[0] is None or size < best[0]:
                best[0], best[1] = size, (list(chosen_b), list(chosen_c))
            return
        remaining = b - idx  # indices still to place after this one
        options_b = shape_representatives(k) if idx == 1 else all_parts
        used_b = sum(map(len, chosen_b))
        used_c = sum(map(len, chosen_c))
        for pb in options_b:
            if best[0] is not None and used_b + len(pb) + remaining >= best[0]:
                continue
            for pc in all_parts:
                if best[0] is not None and used_c + len(pc) + remaining >= best[0]:
                    continue
                part_masks[(0, idx)] = masks[pb]
                part_masks[(1, idx)] = masks[pc]
                if all(_storable(k, sub, part_masks) for sub in subset_cache[idx]):
                    search(idx + 1, chosen_b + [pb], chosen_c + [pc], part_masks)
        part_masks.pop((0, idx), None)
        part_masks.pop((1, idx), None)

    search(1, [], [], {})
    if best[0] is None:
        return SynthResult(n, m, b, None, None, True, examined)
    witness = _to_scheme(k, b, *best[1])
    return SynthResult(n, m, b, best[0], witness, True, examined)


def _to_scheme(k: int, b: int, parts_b, parts_c) -> Scheme:
    names = block_names(k)

    def entries(per_index):
        return [(idx, [names[x] for x in part]) for idx, parts in enumerate(per_index, start=1) for part in parts]

    return build_scheme(names, b, entries(parts_b), entries(parts_c))


def first_unstorable(scheme: Scheme, n: int) -> frozenset[Element] | None:
    """First subset of size at most ``n`` (by size, then lexicographically) the scheme cannot store."""
    for size in range(n + 1):
        for combo in itertools.combinations(scheme.universe, size):
            res = can_store(scheme, combo)
            if not res.storable:
                return frozenset(combo)
            assert not verify_assignment(scheme, res.assignment, combo)
    return None
