"""Hand-made schemes used throughout the tests and the CLI, plus seeded random schemes."""

from __future__ import annotations

import random
import string
from typing import Sequence

from .model import Scheme, build_scheme


def block_names(count: int) -> list[str]:
    letters = string.ascii_lowercase
    if count <= len(letters):
        return list(letters[:count])
    return [f"b{i:02d}" for i in range(count)]


def pairs_with_tail(blocks: Sequence[str]) -> list[list[str]]:
    """Pair consecutive blocks; an odd one out joins the last pair."""
    groups = [list(blocks[i:i + 2]) for i in range(0, len(blocks), 2)]
    if len(groups) > 1 and len(groups[-1]) == 1:
        groups[-2].extend(groups.pop())
    return groups


def toy3() -> Scheme:
    """Three blocks of size four; every index forms one triple in each table."""
    blocks = ["a", "b", "c"]
    sets = [(k, blocks) for k in range(1, 5)]
    return build_scheme(blocks, 4, sets, sets)


def _complete(blocks, b, placed):
    """Per index, keep the placed sets and pair up whatever is left over."""
    out = []
    for k in range(1, b + 1):
        fixed = placed.get(k, [])
        used = {blk for grp in fixed for blk in grp}
        rest = [blk for blk in blocks if blk not in used]
        out.extend((k, grp) for grp in fixed)
        if rest:
            out.extend((k, grp) for grp in pairs_with_tail(rest))
    return out


def fig1c() -> Scheme:
    """Blocks a..h with b = 8 containing the sets drawn in the nodes-and-paths figure.

    Table B: V = {a1, b1}, W = {c3, f3}, X = {d3, e3, g3}.
    Table C: Y = {b2, c2, d2, e2}, Z = {g4, h4}.
    """
    blocks = list("abcdefgh")
    table_b = _complete(blocks, 8, {1: [["a", "b"]], 3: [["c", "f"], ["d", "e", "g"]]})
    table_c = _complete(blocks, 8, {2: [["b", "c", "d", "e"]], 4: [["g", "h"]]})
    return build_scheme(blocks, 8, table_b, table_c)


def dbl() -> Scheme:
    """A deliberately broken scheme (b = 8, blocks a..g).

    Blocks a, b, c form a triple at indices 1..4 in both tables, so a1 is bad
    with respect to B while a3 is bad with respect to C.
    """
    blocks = list("abcdefg")
    table_b, table_c = [], []
    for k in range(1, 5):
        table_b += [(k, "abc"), (k, "de"), (k, "fg")]
        table_c += [(k, "abc"), (k, "dg"), (k, "ef")]
    for k in range(5, 9):
        table_b += [(k, "ad"), (k, "be"), (k, "cfg")]
        table_c += [(k, "ae"), (k, "bf"), (k, "cdg")]
    return build_scheme(blocks, 8, table_b, table_c)


FIXTURES = {"toy3": toy3, "fig1c": fig1c, "dbl": dbl}


def random_partition(rng: random.Random, items: Sequence[str], sizes=(2, 3), weights=None) -> list[list[str]]:
    items = list(items)
    rng.shuffle(items)
    groups: list[list[str]] = []
    while items:
        size = rng.choices(sizes, weights=weights)[0]
        grp, items = items[:size], items[size:]
        groups.append(grp)
    if len(groups) > 1 and len(groups[-1]) < 2:
        groups[-2].extend(groups.pop())
    return groups


def random_scheme(rng: random.Random, s: int, b: int, sizes=(2, 3), weights=None) -> Scheme:
    """A valid restricted scheme with ``s`` blocks; set sizes drawn from ``sizes``."""
    if s < 2:
        raise ValueError("restricted schemes need at least two blocks")
    blocks = block_names(s)
    table_b, table_c = [], []
    for k in range(1, b + 1):
        table_b += [(k, grp) for grp in random_partition(rng, blocks, sizes, weights)]
        table_c += [(k, grp) for grp in random_partition(rng, blocks, sizes, weights)]
    return build_scheme(blocks, b, table_b, table_c)
