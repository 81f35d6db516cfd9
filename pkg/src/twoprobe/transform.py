"""Turn a scheme into one whose index-1 elements are all i-good w.r.t. table B.

Stages, each materialised so it can be checked on its own:

1. split: blocks whose index-1 element is i-good form one sub-scheme, the rest
   another; every set is cut along that partition;
2. swap: in the second sub-scheme tables B and C trade places (its blocks now
   read the opposite table-A bit);
3. relabel: in the second sub-scheme index ``k`` and ``k + i + 1`` trade
   places for ``1 <= k <= i + 1``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field, replace
from typing import Iterable

from .model import Element, Scheme, SetRecord, Table, permute_indices, permute_subset
from .universe import badness

STAGE_COLUMNS = ["k", "b0", "c0", "b1", "c1", "b2", "c2", "b3", "c3"]


class TransformError(AssertionError):
    """A bookkeeping invariant of the pipeline failed."""


def _check_i(scheme: Scheme, i: int) -> None:
    if i < 1:
        raise ValueError(f"i must be at least 1, got {i}")
    if scheme.b < 2 * i + 3:
        raise ValueError(f"block size {scheme.b} too small for i = {i}; need b >= {2 * i + 3}")


def partition_universe(scheme: Scheme, i: int) -> tuple[list[str], list[str]]:
    """Blocks whose index-1 element is i-good w.r.t. B, and the others."""
    _check_i(scheme, i)
    good, bad = [], []
    for blk in scheme.blocks:
        (good if badness(scheme, Element(blk, 1), Table.B, i) is None else bad).append(blk)
    return good, bad


def relabel_permutation(i: int, b: int) -> dict[int, int]:
    perm = {k: k for k in range(1, b + 1)}
    for k in range(1, i + 2):
        perm[k], perm[k + i + 1] = k + i + 1, k
    return perm


@dataclass(frozen=True)
class SplitScheme:
    prime: Scheme
    double_prime: Scheme
    # (part, table, bit) of a new set -> (table, bit) of the set it was cut from
    provenance: dict = field(default_factory=dict, compare=False)
    swapped: bool = False
    permutation: tuple[int, ...] | None = None

    def split_subset(self, subset: Iterable[Element]) -> tuple[frozenset[Element], frozenset[Element]]:
        """Route an original-scheme subset to the two parts, following any relabelling."""
        subset = frozenset(subset)
        left = frozenset(e for e in subset if e.block in self.prime.blocks)
        right = subset - left
        if self.permutation is not None:
            right = permute_subset(right, self.permutation, self.double_prime.b)
        return left, right

    def parts(self) -> tuple[Scheme, Scheme]:
        return self.prime, self.double_prime

    def stage_tables(self) -> dict[Table, list[int]]:
        """Per-index set counts of the combined tables B and C."""
        b = self.prime.b
        out = {}
        for table in Table:
            counts = self.prime.set_counts(table) if self.prime.blocks else [0] * b
            other = self.double_prime.set_counts(table) if self.double_prime.blocks else [0] * b
            out[table] = [x + y for x, y in zip(counts, other)]
        return out


def _restrict(scheme: Scheme, blocks: list[str], part: str, provenance: dict) -> Scheme:
    keep = set(blocks)

    def cut(recs):
        out = []
        for rec in recs:
            members = tuple(e for e in rec.members if e.block in keep)
            if members:
                out.append(replace(rec, members=members))
                provenance[(part, rec.table.value, rec.bit)] = (rec.table.value, rec.bit)
        return tuple(out)

    ordered = tuple(blk for blk in scheme.blocks if blk in keep)
    return Scheme(len(ordered) * scheme.b, len(ordered), scheme.b, ordered,
                  cut(scheme.table_b), cut(scheme.table_c))


def split_tables(scheme: Scheme, partition: tuple[list[str], list[str]]) -> SplitScheme:
    """Cut every set along a partition of the blocks.

    Cutting may leave one-element sets; sub-schemes are checked with
    ``validate(..., allow_singletons=True)``.
    """
    good, bad = partition
    if sorted(good + bad) != sorted(scheme.blocks):
        raise ValueError("partition must cover every block exactly once")
    provenance: dict = {}
    return SplitScheme(_restrict(scheme, good, "prime", provenance),
                       _restrict(scheme, bad, "double_prime", provenance),
                       provenance)


def _retable(recs: tuple[SetRecord, ...], table: Table) -> tuple[SetRecord, ...]:
    return tuple(replace(r, table=table) for r in recs)


def swap_subtables(split: SplitScheme) -> SplitScheme:
    """Exchange tables B and C of the second part."""
    dp = split.double_prime
    swapped = replace(dp, table_b=_retable(dp.table_c, Table.B), table_c=_retable(dp.table_b, Table.C))
    provenance = {}
    for (part, table, bit), origin in split.provenance.items():
        if part == "double_prime":
            table = Table(table).other.value
        provenance[(part, table, bit)] = origin
    return replace(split, double_prime=swapped, provenance=provenance, swapped=not split.swapped)


def relabel(split: SplitScheme, i: int) -> SplitScheme:
    """Apply the transpositions ``k <-> k + i + 1`` (``1 <= k <= i + 1``) to the second part."""
    b = split.double_prime.b
    if b < 2 * i + 3:
        raise ValueError(f"block size {b} too small for i = {i}; need b >= {2 * i + 3}")
    perm = relabel_permutation(i, b)
    seq = tuple(perm[k] for k in range(1, b + 1))
    if split.permutation is not None:
        # compose with an earlier relabelling: first old, then new
        seq = tuple(perm[split.permutation[k - 1]] for k in range(1, b + 1))
    return replace(split, double_prime=permute_indices(split.double_prime, perm), permutation=seq)


@dataclass
class TransformReport:
    i: int
    n: int
    # stage -> table -> per-index set counts (list index k - 1)
    sizes: dict[int, dict[Table, list[int]]]
    good_blocks: list[str]
    bad_blocks: list[str]
    # blocks whose final index-1 element is still i-bad w.r.t. B in its part
    goodness_failures: list[str]
    table_size: int

    @property
    def goodness_ok(self) -> bool:
        return not self.goodness_failures

    def rows(self) -> list[list[int]]:
        b = len(self.sizes[0][Table.B])
        return [
            [k] + [self.sizes[stage][table][k - 1] for stage in range(4) for table in Table]
            for k in range(1, b + 1)
        ]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(STAGE_COLUMNS)
        writer.writerows(self.rows())
        return buf.getvalue()

    def invariant_failures(self) -> list[str]:
        """Exact-integer checks of the doubling, swap-conservation and relabelling bounds."""
        out = []
        sz = self.sizes
        b = len(sz[0][Table.B])
        for k in range(b):
            for table in Table:
                if sz[1][table][k] > 2 * sz[0][table][k]:
                    out.append(f"index {k + 1}: table {table} more than doubled by the split")
            if sz[2][Table.B][k] + sz[2][Table.C][k] != sz[1][Table.B][k] + sz[1][Table.C][k]:
                out.append(f"index {k + 1}: swap changed the per-index total")
        top = 2 * self.i + 2

        def total(stage, upto):
            return sum(sz[stage][t][k] for t in Table for k in range(upto))

        if total(3, top) != total(2, top):
            out.append("relabelling changed the number of sets on indices 1..2i+2")
        if total(2, top) > 2 * total(0, top):
            out.append("sets on indices 1..2i+2 more than doubled")
        for k in range(top, b):
            if sz[3][Table.B][k] + sz[3][Table.C][k] != sz[2][Table.B][k] + sz[2][Table.C][k]:
                out.append(f"index {k + 1}: relabelling touched an index above 2i+2")
        for table in Table:
            if sum(sz[3][table]) > 2 * self.table_size:
                out.append(f"table {table} exceeds twice the original table size")
        return out

    def to_dict(self) -> dict:
        return {
            "i": self.i,
            "n": self.n,
            "good_blocks": self.good_blocks,
            "bad_blocks": self.bad_blocks,
            "goodness_failures": self.goodness_failures,
            "invariant_failures": self.invariant_failures(),
            "rows": [dict(zip(STAGE_COLUMNS, row)) for row in self.rows()],
        }


def goodness_audit(split: SplitScheme, i: int) -> list[str]:
    """Blocks of either part whose index-1 element is i-bad w.r.t. B inside that part."""
    out = []
    for part in split.parts():
        for blk in part.blocks:
            if badness(part, Element(blk, 1), Table.B, i) is not None:
                out.append(blk)
    return sorted(out)


def pipeline_stages(scheme: Scheme, i: int) -> tuple[tuple[list[str], list[str]], list[SplitScheme]]:
    """The partition and the split scheme after each of split, swap and relabel."""
    partition = partition_universe(scheme, i)
    stage1 = split_tables(scheme, partition)
    stage2 = swap_subtables(stage1)
    return partition, [stage1, stage2, relabel(stage2, i)]


def modify(scheme: Scheme, i: int) -> tuple[SplitScheme, TransformReport]:
    """Run the whole pipeline.

    Raises :class:`TransformError` if a counting invariant breaks; blocks that
    end up i-bad are listed in the report rather than raised.
    """
    _check_i(scheme, i)
    partition, (stage1, stage2, stage3) = pipeline_stages(scheme, i)
    sizes = {0: {t: scheme.set_counts(t) for t in Table}}
    for stage, split in enumerate((stage1, stage2, stage3), start=1):
        sizes[stage] = split.stage_tables()
    report = TransformReport(
        i=i,
        n=4 * i,
        sizes=sizes,
        good_blocks=list(partition[0]),
        bad_blocks=list(partition[1]),
        goodness_failures=goodness_audit(stage3, i),
        table_size=scheme.table_size,
    )
    problems = report.invariant_failures()
    if problems:
        raise TransformError("; ".join(problems))
    return stage3, report
