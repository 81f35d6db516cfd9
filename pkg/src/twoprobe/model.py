"""Restricted two-probe schemes: elements, sets, schemes, validation.

A scheme stores subsets of a universe of ``m = s * b`` elements.  Table A has
one bit per block; tables B and C hold sets of equal-index elements, each set
owning one bit.  Elements are written ``a:1`` (block ``a``, index ``1``).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import cached_property
from typing import Iterable, Mapping, NamedTuple, Sequence


class Table(str, Enum):
    B = "B"
    C = "C"

    @property
    def other(self) -> "Table":
        return Table.C if self is Table.B else Table.B

    def __str__(self) -> str:
        return self.value


class Element(NamedTuple):
    block: str
    index: int

    def __str__(self) -> str:
        return f"{self.block}:{self.index}"

    @classmethod
    def parse(cls, text: str) -> "Element":
        block, sep, index = text.strip().rpartition(":")
        if not sep or not block:
            raise ValueError(f"element must look like 'block:index', got {text!r}")
        k = int(index)
        if k < 1:
            raise ValueError(f"indices start at 1, got {text!r}")
        return cls(block, k)


def parse_subset(text: str) -> frozenset[Element]:
    """Parse ``"a:1,b:2"`` into a set of elements; the empty string is the empty set."""
    return frozenset(Element.parse(tok) for tok in text.split(",") if tok.strip())


def format_subset(elements: Iterable[Element]) -> str:
    return ",".join(str(e) for e in sorted(elements))


@dataclass(frozen=True)
class SetRecord:
    """One bit of table B or C together with the elements that query it."""

    table: Table
    bit: int
    index: int
    members: tuple[Element, ...]

    @property
    def blocks(self) -> tuple[str, ...]:
        return tuple(e.block for e in self.members)

    def __str__(self) -> str:
        return f"{self.table}#{self.bit}@{self.index}{{{format_subset(self.members)}}}"


class SchemeFormatError(ValueError):
    """Malformed scheme file; the message carries the offending line or field."""


def index_add(k: int, i: int, b: int) -> int:
    """Advance index ``k`` by ``i`` positions, wrapping around ``1..b``."""
    return (k + i - 1) % b + 1


def path_cap(b: int) -> int:
    """Longest admissible path / deepest admissible universe for block size ``b``."""
    return b // 2 - 1


@dataclass(frozen=True)
class Scheme:
    m: int
    s: int
    b: int
    blocks: tuple[str, ...]
    table_b: tuple[SetRecord, ...]
    table_c: tuple[SetRecord, ...]

    def records(self, table: Table) -> tuple[SetRecord, ...]:
        return self.table_b if table is Table.B else self.table_c

    @cached_property
    def _lookup(self) -> dict[Table, dict[Element, SetRecord]]:
        out: dict[Table, dict[Element, SetRecord]] = {Table.B: {}, Table.C: {}}
        for table in Table:
            for rec in self.records(table):
                for e in rec.members:
                    out[table].setdefault(e, rec)
        return out

    def set_of(self, e: Element, table: Table) -> SetRecord:
        try:
            return self._lookup[table][e]
        except KeyError:
            raise KeyError(f"element {e} has no set in table {table}") from None

    @cached_property
    def universe(self) -> tuple[Element, ...]:
        return tuple(Element(blk, k) for blk in sorted(self.blocks) for k in range(1, self.b + 1))

    def has_element(self, e: Element) -> bool:
        return e.block in self._block_set and 1 <= e.index <= self.b

    @cached_property
    def _block_set(self) -> frozenset[str]:
        return frozenset(self.blocks)

    def sets_at(self, table: Table, k: int) -> list[SetRecord]:
        return [rec for rec in self.records(table) if rec.index == k]

    def set_counts(self, table: Table) -> list[int]:
        """Number of sets of ``table`` per index, as a list indexed ``k - 1``."""
        counts = [0] * self.b
        for rec in self.records(table):
            if 1 <= rec.index <= self.b:
                counts[rec.index - 1] += 1
        return counts

    @property
    def table_size(self) -> int:
        """Size of each of the three (equal) tables: enough bits for A, B and C."""
        return max(self.s, len(self.table_b), len(self.table_c))

    def to_dict(self) -> dict:
        def recs(table):
            return [
                {"bit": r.bit, "index": r.index, "members": [e.block for e in r.members]}
                for r in self.records(table)
            ]

        return {
            "m": self.m,
            "s": self.s,
            "b": self.b,
            "blocks": list(self.blocks),
            "table_b": recs(Table.B),
            "table_c": recs(Table.C),
        }

    def to_json(self, indent: int | None = 1) -> str:
        return json.dumps(self.to_dict(), indent=indent)


def build_scheme(
    blocks: Sequence[str],
    b: int,
    table_b: Iterable[tuple[int, Iterable[str]]],
    table_c: Iterable[tuple[int, Iterable[str]]],
) -> Scheme:
    """Build a scheme from ``(index, member-blocks)`` pairs; bits are numbered in order."""

    def recs(table, entries):
        return tuple(
            SetRecord(table, bit, k, tuple(Element(blk, k) for blk in members))
            for bit, (k, members) in enumerate(entries)
        )

    blocks = tuple(blocks)
    return Scheme(
        m=len(blocks) * b,
        s=len(blocks),
        b=b,
        blocks=blocks,
        table_b=recs(Table.B, table_b),
        table_c=recs(Table.C, table_c),
    )


_SCHEME_KEYS = {"m", "s", "b", "blocks", "table_b", "table_c"}
_SET_KEYS = {"bit", "index", "members"}


def _int_field(obj, key, where):
    val = obj.get(key)
    if not isinstance(val, int) or isinstance(val, bool):
        raise SchemeFormatError(f"{where}.{key}: expected integer, got {val!r}")
    return val


def parse_scheme(text: str) -> Scheme:
    """Parse scheme JSON.  Structural problems raise; semantic ones are left to :func:`validate`."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemeFormatError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise SchemeFormatError("top level: expected a JSON object")
    missing = _SCHEME_KEYS - data.keys()
    if missing:
        raise SchemeFormatError(f"top level: missing field(s) {sorted(missing)}")
    unknown = data.keys() - _SCHEME_KEYS
    if unknown:
        raise SchemeFormatError(f"top level: unknown field(s) {sorted(unknown)}")

    m = _int_field(data, "m", "scheme")
    s = _int_field(data, "s", "scheme")
    b = _int_field(data, "b", "scheme")
    if b < 1:
        raise SchemeFormatError(f"scheme.b: block size must be positive, got {b}")
    blocks = data["blocks"]
    if not isinstance(blocks, list) or not all(isinstance(x, str) and x for x in blocks):
        raise SchemeFormatError("scheme.blocks: expected a list of non-empty strings")
    seen: set[str] = set()
    for pos, blk in enumerate(blocks):
        if blk in seen:
            raise SchemeFormatError(f"blocks[{pos}]: duplicate block identifier {blk!r}")
        seen.add(blk)

    tables = {}
    for key, table in (("table_b", Table.B), ("table_c", Table.C)):
        entries = data[key]
        if not isinstance(entries, list):
            raise SchemeFormatError(f"{key}: expected a list of sets")
        recs = []
        for pos, entry in enumerate(entries):
            where = f"{key}[{pos}]"
            if not isinstance(entry, dict):
                raise SchemeFormatError(f"{where}: expected an object")
            extra = entry.keys() - _SET_KEYS
            if extra:
                raise SchemeFormatError(f"{where}: unknown field(s) {sorted(extra)}")
            if _SET_KEYS - entry.keys():
                raise SchemeFormatError(f"{where}: missing field(s) {sorted(_SET_KEYS - entry.keys())}")
            bit = _int_field(entry, "bit", where)
            k = _int_field(entry, "index", where)
            if not 1 <= k <= b:
                raise SchemeFormatError(f"{where}.index: {k} out of range 1..{b}")
            members = entry["members"]
            if not isinstance(members, list):
                raise SchemeFormatError(f"{where}.members: expected a list of block identifiers")
            for mpos, blk in enumerate(members):
                if blk not in seen:
                    raise SchemeFormatError(f"{where}.members[{mpos}]: unknown block {blk!r}")
            recs.append(SetRecord(table, bit, k, tuple(Element(blk, k) for blk in members)))
        tables[table] = tuple(recs)

    return Scheme(m, s, b, tuple(blocks), tables[Table.B], tables[Table.C])


def load_scheme(path) -> Scheme:
    with open(path, encoding="utf-8") as fh:
        return parse_scheme(fh.read())


@dataclass(frozen=True)
class Violation:
    code: str
    message: str

    def __str__(self) -> str:
        return f"{self.code}: {self.message}"


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)
    warnings: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def codes(self) -> set[str]:
        return {v.code for v in self.violations}

    def to_dict(self) -> dict:
        return {
            "valid": self.ok,
            "violations": [{"code": v.code, "message": v.message} for v in self.violations],
            "warnings": [{"code": v.code, "message": v.message} for v in self.warnings],
        }


def validate(scheme: Scheme, *, allow_singletons: bool = False, strict_size: bool = False) -> ValidationReport:
    """Check every restriction clause and the per-index partition property.

    ``allow_singletons`` demotes singleton sets to warnings (sub-schemes produced
    by splitting carry them).  ``strict_size`` additionally requires each of
    tables B and C to fit in ``s`` bits.
    """
    report = ValidationReport()
    bad = report.violations.append

    if scheme.m != scheme.s * scheme.b:
        bad(Violation("size-mismatch", f"m={scheme.m} differs from s*b={scheme.s * scheme.b}"))
    if len(scheme.blocks) != scheme.s:
        bad(Violation("block-count", f"{len(scheme.blocks)} blocks listed but s={scheme.s}"))
    if len(set(scheme.blocks)) != len(scheme.blocks):
        bad(Violation("duplicate-block", "block identifiers are not unique"))
    known = set(scheme.blocks)

    for table in Table:
        recs = scheme.records(table)
        bits = [r.bit for r in recs]
        if len(set(bits)) != len(bits):
            dup = sorted({x for x in bits if bits.count(x) > 1})
            bad(Violation("duplicate-bit", f"table {table}: bits {dup} used by several sets"))
        if any(x < 0 for x in bits):
            bad(Violation("negative-bit", f"table {table}: negative bit number"))
        if strict_size and len(recs) > scheme.s:
            bad(Violation("table-capacity", f"table {table}: {len(recs)} sets exceed s={scheme.s} bits"))

        cover: dict[Element, int] = {}
        for rec in recs:
            if not 1 <= rec.index <= scheme.b:
                bad(Violation("index-range", f"{rec}: index outside 1..{scheme.b}"))
            unknown = [e for e in rec.members if e.block not in known]
            if unknown:
                bad(Violation("unknown-block", f"{rec}: unknown block(s) {format_subset(unknown)}"))
            if len(rec.members) < 2:
                v = Violation("singleton-set", f"{rec}: sets need at least two elements")
                (report.warnings if allow_singletons else report.violations).append(v)
            if any(e.index != rec.index for e in rec.members):
                bad(Violation("mixed-indices", f"{rec}: members carry indices other than {rec.index}"))
            blks = [e.block for e in rec.members]
            if len(set(blks)) != len(blks):
                bad(Violation("dirty-set", f"{rec}: two elements of one block share the set"))
            for e in rec.members:
                cover[e] = cover.get(e, 0) + 1

        for e in scheme.universe:
            hits = cover.get(e, 0)
            if hits == 0:
                bad(Violation("uncovered-element", f"table {table}: {e} belongs to no set"))
            elif hits > 1:
                bad(Violation("multiply-covered", f"table {table}: {e} belongs to {hits} sets"))
    return report


def peers(scheme: Scheme, e: Element, table: Table) -> frozenset[Element]:
    """The other members of ``e``'s set in ``table``."""
    if not scheme.has_element(e):
        raise KeyError(f"unknown element {e}")
    return frozenset(x for x in scheme.set_of(e, table).members if x != e)


def _as_permutation(perm, b: int) -> dict[int, int]:
    if isinstance(perm, Mapping):
        mapping = {k: perm.get(k, k) for k in range(1, b + 1)}
    else:
        perm = list(perm)
        if len(perm) != b:
            raise ValueError(f"permutation must list {b} images, got {len(perm)}")
        mapping = {k: perm[k - 1] for k in range(1, b + 1)}
    if sorted(mapping.values()) != list(range(1, b + 1)):
        raise ValueError("index permutation is not a bijection on 1..b")
    return mapping


def permute_indices(scheme: Scheme, perm) -> Scheme:
    """Relabel every element ``a_i`` as ``a_perm(i)``.

    ``perm`` is either a mapping ``{i: perm(i)}`` (missing keys are fixed points)
    or a sequence whose ``i-1``-th entry is ``perm(i)``.
    """
    mapping = _as_permutation(perm, scheme.b)

    def remap(recs):
        return tuple(
            replace(
                r,
                index=mapping.get(r.index, r.index),
                members=tuple(Element(e.block, mapping.get(e.index, e.index)) for e in r.members),
            )
            for r in recs
        )

    return replace(scheme, table_b=remap(scheme.table_b), table_c=remap(scheme.table_c))


def permute_subset(subset: Iterable[Element], perm, b: int) -> frozenset[Element]:
    mapping = _as_permutation(perm, b)
    return frozenset(Element(e.block, mapping[e.index]) for e in subset)
