"""Adversarial (S, X) certificates and their replay through the storability oracle.

``S`` holds elements that must be stored, ``X`` elements that must not be.
Along a path, putting one term of every node in ``S`` and the other in ``X``
makes the path a chain of forced moves: once the first antecedent sits in its
own table, every consequent is pushed into the other table.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .model import Element, Scheme, Table, format_subset, parse_subset
from .storability import Forced, can_store, forced_table
from .universe import Node, Path, _extend, badness, start_nodes, witness_table

BOTH = "Both"


class AdversaryError(ValueError):
    pass


@dataclass(frozen=True)
class AdversaryPair:
    S: frozenset[Element]
    X: frozenset[Element]
    target_block: str
    forbidden_table: str  # "B", "C" or "Both"
    support_paths: tuple[Path, ...] = ()

    def to_dict(self) -> dict:
        return {
            "s": [str(e) for e in sorted(self.S)],
            "x": [str(e) for e in sorted(self.X)],
            "block": self.target_block,
            "forbidden": self.forbidden_table,
            "paths": [p.to_list() for p in self.support_paths],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AdversaryPair":
        if set(data) != {"s", "x", "block", "forbidden", "paths"}:
            raise ValueError(f"certificate fields must be s, x, block, forbidden, paths; got {sorted(data)}")
        if data["forbidden"] not in ("B", "C", BOTH):
            raise ValueError(f"forbidden must be B, C or Both, got {data['forbidden']!r}")
        paths = tuple(
            Path(tuple(Node(Table(t), Element.parse(a), Element.parse(c)) for a, c, t in p))
            for p in data["paths"]
        )
        return cls(
            parse_subset(",".join(data["s"])),
            parse_subset(",".join(data["x"])),
            data["block"],
            data["forbidden"],
            paths,
        )


@dataclass
class _Placement:
    node: Node
    in_s: Element
    in_x: Element

    def flip(self) -> None:
        self.in_s, self.in_x = self.in_x, self.in_s


def _place(path: Path, seed: str, nodes: Iterable[Node] | None = None) -> list[_Placement]:
    if seed not in ("S", "X"):
        raise ValueError("seed choice must be 'S' (antecedent in S) or 'X' (antecedent in X)")
    out = []
    for node in path.nodes if nodes is None else nodes:
        pl = _Placement(node, node.antecedent, node.consequent)
        if seed == "X":
            pl.flip()
        out.append(pl)
    return out


def _split(placements: list[_Placement]) -> tuple[set[Element], set[Element]]:
    return {p.in_s for p in placements}, {p.in_x for p in placements}


def _repair(placements: list[_Placement]) -> None:
    """Swap node orientations, lowest index first, until no element is in both S and X."""
    budget = 2 * len(placements) + 1
    for _ in range(budget):
        s_part, x_part = _split(placements)
        clash = sorted(s_part & x_part, key=lambda e: (e.index, e.block))
        if not clash:
            return
        w = clash[0]
        # re-orient the latest node that excludes w, so that w is stored there too
        for pl in reversed(placements):
            if pl.in_x == w:
                pl.flip()
                break
    raise AdversaryError("S/X repair did not terminate within the iteration budget")


def path_forcing_sets(path: Path, seed_choice: str = "S") -> tuple[frozenset[Element], frozenset[Element]]:
    """One term of each node into S, the other into X; the first antecedent goes where ``seed_choice`` says."""
    if not path.nodes:
        raise AdversaryError("empty path")
    placements = _place(path, seed_choice)
    _repair(placements)
    s_part, x_part = _split(placements)
    return frozenset(s_part), frozenset(x_part)


def find_path(scheme: Scheme, e: Element, table: Table, length: int, last: Node) -> Path | None:
    """First length-``length`` path from an ``e``-antecedent node of ``table`` ending at ``last``."""
    for start in start_nodes(scheme, e, table):
        for path in _extend(scheme, [start], length):
            if path.last == last:
                return path
    return None


def adversarial_pair(scheme: Scheme, e: Element, table: Table, i: int, *, seed_choice: str = "S",
                     override_cap: bool = False) -> AdversaryPair:
    """Sets S, X under which block ``e.block`` cannot be stored in ``table``.

    Built from the two paths that lead from ``e`` to the witnesses ``u`` and
    ``v`` of its badness; the last nodes are ``(u, v)`` and ``(v, u)`` in the
    set the two share.
    """
    cert = badness(scheme, e, table, i, override_cap=override_cap)
    if cert is None:
        raise AdversaryError(f"{e} is {i}-good with respect to table {table}")
    last_table = witness_table(table, cert.j)
    first = find_path(scheme, e, table, cert.j, Node(last_table, cert.u, cert.v))
    second = find_path(scheme, e, table, cert.j, Node(last_table, cert.v, cert.u))
    if first is None or second is None:
        raise AdversaryError(f"no length-{cert.j} path from {e} to the badness witnesses")
    # The second path only has to force v into its own table; its last node needs no placement.
    placements = _place(first, seed_choice) + _place(second, seed_choice, second.nodes[:-1])
    _repair(placements)
    s_part, x_part = _split(placements)
    return AdversaryPair(frozenset(s_part), frozenset(x_part), e.block, table.value, (first, second))


def two_table_contradiction(scheme: Scheme, block: str, i: int) -> AdversaryPair | None:
    """Certificate that ``block`` fits in neither table, when ``block_1`` is i-bad w.r.t. B
    and ``block_{i+2}`` is i-bad w.r.t. C; otherwise ``None``."""
    if scheme.b < 2 * i + 3:
        raise ValueError(f"block size {scheme.b} too small for i = {i}; need b >= {2 * i + 3}")
    if block not in scheme.blocks:
        raise KeyError(f"unknown block {block!r}")
    low, high = Element(block, 1), Element(block, i + 2)
    if badness(scheme, low, Table.B, i) is None or badness(scheme, high, Table.C, i) is None:
        return None
    one = adversarial_pair(scheme, low, Table.B, i)
    two = adversarial_pair(scheme, high, Table.C, i)
    pair = AdversaryPair(one.S | two.S, one.X | two.X, block, BOTH, one.support_paths + two.support_paths)
    if pair.S & pair.X:
        raise AdversaryError(f"index ranges overlap: {format_subset(pair.S & pair.X)}")
    return pair


@dataclass
class CertificateResult:
    passed: bool
    outcome: str
    trace: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"passed": self.passed, "outcome": self.outcome, "trace": self.trace}


def certify(scheme: Scheme, pair: AdversaryPair) -> CertificateResult:
    """Replay a certificate: the forbidden placement must be refuted by the oracle."""
    if pair.S & pair.X:
        raise ValueError(f"S and X overlap in {format_subset(pair.S & pair.X)}")
    if pair.forbidden_table == BOTH:
        res = can_store(scheme, pair.S)
        outcome = "Storable" if res.storable else Forced.UNSTORABLE.value
        return CertificateResult(not res.storable, outcome, res.conflict)
    table = Table(pair.forbidden_table)
    res = can_store(scheme, pair.S, {pair.target_block: table})
    outcome = forced_table(scheme, pair.S, pair.target_block).value
    return CertificateResult(not res.storable, outcome, res.conflict)
