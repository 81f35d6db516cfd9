"""Bound evaluation and exact per-instance counting checks.

Constants hidden by the asymptotic statements are taken as 1 and never
asserted against; the exact identities (nested peer sums, distinct-set
counting) are checked with integer arithmetic.
"""

from __future__ import annotations

import csv
import io
import math
import random
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .fixtures import random_scheme
from .model import Element, Scheme, Table, index_add, path_cap, peers
from .universe import badness, i_universe, witness_table


class PreconditionError(ValueError):
    """Some index-1 element is not t-good w.r.t. table B."""


def restricted_exponent(n: int) -> float:
    return 1.0 - 1.0 / (n // 4 + 2)


def restricted_bound(m: int, n: int) -> float:
    """``(m/n) ** (1 - 1/(floor(n/4) + 2))``, the restricted-scheme space bound with unit constant."""
    if n < 1 or m < n:
        raise ValueError(f"need n >= 1 and m >= n, got m={m}, n={n}")
    return (m / n) ** restricted_exponent(n)


def general_bound(m: int, n: int) -> float | None:
    """``m ** (1 - 1/floor(n/4))`` for unrestricted schemes; ``None`` when ``n < 4``."""
    q = n // 4
    if q < 1:
        return None
    return float(m) ** (1.0 - 1.0 / q)


@dataclass
class BoundsRow:
    m: int
    n: int
    restricted_bound: float
    general_bound: float | None
    crossover_flag: bool
    analytic_region: bool


BOUNDS_COLUMNS = ["m", "n", "restricted_bound", "general_bound", "crossover_flag", "analytic_region"]


def compare_bounds(m_values: Iterable[int], n_values: Iterable[int]) -> list[BoundsRow]:
    rows = []
    n_values = list(n_values)
    for m in m_values:
        for n in n_values:
            restricted = restricted_bound(m, n)
            general = general_bound(m, n)
            if general is None:
                flag = True
            else:
                # compare in log space; both sides can be astronomically large
                q = n // 4
                flag = restricted_exponent(n) * (math.log(m) - math.log(n)) >= (1 - 1 / q) * math.log(m)
            region = n == 1 or n <= math.sqrt(math.log(m) / math.log(n))
            rows.append(BoundsRow(m, n, restricted, general, flag, region))
    return rows


def rows_to_csv(rows, columns) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        record = asdict(row) if hasattr(row, "__dataclass_fields__") else dict(row)
        writer.writerow({k: ("" if record[k] is None else record[k]) for k in columns})
    return buf.getvalue()


def _require_good(scheme: Scheme, t: int) -> None:
    if not 1 <= t <= path_cap(scheme.b):
        raise ValueError(f"t must lie in 1..{path_cap(scheme.b)} for b = {scheme.b}, got {t}")
    for blk in scheme.blocks:
        cert = badness(scheme, Element(blk, 1), Table.B, t)
        if cert is not None:
            raise PreconditionError(f"{blk}:1 is {t}-bad w.r.t. B (level {cert.j}: {cert.u}, {cert.v})")


def all_index1_good(scheme: Scheme, t: int) -> bool:
    return all(badness(scheme, Element(blk, 1), Table.B, t) is None for blk in scheme.blocks)


def nested_peer_sum(scheme: Scheme, e: Element, t: int, weights: Mapping[Element, int]):
    """Sum of weights reached by alternating peer steps, B first, counting every route."""

    def walk(x: Element, level: int):
        table = Table.B if level % 2 == 1 else Table.C
        total = 0
        for h in peers(scheme, x, table):
            nxt = Element(h.block, index_add(h.index, 1, scheme.b))
            total += weights[nxt] if level == t else walk(nxt, level + 1)
        return total

    return walk(e, 1)


def universe_sum_identity_check(scheme: Scheme, t: int, weights: Mapping[Element, int]) -> bool:
    """Direct sum over each t-Universe equals the nested peer sum, for every index-1 element."""
    _require_good(scheme, t)
    for blk in scheme.blocks:
        e = Element(blk, 1)
        direct = sum(weights[h] for h in i_universe(scheme, e, Table.B, t))
        if direct != nested_peer_sum(scheme, e, t, weights):
            return False
    return True


def _pair_total(scheme: Scheme, k: int) -> int:
    return scheme.set_counts(Table.B)[k - 1] + scheme.set_counts(Table.C)[k - 1]


def universe_total(scheme: Scheme, t: int) -> int:
    return sum(len(i_universe(scheme, Element(blk, 1), Table.B, t)) for blk in scheme.blocks)


def universe_sum_ratio(scheme: Scheme, t: int) -> float:
    """``sum |U^t_B(e_1)|`` divided by ``s^(t+1) / (sum_{k<=t} |B_k| + |C_k|)^t``."""
    _require_good(scheme, t)
    sets = sum(_pair_total(scheme, k) for k in range(1, t + 1))
    return float(Fraction(universe_total(scheme, t) * sets ** t, scheme.s ** (t + 1)))


@dataclass
class SizeCheck:
    t: int
    universe_total: int
    bound: int
    holds: bool
    per_element_holds: bool
    ratio: float

    def to_dict(self) -> dict:
        return asdict(self)


def goodness_size_check(scheme: Scheme, t: int) -> SizeCheck:
    """Distinct-set counting: each t-Universe occupies distinct sets at index t+1."""
    _require_good(scheme, t)
    table = witness_table(Table.B, t)
    sets_next = scheme.set_counts(table)[index_add(1, t, scheme.b) - 1]
    sizes = [len(i_universe(scheme, Element(blk, 1), Table.B, t)) for blk in scheme.blocks]
    total = sum(sizes)
    bound = scheme.s * sets_next
    lhs = sum(_pair_total(scheme, k) for k in range(1, t + 2))
    return SizeCheck(
        t=t,
        universe_total=total,
        bound=bound,
        holds=total <= bound,
        per_element_holds=all(x <= sets_next for x in sizes),
        ratio=float(Fraction(lhs ** (t + 1), scheme.s ** t)),
    )


def random_good_scheme(rng: random.Random, s: int, b: int, t: int, sizes=(2, 3), weights=(3, 1),
                       max_tries: int = 10_000) -> Scheme:
    """Rejection-sample a random scheme whose index-1 elements are all t-good w.r.t. B."""
    for _ in range(max_tries):
        scheme = random_scheme(rng, s, b, sizes, weights)
        if all_index1_good(scheme, t):
            return scheme
    raise RuntimeError(f"no {t}-good scheme found in {max_tries} draws")


def ratio_rows(schemes: Iterable[Scheme], ts: Iterable[int]) -> list[dict]:
    rows = []
    ts = list(ts)
    for sid, scheme in enumerate(schemes):
        for t in ts:
            if t <= path_cap(scheme.b) and all_index1_good(scheme, t):
                rows.append({"scheme_id": sid, "t": t, "ratio": universe_sum_ratio(scheme, t)})
    return rows
