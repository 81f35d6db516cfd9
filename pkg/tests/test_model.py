import json
from dataclasses import replace

import pytest
from hypothesis import given, settings, strategies as st

from twoprobe.fixtures import FIXTURES, random_scheme
from twoprobe.model import (
    Element,
    SchemeFormatError,
    Table,
    format_subset,
    index_add,
    parse_scheme,
    parse_subset,
    path_cap,
    peers,
    permute_indices,
    permute_subset,
    validate,
)

from conftest import random_schemes


def test_element_text_round_trip():
    e = Element.parse("a:3")
    assert e == Element("a", 3)
    assert str(e) == "a:3"
    assert parse_subset("b:2, a:1") == {Element("a", 1), Element("b", 2)}
    assert format_subset(parse_subset("b:2,a:1")) == "a:1,b:2"
    assert parse_subset("") == frozenset()


@pytest.mark.parametrize("text", ["a", "a:", ":1", "a:x", "a:0"])
def test_element_parse_rejects(text):
    with pytest.raises(ValueError):
        Element.parse(text)


def test_table_other():
    assert Table.B.other is Table.C and Table.C.other is Table.B


@pytest.mark.parametrize("k,i,b,expected", [(1, 0, 4, 1), (3, 2, 4, 1), (4, 1, 4, 1), (2, 5, 4, 3)])
def test_index_add(k, i, b, expected):
    assert index_add(k, i, b) == expected


@given(st.integers(1, 12).flatmap(lambda b: st.tuples(st.just(b), st.integers(1, b))))
def test_index_add_full_cycle(bk):
    b, k = bk
    assert index_add(k, b, b) == k


def test_path_cap():
    assert [path_cap(b) for b in (2, 3, 4, 8, 9)] == [0, 0, 1, 3, 3]


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_fixtures_are_valid(name):
    assert validate(FIXTURES[name]()).violations == []


def test_toy3_shape(toy):
    assert (toy.m, toy.s, toy.b) == (12, 3, 4)
    assert len(toy.table_b) == len(toy.table_c) == 4


def test_fig1c_shape(fig):
    assert (fig.m, fig.s, fig.b) == (64, 8, 8)
    assert fig.set_of(Element("a", 1), Table.B).blocks == ("a", "b")
    assert fig.set_of(Element("c", 3), Table.B).blocks == ("c", "f")
    assert fig.set_of(Element("d", 3), Table.B).blocks == ("d", "e", "g")
    assert fig.set_of(Element("b", 2), Table.C).blocks == ("b", "c", "d", "e")
    assert fig.set_of(Element("g", 4), Table.C).blocks == ("g", "h")
    # leftovers at index 1 of table B are paired in block order, the odd one joining the last pair
    idx1 = [r.blocks for r in fig.sets_at(Table.B, 1)]
    assert idx1 == [("a", "b"), ("c", "d"), ("e", "f"), ("g", "h")]
    idx3 = [r.blocks for r in fig.sets_at(Table.B, 3)]
    assert idx3 == [("c", "f"), ("d", "e", "g"), ("a", "b", "h")]


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_json_round_trip(name):
    scheme = FIXTURES[name]()
    assert parse_scheme(scheme.to_json()) == scheme


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 7), st.integers(2, 9))
def test_random_schemes_round_trip_and_validate(seed, s, b):
    import random

    scheme = random_scheme(random.Random(seed), s, b)
    assert validate(scheme).ok
    assert parse_scheme(scheme.to_json()) == scheme
    for table in Table:
        for k in range(1, b + 1):
            covered = sorted(e for r in scheme.sets_at(table, k) for e in r.members)
            assert covered == [Element(blk, k) for blk in sorted(scheme.blocks)]


def _toy_dict(toy):
    return json.loads(toy.to_json())


def test_parse_rejects_duplicate_block(toy):
    data = _toy_dict(toy)
    data["blocks"].append("a")
    with pytest.raises(SchemeFormatError, match="duplicate block"):
        parse_scheme(json.dumps(data))


def test_parse_rejects_index_out_of_range(toy):
    data = _toy_dict(toy)
    data["table_c"][0]["index"] = 9
    with pytest.raises(SchemeFormatError, match=r"table_c\[0\].index"):
        parse_scheme(json.dumps(data))


def test_parse_rejects_unknown_fields(toy):
    data = _toy_dict(toy)
    data["comment"] = "x"
    with pytest.raises(SchemeFormatError, match="unknown field"):
        parse_scheme(json.dumps(data))
    data = _toy_dict(toy)
    data["table_b"][1]["size"] = 3
    with pytest.raises(SchemeFormatError, match=r"table_b\[1\]"):
        parse_scheme(json.dumps(data))


def test_parse_reports_syntax_locus():
    with pytest.raises(SchemeFormatError, match="line 2, column"):
        parse_scheme('{"m": 1,\n "s": }')


def test_parse_rejects_unknown_member(toy):
    data = _toy_dict(toy)
    data["table_b"][0]["members"][0] = "z"
    with pytest.raises(SchemeFormatError, match="unknown block 'z'"):
        parse_scheme(json.dumps(data))


def test_validate_singleton(toy):
    rec = toy.table_b[0]
    shrunk = replace(toy, table_b=(replace(rec, members=rec.members[:1]),) + toy.table_b[1:])
    report = validate(shrunk)
    assert "singleton-set" in report.codes()
    relaxed = validate(shrunk, allow_singletons=True)
    assert "singleton-set" not in relaxed.codes()
    assert [w.code for w in relaxed.warnings] == ["singleton-set"]


def test_validate_mixed_indices(toy):
    rec0, rec1 = toy.table_b[0], toy.table_b[1]
    moved = Element("a", 2)
    recs = (
        replace(rec0, members=rec0.members + (moved,)),
        replace(rec1, members=tuple(e for e in rec1.members if e != moved)),
    ) + toy.table_b[2:]
    assert "mixed-indices" in validate(replace(toy, table_b=recs)).codes()


def test_validate_reports_everything_at_once(toy):
    rec = toy.table_c[0]
    broken = replace(
        toy,
        m=13,
        table_c=(replace(rec, bit=1, members=rec.members + (Element("a", 1),)),) + toy.table_c[1:],
    )
    codes = validate(broken).codes()
    assert {"size-mismatch", "duplicate-bit", "dirty-set", "multiply-covered"} <= codes


def test_validate_uncovered(toy):
    assert "uncovered-element" in validate(replace(toy, table_c=toy.table_c[1:])).codes()


def test_validate_capacity_only_when_strict(fig):
    # eight blocks of size eight need more than s = 8 sets per table
    assert validate(fig).ok
    assert "table-capacity" in validate(fig, strict_size=True).codes()


def test_peers(fig, toy):
    assert peers(fig, Element("a", 1), Table.B) == {Element("b", 1)}
    assert peers(fig, Element("b", 2), Table.C) == parse_subset("c:2,d:2,e:2")
    assert peers(toy, Element("a", 1), Table.B) == parse_subset("b:1,c:1")
    with pytest.raises(KeyError):
        peers(toy, Element("z", 1), Table.B)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 1000))
def test_peers_exclude_self_and_share_index(seed):
    for scheme in random_schemes(seed, 1):
        for e in scheme.universe:
            for table in Table:
                got = peers(scheme, e, table)
                assert e not in got
                assert all(x.index == e.index for x in got)


def test_permute_identity_and_swap(toy):
    assert permute_indices(toy, {1: 1, 2: 2, 3: 3, 4: 4}) == toy
    swapped = permute_indices(toy, [2, 1, 3, 4])
    assert validate(swapped).ok
    assert {r.index for r in swapped.table_b[:1]} == {2}
    assert {r.index for r in swapped.table_b[1:2]} == {1}


def test_permute_rejects_non_bijection(toy):
    with pytest.raises(ValueError):
        permute_indices(toy, [1, 1, 3, 4])
    with pytest.raises(ValueError):
        permute_indices(toy, [1, 2, 3])


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 1000), st.randoms(use_true_random=False))
def test_permutation_group_action(seed, rnd):
    scheme = random_schemes(seed, 1)[0]
    b = scheme.b
    p1 = list(range(1, b + 1))
    p2 = list(range(1, b + 1))
    rnd.shuffle(p1)
    rnd.shuffle(p2)
    composed = [p2[p1[k] - 1] for k in range(b)]
    assert permute_indices(permute_indices(scheme, p1), p2) == permute_indices(scheme, composed)
    assert validate(permute_indices(scheme, p1)).ok
    subset = frozenset(scheme.universe[:3])
    assert permute_subset(permute_subset(subset, p1, b), p2, b) == permute_subset(subset, composed, b)
