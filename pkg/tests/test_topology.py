from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conclab.topology import (
    Kind,
    TopologyError,
    TopologyParseError,
    build_bounded_fat_slim,
    build_full_fat_slim,
    build_regular_fat_slim,
    crosspoint_count,
    neighbors,
    parse_topology,
    serialize_topology,
)

DATA = Path(__file__).parent / "data"


def test_full_11_5_shape():
    conc = build_full_fat_slim(11, 5)
    assert crosspoint_count(conc) == 35
    for i in range(1, 7):
        assert neighbors(conc, i) == (1, 2, 3, 4, 5)
    for i in range(1, 6):
        assert neighbors(conc, 6 + i) == (i,)
    assert conc.capacity == 5


def test_full_trivial_m_equals_n():
    conc = build_full_fat_slim(5, 5)
    assert conc.input_degrees() == [1] * 5
    assert crosspoint_count(conc) == 5


def test_bounded_9_7_2_shape():
    conc = build_bounded_fat_slim(9, 7, 2)
    assert conc.c == 3
    assert neighbors(conc, 8) == (1, 3, 5)
    assert neighbors(conc, 9) == (2, 4, 6)
    assert all(neighbors(conc, i) == (i,) for i in range(1, 8))


@pytest.mark.parametrize("n,m,q", [(9, 7, 1), (9, 7, 8), (5, 7, 2), (9, 0, 2)])
def test_bounded_rejects_bad_q(n, m, q):
    with pytest.raises(TopologyError):
        build_bounded_fat_slim(n, m, q)


def test_regular_3_6_sections():
    conc = build_regular_fat_slim(3, 6)
    s1, s2, s3 = conc.sections
    assert set(s1.V) == {3, 4, 5, 6} and set(s2.V) == {1, 2, 5, 6} and set(s3.V) == {1, 2, 3, 4}
    assert list(s1.U) == [1, 2] and list(s2.U) == [3, 4] and list(s3.U) == [5, 6]
    assert [conc.section_of(i) for i in s2.W] == [(2, 3), (2, 4)]
    assert [conc.section_of(i) for i in s3.W] == [(3, 5), (3, 6)]
    assert conc.output_degrees() == [13] * 6
    assert set(conc.input_degrees()) == {4, 5}
    assert crosspoint_count(conc) == (18 - 6 + 1) * 6


@pytest.mark.parametrize("p,m", [(2, 4), (3, 4), (3, 0)])
def test_regular_rejects(p, m):
    with pytest.raises(TopologyError):
        build_regular_fat_slim(p, m)


def test_flat_index_round_trip():
    conc = build_regular_fat_slim(4, 8)
    for i in range(1, conc.n + 1):
        assert conc.flat_index(*conc.section_of(i)) == i
    with pytest.raises(TopologyError):
        conc.flat_index(5, 1)


def test_neighbors_out_of_range():
    with pytest.raises(IndexError):
        neighbors(build_full_fat_slim(11, 5), 12)


@pytest.mark.parametrize(
    "name,build",
    [
        ("full_11_5.yaml", lambda: build_full_fat_slim(11, 5)),
        ("bounded_9_7_2.yaml", lambda: build_bounded_fat_slim(9, 7, 2)),
        ("regular_3_6.yaml", lambda: build_regular_fat_slim(3, 6)),
    ],
)
def test_golden_files(name, build):
    text = (DATA / name).read_text()
    conc = build()
    assert serialize_topology(conc) == text
    assert parse_topology(text) == conc


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 30), st.data())
def test_full_round_trip_and_count(m, data):
    n = data.draw(st.integers(m, m + 30))
    conc = build_full_fat_slim(n, m)
    assert crosspoint_count(conc) == (n - m + 1) * m
    assert parse_topology(serialize_topology(conc)) == conc


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 40), st.data())
def test_bounded_round_trip(m, data):
    n = data.draw(st.integers(m + 1, 2 * m))
    q = data.draw(st.integers(n - m, m))
    conc = build_bounded_fat_slim(n, m, q)
    assert conc.c == m // q
    assert parse_topology(serialize_topology(conc)) == conc


def test_parse_missing_field_has_location():
    text = (DATA / "full_11_5.yaml").read_text().replace("m: 5\n", "")
    with pytest.raises(TopologyParseError) as exc:
        parse_topology(text)
    assert "missing field 'm'" in str(exc.value)
    assert exc.value.line is not None


def test_tampered_adjacency_loads_verbatim_and_is_caught():
    # stored adjacency is trusted as data, so verification sees the damage
    from conclab.oracle import certify_capacity

    text = (DATA / "full_11_5.yaml").read_text().replace("7: [1]", "7: [2]")
    conc = parse_topology(text)
    assert neighbors(conc, 7) == (2,)
    assert not certify_capacity(conc, 5).holds


def test_parse_rejects_output_out_of_range():
    text = (DATA / "full_11_5.yaml").read_text().replace("7: [1]", "7: [9]")
    with pytest.raises(TopologyParseError) as exc:
        parse_topology(text)
    assert exc.value.line == 13


def test_parse_rejects_garbage():
    with pytest.raises(TopologyParseError):
        parse_topology("kind: [unclosed\n")


def test_kind_enum():
    assert Kind("regular") is Kind.REGULAR
