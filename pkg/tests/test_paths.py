import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qdcm.errors import InvalidPathError, PathMismatchError
from qdcm.oracles import brute_min_zones
from qdcm.paths import (
    MatchingWitness,
    Path,
    compatible,
    concat,
    format_path,
    make_path,
    parse_path,
    prefix,
    shift,
    stutter_reduce,
    zones,
)
from qdcm.space import Direction

FWD = Direction.FWD

FIG6_P1 = (1, 2, 3, 4, 5, 10, 15, 20, 25, 24, 23, 22, 21, 16, 11, 6, 7, 8, 9, 14, 19, 18, 17, 12, 13, 13, 13, 13)
FIG6_P2 = (15, 14, 18, 12, 8, 14, 18, 12, 8, 14, 18)


def test_forward_and_backward_paths_on_line(fig9):
    p = make_path(fig9, "fwd", "x1 x1 x1 x2 x2 x2 x3 x3".split())
    assert p.length == 7
    q = make_path(fig9, "bwd", "x3 x3 x2 x1 x1 x1 x1".split())
    assert q.names(fig9)[0] == "x3"


def test_invalid_step_is_located(fig9):
    with pytest.raises(InvalidPathError) as err:
        make_path(fig9, "fwd", ["x1", "x3"])
    assert err.value.step == 1


def test_empty_path_rejected(fig9):
    with pytest.raises(InvalidPathError):
        make_path(fig9, "fwd", [])


def test_text_syntax_round_trip(fig9):
    p = parse_path(fig9, "fwd: x1 x1 x2")
    assert format_path(fig9, p) == "fwd: x1 x1 x2"
    assert parse_path(fig9, "bwd: x3 x2").direction is Direction.BWD


def _p(*seq):
    return Path(FWD, tuple(seq))


def test_concat():
    assert concat(_p(0, 1), _p(1, 2)).seq == (0, 1, 2)
    assert concat(_p(0), _p(0)).seq == (0,)
    assert concat(_p(0, 0), _p(0, 1, 2)).seq == (0, 0, 1, 2)


def test_concat_errors():
    with pytest.raises(PathMismatchError):
        concat(_p(0, 1), _p(2))
    with pytest.raises(PathMismatchError):
        concat(_p(0), Path(Direction.BWD, (0,)))


def test_shift_and_prefix():
    p = _p(0, 1, 2)
    assert shift(p, 1).seq == (1, 2)
    assert prefix(p, 0).seq == (0,)
    assert shift(p, p.length).seq == (p.last,)
    with pytest.raises(IndexError):
        shift(p, 3)
    with pytest.raises(IndexError):
        prefix(p, -1)


def test_fig6_paths_are_compatible_in_two_zones(fig5):
    p1 = make_path(fig5, "fwd", [str(i) for i in FIG6_P1])
    p2 = make_path(fig5, "fwd", [str(i) for i in FIG6_P2])
    assert (p1.length, p2.length) == (27, 10)
    col = fig5.valuation_classes()
    w = compatible(p1, p2, lambda a, b: col[a] == col[b])
    assert w.zones == 2
    assert w.first_zones == tuple(1 if i <= 15 else 2 for i in range(28))
    assert w.second_zones == (1,) + (2,) * 10
    assert zones(p1, col) == 2


def test_single_point_paths():
    w = compatible(_p(0), _p(0), lambda a, b: True)
    assert w == MatchingWitness(1, (1,), (1,))
    assert zones(_p(0), [0]) == 1


def test_unmatched_extra_point():
    rel = lambda a, b: {a, b} == {0, 2}
    assert compatible(_p(0, 1), _p(2), rel) is None


def test_direction_mismatch():
    with pytest.raises(PathMismatchError):
        compatible(_p(0), Path(Direction.BWD, (0,)), lambda a, b: True)


def test_one_block_path_has_one_zone():
    assert zones(_p(0, 1, 2, 1), [5, 5, 5]) == 1


seqs = st.lists(st.integers(0, 5), min_size=1, max_size=5)


@st.composite
def symmetric_relations(draw, n=6):
    bits = draw(st.lists(st.booleans(), min_size=n * n, max_size=n * n))
    m = np.array(bits).reshape(n, n)
    return m | m.T


@settings(max_examples=300, deadline=None)
@given(seqs, seqs, symmetric_relations())
def test_dp_matches_enumeration(s1, s2, mat):
    rel = lambda a, b: bool(mat[a, b])
    w = compatible(_p(*s1), _p(*s2), rel)
    assert (w.zones if w else None) == brute_min_zones(s1, s2, rel)
    if w:
        assert w.check(_p(*s1), _p(*s2), rel)
        assert rel(s1[0], s2[0]) and rel(s1[-1], s2[-1])


@settings(max_examples=200, deadline=None)
@given(seqs, seqs, symmetric_relations())
def test_compatibility_is_symmetric(s1, s2, mat):
    rel = lambda a, b: bool(mat[a, b])
    assert (compatible(_p(*s1), _p(*s2), rel) is None) == (compatible(_p(*s2), _p(*s1), rel) is None)


@settings(max_examples=200, deadline=None)
@given(seqs, seqs, st.lists(st.integers(0, 2), min_size=6, max_size=6))
def test_partition_compatibility_is_equal_block_words(s1, s2, blocks):
    rel = lambda a, b: blocks[a] == blocks[b]
    words_equal = stutter_reduce([blocks[x] for x in s1]) == stutter_reduce([blocks[x] for x in s2])
    assert (compatible(_p(*s1), _p(*s2), rel) is not None) == words_equal


@settings(max_examples=100, deadline=None)
@given(seqs, st.lists(st.integers(0, 2), min_size=6, max_size=6))
def test_path_with_itself_matches_identically(s, blocks):
    rel = lambda a, b: blocks[a] == blocks[b]
    w = compatible(_p(*s), _p(*s), rel)
    assert w.first_zones == w.second_zones
    assert w.zones == zones(_p(*s), blocks)


def test_brute_force_helper_sanity():
    # under equality, matching words are exactly the equal stutter-free words
    for s1 in itertools.product(range(2), repeat=3):
        for s2 in itertools.product(range(2), repeat=2):
            found = brute_min_zones(s1, s2, lambda a, b: a == b) is not None
            assert found == (stutter_reduce(s1) == stutter_reduce(s2))
