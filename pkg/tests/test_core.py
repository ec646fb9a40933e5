import itertools
import random

import pytest
from hypothesis import given, strategies as st

from mpjlab.core import (
    BitString,
    Instance,
    InstanceSpace,
    PointerFn,
    ceil_log2,
    chain_string,
    compose_suffix,
    dominance_less,
    evaluate,
    index_partition,
    is_crossing,
    random_instance,
)


def mpj_recursive(start, fns, x):
    """Straight transcription of the recursive definition (independent of ``evaluate``)."""
    if not fns:
        return x[start - 1]
    return mpj_recursive(fns[0][start - 1], fns[1:], x)


def inst(n, k, start, middles, x):
    return Instance(n, k, start, tuple(PointerFn(tuple(f)) for f in middles), BitString(x))


def test_bitstring_roundtrip():
    s = BitString("0110")
    assert str(s) == "0110"
    assert s.bit(1) == 0 and s.bit(2) == 1
    assert BitString.from_int(s.to_int(), 4) == s
    assert BitString([0, 1, 1, 0]) == s
    assert len(BitString(())) == 0


@pytest.mark.parametrize("bad", ["012", [0, 2], [0.0, 1]])
def test_bitstring_rejects_non_bits(bad):
    with pytest.raises(ValueError):
        BitString(bad)


def test_bitstring_is_one_indexed():
    with pytest.raises(IndexError):
        BitString("01").bit(0)
    with pytest.raises(IndexError):
        BitString("01").bit(3)


def test_pointer_fn_rejects_out_of_range():
    with pytest.raises(ValueError):
        PointerFn((1, 4, 2))
    with pytest.raises(ValueError):
        PointerFn((0, 1))


def test_instance_invariants():
    with pytest.raises(ValueError):
        inst(3, 3, 4, [[1, 2, 3]], "010")
    with pytest.raises(ValueError):
        inst(3, 3, 1, [], "010")
    with pytest.raises(ValueError):
        inst(3, 3, 1, [[1, 2]], "010")
    with pytest.raises(ValueError):
        inst(3, 3, 1, [[1, 2, 3]], "01")


def test_instance_json_roundtrip():
    a = inst(3, 4, 2, [[3, 1, 2], [1, 1, 2]], "101")
    assert a.to_dict() == {"n": 3, "k": 4, "start": 2, "middles": [[3, 1, 2], [1, 1, 2]], "x": "101"}
    assert Instance.from_dict(a.to_dict()) == a


def test_evaluate_examples():
    assert evaluate(inst(4, 2, 3, [], "0010")) == 1
    assert evaluate(inst(2, 3, 2, [[1, 2]], "01")) == 1
    # f_2(1) = 3, x(3) = 0
    assert evaluate(inst(3, 3, 1, [[3, 1, 2]], "100")) == 0
    assert mpj_recursive(1, [[3, 1, 2]], [1, 0, 0]) == 0


def test_compose_suffix_examples():
    a = inst(3, 3, 1, [[2, 3, 1]], "011")
    # g(s) = x(f_2(s)): x(2), x(3), x(1)
    assert str(compose_suffix(a, 1)) == "110"
    assert compose_suffix(a, 2) == a.x
    ident = inst(3, 4, 1, [[1, 2, 3], [1, 2, 3]], "011")
    assert compose_suffix(ident, 1) == ident.x
    with pytest.raises(ValueError):
        compose_suffix(a, 3)
    with pytest.raises(ValueError):
        compose_suffix(a, 0)


def test_evaluate_matches_recursion_and_composition_exhaustively():
    for n, k in [(1, 2), (2, 2), (2, 3), (3, 3), (2, 4)]:
        for a in InstanceSpace(n, k).instances():
            expected = mpj_recursive(a.start, [f.table for f in a.middles], a.x.bits)
            assert evaluate(a) == expected
            assert compose_suffix(a, 1).bit(a.start) == expected


def test_evaluate_matches_recursion_random_large():
    rng = random.Random(7)
    for _ in range(300):
        n, k = rng.randint(1, 12), rng.randint(2, 30)
        a = random_instance(n, k, rng)
        assert evaluate(a) == mpj_recursive(a.start, [f.table for f in a.middles], a.x.bits)
        assert compose_suffix(a, 1).bit(a.start) == evaluate(a)


def test_evaluate_is_iterative():
    n, k = 2, 5000
    a = Instance(n, k, 1, (PointerFn((2, 1)),) * (k - 2), BitString("01"))
    # k - 2 swaps starting from 1
    assert evaluate(a) == (1 if (k - 2) % 2 else 0)


def test_dominance_examples():
    assert dominance_less(BitString("0011"), BitString("0111"))
    assert not dominance_less(BitString("0011"), BitString("0011"))
    assert not dominance_less(BitString("0110"), BitString("1001"))
    with pytest.raises(ValueError):
        dominance_less(BitString("01"), BitString("011"))


def test_index_partition_examples():
    p = index_partition(BitString("0011"), BitString("0101"))
    assert (p.i00, p.i01, p.i10, p.i11) == ({1}, {2}, {3}, {4})
    p = index_partition(BitString("01"), BitString("01"))
    assert (p.i00, p.i01, p.i10, p.i11) == ({1}, set(), set(), {2})
    p = index_partition(BitString("0011"), BitString("0111"))
    assert (p.i00, p.i01, p.i10, p.i11) == ({1}, {2}, set(), {3, 4})
    with pytest.raises(ValueError):
        index_partition(BitString("0"), BitString("01"))


def test_is_crossing_examples():
    assert is_crossing(BitString("0011"), BitString("0101"))
    assert not is_crossing(BitString("0101"), BitString("0101"))
    assert not is_crossing(BitString("0011"), BitString("0111"))


def test_chain_string_examples():
    assert str(chain_string(4, 0)) == "1111"
    assert str(chain_string(4, 4)) == "0000"
    assert str(chain_string(4, 2)) == "0011"


@pytest.mark.parametrize("n", range(1, 9))
def test_more_zeros_is_smaller(n):
    for a, b in itertools.combinations(range(n + 1), 2):
        assert dominance_less(chain_string(n, b), chain_string(n, a))


bitpairs = st.integers(1, 12).flatmap(
    lambda n: st.tuples(
        st.lists(st.integers(0, 1), min_size=n, max_size=n),
        st.lists(st.integers(0, 1), min_size=n, max_size=n),
    )
)


@given(bitpairs)
def test_partition_covers_and_is_disjoint(pair):
    x, y = BitString(pair[0]), BitString(pair[1])
    p = index_partition(x, y)
    classes = [p.i00, p.i01, p.i10, p.i11]
    assert sum(len(c) for c in classes) == len(x)
    assert set().union(*classes) == set(range(1, len(x) + 1))
    for j in range(1, len(x) + 1):
        assert j in p.cls(x.bit(j), y.bit(j))


@given(bitpairs)
def test_dominance_is_partition_condition(pair):
    x, y = BitString(pair[0]), BitString(pair[1])
    p = index_partition(x, y)
    assert dominance_less(x, y) == (not p.i10 and bool(p.i01))


def test_ceil_log2():
    assert [ceil_log2(m) for m in range(1, 10)] == [0, 1, 2, 2, 3, 3, 3, 3, 4]
    for m in range(1, 2000):
        c = ceil_log2(m)
        assert 2 ** c >= m and (c == 0 or 2 ** (c - 1) < m)


def test_space_enumeration_order_and_size():
    space = InstanceSpace(2, 3)
    instances = list(space.instances())
    assert len(instances) == space.size() == 2 * 4 * 4
    keys = [(a.start, a.middles[0].table, a.x.bits) for a in instances]
    assert keys == sorted(keys)
    assert all(space.contains(a) for a in instances)
