from fractions import Fraction as F

import pytest

from compspec.errors import ExpressionSyntaxError
from compspec.intervals import (NEG_INF, POS_INF, Interval, intersect_unions,
                                union_covers)
from compspec.sturm import complement_blocks


def test_parse_and_membership():
    iv = Interval.parse("(-1/2, 3)")
    assert iv.contains(F(0))
    assert not iv.contains(F(-1, 2))
    assert not iv.contains(F(3))
    whole = Interval.parse("(-inf,inf)")
    assert whole.contains(F(10 ** 12))


def test_parse_rejects_garbage():
    with pytest.raises(ExpressionSyntaxError):
        Interval.parse("[0,1]")
    with pytest.raises(ExpressionSyntaxError):
        Interval.parse("(0;1)")
    with pytest.raises(ValueError):
        Interval(1, 1)


def test_reflect():
    iv = Interval(F(1), POS_INF)
    ref = iv.reflect(F(1, 2))
    assert ref == Interval(NEG_INF, F(0))


def test_union_covers_requires_overlap_at_shared_endpoints():
    line = Interval.real_line()
    assert union_covers([Interval(NEG_INF, 0), Interval(-1, 1),
                         Interval(0, POS_INF)], line)
    # (-inf,0) and (0,inf) miss the point 0
    assert not union_covers([Interval(NEG_INF, 0), Interval(0, POS_INF)], line)
    assert union_covers([Interval(0, 1)], Interval(F(1, 4), F(1, 2)))
    assert not union_covers([Interval(0, 1)], Interval(0, 2))


def test_intersect_unions():
    a = [Interval(NEG_INF, F(1, 2)), Interval(1, POS_INF)]
    b = [Interval(0, F(3, 2))]
    parts = intersect_unions(a, b)
    assert parts == [Interval(0, F(1, 2)), Interval(1, F(3, 2))]


def test_complement_blocks():
    blocks = complement_blocks([Interval(NEG_INF, 0), Interval(0, POS_INF)])
    assert blocks == [(F(0), F(0))]
    blocks = complement_blocks([Interval(0, 1)])
    assert blocks == [(NEG_INF, F(0)), (F(1), POS_INF)]
    assert complement_blocks([Interval.real_line()]) == []
    assert complement_blocks([]) == [(NEG_INF, POS_INF)]
