import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from emhd.regions import (
    BOUNDARY,
    REGION_I,
    REGION_II,
    UNIQUENESS,
    ExponentError,
    classify,
    parse_exponent,
)

INF = math.inf


class TestClassify:
    def test_interior_uniqueness_point(self):
        assert classify(3, 2, 1).classification == UNIQUENESS

    def test_excluded_pair(self):
        assert classify(INF, 1, 1).classification == BOUNDARY

    def test_p_at_lower_bound(self):
        # p = 3/(1+r) exactly
        assert classify(1.5, 4, 1).classification == BOUNDARY

    def test_lebesgue_regular_line(self):
        assert classify(3, INF).classification == REGION_II

    def test_lebesgue_regular_interior(self):
        assert classify(6, INF).classification == REGION_II
        assert classify(4, 8).classification == REGION_II

    def test_open_region(self):
        assert classify(3, 3).classification == REGION_I
        assert classify(4, 4, 1.0).classification == REGION_I

    def test_figure_corner_points(self):
        # the four labeled corner points of the parameter diagram
        p1 = classify(INF, 1.5, 1)
        p2 = classify(1, INF, 1)
        p3 = classify(INF, 3, 0)
        p4 = classify(2, INF, 0)
        for triple in (p1, p2, p3, p4):
            assert triple.classification == BOUNDARY

    def test_more_uniqueness_points(self):
        # scaling-consistent interior triples: 2/q + 3/p = 1 + r
        assert classify(6, 2, 0.5).classification == UNIQUENESS
        assert classify(6, 4.0 / 3.0, 1).classification == UNIQUENESS

    def test_invalid_exponents(self):
        with pytest.raises(ExponentError):
            classify(0.5, 2, 1)
        with pytest.raises(ExponentError):
            classify(2, 0.0, 1)
        with pytest.raises(ExponentError):
            classify(2, 2, math.nan)
        with pytest.raises(ExponentError):
            classify(2, 2, -2.0)

    @settings(max_examples=200, deadline=None)
    @given(
        st.one_of(st.floats(1.0, 50.0), st.just(INF)),
        st.one_of(st.floats(1.0, 50.0), st.just(INF)),
        st.one_of(st.none(), st.floats(-0.5, 1.5)),
    )
    def test_total_and_deterministic(self, p, q, r):
        a = classify(p, q, r).classification
        b = classify(p, q, r).classification
        assert a == b
        assert a in (UNIQUENESS, BOUNDARY, REGION_I, REGION_II)


class TestParseExponent:
    def test_plain_and_inf(self):
        assert parse_exponent("3") == 3.0
        assert parse_exponent("inf") == INF
        assert parse_exponent("Infinity") == INF

    def test_fraction(self):
        assert parse_exponent("3/2") == 1.5
