from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from qample.positivity import (
    CERTIFIED_Q_TAMPLE,
    NOT_REACHED,
    UnsupportedGeometry,
    UnsupportedRank,
    additivity_check,
    candidate_rays,
    cone_scan_rank2,
    is_q_ample_exact,
    n_minus_1_ample,
    naive_probe,
    q_nef,
    q_nef_interior,
    qtample_certificate,
    required_groups,
    uniform_probe,
)


def test_required_groups():
    assert required_groups(3, 1) == [(2, 4), (3, 5)]
    assert required_groups(2, 0) == [(1, 3), (2, 4)]
    assert required_groups(2, 2) == []


def test_certificate_on_p1xp1(p1xp1):
    rep = qtample_certificate(p1xp1, (1, -1), q=1)
    assert rep.holds and rep.N == 2
    assert rep.verdict.startswith(CERTIFIED_Q_TAMPLE)
    assert any("Koszul" in a for a in rep.assumptions)
    neg = qtample_certificate(p1xp1, (-1, -1), q=1, N_max=8)
    assert not neg.holds
    assert neg.verdict == "NO_CERTIFICATE_UP_TO(8)"
    assert neg.witnesses and neg.witnesses[0][2] > 0


@settings(max_examples=30, deadline=None)
@given(st.integers(-4, 4), st.integers(-4, 4))
def test_ample_classes_are_zero_ample(a, b):
    from qample.geometry import make_geometry

    X = make_geometry("p1xp1")
    rep = qtample_certificate(X, (a, b), q=0, N_max=16, record_koszul=False)
    assert rep.holds == (a > 0 and b > 0)


@settings(max_examples=20, deadline=None)
@given(st.integers(-4, 4), st.integers(-4, 4), st.integers(2, 3))
def test_certificate_is_scaling_invariant(a, b, k):
    from qample.geometry import make_geometry

    X = make_geometry("hirzebruch1")
    one = qtample_certificate(X, (a, b), q=1, N_max=32, record_koszul=False).holds
    many = qtample_certificate(X, (k * a, k * b), q=1, N_max=32, record_koszul=False).holds
    assert one == many


def test_naive_probe(p1xp1):
    rep = naive_probe(p1xp1, (1, 0), 1, [(-2, -2), (0, -5)], m_max=16)
    assert rep.all_reached
    bad = naive_probe(p1xp1, (-1, 0), 1, [(-2, -2)], m_max=16)
    assert bad.results[0][1] == NOT_REACHED


def test_uniform_probe_slope_within_certificate(p1xp1):
    res = uniform_probe(p1xp1, (1, -1), 1, j_max=6)
    assert res.N_reference == 2
    assert res.tail_slope == 1
    assert res.consistent


def test_threefold_nef_and_ample_verdicts(threefold):
    assert q_nef(threefold, (-2, 1, 3), 1).holds
    assert q_nef_interior(threefold, (-2, 1, 3), 1, Fraction(1, 2))
    assert not q_nef(threefold, (-2, -1, 3), 1).holds
    # no exact test for q = 1 on a threefold
    assert is_q_ample_exact(threefold, (-2, 1, 3), 1) is None
    assert is_q_ample_exact(threefold, (1, 2, 1), 0) is True


def test_n_minus_1_ample(p1xp1, f1, sl3b):
    assert n_minus_1_ample(p1xp1, (1, -3)).holds
    assert not n_minus_1_ample(p1xp1, (-1, 0)).holds
    assert not n_minus_1_ample(p1xp1, (0, 0)).holds
    # on F_1 the effective cone is spanned by F and E
    assert not n_minus_1_ample(f1, (-1, -1)).holds
    assert n_minus_1_ample(f1, (1, -1)).holds
    assert not n_minus_1_ample(sl3b, (-1, -2)).holds


def test_flag_q_nef_limited_to_extreme_q(sl3b):
    assert q_nef(sl3b, (1, 1), 0).holds
    assert q_nef(sl3b, (1, -1), 2).holds
    with pytest.raises(UnsupportedGeometry):
        q_nef(sl3b, (1, -1), 1)


def test_additivity(p1xp1):
    assert additivity_check(p1xp1, (1, 1), 0, (1, -1), 1).status == "CONSISTENT"
    assert additivity_check(p1xp1, (1, 0), 1, (-1, 1), 0).status == "PRECONDITION_FAILED"


def test_rank_guard(p2, threefold):
    with pytest.raises(UnsupportedRank):
        cone_scan_rank2(p2, 0)
    with pytest.raises(UnsupportedRank):
        cone_scan_rank2(threefold, 1)


def test_candidate_rays_contain_walls(p1xp1, sl3b):
    assert {(1, 0), (0, 1), (-1, 0), (0, -1)} <= set(candidate_rays(p1xp1))
    assert {(1, -1), (-1, 1)} <= set(candidate_rays(sl3b))


def test_p1xp1_charts(p1xp1):
    c0 = cone_scan_rank2(p1xp1, 0, resolution=16)
    c1 = cone_scan_rank2(p1xp1, 1, resolution=16)
    assert sorted(c0.boundary_rays) == [(0, 1), (1, 0)]
    assert sorted(c1.boundary_rays) == [(-1, 0), (0, -1)]
    assert c0.verdict_at((2, 3)) and not c0.verdict_at((2, -3))
    assert c1.verdict_at((2, -3)) and not c1.verdict_at((-2, -3))
    # the chart does not depend on the resolution
    assert c1.signature() == cone_scan_rank2(p1xp1, 1, resolution=48).signature()


def test_hirzebruch_chart_matches_exact(f1):
    tam = cone_scan_rank2(f1, 1, resolution=16)
    exact = cone_scan_rank2(f1, 1, resolution=16, predicate="exact")
    assert tam.signature() == exact.signature()


def test_sl3b_charts(sl3b):
    c1 = cone_scan_rank2(sl3b, 1, resolution=16, N_max=40)
    # open arc strictly between (1,-1) and (-1,1) through the dominant chamber
    assert c1.verdict_at((2, -1)) and c1.verdict_at((-1, 2)) and c1.verdict_at((1, 1))
    assert not c1.verdict_at((1, -1)) and not c1.verdict_at((1, -2)) and not c1.verdict_at((-1, -1))
    c2 = cone_scan_rank2(sl3b, 2, resolution=16, N_max=40)
    assert c2.verdict_at((1, -5)) and not c2.verdict_at((-1, -1))
