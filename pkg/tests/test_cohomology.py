from __future__ import annotations

from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from qample import cohomology as coh
from qample.divisors import divisor_from_class
from qample.geometry import (
    hirzebruch1_fan,
    p1_fan,
    p1xp1_bundle,
    p1xp1_fan,
    p2_fan,
    totaro3fold_fan,
    threefold_bundle,
)
from qample.lattice import product_fan

small = st.integers(-5, 5)


def bott_pn(n: int, d: int) -> tuple[int, ...]:
    """Line bundle cohomology of P^n from the closed form."""
    out = [0] * (n + 1)
    if d >= 0:
        out[0] = comb(n + d, n)
    if d <= -n - 1:
        out[n] = comb(-d - 1, n)
    return tuple(out)


@pytest.mark.parametrize("d", range(-7, 6))
def test_p1_and_p2_match_closed_form(d):
    assert coh.cohomology(p1_fan(), divisor_from_class(p1_fan(), (d,))).dims == bott_pn(1, d)
    assert coh.cohomology(p2_fan(), divisor_from_class(p2_fan(), (d,))).dims == bott_pn(2, d)


def test_p3_product_free_check():
    # P^2 x P^1 against the Kunneth formula
    f = product_fan(p2_fan(), p1_fan())
    for a in range(-4, 3):
        for b in range(-3, 3):
            D = coh.ToricDivisor(f, (a, 0, 0, b, 0))
            assert coh.cohomology(f, D).dims == coh.kunneth(bott_pn(2, a), bott_pn(1, b))


@given(small, small)
def test_engine_matches_kunneth_on_p1xp1(a, b):
    f = p1xp1_fan()
    assert coh.cohomology(f, p1xp1_bundle(f, a, b)).dims == coh.p1xp1_table(a, b)


@given(small, small)
def test_class_invariance(a, b):
    # linearly equivalent divisors (different ray coefficients) give the same table
    f = hirzebruch1_fan()
    D = divisor_from_class(f, (a, b))
    E = D + coh.ToricDivisor(f, (1, -1, 0, 0)) + coh.ToricDivisor(f, (-1, 0, 1, -1))
    assert coh.cohomology(f, D).dims == coh.cohomology(f, E).dims


@settings(max_examples=40)
@given(small, small)
def test_serre_duality_on_hirzebruch(a, b):
    f = hirzebruch1_fan()
    D = divisor_from_class(f, (a, b))
    assert coh.check_serre(coh.cohomology(f, D), coh.cohomology(f, coh.serre_dual(D)))


@settings(max_examples=40)
@given(small, small)
def test_euler_characteristic_is_polynomial(a, b):
    # chi is quadratic in the class: third differences along any direction vanish
    f = hirzebruch1_fan()

    def chi(x, y):
        return coh.cohomology(f, divisor_from_class(f, (x, y))).euler_characteristic

    for da, db in ((1, 0), (0, 1), (1, 1)):
        third = sum((-1) ** (3 - k) * comb(3, k) * chi(a + k * da, b + k * db) for k in range(4))
        assert third == 0


@pytest.mark.parametrize("abc", [(-2, 1, 3), (1, -3, 2), (-4, -1, 1), (0, 0, 1), (3, 4, 5), (-1, -1, 4)])
def test_threefold_matches_pushforward_oracle(abc):
    # the closed form covers c > 0
    f = totaro3fold_fan()
    assert coh.cohomology(f, threefold_bundle(f, *abc)).dims == coh.split_bundle_oracle(*abc)


def test_characteristic_p_agrees_on_smooth_fans():
    f = totaro3fold_fan()
    D = threefold_bundle(f, -2, 1, 3)
    for p in (2, 3):
        t = coh.cohomology(f, D, p)
        assert t.dims == coh.cohomology(f, D).dims
        assert not t.torsion


def test_per_weight_breakdown_sums_to_total():
    f = p1xp1_fan()
    D = p1xp1_bundle(f, 2, -3)
    t = coh.cohomology(f, D, per_weight=True)
    totals = [0, 0, 0]
    for entries in t.per_weight.values():
        for i, v in entries:
            totals[i] += v
    assert tuple(totals) == t.dims == (0, 6, 0)


def test_witness_weight_contributes():
    f = totaro3fold_fan()
    D = threefold_bundle(f, -8, 4, 12)
    m = coh.find_witness(f, D, 2)
    assert m is not None
    assert coh.weight_contribution(f, D, m)[2] > 0
    assert coh.find_witness(f, threefold_bundle(f, 1, 1, 1), 2) is None


def test_cache_round_trip(tmp_path):
    path = tmp_path / "cache.jsonl"
    f = p2_fan()
    c1 = coh.CohomologyCache(str(path))
    dims = [c1.get(f, divisor_from_class(f, (d,))).dims for d in range(-5, 5)]
    assert c1.misses == 10 and c1.hits == 0
    c2 = coh.CohomologyCache(str(path), audit_rate=1.0)
    again = [c2.get(f, divisor_from_class(f, (d,))).dims for d in range(-5, 5)]
    assert again == dims
    assert c2.hits == 10 and c2.misses == 0 and c2.audits == 10


def test_corrupted_cache_entry_is_caught(tmp_path):
    path = tmp_path / "cache.jsonl"
    f = p2_fan()
    D = divisor_from_class(f, (1,))
    path.write_text(f'{{"fan": "{f.digest}", "coeffs": {list(D.coeffs)}, "char": 0, "dims": [4, 0, 0]}}\n')
    with pytest.raises(AssertionError):
        coh.CohomologyCache(str(path), audit_rate=1.0).get(f, D)


def test_serre_audit_counts_fresh_tables():
    f = p1xp1_fan()
    cache = coh.CohomologyCache(serre_audit=True)
    for a in range(-3, 3):
        cache.get(f, p1xp1_bundle(f, a, 1 - a))
    assert cache.serre_checked == cache.misses == 6
    assert cache.serre_failures == []


def test_regularity_of_projective_space(p2):
    # reg O(d) on P^2 w.r.t. O(1) is -d
    for d in range(-4, 4):
        assert coh.regularity(p2, p2.from_coords((d,))) == -d


@given(st.integers(-3, 3), st.integers(-3, 3), st.integers(0, 3))
@settings(max_examples=25, deadline=None)
def test_regularity_shift(a, b, k):
    from qample.geometry import make_geometry

    X = make_geometry("p1xp1")
    D = X.from_coords((a, b))
    assert coh.regularity(X, D + X.polarization * k) == coh.regularity(X, D) - k


def test_asymptotic_h0_is_volume(p1xp1):
    est = coh.asymptotic_h(p1xp1, p1xp1.from_coords((1, 1)), 0, 16)
    assert est.estimate == 2
    assert est.sequence[:3] == (4, 9, 16)


def test_asymptotic_h1_closed_form(p1xp1):
    est = coh.asymptotic_h(p1xp1, p1xp1.from_coords((1, -1)), 1, 16)
    assert est.sequence == tuple(m * m - 1 for m in range(1, 17))
    assert est.estimate == 2
    assert est.ratio_max < Fraction(2)


def test_pushforward_oracle_rejects_nonpositive_c():
    with pytest.raises(coh.UnsupportedTwist):
        coh.split_bundle_oracle(1, 1, 0)
