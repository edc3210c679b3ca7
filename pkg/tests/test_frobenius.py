from __future__ import annotations

import numpy as np
import pytest

from qample.frobenius import (
    FinAlgebra,
    HypothesisFails,
    NotAnAlgebra,
    SizeCapExceeded,
    algebra_from_json,
    charp_vanishing_probe,
    frobenius_tor,
    hochschild_homology,
    ordinary_frobenius_tor,
    preset,
    preset_catalog,
    preset_names,
)


def test_catalog_has_regular_and_singular_algebras():
    docs = preset_catalog()
    assert len(docs) >= 6
    assert any(d["regular"] for d in docs) and any(not d["regular"] for d in docs)


def test_presets_verify_in_several_characteristics():
    for name in preset_names():
        for p in (2, 3, 5):
            A = preset(name, p)
            assert algebra_from_json(A.to_json(), p).table.tolist() == A.table.tolist()


def test_frobenius_matrix():
    A = preset("k[x]/(x^4)", 2)
    F = A.frobenius_matrix(1)
    # basis 1, x, x^2, x^3: x -> x^2, x^2 -> x^4 = 0
    assert F[1].tolist() == [0, 0, 1, 0]
    assert not F[2].any() and not F[3].any()
    assert A.frobenius_matrix(2)[1].tolist() == [0, 0, 0, 0]


@pytest.mark.parametrize("name", preset_names())
def test_relative_frobenius_is_flat(name):
    for p in (2, 3):
        A = preset(name, p)
        assert frobenius_tor(A, 1, 3).dims == (A.dim, 0, 0, 0)


def test_ordinary_frobenius_detects_singularity():
    for doc in preset_catalog():
        dims = ordinary_frobenius_tor(preset(doc["name"], 3), 3).dims
        assert (dims[1] == 0) == bool(doc["regular"]), doc["name"]


def test_hochschild_control_is_not_flat():
    # diagonal coefficients: HH_i(k[x]/(x^2)) is one-dimensional in every positive degree (p odd)
    assert hochschild_homology(preset("k[x]/(x^2)", 3), 3).dims == (2, 1, 1, 1)
    assert hochschild_homology(preset("k x k", 3), 3).dims == (2, 0, 0, 0)


def test_size_cap():
    with pytest.raises(SizeCapExceeded):
        frobenius_tor(preset("k[x,y]/(x^2,y^2)", 2), 1, 12)


def test_bad_structure_constants_rejected():
    T = np.zeros((2, 2, 2), dtype=int)
    T[0, 0, 0] = T[0, 1, 1] = T[1, 0, 1] = 1
    T[1, 1, 0] = 1                       # x^2 = 1: x no longer spans an ideal
    with pytest.raises(NotAnAlgebra):
        FinAlgebra(2, ("1", "x"), T)
    T[1, 1, 0] = 0
    T[1, 0, 1] = 0                       # 1 is no longer a two-sided unit
    with pytest.raises(NotAnAlgebra):
        FinAlgebra(2, ("1", "x"), T)


def test_charp_probe_passes_for_one_ample(p1xp1):
    rep = charp_vanishing_probe(p1xp1, (1, 0), 1, (-2, -2), primes=(2, 3), b_max=3)
    assert rep.passed and rep.rows
    assert all(p ** b >= rep.regularity for p, b, *_ in rep.rows)
    assert all(p ** b < rep.regularity for p, b in rep.skipped)


def test_charp_probe_hypothesis_fails(p1xp1):
    with pytest.raises(HypothesisFails) as info:
        charp_vanishing_probe(p1xp1, (-1, 0), 1, (-2, -2), primes=(2,), b_max=2, N_max=8)
    assert info.value.detail["at_N_1"][0][2] == 6
