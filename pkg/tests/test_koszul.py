from __future__ import annotations

from fractions import Fraction

import pytest

from qample.koszul import (
    ASSERTED,
    CERTIFIED,
    NotAmple,
    WindowTooSmall,
    certify_N_koszul,
    koszul_spaces,
    polarization_status,
    ring_from_polytope,
    rm_section_dims,
    section_ring,
    verify_sequence4,
)


def test_section_ring_dims(p1, p2, p1xp1):
    assert section_ring(p1, J=4).dims == (1, 2, 3, 4, 5)
    assert section_ring(p2, J=4).dims == (1, 3, 6, 10, 15)
    assert section_ring(p1xp1, J=3).dims == (1, 4, 9, 16)


def test_section_ring_rejects_non_ample(p1xp1):
    with pytest.raises(NotAmple):
        section_ring(p1xp1, H=p1xp1.from_coords((1, 0)))


def test_koszul_spaces_are_exterior_powers(p1, p2):
    # for a polynomial ring, B_m is the m-th exterior power of A_1
    assert koszul_spaces(section_ring(p1, J=4), 3).dims == (1, 2, 1, 0)
    assert koszul_spaces(section_ring(p2, J=6), 4).dims == (1, 3, 3, 1, 0)


def test_rm_sections_on_p2(p2):
    A = section_ring(p2, J=6)
    B = koszul_spaces(A, 4)
    # R_0 = O, R_1 = Omega(1) twisted, ...; H^0(R_m(2)) dims
    assert [rm_section_dims(A, B, m, 2) for m in range(4)] == [6, 8, 3, 0]


def test_certificates_for_polynomial_rings(p1, p2, p1xp1):
    c1 = certify_N_koszul(section_ring(p1, J=4), 2)
    c2 = certify_N_koszul(section_ring(p2, J=8), 4)
    c3 = certify_N_koszul(section_ring(p1xp1, J=8), 4)
    assert c1.status == c2.status == c3.status == CERTIFIED
    assert [c1.tor_dims[i][i] for i in range(3)] == [1, 2, 1]
    assert [c2.tor_dims[i][i] for i in range(5)] == [1, 3, 3, 1, 0]
    # Segre ring of P^1 x P^1: quadric cone, Tor diagonal 1, 4, 7, 8, 8
    assert [c3.tor_dims[i][i] for i in range(5)] == [1, 4, 7, 8, 8]


def test_modular_certificate_agrees(p1xp1):
    c = certify_N_koszul(section_ring(p1xp1, J=8), 4, p=7)
    assert c.certified
    assert c.to_json()["field"] == "F_7"


def test_negative_control_not_generated_in_degree_one():
    # polytope [0, 1/2]: A_1 is one-dimensional, the ring needs a generator in degree 2
    R = ring_from_polytope([(1,), (-1,)], [0, Fraction(1, 2)], 4)
    assert R.dims == (1, 1, 2, 2, 3)
    assert not R.degree_one_generated
    c = certify_N_koszul(R, 2)
    assert not c.certified
    assert c.failure == (1, 2, 1) or list(c.failure) == [1, 2, 1]
    assert c.to_json()["status"] == "FAILED(1,2,1)"
    assert c.flags


def test_window_guards(p1):
    A = section_ring(p1, J=3)
    with pytest.raises(WindowTooSmall):
        certify_N_koszul(A, 2)
    with pytest.raises(WindowTooSmall):
        certify_N_koszul(section_ring(p1, J=6), 3, window=2)


@pytest.mark.parametrize("name,N", [("p1", 2), ("p2", 4)])
def test_sequence_exact(request, name, N):
    X = request.getfixturevalue(name)
    A = section_ring(X, J=9)
    B = koszul_spaces(A, N)
    for j in range(5):
        for l in range(5):
            rep = verify_sequence4(A, B, j, l)
            assert rep.exact, rep.to_json()


def test_polarization_status(p2, threefold):
    assert polarization_status(p2) == CERTIFIED
    assert polarization_status(threefold) == ASSERTED
