from __future__ import annotations

import pytest

from qample.geometry import hirzebruch1_fan, p1_fan, p1xp1_fan, p2_fan, totaro3fold_fan
from qample.lattice import (
    BadFaceStructure,
    NonPrimitiveRay,
    NotComplete,
    NotSmooth,
    build_fan,
    fan_from_json,
    orbit_closure,
    orbit_closures,
    product_fan,
)


def test_f_vectors_of_catalog_fans():
    assert p1_fan().f_vector() == (1, 2)
    assert p2_fan().f_vector() == (1, 3, 3)
    assert p1xp1_fan().f_vector() == (1, 4, 4)
    assert hirzebruch1_fan().f_vector() == (1, 4, 4)
    # P^1-bundle over P^1 x P^1: 6 rays, 12 edges, 8 maximal cones
    assert totaro3fold_fan().f_vector() == (1, 6, 12, 8)


def test_product_fan_f_vector_is_multiplicative():
    f = product_fan(p2_fan(), p1_fan())
    assert f.rank == 3
    assert f.f_vector() == (1, 5, 9, 6)


def test_non_primitive_ray_rejected():
    with pytest.raises(NonPrimitiveRay):
        build_fan(2, [(2, 0), (0, 1), (-1, -1)], [(0, 1), (1, 2), (2, 0)])


def test_singular_cone_rejected():
    with pytest.raises(NotSmooth):
        build_fan(2, [(1, 0), (1, 2), (-1, -1)], [(0, 1), (1, 2), (2, 0)])


def test_incomplete_fan_rejected():
    with pytest.raises(NotComplete):
        build_fan(2, [(1, 0), (0, 1), (-1, 0)], [(0, 1), (1, 2)])


def test_overlapping_cones_rejected():
    # cone {0,1} contains ray 3 and overlaps {0,3} and {3,1}
    with pytest.raises(BadFaceStructure):
        build_fan(2, [(1, 0), (0, 1), (-1, -1), (1, 1)], [(0, 1), (0, 3), (3, 1), (1, 2), (2, 0)])


def test_missing_cone_is_incomplete():
    with pytest.raises(NotComplete):
        build_fan(2, [(1, 0), (0, 1), (-1, -1)], [(0, 1), (1, 2)])


def test_json_round_trip_and_digest_stable():
    f = totaro3fold_fan()
    g = fan_from_json(f.to_json())
    assert f == g
    assert f.digest == g.digest
    assert p2_fan().digest != p1xp1_fan().digest


def test_orbit_closure_dimensions():
    f = totaro3fold_fan()
    assert orbit_closure(f, (0,)).dim == 2
    for V in orbit_closures(f, 1):
        assert V.dim == 1
        assert V.quotient_fan.f_vector() == (1, 2)
    assert len(orbit_closures(f, 1)) == 12
    assert len(orbit_closures(f, 2)) == 6
