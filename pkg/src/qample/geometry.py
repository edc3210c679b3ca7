"""Geometries with a fixed polarization: toric varieties and the flag 3-fold.

Every positivity routine talks to a geometry through the same small surface:
``dim``, ``polarization``, ``zero()``, ``h(D, i)``, ``cohomology(D)``, class
coordinates in N^1 and back.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from . import cohomology as coh
from .divisors import (
    EFFECTIVE_CONE_ASSUMPTION,
    ToricDivisor,
    class_of,
    divisor_from_class,
    effective_generators,
    is_ample,
    picard_rank,
)
from .flag import FlagBundle, flag3_cohomology
from .lattice import Fan, build_fan, product_fan, projectivized_split_bundle_fan


class UnsupportedGeometry(ValueError):
    pass


class ToricGeometry:
    is_toric = True

    def __init__(self, fan: Fan, polarization: ToricDivisor, name: str = "", char_label: int = 0,
                 cache: coh.CohomologyCache | None = None):
        self.fan = fan
        self.polarization = polarization
        self.name = name or fan.name
        self.char_label = char_label
        self.cache = cache if cache is not None else coh.CohomologyCache(audit_rate=0.0)
        self.assumptions = [EFFECTIVE_CONE_ASSUMPTION]

    def __repr__(self):
        return f"<ToricGeometry {self.name} dim={self.dim}>"

    @property
    def dim(self) -> int:
        return self.fan.rank

    @property
    def picard_rank(self) -> int:
        return picard_rank(self.fan)

    def zero(self) -> ToricDivisor:
        return ToricDivisor(self.fan, (0,) * len(self.fan.rays))

    def divisor(self, coeffs: Sequence[int]) -> ToricDivisor:
        return ToricDivisor(self.fan, tuple(coeffs))

    def cohomology(self, D: ToricDivisor) -> coh.CohomologyTable:
        return self.cache.get(self.fan, D, self.char_label)

    def h(self, D: ToricDivisor, i: int) -> int:
        return self.cohomology(D).dims[i]

    def coefficient_size(self, D: ToricDivisor) -> int:
        return max((abs(a) for a in D.coeffs), default=0)

    def class_coords(self, D: ToricDivisor) -> tuple[Fraction, ...]:
        return class_of(D).coords

    def from_coords(self, coords: Sequence[int]) -> ToricDivisor:
        return divisor_from_class(self.fan, coords)

    def effective_generators(self) -> list[tuple[Fraction, ...]]:
        return [c.coords for c in effective_generators(self.fan)]

    def canonical(self) -> ToricDivisor:
        return ToricDivisor(self.fan, tuple(-1 for _ in self.fan.rays))

    def witness(self, D: ToricDivisor, i: int):
        return coh.find_witness(self.fan, D, i, self.char_label)

    def witness_holds(self, D: ToricDivisor, i: int, m) -> bool:
        return coh.weight_contribution(self.fan, D, m, self.char_label)[i] > 0


class Flag3Geometry:
    """SL(3)/B with O(1,1) as polarization; characteristic 0 only."""

    is_toric = False
    dim = 3
    picard_rank = 2

    def __init__(self, name: str = "sl3b", char_label: int = 0):
        if char_label != 0:
            from .flag import UnsupportedCharacteristic

            raise UnsupportedCharacteristic("SL(3)/B is only supported in characteristic 0")
        self.name = name
        self.char_label = 0
        self.polarization = FlagBundle(1, 1)
        self.assumptions = ["Koszul-ampleness of O(1,1) on SL(3)/B asserted"]

    def __repr__(self):
        return "<Flag3Geometry SL(3)/B>"

    def zero(self) -> FlagBundle:
        return FlagBundle(0, 0)

    def divisor(self, coeffs: Sequence[int]) -> FlagBundle:
        a, b = coeffs
        return FlagBundle(int(a), int(b))

    def cohomology(self, D: FlagBundle) -> coh.CohomologyTable:
        return flag3_cohomology(D.a, D.b)

    def h(self, D: FlagBundle, i: int) -> int:
        return self.cohomology(D).dims[i]

    def coefficient_size(self, D: FlagBundle) -> int:
        return max(abs(D.a), abs(D.b))

    def class_coords(self, D: FlagBundle) -> tuple[Fraction, ...]:
        return (Fraction(D.a), Fraction(D.b))

    def from_coords(self, coords: Sequence[int]) -> FlagBundle:
        a, b = coords
        return FlagBundle(int(a), int(b))

    def effective_generators(self) -> list[tuple[Fraction, ...]]:
        return [(Fraction(1), Fraction(0)), (Fraction(0), Fraction(1))]

    def canonical(self) -> FlagBundle:
        return FlagBundle(-2, -2)

    def witness(self, D, i):
        return None

    def witness_holds(self, D, i, m) -> bool:
        return False


# --- built-in catalog ------------------------------------------------------

def p1_fan() -> Fan:
    return build_fan(1, [(1,), (-1,)], [[0], [1]], name="p1")


def p2_fan() -> Fan:
    return build_fan(2, [(1, 0), (0, 1), (-1, -1)], [[0, 1], [1, 2], [0, 2]], name="p2")


def p1xp1_fan() -> Fan:
    return product_fan(p1_fan(), p1_fan())


def hirzebruch1_fan() -> Fan:
    base = p1_fan()
    return projectivized_split_bundle_fan(base, ToricDivisor(base, (-1, 0)), name="hirzebruch1")


def totaro3fold_fan() -> Fan:
    """P(O + O(1,-1)) over P^1 x P^1.

    Rays: 0 = lift of (1,0), 1 = (-1,0), 2 = lift of (0,1), 3 = (0,-1),
    4 = (0,0,1), 5 = (0,0,-1).  D_5 is O_{P(E)}(1); D_0 and D_2 pull back
    O(1,0) and O(0,1).  V(4) is the section S_1 = P(O), V(5) is S_2.
    """
    base = p1xp1_fan()
    return projectivized_split_bundle_fan(base, ToricDivisor(base, (1, 0, -1, 0)), name="totaro3fold")


def p1xp1_bundle(fan: Fan, a: int, b: int) -> ToricDivisor:
    return ToricDivisor(fan, (a, 0, b, 0))


def threefold_bundle(fan: Fan, a: int, b: int, c: int) -> ToricDivisor:
    """pi^*O(a, b) (x) O_{P(E)}(c)."""
    return ToricDivisor(fan, (a, 0, b, 0, 0, c))


GEOMETRY_NAMES = ("p1", "p2", "p1xp1", "hirzebruch1", "totaro3fold", "sl3b")


def make_geometry(name: str, char_label: int = 0, cache: coh.CohomologyCache | None = None):
    if name == "sl3b":
        return Flag3Geometry(char_label=char_label)
    if name == "p1":
        fan = p1_fan()
        H = ToricDivisor(fan, (1, 0))
    elif name == "p2":
        fan = p2_fan()
        H = ToricDivisor(fan, (1, 0, 0))
    elif name == "p1xp1":
        fan = p1xp1_fan()
        H = p1xp1_bundle(fan, 1, 1)
    elif name == "hirzebruch1":
        fan = hirzebruch1_fan()
        # 2F + E with F = D_1 a fibre and E = D_3 the (-1)-curve
        H = ToricDivisor(fan, (0, 2, 0, 1))
    elif name == "totaro3fold":
        fan = totaro3fold_fan()
        H = threefold_bundle(fan, 1, 2, 1)
    else:
        raise UnsupportedGeometry(f"unknown geometry {name!r}; choose from {', '.join(GEOMETRY_NAMES)}")
    if not is_ample(H):
        raise AssertionError(f"catalog polarization on {name} is not ample")
    return ToricGeometry(fan, H, name=name, char_label=char_label, cache=cache)


def geometry_from_fan_file(path: str, polarization: Sequence[int] | None = None, char_label: int = 0,
                           cache: coh.CohomologyCache | None = None) -> ToricGeometry:
    import json

    from .lattice import fan_from_json

    with open(path) as fh:
        doc = json.load(fh)
    fan = fan_from_json(doc)
    if polarization is None:
        polarization = doc.get("polarization")
    if polarization is None:
        H = smallest_ample(fan)
    else:
        H = ToricDivisor(fan, tuple(int(x) for x in polarization))
    return ToricGeometry(fan, H, name=doc.get("name", path), char_label=char_label, cache=cache)


def smallest_ample(fan: Fan, bound: int = 3) -> ToricDivisor:
    """First ample divisor among class coordinates in [0, bound]^rho, by total size."""
    from itertools import product

    rho = picard_rank(fan)
    cands = sorted(product(range(bound + 1), repeat=rho), key=lambda c: (sum(c), c))
    for c in cands:
        D = divisor_from_class(fan, c)
        if is_ample(D):
            return D
    raise UnsupportedGeometry("no small ample divisor found")
