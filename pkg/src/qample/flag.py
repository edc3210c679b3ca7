"""Line bundles on the flag 3-fold SL(3)/B in characteristic 0 (Borel-Weil-Bott)."""

from __future__ import annotations

from dataclasses import dataclass

from .cohomology import CohomologyTable


class UnsupportedCharacteristic(ValueError):
    pass


@dataclass(frozen=True)
class FlagBundle:
    """L(a w1 + b w2) in fundamental-weight coordinates."""

    a: int
    b: int

    def __add__(self, other):
        return FlagBundle(self.a + other.a, self.b + other.b)

    def __sub__(self, other):
        return FlagBundle(self.a - other.a, self.b - other.b)

    def __neg__(self):
        return FlagBundle(-self.a, -self.b)

    def __mul__(self, k: int):
        return FlagBundle(int(k) * self.a, int(k) * self.b)

    __rmul__ = __mul__

    @property
    def coeffs(self) -> tuple[int, int]:
        return (self.a, self.b)


def _s1(x, y):
    return (-x, x + y)


def _s2(x, y):
    return (x + y, -y)


def weyl_dimension(x: int, y: int) -> int:
    """Dimension of the irreducible SL(3)-module with highest weight x w1 + y w2."""
    return (x + 1) * (y + 1) * (x + y + 2) // 2


def dot_action_chamber(a: int, b: int) -> tuple[int, tuple[int, int]] | None:
    """(length of w, w.lambda) with w.lambda dominant, or None when lambda + rho is singular."""
    x, y = a + 1, b + 1
    if x == 0 or y == 0 or x + y == 0:
        return None
    # Breadth-first over the six Weyl group elements, tracking word length.
    frontier = [((x, y), 0)]
    seen = {(x, y)}
    while frontier:
        nxt = []
        for (u, v), ell in frontier:
            if u > 0 and v > 0:
                return ell, (u - 1, v - 1)
            for s in (_s1, _s2):
                w = s(u, v)
                if w not in seen:
                    seen.add(w)
                    nxt.append((w, ell + 1))
        frontier = nxt
    raise AssertionError("no dominant conjugate found")


def flag3_cohomology(a: int, b: int, char_label: int = 0) -> CohomologyTable:
    if char_label != 0:
        raise UnsupportedCharacteristic("SL(3)/B cohomology is implemented in characteristic 0 only")
    dims = [0, 0, 0, 0]
    hit = dot_action_chamber(a, b)
    if hit is not None:
        ell, (u, v) = hit
        dims[ell] = weyl_dimension(u, v)
    return CohomologyTable(FlagBundle(a, b), 0, tuple(dims))


def flag3_canonical() -> FlagBundle:
    return FlagBundle(-2, -2)
