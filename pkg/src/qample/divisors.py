"""Torus-invariant divisors, their numerical classes and polyhedral positivity."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import lcm
from typing import Iterable, Sequence

from . import linalg
from .lattice import Fan, OrbitClosure, orbit_closures

# Effective cone generated by invariant prime divisors (standard toric fact).
EFFECTIVE_CONE_ASSUMPTION = "effective cone of a toric variety is spanned by invariant prime divisors"


@dataclass(frozen=True)
class ToricDivisor:
    fan: Fan
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) != len(self.fan.rays):
            raise ValueError(f"{len(self.coeffs)} coefficients for {len(self.fan.rays)} rays")
        object.__setattr__(self, "coeffs", tuple(int(a) for a in self.coeffs))

    def __add__(self, other: "ToricDivisor") -> "ToricDivisor":
        self._check(other)
        return ToricDivisor(self.fan, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "ToricDivisor") -> "ToricDivisor":
        self._check(other)
        return ToricDivisor(self.fan, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "ToricDivisor":
        return ToricDivisor(self.fan, tuple(-a for a in self.coeffs))

    def __mul__(self, k: int) -> "ToricDivisor":
        return ToricDivisor(self.fan, tuple(int(k) * a for a in self.coeffs))

    __rmul__ = __mul__

    def _check(self, other):
        if other.fan is not self.fan and other.fan != self.fan:
            raise ValueError("divisors live on different fans")

    def __repr__(self):
        return f"ToricDivisor({list(self.coeffs)})"

    def to_json(self) -> dict:
        return {"coeffs": {str(i): a for i, a in enumerate(self.coeffs)}}


def divisor_from_json(fan: Fan, doc: dict) -> ToricDivisor:
    coeffs = [0] * len(fan.rays)
    for k, v in doc["coeffs"].items():
        coeffs[int(k)] = int(v)
    return ToricDivisor(fan, tuple(coeffs))


def prime_divisor(fan: Fan, i: int) -> ToricDivisor:
    return ToricDivisor(fan, tuple(int(j == i) for j in range(len(fan.rays))))


def principal_divisor(fan: Fan, m: Sequence[int]) -> ToricDivisor:
    """div(chi^m) = sum <m, u_rho> D_rho."""
    return ToricDivisor(fan, tuple(sum(a * b for a, b in zip(m, u)) for u in fan.rays))


def cartier_data(D: ToricDivisor) -> dict:
    """For each maximal cone the weight m with <m, u_rho> = -a_rho on its rays."""
    out = {}
    for sigma in D.fan.max_cones:
        idx = sorted(sigma)
        if not idx:
            out[sigma] = ()
            continue
        out[sigma] = tuple(linalg.solve_unimodular(D.fan.ray_matrix(idx), [-D.coeffs[i] for i in idx]))
    return out


@dataclass(frozen=True)
class NumericalClass:
    """A rational point of N^1(X) in the basis recorded by ``basis_tag``."""

    fan: Fan
    coords: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(Fraction(c) for c in self.coords))
        if len(self.coords) != picard_rank(self.fan):
            raise ValueError("wrong number of coordinates for N^1")

    @property
    def basis_tag(self) -> str:
        return basis_tag(self.fan)

    def __add__(self, other):
        return NumericalClass(self.fan, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __neg__(self):
        return NumericalClass(self.fan, tuple(-a for a in self.coords))

    def __sub__(self, other):
        return self + (-other)

    def scale(self, k) -> "NumericalClass":
        k = Fraction(k)
        return NumericalClass(self.fan, tuple(k * a for a in self.coords))

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def integral_multiple(self) -> tuple[ToricDivisor, int]:
        """(D, k) with k > 0 and class(D) = k * self."""
        k = 1
        for c in self.coords:
            k = lcm(k, c.denominator)
        return divisor_from_class(self.fan, [int(c * k) for c in self.coords]), k

    def to_json(self) -> dict:
        return {"basis": self.basis_tag, "coords": [str(c) for c in self.coords]}

    def __repr__(self):
        return f"NumericalClass({[str(c) for c in self.coords]})"


def picard_rank(fan: Fan) -> int:
    return len(fan.rays) - fan.rank


@lru_cache(maxsize=None)
def _basis_rays(fan: Fan) -> tuple[tuple[int, ...], tuple[int, ...]]:
    sigma0 = tuple(sorted(fan.max_cones[0]))
    rest = tuple(i for i in range(len(fan.rays)) if i not in sigma0)
    return sigma0, rest


def basis_tag(fan: Fan) -> str:
    sigma0, rest = _basis_rays(fan)
    return f"fan={fan.digest};D_" + ",D_".join(map(str, rest)) if rest else f"fan={fan.digest};trivial"


def class_of(D: ToricDivisor) -> NumericalClass:
    """Image in N^1: coefficients of the representative vanishing on the first maximal cone."""
    sigma0, rest = _basis_rays(D.fan)
    if sigma0:
        m = linalg.solve_unimodular(D.fan.ray_matrix(sigma0), [-D.coeffs[i] for i in sigma0])
        shifted = D + principal_divisor(D.fan, m)
    else:
        shifted = D
    return NumericalClass(D.fan, tuple(Fraction(shifted.coeffs[i]) for i in rest))


def divisor_from_class(fan: Fan, coords: Sequence[int]) -> ToricDivisor:
    _, rest = _basis_rays(fan)
    coeffs = [0] * len(fan.rays)
    for i, c in zip(rest, coords):
        if Fraction(c).denominator != 1:
            raise ValueError("use NumericalClass.integral_multiple for rational classes")
        coeffs[i] = int(c)
    return ToricDivisor(fan, tuple(coeffs))


def restrict(D: ToricDivisor, V: OrbitClosure) -> ToricDivisor:
    """O(D) restricted to the orbit closure V, as a divisor on its quotient fan."""
    if not V.cone:
        return ToricDivisor(V.quotient_fan, D.coeffs)
    sigma = sorted(V.parent.star(V.cone)[0])
    m = linalg.solve_unimodular(V.parent.ray_matrix(sigma), [-D.coeffs[i] for i in sigma])
    shifted = D + principal_divisor(D.fan, m)
    coeffs = [0] * len(V.quotient_fan.rays)
    for i, k in V.ray_map.items():
        coeffs[k] = shifted.coeffs[i]
    return ToricDivisor(V.quotient_fan, tuple(coeffs))


# --- the section polytope {m : <m,u_rho> >= -a_rho} -------------------------

def _solve_fraction(A: list[list[int]], b: list[int]) -> tuple[Fraction, ...] | None:
    n = len(A)
    M = [[Fraction(x) for x in row] + [Fraction(y)] for row, y in zip(A, b)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            return None
        M[col], M[piv] = M[piv], M[col]
        pv = M[col][col]
        M[col] = [x / pv for x in M[col]]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col]
                M[r] = [x - f * y for x, y in zip(M[r], M[col])]
    return tuple(M[r][n] for r in range(n))


def polytope_vertices(fan: Fan, coeffs: Sequence) -> list[tuple[Fraction, ...]]:
    """Vertices of the rational polytope P_D (empty list if P_D is empty)."""
    n = fan.rank
    if n == 0:
        return [()]
    rays = fan.rays
    b = [-Fraction(a) for a in coeffs]
    verts = set()
    for S in combinations(range(len(rays)), n):
        # Clear denominators per row to keep integer matrices.
        A = [list(rays[i]) for i in S]
        sol = _solve_fraction(A, [b[i] for i in S])
        if sol is None:
            continue
        if all(sum(x * u for x, u in zip(sol, rays[j])) >= b[j] for j in range(len(rays))):
            verts.add(sol)
    return sorted(verts)


def affine_dimension(points: Sequence[Sequence[Fraction]]) -> int:
    if not points:
        return -1
    p0 = points[0]
    diffs = [[x - y for x, y in zip(p, p0)] for p in points[1:]]
    if not diffs:
        return 0
    den = 1
    for row in diffs:
        for x in row:
            den = lcm(den, Fraction(x).denominator)
    return linalg.rank([[int(x * den) for x in row] for row in diffs])


def _as_divisor_coeffs(D) -> tuple[Fan, tuple]:
    if isinstance(D, ToricDivisor):
        return D.fan, D.coeffs
    if isinstance(D, NumericalClass):
        div, _ = D.integral_multiple()
        return div.fan, div.coeffs
    raise TypeError(f"expected a divisor or class, got {type(D).__name__}")


def is_big(D) -> bool:
    """P_D is full-dimensional."""
    fan, coeffs = _as_divisor_coeffs(D)
    return affine_dimension(polytope_vertices(fan, coeffs)) == fan.rank


def is_pseudoeffective(D) -> bool:
    """Class lies in the cone spanned by the invariant prime divisors (P_D nonempty)."""
    fan, coeffs = _as_divisor_coeffs(D)
    return bool(polytope_vertices(fan, coeffs))


def curve_degrees(D: ToricDivisor) -> list[int]:
    """Degrees of D on the invariant curves V(tau), |tau| = n - 1."""
    if D.fan.rank == 0:
        return []
    return [sum(restrict(D, C).coeffs) for C in orbit_closures(D.fan, 1)]


def is_nef(D) -> bool:
    fan, coeffs = _as_divisor_coeffs(D)
    return all(d >= 0 for d in curve_degrees(ToricDivisor(fan, coeffs)))


def is_ample(D) -> bool:
    fan, coeffs = _as_divisor_coeffs(D)
    return all(d > 0 for d in curve_degrees(ToricDivisor(fan, coeffs)))


def canonical_divisor(fan: Fan) -> ToricDivisor:
    return ToricDivisor(fan, tuple(-1 for _ in fan.rays))


def effective_generators(fan: Fan) -> list[NumericalClass]:
    return [class_of(ToricDivisor(fan, tuple(int(j == i) for j in range(len(fan.rays))))) for i in range(len(fan.rays))]


def divisors_in(fan: Fan, coords_list: Iterable[Sequence[int]]) -> list[ToricDivisor]:
    return [divisor_from_class(fan, c) for c in coords_list]
