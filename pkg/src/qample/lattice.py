"""Smooth complete fans, products, split P^1-bundles and orbit closures."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from math import gcd
from typing import Iterable, Sequence

from . import linalg

Ray = tuple[int, ...]
Cone = frozenset


class FanError(ValueError):
    pass


class NonPrimitiveRay(FanError):
    pass


class NotSmooth(FanError):
    pass


class NotComplete(FanError):
    pass


class BadFaceStructure(FanError):
    pass


@dataclass(frozen=True, eq=False)
class Fan:
    """A validated smooth complete fan.  Build instances with :func:`build_fan`."""

    rank: int
    rays: tuple[Ray, ...]
    max_cones: tuple[Cone, ...]
    name: str = ""

    def __eq__(self, other):
        if not isinstance(other, Fan):
            return NotImplemented
        return (self.rank, self.rays, set(self.max_cones)) == (other.rank, other.rays, set(other.max_cones))

    def __hash__(self):
        return hash(self.digest)

    def __repr__(self):
        label = f" {self.name!r}" if self.name else ""
        return f"<Fan{label} rank={self.rank} rays={len(self.rays)} cones={len(self.max_cones)}>"

    @property
    def n_rays(self) -> int:
        return len(self.rays)

    @cached_property
    def digest(self) -> str:
        payload = json.dumps(
            {"rank": self.rank, "rays": [list(r) for r in self.rays],
             "max_cones": sorted(sorted(c) for c in self.max_cones)},
            sort_keys=True, separators=(",", ":"),
        )
        return hashlib.sha256(payload.encode()).hexdigest()[:16]

    @cached_property
    def _faces(self) -> dict[int, tuple[Cone, ...]]:
        by_dim: dict[int, set] = {d: set() for d in range(self.rank + 1)}
        for sigma in self.max_cones:
            s = sorted(sigma)
            for d in range(len(s) + 1):
                for sub in combinations(s, d):
                    by_dim[d].add(frozenset(sub))
        return {d: tuple(sorted(v, key=sorted)) for d, v in by_dim.items()}

    def cones(self, dim: int) -> tuple[Cone, ...]:
        """All cones of the given dimension, as ray-index sets."""
        return self._faces.get(dim, ())

    def f_vector(self) -> tuple[int, ...]:
        return tuple(len(self.cones(d)) for d in range(self.rank + 1))

    def is_cone(self, rays: Iterable[int]) -> bool:
        s = frozenset(rays)
        return s in self._face_set

    @cached_property
    def _face_set(self) -> frozenset:
        return frozenset(c for cs in self._faces.values() for c in cs)

    def star(self, tau: Iterable[int]) -> tuple[Cone, ...]:
        t = frozenset(tau)
        return tuple(s for s in self.max_cones if t <= s)

    def ray_matrix(self, cone: Iterable[int]) -> list[list[int]]:
        return [list(self.rays[i]) for i in sorted(cone)]

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "rank": self.rank,
            "rays": [list(r) for r in self.rays],
            "max_cones": [sorted(c) for c in self.max_cones],
        }


def _int(x) -> int:
    if isinstance(x, bool):
        raise TypeError("booleans are not lattice coordinates")
    if isinstance(x, str):
        return int(x.strip())
    if isinstance(x, float):
        if not x.is_integer():
            raise TypeError(f"non-integral coordinate {x!r}")
        return int(x)
    return int(x)


def _sign(x: int) -> int:
    return (x > 0) - (x < 0)


def build_fan(rank: int, rays: Sequence[Sequence[int]], max_cones: Sequence[Iterable[int]], name: str = "") -> Fan:
    """Validate and construct a smooth complete fan.

    Raises NonPrimitiveRay, NotSmooth, NotComplete or BadFaceStructure.
    """
    rank = int(rank)
    if rank < 0:
        raise FanError("rank must be non-negative")
    rays_t = tuple(tuple(_int(x) for x in r) for r in rays)
    cones_t = tuple(frozenset(int(i) for i in c) for c in max_cones)

    if rank == 0:
        if rays_t or any(cones_t):
            raise FanError("the rank-0 fan has no rays")
        return Fan(0, (), (frozenset(),), name)
    if not rays_t:
        raise FanError("a positive-rank fan needs rays")
    for r in rays_t:
        if len(r) != rank:
            raise FanError(f"ray {r} does not have length {rank}")
        g = 0
        for x in r:
            g = gcd(g, x)
        if g != 1:
            raise NonPrimitiveRay(f"ray {r} is not primitive")
    if len(set(rays_t)) != len(rays_t):
        raise BadFaceStructure("repeated ray")
    if not cones_t:
        raise NotComplete("no maximal cones")
    for c in cones_t:
        for i in c:
            if not 0 <= i < len(rays_t):
                raise FanError(f"cone {sorted(c)} references missing ray {i}")
    if len(set(cones_t)) != len(cones_t):
        raise BadFaceStructure("repeated maximal cone")
    for c in cones_t:
        if len(c) > rank:
            raise NotSmooth(f"cone {sorted(c)} is not simplicial")
        if len(c) < rank:
            raise NotComplete(f"maximal cone {sorted(c)} is not full-dimensional")
        d = linalg.det([rays_t[i] for i in sorted(c)])
        if d not in (1, -1):
            raise NotSmooth(f"cone {sorted(c)} has determinant {d}")
    for a, b in combinations(cones_t, 2):
        if a < b or b < a:
            raise BadFaceStructure("a maximal cone contains another")

    # Each wall must separate exactly two maximal cones.
    walls: dict[Cone, list[Cone]] = {}
    for c in cones_t:
        for i in c:
            walls.setdefault(c - {i}, []).append(c)
    for wall, owners in walls.items():
        if len(owners) == 1:
            raise NotComplete(f"wall {sorted(wall)} bounds a single maximal cone")
        if len(owners) > 2:
            raise BadFaceStructure(f"wall {sorted(wall)} lies on {len(owners)} maximal cones")
        normal = _wall_normal([rays_t[i] for i in sorted(wall)], rank)
        (x,) = owners[0] - wall
        (y,) = owners[1] - wall
        sx = _sign(sum(a * b for a, b in zip(normal, rays_t[x])))
        sy = _sign(sum(a * b for a, b in zip(normal, rays_t[y])))
        if sx * sy != -1:
            raise BadFaceStructure(f"cones {sorted(owners[0])}, {sorted(owners[1])} overlap across wall {sorted(wall)}")

    # Covering degree: an interior point of one cone must lie in no other.
    first = sorted(cones_t, key=sorted)[0]
    point = [sum(rays_t[i][k] for i in first) for k in range(rank)]
    hits = sum(1 for c in cones_t if _in_cone(rays_t, c, point))
    if hits != 1:
        raise BadFaceStructure(f"maximal cones cover the space {hits} times")

    cones_sorted = tuple(sorted(cones_t, key=sorted))
    return Fan(rank, rays_t, cones_sorted, name)


def _wall_normal(wall_rays: list[Ray], rank: int) -> list[int]:
    if not wall_rays:
        return [1] + [0] * (rank - 1)
    basis = linalg.nullspace(wall_rays)
    if len(basis) != 1:
        raise BadFaceStructure("degenerate wall")
    return basis[0]


def _in_cone(rays: Sequence[Ray], cone: Cone, point: Sequence[int]) -> bool:
    idx = sorted(cone)
    # point = sum c_i ray_i  <=>  U^T c = point
    cols = [[rays[i][k] for i in idx] for k in range(len(point))]
    coeffs = linalg.solve_unimodular(cols, point)
    return all(c >= 0 for c in coeffs)


def point_fan() -> Fan:
    return build_fan(0, [], [[]], name="point")


def fan_from_json(doc: dict | str) -> Fan:
    if isinstance(doc, str):
        doc = json.loads(doc)
    return build_fan(doc["rank"], doc["rays"], doc["max_cones"], name=doc.get("name", ""))


def product_fan(f1: Fan, f2: Fan) -> Fan:
    z1, z2 = (0,) * f1.rank, (0,) * f2.rank
    rays = [r + z2 for r in f1.rays] + [z1 + r for r in f2.rays]
    shift = len(f1.rays)
    cones = [set(a) | {j + shift for j in b} for a in f1.max_cones for b in f2.max_cones]
    name = f"{f1.name}x{f2.name}" if f1.name and f2.name else ""
    return build_fan(f1.rank + f2.rank, rays, cones, name=name)


def projectivized_split_bundle_fan(base: Fan, twist, name: str = "") -> Fan:
    """Fan of P(O + O(D)) over the toric variety of ``base``.

    ``twist`` is a ToricDivisor on ``base`` (or a coefficient sequence).  Base
    rays are lifted by the divisor coefficients; the two fibre rays are the
    last two rays, ``(0,...,0,1)`` then ``(0,...,0,-1)``.
    """
    coeffs = twist.coeffs if hasattr(twist, "coeffs") else tuple(int(a) for a in twist)
    if len(coeffs) != len(base.rays):
        raise FanError("twist does not match the base fan")
    n = base.rank
    rays = [r + (a,) for r, a in zip(base.rays, coeffs)]
    up = len(rays)
    rays += [(0,) * n + (1,), (0,) * n + (-1,)]
    cones = [set(s) | {up + e} for s in base.max_cones for e in (0, 1)]
    return build_fan(n + 1, rays, cones, name=name)


@dataclass(frozen=True, eq=False)
class OrbitClosure:
    parent: Fan
    cone: Cone
    quotient_fan: Fan
    ray_map: dict = field(default_factory=dict)
    projection: tuple = ()

    @property
    def dim(self) -> int:
        return self.quotient_fan.rank

    def __repr__(self):
        return f"<OrbitClosure cone={sorted(self.cone)} dim={self.dim}>"


def orbit_closure(fan: Fan, tau: Iterable[int]) -> OrbitClosure:
    tau = frozenset(tau)
    if not fan.is_cone(tau):
        raise FanError(f"{sorted(tau)} is not a cone of the fan")
    if not tau:
        ident = tuple(tuple(int(i == j) for j in range(fan.rank)) for i in range(fan.rank))
        return OrbitClosure(fan, tau, fan, {i: i for i in range(len(fan.rays))}, ident)
    star = fan.star(tau)
    sigma = sorted(star[0])
    # Coordinates in the basis given by sigma's rays; drop the tau part.
    cols = [[fan.rays[i][k] for i in sigma] for k in range(fan.rank)]
    inv = linalg.inverse_unimodular(cols)
    keep = [pos for pos, i in enumerate(sigma) if i not in tau]
    proj = tuple(tuple(inv[pos]) for pos in keep)

    def image(v):
        return tuple(sum(a * b for a, b in zip(row, v)) for row in proj)

    adjacent = sorted({i for s in star for i in s} - tau)
    ray_map = {i: k for k, i in enumerate(adjacent)}
    q_rays = [image(fan.rays[i]) for i in adjacent]
    q_cones = [[ray_map[i] for i in s - tau] for s in star]
    if len(keep) == 0:
        q = point_fan()
    else:
        q = build_fan(len(keep), q_rays, q_cones)
    return OrbitClosure(fan, tau, q, ray_map, proj)


def orbit_closures(fan: Fan, d: int) -> list[OrbitClosure]:
    """Torus-invariant subvarieties of dimension ``d`` (one per cone of dim n-d)."""
    if not 0 < d <= fan.rank:
        raise ValueError(f"dimension {d} outside 1..{fan.rank}")
    return [orbit_closure(fan, tau) for tau in fan.cones(fan.rank - d)]
