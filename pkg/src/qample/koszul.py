"""Section rings of toric polarizations, Koszul spaces and N-Koszul certificates.

The homogeneous coordinate ring of an ample toric divisor H has A_j spanned by
the lattice points of j P_H, and multiplication is addition of points.  Every
basis is ordered lexicographically, so all matrices below are reproducible.

``B_m`` lives inside ``A_1^{(x) m}``: it is the kernel of
``B_{m-1} (x) A_1 -> A_1^{(x) m-2} (x) A_2`` (multiply the last two factors).
``certify_N_koszul`` builds the minimal graded free resolution of k degree by
degree, an independent route to ``dim B_m = dim Tor_m(k, k)_m``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import linalg
from .divisors import is_ample, polytope_vertices
from .lattice import Fan


class NotAmple(ValueError):
    pass


class WindowTooSmall(ValueError):
    pass


CERTIFIED = "CERTIFIED_IN_WINDOW"
FAILED = "FAILED"
ASSERTED = "ASSERTED"


# --- graded rings of lattice points ----------------------------------------

@dataclass(eq=False)
class GradedRing:
    """Truncated semigroup ring of the cone over a rational polytope.

    ``points[j]`` lists the lattice points of ``j P`` in lexicographic order.
    """

    rays: tuple
    rhs: tuple                      # P = {m : <m, u_i> >= -rhs_i}
    J: int
    points: list = field(default_factory=list)
    label: str = ""

    def __post_init__(self):
        if not self.points:
            self.points = [_dilate_points(self.rays, self.rhs, j) for j in range(self.J + 1)]
        self._index = [{pt: k for k, pt in enumerate(pts)} for pts in self.points]
        if self.dims[0] != 1:
            raise ValueError("A_0 must be one-dimensional")

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(len(p) for p in self.points)

    def index(self, j: int, pt) -> int:
        return self._index[j][pt]

    def check_degree(self, j: int) -> None:
        if j > self.J:
            raise WindowTooSmall(f"ring truncated at degree {self.J}, degree {j} requested")

    @lru_cache(maxsize=None)
    def mult_table(self, i: int, j: int) -> np.ndarray:
        """Array T[a, b] = index of point_a + point_b in A_{i+j}."""
        self.check_degree(i + j)
        idx = self._index[i + j]
        T = np.empty((len(self.points[i]), len(self.points[j])), dtype=np.int64)
        for a, pa in enumerate(self.points[i]):
            for b, pb in enumerate(self.points[j]):
                T[a, b] = idx[tuple(x + y for x, y in zip(pa, pb))]
        return T

    def mult_matrix(self, i: int, j: int) -> np.ndarray:
        """The 0/1 matrix of A_i (x) A_j -> A_{i+j}; rows indexed by (a, b) row-major."""
        T = self.mult_table(i, j)
        M = np.zeros((T.size, self.dims[i + j]), dtype=np.int64)
        M[np.arange(T.size), T.ravel()] = 1
        return M

    def generation_failures(self) -> list[int]:
        """Degrees j+1 <= J where A_1 * A_j misses part of A_{j+1}."""
        bad = []
        for j in range(1, self.J):
            hit = set(self.mult_table(1, j).ravel().tolist())
            if len(hit) != self.dims[j + 1]:
                bad.append(j + 1)
        return bad

    @property
    def degree_one_generated(self) -> bool:
        return not self.generation_failures()


def _dilate_points(rays, rhs, j: int) -> list[tuple[int, ...]]:
    n = len(rays[0])
    if n == 0:
        return [()]
    verts = polytope_vertices(_RayHolder(rays, n), [Fraction(b) * j for b in rhs])
    if not verts:
        return []
    lo = [math.floor(min(v[k] for v in verts)) for k in range(n)]
    hi = [math.ceil(max(v[k] for v in verts)) for k in range(n)]
    grids = np.meshgrid(*[np.arange(a, b + 1) for a, b in zip(lo, hi)], indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    keep = np.ones(len(pts), dtype=bool)
    for u, b in zip(rays, rhs):
        b = Fraction(b) * j
        # <m,u> >= -b  <=>  den * <m,u> >= -num
        keep &= pts @ np.array(u) * b.denominator >= -b.numerator
    return sorted(tuple(int(x) for x in p) for p in pts[keep])


@dataclass(frozen=True)
class _RayHolder:
    rays: tuple
    rank: int


def ring_from_polytope(rays: Sequence[Sequence[int]], rhs: Sequence, J: int, label: str = "") -> GradedRing:
    """Ring of the rational polytope ``{m : <m, u_i> >= -rhs_i}``, truncated at degree J."""
    return GradedRing(tuple(tuple(u) for u in rays), tuple(Fraction(b) for b in rhs), int(J), label=label)


def section_ring(geometry, H=None, J: int = 4) -> GradedRing:
    """A = (+)_j H^0(X, O(jH)) for j <= J, with ampleness verified on the way."""
    H = geometry.polarization if H is None else H
    if not getattr(geometry, "is_toric", False):
        raise NotAmple("section rings are built for toric geometries only")
    if not is_ample(H):
        raise NotAmple(f"{H!r} is not ample")
    for j in range(1, J + 1):
        table = geometry.cohomology(H * j)
        if any(table.dims[1:]):
            raise NotAmple(f"h^i({j}H) = {table.dims} has higher cohomology")
    A = ring_from_polytope(geometry.fan.rays, H.coeffs, J, label=f"{geometry.name}:{list(H.coeffs)}")
    for j in range(J + 1):
        h0 = geometry.h(H * j, 0)
        if h0 != A.dims[j]:
            raise AssertionError(f"lattice points of {j}P ({A.dims[j]}) disagree with h^0 = {h0}")
    return A


# --- Koszul spaces B_m ------------------------------------------------------

@dataclass
class KoszulSpaces:
    """``ambient[m]``: basis of B_m as rows in A_1^{(x) m};
    ``coeffs[m]``: the same basis as rows in B_{m-1} (x) A_1."""

    ring: GradedRing
    ambient: list
    coeffs: list

    @property
    def N(self) -> int:
        return len(self.ambient) - 1

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(len(b) for b in self.ambient)


def _as_int_array(rows, ncols: int) -> np.ndarray:
    arr = np.array(rows, dtype=np.int64).reshape(len(rows), ncols)
    if arr.size and np.abs(arr).max() > 2**40:
        raise OverflowError("basis entries too large for the int64 fast path")
    return arr


def koszul_spaces(A: GradedRing, N: int, p: int | None = None) -> KoszulSpaces:
    if N + 1 > A.J:
        raise WindowTooSmall(f"B_{N} needs the ring up to degree {N + 1}; truncation is {A.J}")
    n1, n2 = A.dims[1], A.dims[2]
    T = A.mult_table(1, 1)
    ambient = [np.ones((1, 1), dtype=np.int64), np.eye(n1, dtype=np.int64)]
    coeffs = [np.ones((1, 1), dtype=np.int64), np.eye(n1, dtype=np.int64)]
    for m in range(2, N + 1):
        prev = ambient[m - 1]                      # b x n1^(m-1)
        b = prev.shape[0]
        pre = n1 ** (m - 2)
        P = prev.reshape(b, pre, n1)
        # image of (beta (x) e) under multiplication of the last two factors
        img = np.zeros((b, n1, pre, n2), dtype=np.int64)
        for last in range(n1):
            for e in range(n1):
                img[:, e, :, T[last, e]] += P[:, :, last]
        rows = img.reshape(b * n1, pre * n2)
        ker = linalg.left_kernel(rows, b * n1, p) if b else []
        C = _as_int_array(ker, b * n1) if ker else np.zeros((0, b * n1), dtype=np.int64)
        # ambient vector of sum c[beta, e] beta (x) e
        amb = np.einsum("kbe,bx->kxe", C.reshape(-1, b, n1), prev).reshape(len(C), n1 ** m)
        coeffs.append(C)
        ambient.append(amb)
    return KoszulSpaces(A, ambient, coeffs)


def _kernel_rm(A: GradedRing, B: KoszulSpaces, m: int, j: int, p: int | None = None):
    """(basis rows of K_m(j) inside B_m (x) A_j as coefficient rows, their ambient rows)."""
    nj = A.dims[j]
    if m == 0:
        return np.eye(nj, dtype=np.int64)
    A.check_degree(j + 1)
    n1 = A.dims[1]
    C = B.coeffs[m].reshape(-1, B.dims[m - 1], n1)      # bm x b(m-1) x n1
    bm, bprev = C.shape[0], C.shape[1]
    if bm == 0:
        return np.zeros((0, 0), dtype=np.int64)
    T = A.mult_table(1, j)
    nj1 = A.dims[j + 1]
    img = np.zeros((bm, nj, bprev, nj1), dtype=np.int64)
    for e in range(n1):
        for x in range(nj):
            img[:, x, :, T[e, x]] += C[:, :, e]
    rows = img.reshape(bm * nj, bprev * nj1)
    ker = linalg.left_kernel(rows, bm * nj, p)
    return _as_int_array(ker, bm * nj) if ker else np.zeros((0, bm * nj), dtype=np.int64)


def rm_section_dims(A: GradedRing, B: KoszulSpaces, m: int, j: int, p: int | None = None) -> int:
    """dim ker(B_m (x) A_j -> B_{m-1} (x) A_{j+1}) = h^0(R_m(j))."""
    if m > B.N:
        raise WindowTooSmall(f"B_{m} not computed (N = {B.N})")
    A.check_degree(j)
    if m == 0:
        return A.dims[j]
    return int(_kernel_rm(A, B, m, j, p).shape[0])


def _kernel_ambient(A: GradedRing, B: KoszulSpaces, m: int, j: int, p=None) -> np.ndarray:
    """K_m(j) as rows in A_1^{(x) m} (x) A_j."""
    K = _kernel_rm(A, B, m, j, p)
    if m == 0:
        return K
    nj = A.dims[j]
    bm = B.dims[m]
    # K rows are coefficients over (B_m basis, A_j basis)
    amb = np.einsum("kbx,ba->kax", K.reshape(-1, bm, nj), B.ambient[m])
    return amb.reshape(len(K), A.dims[1] ** m * nj)


@dataclass
class SequenceReport:
    j: int
    l: int
    N: int
    terms: list          # (label, dimension) from left to right, ending with A_{j+l}
    homology: list       # homology dims at the checked positions, same order
    positions: list      # labels of the checked positions

    @property
    def exact(self) -> bool:
        return all(h == 0 for h in self.homology)

    def to_json(self) -> dict:
        return {"j": self.j, "l": self.l, "N": self.N, "exact": self.exact,
                "terms": [[t, d] for t, d in self.terms],
                "homology": dict(zip(self.positions, self.homology))}


def verify_sequence4(A: GradedRing, B: KoszulSpaces, j: int, l: int, p: int | None = None) -> SequenceReport:
    """Homology of A_{l-N+1}(x)K_{N-1}(j) -> ... -> A_l (x) A_j -> A_{j+l} -> 0.

    ``K_m(j) = ker(B_m (x) A_j -> B_{m-1} (x) A_{j+1})`` and the maps send
    ``a (x) (e_1 (x) ... (x) e_m (x) x)`` to ``a e_1 (x) (e_2 (x) ... (x) x)``.
    Homology is reported at A_{j+l} and at the terms m = 0 .. N-2; the
    leftmost term only feeds the image.
    """
    if j < 0 or l < 0:
        raise ValueError("j and l must be non-negative")
    N = B.N
    if N < 1:
        raise WindowTooSmall("need B_1 at least")
    A.check_degree(j + l + 1)
    n1 = A.dims[1]
    top = min(N - 1, l)
    K = [_kernel_ambient(A, B, m, j, p) for m in range(top + 1)]
    dims = [A.dims[l - m] * K[m].shape[0] for m in range(top + 1)]

    # d_0: A_l (x) A_j -> A_{j+l}
    maps = {0: A.mult_matrix(l, j)}
    for m in range(1, top + 1):
        a_deg = l - m
        Km = K[m]
        rest = n1 ** (m - 1) * A.dims[j]
        Kr = Km.reshape(len(Km), n1, rest)
        T = A.mult_table(a_deg, 1)
        tgt = A.dims[a_deg + 1]
        out = np.zeros((A.dims[a_deg], len(Km), tgt, rest), dtype=np.int64)
        for a in range(A.dims[a_deg]):
            for e in range(n1):
                out[a, :, T[a, e], :] += Kr[:, e, :]
        # target of d_m is expressed in ambient coordinates of A_{l-m+1} (x) K_{m-1}(j)
        maps[m] = out.reshape(A.dims[a_deg] * len(Km), tgt * rest)
    # Ranks of the maps into the ambient tensor spaces equal ranks into the subspaces.
    rk = {m: linalg.rank(M, p) if M.size else 0 for m, M in maps.items()}
    positions, hom = [], []
    coker = A.dims[j + l] - rk[0]
    positions.append(f"A_{j + l}")
    hom.append(coker)
    for m in range(min(N - 2, top) + 1):
        h = dims[m] - rk[m] - rk.get(m + 1, 0)
        positions.append(f"A_{l - m}(x)K_{m}")
        hom.append(h)
    terms = [(f"A_{l - m}(x)K_{m}", dims[m]) for m in range(top, -1, -1)] + [(f"A_{j + l}", A.dims[j + l])]
    return SequenceReport(j, l, N, terms, hom[::-1], positions[::-1])


# --- minimal resolution of k ------------------------------------------------

@dataclass
class KoszulCertificate:
    N: int
    window: int
    status: str
    failure: tuple | None            # (i, j, dim) for FAILED
    tor_dims: dict                   # i -> list of dim Tor_i(k,k)_t for t = 0..window
    coefficient_field: str = "Q"
    flags: list = field(default_factory=list)

    @property
    def certified(self) -> bool:
        return self.status == CERTIFIED

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "window": self.window,
            "status": self.status if self.failure is None else f"{FAILED}({self.failure[0]},{self.failure[1]},{self.failure[2]})",
            "failure": list(self.failure) if self.failure else None,
            "field": self.coefficient_field,
            "flags": list(self.flags),
            "tor_dims": {str(i): list(v) for i, v in sorted(self.tor_dims.items())},
        }


def _resolution(A: GradedRing, N: int, window: int, p: int | None) -> dict[int, list[int]]:
    """Generator degrees of a minimal resolution F_i, i <= N, in internal degrees <= window."""
    # gens[i]: list of (degree, sparse boundary {(h, y): c}) for generators of F_i, i >= 1.
    gens: dict[int, list] = {i: [] for i in range(1, N + 1)}

    def layout(i: int, t: int):
        """Blocks of (F_i)_t: list of (generator, offset, degree)."""
        if i == 0:
            return [(None, 0, 0)] if t >= 0 else []
        out, off = [], 0
        for g, (d, _) in enumerate(gens[i]):
            if d <= t:
                out.append((g, off, d))
                off += A.dims[t - d]
        return out

    def size(i: int, t: int) -> int:
        return sum(A.dims[t - d] for _, _, d in layout(i, t))

    def boundary(i: int, t: int) -> np.ndarray:
        """Matrix of (F_i)_t -> (F_{i-1})_t (rows = source basis)."""
        src = layout(i, t)
        tgt = {g: (off, d) for g, off, d in layout(i - 1, t)}
        M = np.zeros((size(i, t), size(i - 1, t)), dtype=np.int64)
        for g, off, d in src:
            _, dg = gens[i][g]
            for (h, y), c in dg.items():
                h_off, h_deg = tgt[h]
                T = A.mult_table(t - d, d - h_deg)
                M[off + np.arange(A.dims[t - d]), h_off + T[:, y]] += c
        return M

    for t in range(1, window + 1):
        for i in range(1, N + 1):
            if i == 1:
                Z = np.eye(A.dims[t], dtype=np.int64)
            else:
                D = boundary(i - 1, t)
                if D.shape[0] == 0:
                    continue
                ker = linalg.left_kernel(D, D.shape[0], p)
                if not ker:
                    continue
                Z = _as_int_array(ker, D.shape[0])
            I = boundary(i, t) if layout(i, t) else np.zeros((0, Z.shape[1]), dtype=np.int64)
            stacked = np.vstack([I, Z]) if len(I) else Z
            piv = linalg.pivot_rows(stacked, p)
            new = [r - len(I) for r in piv if r >= len(I)]
            blocks = layout(i - 1, t)
            for r in new:
                vec = Z[r]
                sparse = {}
                for g, off, d in blocks:
                    seg = vec[off: off + A.dims[t - d]]
                    for y in np.nonzero(seg)[0]:
                        sparse[(g, int(y))] = int(seg[y]) if p is None else int(seg[y]) % p
                gens[i].append((t, sparse))
    tor = {0: [1] + [0] * window}
    for i in range(1, N + 1):
        row = [0] * (window + 1)
        for d, _ in gens[i]:
            row[d] += 1
        tor[i] = row
    return tor


def _first_failure(tor: dict, N: int, window: int):
    for i in range(0, N + 1):
        for t in range(window + 1):
            if t != i and tor[i][t]:
                return (i, t, tor[i][t])
    return None


def certify_N_koszul(A: GradedRing, N: int, window: int | None = None, p: int | None = None) -> KoszulCertificate:
    """Check that Tor_i^A(k,k)_j = 0 for i <= N, j <= window, j != i.

    With a prime ``p`` the resolution is computed over F_p; a FAILED verdict
    is always re-derived over Q before it is reported.
    """
    window = 2 * N if window is None else int(window)
    if window < N:
        raise WindowTooSmall("the window must reach the internal degree N")
    if A.J < window:
        raise WindowTooSmall(f"ring truncated at degree {A.J} < window {window}")
    flags = [f"not generated in degree 1 (degree {d})" for d in A.generation_failures()]
    tor = _resolution(A, N, window, p)
    fail = _first_failure(tor, N, window)
    fieldname = "Q" if p is None else f"F_{p}"
    if fail is not None and p is not None:
        tor = _resolution(A, N, window, None)
        fail = _first_failure(tor, N, window)
        fieldname = f"F_{p}, FAILED confirmed over Q" if fail else f"Q (F_{p} verdict overturned)"
    status = CERTIFIED if fail is None else FAILED
    return KoszulCertificate(N, window, status, fail, tor, fieldname, flags)


@lru_cache(maxsize=None)
def _polarization_status(fan: Fan, coeffs: tuple, N: int, budget: int) -> str:
    rays = fan.rays
    A = ring_from_polytope(rays, coeffs, 2 * N)
    if A.dims[-1] * A.dims[N] > budget:
        return ASSERTED
    cert = certify_N_koszul(A, N)
    return cert.status if cert.failure is None else f"{FAILED}{cert.failure}"


def polarization_status(geometry, budget: int = 2500) -> str:
    """Koszul status of the polarization at N = 2 dim X: certified when affordable.

    ``budget`` bounds dim A_{2N} * dim A_N, a proxy for the largest matrix in
    the resolution; beyond it the status is ASSERTED.
    """
    if not getattr(geometry, "is_toric", False):
        return ASSERTED
    H = geometry.polarization
    return _polarization_status(geometry.fan, H.coeffs, 2 * geometry.dim, budget)


__all__ = [
    "ASSERTED", "CERTIFIED", "FAILED", "GradedRing", "KoszulCertificate", "KoszulSpaces", "NotAmple",
    "SequenceReport", "WindowTooSmall", "certify_N_koszul", "koszul_spaces", "polarization_status",
    "ring_from_polytope", "rm_section_dims", "section_ring", "verify_sequence4",
]
