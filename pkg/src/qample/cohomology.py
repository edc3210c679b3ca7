"""Line-bundle cohomology on smooth complete toric varieties.

For a divisor D = sum a_rho D_rho and a weight m, let V(D, m) be the
subcomplex of the fan's simplicial complex induced on the rays with
<m, u_rho> < -a_rho.  Then m contributes dim H~^{i-1}(V(D, m)) to h^i(D),
with H~^{-1}(empty) one-dimensional.  Weights are grouped by that ray set,
so each fan needs one table of reduced Betti numbers (indexed by bitmask) and
the weight sum reduces to counting lattice points.  Counting runs over the
first n-1 coordinates with numpy; along the last coordinate each ray
condition flips once, so a line of weights splits into at most r+1 segments
of constant ray set.
"""

from __future__ import annotations

import logging
import threading
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from math import factorial
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import linalg
from .divisors import ToricDivisor, canonical_divisor, cartier_data
from .lattice import Fan

log = logging.getLogger(__name__)

MAX_GRID_POINTS = 4_000_000
MAX_RAYS = 16


class RegionOverflow(RuntimeError):
    pass


class RegionGuardError(AssertionError):
    """A weight on the outer shell of the search box contributed cohomology."""


class SearchBoundExceeded(RuntimeError):
    pass


class UnsupportedTwist(ValueError):
    pass


@dataclass(frozen=True)
class CohomologyTable:
    divisor: object
    char_label: int
    dims: tuple[int, ...]
    per_weight: dict | None = field(default=None, compare=False, repr=False)
    torsion: bool = False
    rational_dims: tuple[int, ...] | None = None

    def __getitem__(self, i: int) -> int:
        return self.dims[i]

    @property
    def euler_characteristic(self) -> int:
        return sum((-1) ** i * h for i, h in enumerate(self.dims))

    def to_json(self) -> dict:
        doc = {"char": self.char_label, "dims": list(self.dims)}
        if self.torsion:
            doc["flag"] = "TORSION"
            doc["rational_dims"] = list(self.rational_dims)
        return doc


# --- reduced Betti numbers of induced subcomplexes -------------------------

@dataclass(frozen=True)
class BettiTable:
    table: np.ndarray          # shape (2^r, n+1): entry [S, i] = dim H~^{i-1}(V_S)
    torsion_masks: frozenset   # masks where F_p and Q ranks disagree


def _reduced_betti(fan: Fan, subset: Sequence[int], p: int | None) -> list[int]:
    """dim H~^{k}(V_S) for k = -1 .. n-1 (as list index k+1)."""
    n = fan.rank
    s = frozenset(subset)
    faces = {-1: [frozenset()]}
    for k in range(n):
        faces[k] = [c for c in fan.cones(k + 1) if c <= s]
    index = {k: {f: j for j, f in enumerate(faces[k])} for k in faces}
    dims = [len(faces[k]) for k in range(-1, n)]
    boundaries = []
    for k in range(0, n):
        # boundary C_k -> C_{k-1} of the augmented chain complex
        rows = len(faces[k - 1])
        cols = len(faces[k])
        M = [[0] * cols for _ in range(rows)]
        for j, f in enumerate(faces[k]):
            fs = sorted(f)
            for pos, v in enumerate(fs):
                g = f - {v}
                M[index[k - 1][g]][j] = (-1) ** pos
        boundaries.append(M)
    # homology_dims works with C_0 <- C_1 <- ...; shift so C_0 is the empty face.
    return linalg.homology_dims(boundaries, dims, p)


@lru_cache(maxsize=None)
def betti_table(fan: Fan, p: int | None = None) -> BettiTable:
    r = len(fan.rays)
    if r > MAX_RAYS:
        raise RegionOverflow(f"{r} rays exceed the supported {MAX_RAYS}")
    n = fan.rank
    table = np.zeros((1 << r, n + 1), dtype=np.int64)
    torsion = set()
    for mask in range(1 << r):
        subset = [i for i in range(r) if mask >> i & 1]
        b = _reduced_betti(fan, subset, p)
        table[mask, :] = b
        if p is not None:
            b0 = _reduced_betti(fan, subset, None)
            if b0 != b:
                torsion.add(mask)
    bt = BettiTable(table, frozenset(torsion))
    _check_alexander(fan, bt)
    return bt


def _check_alexander(fan: Fan, bt: BettiTable) -> None:
    """H~^{i-1}(V_S) = H~^{n-i-1}(V_{complement}): Serre duality, weight by weight."""
    r, n = len(fan.rays), fan.rank
    full = (1 << r) - 1
    t = bt.table
    for mask in range(1 << r):
        comp = full ^ mask
        if not all(t[mask, i] == t[comp, n - i] for i in range(n + 1)):
            raise AssertionError(f"duality fails on ray set {mask:b} of {fan!r}")


def char_prime(char_label: int) -> int | None:
    if char_label == 0:
        return None
    if char_label < 2 or any(char_label % d == 0 for d in range(2, int(char_label ** 0.5) + 1)):
        raise ValueError(f"characteristic must be 0 or a prime, got {char_label}")
    return char_label


# --- weight sums ----------------------------------------------------------

def weight_box(D: ToricDivisor) -> tuple[np.ndarray, np.ndarray]:
    """Bounding box of the Cartier data, widened by one in every direction."""
    data = np.array([m for m in cartier_data(D).values()], dtype=np.int64)
    return data.min(axis=0) - 1, data.max(axis=0) + 1


def _segment_sums(fan: Fan, coeffs, table: np.ndarray, lo, hi):
    """Per-row contributions for rows of the (n-1)-dim grid, t over [lo_n, hi_n].

    Returns (grid, rows) where rows[k] is the (n+1)-vector summed along t.
    """
    n = fan.rank
    U = np.array(fan.rays, dtype=np.int64)
    a = np.array(coeffs, dtype=np.int64)
    axes = [np.arange(lo[k], hi[k] + 1, dtype=np.int64) for k in range(n - 1)]
    if axes:
        mesh = np.meshgrid(*axes, indexing="ij")
        grid = np.stack([g.ravel() for g in mesh], axis=1)
    else:
        grid = np.zeros((1, 0), dtype=np.int64)
    if grid.shape[0] > MAX_GRID_POINTS:
        raise RegionOverflow(f"weight grid of {grid.shape[0]} lines exceeds {MAX_GRID_POINTS}")
    base = grid @ U[:, : n - 1].T + a          # (P, r)
    un = U[:, n - 1]
    tlo, thi = int(lo[n - 1]), int(hi[n - 1])
    brk = []
    for j, u in enumerate(un):
        if u > 0:
            brk.append(np.floor_divide(-base[:, j] - 1, u) + 1)
        elif u < 0:
            brk.append(np.floor_divide(base[:, j], -u) + 1)
    P = grid.shape[0]
    pts = [np.full(P, tlo, dtype=np.int64), np.full(P, thi + 1, dtype=np.int64)]
    pts += [np.clip(b, tlo, thi + 1) for b in brk]
    B = np.sort(np.stack(pts, axis=1), axis=1)
    starts, lengths = B[:, :-1], np.diff(B, axis=1)
    weights = (1 << np.arange(len(un), dtype=np.int64))
    rows = np.zeros((P, n + 1), dtype=np.int64)
    for k in range(starts.shape[1]):
        t = starts[:, k]
        neg = (base + t[:, None] * un[None, :]) < 0
        mask = neg @ weights
        rows += table[mask] * lengths[:, k, None]
    return grid, rows


def _point_contrib(fan: Fan, coeffs, table, weights_arr: np.ndarray) -> np.ndarray:
    U = np.array(fan.rays, dtype=np.int64)
    a = np.array(coeffs, dtype=np.int64)
    neg = (weights_arr @ U.T + a) < 0
    mask = neg @ (1 << np.arange(len(fan.rays), dtype=np.int64))
    return table[mask]


def _weight_sum(fan: Fan, coeffs, table: np.ndarray, lo, hi) -> tuple[np.ndarray, np.ndarray]:
    """Total over the box and the part coming from its outer shell."""
    n = fan.rank
    grid, rows = _segment_sums(fan, coeffs, table, lo, hi)
    total = rows.sum(axis=0)
    if n == 1:
        on_shell = np.zeros(1, dtype=bool)
    else:
        on_shell = np.any((grid == lo[: n - 1]) | (grid == hi[: n - 1]), axis=1)
    shell = rows[on_shell].sum(axis=0)
    inner = grid[~on_shell]
    for t in (lo[n - 1], hi[n - 1]):
        pts = np.concatenate([inner, np.full((inner.shape[0], 1), t, dtype=np.int64)], axis=1)
        shell = shell + _point_contrib(fan, coeffs, table, pts).sum(axis=0)
    return total, shell


def _per_weight(fan: Fan, coeffs, table, lo, hi) -> dict:
    axes = [np.arange(lo[k], hi[k] + 1, dtype=np.int64) for k in range(fan.rank)]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([g.ravel() for g in mesh], axis=1)
    contrib = _point_contrib(fan, coeffs, table, pts)
    out = {}
    for m, c in zip(pts, contrib):
        nz = [(i, int(v)) for i, v in enumerate(c) if v]
        if nz:
            out[tuple(int(x) for x in m)] = nz
    return out


def cohomology(fan: Fan, D: ToricDivisor, char_label: int = 0, per_weight: bool = False) -> CohomologyTable:
    """(h^0, ..., h^n) of O(D) over a field of characteristic ``char_label``."""
    if D.fan is not fan and D.fan != fan:
        raise ValueError("divisor is not on this fan")
    p = char_prime(char_label)
    n = fan.rank
    if n == 0:
        return CohomologyTable(D, char_label, (1,))
    bt = betti_table(fan, p)
    lo, hi = weight_box(D)
    total, shell = _weight_sum(fan, D.coeffs, bt.table, lo, hi)
    if shell.any():
        raise RegionGuardError(f"shell weights contribute {shell.tolist()} for {D!r}")
    dims = tuple(int(x) for x in total)
    pw = _per_weight(fan, D.coeffs, bt.table, lo, hi) if per_weight else None
    torsion, rdims = False, None
    if p is not None and bt.torsion_masks:
        rt = betti_table(fan, None)
        rtotal, _ = _weight_sum(fan, D.coeffs, rt.table, lo, hi)
        rdims = tuple(int(x) for x in rtotal)
        torsion = rdims != dims
    return CohomologyTable(D, char_label, dims, pw, torsion, rdims if torsion else None)


def serre_dual(D: ToricDivisor) -> ToricDivisor:
    return canonical_divisor(D.fan) - D


def check_serre(table: CohomologyTable, dual: CohomologyTable) -> bool:
    n = len(table.dims) - 1
    return all(table.dims[i] == dual.dims[n - i] for i in range(n + 1))


# --- independent oracles ---------------------------------------------------

def p1_cohomology(d: int) -> tuple[int, int]:
    return (d + 1, 0) if d >= 0 else (0, max(0, -d - 1))


def kunneth(t1: Sequence[int], t2: Sequence[int]) -> tuple[int, ...]:
    out = [0] * (len(t1) + len(t2) - 1)
    for r, x in enumerate(t1):
        for s, y in enumerate(t2):
            out[r + s] += x * y
    return tuple(out)


def kunneth_oracle(f1: Fan, D1: ToricDivisor, f2: Fan, D2: ToricDivisor, char_label: int = 0) -> CohomologyTable:
    """Cohomology of D1 [x] D2 on the product, from the factors' tables."""
    from .lattice import product_fan

    t1 = cohomology(f1, D1, char_label).dims
    t2 = cohomology(f2, D2, char_label).dims
    prod = product_fan(f1, f2)
    D = ToricDivisor(prod, D1.coeffs + D2.coeffs)
    return CohomologyTable(D, char_label, kunneth(t1, t2))


def p1xp1_table(a: int, b: int) -> tuple[int, int, int]:
    """Closed-form O(a, b) on P^1 x P^1."""
    return kunneth(p1_cohomology(a), p1_cohomology(b))


def split_bundle_oracle(a: int, b: int, c: int) -> tuple[int, int, int, int]:
    """h^i of pi^*O(a,b) (x) O_{P(E)}(c) on P(O + O(1,-1)) over P^1 x P^1, for c > 0.

    The pushforward of O_{P(E)}(c) is the direct sum of O(j, -j), j = 0..c,
    with no higher direct images.
    """
    if c <= 0:
        raise UnsupportedTwist(f"pushforward formula needs c > 0, got {c}")
    out = [0, 0, 0]
    for j in range(c + 1):
        t = p1xp1_table(a + j, b - j)
        out = [x + y for x, y in zip(out, t)]
    return (*out, 0)


# --- regularity and asymptotic cohomology ---------------------------------

def regularity(geometry, D, H=None, window: tuple[int, int] | None = None) -> int:
    """Least m with h^i(D + (m - i) H) = 0 for every i > 0.

    The defining condition is monotone in m (it passes from m to m + 1), so
    the scan returns the first m in the window where it holds, after
    confirming it still holds at the top of the window.
    """
    H = geometry.polarization if H is None else H
    n = geometry.dim

    def ok(m: int) -> bool:
        return all(geometry.h(D + H * (m - i), i) == 0 for i in range(1, n + 1))

    if window is None:
        amax = geometry.coefficient_size(D)
        span = (n + 1) * amax + n
        window = (-span, span)
    lo, hi = window
    first = next((m for m in range(lo, hi + 1) if ok(m)), None)
    if first is None:
        raise SearchBoundExceeded(f"regularity not reached in window {window}")
    if first == lo:
        raise SearchBoundExceeded(f"condition already holds at the window floor {lo}; widen the window")
    if not ok(hi):
        raise AssertionError("regularity condition failed to propagate upward")
    return first


@dataclass(frozen=True)
class AsymptoticEstimate:
    degree: int
    estimate: Fraction          # max over the top half of n-th finite differences
    ratio_max: Fraction         # max over the top half of h^i(mD) n!/m^n
    sequence: tuple[int, ...]   # h^i(mD) for m = 1..m_max


def asymptotic_h(geometry, D, i: int, m_max: int) -> AsymptoticEstimate:
    """Estimate limsup h^i(mD) / (m^n / n!).

    ``ratio_max`` is the raw normalized ratio; ``estimate`` uses n-th
    differences, which equal n! times the leading coefficient exactly once
    h^i(mD) is polynomial in m.
    """
    if m_max < 4:
        raise ValueError("m_max must be at least 4")
    n = geometry.dim
    seq = tuple(geometry.h(D * m, i) for m in range(1, m_max + 1))
    half = max(1, m_max // 2)
    ratios = [Fraction(seq[m - 1] * factorial(n), m ** n) for m in range(half, m_max + 1)]
    diffs = []
    for m in range(max(1, half - n), m_max - n + 1):
        acc = 0
        for k in range(n + 1):
            acc += (-1) ** (n - k) * _binom(n, k) * seq[m - 1 + k]
        diffs.append(Fraction(acc))
    estimate = max(diffs) if diffs else max(ratios)
    return AsymptoticEstimate(i, estimate, max(ratios), seq)


def _binom(n: int, k: int) -> int:
    from math import comb

    return comb(n, k)


# --- persistent cache ------------------------------------------------------

class CohomologyCache:
    """Content-addressed cohomology dims, optionally backed by a JSON-lines file.

    Reads are lock-free on the dict; writes take a lock.  A deterministic
    fraction of hits is recomputed and compared (the audit).  With
    ``serre_audit`` every freshly computed table is checked against an
    independent computation of K - D.
    """

    def __init__(self, path=None, audit_rate: float = 0.05, serre_audit: bool = False):
        self.path = path
        self.audit_rate = audit_rate
        self.serre_audit = serre_audit
        self.serre_checked = 0
        self.serre_failures: list = []
        self._data: dict[tuple, tuple[int, ...]] = {}
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0
        self.audits = 0
        if path is not None:
            self._load()

    @staticmethod
    def key(fan: Fan, D: ToricDivisor, char_label: int) -> tuple:
        return (fan.digest, D.coeffs, char_label)

    def _load(self):
        import json
        import os

        if not os.path.exists(self.path):
            return
        with open(self.path) as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                rec = json.loads(line)
                self._data[(rec["fan"], tuple(rec["coeffs"]), rec["char"])] = tuple(rec["dims"])

    def get(self, fan: Fan, D: ToricDivisor, char_label: int = 0) -> CohomologyTable:
        k = self.key(fan, D, char_label)
        dims = self._data.get(k)
        if dims is not None:
            self.hits += 1
            if self._audit_due(k):
                fresh = cohomology(fan, D, char_label)
                self.audits += 1
                if fresh.dims != dims:
                    raise AssertionError(f"cache entry {k} disagrees with recomputation")
                return fresh
            return CohomologyTable(D, char_label, dims)
        self.misses += 1
        table = cohomology(fan, D, char_label)
        if self.serre_audit:
            dual = cohomology(fan, serre_dual(D), char_label)
            self.serre_checked += 1
            if not check_serre(table, dual):
                self.serre_failures.append((D.coeffs, table.dims, dual.dims))
        self.put(k, table.dims)
        return table

    def _audit_due(self, k) -> bool:
        if self.audit_rate <= 0:
            return False
        import hashlib

        h = int(hashlib.sha256(repr(k).encode()).hexdigest()[:8], 16)
        return (h % 10_000) < self.audit_rate * 10_000

    def put(self, k, dims):
        with self._lock:
            if k in self._data:
                return
            self._data[k] = tuple(dims)
            if self.path is not None:
                import json

                with open(self.path, "a") as fh:
                    fh.write(json.dumps({"fan": k[0], "coeffs": list(k[1]), "char": k[2], "dims": list(dims)}) + "\n")

    def __len__(self):
        return len(self._data)


# --- single weights --------------------------------------------------------

def weight_contribution(fan: Fan, D: ToricDivisor, m: Sequence[int], char_label: int = 0) -> tuple[int, ...]:
    """The (n+1)-vector contributed by the single weight m."""
    bt = betti_table(fan, char_prime(char_label))
    pts = np.array([list(m)], dtype=np.int64)
    return tuple(int(x) for x in _point_contrib(fan, D.coeffs, bt.table, pts)[0])


def find_witness(fan: Fan, D: ToricDivisor, i: int, char_label: int = 0) -> tuple[int, ...] | None:
    """Some weight contributing to h^i(D), or None if h^i(D) = 0."""
    bt = betti_table(fan, char_prime(char_label))
    n = fan.rank
    lo, hi = weight_box(D)
    grid, rows = _segment_sums(fan, D.coeffs, bt.table, lo, hi)
    hits = np.nonzero(rows[:, i])[0]
    if hits.size == 0:
        return None
    g = grid[hits[0]]
    ts = np.arange(lo[n - 1], hi[n - 1] + 1, dtype=np.int64)
    pts = np.concatenate([np.repeat(g[None, :], ts.size, axis=0), ts[:, None]], axis=1)
    contrib = _point_contrib(fan, D.coeffs, bt.table, pts)
    k = int(np.nonzero(contrib[:, i])[0][0])
    return tuple(int(x) for x in pts[k])
