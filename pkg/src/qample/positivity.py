"""q-positivity: q-T-ample certificates, probes, q-nef and (n-1)-ample tests, rank-2 scans.

A q-T-ample certificate for L (with respect to the polarization H) is a power
N with

    H^{q+1}(L^N(-(n+1)H)) = H^{q+2}(L^N(-(n+2)H)) = ... = H^n(L^N(-(2n-q)H)) = 0.

Certificates are sufficient evidence; failing to find one up to ``N_max`` is
reported as non-conclusive.  ``q_nef`` and ``n_minus_1_ample`` are exact
polyhedral tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .divisors import (
    NumericalClass,
    ToricDivisor,
    is_big,
    is_pseudoeffective,
    restrict,
)
from .flag import FlagBundle
from .koszul import CERTIFIED, polarization_status
from .lattice import orbit_closures

EXACT_TRUE = "EXACT_TRUE"
EXACT_FALSE = "EXACT_FALSE"
CERTIFIED_Q_TAMPLE = "CERTIFIED_Q_TAMPLE"
NO_CERTIFICATE = "NO_CERTIFICATE_UP_TO"
NOT_REACHED = "NOT_REACHED"
ORBIT_CLOSURE_ASSUMPTION = "q-nefness tested on torus-invariant orbit closures only"
TWIST_ASSUMPTION = "probed on divisor twists"


class UnsupportedGeometry(ValueError):
    pass


class UnsupportedRank(ValueError):
    pass


class CandidateSetIncomplete(AssertionError):
    """A scan sector between consecutive candidate rays was not constant."""


# --- classes and divisors ---------------------------------------------------

def as_divisor(geometry, c):
    """Integral divisor representing a positive multiple of ``c``.

    ``c`` may be a divisor, a FlagBundle, a NumericalClass or a coordinate
    sequence in the geometry's N^1 basis.
    """
    if isinstance(c, (ToricDivisor, FlagBundle)):
        return c
    if isinstance(c, NumericalClass):
        D, _ = c.integral_multiple()
        return D
    coords = [Fraction(x) for x in c]
    k = 1
    for x in coords:
        k = math.lcm(k, x.denominator)
    return geometry.from_coords([int(x * k) for x in coords])


def class_coords(geometry, c) -> tuple[Fraction, ...]:
    if isinstance(c, NumericalClass):
        return c.coords
    if isinstance(c, (ToricDivisor, FlagBundle)):
        return tuple(geometry.class_coords(c))
    return tuple(Fraction(x) for x in c)


def _fmt(coords) -> list[str]:
    return [str(x) for x in coords]


# --- reports ----------------------------------------------------------------

@dataclass
class AmplenessReport:
    divisor: tuple                   # class coordinates in N^1
    q: int
    verdict: str
    witnesses: list = field(default_factory=list)   # (twist, i, h^i)
    assumptions: list = field(default_factory=list)
    N: int | None = None
    N_max: int | None = None
    geometry: str = ""

    @property
    def certified(self) -> bool:
        return self.verdict.startswith(CERTIFIED_Q_TAMPLE) or self.verdict == EXACT_TRUE

    @property
    def holds(self) -> bool:
        return self.certified

    def to_json(self) -> dict:
        return {
            "geometry": self.geometry,
            "class": _fmt(self.divisor),
            "q": self.q,
            "verdict": self.verdict,
            "N": self.N,
            "N_max": self.N_max,
            "witnesses": [[str(t), i, h] for t, i, h in self.witnesses],
            "assumptions": list(self.assumptions),
        }


def koszul_assumption(geometry) -> str:
    status = polarization_status(geometry)
    if status == CERTIFIED:
        return f"Koszul-ampleness of H certified in window (N = {2 * geometry.dim})"
    return "Koszul-ampleness of H asserted"


def required_groups(n: int, q: int) -> list[tuple[int, int]]:
    """Pairs (i, k): H^i(L^N(-k H)) must vanish."""
    return [(i, n + i - q) for i in range(q + 1, n + 1)]


def qtample_certificate(geometry, L, H=None, q: int = 0, N_max: int = 64,
                        record_koszul: bool = True) -> AmplenessReport:
    """Search N = 1..N_max for the n - q vanishings; the first hit wins."""
    n = geometry.dim
    D = as_divisor(geometry, L)
    H = geometry.polarization if H is None else H
    coords = class_coords(geometry, L)
    assumptions = [koszul_assumption(geometry)] if record_koszul else []
    if getattr(geometry, "char_label", 0):
        assumptions.append("characteristic-p run: dimensions are combinatorial")
    if q >= n:
        return AmplenessReport(coords, q, EXACT_TRUE, [], assumptions + [f"q >= dim X = {n}"],
                               geometry=geometry.name)
    groups = required_groups(n, q)
    last_witness: dict[int, tuple] = {}
    failing = None
    for N in range(1, N_max + 1):
        failing = None
        for i, k in groups:
            E = D * N - H * k
            hit = last_witness.get(i)
            if hit is not None and _reuse_witness(geometry, E, i, hit, N):
                failing = (f"L^{N}(-{k}H)", i, None)
                break
            h = geometry.h(E, i)
            if h:
                failing = (f"L^{N}(-{k}H)", i, h)
                w = geometry.witness(E, i)
                if w is not None:
                    last_witness[i] = (w, N)
                break
        if failing is None:
            wit = [(f"L^{N}(-{k}H)", i, 0) for i, k in groups]
            return AmplenessReport(coords, q, f"{CERTIFIED_Q_TAMPLE}({N})", wit, assumptions, N=N, N_max=N_max,
                                   geometry=geometry.name)
    # Report the decisive non-vanishing at N_max with its dimension.
    i = failing[1]
    k = dict(groups)[i]
    h = geometry.h(D * N_max - H * k, i)
    return AmplenessReport(coords, q, f"{NO_CERTIFICATE}({N_max})", [(failing[0], i, h)], assumptions,
                           N_max=N_max, geometry=geometry.name)


def _reuse_witness(geometry, E, i, hit, N) -> bool:
    """Test the previous power's non-vanishing weight, rescaled, on the new twist."""
    m, N_prev = hit
    cands = [tuple(m)]
    scaled = tuple(int(round(x * N / N_prev)) for x in m)
    if scaled != cands[0]:
        cands.append(scaled)
    return any(geometry.witness_holds(E, i, c) for c in cands)


# --- probes -----------------------------------------------------------------

def _stable_threshold(ok: Callable[[int], bool], lo: int, hi: int) -> int | None:
    """Least m in [lo, hi] with ok(m') for all m' in [m, hi]; None if ok(hi) fails."""
    best = None
    for m in range(hi, lo - 1, -1):
        if not ok(m):
            break
        best = m
    return best


@dataclass
class ProbeReport:
    q: int
    m_max: int
    results: list            # (twist label, minimal m or NOT_REACHED)
    assumptions: list = field(default_factory=lambda: [TWIST_ASSUMPTION])

    @property
    def all_reached(self) -> bool:
        return all(m != NOT_REACHED for _, m in self.results)

    def to_json(self) -> dict:
        return {"q": self.q, "m_max": self.m_max, "all_reached": self.all_reached,
                "results": [[str(t), m] for t, m in self.results], "assumptions": list(self.assumptions)}


def _vanish_above(geometry, E, q: int) -> bool:
    n = geometry.dim
    return all(geometry.h(E, i) == 0 for i in range(q + 1, n + 1))


def naive_probe(geometry, L, q: int, twist_set: Sequence, m_max: int = 64) -> ProbeReport:
    """For each twist M: least m <= m_max with H^i(M + m' L) = 0 for i > q and all m' in [m, m_max]."""
    D = as_divisor(geometry, L)
    out = []
    for M in twist_set:
        M = as_divisor(geometry, M) if not isinstance(M, (ToricDivisor, FlagBundle)) else M
        m = _stable_threshold(lambda k: _vanish_above(geometry, M + D * k, q), 1, m_max)
        out.append((list(getattr(M, "coeffs", M)), NOT_REACHED if m is None else m))
    return ProbeReport(q, m_max, out)


@dataclass
class UniformProbeResult:
    lambda_estimate: Fraction | None
    samples: list                   # (j, minimal m) with None when not reached
    N_reference: int | None
    speculative: bool
    tail_slope: Fraction | None
    consistent: bool | None

    def to_json(self) -> dict:
        return {
            "lambda_estimate": None if self.lambda_estimate is None else str(self.lambda_estimate),
            "samples": [[j, m] for j, m in self.samples],
            "N_reference": self.N_reference,
            "speculative": self.speculative,
            "tail_slope": None if self.tail_slope is None else str(self.tail_slope),
            "consistent": self.consistent,
        }


def uniform_probe(geometry, L, q: int, j_max: int = 8, m_cap: int = 64, N_max: int = 64) -> UniformProbeResult:
    """Empirical slope of the least m with H^i(L^m(-jH)) = 0 for i > q (stable up to m_cap).

    The comparison with the certificate exponent N is asymptotic: the slope
    of the tail of the samples must not exceed N.
    """
    D = as_divisor(geometry, L)
    H = geometry.polarization
    cert = qtample_certificate(geometry, D, q=q, N_max=N_max, record_koszul=False)
    N_ref = cert.N
    samples = []
    for j in range(1, j_max + 1):
        m = _stable_threshold(lambda k: _vanish_above(geometry, D * k - H * j, q), 1, m_cap)
        samples.append((j, m))
    reached = [(j, m) for j, m in samples if m is not None]
    if len(reached) < len(samples):
        return UniformProbeResult(None, samples, N_ref, True, None, False if N_ref else None)
    lam = max(Fraction(m, j) for j, m in samples)
    half = len(samples) // 2
    (j0, m0), (j1, m1) = samples[half], samples[-1]
    slope = Fraction(m1 - m0, j1 - j0) if j1 > j0 else lam
    consistent = None if N_ref is None else slope <= N_ref
    return UniformProbeResult(lam, samples, N_ref, N_ref is None, slope, consistent)


# --- exact tests ------------------------------------------------------------

def _flag_sign(coords):
    a, b = coords
    return a, b


def q_nef(geometry, c, q: int) -> AmplenessReport:
    """-c is not big on any (q+1)-dimensional invariant subvariety."""
    n = geometry.dim
    coords = class_coords(geometry, c)
    if q >= n:
        return AmplenessReport(coords, q, EXACT_TRUE, [], [f"q >= dim X = {n}"], geometry=geometry.name)
    if not getattr(geometry, "is_toric", False):
        a, b = _flag_sign(coords)
        if q == 0:
            ok = a >= 0 and b >= 0
            return AmplenessReport(coords, q, EXACT_TRUE if ok else EXACT_FALSE, [],
                                   ["nef cone of SL(3)/B is the dominant chamber"], geometry=geometry.name)
        if q == n - 1:
            ok = not (a < 0 and b < 0)
            return AmplenessReport(coords, q, EXACT_TRUE if ok else EXACT_FALSE, [],
                                   ["big cone of SL(3)/B is the open dominant chamber"], geometry=geometry.name)
        raise UnsupportedGeometry(f"q-nef for SL(3)/B is exact only for q in {{0, {n - 1}}}")
    D = as_divisor(geometry, c)
    neg = -D
    for V in orbit_closures(geometry.fan, q + 1):
        if is_big(restrict(neg, V)):
            return AmplenessReport(coords, q, EXACT_FALSE, [(f"V({sorted(V.cone)})", q + 1, "-c big")],
                                   [ORBIT_CLOSURE_ASSUMPTION], geometry=geometry.name)
    return AmplenessReport(coords, q, EXACT_TRUE, [], [ORBIT_CLOSURE_ASSUMPTION], geometry=geometry.name)


def q_nef_interior(geometry, c, q: int, radius: Fraction = Fraction(1, 2)) -> bool:
    """c and its axis-neighbours at the given radius are all q-nef (an interiority proxy)."""
    coords = class_coords(geometry, c)
    pts = [coords]
    for k in range(len(coords)):
        for s in (1, -1):
            p = list(coords)
            p[k] += s * Fraction(radius)
            pts.append(tuple(p))
    return all(q_nef(geometry, p, q).holds for p in pts)


def n_minus_1_ample(geometry, c) -> AmplenessReport:
    """(n-1)-ample iff the class is not in minus the closed effective cone."""
    n = geometry.dim
    coords = class_coords(geometry, c)
    if not getattr(geometry, "is_toric", False):
        a, b = _flag_sign(coords)
        in_neg_eff = a <= 0 and b <= 0
        return AmplenessReport(coords, n - 1, EXACT_FALSE if in_neg_eff else EXACT_TRUE, [],
                               ["effective cone of SL(3)/B is the closed dominant chamber"], geometry=geometry.name)
    D = as_divisor(geometry, c)
    psef = is_pseudoeffective(-D)
    wit = [("-c pseudoeffective", n - 1, 1)] if psef else []
    return AmplenessReport(coords, n - 1, EXACT_FALSE if psef else EXACT_TRUE, wit, list(geometry.assumptions),
                           geometry=geometry.name)


def is_q_ample_exact(geometry, c, q: int) -> bool | None:
    """Exact answer where one is available: q = 0 (ample), q = n - 1, q >= n."""
    n = geometry.dim
    if q >= n:
        return True
    if q == n - 1:
        return n_minus_1_ample(geometry, c).holds
    if q == 0:
        coords = class_coords(geometry, c)
        if getattr(geometry, "is_toric", False):
            from .divisors import is_ample

            return is_ample(as_divisor(geometry, coords))
        a, b = coords
        return a > 0 and b > 0
    return None


# --- additivity -------------------------------------------------------------

@dataclass
class AdditivityReport:
    status: str            # CONSISTENT | COUNTEREXAMPLE | PRECONDITION_FAILED
    q: int
    r: int
    sum_report: AmplenessReport | None
    details: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"status": self.status, "q": self.q, "r": self.r,
                "sum": None if self.sum_report is None else self.sum_report.to_json(), "details": self.details}


def additivity_check(geometry, c1, q: int, c2, r: int, evidence_depth: int = 64) -> AdditivityReport:
    """A q-ample class plus an r-ample class should be (q+r)-ample."""
    n = geometry.dim
    details = []
    for c, lvl in ((c1, q), (c2, r)):
        rep = qtample_certificate(geometry, c, q=lvl, N_max=evidence_depth, record_koszul=False)
        details.append(rep.to_json())
        if not rep.holds:
            return AdditivityReport("PRECONDITION_FAILED", q, r, None, details)
    coords = tuple(a + b for a, b in zip(class_coords(geometry, c1), class_coords(geometry, c2)))
    total = q + r
    if total >= n:
        rep = AmplenessReport(coords, total, EXACT_TRUE, [], [f"q + r >= dim X = {n}"], geometry=geometry.name)
        return AdditivityReport("CONSISTENT", q, r, rep, details)
    # Both classes have been scaled to integral divisors; add the classes, not the representatives.
    rep = qtample_certificate(geometry, coords, q=total, N_max=evidence_depth, record_koszul=False)
    ok = rep.holds
    if total == n - 1:
        exact = n_minus_1_ample(geometry, coords)
        details.append(exact.to_json())
        ok = ok and exact.holds
    return AdditivityReport("CONSISTENT" if ok else "COUNTEREXAMPLE", q, r, rep, details)


# --- rank-2 cone scans ------------------------------------------------------

def _primitive(v) -> tuple[int, int]:
    a, b = (Fraction(x) for x in v)
    k = math.lcm(a.denominator, b.denominator)
    a, b = int(a * k), int(b * k)
    g = math.gcd(a, b)
    return (a // g, b // g)


def _angle(v) -> float:
    return math.atan2(v[1], v[0]) % (2 * math.pi)


def candidate_rays(geometry) -> list[tuple[int, int]]:
    """Directions on which a rank-2 verdict can change.

    Lines spanned by the effective-cone generators and the kernels of curve
    degrees (toric), or the dot-action walls a = 0, b = 0, a + b = 0 (flag).
    """
    lines: set[tuple[int, int]] = set()
    if getattr(geometry, "is_toric", False):
        for g in geometry.effective_generators():
            if any(g):
                lines.add(_primitive(g))
        fan = geometry.fan
        for C in orbit_closures(fan, 1):
            # degree on C is linear in the class coordinates: evaluate on a basis
            degs = []
            for e in ((1, 0), (0, 1)):
                D = geometry.from_coords(e)
                degs.append(sum(restrict(D, C).coeffs))
            if any(degs):
                lines.add(_primitive((-degs[1], degs[0])))
    else:
        lines |= {(1, 0), (0, 1), (1, -1)}
    rays = set()
    for a, b in lines:
        rays.add((a, b))
        rays.add((-a, -b))
    return sorted(rays, key=_angle)


def sample_rays(resolution: int) -> list[tuple[int, int]]:
    """``resolution`` integral directions approximating equally spaced angles."""
    R = max(4, resolution)
    out = set()
    for k in range(resolution):
        t = 2 * math.pi * (k + 0.5) / resolution
        v = (round(R * math.cos(t)), round(R * math.sin(t)))
        if v != (0, 0):
            out.add(_primitive(v))
    return sorted(out, key=_angle)


@dataclass
class Arc:
    start: tuple            # ray where the arc begins (counter-clockwise)
    end: tuple
    start_closed: bool
    end_closed: bool
    verdict: bool

    def to_json(self) -> dict:
        return {"start": list(self.start), "end": list(self.end), "start_closed": self.start_closed,
                "end_closed": self.end_closed, "verdict": self.verdict}


@dataclass
class ConeChart:
    geometry: str
    q: int
    predicate: str
    resolution: int
    candidates: list                    # candidate rays in angular order
    ray_verdicts: list                  # verdict on each candidate ray
    sector_verdicts: list               # verdict on the open sector after each candidate ray
    boundary_rays: list = field(default_factory=list)
    arcs: list = field(default_factory=list)

    @property
    def chambers(self) -> list[Arc]:
        return [a for a in self.arcs if a.verdict]

    def verdict_at(self, v) -> bool:
        """Chart verdict for a direction (exact, via the candidate sectors)."""
        v = _primitive(v)
        if v in self.candidates:
            return self.ray_verdicts[self.candidates.index(v)]
        th = _angle(v)
        angles = [_angle(c) for c in self.candidates]
        for k, a in enumerate(angles):
            b = angles[(k + 1) % len(angles)]
            if (a < th < b) if a < b else (th > a or th < b):
                return self.sector_verdicts[k]
        raise AssertionError("direction not located")

    def signature(self) -> tuple:
        return (tuple(self.candidates), tuple(self.ray_verdicts), tuple(self.sector_verdicts))

    def to_json(self) -> dict:
        return {
            "geometry": self.geometry,
            "q": self.q,
            "predicate": self.predicate,
            "resolution": self.resolution,
            "boundary_rays": [list(r) for r in self.boundary_rays],
            "boundary_slopes": [slope_label(r) for r in self.boundary_rays],
            "chamber_verdicts": [a.to_json() for a in self.arcs],
        }


def slope_label(r) -> str:
    a, b = r
    if a == 0:
        return "inf" if b > 0 else "-inf"
    return str(Fraction(b, a))


def scan_predicate(geometry, q: int, predicate: str, N_max: int = 64) -> Callable:
    if predicate == "tample":
        return lambda v: qtample_certificate(geometry, v, q=q, N_max=N_max, record_koszul=False).holds
    if predicate == "exact":
        def f(v):
            res = is_q_ample_exact(geometry, v, q)
            if res is None:
                raise UnsupportedGeometry(f"no exact q-ample test for q = {q}")
            return res
        return f
    if predicate == "nef":
        return lambda v: q_nef(geometry, v, q).holds
    raise ValueError(f"unknown predicate {predicate!r}")


def cone_scan_rank2(geometry, q: int, resolution: int = 32, predicate: str = "tample",
                    N_max: int = 64) -> ConeChart:
    """Evaluate a q-predicate on candidate and sample rays and merge into arcs."""
    if geometry.picard_rank != 2:
        raise UnsupportedRank(f"cone scans need Picard rank 2, got {geometry.picard_rank}")
    pred = scan_predicate(geometry, q, predicate, N_max)
    cands = candidate_rays(geometry)
    ray_v = [pred(c) for c in cands]
    angles = [_angle(c) for c in cands]
    samples = [s for s in sample_rays(resolution) if s not in cands]
    sector_v: list = [None] * len(cands)
    for s in samples:
        th = _angle(s)
        for k, a in enumerate(angles):
            b = angles[(k + 1) % len(angles)]
            if (a < th < b) if a < b else (th > a or th < b):
                break
        v = pred(s)
        if sector_v[k] is None:
            sector_v[k] = v
        elif sector_v[k] != v:
            raise CandidateSetIncomplete(f"verdict changes inside the sector after {cands[k]}")
    for k in range(len(cands)):
        if sector_v[k] is None:
            # sector too thin for the sample grid: probe its bisector
            a, b = cands[k], cands[(k + 1) % len(cands)]
            sector_v[k] = pred(_primitive((a[0] + b[0], a[1] + b[1])))
    chart = ConeChart(geometry.name, q, predicate, resolution, cands, ray_v, sector_v)
    chart.boundary_rays = [c for k, c in enumerate(cands)
                           if not (sector_v[k - 1] == ray_v[k] == sector_v[k])]
    chart.arcs = _merge_arcs(cands, ray_v, sector_v)
    return chart


def _merge_arcs(cands, ray_v, sector_v) -> list[Arc]:
    """Maximal arcs of constant verdict, starting at a boundary ray."""
    K = len(cands)
    # cells in angular order: ray 0, sector 0, ray 1, sector 1, ...
    cells = []
    for k in range(K):
        cells.append(("ray", k, ray_v[k]))
        cells.append(("sector", k, sector_v[k]))
    if len({c[2] for c in cells}) == 1:
        return [Arc(cands[0], cands[0], True, True, cells[0][2])]
    start = next(i for i in range(len(cells)) if cells[i][2] != cells[i - 1][2])
    cells = cells[start:] + cells[:start]
    arcs = []
    cur = [cells[0]]
    for cell in cells[1:]:
        if cell[2] == cur[-1][2]:
            cur.append(cell)
        else:
            arcs.append(cur)
            cur = [cell]
    arcs.append(cur)
    out = []
    for group in arcs:
        first, last = group[0], group[-1]
        s_ray = cands[first[1]]
        s_closed = first[0] == "ray"
        if last[0] == "ray":
            e_ray, e_closed = cands[last[1]], True
        else:
            e_ray, e_closed = cands[(last[1] + 1) % K], False
        out.append(Arc(s_ray, e_ray, s_closed, e_closed, group[0][2]))
    return out
