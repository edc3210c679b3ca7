"""Characteristic-p experiments: Frobenius Tor over finite algebras and vanishing probes.

``frobenius_tor`` computes Tor_i over A~ (x) A~ of (A~ (x) A, A~), where A~
acts on the second factor through the relative Frobenius x -> x^{p^N}.
This is the Hochschild homology of A~ with coefficients in that bimodule,
computed with the normalized complex M (x) (A~/k)^{(x) n}.  Over F_p the
base-field twist A~ is A itself.

``ordinary_frobenius_tor`` is the contrast: Tor^A(F_*A, k) through the
normalized bar complex, nonzero in positive degrees for singular A.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Sequence

import numpy as np

from . import linalg
from .positivity import as_divisor, qtample_certificate

SIZE_CAP = 10**6


class SizeCapExceeded(RuntimeError):
    pass


class HypothesisFails(RuntimeError):
    def __init__(self, message: str, detail: dict | None = None):
        super().__init__(message)
        self.detail = detail or {}


class NotAnAlgebra(ValueError):
    pass


@dataclass
class FinAlgebra:
    """Commutative unital F_p-algebra given by structure constants.

    ``table[i, j]`` is the coordinate vector of ``b_i b_j``.  Basis element
    ``unit`` is 1 and the other basis elements span the augmentation ideal.
    """

    p: int
    labels: tuple
    table: np.ndarray
    unit: int = 0
    name: str = ""
    regular: bool | None = None

    def __post_init__(self):
        self.table = np.asarray(self.table, dtype=np.int64) % self.p
        d = self.dim
        if self.table.shape != (d, d, d):
            raise NotAnAlgebra("structure constants must have shape (dim, dim, dim)")
        self._verify()

    @property
    def dim(self) -> int:
        return len(self.labels)

    def _verify(self) -> None:
        T, p, d = self.table, self.p, self.dim
        e = np.zeros(d, dtype=np.int64)
        e[self.unit] = 1
        for i in range(d):
            v = np.zeros(d, dtype=np.int64)
            v[i] = 1
            if not (np.array_equal(T[self.unit, i], v) and np.array_equal(T[i, self.unit], v)):
                raise NotAnAlgebra(f"basis element {self.unit} is not a unit")
        if not np.array_equal(T, T.transpose(1, 0, 2)):
            raise NotAnAlgebra("multiplication is not commutative")
        # (b_i b_j) b_k = b_i (b_j b_k) for all triples
        left = np.einsum("ijm,mkl->ijkl", T, T) % p
        right = np.einsum("jkm,iml->ijkl", T, T) % p
        if not np.array_equal(left, right):
            raise NotAnAlgebra("multiplication is not associative")
        others = [i for i in range(d) if i != self.unit]
        if others and np.any(T[np.ix_(others, others)][..., self.unit] % p):
            raise NotAnAlgebra("non-unit basis elements must span an ideal")

    def mul(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return np.einsum("i,j,ijk->k", x, y, self.table) % self.p

    def frobenius_matrix(self, N: int) -> np.ndarray:
        """Matrix F with F[i] = b_i^{p^N} (the map is F_p-linear)."""
        d = self.dim
        F = np.eye(d, dtype=np.int64)
        for _ in range(N):
            F = np.stack([self._pow(F[i], self.p) for i in range(d)])
        return F

    def _pow(self, x: np.ndarray, k: int) -> np.ndarray:
        out = np.zeros(self.dim, dtype=np.int64)
        out[self.unit] = 1
        base = x.copy()
        while k:
            if k & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            k >>= 1
        return out

    def to_json(self) -> dict:
        mult = [[i, j, k, int(c)] for i in range(self.dim) for j in range(self.dim)
                for k, c in enumerate(self.table[i, j]) if c]
        return {"name": self.name, "p": self.p, "basis": list(self.labels), "unit": self.unit,
                "regular": self.regular, "mult": mult}


def algebra_from_json(doc: dict, p: int) -> FinAlgebra:
    d = len(doc["basis"])
    T = np.zeros((d, d, d), dtype=np.int64)
    for i, j, k, c in doc["mult"]:
        T[i, j, k] += c
    return FinAlgebra(p, tuple(doc["basis"]), T, doc.get("unit", 0), doc.get("name", ""), doc.get("regular"))


def preset_catalog() -> list[dict]:
    text = resources.files("qample").joinpath("data/algebras.json").read_text()
    return json.loads(text)["algebras"]


def preset_names() -> list[str]:
    return [a["name"] for a in preset_catalog()]


def preset(name: str, p: int) -> FinAlgebra:
    for doc in preset_catalog():
        if doc["name"] == name:
            return algebra_from_json(doc, p)
    raise KeyError(f"no preset algebra {name!r}")


@dataclass
class TorTable:
    algebra: str
    p: int
    N: int | None
    dims: tuple
    kind: str

    def to_json(self) -> dict:
        return {"algebra": self.algebra, "p": self.p, "N": self.N, "kind": self.kind, "dims": list(self.dims)}


def _check_cap(shapes: Sequence[tuple[int, int]]) -> None:
    for r, c in shapes:
        if r * c > SIZE_CAP:
            raise SizeCapExceeded(f"a {r} x {c} matrix exceeds the cap of {SIZE_CAP} entries")


def _face_matrices(n: int, M: int, rbar: np.ndarray, right: np.ndarray, left: np.ndarray | None, p: int):
    """Boundary C_n -> C_{n-1} of M (x) Rbar^{(x) n} as a dense matrix (rows = source basis).

    ``rbar``: (r, r, r) product on Rbar; ``right``: (M, r, M) action m . a;
    ``left``: (r, M, M) action a . m, or None when the last face vanishes.
    """
    r = rbar.shape[0]
    out = np.zeros((M * r ** n, M * r ** (n - 1)), dtype=np.int64)
    # face 0: (m a_1) (x) a_2 ...
    eye_rest = np.eye(r ** (n - 1), dtype=np.int64)
    out += np.einsum("mak,RS->maRkS", right, eye_rest).reshape(out.shape)
    # inner faces: a_i a_{i+1}
    for i in range(1, n):
        pre = M * r ** (i - 1)
        post = r ** (n - i - 1)
        blk = np.einsum("PQ,abc,RS->PabRQcS", np.eye(pre, dtype=np.int64), rbar, np.eye(post, dtype=np.int64))
        out += (-1) ** i * blk.reshape(out.shape)
    if left is not None:
        # last face: a_n m (x) a_1 ... a_{n-1}
        mid = r ** (n - 1)
        blk = np.einsum("amk,RS->mRakS", left, np.eye(mid, dtype=np.int64))
        out += (-1) ** n * blk.reshape(out.shape)
    return out % p


def _homology(n_max: int, M: int, rbar, right, left, p: int) -> tuple[int, ...]:
    r = rbar.shape[0]
    dims = [M * r ** n for n in range(n_max + 2)]
    _check_cap([(dims[n + 1], dims[n]) for n in range(n_max + 1)])
    bounds = [_face_matrices(n + 1, M, rbar, right, left, p) for n in range(n_max + 1)]
    # linalg.homology_dims wants C_{n+1} -> C_n as dims[n] x dims[n+1] matrices
    H = linalg.homology_dims([b.T for b in bounds], dims, p)
    return tuple(H[: n_max + 1])


def _bar_pieces(A: FinAlgebra):
    keep = [i for i in range(A.dim) if i != A.unit]
    rbar = A.table[np.ix_(keep, keep, keep)]
    return keep, rbar


def frobenius_tor(A: FinAlgebra, N: int = 1, i_max: int = 3) -> TorTable:
    """Tor_i^{A~ (x) A~}(A~ (x) A, A~) for i <= i_max; expected (dim A, 0, ..., 0)."""
    d, p = A.dim, A.p
    keep, rbar = _bar_pieces(A)
    Phi = A.frobenius_matrix(N)                         # Phi[a] = b_a^{p^N} in A
    T = A.table
    # M = A~ (x) A with basis (x, y); right action of b_a: x (x) y b_a^{p^N}
    phi_mult = np.einsum("ac,ycz->ayz", Phi, T) % p     # y * Phi(b_a)
    right = np.einsum("xX,ayz->xyaXz", np.eye(d, dtype=np.int64), phi_mult)   # (x,y), a -> (X,z)
    right = right.reshape(d * d, d, d * d)[:, keep, :]
    left = np.einsum("axX,yz->axyXz", T, np.eye(d, dtype=np.int64)).reshape(d, d * d, d * d)[keep]
    dims = _homology(i_max, d * d, rbar, right, left, p)
    return TorTable(A.name, p, N, dims, "relative-frobenius")


def hochschild_homology(A: FinAlgebra, i_max: int = 3) -> TorTable:
    """HH_i(A, A): Tor over A (x) A of the diagonal bimodule, the non-flat control."""
    keep, rbar = _bar_pieces(A)
    right = A.table[:, keep, :]
    left = A.table[keep]
    dims = _homology(i_max, A.dim, rbar, right, left, A.p)
    return TorTable(A.name, A.p, None, dims, "hochschild")


def ordinary_frobenius_tor(A: FinAlgebra, i_max: int = 3) -> TorTable:
    """Tor_i^A(F_* A, k), the module A acted on through a -> a^p, via the normalized bar complex."""
    d, p = A.dim, A.p
    keep, rbar = _bar_pieces(A)
    Phi = A.frobenius_matrix(1)
    # right action of b_a on m in F_*A: m * b_a^p
    right = np.einsum("ac,mcz->maz", Phi, A.table) % p
    right = right[:, keep, :]
    dims = _homology(i_max, d, rbar, right, None, p)
    return TorTable(A.name, p, 1, dims, "ordinary-frobenius")


# --- vanishing probe ----------------------------------------------------------

@dataclass
class CharPProbeReport:
    q: int
    N: int
    regularity: int
    rows: list = field(default_factory=list)         # (p, b, i, h^i) for p^b >= reg
    skipped: list = field(default_factory=list)      # (p, b) with p^b < reg

    @property
    def passed(self) -> bool:
        return all(h == 0 for *_, h in self.rows)

    def to_json(self) -> dict:
        return {"q": self.q, "N": self.N, "regularity": self.regularity, "passed": self.passed,
                "rows": [list(r) for r in self.rows], "skipped": [list(s) for s in self.skipped]}


def charp_vanishing_probe(geometry, L, q: int, M_twist, primes: Sequence[int] = (2, 3, 5), b_max: int = 4,
                          N_max: int = 64) -> CharPProbeReport:
    """Check H^i(X, L^{N p^b} (x) M) = 0 for i > q once p^b >= reg(M).

    The vanishing hypothesis is checked on the power L^N with N the first
    q-T-ample certificate exponent; if no certificate exists the hypothesis
    fails and the probe is skipped.
    """
    from .cohomology import regularity

    if not getattr(geometry, "is_toric", False):
        raise HypothesisFails("characteristic-p probes run on toric geometries only")
    n = geometry.dim
    D = as_divisor(geometry, L)
    M = as_divisor(geometry, M_twist)
    cert = qtample_certificate(geometry, D, q=q, N_max=N_max, record_koszul=False)
    if not cert.holds:
        H = geometry.polarization
        first = [(f"L(-{n + i - q}H)", i, geometry.h(D - H * (n + i - q), i)) for i in range(q + 1, n + 1)]
        raise HypothesisFails(f"no power L^N with N <= {N_max} satisfies the vanishing hypothesis",
                              {"at_N_1": first, "certificate": cert.to_json()})
    N = cert.N if cert.N is not None else 1
    reg = regularity(geometry, M)
    report = CharPProbeReport(q, N, reg)
    for p in primes:
        for b in range(0, b_max + 1):
            if p ** b < reg:
                report.skipped.append((p, b))
                continue
            E = D * (N * p ** b) + M
            table = geometry.cache.get(geometry.fan, E, p)
            for i in range(q + 1, n + 1):
                report.rows.append((p, b, i, table.dims[i]))
    return report
