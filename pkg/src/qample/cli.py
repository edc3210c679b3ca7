"""Command-line interface: ``qample <command> [options]``.

Exit status: 0 on success, 1 when the reproduction suite has a FAIL, 2 on
usage errors (reported as JSON on stderr).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from typing import Sequence

from . import cohomology as coh
from .geometry import GEOMETRY_NAMES, geometry_from_fan_file, make_geometry


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    geometry: str | None
    fan_file: str | None
    char_label: int
    n_max: int
    m_max: int
    radius: int
    window: int | None
    cache_path: str | None
    fmt: str

    def __post_init__(self):
        for name in ("n_max", "m_max", "radius"):
            if getattr(self, name) <= 0:
                raise UsageError(f"--{name.replace('_', '-')} must be positive")
        if self.window is not None and self.window <= 0:
            raise UsageError("--window must be positive")
        if self.geometry is not None and self.geometry not in GEOMETRY_NAMES:
            raise UsageError(f"unknown geometry {self.geometry!r}; choose from {', '.join(GEOMETRY_NAMES)}")

    def build_geometry(self):
        cache = coh.CohomologyCache(self.cache_path) if self.geometry != "sl3b" else None
        if self.fan_file:
            return geometry_from_fan_file(self.fan_file, char_label=self.char_label, cache=cache)
        return make_geometry(self.geometry or "p1xp1", char_label=self.char_label, cache=cache)


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x != ""]
    except ValueError as exc:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from exc


def parse_class(geometry, text: str):
    """A divisor from either class coordinates or all ray coefficients."""
    vals = _ints(text)
    if not getattr(geometry, "is_toric", False):
        if len(vals) != 2:
            raise UsageError("SL(3)/B line bundles take two coordinates a,b")
        return geometry.divisor(vals)
    if len(vals) == geometry.picard_rank:
        return geometry.from_coords(vals)
    if len(vals) == len(geometry.fan.rays):
        return geometry.divisor(vals)
    raise UsageError(f"--divisor needs {geometry.picard_rank} class coordinates "
                     f"or {len(geometry.fan.rays)} ray coefficients, got {len(vals)}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--geometry", help=f"built-in geometry ({', '.join(GEOMETRY_NAMES)})")
    common.add_argument("--fan-file", help="JSON fan file (rank, rays, max_cones[, polarization])")
    common.add_argument("--char", type=int, default=0, help="characteristic: 0 or a prime")
    common.add_argument("--n-max", type=int, default=64, help="largest power in certificate searches")
    common.add_argument("--m-max", type=int, default=64, help="largest multiple in probes")
    common.add_argument("--radius", type=int, default=5, help="grid radius")
    common.add_argument("--window", type=int, default=None, help="internal-degree window for Koszul checks")
    common.add_argument("--cache", help="JSON-lines cohomology cache file")
    common.add_argument("--no-cache", action="store_true", help="ignore --cache")
    common.add_argument("--format", choices=("json", "text", "svg"), default="json")

    p = argparse.ArgumentParser(prog="qample", description="Exact toric line-bundle cohomology and q-ampleness.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("cohomology", parents=[common], help="h^i of a line bundle")
    s.add_argument("--divisor", required=True)
    s.add_argument("--twist", default=None)

    s = sub.add_parser("check", parents=[common], help="q-T-ample certificate search")
    s.add_argument("--divisor", required=True)
    s.add_argument("--q", type=int, required=True)

    s = sub.add_parser("scan", parents=[common], help="rank-2 cone chart")
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--resolution", type=int, default=32)
    s.add_argument("--predicate", choices=("tample", "exact", "nef"), default="tample")
    s.add_argument("--svg", help="write the chart to this SVG file")

    s = sub.add_parser("nef", parents=[common], help="exact q-nef test")
    s.add_argument("--divisor", required=True)
    s.add_argument("--q", type=int, required=True)

    s = sub.add_parser("probe", parents=[common], help="naive, uniform or characteristic-p probes")
    s.add_argument("--divisor", required=True)
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--kind", choices=("naive", "uniform", "charp"), default="naive")
    s.add_argument("--twist", action="append", default=None, help="test twist (repeatable)")
    s.add_argument("--j-max", type=int, default=5)
    s.add_argument("--primes", default="2,3,5")
    s.add_argument("--b-max", type=int, default=4)

    s = sub.add_parser("koszul", parents=[common], help="N-Koszul certificate of the polarization")
    s.add_argument("--N", type=int, default=None, help="target N (default 2 dim X)")
    s.add_argument("--p", type=int, default=None, help="compute over F_p (FAILED is confirmed over Q)")
    s.add_argument("--sequence", action="store_true", help="also check exactness of the Koszul syzygy sequences for j, l <= 4")

    s = sub.add_parser("frobenius", parents=[common], help="Frobenius Tor over preset algebras")
    s.add_argument("--algebra", default=None, help="preset name (default: all)")
    s.add_argument("--N", type=int, default=1)
    s.add_argument("--i-max", type=int, default=3)

    s = sub.add_parser("reproduce-paper", parents=[common], help="run the reproduction suite")
    s.add_argument("--only", default=None, help="comma-separated claim ids")
    s.add_argument("--out", default=None, help="write the JSON report here")
    return p


def _config(args) -> RunConfig:
    if args.geometry and args.fan_file:
        raise UsageError("--geometry and --fan-file are exclusive")
    return RunConfig(args.geometry, args.fan_file, args.char, args.n_max, args.m_max, args.radius, args.window,
                     None if args.no_cache else args.cache, args.format)


def _emit(doc, fmt: str, out) -> None:
    if fmt == "text":
        for k, v in doc.items():
            out.write(f"{k}: {json.dumps(v) if isinstance(v, (dict, list)) else v}\n")
    else:
        out.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _cmd_cohomology(args, cfg, out) -> int:
    X = cfg.build_geometry()
    D = parse_class(X, args.divisor)
    if args.twist:
        D = D + parse_class(X, args.twist)
    table = X.cohomology(D)
    doc = table.to_json()
    doc["geometry"] = X.name
    _emit(doc, cfg.fmt, out)
    return 0


def _cmd_check(args, cfg, out) -> int:
    from .positivity import is_q_ample_exact, qtample_certificate

    X = cfg.build_geometry()
    D = parse_class(X, args.divisor)
    rep = qtample_certificate(X, D, q=args.q, N_max=cfg.n_max)
    doc = rep.to_json()
    exact = is_q_ample_exact(X, D, args.q)
    doc["exact"] = exact
    _emit(doc, cfg.fmt, out)
    return 0


def _cmd_scan(args, cfg, out) -> int:
    from .chart import emit_chart
    from .positivity import cone_scan_rank2

    X = cfg.build_geometry()
    chart = cone_scan_rank2(X, args.q, resolution=args.resolution, predicate=args.predicate, N_max=cfg.n_max)
    svg = emit_chart(chart)
    if args.svg:
        with open(args.svg, "w") as fh:
            fh.write(svg)
    if cfg.fmt == "svg":
        out.write(svg)
    else:
        _emit(chart.to_json(), cfg.fmt, out)
    return 0


def _cmd_nef(args, cfg, out) -> int:
    from .positivity import q_nef

    X = cfg.build_geometry()
    _emit(q_nef(X, parse_class(X, args.divisor), args.q).to_json(), cfg.fmt, out)
    return 0


def _cmd_probe(args, cfg, out) -> int:
    from .positivity import naive_probe, uniform_probe

    X = cfg.build_geometry()
    L = parse_class(X, args.divisor)
    if args.kind == "naive":
        if args.twist:
            twists = [parse_class(X, t) for t in args.twist]
        else:
            twists = [X.zero() - X.polarization * j for j in range(args.j_max + 1)]
        doc = naive_probe(X, L, args.q, twists, m_max=cfg.m_max).to_json()
    elif args.kind == "uniform":
        doc = uniform_probe(X, L, args.q, j_max=args.j_max, m_cap=cfg.m_max, N_max=cfg.n_max).to_json()
    else:
        from .frobenius import HypothesisFails, charp_vanishing_probe

        M = parse_class(X, args.twist[0]) if args.twist else X.zero()
        try:
            doc = charp_vanishing_probe(X, L, args.q, M, primes=_ints(args.primes), b_max=args.b_max,
                                        N_max=cfg.n_max).to_json()
        except HypothesisFails as exc:
            doc = {"status": "HYPOTHESIS_FAILS", "message": str(exc),
                   "detail": json.loads(json.dumps(exc.detail, default=str))}
    _emit(doc, cfg.fmt, out)
    return 0


def _cmd_koszul(args, cfg, out) -> int:
    from .koszul import certify_N_koszul, koszul_spaces, section_ring, verify_sequence4

    X = cfg.build_geometry()
    N = args.N or 2 * X.dim
    window = cfg.window or 2 * N
    A = section_ring(X, J=max(window, N + 1, 9 if args.sequence else 0))
    doc = {"geometry": X.name, "ring_dims": list(A.dims), "certificate": certify_N_koszul(A, N, window, p=args.p).to_json()}
    if args.sequence:
        B = koszul_spaces(A, N)
        doc["sequence4"] = [verify_sequence4(A, B, j, l).to_json() for j in range(5) for l in range(5)]
    _emit(doc, cfg.fmt, out)
    return 0


def _cmd_frobenius(args, cfg, out) -> int:
    from .frobenius import frobenius_tor, hochschild_homology, ordinary_frobenius_tor, preset, preset_names

    p = cfg.char_label or 2
    names = [args.algebra] if args.algebra else preset_names()
    rows = []
    for name in names:
        try:
            A = preset(name, p)
        except KeyError as exc:
            raise UsageError(str(exc)) from exc
        rows.append({"algebra": name, "p": p, "dim": A.dim,
                     "relative": frobenius_tor(A, args.N, args.i_max).to_json()["dims"],
                     "ordinary": ordinary_frobenius_tor(A, args.i_max).to_json()["dims"],
                     "hochschild": hochschild_homology(A, args.i_max).to_json()["dims"]})
    _emit({"N": args.N, "results": rows}, cfg.fmt, out)
    return 0


def _cmd_reproduce(args, cfg, out) -> int:
    from .suite import reproduce_paper

    only = _ints(args.only) if args.only else None

    def progress(res):
        sys.stderr.write(f"claim {res.claim_id:2d} {res.status}  {res.title}\n")

    result = reproduce_paper(only=only, cache_path=cfg.cache_path, progress=progress)
    text = result.dumps()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    if cfg.fmt == "text":
        for c in result.claims:
            out.write(f"{c.claim_id:2d} {c.status} {c.title}\n")
    else:
        out.write(text + "\n")
    if not result.passed:
        for c in result.claims:
            if not c.passed:
                sys.stderr.write(f"FAIL claim {c.claim_id}: artifact {json.dumps(c.artifact_value)} "
                                 f"vs expected {json.dumps(c.reference_value)}\n")
        return 1
    return 0


COMMANDS = {
    "cohomology": _cmd_cohomology,
    "check": _cmd_check,
    "scan": _cmd_scan,
    "nef": _cmd_nef,
    "probe": _cmd_probe,
    "koszul": _cmd_koszul,
    "frobenius": _cmd_frobenius,
    "reproduce-paper": _cmd_reproduce,
}


VALUE_FLAGS = ("--divisor", "--twist")


def _glue_negative_values(argv: list[str]) -> list[str]:
    """Turn ``--divisor -2,1,3`` into ``--divisor=-2,1,3`` so argparse accepts it."""
    out, k = [], 0
    while k < len(argv):
        a = argv[k]
        nxt = argv[k + 1] if k + 1 < len(argv) else ""
        if a in VALUE_FLAGS and nxt.startswith("-") and nxt[1:2].isdigit():
            out.append(f"{a}={argv[k + 1]}")
            k += 2
            continue
        out.append(a)
        k += 1
    return out


def run_command(argv: Sequence[str] | None = None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    argv = _glue_negative_values(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = _config(args)
        return COMMANDS[args.command](args, cfg, out)
    except (UsageError, ValueError, KeyError) as exc:
        sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return 2


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
