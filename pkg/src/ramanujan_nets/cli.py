"""ramanujan-nets: scan primes, build colored Cayley graphs, verify them, run the protocol demo.

Exit codes: 0 ok, 1 empty result, 2 invalid input, 3 verification failure.
Set RAMANUJAN_NETS_THREADS to cap BLAS/numba threads.
"""
from __future__ import annotations

import os

_threads = os.environ.get("RAMANUJAN_NETS_THREADS")
if _threads:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS", "NUMBA_NUM_THREADS"):
        os.environ.setdefault(_var, _threads)

import argparse  # noqa: E402
import json  # noqa: E402
import logging  # noqa: E402
import sys  # noqa: E402
from pathlib import Path  # noqa: E402

import numpy as np  # noqa: E402

from . import protocol  # noqa: E402
from .cayley import (  # noqa: E402
    GroupContext,
    build_colored_cayley,
    graph_from_edge_lines,
    parity_components,
    verify_square_property,
    write_exports,
)
from .generators import GeneratorCountError, hilbert_generators, lps_generators, square_table  # noqa: E402
from .numbertheory import certify, is_prime, legendre, pell_rep, scan_lps_N, scan_valid_N  # noqa: E402
from .spectral import DENSE_CAP, RAMANUJAN_TOL, spectral_report  # noqa: E402

SCHEMA_VERSION = 1
EXIT_OK, EXIT_EMPTY, EXIT_INVALID, EXIT_FAILED = 0, 1, 2, 3
DEFAULT_MAX_VERTICES = 2_000_000

log = logging.getLogger("ramanujan_nets")


class InvalidInput(Exception):
    """Raised for precondition failures; reported with exit code 2."""


def _emit(doc: dict, path: str | None) -> None:
    doc = {"schema_version": SCHEMA_VERSION, **doc}
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


# --- scan -------------------------------------------------------------------


def cmd_scan(args) -> int:
    if args.field == "Q":
        ps = [args.p] + ([args.q] if args.q else [])
        for p in ps:
            if not is_prime(p) or p % 4 != 1:
                raise InvalidInput(f"p={p} must be a prime congruent to 1 mod 4")
        rows = scan_lps_N(ps, args.limit)
        print(f"{'N':>8} {'sqrt(-1)':>9}  roots")
        for c in rows:
            print(f"{c.N:>8} {c.sqrt_m1:>9}  " + " ".join(f"sqrt({p})={r}" for p, r in c.roots.items()))
        doc = {"command": "scan", "field": "Q", "p": ps, "limit": args.limit, "results": [c.to_dict() for c in rows]}
    else:
        p = args.p
        if not is_prime(p) or p % 20 not in (1, 9):
            raise InvalidInput(f"p={p} must be a prime congruent to 1 or 9 mod 20")
        rows = scan_valid_N(p, args.limit)
        pi = pell_rep(p, 4)
        print(f"pi = ({pi.a} + 2*{pi.b}*sqrt5)/2")
        print(f"{'N':>8} {'a':>6} {'b':>6} {'sqrt(-1)':>9} {'sqrt5':>7} {'pi res':>8} {'pibar res':>9}")
        for c in rows:
            print(f"{c.N:>8} {c.pell.a:>6} {c.pell.b:>6} {c.sqrt_m1:>9} {c.sqrt_5:>7} {c.pi_residues[0]:>8} {c.pi_residues[1]:>9}")
        doc = {
            "command": "scan",
            "field": "Q_sqrt5",
            "p": p,
            "pi": [pi.a, pi.b],
            "limit": args.limit,
            "results": [c.to_dict() for c in rows],
        }
    print(f"{len(rows)} valid N <= {args.limit}")
    if args.json:
        _emit(doc, args.json)
    return EXIT_OK if rows else EXIT_EMPTY


# --- build ------------------------------------------------------------------


def _prepare(args):
    """Validate the field/prime/modulus combination and return (ctx, sets, table, meta)."""
    N = args.N
    if N is None:
        raise InvalidInput("--N is required")
    if not is_prime(N) or N <= 2:
        raise InvalidInput(f"N={N} must be an odd prime")
    if args.field == "Q":
        ps = [args.p] + ([args.q] if args.q else [])
        for p in ps:
            if not is_prime(p) or p % 4 != 1:
                raise InvalidInput(f"p={p} must be a prime congruent to 1 mod 4")
        if len(set(ps)) != len(ps):
            raise InvalidInput("p and q must be distinct")
        if N % 4 != 1:
            raise InvalidInput(f"N={N}: -1 must be a square, so N must be 1 mod 4")
        for p in ps:
            if N == p:
                raise InvalidInput(f"N={N} must differ from p={p}")
            if legendre(p, N, certified=True) != 1:
                raise InvalidInput(f"N={N}: norm p={p} is not a square mod N")
        ctx = GroupContext.rational(N)
        _check_size(ctx, args.max_vertices)
        sets = [lps_generators(p, color) for p, color in zip(ps, ("red", "blue"))]
        meta = {"field": "Q", "p": ps, "N": N}
    else:
        p = args.p
        if not is_prime(p) or p % 20 not in (1, 9):
            raise InvalidInput(f"p={p} must be a prime congruent to 1 or 9 mod 20")
        if N == p or N % 20 not in (1, 9):
            raise InvalidInput(f"N={N} must differ from p and be 1 or 9 mod 20")
        cert = certify(N, pell_rep(p, 4))
        if not cert.pi_split_ok:
            raise InvalidInput(f"N={N}: pi and pi_bar are not both squares mod N")
        if not cert.tau_is_square and not args.relax_tau:
            raise InvalidInput(f"N={N}: tau is not a square mod N (pass --relax-tau to build anyway)")
        ctx = GroupContext.from_certificate(cert)
        _check_size(ctx, args.max_vertices)
        try:
            sets = list(hilbert_generators(p))
        except GeneratorCountError as exc:
            raise InvalidInput(str(exc)) from exc
        meta = {"field": "Q_sqrt5", "p": p, "N": N, "certificate": cert.to_dict()}
    table = square_table(sets[0], sets[1]) if len(sets) == 2 else None
    return ctx, sets, table, meta


def _check_size(ctx: GroupContext, cap: int) -> None:
    if ctx.order > cap:
        raise InvalidInput(f"|PSL(2,F_{ctx.N})| = {ctx.order} exceeds --max-vertices {cap}")


def cmd_build(args) -> int:
    ctx, sets, table, meta = _prepare(args)
    graph = build_colored_cayley(ctx, sets)
    comps = {c: parity_components(graph, c).to_dict() for c in graph.labels}
    summary = graph.summary(comps)
    summary.update(meta)
    if args.out:
        paths = write_exports(graph, args.out, comps)
        summary["files"] = paths
    if args.generators:
        gdoc = {"generator_sets": [s.to_dict() for s in sets]}
        if table is not None:
            gdoc["square_table"] = table.to_dict()
        _emit(gdoc, args.generators)
    print(f"N={ctx.N}: {graph.n} vertices; " + ", ".join(f"{c.label} r={c.r}" for c in graph.colors))
    if args.json:
        _emit({"command": "build", **summary}, args.json)
    return EXIT_OK


# --- verify -----------------------------------------------------------------


def cmd_verify(args) -> int:
    table = None
    if args.graph:
        try:
            graph = graph_from_edge_lines(Path(args.graph).read_text().splitlines())
        except ValueError as exc:
            print(f"regularity audit failed: {exc}", file=sys.stderr)
            _emit({"command": "verify", "ok": False, "error": str(exc)}, args.json)
            return EXIT_FAILED
    else:
        ctx, sets, table, _ = _prepare(args)
        graph = build_colored_cayley(ctx, sets)
    reports, ok = [], True
    for label in graph.labels:
        pc = parity_components(graph, label)
        method = None if args.method == "auto" else args.method
        if method is None and graph.n > args.dense_cap:
            method = "iterative"
        rep = spectral_report(
            graph,
            label,
            bipartite=pc.is_bipartite,
            bipartition=_sides(graph, label) if pc.is_bipartite and pc.connected else None,
            method=method,
            tol=args.tol,
            girth_sources=range(min(graph.n, args.girth_sources)) if graph.n > args.dense_cap else None,
        )
        d = rep.to_dict()
        d["components"] = pc.to_dict()
        reports.append(d)
        ok &= rep.verdict and pc.connected
        print(
            f"{label}: n={rep.n} r={rep.r} lambda2={rep.lambda_max_nontrivial:.6f} lambda_min={rep.lambda_min:.6f} "
            f"bound={rep.ramanujan_bound:.6f} ramanujan={rep.verdict} girth={rep.girth} diameter={rep.diameter}"
        )
    doc = {"command": "verify", "spectral": reports}
    if len(graph.labels) >= 2:
        red, blue = graph.labels[:2]
        sq = verify_square_property(graph, (red, blue), mode=("sample", args.square_sample), table=table)
        doc["square"] = sq.to_dict()
        ok &= sq.failures == 0
        print(f"square property ({sq.method}): {sq.pairs_checked} pairs, {sq.failures} failures")
    doc["ok"] = bool(ok)
    _emit(doc, args.json)
    return EXIT_OK if ok else EXIT_FAILED


def _sides(graph, label) -> np.ndarray:
    from .cayley import bfs_levels

    return bfs_levels(graph.adjacency(label), 0) % 2


# --- protocol ---------------------------------------------------------------


def cmd_protocol(args) -> int:
    ctx, sets, table, _ = _prepare(args)
    if len(sets) < 2:
        raise InvalidInput("the protocol demo needs two colors (--q)")
    graph = build_colored_cayley(ctx, sets)
    payload = Path(args.payload).read_bytes() if args.payload else b"ramanujan networks demo payload"
    rng = np.random.default_rng(args.seed)
    src = args.src if args.src is not None else 0
    dst = args.dst if args.dst is not None else int(rng.integers(graph.n))
    for v in (src, dst):
        if not 0 <= v < graph.n:
            raise InvalidInput(f"vertex {v} out of range")
    red, blue = graph.labels[:2]
    try:
        tx = protocol.send_with_cross_check(graph, payload, src, dst, red, blue, args.seed, table=table)
    except protocol.RoutingError as exc:
        print(f"routing failed: {exc}", file=sys.stderr)
        return EXIT_FAILED
    if args.tamper == "byte" and tx.payload:
        k = int(rng.integers(len(tx.payload)))
        b = bytearray(tx.payload)
        b[k] ^= 0x01
        tx.payload = bytes(b)
    elif args.tamper == "edge" and tx.path:
        k = int(rng.integers(len(tx.path)))
        hop = tx.path[k]
        tx.path[k] = protocol.Hop(hop.vertex, hop.color, (hop.gen + 1) % graph.color(hop.color).r)
    result = protocol.verify_transmission(graph, tx)
    ds = protocol.disperse(graph, payload, args.g, args.seed, src=src)
    roundtrip = protocol.reconstruct(ds) == payload
    doc = {
        "command": "protocol",
        "tamper": args.tamper,
        "transmission": tx.to_dict(),
        "verification": {"accepted": result.accepted, "reason": result.reason, "hop": result.hop},
        "dispersal": ds.to_dict(),
        "dispersal_roundtrip": roundtrip,
    }
    _emit(doc, args.json)
    print(f"transmission {'accepted' if result.accepted else 'rejected'} ({result.reason}); dispersal round trip {roundtrip}")
    return EXIT_OK if result.accepted and roundtrip else EXIT_FAILED


# --- parser -----------------------------------------------------------------


def _add_pipeline_args(sp) -> None:
    sp.add_argument("--field", choices=("Q", "Q_sqrt5"), default="Q")
    sp.add_argument("--p", type=int, required=True, help="prime for the first color")
    sp.add_argument("--q", type=int, help="prime for a second color (field Q only)")
    sp.add_argument("--N", type=int, help="modulus of PSL(2, F_N)")
    sp.add_argument("--relax-tau", action="store_true", help="Q_sqrt5: accept N where tau is not a square mod N")
    sp.add_argument("--max-vertices", type=int, default=DEFAULT_MAX_VERTICES)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--json", help="write the JSON report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ramanujan-nets", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("scan", help="list moduli N meeting the selection criteria")
    sp.add_argument("--field", choices=("Q", "Q_sqrt5"), default="Q_sqrt5")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--q", type=int)
    sp.add_argument("--limit", type=int, required=True)
    sp.add_argument("--json", help="also write the certificates as JSON")
    sp.set_defaults(func=cmd_scan)

    sp = sub.add_parser("build", help="build the colored Cayley graph and export it")
    _add_pipeline_args(sp)
    sp.add_argument("--out", help="prefix for .edges/.dot/.json exports")
    sp.add_argument("--generators", help="write generator sets and square table as JSON")
    sp.set_defaults(func=cmd_build)

    sp = sub.add_parser("verify", help="spectral, girth and square-property checks")
    sp.add_argument("--graph", help="edge-list file (u v color per line) instead of build arguments")
    sp.add_argument("--field", choices=("Q", "Q_sqrt5"), default="Q")
    sp.add_argument("--p", type=int)
    sp.add_argument("--q", type=int)
    sp.add_argument("--N", type=int)
    sp.add_argument("--relax-tau", action="store_true")
    sp.add_argument("--max-vertices", type=int, default=DEFAULT_MAX_VERTICES)
    sp.add_argument("--method", choices=("auto", "dense", "iterative"), default="auto")
    sp.add_argument("--dense-cap", type=int, default=DENSE_CAP)
    sp.add_argument("--tol", type=float, default=RAMANUJAN_TOL)
    sp.add_argument("--girth-sources", type=int, default=16, help="BFS roots for girth above the dense cap")
    sp.add_argument("--square-sample", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--json", help="write the JSON report here instead of stdout")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("protocol", help="cross-checked transmission and XOR dispersal demo")
    _add_pipeline_args(sp)
    sp.add_argument("--payload", help="payload file (default: a fixed demo string)")
    sp.add_argument("--src", type=int)
    sp.add_argument("--dst", type=int)
    sp.add_argument("--g", type=int, default=2)
    sp.add_argument("--tamper", choices=("none", "byte", "edge"), default="none")
    sp.set_defaults(func=cmd_protocol)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.command == "verify" and not args.graph and args.p is None:
        parser.error("verify needs --graph or build arguments (--p, --N)")
    try:
        return args.func(args)
    except InvalidInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
