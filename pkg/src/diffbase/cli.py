"""Command-line interface.

Subcommands: delta, bounds, construct, verify, table, ring-check.
Exit codes: 0 success, 1 usage or parse error, 2 budget exhausted,
3 verification or census failure.  Machine output is deterministic for a
fixed configuration; characteristics print truncated (not rounded) to four
decimals in text and CSV, full precision in JSON.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from typing import Optional

from . import constructions
from .bounds import BoundsCache, best_bounds, lower_bound
from .certificates import Certificate, check_certificate
from .galois import (
    CensusMismatchError,
    RingError,
    make_ring,
    star_group,
    star_power_census,
    unit_group_spec,
)
from .groups import GroupError, GroupParseError, GroupSpec, parse_group_spec
from .solver import SearchConfig, min_difference_basis, solve_table
from .tables import fixture_groups

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_BUDGET = 2
EXIT_VERIFY = 3


def truncate4(x: float) -> str:
    """Truncated, not rounded, to 4 decimals."""
    return f"{math.floor(x * 10000) / 10000:.4f}"


def paper_decimal(x: float) -> str:
    return truncate4(x).replace(".", ",") + "..."


def _emit(obj, fmt: str, paper_style: bool = False) -> None:
    if fmt == "json":
        print(json.dumps(obj, sort_keys=True, indent=1))
    elif fmt == "csv":
        rows = obj if isinstance(obj, list) else [obj]
        cols = ["group", "order", "lb", "delta", "characteristic", "method", "status"]
        print(",".join(cols))
        for row in rows:
            print(
                ",".join(
                    truncate4(row[c])
                    if c == "characteristic" and isinstance(row.get(c), float)
                    else str(row.get(c, ""))
                    for c in cols
                )
            )
    else:
        rows = obj if isinstance(obj, list) else [obj]
        for row in rows:
            parts = []
            for key, val in row.items():
                if key == "characteristic" and isinstance(val, float):
                    val = paper_decimal(val) if paper_style else truncate4(val)
                if key == "paper_group":
                    continue
                parts.append(f"{key}={val}")
            print("  ".join(parts))


def _search_config(args) -> SearchConfig:
    return SearchConfig(
        time_budget_ms=args.budget_ms,
        worker_count=args.threads,
        symmetry_level=args.symmetry,
    )


def cmd_delta(args) -> int:
    try:
        spec = parse_group_spec(args.group)
    except GroupError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    cache = BoundsCache(args.cache) if args.cache else None
    rec = best_bounds(spec, "with-constructions", cache=cache)
    if cache:
        cache.save()
    lb = rec.lower
    if rec.closed():
        cert = constructions.best_certificate(spec)
        result_delta, status, witness = rec.upper, "proved-optimal", cert
        nodes = 0
    else:
        result = min_difference_basis(
            spec,
            None,
            _search_config(args),
            initial_certificate=constructions.best_certificate(spec),
        )
        result_delta, status, witness = result.delta, result.status, result.certificate
        nodes = result.nodes_explored
    report = {
        "group": spec.descriptor(),
        "order": spec.order,
        "lb": lb,
        "delta": result_delta if status == "proved-optimal" else None,
        "bracket": None
        if status == "proved-optimal"
        else [lb, result_delta],
        "characteristic": result_delta / math.sqrt(spec.order),
        "status": status,
        "witness": [list(b) for b in witness.basis] if witness else None,
    }
    if args.timings:
        report["nodes"] = nodes
    _emit(report, args.format, args.paper_style)
    if args.emit_cert and witness is not None:
        with open(args.emit_cert, "w") as fh:
            fh.write(witness.dumps())
    return EXIT_OK if status == "proved-optimal" else EXIT_BUDGET


def cmd_bounds(args) -> int:
    try:
        spec = parse_group_spec(args.group)
    except GroupError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    cache = BoundsCache(args.cache) if args.cache else None
    rec = best_bounds(spec, args.effort, cache=cache)
    if cache:
        cache.save()
    print(json.dumps(rec.to_json(), sort_keys=True, indent=1))
    return EXIT_OK


def cmd_table(args) -> int:
    family = (
        "cyclic"
        if args.cyclic
        else "noncyclic-abelian"
        if args.noncyclic_abelian
        else "all-abelian"
    )
    max_order = args.max
    if max_order > 48 and family != "cyclic" and not args.extended:
        print(
            "error: non-cyclic sweeps past order 48 need --extended",
            file=sys.stderr,
        )
        return EXIT_USAGE
    if max_order > 64 and family == "cyclic" and not args.extended:
        print("error: cyclic sweeps past order 64 need --extended", file=sys.stderr)
        return EXIT_USAGE
    extra = fixture_groups().values() if args.with_fixtures else ()
    rows = solve_table(
        args.min,
        max_order,
        family=family,
        cfg=_search_config(args),
        extra_groups=extra,
    )
    _emit(rows, args.format, args.paper_style)
    return EXIT_BUDGET if any(r["status"] == "budget" for r in rows) else EXIT_OK


def cmd_verify(args) -> int:
    try:
        with open(args.certificate) as fh:
            cert = Certificate.loads(fh.read())
    except (OSError, ValueError, KeyError, GroupError) as exc:
        print(f"error: malformed certificate: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        report = check_certificate(cert)
    except GroupError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    if report.valid:
        print(
            json.dumps(
                {"valid": True, "group": cert.group.descriptor(), "size": cert.size},
                sort_keys=True,
            )
        )
        return EXIT_OK
    print(
        json.dumps(
            {
                "valid": False,
                "missed": [list(m) if isinstance(m, tuple) else m for m in report.missed],
            },
            sort_keys=True,
        )
    )
    return EXIT_VERIFY


def cmd_construct(args) -> int:
    try:
        cert = _construct(args)
    except (GroupError, RingError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    payload = cert.dumps()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(payload)
        print(f"wrote {args.out} (method={cert.method}, size={cert.size})")
    else:
        print(payload)
    return EXIT_OK


def _construct(args) -> Certificate:
    method = args.method
    if method == "quadratic":
        return constructions.quadratic_base(make_ring(args.p, args.k, args.r))
    if method == "star-quadratic":
        return constructions.star_quadratic_base(make_ring(args.p, args.k, args.r))
    if method == "diagonal-unit":
        return constructions.diagonal_unit_base(make_ring(args.p, args.k, args.r))
    if method == "singer":
        return constructions.singer_basis(args.q)
    if method == "bose-chowla":
        return constructions.bose_chowla_basis(args.q)
    if method == "interval":
        ib = constructions.interval_basis(args.n)
        raise GroupError(
            f"interval bases are not group certificates; size {ib.size} for "
            f"[1,{args.n}] with marks {list(ib.marks)}"
        )
    if method == "cyclic-interval":
        return constructions.cyclic_from_interval(args.n)
    if method == "recursive-p":
        return constructions.recursive_p_basis(parse_group_spec(args.group))
    raise GroupError(f"unknown construction {method!r}")


def cmd_ring_check(args) -> int:
    try:
        ring = make_ring(args.p, args.k, args.r)
    except RingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report = {"ring": ring.to_json()}
    ok = True
    try:
        units = unit_group_spec(ring)
        report["unit_group"] = {
            "claimed": units.descriptor(),
            "verified": ring.size <= 4096,
        }
    except CensusMismatchError as exc:
        report["unit_group"] = {"error": str(exc)}
        ok = False
    try:
        sg = star_group(ring)
        entry = {"claimed": sg.claimed.descriptor(), "verified": sg.verified}
        if sg.verified:
            entry["order_census"] = {
                str(k): v for k, v in sorted(star_power_census(ring).items())
            }
        report["star_group"] = entry
    except CensusMismatchError as exc:
        report["star_group"] = {"error": str(exc)}
        ok = False
    print(json.dumps(report, sort_keys=True, indent=1))
    return EXIT_OK if ok else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="diffbase",
        description="Difference bases of finite groups: exact sizes, "
        "constructive certificates, closed-form bounds.",
    )
    ap.add_argument("--format", choices=("json", "csv", "text"), default="json")
    ap.add_argument("--budget-ms", type=int, default=None)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument(
        "--symmetry",
        choices=(
            "auto",
            "none",
            "translation",
            "translation+negation",
            "translation+multiplier",
        ),
        default="auto",
    )
    ap.add_argument(
        "--cache",
        default=os.environ.get("DIFFBASE_CACHE"),
        help="bounds cache path (env DIFFBASE_CACHE)",
    )
    ap.add_argument("--extended", action="store_true",
                    help="unlock long-running table tiers")
    ap.add_argument("--paper-style", action="store_true",
                    help="comma decimal separators in text output")
    ap.add_argument("--timings", action="store_true",
                    help="include volatile timing/node counts in output")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("delta", help="exact minimum difference size")
    p.add_argument("--group", required=True)
    p.add_argument("--emit-cert", default=None)
    p.set_defaults(func=cmd_delta)

    p = sub.add_parser("bounds", help="closed-form bracket with trace")
    p.add_argument("--group", required=True)
    p.add_argument(
        "--effort",
        choices=("formulas-only", "with-constructions", "with-solver"),
        default="with-constructions",
    )
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("table", help="difference sizes over an order range")
    p.add_argument("--min", type=int, default=1)
    p.add_argument("--max", type=int, required=True)
    fam = p.add_mutually_exclusive_group()
    fam.add_argument("--cyclic", action="store_true")
    fam.add_argument("--noncyclic-abelian", action="store_true")
    p.add_argument("--with-fixtures", action="store_true",
                   help="include the bundled non-abelian groups")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("verify", help="check a certificate file")
    p.add_argument("certificate")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("construct", help="emit a construction certificate")
    p.add_argument(
        "method",
        choices=(
            "quadratic",
            "star-quadratic",
            "diagonal-unit",
            "singer",
            "bose-chowla",
            "interval",
            "cyclic-interval",
            "recursive-p",
        ),
    )
    p.add_argument("--p", type=int, default=None)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--q", type=int, default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--group", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("ring-check", help="verify ring structure theorems")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.set_defaults(func=cmd_ring_check)
    return ap


def main(argv: Optional[list[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except (GroupParseError,) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
