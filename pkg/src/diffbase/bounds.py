"""Closed-form lower and upper bounds on difference sizes, with provenance.

Real-valued characteristic bounds are converted to integer bounds
conservatively: an upper bound eth yields floor(eth * sqrt(|G|) + 1e-9),
and the lower-bound radicand is handled entirely in integer arithmetic.
best_bounds aggregates every applicable formula (and, at higher effort,
construction certificates and the exact solver) into one bracket per
group, memoized by canonical factor sequence.
"""

from __future__ import annotations

import functools
import itertools
import json
import math
import os
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

from .groups import (
    GroupSpec,
    GroupError,
    abelian_group,
    count_involutions,
    group_view,
    _factorize,
)

EFFORTS = ("formulas-only", "with-constructions", "with-solver")

KOZMA_LEV = 4.0 / math.sqrt(3.0)


def _lb_from_radicand(radicand: int) -> int:
    """Smallest integer s with (2s - 1)^2 >= radicand (s >= 1)."""
    if radicand <= 1:
        return 1
    c = math.isqrt(radicand - 1) + 1  # ceil of sqrt
    return (c + 2) // 2


def lower_bound(spec: GroupSpec, target_stats: Optional[tuple[int, int]] = None) -> int:
    """Involution-aware counting bound.

    For a full group: ceil((1 + sqrt(4|G| + 4|G2| - 3)) / 2).  For a subset
    pass target_stats = (#elements of order > 2, #involutions) and the bound
    becomes ceil((1 + sqrt(4*a + 8*i + 1)) / 2).
    """
    if target_stats is None:
        g2 = count_involutions(spec)
        radicand = 4 * spec.order + 4 * g2 - 3
    else:
        a_gt2, a_2 = target_stats
        radicand = 4 * a_gt2 + 8 * a_2 + 1
    return _lb_from_radicand(radicand)


def target_stats_of(spec: GroupSpec, keys: Iterable[int]) -> tuple[int, int]:
    view = group_view(spec)
    inv = view.inv_table
    a_gt2 = a_2 = 0
    for k in keys:
        if k == 0:
            continue
        if int(inv[k]) == k:
            a_2 += 1
        else:
            a_gt2 += 1
    return a_gt2, a_2


def trivial_upper(spec: GroupSpec) -> int:
    return (spec.order + 1 + 1) // 2  # ceil((|G|+1)/2)


def _eth_to_delta(eth: float, order: int) -> int:
    return int(math.floor(eth * math.sqrt(order) + 1e-9))


def _delta_to_eth(delta: int, order: int) -> float:
    return delta / math.sqrt(order)


def _divisors(n: int) -> list[int]:
    out = [d for d in range(1, n + 1) if n % d == 0]
    return out


def coordinate_subgroup_splits(spec: GroupSpec) -> list[tuple[GroupSpec, GroupSpec]]:
    """Proper (H, G/H) pairs where H is a product of subgroups of each
    cyclic factor.  Coordinate-aligned only; the general subgroup lattice
    is deliberately not enumerated."""
    if spec.kind != "abelian":
        return []
    choices = [_divisors(f) for f in spec.factors]
    seen = set()
    out = []
    for combo in itertools.product(*choices):
        h = math.prod(combo)
        if h == 1 or h == spec.order:
            continue
        hs = abelian_group([d for d in combo if d > 1])
        qs = abelian_group(
            [f // d for f, d in zip(spec.factors, combo) if f // d > 1]
        )
        key = (hs.factors, qs.factors)
        if key in seen:
            continue
        seen.add(key)
        out.append((hs, qs))
    return out


def structural_upper_bounds(
    spec: GroupSpec, child_upper: Optional[Callable[[GroupSpec], int]] = None
) -> list[dict]:
    """Trivial bound, |H| + |G/H| - 1 over coordinate splits, and the
    product bound over the same splits using memoized child values."""
    entries = [
        {"method": "trivial-half", "value": trivial_upper(spec)},
    ]
    best_sum = None
    best_prod = None
    for hs, qs in coordinate_subgroup_splits(spec):
        v = hs.order + qs.order - 1
        if best_sum is None or v < best_sum[0]:
            best_sum = (v, hs, qs)
        if child_upper is not None:
            pv = child_upper(hs) * child_upper(qs)
            if best_prod is None or pv < best_prod[0]:
                best_prod = (pv, hs, qs)
    if best_sum:
        entries.append(
            {
                "method": f"subgroup-sum({best_sum[1].descriptor()})",
                "value": best_sum[0],
            }
        )
    if best_prod:
        entries.append(
            {
                "method": f"subgroup-product({best_prod[1].descriptor()})",
                "value": best_prod[0],
            }
        )
    return entries


def _p_group(spec: GroupSpec) -> Optional[tuple[int, list[int]]]:
    if spec.kind != "abelian" or not spec.factors:
        return None
    fac = [_factorize(f)[0] for f in spec.factors]
    primes = {p for p, _ in fac}
    if len(primes) != 1:
        return None
    p = primes.pop()
    return p, [e for _, e in fac]


def characteristic_bound_catalog(
    spec: GroupSpec, exact_eth: Optional[Callable[[GroupSpec], Optional[float]]] = None
) -> list[dict]:
    """Every applicable closed-form characteristic bound, evaluated
    numerically, with the implied integer bound on the difference size."""
    n = spec.order
    out: list[dict] = []

    def add(method: str, eth: float, note: str = "") -> None:
        out.append(
            {
                "method": method,
                "eth": eth,
                "value": _eth_to_delta(eth, n),
                **({"note": note} if note else {}),
            }
        )

    add("kozma-lev", KOZMA_LEV)

    cyclic = spec.kind == "abelian" and len(canonical_invariant(spec)) <= 1
    if cyclic and n >= 2:
        add("cyclic-3/2", 1.5)
        if n != 4:
            add("cyclic-sqrt2", math.sqrt(2.0))
        if n >= 9:
            add("cyclic-12/sqrt73", 12.0 / math.sqrt(73.0))
            if n != 292:
                # the sharper constant from the same family of interval bounds
                add("cyclic-24/sqrt293", 24.0 / math.sqrt(293.0))

    pg = _p_group(spec)
    if pg:
        p, exps = pg
        m = len(exps)
        if p >= 11:
            add(
                "odd-p-group-recursion",
                (math.sqrt(p) - 1.0)
                / (math.sqrt(p) - 3.0)
                * (24.0 / math.sqrt(293.0)),
            )
        if p == 2 and all(e == 1 for e in exps):
            # elementary abelian: subgroup split gives strict power-of-two caps
            half = m // 2
            if m % 2 == 0:
                delta_cap = 2 ** (half + 1) - 1
            else:
                delta_cap = 3 * 2**half - 1
            add("boolean-split", delta_cap / math.sqrt(n), note="strict bound")
        if p == 2 and all(e == 2 for e in exps):
            # C_4^m: 1 + eth(C_2^m)/sqrt(2^m) - 1/2^m, child exact when the
            # formula bracket is already closed, else the weak closed form
            child = abelian_group([2] * m)
            ce = exact_eth(child) if exact_eth else None
            if ce is not None:
                add("quartic-recursion", 1.0 + ce / math.sqrt(2**m) - 1.0 / 2**m)
            add(
                "quartic-recursion-weak",
                1.0 - 1.0 / 2**m + 3.0 / math.sqrt(2 ** (m + 1)),
            )
        if p != 2 and len(set(exps)) == 1 and m % 2 == 0:
            half = m // 2
            add(
                "odd-square-rank",
                1.0 + (1.0 / math.sqrt(p**half)) * KOZMA_LEV,
            )
        if p == 2 and len(set(exps)) == 1 and exps[0] >= 2:
            k = exps[0]
            if m % 2 == 0 and m >= 2:
                half = m // 2
                add(
                    "even-square-rank",
                    1.0
                    + (1.0 / math.sqrt(2**half))
                    * (3.0 / math.sqrt(2.0) + KOZMA_LEV),
                )
            elif m % 2 == 1 and m >= 3:
                half = m // 2
                add(
                    "even-odd-rank",
                    1.5 * (1.0 + 3.0 / math.sqrt(2 ** (half + 1)))
                    + 4.0 / math.sqrt(3.0 * 2**half),
                )

    shape = _ring_times_units_shape(spec)
    if shape:
        p, k, r = shape
        f = float(p**r)
        add(
            f"ring-times-units(GR({p}^{k},{r}))",
            math.sqrt(1.0 - 1.0 / f)
            + KOZMA_LEV * (1.0 / math.sqrt(f) + 1.0 / math.sqrt(f - 1.0)),
        )
    return out


def canonical_invariant(spec: GroupSpec) -> tuple[int, ...]:
    """Invariant factors n_1 | n_2 | ... of an abelian spec."""
    if spec.kind != "abelian":
        raise GroupError("invariant factors need an abelian spec")
    by_prime: dict[int, list[int]] = {}
    for f in spec.factors:
        (p, e), = _factorize(f)
        by_prime.setdefault(p, []).append(e)
    ranks = max((len(v) for v in by_prime.values()), default=0)
    out = []
    for i in range(ranks):
        v = 1
        for p, exps in by_prime.items():
            exps_sorted = sorted(exps, reverse=True)
            if i < len(exps_sorted):
                v *= p ** exps_sorted[i]
        out.append(v)
    return tuple(sorted(out))


@functools.lru_cache(maxsize=None)
def _ring_times_units_shape(spec: GroupSpec) -> Optional[tuple[int, int, int]]:
    """Detect canonical factors equal to C_{p^k}^r x U(GR(p^k, r))."""
    from types import SimpleNamespace

    from .galois import claimed_unit_group  # local import avoids cycles

    if spec.kind != "abelian":
        return None
    n = spec.order
    for p in (2, 3, 5, 7, 11, 13):
        for k in range(1, 12):
            if p**k > n:
                break
            for r in range(1, 12):
                size = p ** (k * r)
                if size > n:
                    break
                units = size - p ** ((k - 1) * r)
                if size * units != n:
                    continue
                ring = SimpleNamespace(p=p, k=k, r=r)
                shape = abelian_group(
                    [p**k] * r + list(claimed_unit_group(ring).factors)
                )
                if shape.factors == spec.factors:
                    return (p, k, r)
    return None


def ruzsa_formula_bound(
    p: int, delta_of: Callable[[int], Optional[int]]
) -> Optional[dict]:
    """Arithmetic-only bound for the cyclic group of order p^2 - p."""
    dp = delta_of(p)
    dp1 = delta_of(p - 1)
    if dp is None or dp1 is None:
        raise GroupError(f"missing cyclic values for p={p}")
    return {
        "method": f"ruzsa(p={p})",
        "value": p - 3 + dp + dp1,
        "group_order": p * p - p,
    }


@dataclass
class BoundRecord:
    group: GroupSpec
    lower: int
    upper: int
    characteristic_upper: float
    trace: list = field(default_factory=list)

    def closed(self) -> bool:
        return self.lower == self.upper

    def to_json(self) -> dict:
        return {
            "group": self.group.descriptor(),
            "order": self.group.order,
            "lower": self.lower,
            "upper": self.upper,
            "characteristic_upper": self.characteristic_upper,
            "trace": self.trace,
        }


class BoundsCache:
    """(canonical descriptor -> record) pairs, optionally persisted as JSON."""

    def __init__(self, path: Optional[str] = None):
        self.path = path
        self._mem: dict[tuple[str, str], BoundRecord] = {}
        self._disk: dict[str, dict] = {}
        if path and os.path.exists(path):
            with open(path) as fh:
                self._disk = json.load(fh)

    def get(self, spec: GroupSpec, effort: str) -> Optional[BoundRecord]:
        return self._mem.get((spec.descriptor(), effort))

    def put(self, spec: GroupSpec, effort: str, record: BoundRecord) -> None:
        self._mem[(spec.descriptor(), effort)] = record

    def save(self) -> None:
        if not self.path:
            return
        for (desc, effort), rec in self._mem.items():
            cur = self._disk.get(desc)
            if cur is None or rec.upper < cur["upper"] or rec.lower > cur["lower"]:
                self._disk[desc] = {
                    "lower": max(rec.lower, cur["lower"] if cur else rec.lower),
                    "upper": min(rec.upper, cur["upper"] if cur else rec.upper),
                    "effort": effort,
                }
        tmp = self.path + ".tmp"
        with open(tmp, "w") as fh:
            json.dump(self._disk, fh, sort_keys=True, indent=1)
        os.replace(tmp, self.path)


_default_cache = BoundsCache()


def best_bounds(
    spec: GroupSpec,
    effort: str = "with-constructions",
    cache: Optional[BoundsCache] = None,
) -> BoundRecord:
    """Tightest bracket from every source available at the requested effort.

    formulas-only: closed forms; with-constructions: adds certificate sizes
    from the constructions module; with-solver: adds an exact search."""
    if effort not in EFFORTS:
        raise GroupError(f"unknown effort {effort!r}")
    cache = cache or _default_cache
    hit = cache.get(spec, effort)
    if hit is not None:
        return hit

    trace: list[dict] = []
    lb = lower_bound(spec)
    trace.append({"side": "lower", "method": "involution-count", "value": lb})

    def child_upper(child: GroupSpec) -> int:
        child_effort = "with-constructions" if effort == "with-solver" else effort
        return best_bounds(child, child_effort, cache).upper

    uppers: list[tuple[int, str]] = []
    if spec.kind == "abelian":
        for e in structural_upper_bounds(spec, child_upper):
            uppers.append((e["value"], e["method"]))
    else:
        uppers.append((trivial_upper(spec), "trivial-half"))

    def exact_eth(child: GroupSpec) -> Optional[float]:
        rec = best_bounds(child, "formulas-only", cache)
        if rec.closed():
            return _delta_to_eth(rec.upper, child.order)
        return None

    eth_min = KOZMA_LEV
    if spec.kind == "abelian":
        for e in characteristic_bound_catalog(spec, exact_eth):
            uppers.append((e["value"], e["method"]))
            eth_min = min(eth_min, e["eth"])

    if effort in ("with-constructions", "with-solver") and spec.kind == "abelian":
        from . import constructions  # deferred: constructions import this module's peers

        cert = constructions.best_certificate(spec)
        if cert is not None:
            uppers.append((cert.size, f"certificate:{cert.method}"))

    if effort == "with-solver":
        from . import solver  # deferred import; solver layer sits above bounds

        pre_upper = min(v for v, _ in uppers)
        result = solver.min_difference_basis(
            spec,
            None,
            solver.SearchConfig(initial_upper=min(pre_upper, trivial_upper(spec))),
        )
        if result.status == "proved-optimal":
            uppers.append((result.delta, "solver"))
            lb = max(lb, result.delta)
            trace.append({"side": "lower", "method": "solver", "value": result.delta})

    upper, method = min(uppers, key=lambda t: (t[0], t[1]))
    for v, m in sorted(uppers, key=lambda t: (t[0], t[1])):
        trace.append({"side": "upper", "method": m, "value": v})
    record = BoundRecord(
        group=spec,
        lower=lb,
        upper=upper,
        characteristic_upper=min(eth_min, _delta_to_eth(upper, spec.order)),
        trace=trace,
    )
    if record.lower > record.upper:
        raise GroupError(
            f"bound inversion for {spec.descriptor()}: {record.lower} > {record.upper}"
        )
    cache.put(spec, effort, record)
    return record
