"""Finite group representation and structural queries.

Abelian groups are stored as a canonical sequence of prime-power cyclic
factors; elements are residue vectors.  Small non-abelian groups (used as
solver fixtures) are carried as literal Cayley tables with elements given
by their index.  Both kinds share the same packed-integer element keys so
the solver and the certificate checker can treat them uniformly.
"""

from __future__ import annotations

import functools
import math
import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence, Union

import numpy as np

DEFAULT_MAX_ORDER = 2**20

AbelianElement = tuple[int, ...]
Element = Union[AbelianElement, int]


class GroupError(ValueError):
    pass


class GroupParseError(GroupError):
    pass


class GroupOverflowError(GroupError):
    pass


def _factorize(n: int) -> list[tuple[int, int]]:
    out = []
    d = 2
    while d * d <= n:
        e = 0
        while n % d == 0:
            e += 1
            n //= d
        if e:
            out.append((d, e))
        d += 1
    if n > 1:
        out.append((n, 1))
    return out


def canonical_factors(factors: Iterable[int]) -> tuple[int, ...]:
    """Split factors into prime powers and sort ascending by (prime, exponent)."""
    parts: list[tuple[int, int]] = []
    for f in factors:
        if f < 2:
            if f == 1:
                continue
            raise GroupError(f"cyclic factor must be >= 1, got {f}")
        for p, e in _factorize(f):
            parts.append((p, e))
    parts.sort()
    return tuple(p**e for p, e in parts)


@dataclass(frozen=True)
class GroupSpec:
    """A finite group: canonical abelian factor list or a literal Cayley table."""

    kind: str  # "abelian" | "generic"
    factors: tuple[int, ...] = ()
    table: Optional[tuple[tuple[int, ...], ...]] = None
    name: Optional[str] = None

    def __post_init__(self):
        if self.kind == "abelian":
            if self.table is not None:
                raise GroupError("abelian spec carries no table")
        elif self.kind == "generic":
            if self.table is None:
                raise GroupError("generic spec requires a table")
        else:
            raise GroupError(f"unknown group kind {self.kind!r}")

    @property
    def order(self) -> int:
        if self.kind == "abelian":
            return math.prod(self.factors) if self.factors else 1
        return len(self.table)

    @property
    def is_abelian(self) -> bool:
        return self.kind == "abelian"

    def descriptor(self) -> str:
        if self.kind == "generic":
            return self.name or f"table<{self.order}>"
        if not self.factors:
            return "C1"
        runs: list[tuple[int, int]] = []
        for f in self.factors:
            if runs and runs[-1][0] == f:
                runs[-1] = (f, runs[-1][1] + 1)
            else:
                runs.append((f, 1))
        return "x".join(f"C{f}^{m}" if m > 1 else f"C{f}" for f, m in runs)

    def paper_descriptor(self) -> str:
        if self.kind == "generic":
            return self.name or f"table<{self.order}>"
        if not self.factors:
            return "C_1"
        runs: list[tuple[int, int]] = []
        for f in self.factors:
            if runs and runs[-1][0] == f:
                runs[-1] = (f, runs[-1][1] + 1)
            else:
                runs.append((f, 1))
        return "×".join(
            f"(C_{f})^{m}" if m > 1 else f"C_{f}" for f, m in runs
        )

    def to_json(self) -> dict:
        if self.kind == "abelian":
            return {"abelian": list(self.factors)}
        return {"cayley": [list(row) for row in self.table]}

    @staticmethod
    def from_json(obj: dict) -> "GroupSpec":
        if "abelian" in obj:
            return abelian_group(obj["abelian"])
        if "cayley" in obj:
            return generic_group([tuple(r) for r in obj["cayley"]])
        raise GroupParseError(f"not a group spec: {obj!r}")


def abelian_group(factors: Iterable[int], max_order: int = DEFAULT_MAX_ORDER) -> GroupSpec:
    canon = canonical_factors(factors)
    order = math.prod(canon) if canon else 1
    if order > max_order:
        raise GroupOverflowError(f"group order {order} exceeds maximum {max_order}")
    return GroupSpec(kind="abelian", factors=canon)


def generic_group(table: Sequence[Sequence[int]], name: Optional[str] = None) -> GroupSpec:
    tbl = tuple(tuple(int(v) for v in row) for row in table)
    _validate_table(tbl)
    return GroupSpec(kind="generic", table=tbl, name=name)


def _validate_table(table: tuple[tuple[int, ...], ...]) -> None:
    n = len(table)
    elems = set(range(n))
    for row in table:
        if len(row) != n or set(row) != elems:
            raise GroupError("table is not a Latin square")
    for j in range(n):
        if len({table[i][j] for i in range(n)}) != n:
            raise GroupError("table is not a Latin square")
    # identity must sit at index 0
    if any(table[0][j] != j or table[j][0] != j for j in range(n)):
        raise GroupError("table identity must be element 0")
    # associativity on all triples; fixture tables are tiny
    arr = np.asarray(table, dtype=np.int64)
    if not np.array_equal(arr[arr], arr[:, arr]):  # (a*b)*c vs a*(b*c)
        raise GroupError("table is not associative")


_TERM_RE = re.compile(r"^C(\d+)(?:\^(\d+))?$")


def parse_group_spec(text: str, max_order: int = DEFAULT_MAX_ORDER) -> GroupSpec:
    """Parse a descriptor like ``C4xC2^2`` into a canonical abelian spec."""
    s = text.strip().replace("×", "x")
    if not s:
        raise GroupParseError("empty group descriptor")
    factors: list[int] = []
    for term in s.split("x"):
        m = _TERM_RE.match(term.strip())
        if not m:
            raise GroupParseError(f"bad term {term!r} in descriptor {text!r}")
        n = int(m.group(1))
        rep = int(m.group(2)) if m.group(2) else 1
        if n < 1 or rep < 1:
            raise GroupParseError(f"bad term {term!r} in descriptor {text!r}")
        factors.extend([n] * rep)
        if math.prod(factors) > max_order:
            raise GroupOverflowError(
                f"descriptor {text!r} exceeds maximum order {max_order}"
            )
    return abelian_group(factors, max_order=max_order)


# ---------------------------------------------------------------------------
# Runtime views: packed keys and operation tables shared by solver/checker.
# ---------------------------------------------------------------------------

class GroupView:
    """Materialized element arithmetic for one GroupSpec.

    Elements are numbered 0..n-1.  For abelian groups the number is the
    mixed-radix packing of the residue vector (identity packs to 0); for
    generic groups it is the table index.
    """

    def __init__(self, spec: GroupSpec):
        self.spec = spec
        self.n = spec.order
        if spec.kind == "abelian":
            self.factors = spec.factors
            m = len(self.factors)
            strides = [1] * m
            for i in range(m - 2, -1, -1):
                strides[i] = strides[i + 1] * self.factors[i + 1]
            self.strides = tuple(strides)
        else:
            self.factors = None
            self.strides = None

    # -- element <-> key -----------------------------------------------------
    def key(self, elem: Element) -> int:
        if self.spec.kind == "generic":
            k = int(elem)
            if not 0 <= k < self.n:
                raise GroupError(f"element {elem!r} outside group of order {self.n}")
            return k
        coords = tuple(elem)
        if len(coords) != len(self.factors):
            raise GroupError(f"element {elem!r} has wrong rank for {self.spec.descriptor()}")
        k = 0
        for c, f, s in zip(coords, self.factors, self.strides):
            if not 0 <= c < f:
                raise GroupError(f"residue {c} out of range for factor {f}")
            k += c * s
        return k

    def elem(self, key: int) -> Element:
        if self.spec.kind == "generic":
            return int(key)
        coords = []
        for f, s in zip(self.factors, self.strides):
            coords.append((key // s) % f)
        return tuple(coords)

    def elements(self) -> list[Element]:
        return [self.elem(k) for k in range(self.n)]

    # -- operation tables ----------------------------------------------------
    @functools.cached_property
    def mul_table(self) -> np.ndarray:
        if self.spec.kind == "generic":
            return np.asarray(self.spec.table, dtype=np.int32)
        n, factors = self.n, self.factors
        keys = np.arange(n, dtype=np.int64)
        coords = np.empty((n, len(factors)), dtype=np.int64)
        for i, (f, s) in enumerate(zip(factors, self.strides)):
            coords[:, i] = (keys // s) % f
        out = np.zeros((n, n), dtype=np.int64)
        for i, (f, s) in enumerate(zip(factors, self.strides)):
            out += ((coords[:, None, i] + coords[None, :, i]) % f) * s
        return out.astype(np.int32)

    @functools.cached_property
    def inv_table(self) -> np.ndarray:
        if self.spec.kind == "generic":
            t = self.mul_table
            inv = np.empty(self.n, dtype=np.int32)
            rows, cols = np.nonzero(t == 0)
            inv[rows] = cols
            return inv
        n, factors = self.n, self.factors
        keys = np.arange(n, dtype=np.int64)
        out = np.zeros(n, dtype=np.int64)
        for f, s in zip(factors, self.strides):
            c = (keys // s) % f
            out += ((f - c) % f) * s
        return out.astype(np.int32)

    def diff_table(self) -> np.ndarray:
        """diff[i, j] = key of x_i * x_j^{-1}."""
        return self.mul_table[:, self.inv_table]

    def mul(self, a: Element, b: Element) -> Element:
        return self.elem(int(self.mul_table[self.key(a), self.key(b)]))

    def inv(self, a: Element) -> Element:
        return self.elem(int(self.inv_table[self.key(a)]))

    def identity(self) -> Element:
        return self.elem(0)

    # -- structure -----------------------------------------------------------
    @functools.cached_property
    def element_orders(self) -> np.ndarray:
        n = self.n
        orders = np.empty(n, dtype=np.int64)
        mul = self.mul_table
        for k in range(n):
            acc, o = k, 1
            while acc != 0:
                acc = int(mul[acc, k])
                o += 1
            orders[k] = o
        return orders

    def involution_keys(self) -> np.ndarray:
        inv = self.inv_table
        keys = np.arange(self.n)
        return keys[(inv == keys) & (keys != 0)]


@functools.lru_cache(maxsize=512)
def group_view(spec: GroupSpec) -> GroupView:
    return GroupView(spec)


def element_order(spec: GroupSpec, elem: Element) -> int:
    """Smallest n >= 1 with n copies of elem summing to the identity."""
    view = group_view(spec)
    if spec.kind == "abelian":
        coords = tuple(elem)
        view.key(coords)  # validates membership
        o = 1
        for c, f in zip(coords, spec.factors):
            o = math.lcm(o, f // math.gcd(f, c))
        return o
    return int(view.element_orders[view.key(elem)])


def count_involutions(spec: GroupSpec) -> int:
    """Number of elements equal to their own inverse, identity excluded."""
    if spec.kind == "abelian":
        even = sum(1 for f in spec.factors if f % 2 == 0)
        return 2**even - 1
    return len(group_view(spec).involution_keys())


def cayley_table(spec: GroupSpec, max_order: int = 4096) -> GroupSpec:
    """Materialize any spec as a generic-kind table (identity at index 0)."""
    if spec.order > max_order:
        raise GroupOverflowError(
            f"order {spec.order} exceeds table maximum {max_order}"
        )
    if spec.kind == "generic":
        return spec
    table = group_view(spec).mul_table
    return GroupSpec(
        kind="generic",
        table=tuple(tuple(int(v) for v in row) for row in table),
        name=spec.descriptor(),
    )


# ---------------------------------------------------------------------------
# Homomorphisms between abelian specs (coordinate-wise reduce or drop).
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Homomorphism:
    """Coordinate-wise surjection between abelian groups.

    rules[i] is ("reduce", m) to send source coordinate i to a target
    coordinate mod m, or ("drop",) to send it to zero.  kernel_embedding
    maps kernel coordinates back into source coordinates: entry
    (src_coord, multiplier) means kernel residue v embeds as v*multiplier
    in source coordinate src_coord.
    """

    source: GroupSpec
    target: GroupSpec
    rules: tuple[tuple, ...]
    kernel: GroupSpec
    kernel_embedding: tuple[tuple[int, int], ...]
    target_coords: tuple[int, ...]  # source coordinate feeding each target coord

    def apply(self, elem: AbelianElement) -> AbelianElement:
        out = []
        for i, rule in enumerate(self.rules):
            if rule[0] == "reduce":
                out.append(elem[i] % rule[1])
        return tuple(out)

    def section(self, telem: AbelianElement) -> AbelianElement:
        """Canonical source representative: reduced coords lifted verbatim."""
        out = [0] * len(self.rules)
        for tcoord, scoord in enumerate(self.target_coords):
            out[scoord] = telem[tcoord]
        return tuple(out)

    def embed_kernel(self, kelem: AbelianElement) -> AbelianElement:
        out = [0] * len(self.rules)
        for (scoord, mult), v in zip(self.kernel_embedding, kelem):
            out[scoord] = v * mult
        return tuple(out)

    def preimage_keys(self, target_elems: Iterable[AbelianElement]) -> frozenset[int]:
        """Packed keys of the full preimage of the given target elements."""
        sview = group_view(self.source)
        wanted = {group_view(self.target).key(t) for t in target_elems}
        tview = group_view(self.target)
        keys = []
        for k in range(self.source.order):
            if tview.key(self.apply(sview.elem(k))) in wanted:
                keys.append(k)
        return frozenset(keys)


def coordinate_projection(spec: GroupSpec, moduli: dict[int, int]) -> Homomorphism:
    """Reduce the listed coordinates mod the given moduli, drop the rest.

    A modulus of 1 drops the coordinate into the kernel entirely.  Each
    modulus must divide its factor so the reduction is a homomorphism.
    """
    if spec.kind != "abelian":
        raise GroupError("projection requires an abelian spec")
    rules: list[tuple] = []
    target_factors: list[int] = []
    target_coords: list[int] = []
    kernel_factors: list[int] = []
    kernel_embed: list[tuple[int, int]] = []
    for i, f in enumerate(spec.factors):
        m = moduli.get(i)
        if m is None or m == 1:
            rules.append(("drop",))
            if f > 1:
                kernel_factors.append(f)
                kernel_embed.append((i, 1))
        else:
            if f % m != 0:
                raise GroupError(f"modulus {m} does not divide factor {f}")
            rules.append(("reduce", m))
            target_factors.append(m)
            target_coords.append(i)
            if f // m > 1:
                kernel_factors.append(f // m)
                kernel_embed.append((i, m))
    target = GroupSpec(kind="abelian", factors=tuple(target_factors))
    kernel = GroupSpec(kind="abelian", factors=tuple(kernel_factors))
    if kernel.order * target.order != spec.order:
        raise GroupError("kernel/target order mismatch")
    return Homomorphism(
        source=spec,
        target=target,
        rules=tuple(rules),
        kernel=kernel,
        kernel_embedding=tuple(kernel_embed),
        target_coords=tuple(target_coords),
    )


def canonical_projection(spec: GroupSpec, coords: Iterable[int], k: int) -> Homomorphism:
    """Reduce the selected coordinates mod p^k; all selected factors must be
    powers of one prime p with exponent >= k.  Unselected coordinates land in
    the kernel."""
    coords = sorted(set(coords))
    if spec.kind != "abelian":
        raise GroupError("projection requires an abelian spec")
    if not coords:
        raise GroupError("no coordinates selected")
    primes = set()
    for i in coords:
        if not 0 <= i < len(spec.factors):
            raise GroupError(f"coordinate {i} out of range")
        (p, e), = _factorize(spec.factors[i])
        primes.add(p)
        if e < k:
            raise GroupError(
                f"factor {spec.factors[i]} has exponent {e} < k={k}"
            )
    if len(primes) != 1:
        raise GroupError(f"selected coordinates mix primes {sorted(primes)}")
    p = primes.pop()
    if k < 1:
        raise GroupError("k must be >= 1")
    return coordinate_projection(spec, {i: p**k for i in coords})


# ---------------------------------------------------------------------------
# Abelian decomposition of a black-box commutative group.
# ---------------------------------------------------------------------------

def _blackbox_order(op: Callable[[int, int], int], x: int) -> int:
    acc, o = x, 1
    while acc != 0:
        acc = op(acc, x)
        o += 1
    return o


def decompose_blackbox_abelian(
    n: int, op: Callable[[int, int], int]
) -> tuple[tuple[int, ...], list[int], dict[int, tuple[int, ...]]]:
    """Cyclic decomposition of a commutative group given by a multiplication
    callback on element indices 0..n-1 with identity 0.

    Returns (invariant factor orders, one generator per factor, and the map
    element -> exponent vector over those generators).  Factor orders come
    out in the greedy maximal-order sequence n_1 >= n_2 >= ...; callers
    wanting the canonical prime-power form split them afterwards.
    """
    orders = [_blackbox_order(op, x) for x in range(n)]
    coords: dict[int, tuple[int, ...]] = {0: ()}
    gens: list[int] = []
    gen_orders: list[int] = []
    while len(coords) < n:
        # element with maximal order in the quotient by the current subgroup
        best_x, best_q = -1, 0
        for x in range(n):
            if x in coords:
                continue
            q = orders[x]
            for d in _divisors(orders[x]):
                if _blackbox_pow(op, x, d) in coords:
                    q = d
                    break
            if q > best_q:
                best_x, best_q = x, q
        x, q = best_x, best_q
        # adjust so the new generator has true order q: x^q lies in the
        # current subgroup and its exponents are divisible by q
        rep = _blackbox_pow(op, x, q)
        vec = coords[rep]
        y = x
        for g, c in zip(gens, vec):
            if c % q != 0:
                raise GroupError("decomposition invariant violated")
            y = op(y, _blackbox_pow(op, _blackbox_inverse(op, g, orders), c // q))
        gens.append(y)
        gen_orders.append(q)
        new_coords: dict[int, tuple[int, ...]] = {}
        power = 0
        for i in range(q):
            for e, vec0 in coords.items():
                new_coords[op(power, e)] = vec0 + (i,)
            power = op(power, y)
        coords = new_coords
        if len(coords) != math.prod(gen_orders):
            raise GroupError("generator not independent of current subgroup")
    return tuple(gen_orders), gens, coords


def _divisors(n: int) -> list[int]:
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            if d != n // d:
                out.append(n // d)
        d += 1
    return sorted(out)


def _blackbox_pow(op: Callable[[int, int], int], x: int, e: int) -> int:
    acc = 0
    base = x
    while e:
        if e & 1:
            acc = op(acc, base)
        base = op(base, base)
        e >>= 1
    return acc


def _blackbox_inverse(op: Callable[[int, int], int], x: int, orders: list[int]) -> int:
    return _blackbox_pow(op, x, orders[x] - 1)


def abelian_basis_decomposition(spec: GroupSpec) -> GroupSpec:
    """Canonical abelian factors of a commutative Cayley table.

    The output is checked against the input's order census: for every d the
    two groups contain the same number of elements of order dividing d.
    """
    if spec.kind == "abelian":
        return spec
    view = group_view(spec)
    mul = view.mul_table
    n = spec.order
    for a in range(n):
        for b in range(a + 1, n):
            if mul[a, b] != mul[b, a]:
                raise GroupError("table is not commutative")
    op = lambda a, b: int(mul[a, b])
    gen_orders, _, _ = decompose_blackbox_abelian(n, op)
    result = abelian_group(gen_orders)
    if order_census(result) != _table_census(view):
        raise GroupError("decomposition census mismatch")
    return result


def blackbox_isomorphism(
    n: int, op: Callable[[int, int], int]
) -> tuple[GroupSpec, dict[int, AbelianElement]]:
    """Canonical abelian spec plus an explicit element -> coords isomorphism."""
    gen_orders, gens, coords = decompose_blackbox_abelian(n, op)
    # split composite cyclic factors into prime powers (CRT per coordinate)
    parts: list[tuple[int, int, int, int]] = []  # (prime power, coord idx, pp, cofactor)
    for i, o in enumerate(gen_orders):
        for p, e in _factorize(o):
            pp = p**e
            parts.append((pp, i, pp, o // pp))
    # canonical ordering by (prime, exponent)
    def sort_key(item):
        pp = item[0]
        (p, e), = _factorize(pp)
        return (p, e, item[1])

    parts.sort(key=sort_key)
    spec = abelian_group([pp for pp, _, _, _ in parts])
    mapping: dict[int, AbelianElement] = {}
    for elem, vec in coords.items():
        out = []
        for pp, i, _, cof in parts:
            # CRT component: exponent of the order-pp part of coordinate i
            ci = vec[i] if i < len(vec) else 0
            inv = pow(cof, -1, pp)
            out.append((ci * inv) % pp)
        mapping[elem] = tuple(out)
    if order_census(spec) != _census_from_orders(
        [_blackbox_order(op, x) for x in range(n)]
    ):
        raise GroupError("isomorphism census mismatch")
    return spec, mapping


def order_census(spec: GroupSpec) -> dict[int, int]:
    """Map order -> number of elements of exactly that order."""
    if spec.kind == "generic":
        return _table_census(group_view(spec))
    counts: dict[int, int] = {}
    exponent = math.lcm(*spec.factors) if spec.factors else 1
    divisors = _divisors(exponent)
    dividing = {
        d: math.prod(math.gcd(d, f) for f in spec.factors) for d in divisors
    }
    for d in divisors:
        exact = dividing[d] - sum(counts[e] for e in divisors if e < d and d % e == 0)
        counts[d] = exact
    return {d: c for d, c in counts.items() if c}


def _table_census(view: GroupView) -> dict[int, int]:
    return _census_from_orders(list(map(int, view.element_orders)))


def _census_from_orders(orders: list[int]) -> dict[int, int]:
    out: dict[int, int] = {}
    for o in orders:
        out[o] = out.get(o, 0) + 1
    return out
