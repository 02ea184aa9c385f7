"""Galois rings GR(p^k, r) and the star group built on top of them.

The ring is the quotient Z[x]/(p^k, f(x)) for a monic degree-r polynomial f
that is irreducible mod p.  Elements are coefficient vectors of length r
with entries in [0, p^k); the modulus is chosen deterministically (the
lexicographically smallest basic irreducible) so every construction built
on these rings is reproducible.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Optional

from .groups import (
    GroupSpec,
    abelian_group,
    generic_group,
    order_census,
    blackbox_isomorphism,
)

RingElement = tuple[int, ...]


class RingError(ValueError):
    pass


class NonUnitError(RingError):
    """Raised when inverting an element of the maximal ideal pR."""


class CensusMismatchError(RingError):
    """Claimed group structure disagrees with the computed order census."""


# ---------------------------------------------------------------------------
# Polynomials over Z/p, ascending coefficient tuples.
# ---------------------------------------------------------------------------

def _poly_trim(c: list[int]) -> tuple[int, ...]:
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def _poly_mul_mod_p(a, b, p):
    out = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _poly_trim(out)


def _poly_mod_mod_p(a, m, p):
    a = list(a)
    dm = len(m) - 1
    inv_lead = pow(m[-1], -1, p)
    while len(a) - 1 >= dm and a:
        if a[-1] == 0:
            a.pop()
            continue
        coef = (a[-1] * inv_lead) % p
        shift = len(a) - 1 - dm
        for i, mi in enumerate(m):
            a[shift + i] = (a[shift + i] - coef * mi) % p
        a.pop()
    return _poly_trim(a)


def _is_irreducible_mod_p(poly: tuple[int, ...], p: int) -> bool:
    """Trial division by every monic polynomial of degree 1..deg/2."""
    deg = len(poly) - 1
    if deg < 1:
        return False
    for d in range(1, deg // 2 + 1):
        for tail in itertools.product(range(p), repeat=d):
            divisor = tuple(tail) + (1,)
            if not _poly_mod_mod_p(poly, divisor, p):
                return False
    return True


@functools.lru_cache(maxsize=None)
def find_basic_irreducible(p: int, r: int) -> tuple[int, ...]:
    """Smallest monic degree-r polynomial irreducible mod p.

    Smallest means lexicographic on the coefficient tuple
    (c_{r-1}, ..., c_1, c_0); the result is returned in ascending order
    (c_0, ..., c_{r-1}, 1).
    """
    if r < 1:
        raise RingError("degree must be >= 1")
    for desc in itertools.product(range(p), repeat=r):
        poly = tuple(reversed(desc)) + (1,)
        if r == 1 or _is_irreducible_mod_p(poly, p):
            return poly
    raise RingError(f"no irreducible of degree {r} mod {p}")  # unreachable


# ---------------------------------------------------------------------------
# Ring arithmetic.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GaloisRingSpec:
    p: int
    k: int
    r: int
    modulus: tuple[int, ...]  # ascending coefficients, length r+1, monic

    @property
    def q(self) -> int:
        """Characteristic p^k (the coefficient modulus)."""
        return self.p**self.k

    @property
    def size(self) -> int:
        return self.p ** (self.k * self.r)

    @property
    def residue_field_size(self) -> int:
        return self.p**self.r

    @property
    def unit_count(self) -> int:
        return self.size - self.p ** ((self.k - 1) * self.r)

    def zero(self) -> RingElement:
        return (0,) * self.r

    def one(self) -> RingElement:
        return (1,) + (0,) * (self.r - 1)

    def to_json(self) -> dict:
        return {"p": self.p, "k": self.k, "r": self.r, "modulus": list(self.modulus)}

    @staticmethod
    def from_json(obj: dict) -> "GaloisRingSpec":
        ring = make_ring(obj["p"], obj["k"], obj["r"])
        if tuple(obj.get("modulus", ring.modulus)) != ring.modulus:
            raise RingError("non-canonical modulus in ring description")
        return ring


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


@functools.lru_cache(maxsize=None)
def make_ring(p: int, k: int, r: int, max_size: int = 2**20) -> GaloisRingSpec:
    if not _is_prime(p):
        raise RingError(f"{p} is not prime")
    if k < 1 or r < 1:
        raise RingError("k and r must be >= 1")
    if p ** (k * r) > max_size:
        raise RingError(f"ring size p^(kr) = {p**(k*r)} exceeds maximum {max_size}")
    return GaloisRingSpec(p=p, k=k, r=r, modulus=find_basic_irreducible(p, r))


def ring_add(R: GaloisRingSpec, a: RingElement, b: RingElement) -> RingElement:
    q = R.q
    return tuple((x + y) % q for x, y in zip(a, b))


def ring_neg(R: GaloisRingSpec, a: RingElement) -> RingElement:
    q = R.q
    return tuple((-x) % q for x in a)


def ring_sub(R: GaloisRingSpec, a: RingElement, b: RingElement) -> RingElement:
    q = R.q
    return tuple((x - y) % q for x, y in zip(a, b))


def ring_mul(R: GaloisRingSpec, a: RingElement, b: RingElement) -> RingElement:
    q = R.q
    prod = [0] * (2 * R.r - 1) if R.r > 1 else [0]
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] = (prod[i + j] + ai * bj) % q
    # reduce by the monic modulus with coefficients lifted to Z/p^k
    m = R.modulus
    for top in range(len(prod) - 1, R.r - 1, -1):
        c = prod[top]
        if c:
            prod[top] = 0
            shift = top - R.r
            for i in range(R.r):
                prod[shift + i] = (prod[shift + i] - c * m[i]) % q
    return tuple(prod[: R.r]) if R.r > 1 else (prod[0] % q,)


def ring_scalar(R: GaloisRingSpec, s: int, a: RingElement) -> RingElement:
    q = R.q
    return tuple((s * x) % q for x in a)


def ring_pow(R: GaloisRingSpec, a: RingElement, e: int) -> RingElement:
    acc = R.one()
    base = a
    while e:
        if e & 1:
            acc = ring_mul(R, acc, base)
        base = ring_mul(R, base, base)
        e >>= 1
    return acc


def is_unit(R: GaloisRingSpec, a: RingElement) -> bool:
    return any(x % R.p != 0 for x in a)


def ring_inverse(R: GaloisRingSpec, a: RingElement) -> RingElement:
    """Inverse of a unit, via exponentiation by |U(R)| - 1."""
    if not is_unit(R, a):
        raise NonUnitError(f"{a} lies in the maximal ideal of GR({R.p}^{R.k},{R.r})")
    inv = ring_pow(R, a, R.unit_count - 1)
    if ring_mul(R, a, inv) != R.one():
        raise RingError("inverse computation failed")  # defensive; should not happen
    return inv


def ring_elements(R: GaloisRingSpec) -> list[RingElement]:
    return [
        tuple(reversed(c))
        for c in itertools.product(range(R.q), repeat=R.r)
    ]


def element_index(R: GaloisRingSpec, a: RingElement) -> int:
    idx = 0
    for c in reversed(a):
        idx = idx * R.q + c
    return idx


def multiplicative_order(R: GaloisRingSpec, a: RingElement) -> int:
    if not is_unit(R, a):
        raise NonUnitError(f"{a} is not a unit")
    acc = a
    o = 1
    one = R.one()
    while acc != one:
        acc = ring_mul(R, acc, a)
        o += 1
    return o


# ---------------------------------------------------------------------------
# Structure of U(R) and of the star group R*R.
# ---------------------------------------------------------------------------

def claimed_unit_group(R: GaloisRingSpec) -> GroupSpec:
    p, k, r = R.p, R.k, R.r
    if p % 2 == 1 or k <= 2:
        factors = [p**r - 1] + [p ** (k - 1)] * r
    else:
        factors = [2**r - 1, 2, 2 ** (k - 2)] + [2 ** (k - 1)] * (r - 1)
    return abelian_group(factors)


def unit_group_spec(R: GaloisRingSpec, census_max: int = 4096) -> GroupSpec:
    """Abelian structure of U(R), verified against the multiplicative-order
    census whenever the ring is small enough to enumerate."""
    claimed = claimed_unit_group(R)
    if R.size <= census_max:
        census: dict[int, int] = {}
        for a in ring_elements(R):
            if is_unit(R, a):
                o = multiplicative_order(R, a)
                census[o] = census.get(o, 0) + 1
        if census != order_census(claimed):
            raise CensusMismatchError(
                f"unit group census of GR({R.p}^{R.k},{R.r}) does not match "
                f"{claimed.descriptor()}"
            )
    return claimed


class StarGroup:
    """Pairs of ring elements under (x,y)*(x',y') = (x+x', y+y'+x*x')."""

    def __init__(self, ring: GaloisRingSpec):
        self.ring = ring
        self.size = ring.size**2

    def identity(self) -> tuple[RingElement, RingElement]:
        z = self.ring.zero()
        return (z, z)

    def mul(self, a, b):
        R = self.ring
        return (
            ring_add(R, a[0], b[0]),
            ring_add(R, ring_add(R, a[1], b[1]), ring_mul(R, a[0], b[0])),
        )

    def inv(self, a):
        R = self.ring
        return (
            ring_neg(R, a[0]),
            ring_add(R, ring_neg(R, a[1]), ring_mul(R, a[0], a[0])),
        )

    def elements(self):
        els = ring_elements(self.ring)
        return [(x, y) for x in els for y in els]

    def index(self, a) -> int:
        R = self.ring
        return element_index(R, a[0]) * R.size + element_index(R, a[1])

    def power(self, a, s: int):
        """Closed form (x,y)^s = (s x, s y + s(s-1)/2 x^2)."""
        R = self.ring
        half = (s * (s - 1)) // 2  # exact integer before any reduction
        x2 = ring_mul(R, a[0], a[0])
        return (
            ring_scalar(R, s, a[0]),
            ring_add(R, ring_scalar(R, s, a[1]), ring_scalar(R, half, x2)),
        )

    def order_iterated(self, a) -> int:
        acc, o = a, 1
        ident = self.identity()
        while acc != ident:
            acc = self.mul(acc, a)
            o += 1
        return o

    def order_closed(self, a) -> int:
        ident = self.identity()
        s = 1
        while self.power(a, s) != ident:
            s += 1
        return s


def claimed_star_group(R: GaloisRingSpec) -> GroupSpec:
    p, k, r = R.p, R.k, R.r
    if p >= 3:
        factors = [p**k] * (2 * r)
    else:
        factors = [2 ** (k + 1)] * r + ([2 ** (k - 1)] * r if k >= 2 else [])
    return abelian_group(factors)


def star_power_census(R: GaloisRingSpec, census_max: int = 6561) -> dict[int, int]:
    """Order distribution of R*R, computed by iterated multiplication and by
    the closed power formula; the two must agree element by element."""
    star = StarGroup(R)
    if star.size > census_max:
        raise RingError(f"star group size {star.size} exceeds census maximum")
    census: dict[int, int] = {}
    for a in star.elements():
        o1 = star.order_iterated(a)
        o2 = star.order_closed(a)
        if o1 != o2:
            raise CensusMismatchError(
                f"power formula disagrees with iteration at {a}: {o2} vs {o1}"
            )
        census[o1] = census.get(o1, 0) + 1
    return census


@dataclass(frozen=True)
class StarGroupResult:
    ring: GaloisRingSpec
    claimed: GroupSpec
    table: Optional[GroupSpec]  # generic spec, materialized only when small
    verified: bool


def star_group(
    R: GaloisRingSpec, table_max: int = 1024, census_max: int = 6561
) -> StarGroupResult:
    """Claimed abelian structure of R*R plus, when small enough, the literal
    Cayley table.  Verification compares the order census of the star group
    with the census implied by the claimed structure."""
    claimed = claimed_star_group(R)
    star = StarGroup(R)
    verified = False
    if star.size <= census_max:
        census = star_power_census(R, census_max)
        if census != order_census(claimed):
            raise CensusMismatchError(
                f"star group census of GR({R.p}^{R.k},{R.r}) does not match "
                f"{claimed.descriptor()}"
            )
        verified = True
    table = None
    if star.size <= table_max:
        els = star.elements()
        index = {a: i for i, a in enumerate(els)}
        tbl = [
            [index[star.mul(a, b)] for b in els]
            for a in els
        ]
        table = generic_group(tbl, name=f"star(GR({R.p}^{R.k},{R.r}))")
    return StarGroupResult(ring=R, claimed=claimed, table=table, verified=verified)


@functools.lru_cache(maxsize=None)
def star_isomorphism(R: GaloisRingSpec) -> tuple[GroupSpec, dict[int, tuple[int, ...]]]:
    """Explicit isomorphism from R*R onto its canonical abelian coordinates.

    Returns the canonical spec and a map star-element-index -> coordinate
    vector.  Computed from scratch (black-box decomposition), then checked
    against the claimed structure.
    """
    star = StarGroup(R)
    els = star.elements()
    index = {a: i for i, a in enumerate(els)}
    op = lambda i, j: index[star.mul(els[i], els[j])]
    spec, mapping = blackbox_isomorphism(star.size, op)
    if spec != claimed_star_group(R):
        raise CensusMismatchError(
            f"decomposition of R*R for GR({R.p}^{R.k},{R.r}) gives "
            f"{spec.descriptor()}, expected {claimed_star_group(R).descriptor()}"
        )
    return spec, mapping


# ---------------------------------------------------------------------------
# Field helpers for difference-set constructions (k = 1 rings are fields).
# ---------------------------------------------------------------------------

def prime_power(q: int) -> Optional[tuple[int, int]]:
    """(p, s) with q = p^s, or None if q is not a prime power."""
    if q < 2:
        return None
    fac = []
    n, d = q, 2
    while d * d <= n:
        e = 0
        while n % d == 0:
            e += 1
            n //= d
        if e:
            fac.append((d, e))
        d += 1
    if n > 1:
        fac.append((n, 1))
    if len(fac) != 1:
        return None
    return fac[0]


def make_field(q: int, max_size: int = 2**20) -> GaloisRingSpec:
    pp = prime_power(q)
    if pp is None:
        raise RingError(f"{q} is not a prime power")
    p, s = pp
    return make_ring(p, 1, s, max_size=max_size)


@functools.lru_cache(maxsize=None)
def multiplicative_generator(R: GaloisRingSpec) -> RingElement:
    """Smallest unit (by element index) of maximal multiplicative order."""
    best: Optional[RingElement] = None
    best_o = 0
    for a in ring_elements(R):
        if not is_unit(R, a):
            continue
        o = multiplicative_order(R, a)
        if o > best_o:
            best, best_o = a, o
        if R.k == 1 and best_o == R.size - 1:
            break
    if R.k == 1 and best_o != R.size - 1:
        raise RingError("generator search failed")  # impossible for a field
    return best


def discrete_log_table(R: GaloisRingSpec) -> dict[RingElement, int]:
    """elem -> exponent of the canonical generator (fields only)."""
    if R.k != 1:
        raise RingError("discrete logs are only built for fields")
    gen = multiplicative_generator(R)
    table: dict[RingElement, int] = {}
    acc = R.one()
    for e in range(R.size - 1):
        table[acc] = e
        acc = ring_mul(R, acc, gen)
    return table


def subfield_elements(R: GaloisRingSpec, q: int) -> list[RingElement]:
    """Elements of the subfield GF(q) inside the field R = GF(q^m)."""
    if R.k != 1:
        raise RingError("subfields are only taken inside fields")
    n = R.size - 1
    if (R.size == q) or (n % (q - 1)) != 0:
        if R.size == q:
            return ring_elements(R)
        raise RingError(f"GF({q}) is not a subfield of GF({R.size})")
    step = n // (q - 1)
    gen = multiplicative_generator(R)
    out = [R.zero()]
    acc = R.one()
    g_step = ring_pow(R, gen, step)
    for _ in range(q - 1):
        out.append(acc)
        acc = ring_mul(R, acc, g_step)
    return out
