"""Bundled reference data.

cyclic_deltas: published minimum difference sizes of cyclic groups up to
order 100 (the solver re-derives them in extended mode).  small_groups and
noncyclic_deltas are the published tables the acceptance suite reproduces.
nonabelian fixtures are literal Cayley tables of the small non-abelian
groups, regenerable from presentations via scripts/generate_data.py.
"""

from __future__ import annotations

import functools
import json
from importlib import resources

from .groups import GroupSpec, abelian_group, generic_group, parse_group_spec


def _load(name: str):
    with resources.files("diffbase.data").joinpath(name).open() as fh:
        return json.load(fh)


@functools.lru_cache(maxsize=None)
def cyclic_deltas() -> dict[int, int]:
    return {int(k): v for k, v in _load("cyclic_deltas.json").items()}


def cyclic_delta(n: int) -> int | None:
    return cyclic_deltas().get(n)


@functools.lru_cache(maxsize=None)
def fixture_groups() -> dict[str, GroupSpec]:
    """Small non-abelian groups as Cayley tables, keyed by name."""
    return {
        name: generic_group(table, name=name)
        for name, table in _load("nonabelian_fixtures.json").items()
    }


@functools.lru_cache(maxsize=None)
def small_group_table() -> list[tuple[GroupSpec, int]]:
    """Published (group, delta) pairs for every group of order 2..13."""
    fixtures = fixture_groups()
    out = []
    for row in _load("small_groups.json"):
        name = row["group"]
        spec = fixtures[name] if name in fixtures else parse_group_spec(name)
        out.append((spec, row["delta"]))
    return out


@functools.lru_cache(maxsize=None)
def noncyclic_table() -> list[tuple[GroupSpec, int, int]]:
    """Published (group, lb, delta) rows for non-cyclic abelian groups of
    order 12..95."""
    return [
        (abelian_group(row["factors"]), row["lb"], row["delta"])
        for row in _load("noncyclic_deltas.json")
    ]


@functools.lru_cache(maxsize=None)
def bundled_interval_bases() -> dict[int, tuple[int, ...]]:
    """Precomputed minimum difference bases of [1, n] for n <= 40."""
    return {
        int(k): tuple(v) for k, v in _load("interval_bases.json").items()
    }
