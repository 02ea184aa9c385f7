#!/usr/bin/env python3
"""Regenerate the bundled data files.

- nonabelian_fixtures.json: Cayley tables of the small non-abelian test
  groups, built from standard presentations (identity at index 0).
- interval_bases.json: minimum difference bases of [1, n] for n <= 40,
  computed by the exact ruler search (slow; this is the cacheable part).

Reference delta tables (cyclic_deltas.json, noncyclic_deltas.json,
small_groups.json) hold published values and are not regenerated here;
the solver re-derives them in the acceptance suite.
"""

import json
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

DATA = os.path.join(os.path.dirname(__file__), "..", "src", "diffbase", "data")


def _table_from_op(elems, op):
    index = {e: i for i, e in enumerate(elems)}
    return [[index[op(a, b)] for b in elems] for a in elems]


def dihedral(m):
    """Order-2m dihedral group; elements r^i s^j, identity first."""
    elems = [(i, j) for j in range(2) for i in range(m)]

    def op(x, y):
        i, j = x
        k, l = y
        return ((i + (k if j == 0 else -k)) % m, (j + l) % 2)

    return _table_from_op(elems, op)


def quaternion8():
    """Unit quaternions {+-1, +-i, +-j, +-k}."""
    names = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"]
    base = {
        ("1", x): x for x in "1 -1 i -i j -j k -k".split()
    }

    def mul(a, b):
        def sgn(x):
            return (-1 if x.startswith("-") else 1, x.lstrip("-"))

        sa, ua = sgn(a)
        sb, ub = sgn(b)
        rules = {
            ("1", "1"): (1, "1"),
            ("i", "i"): (-1, "1"),
            ("j", "j"): (-1, "1"),
            ("k", "k"): (-1, "1"),
            ("i", "j"): (1, "k"),
            ("j", "i"): (-1, "k"),
            ("j", "k"): (1, "i"),
            ("k", "j"): (-1, "i"),
            ("k", "i"): (1, "j"),
            ("i", "k"): (-1, "j"),
        }
        if ua == "1":
            s, u = 1, ub
        elif ub == "1":
            s, u = 1, ua
        else:
            s, u = rules[(ua, ub)]
        s *= sa * sb
        return ("-" if s < 0 else "") + u

    return _table_from_op(names, mul)


def alternating4():
    import itertools

    perms = [p for p in itertools.permutations(range(4)) if _even(p)]
    perms.sort(key=lambda p: (p != (0, 1, 2, 3), p))

    def op(a, b):  # apply b first, then a
        return tuple(a[b[i]] for i in range(4))

    return _table_from_op(perms, op)


def _even(p):
    inv = sum(
        1 for i in range(len(p)) for j in range(i + 1, len(p)) if p[i] > p[j]
    )
    return inv % 2 == 0


def semidirect_c3_c4():
    """C3 : C4 with the order-4 generator inverting the order-3 one."""
    elems = [(i, j) for j in range(4) for i in range(3)]

    def op(x, y):
        i, j = x
        k, l = y
        return ((i + (k if j % 2 == 0 else -k)) % 3, (j + l) % 4)

    return _table_from_op(elems, op)


def gen_fixtures():
    fixtures = {
        "D6": dihedral(3),
        "D8": dihedral(4),
        "Q8": quaternion8(),
        "D10": dihedral(5),
        "D12": dihedral(6),
        "A4": alternating4(),
        "C3:C4": semidirect_c3_c4(),
    }
    path = os.path.join(DATA, "nonabelian_fixtures.json")
    with open(path, "w") as fh:
        json.dump(fixtures, fh, sort_keys=True)
    print("wrote", path)


def gen_interval_bases():
    from diffbase.rulers import _search_interval, covers_interval

    out = {}
    for n in range(1, 41):
        s = 2
        while s * (s - 1) // 2 < n:
            s += 1
        marks = None
        while marks is None:
            marks = _search_interval(n, s)
            s += 1
        assert covers_interval(marks, n)
        out[str(n)] = list(marks)
        print(n, len(marks), marks, flush=True)
    path = os.path.join(DATA, "interval_bases.json")
    with open(path, "w") as fh:
        json.dump(out, fh, sort_keys=True)
    print("wrote", path)


if __name__ == "__main__":
    what = sys.argv[1] if len(sys.argv) > 1 else "all"
    if what in ("all", "fixtures"):
        gen_fixtures()
    if what in ("all", "intervals"):
        gen_interval_bases()
