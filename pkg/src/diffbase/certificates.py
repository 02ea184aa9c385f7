"""Difference-basis certificates and the checker every construction must pass.

A certificate names a group, a target subset, a basis, and the method that
produced it.  Validity means exactly one thing: every target element is a
difference a * b^-1 of two basis elements.  The checker recomputes the full
difference set, so a valid certificate is a machine-checkable witness for
an upper bound on the difference size of the target.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

import numpy as np

from .groups import Element, GroupSpec, GroupError, group_view


@dataclass(frozen=True)
class CertTarget:
    """Either the full group or an explicit element set (optionally tagged
    with the construction-level name of the subset, e.g. ``UxR``)."""

    kind: str  # "full" | "elements"
    elements: Optional[frozenset] = None  # frozenset of elements, not keys
    tag: Optional[str] = None
    tag_params: Optional[dict] = None

    @staticmethod
    def full() -> "CertTarget":
        return CertTarget(kind="full")

    @staticmethod
    def of(elements: Iterable[Element], tag: Optional[str] = None,
           tag_params: Optional[dict] = None) -> "CertTarget":
        return CertTarget(
            kind="elements",
            elements=frozenset(elements),
            tag=tag,
            tag_params=tag_params,
        )


@dataclass(frozen=True)
class Certificate:
    group: GroupSpec
    target: CertTarget
    basis: tuple
    method: str

    @property
    def size(self) -> int:
        return len(self.basis)

    def target_keys(self) -> frozenset[int]:
        view = group_view(self.group)
        if self.target.kind == "full":
            return frozenset(range(self.group.order))
        return frozenset(view.key(e) for e in self.target.elements)

    def basis_keys(self) -> tuple[int, ...]:
        view = group_view(self.group)
        return tuple(view.key(b) for b in self.basis)

    def to_json(self) -> dict:
        if self.target.kind == "full":
            tgt: Union[str, dict] = "full"
        elif self.target.tag is not None:
            tgt = {"tag": self.target.tag, **(self.target.tag_params or {}),
                   "elements": _elems_json(self.group, self.target.elements)}
        else:
            tgt = {"elements": _elems_json(self.group, self.target.elements)}
        return {
            "group": self.group.to_json(),
            "target": tgt,
            "basis": _elems_json(self.group, self.basis),
            "method": self.method,
        }

    @staticmethod
    def from_json(obj: dict) -> "Certificate":
        group = GroupSpec.from_json(obj["group"])
        raw_tgt = obj["target"]
        if raw_tgt == "full":
            target = CertTarget.full()
        else:
            elems = [_elem_from_json(group, e) for e in raw_tgt["elements"]]
            params = {k: v for k, v in raw_tgt.items() if k not in ("elements", "tag")}
            target = CertTarget.of(elems, tag=raw_tgt.get("tag"),
                                   tag_params=params or None)
        basis = tuple(_elem_from_json(group, e) for e in obj["basis"])
        return Certificate(group=group, target=target, basis=basis,
                           method=obj.get("method", "unknown"))

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))

    @staticmethod
    def loads(text: str) -> "Certificate":
        return Certificate.from_json(json.loads(text))


def _elems_json(group: GroupSpec, elems) -> list:
    if group.kind == "abelian":
        return sorted(list(e) for e in elems)
    return sorted(int(e) for e in elems)


def _elem_from_json(group: GroupSpec, e) -> Element:
    if group.kind == "abelian":
        return tuple(int(v) for v in e)
    return int(e)


@dataclass(frozen=True)
class CoverageReport:
    valid: bool
    missed: tuple


def check_certificate(cert: Certificate) -> CoverageReport:
    """Recompute the basis difference set and report missed target elements."""
    view = group_view(cert.group)
    basis_keys = np.asarray(cert.basis_keys(), dtype=np.int64)
    target_keys = cert.target_keys()
    if basis_keys.size == 0:
        missed = sorted(target_keys)
        return CoverageReport(valid=not missed,
                              missed=tuple(view.elem(k) for k in missed))
    mul = view.mul_table
    inv = view.inv_table
    diffs = mul[np.ix_(basis_keys, inv[basis_keys])]
    covered = set(map(int, np.unique(diffs)))
    missed = sorted(target_keys - covered)
    return CoverageReport(valid=not missed,
                          missed=tuple(view.elem(k) for k in missed))


def require_valid(cert: Certificate) -> Certificate:
    report = check_certificate(cert)
    if not report.valid:
        raise GroupError(
            f"certificate {cert.method!r} misses {len(report.missed)} target "
            f"elements, e.g. {report.missed[:4]}"
        )
    return cert
