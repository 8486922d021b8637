"""Verification of Pauli flows, gflows and causal flows on open graphs.

Two independent checkers are provided: `verify_pauli_flow` evaluates the
three simplified conditions (one per Pauli axis), `verify_pauli_flow_original`
evaluates the nine-condition definition literally.  They are kept separate on
purpose so that tests can confront them on exhaustively enumerated instances.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Tuple, Union

from .errors import ContractError, FormatError
from .gf2 import mask_of, members, popcount
from .graphs import (MeasurementLabel, OpenGraph, closed_odd_neighborhood,
                     odd_neighborhood)


@dataclass(frozen=True)
class PartialOrder:
    """Strict partial order over vertex ids, stored transitively closed.

    succ[u] is the bitmask of vertices v with u < v.  Callers usually build
    one from generator pairs; the closure is computed at construction and
    irreflexivity is rejected there.
    """

    n: int
    succ: Tuple[int, ...]

    def __post_init__(self):
        if len(self.succ) != self.n:
            raise ValueError("succ row count does not match n")
        closed = _transitive_closure(list(self.succ))
        if tuple(closed) != self.succ:
            raise ValueError("succ relation is not transitively closed")
        for u in range(self.n):
            if (self.succ[u] >> u) & 1:
                raise ValueError(f"order is not irreflexive at vertex {u}")

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[Tuple[int, int]]) -> "PartialOrder":
        succ = [0] * n
        for a, b in pairs:
            if not (0 <= a < n and 0 <= b < n):
                raise ValueError(f"order pair ({a},{b}) out of range")
            succ[a] |= 1 << b
        closed = _transitive_closure(succ)
        for u in range(n):
            if (closed[u] >> u) & 1:
                raise ValueError("generator pairs induce a cycle")
        return cls(n, tuple(closed))

    @classmethod
    def empty(cls, n: int) -> "PartialOrder":
        return cls(n, (0,) * n)

    def less(self, a: int, b: int) -> bool:
        return bool((self.succ[a] >> b) & 1)

    def pred_mask(self, u: int) -> int:
        """Bitmask of v with v < u."""
        return mask_of(v for v in range(self.n) if (self.succ[v] >> u) & 1)

    def pairs(self) -> List[Tuple[int, int]]:
        return [(a, b) for a in range(self.n) for b in members(self.succ[a])]

    def is_total_on(self, domain: int) -> bool:
        for a in members(domain):
            for b in members(domain):
                if a != b and not self.less(a, b) and not self.less(b, a):
                    return False
        return True


def _transitive_closure(succ: List[int]) -> List[int]:
    n = len(succ)
    closed = list(succ)
    for k in range(n):
        row_k = closed[k]
        for u in range(n):
            if (closed[u] >> k) & 1:
                closed[u] |= row_k
    # One extra sweep handles chains discovered late.
    changed = True
    while changed:
        changed = False
        for u in range(n):
            acc = closed[u]
            for v in members(closed[u]):
                acc |= closed[v]
            if acc != closed[u]:
                closed[u] = acc
                changed = True
    return closed


@dataclass(frozen=True)
class CorrectionFlow:
    """Candidate flow witness: correction-set map p plus a strict partial order."""

    p: Mapping[int, int]
    order: PartialOrder


@dataclass(frozen=True)
class Verdict:
    """Outcome of a flow check, carrying the first violation found."""

    ok: bool
    vertex: Optional[int] = None
    condition: Optional[str] = None
    witness: Optional[int] = None

    def __bool__(self) -> bool:
        return self.ok

    def describe(self) -> str:
        if self.ok:
            return "valid"
        loc = f"vertex {self.vertex}, condition {self.condition}"
        if self.witness is not None:
            loc += f", witness vertex {self.witness}"
        return f"violated at {loc}"


_OK = Verdict(True)


def _check_well_formed(og: OpenGraph, f: CorrectionFlow) -> None:
    measured = og.measured
    if set(f.p) != set(members(measured)):
        raise ContractError("flow domain must be exactly the non-output vertices")
    for u, c in f.p.items():
        if c >> og.n:
            raise ContractError(f"p({u}) references vertices out of range")
        if c & og.inputs:
            raise ContractError(f"p({u}) intersects the inputs")
    if f.order.n != og.n:
        raise ContractError("order size does not match the graph")
    for a, b in f.order.pairs():
        if not ((measured >> a) & 1 and (measured >> b) & 1):
            raise ContractError("order must relate non-output vertices only")


def _axis_set(og: OpenGraph, axis: str, c: int) -> int:
    if axis == "X":
        return odd_neighborhood(og.graph, c)
    if axis == "Y":
        return closed_odd_neighborhood(og.graph, c)
    return c


def verify_pauli_flow(og: OpenGraph, f: CorrectionFlow) -> Verdict:
    """Check the three per-axis flow conditions for every measured vertex.

    For axis A in the label of u, with K_A the odd neighbourhood (X), closed
    odd neighbourhood (Y) or the set itself (Z): u must lie in K_A(p(u)) and
    outside K_A(p(v)) for every measured v != u with not(v < u).
    """
    _check_well_formed(og, f)
    measured_list = sorted(f.p)
    for u in measured_list:
        pred = f.order.pred_mask(u)
        for axis in sorted(og.labels[u].axes):
            cond = f"c_{axis}"
            if not (_axis_set(og, axis, f.p[u]) >> u) & 1:
                return Verdict(False, u, cond)
            for v in measured_list:
                if v == u or (pred >> v) & 1:
                    continue  # v < u or v = u: excluded from the union
                if (_axis_set(og, axis, f.p[v]) >> u) & 1:
                    return Verdict(False, u, cond, v)
    return _OK


def verify_pauli_flow_original(og: OpenGraph, f: CorrectionFlow) -> Verdict:
    """Check the original nine-condition flow definition, evaluated literally."""
    _check_well_formed(og, f)
    L = MeasurementLabel
    measured_list = sorted(f.p)
    for u in measured_list:
        pu = f.p[u]
        odd_pu = odd_neighborhood(og.graph, pu)
        for v in measured_list:
            if v == u:
                continue
            lam_v = og.labels[v]
            # v <= u  iff  not (u < v)
            v_le_u = not f.order.less(u, v)
            if (pu >> v) & 1 and lam_v not in (L.X, L.Y) and not f.order.less(u, v):
                return Verdict(False, u, "P1", v)
            if v_le_u and lam_v not in (L.Y, L.Z) and (odd_pu >> v) & 1:
                return Verdict(False, u, "P2", v)
            if v_le_u and lam_v is L.Y and ((pu >> v) & 1) != ((odd_pu >> v) & 1):
                return Verdict(False, u, "P3", v)
        lam_u = og.labels[u]
        in_pu = bool((pu >> u) & 1)
        in_odd = bool((odd_pu >> u) & 1)
        if lam_u is L.XY and not (not in_pu and in_odd):
            return Verdict(False, u, "P4")
        if lam_u is L.XZ and not (in_pu and in_odd):
            return Verdict(False, u, "P5")
        if lam_u is L.YZ and not (in_pu and not in_odd):
            return Verdict(False, u, "P6")
        if lam_u is L.X and not in_odd:
            return Verdict(False, u, "P7")
        if lam_u is L.Z and not in_pu:
            return Verdict(False, u, "P8")
        if lam_u is L.Y and not ((not in_pu and in_odd) or (in_pu and not in_odd)):
            return Verdict(False, u, "P9")
    return _OK


def verify_real_pauli_flow(og: OpenGraph, f: CorrectionFlow) -> Verdict:
    """Flow check specialized to real open graphs (labels within {X, Z})."""
    if not og.is_real:
        raise ContractError("open graph has a non-real measurement label")
    return verify_pauli_flow(og, f)


def verify_gflow(og: OpenGraph, f: CorrectionFlow) -> Verdict:
    """Flow check restricted to planar labels (a Pauli flow on planes is a gflow)."""
    if not og.all_planar:
        raise ContractError("gflow requires every label to be a measurement plane")
    return verify_pauli_flow(og, f)


def verify_causal_flow(og: OpenGraph, f: CorrectionFlow) -> Verdict:
    """Gflow check with every correction set a singleton."""
    if not og.all_planar:
        raise ContractError("causal flow requires every label to be a measurement plane")
    _check_well_formed(og, f)
    for u in sorted(f.p):
        if popcount(f.p[u]) != 1:
            return Verdict(False, u, "singleton")
    return verify_pauli_flow(og, f)


def input_label_constraint(og: OpenGraph) -> Verdict:
    """Necessary condition for flow existence: no measured input carries axis Z.

    Any measured input u has p(u) inside the input complement, so u is not in
    p(u) and the Z-axis condition cannot hold.
    """
    for u in sorted(members(og.inputs & og.measured)):
        if "Z" in og.labels[u].axes:
            return Verdict(False, u, "input-Z")
    return _OK


def flow_to_json(f: CorrectionFlow, names: Tuple[str, ...]) -> dict:
    return {
        "p": {names[u]: [names[v] for v in members(c)] for u, c in sorted(f.p.items())},
        "order": [[names[a], names[b]] for a, b in f.order.pairs()],
    }


def flow_from_json(doc: Union[str, dict], og: OpenGraph) -> CorrectionFlow:
    if isinstance(doc, str):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as e:
            raise FormatError(f"invalid JSON: {e}") from e
    if not isinstance(doc, dict) or "p" not in doc:
        raise FormatError("flow document must be a JSON object with a 'p' key")
    index = {name: i for i, name in enumerate(og.names)}

    def resolve(name):
        if name not in index:
            raise FormatError(f"unknown vertex {name!r}")
        return index[name]

    p = {resolve(u): mask_of(resolve(v) for v in targets)
         for u, targets in doc["p"].items()}
    try:
        order = PartialOrder.from_pairs(
            og.n, [(resolve(a), resolve(b)) for a, b in doc.get("order", [])])
    except ValueError as e:
        raise FormatError(str(e)) from e
    return CorrectionFlow(p, order)
