"""Pauli operators, stabilizer groups and branch-exact stabilizer runs.

A Pauli operator is stored as i^phase * X_x * Z_z with bitmasks x, z and
phase mod 4.  Stabilizer states are n independent commuting Hermitian
generators; measurements update the generator list exactly (no sampling), so
every outcome branch can be explored.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import ContractError
from .gf2 import mask_of, members, popcount, solve
from .graphs import MeasurementLabel, OpenGraph
from .patterns import Angle, Mbqc, measurement_linearization


@dataclass(frozen=True)
class PauliOperator:
    """i^phase * X_x * Z_z on qubits 0..n-1 (n implicit in the masks)."""

    phase: int  # mod 4
    x: int
    z: int

    def __post_init__(self):
        object.__setattr__(self, "phase", self.phase % 4)

    def __mul__(self, other: "PauliOperator") -> "PauliOperator":
        # Z_{z1} X_{x2} = (-1)^{|z1 & x2|} X_{x2} Z_{z1}
        phase = self.phase + other.phase + 2 * popcount(self.z & other.x)
        return PauliOperator(phase, self.x ^ other.x, self.z ^ other.z)

    def commutes(self, other: "PauliOperator") -> bool:
        return (popcount(self.x & other.z) + popcount(self.z & other.x)) % 2 == 0

    @property
    def is_hermitian(self) -> bool:
        return (self.phase - popcount(self.x & self.z)) % 2 == 0

    @property
    def sign(self) -> int:
        """+1 or -1 for a Hermitian operator relative to i^{|x&z|} X_x Z_z."""
        if not self.is_hermitian:
            raise ContractError("sign is only defined for Hermitian operators")
        return 1 if (self.phase - popcount(self.x & self.z)) % 4 == 0 else -1

    def negate(self) -> "PauliOperator":
        return PauliOperator(self.phase + 2, self.x, self.z)

    @classmethod
    def identity(cls) -> "PauliOperator":
        return cls(0, 0, 0)

    @classmethod
    def single(cls, axis: str, qubit: int, sign: int = 1) -> "PauliOperator":
        bit = 1 << qubit
        phase = 0 if sign > 0 else 2
        if axis == "X":
            return cls(phase, bit, 0)
        if axis == "Z":
            return cls(phase, 0, bit)
        if axis == "Y":
            return cls(phase + 1, bit, bit)  # Y = i X Z
        raise ValueError(f"unknown axis {axis!r}")

    def describe(self, n: int) -> str:
        sign = {0: "+", 1: "+i", 2: "-", 3: "-i"}[self.phase]
        body = []
        for q in range(n):
            xb, zb = (self.x >> q) & 1, (self.z >> q) & 1
            body.append({(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "XZ"}[(xb, zb)])
        return sign + "".join(body)


def measurement_operator(label: MeasurementLabel, angle: Angle, qubit: int) -> PauliOperator:
    """Measured observable of a Pauli label as a signed single-qubit Pauli."""
    if not label.is_pauli:
        raise ContractError("only Pauli labels have a stabilizer observable")
    if not angle.is_zero_or_pi:
        raise ContractError(f"Pauli label needs an exact angle 0 or pi, got {angle}")
    sign = 1 if angle.exact % 2 == 0 else -1
    return PauliOperator.single(label.to_string(), qubit, sign)


def _independent(ops: Sequence[PauliOperator], n: int) -> bool:
    from .gf2 import rank
    return rank([op.x | (op.z << n) for op in ops]) == len(ops)


@dataclass
class StabilizerState:
    """n commuting independent Hermitian generators on n qubits."""

    n: int
    generators: List[PauliOperator]

    def __post_init__(self):
        if len(self.generators) != self.n:
            raise ContractError("need exactly n generators")
        for i, g in enumerate(self.generators):
            if not g.is_hermitian:
                raise ContractError(f"generator {i} is not Hermitian")
            if (g.x | g.z) >> self.n:
                raise ContractError(f"generator {i} acts outside the register")
            for h in self.generators[i + 1:]:
                if not g.commutes(h):
                    raise ContractError("generators must pairwise commute")
        if not _independent(self.generators, self.n):
            raise ContractError("generators must be independent")

    def copy(self) -> "StabilizerState":
        return StabilizerState(self.n, list(self.generators))


def initial_stabilizers(og: OpenGraph, zero_inputs: int = 0) -> StabilizerState:
    """Graph state over og with the inputs in `zero_inputs` prepared in |0>.

    Qubits in `zero_inputs` (a subset of the inputs) keep the generator Z_u;
    every other qubit contributes X_u Z_{N(u)}.
    """
    if zero_inputs & ~og.inputs:
        raise ContractError("zero_inputs must be a subset of the inputs")
    gens = []
    for u in range(og.n):
        if (zero_inputs >> u) & 1:
            gens.append(PauliOperator(0, 0, 1 << u))
        else:
            gens.append(PauliOperator(0, 1 << u, og.graph.adjacency[u]))
    return StabilizerState(og.n, gens)


def apply_pauli(state: StabilizerState, p: PauliOperator) -> StabilizerState:
    """Conjugate the state by a Pauli unitary: anticommuting generators flip sign."""
    gens = [g if g.commutes(p) else g.negate() for g in state.generators]
    return StabilizerState(state.n, gens)


def measure_outcome(state: StabilizerState, m: PauliOperator) -> Optional[int]:
    """0/1 when measuring m has a determined outcome, None when uniform."""
    if not m.is_hermitian:
        raise ContractError("measurement operator must be Hermitian")
    if any(not g.commutes(m) for g in state.generators):
        return None
    # m commutes with a maximal group: +-m is a product of generators.
    n = state.n
    rows = []
    for b in range(2 * n):
        rows.append(mask_of(i for i, g in enumerate(state.generators)
                            if ((g.x | (g.z << n)) >> b) & 1))
    target = m.x | (m.z << n)
    rhs = [(target >> b) & 1 for b in range(2 * n)]
    sol = solve(rows, rhs, len(state.generators))
    if sol is None:
        raise ContractError("operator commutes with the group but is not in it")
    combo, _ = sol
    prod = PauliOperator.identity()
    for i in members(combo):
        prod = prod * state.generators[i]
    if prod.x != m.x or prod.z != m.z:
        raise ContractError("operator commutes with the group but is not in it")
    if prod.phase == m.phase:
        return 0
    if prod.phase == (m.phase + 2) % 4:
        return 1
    raise ContractError("phase mismatch in group membership")


def collapse(state: StabilizerState, m: PauliOperator, outcome: int) -> StabilizerState:
    """Post-measurement state for the branch with the given outcome bit."""
    signed = m if outcome == 0 else m.negate()
    anti = [i for i, g in enumerate(state.generators) if not g.commutes(m)]
    if not anti:
        det = measure_outcome(state, m)
        if det != outcome:
            raise ContractError("collapse onto a zero-probability branch")
        return state.copy()
    pivot = anti[0]
    gens = list(state.generators)
    for i in anti[1:]:
        gens[i] = gens[i] * gens[pivot]
    gens[pivot] = signed
    return StabilizerState(state.n, gens)


def reorder_generators(state: StabilizerState,
                       measurements: Sequence[PauliOperator]) -> StabilizerState:
    """Rewrite the generator list so generator i anticommutes with measurement
    i (when any generator from position i on does) and later generators
    commute with it.

    For each i in order: among positions j >= i whose generator anticommutes
    with measurements[i], the first is the pivot; it multiplies the others and
    is swapped into position i.  The group is unchanged.
    """
    gens = list(state.generators)
    for i, m in enumerate(measurements):
        if i >= len(gens):
            break
        anti = [j for j in range(i, len(gens)) if not gens[j].commutes(m)]
        if not anti:
            continue
        pivot = anti[0]
        for j in anti[1:]:
            gens[j] = gens[j] * gens[pivot]
        gens[i], gens[pivot] = gens[pivot], gens[i]
    return StabilizerState(state.n, gens)


def canonical_generators(generators: Sequence[PauliOperator], n: int) -> Tuple[PauliOperator, ...]:
    """Unique generating set of the signed group (row-reduced echelon form).

    Two generator lists span the same signed stabilizer group exactly when
    their canonical forms are equal.
    """
    work = list(generators)
    out: List[PauliOperator] = []
    used = 0  # bit positions already holding a pivot
    for b in range(2 * n):
        cand = None
        for k, g in enumerate(work):
            if ((g.x | (g.z << n)) >> b) & 1:
                cand = k
                break
        if cand is None:
            continue
        pivot = work.pop(cand)
        work = [g * pivot if ((g.x | (g.z << n)) >> b) & 1 else g for g in work]
        out = [g * pivot if ((g.x | (g.z << n)) >> b) & 1 else g for g in out]
        out.append(pivot)
        used |= 1 << b
    return tuple(out)


def restricted_generators(state: StabilizerState, support: int) -> List[PauliOperator]:
    """Generators of the subgroup acting only inside `support`.

    Solves for all generator products whose X and Z masks vanish outside the
    support; the result still acts on the full register.
    """
    n = state.n
    outside = ((1 << n) - 1) & ~support
    rows = []
    for b in members(outside):
        rows.append(mask_of(i for i, g in enumerate(state.generators) if (g.x >> b) & 1))
        rows.append(mask_of(i for i, g in enumerate(state.generators) if (g.z >> b) & 1))
    sol = solve(rows, [0] * len(rows), len(state.generators))
    assert sol is not None  # homogeneous system
    _, basis = sol
    out = []
    for combo in basis:
        prod = PauliOperator.identity()
        for i in members(combo):
            prod = prod * state.generators[i]
        out.append(prod)
    return out


def output_group_signature(state: StabilizerState, outputs: int) -> Tuple[PauliOperator, ...]:
    """Canonical form of the subgroup supported on the output qubits."""
    return canonical_generators(restricted_generators(state, outputs), state.n)


# ---------------------------------------------------------------------------
# Dense-vector interface (for cross-checking against the simulator)


def _parity(indices: np.ndarray, mask: int) -> np.ndarray:
    p = np.zeros_like(indices)
    for b in members(mask):
        p ^= (indices >> b) & 1
    return p


def apply_pauli_to_vector(p: PauliOperator, psi: np.ndarray) -> np.ndarray:
    """(i^phase X_x Z_z) psi on a little-endian 2^n state vector."""
    idx = np.arange(psi.shape[0])
    src = idx ^ p.x
    signs = 1.0 - 2.0 * _parity(src, p.z)
    return (1j ** p.phase) * signs * psi[src]


def projector_overlap(psi: np.ndarray, generators: Sequence[PauliOperator]) -> float:
    """<psi| P |psi> for P the projector onto the joint +1 eigenspace."""
    phi = np.asarray(psi, dtype=complex)
    for g in generators:
        phi = (phi + apply_pauli_to_vector(g, phi)) / 2
    return float(np.real(np.vdot(psi, phi)))


def state_distance(psi: np.ndarray, state: StabilizerState) -> float:
    """Projector infidelity 1 - <psi|P|psi> of a normalized psi with the
    (rank-one) stabilizer projector P.

    Zero exactly when psi lies in the joint +1 eigenspace; unlike norm-based
    distances there is no square root to amplify rounding noise, so exact
    matches stay at machine epsilon.
    """
    overlap = min(1.0, max(0.0, projector_overlap(psi, state.generators)))
    return float(1.0 - overlap)


# ---------------------------------------------------------------------------
# Robustness probe for Pauli-measured runs


def correction_operator(strategy, u: int) -> PauliOperator:
    """Pauli applied when the outcome at u is 1: X on x(u), Z on z(u)."""
    corr = PauliOperator.identity()
    for v in members(strategy.x[u]):
        corr = corr * PauliOperator.single("X", v)
    for v in members(strategy.z[u]):
        corr = corr * PauliOperator.single("Z", v)
    return corr


def pauli_runs(
    m: Mbqc,
    zero_inputs: int,
    observables: Optional[Dict[int, PauliOperator]] = None,
) -> List[Tuple[Dict[int, int], StabilizerState]]:
    """All outcome branches of a Pauli run with corrections applied.

    `observables` overrides the measured operator per vertex (used to
    instantiate plane labels); by default every label must be a Pauli axis
    with an exact angle.  Returns (outcome map, final state) per branch;
    measured qubits stay in the register.
    """
    og = m.og
    if observables is None:
        if not og.all_pauli:
            raise ContractError("stabilizer runs need Pauli labels everywhere")
        observables = {u: measurement_operator(og.labels[u], m.angles[u], u)
                       for u in og.labels}
    order = measurement_linearization(m)
    start = initial_stabilizers(og, zero_inputs)
    branches: List[Tuple[Dict[int, int], StabilizerState]] = [({}, start)]
    for u in order:
        obs = observables[u]
        corr = correction_operator(m.strategy, u)
        nxt: List[Tuple[Dict[int, int], StabilizerState]] = []
        for outcomes, state in branches:
            det = measure_outcome(state, obs)
            results = (det,) if det is not None else (0, 1)
            for s in results:
                post = collapse(state, obs, s)
                if s:
                    post = apply_pauli(post, corr)
                nxt.append(({**outcomes, u: s}, post))
        branches = nxt
    return branches


def _pauli_instantiations(m: Mbqc) -> List[Dict[int, PauliOperator]]:
    """Every assignment of signed X/Z observables compatible with the labels.

    Pauli-labelled vertices keep their fixed observable; each {X,Z}-plane
    vertex ranges over +X, -X, +Z, -Z (its Pauli-angle instantiations).
    """
    og = m.og
    fixed: Dict[int, PauliOperator] = {}
    free: List[int] = []
    for u, lab in sorted(og.labels.items()):
        if lab.is_pauli:
            fixed[u] = measurement_operator(lab, m.angles[u], u)
        else:
            free.append(u)
    out = []
    choices = [("X", 1), ("X", -1), ("Z", 1), ("Z", -1)]
    for combo in range(4 ** len(free)):
        asg = dict(fixed)
        c = combo
        for u in free:
            axis, sign = choices[c % 4]
            c //= 4
            asg[u] = PauliOperator.single(axis, u, sign)
        out.append(asg)
    return out


def pauli_robustness_probe(m: Mbqc) -> dict:
    """Fast necessary condition for robust determinism of a real MBQC.

    Enumerates every input setting (each input in |0> or |+>) and every Pauli
    instantiation of the {X,Z}-plane labels; each measurement outcome must be
    uniformly random and all branches must end with the same signed
    stabilizer subgroup on the outputs.
    """
    og = m.og
    if not og.is_real:
        raise ContractError("probe requires real labels (within {X, Z})")
    instantiations = _pauli_instantiations(m)
    ins = members(og.inputs)
    for zero_bits in range(1 << len(ins)):
        zero_inputs = mask_of(v for k, v in enumerate(ins) if (zero_bits >> k) & 1)
        for observables in instantiations:
            branches = pauli_runs(m, zero_inputs, observables)
            setting = {
                "zero_inputs": [og.names[v] for v in members(zero_inputs)],
                "observables": {og.names[u]: p.describe(og.n)
                                for u, p in sorted(observables.items())},
            }
            if len(branches) != 1 << len(og.labels):
                return {"ok": False, "reason": "deterministic outcome", **setting}
            sigs = {output_group_signature(state, og.outputs)
                    for _, state in branches}
            if len(sigs) != 1:
                return {"ok": False, "reason": "branch-dependent output state",
                        **setting}
    return {"ok": True, "reason": None}
