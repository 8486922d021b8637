"""Cross-validation of the strategy refuter against literal enumeration."""

from fractions import Fraction

import pytest

from mbqcflow.flows import verify_real_pauli_flow
from mbqcflow.graphs import Graph, MeasurementLabel, OpenGraph
from mbqcflow.patterns import Angle, Mbqc, PI_ANGLE, ZERO_ANGLE
from mbqcflow.search import find_pauli_flow_bruteforce
from mbqcflow.stabilizer import pauli_robustness_probe
from mbqcflow.synthesis import CorrectionStrategy, synthesize_corrections

from strategy_search import (enumerate_extensive_strategies,
                             refute_all_strategies)


def og_real(n, edges, inputs, outputs, labels):
    return OpenGraph(Graph.from_edges(n, edges), inputs, outputs,
                     {u: MeasurementLabel.from_string(s)
                      for u, s in labels.items()})


def strategy_passes_probe(og, x, z) -> bool:
    """Robustness evidence for one strategy: the Pauli probe must pass for
    every exact angle choice at the single-axis labels."""
    measured = sorted(og.labels)
    pauli = [u for u in measured if og.labels[u].is_pauli]
    for bits in range(1 << len(pauli)):
        angles = {}
        for u in measured:
            if u in pauli:
                angles[u] = PI_ANGLE if (bits >> pauli.index(u)) & 1 else ZERO_ANGLE
            else:
                angles[u] = Angle.from_fraction(Fraction(1, 4))
        m = Mbqc(og, angles, CorrectionStrategy(x, z))
        if not pauli_robustness_probe(m)["ok"]:
            return False
    return True


FLOWLESS = [
    # isolated measured vertex: nothing can absorb the outcome
    og_real(1, [], 0, 0, {0: "X"}),
    # two X-measured endpoints fighting over one output
    og_real(3, [(0, 1), (1, 2)], 0b000, 0b010, {0: "X", 2: "X"}),
    # XZ-plane input followed by an X vertex: no real flow on this path
    og_real(3, [(0, 1), (1, 2)], 0b001, 0b100, {0: "XZ", 1: "X"}),
]

FLOWFUL = [
    # single edge, X measurement onto an output
    og_real(2, [(0, 1)], 0b01, 0b10, {0: "X"}),
    # path a-b-c, ends are outputs
    og_real(3, [(0, 1), (1, 2)], 0b010, 0b101, {1: "X"}),
    # isolated Z-measured vertex corrects itself; the output is untouched
    og_real(2, [], 0b00, 0b10, {0: "Z"}),
]


@pytest.mark.parametrize("og", FLOWLESS)
def test_flowless_instances_are_refuted(og):
    assert not find_pauli_flow_bruteforce(og).found
    assert refute_all_strategies(og) is None


@pytest.mark.parametrize("og", FLOWFUL)
def test_flow_instances_survive(og):
    r = find_pauli_flow_bruteforce(og)
    assert r.found and verify_real_pauli_flow(og, r.flow)
    assert refute_all_strategies(og) is not None


@pytest.mark.parametrize("og", FLOWFUL[:2])
def test_synthesized_strategy_passes_literal_probe(og):
    r = find_pauli_flow_bruteforce(og)
    s = synthesize_corrections(og, r.flow)
    assert strategy_passes_probe(og, dict(s.x), dict(s.z))


@pytest.mark.parametrize("og", FLOWLESS[:2])
def test_refuter_matches_literal_enumeration(og):
    """On tiny instances the refuter's verdict agrees with brute force over
    the full extensive strategy space."""
    found = None
    for x, z in enumerate_extensive_strategies(og):
        if strategy_passes_probe(og, x, z):
            found = (x, z)
            break
    assert found is None
    assert refute_all_strategies(og) is None


def test_literal_enumeration_contains_synthesized():
    og = FLOWFUL[0]
    r = find_pauli_flow_bruteforce(og)
    s = synthesize_corrections(og, r.flow)
    space = {(tuple(sorted(x.items())), tuple(sorted(z.items())))
             for x, z in enumerate_extensive_strategies(og)}
    key = (tuple(sorted(s.x.items())), tuple(sorted(s.z.items())))
    assert key in space
