"""Command-line front end: flow checking/search, synthesis, determinism checks,
parallelization, bundled counterexamples and random instance generation.

Exit codes: 0 = pass, 1 = property violated / no result, 2 = usage or parse
error.  Reports are JSON with --json, human text otherwise.
"""

from __future__ import annotations

import json
import sys
from importlib import resources
from typing import Dict, Optional

import click

from .errors import CapacityError, ContractError, FormatError, RewriteError
from .flows import PartialOrder, flow_from_json, flow_to_json, verify_pauli_flow
from .gf2 import members, popcount
from .graphs import OpenGraph, open_graph_from_json, open_graph_to_json
from .instances import DEFAULT_LABELS, InstanceSpec, generate_instance
from .patterns import (Angle, Mbqc, Measure, of_pattern, parse,
                       pattern_from_json, print_pattern, standardize,
                       to_pattern, validate)
from .search import (BRUTE_FORCE_IC_BOUND, BRUTE_FORCE_OC_BOUND,
                     find_pauli_flow, find_pauli_flow_bruteforce, flow_depth)
from .statevec import (check_deterministic, check_robust_deterministic,
                       check_strong_deterministic)
from .synthesis import (bipartite_normal_form, parallel_measurement_order,
                        parallelize, synthesize_corrections)


@click.group()
def main():
    """Flow analysis and simulation for measurement-based computations."""


def _fail_parse(message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(2)


def _load_open_graph(path: str) -> OpenGraph:
    try:
        with open(path) as fh:
            return open_graph_from_json(fh.read())
    except (OSError, FormatError) as e:
        _fail_parse(str(e))


def _load_pattern(path: str):
    try:
        with open(path) as fh:
            text = fh.read()
        if path.endswith(".json"):
            return pattern_from_json(json.loads(text))
        return parse(text)
    except (OSError, FormatError, json.JSONDecodeError, KeyError) as e:
        _fail_parse(str(e))


def _emit(text: str, output: Optional[str]):
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=not text.endswith("\n"))


def _report(doc: dict, as_json: bool, text: str):
    if as_json:
        click.echo(json.dumps(doc, indent=2))
    else:
        click.echo(text)


def _pattern_measurement_order(pat) -> PartialOrder:
    """Total order of the pattern's measurement sequence (abort points)."""
    seq = [c.qubit for c in pat.commands if isinstance(c, Measure)]
    pairs = [(seq[i], seq[j])
             for i in range(len(seq)) for j in range(i + 1, len(seq))]
    return PartialOrder.from_pairs(pat.n, pairs)


def _parse_angle_value(value: str) -> Angle:
    """`k/d` or `k` are fractions of pi; anything else is float radians."""
    try:
        if "/" in value:
            num, den = value.split("/", 1)
            return Angle.from_fraction(int(num), int(den))
        return Angle.from_fraction(int(value))
    except ValueError:
        pass
    try:
        return Angle.from_radians(float(value))
    except ValueError:
        raise click.BadParameter(f"cannot parse angle {value!r}")


def _default_angles(og: OpenGraph, overrides: Dict[str, Angle]) -> Dict[int, Angle]:
    index = {name: i for i, name in enumerate(og.names)}
    angles = {}
    for u, lab in og.labels.items():
        if og.names[u] in overrides:
            angles[u] = overrides[og.names[u]]
        elif lab.is_pauli:
            angles[u] = Angle.from_fraction(0)
        else:
            angles[u] = Angle.from_fraction(1, 4)
    for name in overrides:
        if name not in index:
            raise click.BadParameter(f"unknown vertex {name!r} in --angle")
    return angles


@main.command("verify-flow")
@click.argument("graph_file", type=click.Path(exists=True))
@click.argument("flow_file", type=click.Path(exists=True))
@click.option("--json", "as_json", is_flag=True)
def cmd_verify_flow(graph_file, flow_file, as_json):
    """Check a flow witness against an open graph."""
    og = _load_open_graph(graph_file)
    try:
        with open(flow_file) as fh:
            flow = flow_from_json(fh.read(), og)
    except (OSError, FormatError) as e:
        _fail_parse(str(e))
    try:
        verdict = verify_pauli_flow(og, flow)
    except ContractError as e:
        _report({"valid": False, "detail": str(e)}, as_json, f"invalid: {e}")
        sys.exit(1)
    doc = {"valid": bool(verdict), "detail": verdict.describe()}
    _report(doc, as_json, "valid" if verdict else f"invalid: {verdict.describe()}")
    sys.exit(0 if verdict else 1)


@main.command("find-flow")
@click.argument("graph_file", type=click.Path(exists=True))
@click.option("--brute-force-bound", default=BRUTE_FORCE_OC_BOUND, show_default=True,
              help="Max measured vertices for the exhaustive fallback.")
@click.option("--json", "as_json", is_flag=True)
@click.option("-o", "--output", type=click.Path())
def cmd_find_flow(graph_file, brute_force_bound, as_json, output):
    """Search for a flow; prints the witness or 'none'."""
    og = _load_open_graph(graph_file)
    result = find_pauli_flow(og, oc_bound=brute_force_bound,
                             ic_bound=max(BRUTE_FORCE_IC_BOUND, brute_force_bound))
    if result.found:
        doc = flow_to_json(result.flow, og.names)
        doc["depth"] = flow_depth(result.flow)
        _emit(json.dumps(doc, indent=2), output)
        sys.exit(0)
    _report({"status": result.status}, as_json, result.status)
    sys.exit(1)


@main.command("synthesize")
@click.argument("graph_file", type=click.Path(exists=True))
@click.option("--angle", "angle_opts", multiple=True, metavar="NAME=VALUE",
              help="Measurement angle override (k/d of pi, or float radians).")
@click.option("-o", "--output", type=click.Path())
def cmd_synthesize(graph_file, angle_opts, output):
    """Flow search, correction synthesis and pattern emission."""
    og = _load_open_graph(graph_file)
    overrides = {}
    for opt in angle_opts:
        if "=" not in opt:
            raise click.BadParameter(f"--angle needs NAME=VALUE, got {opt!r}")
        name, value = opt.split("=", 1)
        overrides[name] = _parse_angle_value(value)
    result = find_pauli_flow(og)
    if not result.found:
        click.echo("no flow", err=True)
        sys.exit(1)
    strategy = synthesize_corrections(og, result.flow)
    m = Mbqc(og, _default_angles(og, overrides), strategy)
    _emit(print_pattern(to_pattern(m, result.flow.order)), output)
    sys.exit(0)


@main.command("check")
@click.argument("pattern_file", type=click.Path(exists=True))
@click.option("--level", type=click.Choice(["det", "strong", "robust"]),
              default="robust", show_default=True)
@click.option("--samples", default=10, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--tolerance", default=1e-9, show_default=True)
@click.option("--json", "as_json", is_flag=True)
def cmd_check(pattern_file, level, samples, seed, tolerance, as_json):
    """Determinism check of a pattern at the chosen strictness."""
    pat = _load_pattern(pattern_file)
    verdict = validate(pat)
    if not verdict:
        _fail_parse(f"pattern is not valid: {verdict.message}")
    doc = {"level": level}
    try:
        if level == "det":
            ok = check_deterministic(pat, tol=tolerance, seed=seed)
        else:
            m = None
            try:
                m = of_pattern(standardize(pat))
            except (ContractError, RewriteError, ValueError) as e:
                if level == "robust":
                    _fail_parse(f"cannot recover the graph form: {e}")
            if level == "strong":
                real = bool(m and m.og.is_real)
                ok = check_strong_deterministic(pat, tol=tolerance,
                                                real_inputs=real, seed=seed)
                doc["real_inputs"] = real
            else:
                report = check_robust_deterministic(
                    m, angle_samples=samples, seed=seed, tol=tolerance,
                    order=_pattern_measurement_order(pat))
                ok = report["ok"]
                doc.update(report)
    except CapacityError as e:
        _fail_parse(str(e))
    doc["ok"] = ok
    _report(doc, as_json, f"{level}: {'pass' if ok else 'FAIL'}")
    sys.exit(0 if ok else 1)


@main.command("parallelize")
@click.argument("graph_file", type=click.Path(exists=True))
@click.option("--angle", "angle_opts", multiple=True, metavar="NAME=VALUE")
@click.option("--json", "as_json", is_flag=True)
@click.option("-o", "--output", type=click.Path())
def cmd_parallelize(graph_file, angle_opts, as_json, output):
    """Depth-one pattern for a bipartite real instance with a flow."""
    og = _load_open_graph(graph_file)
    overrides = {}
    for opt in angle_opts:
        name, value = opt.split("=", 1)
        overrides[name] = _parse_angle_value(value)
    result = find_pauli_flow(og)
    if not result.found:
        click.echo("no flow", err=True)
        sys.exit(1)
    try:
        normal = bipartite_normal_form(og, result.flow)
        strategy = parallelize(og, normal)
    except ContractError as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(1)
    try:
        order = parallel_measurement_order(og, normal)
    except ContractError:
        # The dropped corrections commute with the measurements they target,
        # so the pattern is sound in any order; only truncations care.
        order = None
    off_output = [u for u in strategy.x
                  if (strategy.x[u] | strategy.z[u]) & ~og.outputs]
    depth = 1 if not off_output else None
    m = Mbqc(og, _default_angles(og, overrides), strategy)
    text = print_pattern(to_pattern(m, order))
    if as_json:
        click.echo(json.dumps({"depth": depth, "pattern": text}, indent=2))
    else:
        _emit(text, output)
        click.echo(f"measurement depth: {depth}", err=True)
    sys.exit(0 if depth == 1 else 1)


@main.command("counterexamples")
@click.option("--samples", default=10, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--json", "as_json", is_flag=True)
def cmd_counterexamples(samples, seed, as_json):
    """Regression suite on the two bundled no-compatible-flow instances.

    For each: the bundled pattern is robustly deterministic, no flow exists
    that measures vertex 1 before vertex 2, yet an (incompatibly ordered)
    flow does exist.
    """
    report = []
    ok_all = True
    for stem in ("counterexample1", "counterexample2"):
        data = resources.files("mbqcflow").joinpath("data")
        og = open_graph_from_json(data.joinpath(f"{stem}.json").read_text())
        pat = parse(data.joinpath(f"{stem}.mcpat").read_text())
        m = of_pattern(standardize(pat))
        robust = check_robust_deterministic(m, angle_samples=samples, seed=seed,
                                            order=_pattern_measurement_order(pat))
        v1 = og.names.index("1")
        v2 = og.names.index("2")
        constrained = find_pauli_flow_bruteforce(og, require_pairs=[(v1, v2)])
        unconstrained = find_pauli_flow_bruteforce(og)
        legs = {
            "robustly_deterministic": robust["ok"],
            "no_flow_measuring_1_first": constrained.status == "none",
            "flow_with_other_order": unconstrained.found,
        }
        ok = all(legs.values())
        ok_all = ok_all and ok
        report.append({"instance": stem, "ok": ok, "legs": legs})
    if as_json:
        click.echo(json.dumps({"ok": ok_all, "instances": report}, indent=2))
    else:
        for entry in report:
            click.echo(f"{entry['instance']}: {'pass' if entry['ok'] else 'FAIL'} "
                       + " ".join(f"{k}={v}" for k, v in entry["legs"].items()))
    sys.exit(0 if ok_all else 1)


@main.command("generate")
@click.option("--n", required=True, type=int)
@click.option("--seed", default=0, show_default=True)
@click.option("--edge-prob", default=0.5, show_default=True)
@click.option("--bipartite", is_flag=True)
@click.option("--inputs", "n_inputs", default=0, show_default=True)
@click.option("--outputs", "n_outputs", default=1, show_default=True)
@click.option("--labels", default=",".join(DEFAULT_LABELS), show_default=True,
              help="Comma-separated label pool.")
@click.option("--reject-input-z", is_flag=True,
              help="Resample while a measured input carries a Z axis.")
@click.option("-o", "--output", type=click.Path())
def cmd_generate(n, seed, edge_prob, bipartite, n_inputs, n_outputs, labels,
                 reject_input_z, output):
    """Seed-deterministic random open-graph instance."""
    try:
        spec = InstanceSpec(n=n, seed=seed, edge_probability=edge_prob,
                            bipartite=bipartite, n_inputs=n_inputs,
                            n_outputs=n_outputs,
                            labels=tuple(s for s in labels.split(",") if s),
                            reject_input_z=reject_input_z)
        og = generate_instance(spec)
    except (ContractError, FormatError) as e:
        _fail_parse(str(e))
    _emit(json.dumps(open_graph_to_json(og), indent=2), output)
    sys.exit(0)


if __name__ == "__main__":
    main()
