"""Command-line front end and the JSON file formats.

File formats (complex numbers are always two-element [re, im] arrays of
plain floats, so round-trips are bit-exact):

* ensemble:  {"dims": [Na, Nb], "states": [{"name": str,
  "amplitudes": Na x Nb nested array of [re, im]}]}
* protocol:  nodes {"party": "A"|"B", "outcomes": [{"projector_columns":
  [column, ...], "child": node-or-leaf}]} with leaves {"identify": str} or
  {"fail": true}; each column is a list of [re, im].
* report:    schema "v1", see REPORT_SCHEMA.

Exit codes: 0 distinguishable / success, 1 indistinguishable (proved) or
verification failure, 2 unknown, 3 input error.
"""

from __future__ import annotations

import json
import sys
import time
from pathlib import Path

import click
import numpy as np

from .criteria import classify_2x2, schmidt_sum_check
from .ensemble import (
    CANNED_EXAMPLES,
    canned_example,
    make_ensemble,
    random_ensemble,
)
from .errors import LoccdistError, ParseError, WrongDimensions
from .protocol import (
    Leaf,
    Node,
    ProjectiveMeasurement,
    canned_protocol,
    format_path,
    verify_protocol,
)
from .search import SearchConfig, search_protocol
from .states import DEFAULT_TOL, BipartiteState, make_state, schmidt_decompose

SCHEMA_VERSION = "v1"

#: published machine-report schema (JSON Schema draft-07)
REPORT_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "loccdist report",
    "type": "object",
    "required": ["schema_version", "command", "verdict", "exit_code",
                 "config", "diagnostics", "timing_ms"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "command": {"type": "string"},
        "verdict": {"type": "string"},
        "exit_code": {"type": "integer", "minimum": 0, "maximum": 3},
        "config": {"type": "object"},
        "diagnostics": {"type": "object"},
        "timing_ms": {"type": "number", "minimum": 0},
    },
}

EXIT_DISTINGUISHABLE = 0
EXIT_INDISTINGUISHABLE = 1
EXIT_UNKNOWN = 2
EXIT_INPUT_ERROR = 3


# ---------------------------------------------------------------------------
# serialization

def _pair(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def ensemble_to_dict(e) -> dict:
    return {
        "dims": [e.dim_a, e.dim_b],
        "states": [
            {"name": s.name,
             "amplitudes": [[_pair(z) for z in row] for row in s.amplitudes]}
            for s in e.states
        ],
    }


def _parse_pair(entry, location):
    if (not isinstance(entry, (list, tuple)) or len(entry) != 2
            or not all(isinstance(x, (int, float)) and not isinstance(x, bool)
                       for x in entry)):
        raise ParseError("expected an [re, im] pair of numbers", location)
    return complex(entry[0], entry[1])


def ensemble_from_dict(data, tol: float = DEFAULT_TOL):
    """Parse an ensemble file; returns (ensemble, notices)."""
    if not isinstance(data, dict):
        raise ParseError("top level must be an object", "$")
    dims = data.get("dims")
    if (not isinstance(dims, list) or len(dims) != 2
            or not all(isinstance(d, int) and d >= 1 for d in dims)):
        raise ParseError("expected [Na, Nb] with positive integers", "dims")
    raw_states = data.get("states")
    if not isinstance(raw_states, list) or not raw_states:
        raise ParseError("expected a nonempty list", "states")
    states: list[BipartiteState] = []
    notices: list[str] = []
    for si, sd in enumerate(raw_states):
        loc = f"states[{si}]"
        if not isinstance(sd, dict):
            raise ParseError("expected an object", loc)
        name = sd.get("name")
        if name is not None and not isinstance(name, str):
            raise ParseError("name must be a string", f"{loc}.name")
        rows = sd.get("amplitudes")
        if not isinstance(rows, list) or len(rows) != dims[0]:
            raise ParseError(f"expected {dims[0]} rows", f"{loc}.amplitudes")
        mat = np.zeros((dims[0], dims[1]), dtype=np.complex128)
        for r, row in enumerate(rows):
            if not isinstance(row, list) or len(row) != dims[1]:
                raise ParseError(f"expected {dims[1]} entries",
                                 f"{loc}.amplitudes[{r}]")
            for c, entry in enumerate(row):
                mat[r, c] = _parse_pair(entry, f"{loc}.amplitudes[{r}][{c}]")
        state = make_state(dims[0], dims[1], mat, name=name)
        if abs(state.normalization - 1.0) > tol:
            notices.append(f"state {state.name or si}: input normalized "
                           f"(norm was {state.normalization:.12g})")
        states.append(state)
    return make_ensemble(states, tol=tol), notices


def protocol_to_dict(tree) -> dict:
    if isinstance(tree, Leaf):
        if tree.is_fail:
            return {"fail": True}
        return {"identify": tree.identify}
    return {
        "party": tree.measurement.party,
        "outcomes": [
            {"projector_columns": [[_pair(z) for z in q[:, k]]
                                   for k in range(q.shape[1])],
             "child": protocol_to_dict(child)}
            for q, child in zip(tree.measurement.projectors, tree.children)
        ],
    }


def protocol_from_dict(data, location="$"):
    if not isinstance(data, dict):
        raise ParseError("expected an object", location)
    if "fail" in data or "identify" in data:
        if data.get("fail"):
            return Leaf(None)
        name = data.get("identify")
        if not isinstance(name, str):
            raise ParseError("identify must be a string", f"{location}.identify")
        return Leaf(name)
    party = data.get("party")
    if party not in ("A", "B"):
        raise ParseError('party must be "A" or "B"', f"{location}.party")
    outcomes = data.get("outcomes")
    if not isinstance(outcomes, list) or not outcomes:
        raise ParseError("expected a nonempty list", f"{location}.outcomes")
    blocks = []
    children = []
    for k, od in enumerate(outcomes):
        oloc = f"{location}.outcomes[{k}]"
        if not isinstance(od, dict):
            raise ParseError("expected an object", oloc)
        cols = od.get("projector_columns")
        if not isinstance(cols, list) or not cols:
            raise ParseError("expected a nonempty list of columns",
                             f"{oloc}.projector_columns")
        mat = np.empty((len(cols[0]), len(cols)), dtype=np.complex128)
        for ci, col in enumerate(cols):
            if not isinstance(col, list) or len(col) != len(cols[0]):
                raise ParseError("columns must share one length",
                                 f"{oloc}.projector_columns[{ci}]")
            for ri, entry in enumerate(col):
                mat[ri, ci] = _parse_pair(
                    entry, f"{oloc}.projector_columns[{ci}][{ri}]")
        blocks.append(mat)
        children.append(protocol_from_dict(od.get("child"), f"{oloc}.child"))
    return Node(ProjectiveMeasurement(party, tuple(blocks)), tuple(children))


def read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ParseError(str(exc), str(path)) from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}", str(path)) from exc


def write_json(path, payload) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")


def load_ensemble(path, tol: float = DEFAULT_TOL):
    ens, notices = ensemble_from_dict(read_json(path), tol=tol)
    for note in notices:
        click.echo(f"notice: {note}", err=True)
    return ens


def load_protocol(path):
    return protocol_from_dict(read_json(path))


# ---------------------------------------------------------------------------
# reports

def _build_report(command, verdict, exit_code, config, diagnostics, started):
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "verdict": verdict,
        "exit_code": exit_code,
        "config": config,
        "diagnostics": diagnostics,
        "timing_ms": (time.perf_counter() - started) * 1000.0,
    }


def _emit(report, fmt):
    if fmt == "json":
        click.echo(json.dumps(report, indent=1))
        return
    click.echo(f"command: {report['command']}")
    click.echo(f"verdict: {report['verdict']}")
    for key, value in report["diagnostics"].items():
        if isinstance(value, (dict, list)):
            click.echo(f"{key}: {json.dumps(value)}")
        else:
            click.echo(f"{key}: {value}")
    click.echo(f"timing_ms: {report['timing_ms']:.3f}")


def _fail_input(command, config, fmt, started, exc):
    report = _build_report(command, "error", EXIT_INPUT_ERROR, config,
                           {"error": str(exc), "kind": type(exc).__name__},
                           started)
    _emit(report, fmt)
    sys.exit(EXIT_INPUT_ERROR)


_format_option = click.option("--format", "fmt", type=click.Choice(["text", "json"]),
                              default="text", show_default=True,
                              help="Report format.")
_tolerance_option = click.option("--tolerance", type=float, default=DEFAULT_TOL,
                                 show_default=True,
                                 help="Numerical tolerance for every check in this run.")


@click.group()
def main():
    """Decide, certify, or refute local distinguishability of finite
    ensembles of orthogonal bipartite pure states."""


@main.command("schmidt")
@click.argument("ensemble_path", type=click.Path())
@_format_option
@_tolerance_option
def cmd_schmidt(ensemble_path, fmt, tolerance):
    """Per-state Schmidt ranks and weights of an ensemble file."""
    started = time.perf_counter()
    config = {"ensemble": str(ensemble_path), "tolerance": tolerance}
    try:
        ens = load_ensemble(ensemble_path, tol=tolerance)
    except LoccdistError as exc:
        _fail_input("schmidt", config, fmt, started, exc)
    rows = []
    for s in ens.states:
        dec = schmidt_decompose(s)
        rows.append({"name": s.name, "schmidt_number": dec.schmidt_number,
                     "weights": [float(w) for w in dec.weights]})
    report = _build_report("schmidt", "ok", 0, config,
                           {"dims": [ens.dim_a, ens.dim_b], "states": rows},
                           started)
    _emit(report, fmt)
    sys.exit(0)


@main.command("check")
@click.argument("ensemble_path", type=click.Path())
@click.option("--mode", type=click.Choice(["necessary", "classify2x2", "full"]),
              default="full", show_default=True)
@click.option("--max-depth", type=int, default=6, show_default=True)
@click.option("--strategy", type=click.Choice(["standard", "cross-operator",
                                               "zero-diagonal", "exhaustive-2d"]),
              default="cross-operator", show_default=True)
@click.option("--beam", type=int, default=64, show_default=True)
@_format_option
@_tolerance_option
def cmd_check(ensemble_path, mode, max_depth, strategy, beam, fmt, tolerance):
    """Decide distinguishability of an ensemble file."""
    started = time.perf_counter()
    config = {"ensemble": str(ensemble_path), "mode": mode,
              "max_depth": max_depth, "strategy": strategy, "beam": beam,
              "tolerance": tolerance}
    try:
        ens = load_ensemble(ensemble_path, tol=tolerance)
    except LoccdistError as exc:
        _fail_input("check", config, fmt, started, exc)

    diagnostics: dict = {}
    try:
        if mode == "necessary":
            report = schmidt_sum_check(ens)
            diagnostics["schmidt_numbers"] = list(report.schmidt_numbers)
            diagnostics["schmidt_sum"] = report.total
            diagnostics["capacity"] = report.capacity
            if report.violates:
                verdict, code = "indistinguishable", EXIT_INDISTINGUISHABLE
            else:
                verdict, code = "unknown", EXIT_UNKNOWN
        elif mode == "classify2x2":
            cfg = SearchConfig(max_depth=max_depth, candidate_strategy=strategy,
                               tolerance=tolerance, beam_limit=beam)
            cls = classify_2x2(ens, cfg, tol=tolerance)
            diagnostics["schmidt_numbers"] = list(cls.schmidt_report.schmidt_numbers)
            diagnostics["schmidt_sum"] = cls.schmidt_report.total
            diagnostics["capacity"] = cls.schmidt_report.capacity
            if cls.warnings:
                diagnostics["warnings"] = list(cls.warnings)
            if cls.distinguishable:
                diagnostics["protocol"] = protocol_to_dict(cls.protocol)
                verdict, code = "distinguishable", EXIT_DISTINGUISHABLE
            else:
                diagnostics["reason"] = cls.reason
                verdict, code = "indistinguishable", EXIT_INDISTINGUISHABLE
        else:  # full
            cfg = SearchConfig(max_depth=max_depth, candidate_strategy=strategy,
                               tolerance=tolerance, beam_limit=beam)
            outcome = search_protocol(ens, cfg)
            rep = outcome.schmidt_report
            diagnostics["schmidt_numbers"] = list(rep.schmidt_numbers)
            diagnostics["schmidt_sum"] = rep.total
            diagnostics["capacity"] = rep.capacity
            diagnostics["nodes_explored"] = outcome.nodes_explored
            if outcome.verdict == "yes":
                diagnostics["protocol"] = protocol_to_dict(outcome.protocol)
                verdict, code = "distinguishable", EXIT_DISTINGUISHABLE
            elif outcome.verdict == "proved-no":
                diagnostics["reason"] = (f"Schmidt ranks sum to {rep.total} > "
                                         f"capacity {rep.capacity}")
                verdict, code = "indistinguishable", EXIT_INDISTINGUISHABLE
            else:
                diagnostics["search_depth"] = outcome.max_depth
                verdict, code = "unknown", EXIT_UNKNOWN
    except WrongDimensions as exc:
        _fail_input("check", config, fmt, started, exc)

    _emit(_build_report("check", verdict, code, config, diagnostics, started), fmt)
    sys.exit(code)


@main.command("verify")
@click.argument("ensemble_path", type=click.Path())
@click.argument("protocol_path", type=click.Path())
@_format_option
@_tolerance_option
def cmd_verify(ensemble_path, protocol_path, fmt, tolerance):
    """Check a protocol file against an ensemble file."""
    started = time.perf_counter()
    config = {"ensemble": str(ensemble_path), "protocol": str(protocol_path),
              "tolerance": tolerance}
    try:
        ens = load_ensemble(ensemble_path, tol=tolerance)
        tree = load_protocol(protocol_path)
        report = verify_protocol(tree, ens, tol=tolerance)
    except LoccdistError as exc:
        _fail_input("verify", config, fmt, started, exc)
    leaves = [
        {"path": format_path(path), "identify": label, "probabilities": probs}
        for path, label, probs in report.leaves
    ]
    diagnostics = {
        "completeness_deviation": report.completeness_deviation,
        "state_totals": report.state_totals,
        "failures": list(report.failures),
        "leaves": leaves,
    }
    verdict = "verified" if report.ok else "refuted"
    code = 0 if report.ok else 1
    _emit(_build_report("verify", verdict, code, config, diagnostics, started), fmt)
    sys.exit(code)


@main.command("search")
@click.argument("ensemble_path", type=click.Path())
@click.option("--max-depth", type=int, default=6, show_default=True)
@click.option("--strategy", type=click.Choice(["standard", "cross-operator",
                                               "zero-diagonal", "exhaustive-2d"]),
              default="cross-operator", show_default=True)
@click.option("--beam", type=int, default=64, show_default=True)
@click.option("--output", type=click.Path(), default=None,
              help="Protocol file to write on success "
                   "[default: <ensemble>.protocol.json].")
@_format_option
@_tolerance_option
def cmd_search(ensemble_path, max_depth, strategy, beam, output, fmt, tolerance):
    """Search for a discrimination protocol; write it on success."""
    started = time.perf_counter()
    config = {"ensemble": str(ensemble_path), "max_depth": max_depth,
              "strategy": strategy, "beam": beam, "tolerance": tolerance}
    try:
        ens = load_ensemble(ensemble_path, tol=tolerance)
        cfg = SearchConfig(max_depth=max_depth, candidate_strategy=strategy,
                           tolerance=tolerance, beam_limit=beam)
    except (LoccdistError, ValueError) as exc:
        _fail_input("search", config, fmt, started, exc)
    outcome = search_protocol(ens, cfg)
    rep = outcome.schmidt_report
    diagnostics = {
        "schmidt_sum": rep.total,
        "capacity": rep.capacity,
        "nodes_explored": outcome.nodes_explored,
        "search_depth": outcome.max_depth,
    }
    if outcome.verdict == "yes":
        out_path = Path(output) if output else Path(str(ensemble_path)).with_suffix(
            ".protocol.json")
        write_json(out_path, protocol_to_dict(outcome.protocol))
        diagnostics["protocol_path"] = str(out_path)
        verdict, code = "distinguishable", EXIT_DISTINGUISHABLE
    elif outcome.verdict == "proved-no":
        diagnostics["reason"] = (f"Schmidt ranks sum to {rep.total} > capacity "
                                 f"{rep.capacity}")
        verdict, code = "indistinguishable", EXIT_INDISTINGUISHABLE
    else:
        verdict, code = "unknown", EXIT_UNKNOWN
    _emit(_build_report("search", verdict, code, config, diagnostics, started), fmt)
    sys.exit(code)


@main.command("example")
@click.argument("name")
@click.option("--output", type=click.Path(), default=None,
              help="Ensemble file to write [default: <name>.json].")
@click.option("--seed", type=int, default=0, show_default=True,
              help="Seed for the random-* generators.")
@click.option("--dims", default="2x2", show_default=True,
              help="Local dimensions for the random-* generators, e.g. 3x2.")
@click.option("--count", type=int, default=4, show_default=True,
              help="Number of states for the random-* generators.")
@_format_option
@_tolerance_option
def cmd_example(name, output, seed, dims, count, fmt, tolerance):
    """Write a canned ensemble (bell4, bell3, bell2, six4x4, domino9) or a
    generated one (random-product, random-haar); canned protocols are written
    alongside where available."""
    started = time.perf_counter()
    config = {"name": name, "seed": seed, "dims": dims, "count": count,
              "tolerance": tolerance}
    try:
        if name in CANNED_EXAMPLES:
            ens = canned_example(name)
        elif name in ("random-product", "random-haar"):
            try:
                da, db = (int(x) for x in dims.lower().split("x"))
            except ValueError as exc:
                raise ParseError("expected NxM, e.g. 2x2", "--dims") from exc
            kind = "product-basis" if name == "random-product" else "haar-orthogonal"
            ens = random_ensemble(da, db, count, seed, kind=kind, tol=tolerance)
        else:
            raise LoccdistError(
                f"unknown example {name!r}; known: {', '.join(CANNED_EXAMPLES)}, "
                f"random-product, random-haar")
    except LoccdistError as exc:
        _fail_input("example", config, fmt, started, exc)

    out_path = Path(output) if output else Path(f"{name}.json")
    write_json(out_path, ensemble_to_dict(ens))
    diagnostics = {"ensemble_path": str(out_path),
                   "dims": [ens.dim_a, ens.dim_b], "m": ens.m}
    protocol_name = {"six4x4": "six4x4", "bell2": "bell2-x"}.get(name)
    if protocol_name:
        proto_path = out_path.with_suffix(".protocol.json")
        write_json(proto_path, protocol_to_dict(canned_protocol(protocol_name)))
        diagnostics["protocol_path"] = str(proto_path)
    _emit(_build_report("example", "written", 0, config, diagnostics, started), fmt)
    sys.exit(0)


if __name__ == "__main__":  # pragma: no cover
    main()
