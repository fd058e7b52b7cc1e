"""Command-line interface: JSON problem files in, tables or versioned JSON out.

Exit codes: 0 success, 1 input or validation error, 2 internal numerical
failure (for example an infeasible LP on user-supplied moments).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

from .bounding import (
    BoundPair,
    atleast_r_bounds,
    boolean_lp_bounds,
    boolean_system_from_boxes,
    exactly_r_bounds,
    hunter_worsley_upper,
    pairwise_probabilities,
    q_atleast_bounds,
    q_exactly_bounds,
    union_bounds,
)
from .errors import InfeasibleBoundsError, InputError
from .geometry import Box, EmptinessMode
from .measure import PiecewiseCdf, ProductMeasure, UniformInterval
from .oracle import (
    exact_count_distribution,
    full_inclusion_exclusion_union,
    monte_carlo_union,
)
from .screening import (
    MomentVector,
    binomial_moments,
    build_graph,
    enumerate_tuples,
    pair_verdicts,
    screened_union,
    to_dot,
)

JSON_VERSION = 1
FORMAT_ENV_VAR = "BOXBOUNDS_FORMAT"


@dataclass
class GeometryProblem:
    boxes: list[Box]
    measure: ProductMeasure
    mode: EmptinessMode | None


# ---------------------------------------------------------------------------
# Input parsing


def _fail(message: str) -> "InputError":
    return InputError(message)


def _number(value, what: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise _fail(f"{what} must be a number, got {value!r}")
    return float(value)


def _vector(value, length: int, what: str) -> tuple[float, ...]:
    if not isinstance(value, list) or len(value) != length:
        raise _fail(f"{what} must be a list of {length} numbers")
    return tuple(_number(v, what) for v in value)


def _parse_marginal(obj, index: int):
    if not isinstance(obj, dict) or "type" not in obj:
        raise _fail(f"marginal {index}: expected an object with a 'type' key")
    kind = obj["type"]
    if kind == "uniform":
        return UniformInterval(
            _number(obj.get("a"), f"marginal {index} 'a'"),
            _number(obj.get("b"), f"marginal {index} 'b'"),
        )
    if kind == "piecewise":
        knots = obj.get("knots")
        values = obj.get("values")
        if not isinstance(knots, list) or not isinstance(values, list):
            raise _fail(f"marginal {index}: 'knots' and 'values' must be lists")
        return PiecewiseCdf(
            tuple(_number(v, "knot") for v in knots),
            tuple(_number(v, "value") for v in values),
        )
    raise _fail(f"marginal {index}: unknown type {kind!r}")


def _parse_measure(obj, dimension: int) -> ProductMeasure:
    if not isinstance(obj, dict) or "type" not in obj:
        raise _fail("measure must be an object with a 'type' key")
    kind = obj["type"]
    if kind == "uniform":
        lower = _vector(obj.get("lower"), dimension, "measure lower")
        upper = _vector(obj.get("upper"), dimension, "measure upper")
        return ProductMeasure.uniform(lower, upper)
    if kind == "marginals":
        marginals = obj.get("marginals")
        if not isinstance(marginals, list) or len(marginals) != dimension:
            raise _fail(f"measure needs exactly {dimension} marginals")
        return ProductMeasure(
            tuple(_parse_marginal(m, i) for i, m in enumerate(marginals))
        )
    raise _fail(f"unknown measure type {kind!r}")


def _parse_mode(value) -> EmptinessMode:
    for mode in EmptinessMode:
        if value == mode.value:
            return mode
    choices = ", ".join(mode.value for mode in EmptinessMode)
    raise _fail(f"unknown mode {value!r} (choices: {choices})")


def parse_geometry(doc) -> GeometryProblem:
    if not isinstance(doc, dict):
        raise _fail("problem file must be a JSON object")
    dimension = doc.get("dimension")
    if not isinstance(dimension, int) or dimension < 1:
        raise _fail("'dimension' must be a positive integer")
    measure = _parse_measure(doc.get("measure"), dimension)
    raw_boxes = doc.get("boxes")
    if not isinstance(raw_boxes, list):
        raise _fail("'boxes' must be a list")
    boxes = []
    seen_ids = set()
    for i, raw in enumerate(raw_boxes):
        if not isinstance(raw, dict):
            raise _fail(f"box {i}: expected an object")
        box_id = raw.get("id")
        if not isinstance(box_id, str) or not box_id:
            raise _fail(f"box {i}: 'id' must be a nonempty string")
        if box_id in seen_ids:
            raise _fail(f"duplicate box id {box_id!r}")
        seen_ids.add(box_id)
        boxes.append(
            Box(
                box_id,
                _vector(raw.get("lower"), dimension, f"box {box_id!r} lower"),
                _vector(raw.get("upper"), dimension, f"box {box_id!r} upper"),
            )
        )
    mode = _parse_mode(doc["mode"]) if "mode" in doc else None
    return GeometryProblem(boxes, measure, mode)


def parse_moments(doc) -> MomentVector:
    if not isinstance(doc, dict):
        raise _fail("moments file must be a JSON object")
    n_events = doc.get("n_events")
    if not isinstance(n_events, int) or n_events < 0:
        raise _fail("'n_events' must be a nonnegative integer")
    s = doc.get("s")
    if not isinstance(s, list) or not s:
        raise _fail("'s' must be a nonempty list of moments S_1..S_m")
    q = None
    if doc.get("q") is not None:
        q = _number(doc["q"], "'q'")
    return MomentVector(n_events, tuple(_number(v, "'s' entry") for v in s), q)


def load_document(path: str):
    try:
        with open(path, encoding="utf-8") as handle:
            return json.load(handle)
    except OSError as exc:
        raise _fail(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise _fail(f"{path} is not valid JSON: {exc}") from exc


def _resolve_mode(args, problem: GeometryProblem) -> EmptinessMode:
    if getattr(args, "mode", None):
        return _parse_mode(args.mode)
    if problem.mode is not None:
        return problem.mode
    return EmptinessMode.POSITIVE_MEASURE


# ---------------------------------------------------------------------------
# Rendering


def _fmt(value: float) -> str:
    return format(value, ".12g")


def _fmt_coord(value: float) -> str:
    return format(value, "g")


def _fmt_box(lower, upper) -> str:
    left = ", ".join(_fmt_coord(v) for v in lower)
    right = ", ".join(_fmt_coord(v) for v in upper)
    return f"[({left}), ({right})]"


def _order_name(k: int) -> str:
    return {2: "pairs", 3: "triples"}.get(k, f"{k}-tuples")


def _kv_table(pairs) -> str:
    width = max(len(key) for key, _ in pairs)
    return "\n".join(f"{key.ljust(width)}  {value}" for key, value in pairs)


# ---------------------------------------------------------------------------
# Subcommands


def _cmd_screen(args):
    problem = parse_geometry(load_document(args.file))
    mode = _resolve_mode(args, problem)
    boxes = problem.boxes
    n = len(boxes)
    max_order = n if args.max_order is None else args.max_order
    graph = build_graph(boxes, mode)
    ledger = enumerate_tuples(boxes, graph, mode, n, measure=problem.measure)

    orders_json = {}
    sections = []
    if n >= 2 and max_order >= 2:
        rows = pair_verdicts(boxes, mode)
        orders_json["2"] = [
            {
                "label": row.label,
                "ids": [boxes[i].id for i in row.indices],
                "lower": list(row.lower),
                "upper": list(row.upper),
                "nonempty": row.nonempty,
            }
            for row in rows
        ]
        sections.append(
            (2, [(f"{row.label} = {_fmt_box(row.lower, row.upper)}", row.nonempty) for row in rows])
        )
    for k in sorted(ledger.orders):
        if k < 3 or k > max_order:
            continue
        entries = ledger.entries(k)
        orders_json[str(k)] = [
            {
                "label": entry.box.id,
                "ids": [boxes[i].id for i in entry.indices],
                "lower": list(entry.box.lower),
                "upper": list(entry.box.upper),
                "nonempty": True,
            }
            for entry in entries
        ]
        sections.append(
            (k, [(f"{e.box.id} = {_fmt_box(e.box.lower, e.box.upper)}", True) for e in entries])
        )

    terms_used = ledger.term_count()
    terms_full = 2**n - 1
    doc = {
        "version": JSON_VERSION,
        "command": "screen",
        "mode": mode.value,
        "n_events": n,
        "orders": orders_json,
        "terms_used": terms_used,
        "terms_full": terms_full,
    }

    lines = []
    for k, rows in sections:
        width = max(len(text) for text, _ in rows)
        lines.append(f"{_order_name(k).ljust(width)}  nonempty?")
        for text, verdict in rows:
            lines.append(f"{text.ljust(width)}  {'yes' if verdict else 'no good'}")
        lines.append("")
    lines.append(f"retained {terms_used} of {terms_full} inclusion-exclusion terms")
    return doc, "\n".join(lines)


def _cmd_union(args):
    problem = parse_geometry(load_document(args.file))
    mode = _resolve_mode(args, problem)
    result = screened_union(problem.boxes, problem.measure, mode)
    doc = {
        "version": JSON_VERSION,
        "command": "union",
        "mode": mode.value,
        "q": result.q,
        "terms_used": result.terms_used,
        "terms_full": result.terms_full,
    }
    table = _kv_table(
        [
            ("q", _fmt(result.q)),
            ("terms used", str(result.terms_used)),
            ("terms full", str(result.terms_full)),
        ]
    )
    return doc, table


def _cmd_moments(args):
    problem = parse_geometry(load_document(args.file))
    mode = _resolve_mode(args, problem)
    n = len(problem.boxes)
    m = n if args.m is None else args.m
    if m > n:
        raise _fail(f"--m {m} exceeds the event count {n}")
    moments = binomial_moments(problem.boxes, problem.measure, mode, m)
    doc = {
        "version": JSON_VERSION,
        "command": "moments",
        "mode": mode.value,
        "n_events": moments.n_events,
        "m": moments.m,
        "s": list(moments.s),
        "q": moments.q,
    }
    pairs = [(f"S_{k}", _fmt(moments.s[k - 1])) for k in range(1, moments.m + 1)]
    pairs.append(("q", _fmt(moments.q)))
    return doc, _kv_table(pairs)


def _bounds_inputs(args):
    """Moments (plus geometry when available) for the bounds subcommand."""
    doc = load_document(args.file)
    if isinstance(doc, dict) and "boxes" in doc:
        problem = parse_geometry(doc)
        mode = _resolve_mode(args, problem)
        n = len(problem.boxes)
        if n == 0:
            raise _fail("bounds need at least one event")
        moments = binomial_moments(problem.boxes, problem.measure, mode, n)
        return problem, moments
    if isinstance(doc, dict) and "s" in doc:
        if getattr(args, "mode", None):
            raise _fail("--mode applies only to geometry input")
        return None, parse_moments(doc)
    raise _fail("input file must contain either 'boxes' (geometry) or 's' (moments)")


def _cmd_bounds(args):
    problem, moments = _bounds_inputs(args)
    n = moments.n_events
    target = args.target
    r = args.r
    if target in ("atleast", "exactly") and r is None:
        raise _fail(f"--target {target} requires --r")
    if target == "union" and r is not None:
        raise _fail("--r is meaningless for --target union")
    m = min(3, moments.m) if args.m is None else args.m

    if args.method == "moment":
        if args.with_q:
            effective_r = 1 if target == "union" else r
            if target == "exactly":
                pair = q_exactly_bounds(moments, effective_r, m)
            else:
                pair = q_atleast_bounds(moments, effective_r, m)
        elif target == "union":
            pair = union_bounds(moments, m)
        elif target == "atleast":
            pair = atleast_r_bounds(moments, r, m)
        else:
            pair = exactly_r_bounds(moments, r, m)
        result = pair
    elif args.method == "boolean":
        if problem is None:
            raise _fail("--method boolean needs geometry input")
        if args.with_q:
            raise _fail("--with-q does not apply to the boolean method")
        system = boolean_system_from_boxes(problem.boxes, problem.measure, m)
        result = boolean_lp_bounds(system, target, r)
    else:  # hunter-worsley
        if problem is None:
            raise _fail("--method hunter-worsley needs geometry input")
        if target != "union":
            raise _fail("--method hunter-worsley bounds the union only")
        if args.with_q:
            raise _fail("--with-q does not apply to the hunter-worsley method")
        upper = hunter_worsley_upper(
            moments.s_k(1),
            pairwise_probabilities(problem.boxes, problem.measure),
            n,
        )
        doc = {
            "version": JSON_VERSION,
            "command": "bounds",
            "method": "hunter-worsley",
            "target": "union",
            "upper": upper,
        }
        table = _kv_table([("method", "hunter-worsley"), ("target", "union"), ("upper", _fmt(upper))])
        return doc, table

    doc = {
        "version": JSON_VERSION,
        "command": "bounds",
        "method": result.method,
        "target": target,
        "r": r,
        "m": m,
        "with_q": bool(args.with_q),
        "lower": result.lower,
        "upper": result.upper,
    }
    target_text = target if r is None else f"{target} r={r}"
    table = _kv_table(
        [
            ("method", result.method),
            ("target", target_text),
            ("lower", _fmt(result.lower)),
            ("upper", _fmt(result.upper)),
        ]
    )
    return doc, table


def _cmd_oracle(args):
    problem = parse_geometry(load_document(args.file))
    boxes, measure = problem.boxes, problem.measure
    if args.engine == "ie":
        q = full_inclusion_exclusion_union(boxes, measure)
        doc = {"version": JSON_VERSION, "command": "oracle", "engine": "ie", "q": q}
        return doc, _kv_table([("q", _fmt(q))])
    if args.engine == "cells":
        dist = exact_count_distribution(boxes, measure)
        doc = {
            "version": JSON_VERSION,
            "command": "oracle",
            "engine": "cells",
            "p": list(dist.p),
            "union": dist.union(),
        }
        pairs = [(f"p_{i}", _fmt(v)) for i, v in enumerate(dist.p)]
        pairs.append(("union", _fmt(dist.union())))
        return doc, _kv_table(pairs)
    result = monte_carlo_union(boxes, measure, args.samples, args.seed)
    doc = {
        "version": JSON_VERSION,
        "command": "oracle",
        "engine": "mc",
        "estimate": result.estimate,
        "standard_error": result.standard_error,
        "samples": args.samples,
        "seed": args.seed,
    }
    table = _kv_table(
        [
            ("estimate", _fmt(result.estimate)),
            ("standard error", _fmt(result.standard_error)),
            ("samples", str(args.samples)),
            ("seed", str(args.seed)),
        ]
    )
    return doc, table


def _cmd_graph(args):
    problem = parse_geometry(load_document(args.file))
    mode = _resolve_mode(args, problem)
    graph = build_graph(problem.boxes, mode)
    dot = to_dot(graph, [box.id for box in problem.boxes])
    doc = {"version": JSON_VERSION, "command": "graph", "mode": mode.value, "dot": dot}
    return doc, dot.rstrip("\n")


_COMMANDS = {
    "screen": _cmd_screen,
    "union": _cmd_union,
    "moments": _cmd_moments,
    "bounds": _cmd_bounds,
    "oracle": _cmd_oracle,
    "graph": _cmd_graph,
}


# ---------------------------------------------------------------------------
# Parser and entry point


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--format",
        choices=("json", "table"),
        default=None,
        help=f"output format (default from ${FORMAT_ENV_VAR}, else table)",
    )
    geo = argparse.ArgumentParser(add_help=False)
    geo.add_argument(
        "--mode",
        choices=tuple(mode.value for mode in EmptinessMode),
        default=None,
        help="emptiness test override (default: positive-measure)",
    )

    parser = argparse.ArgumentParser(
        prog="boxbounds",
        description=(
            "Exact probabilities and sharp LP bounds for Boolean functions "
            "of hyperrectangle events under product measures."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("screen", parents=[common, geo], help="tuple verdict tables")
    p.add_argument("file")
    p.add_argument("--max-order", type=int, default=None, help="largest tuple order to list")

    p = sub.add_parser("union", parents=[common, geo], help="exact union probability")
    p.add_argument("file")

    p = sub.add_parser("moments", parents=[common, geo], help="binomial moments and union")
    p.add_argument("file")
    p.add_argument("--m", type=int, default=None, help="highest moment order (default: event count)")

    p = sub.add_parser("bounds", parents=[common, geo], help="lower/upper bounds")
    p.add_argument("file", help="geometry file, or a moments file as emitted by 'moments'")
    p.add_argument("--target", choices=("union", "atleast", "exactly"), default="union")
    p.add_argument("--r", type=int, default=None)
    p.add_argument("--m", type=int, default=None, help="moment order (default: min(3, available))")
    p.add_argument("--with-q", action="store_true", dest="with_q")
    p.add_argument("--method", choices=("moment", "boolean", "hunter-worsley"), default="moment")

    p = sub.add_parser("oracle", parents=[common], help="ground-truth engines")
    p.add_argument("file")
    p.add_argument("--engine", choices=("ie", "cells", "mc"), default="ie")
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("graph", parents=[common, geo], help="DOT intersection graph")
    p.add_argument("file")
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else 1
        return 0 if code == 0 else 1

    out_format = args.format or os.environ.get(FORMAT_ENV_VAR) or "table"
    if out_format not in ("json", "table"):
        print(f"error: unknown output format {out_format!r}", file=sys.stderr)
        return 1

    try:
        doc, table = _COMMANDS[args.command](args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (InfeasibleBoundsError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2

    print(json.dumps(doc, indent=2) if out_format == "json" else table)
    return 0


def main() -> None:
    sys.exit(run())
