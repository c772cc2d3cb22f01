"""Command-line front end: fixtures, exports and the divergence scan."""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
from fractions import Fraction
from pathlib import Path

from .blowup import blowup_ball
from .errors import EnumerationCapError, ShortHHGError
from .extension import extension_ball, standard_vertex
from .hierarchy import (
    ShortStructure,
    consistency_statistic,
    divergence_row,
    four_point_check,
    sample_ball,
    transverse_ell_pairs,
)
from .quasiline import QuasilineChart, tau_distance_bounds, tau_distance_exact_ball
from .quasimorphism import check_link_vanishing, parse_qm_spec, random_words
from .raag import RAAG, DefiningGraph

EXIT_OK, EXIT_INVALID, EXIT_CAP = 0, 2, 3
DEFAULT_GRAPH = DefiningGraph.path("a", "b", "c")


class ConfigError(ShortHHGError, ValueError):
    pass


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from None


def _rational_list(text: str):
    return [_rational(t) for t in text.split(",") if t.strip()]


def _int_range(text: str):
    """``3``, ``1..50`` or ``1,4,9``."""
    try:
        if ".." in text:
            lo, hi = text.split("..")
            return list(range(int(lo), int(hi) + 1))
        return [int(t) for t in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer range: {text!r}") from None


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, float):
        return "inf" if x == float("inf") else x
    if x is None or isinstance(x, (bool, int, str)):
        return x
    return str(x)


class Run:
    """A parsed configuration plus the metadata every artifact carries."""

    def __init__(self, args):
        self.args = args
        self.graph = DefiningGraph.load(args.graph) if args.graph else DEFAULT_GRAPH
        self.group = RAAG(self.graph)
        params = {k.rstrip("_"): v for k, v in sorted(vars(args).items()) if k not in ("func", "command")}
        params["graph"] = self.graph.to_json()
        self.params = _jsonable(params)
        blob = json.dumps(self.params, sort_keys=True, separators=(",", ":"))
        self.digest = hashlib.sha256(blob.encode()).hexdigest()

    def meta(self) -> dict:
        return {"command": self.args.command, "config_digest": self.digest, "parameters": self.params}

    def vertex(self, name: str) -> str:
        if name not in self.graph.index:
            raise ConfigError(f"unknown generator {name!r}")
        return name

    def emit(self, text: str):
        if self.args.out:
            Path(self.args.out).write_text(text)
        else:
            sys.stdout.write(text)

    def emit_json(self, payload: dict):
        self.emit(json.dumps({"meta": self.meta(), **_jsonable(payload)}, indent=2, sort_keys=False) + "\n")

    def header_lines(self):
        yield f"command: {self.args.command}"
        yield f"config_digest: {self.digest}"
        for k, v in self.params.items():
            yield f"{k}: {json.dumps(v, sort_keys=True)}"


def cmd_validate_graph(run: Run):
    run.graph.require_connected()
    run.emit_json({"valid": True, "vertices": list(run.graph.vertices), "edges": run.graph.sorted_edges()})


def cmd_normal_form(run: Run):
    G = run.group
    rows = []
    for text in run.args.words:
        w = G.parse(text)
        rows.append({"input": text, "normal_form": str(w), "length": len(w)})
    run.emit_json({"words": rows})


def cmd_ball(run: Run):
    G = run.group
    layers = G.spheres(run.args.radius, run.args.cap)
    payload = {"radius": run.args.radius, "size": sum(map(len, layers)), "sphere_sizes": [len(s) for s in layers]}
    if run.args.list:
        payload["elements"] = [str(w) for w in G.ball_enumerate(run.args.radius, run.args.cap)]
    run.emit_json(payload)


def _support_ball(run: Run):

    return extension_ball(standard_vertex(run.group, run.vertex(run.args.vertex)), run.args.conj_radius)


def cmd_ext_ball(run: Run):
    ball = _support_ball(run)
    if run.args.format == "dot":
        run.emit(ball.to_dot(run.header_lines()))
    else:
        run.emit_json({"ball": ball.to_json()})


def _chart(run: Run):

    m = parse_qm_spec(run.group, run.args.chart)
    z = run.group.parse(run.args.z) if run.args.z else None
    vertex = None
    if z is None:
        letters = [c for c in run.group.names if run.args.chart.endswith(f":{c}")]
        vertex = letters[0] if letters else None
    return QuasilineChart(m, run.args.cutoff, vertex, z, group=run.group)


def cmd_qm_eval(run: Run):

    G = run.group
    m = parse_qm_spec(G, run.args.chart)
    rows = [{"word": str(G.parse(t)), "value": m(G.parse(t))} for t in run.args.words]
    run.emit_json({"quasimorphism": m.name, "defect_bound": m.defect_bound, "homogeneous": m.homogeneous,
                   "values": rows})


def cmd_quasiline_dist(run: Run):

    chart = _chart(run)
    rows = []
    for text in run.args.words:
        g = run.group.parse(text)
        lo, hi = tau_distance_bounds(g, chart)
        exact = tau_distance_exact_ball(g, chart, search_cap=run.args.search_cap)
        rows.append({"word": str(g), "coordinate": chart.coord(g), "lower": lo, "upper": hi,
                     "exact": exact, "truncated": exact is None})
    run.emit_json({"cutoff": chart.C, "defect_bound": chart.m.defect_bound, "distances": rows})


def _structure(run: Run, lam):

    return ShortStructure(run.group, run.vertex(run.args.vertex), lam, run.args.psi, run.args.cutoff,
                          run.args.conj_radius)


def cmd_blowup_export(run: Run):

    S = _structure(run, run.args.lambda_[0] if run.args.lambda_ else 0)
    B = blowup_ball(S.ball, S.charts, run.args.window, run.args.R, run.args.T)
    if run.args.format == "dot":
        run.emit(B.to_dot(run.header_lines()))
    else:
        run.emit_json({"blowup": B.to_json()})


def cmd_axiom_check(run: Run):

    G = run.group
    lam = run.args.lambda_[0] if run.args.lambda_ else 0
    S = _structure(run, lam)
    v = S.distinguished
    elements = sample_ball(G, run.args.radius, run.args.samples, run.args.seed)
    pairs = transverse_ell_pairs(S.ball, S.charts)
    stat = consistency_statistic(elements, pairs)
    quads = [tuple(sample_ball(G, run.args.radius, 4, run.args.seed * 7919 + i)) for i in range(run.args.quadruples)]
    fp = four_point_check(quads, lam, S)
    conj = random_words(G, 20, 4, run.args.seed)
    vanish = check_link_vanishing(S.charts[v].m, v, conj, group=G)
    max_defect = max(c.m.defect_bound for c in S.charts.values())
    run.emit_json({
        "consistency": {"max": stat.value, "witness": stat.witness, "pairs": stat.pairs, "samples": stat.samples},
        "four_point": {"per_chart": fp.per_chart, "max": fp.value, "quadruples": fp.quadruples,
                       "report_threshold": 10 * max_defect},
        "link_vanishing": {"vertex": v, "max_value": vanish.max_value, "passed": vanish.passed,
                           "checked": vanish.checked, "skipped": vanish.skipped},
    })


def cmd_median(run: Run):
    G = run.group
    x, y, z = (G.parse(t) for t in run.args.points)
    S = _structure(run, run.args.lambda_[0] if run.args.lambda_ else 0)
    res = S.median(x, y, z)
    rows = [{"domain": str(D), "coordinate": c, "representative": res.quasiline_representatives.get(D)}
            for D, c in sorted(res.tuple.items(), key=lambda kv: kv[0].sort_key())]
    run.emit_json({"points": [str(x), str(y), str(z)], "median": rows})


def cmd_diverge_scan(run: Run):

    G = run.group
    lams = run.args.lambda_ or [Fraction(1), Fraction(3)]
    if len(lams) != 2 or lams[0] == lams[1]:
        raise ConfigError("--lambda needs two distinct values")
    v = run.vertex(run.args.vertex)
    z = G.parse(run.args.z) if run.args.z else G.generator(v)
    g = G.parse(run.args.g) if run.args.g else None
    buf = io.StringIO()
    for line in run.header_lines():
        buf.write(f"# {line}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["l", "k", "lambda1", "lambda2", "phi1_of_triple", "phi2_of_triple", "x1", "x2", "divergence"])
    for l in run.args.l:
        ks = run.args.k if run.args.k else [2 * l]
        for k in ks:
            row = divergence_row(G, lams[0], lams[1], k, l, v, z, g, run.args.psi)
            writer.writerow([l, k, row.lambda1, row.lambda2, " ".join(map(str, row.phi1_of_triple)),
                             " ".join(map(str, row.phi2_of_triple)), row.x1, row.x2, row.divergence])
    run.emit(buf.getvalue())


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--graph", help="defining graph as JSON {vertices, edges}; default the path a-b-c")
    common.add_argument("--out", help="write the artifact here instead of stdout")
    common.add_argument("--seed", type=int, default=0)

    chart = argparse.ArgumentParser(add_help=False)
    chart.add_argument("--chart", default="exp:b", help="quasimorphism spec, e.g. exp:b or lam:1:exp:b:brooks:ac")
    chart.add_argument("--cutoff", type=_rational, help="chart cutoff C; default from the defect")
    chart.add_argument("--z", help="central element of the chart; default the chart's generator")

    struct = argparse.ArgumentParser(add_help=False)
    struct.add_argument("--vertex", default="b", help="distinguished vertex carrying the φ^λ chart")
    struct.add_argument("--lambda", dest="lambda_", type=_rational_list, help="comma-separated rationals")
    struct.add_argument("--psi", help="Brooks pattern for ψ; default the first two link vertices")
    struct.add_argument("--cutoff", type=_rational, help="cutoff of the distinguished chart")
    struct.add_argument("--conj-radius", type=int, default=1, help="conjugator radius of the support ball")

    p = argparse.ArgumentParser(prog="shorthhg", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate-graph", help="check a defining graph is connected and square-free", parents=[common])
    s.set_defaults(func=cmd_validate_graph)

    s = sub.add_parser("normal-form", help="shortlex normal forms of words", parents=[common])
    s.add_argument("words", nargs="+")
    s.set_defaults(func=cmd_normal_form)

    s = sub.add_parser("ball", help="sizes (and optionally elements) of a Cayley ball", parents=[common])
    s.add_argument("--radius", "--r", type=int, default=2)
    s.add_argument("--list", action="store_true", help="also list the elements")
    s.add_argument("--cap", type=int, default=None, help="abort once the ball exceeds this many elements")
    s.set_defaults(func=cmd_ball)

    s = sub.add_parser("ext-ball", help="extension-graph ball as JSON or DOT", parents=[common])
    s.add_argument("--vertex", default="b")
    s.add_argument("--conj-radius", type=int, default=1)
    s.add_argument("--format", choices=("json", "dot"), default="json")
    s.set_defaults(func=cmd_ext_ball)

    s = sub.add_parser("qm-eval", help="evaluate a quasimorphism on words", parents=[common])
    s.add_argument("--chart", default="exp:b")
    s.add_argument("words", nargs="+")
    s.set_defaults(func=cmd_qm_eval)

    s = sub.add_parser("quasiline-dist", help="bounds and exact distance in a quasiline chart", parents=[common, chart])
    s.add_argument("--search-cap", type=int, default=8)
    s.add_argument("words", nargs="+")
    s.set_defaults(func=cmd_quasiline_dist)

    s = sub.add_parser("blowup-export", help="blowup ball vertices and edges as JSON", parents=[common, struct])
    s.add_argument("--window", type=_rational, default=Fraction(1), help="keep L-points with |coordinate| ≤ window")
    s.add_argument("--R", type=_rational, default=Fraction(2))
    s.add_argument("--T", type=_rational, default=Fraction(4))
    s.add_argument("--format", choices=("json", "dot"), default="json")
    s.set_defaults(func=cmd_blowup_export)

    s = sub.add_parser("axiom-check", help="sampled median axioms, consistency and link vanishing", parents=[common, struct])
    s.add_argument("--radius", type=int, default=5, help="sample elements from this group ball")
    s.add_argument("--samples", type=int, default=1000)
    s.add_argument("--quadruples", type=int, default=200)
    s.set_defaults(func=cmd_axiom_check)

    s = sub.add_parser("median", help="coordinatewise median of three elements", parents=[common, struct])
    s.add_argument("points", nargs=3)
    s.set_defaults(func=cmd_median)

    s = sub.add_parser("diverge-scan", help="CSV of median divergence for two chart parameters", parents=[common, struct])
    s.add_argument("--l", type=_int_range, default=list(range(1, 51)))
    s.add_argument("--k", type=_int_range, help="default k = 2l")
    s.add_argument("--z", help="generator of Z_v; default the vertex generator")
    s.add_argument("--g", help="element of the link parabolic; default the product of ψ's letters")
    s.set_defaults(func=cmd_diverge_scan)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(Run(args))
    except EnumerationCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (ShortHHGError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
