"""Command-line front end: ``district-pack {gen,solve,oracle,validate,measure}``.

Exit codes: 0 success, 2 usage or configuration error, 3 a produced plan
failed validation.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .baker import baker_solve
from .constraints import ConfigError, ProblemSpec, as_fraction, validate_districting
from .graph import Districting, Graph
from .instances import (gen_clique_reduction, gen_grid, gen_is_reduction, gen_knapsack_tree,
                        gen_random_planar, gen_random_tree)
from .io import (SchemaError, districts_from_json, duals_from_json, fractional_from_json,
                 instance_from_json, instance_to_json, read_json, write_json)
from .lp import correlation_ratio, solve_and_round
from .packing_dp import brute_pack, pack_districts_bounded_tw
from .subgraph_sum import separation_oracle

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INVALID = 3


@dataclass
class RunReport:
    algorithm: str
    parameters: dict
    seed: int
    objective: int
    districting: Districting
    lp_value: float | None = None
    correlation: float | None = None
    certified: bool | None = None
    wall_time: float = field(default=0.0, compare=False)

    def to_json(self, with_time: bool = True) -> dict:
        out = {"v": 1, "algorithm": self.algorithm, "parameters": self.parameters,
               "seed": self.seed, "objective": self.objective, "lp_value": self.lp_value,
               "correlation": self.correlation, "certified": self.certified,
               "districts": self.districting.to_json()["districts"]}
        if with_time:
            out["wall_time"] = self.wall_time
        return out


def default_threads() -> int:
    raw = os.environ.get("DISTRICT_PACK_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def run_solve(inst, algo: str, eps=Fraction(1, 10), delta=None, seed: int = 0,
              repeats: int = 50, root: int | None = None, max_iters: int = 200,
              threads: int = 1) -> RunReport:
    """Run one pipeline and return its report (validation is left to the caller)."""
    g, wa, spec = inst.graph, inst.weights, inst.spec
    if delta is not None:
        spec = spec.replace(delta=as_fraction(delta))
    eps = as_fraction(eps)
    params = {"eps": [eps.numerator, eps.denominator],
              "delta": [spec.delta.numerator, spec.delta.denominator],
              "repeats": repeats, "root": root, "max_iters": max_iters}
    start = time.perf_counter()
    lp_value = corr = certified = None
    if algo == "lp-round":
        if spec.delta != 0:
            raise ConfigError("lp-round works with exact constraints; drop --delta")
        rep = solve_and_round(g, wa, spec, eps, seed, repeats, max_iters, threads)
        plan, lp_value, corr, certified = rep.districting, rep.lp_value, rep.correlation, rep.certified
    elif algo == "dp":
        plan = pack_districts_bounded_tw(g, wa, spec, eps)
    elif algo == "baker":
        plan = baker_solve(g, wa, spec, eps, root, threads)
    elif algo == "brute":
        plan = brute_pack(g, wa, spec, relaxed=spec.delta > 0)
    else:
        raise ConfigError(f"unknown algorithm {algo!r}")
    return RunReport(algo, params, seed, plan.objective, plan, lp_value, corr, certified,
                     time.perf_counter() - start)


def _spec_overrides(args, base: ProblemSpec) -> ProblemSpec:
    changes = {}
    for name in ("mode", "k", "radius", "c", "B", "delta"):
        val = getattr(args, name, None)
        if val is not None:
            changes[name] = as_fraction(val) if name in ("c", "delta") else val
    if changes.get("mode") == "threshold" and "B" not in changes and base.B is None:
        raise ConfigError("threshold mode needs --B")
    return base.replace(**changes) if changes else base


def _parse_edges(text: str) -> list[tuple[int, int]]:
    if not text:
        return []
    try:
        return [tuple(int(x) for x in part.split("-")) for part in text.split(",")]
    except ValueError:
        raise ConfigError(f"bad edge list {text!r}; expected e.g. 0-1,1-2") from None


def cmd_gen(args) -> int:
    kind = args.kind
    if kind == "grid":
        inst = gen_grid(args.rows, args.cols, args.pattern, args.seed, args.max_weight)
    elif kind == "tree":
        inst = gen_random_tree(args.n, args.seed, args.max_weight)
    elif kind == "planar":
        inst = gen_random_planar(args.n, args.seed, args.max_weight)
    elif kind == "knapsack-tree":
        try:
            items = [tuple(int(x) for x in it.split(":")) for it in args.items.split(",")]
        except ValueError:
            raise ConfigError("items must look like u:w,u:w") from None
        inst = gen_knapsack_tree(items, args.U)
    elif kind == "is-reduction":
        inst = gen_is_reduction(Graph.from_edges(args.n0, _parse_edges(args.edges)), args.k)
    elif kind == "clique-reduction":
        inst = gen_clique_reduction(Graph.from_edges(args.n0, _parse_edges(args.edges)),
                                    args.T, args.k)
    else:
        raise ConfigError(f"unknown generator {kind!r}")
    if kind in ("grid", "tree", "planar"):
        inst = type(inst)(inst.graph, inst.weights, _spec_overrides(args, inst.spec), inst.meta)
    write_json(instance_to_json(inst), args.output)
    return EXIT_OK


def cmd_solve(args) -> int:
    inst = instance_from_json(read_json(args.instance))
    if args.algo in ("dp", "baker"):
        delta = as_fraction(args.delta) if args.delta is not None else inst.spec.delta
        if delta <= 0:
            raise ConfigError(f"--algo {args.algo} needs delta > 0 (use lp-round for exact constraints)")
    report = run_solve(inst, args.algo, args.eps, args.delta, args.seed, args.repeats,
                       args.root, args.max_iters, args.threads)
    spec = inst.spec if args.delta is None else inst.spec.replace(delta=as_fraction(args.delta))
    relaxed = args.algo in ("dp", "baker") or (args.algo == "brute" and spec.delta > 0)
    check = validate_districting(inst.graph, inst.weights, spec, report.districting.districts, relaxed)
    write_json(report.to_json(with_time=not args.no_time), args.output)
    if not check.ok or check.total_objective != report.objective:
        print("produced plan failed validation", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


def cmd_oracle(args) -> int:
    inst = instance_from_json(read_json(args.instance))
    ys = duals_from_json(read_json(args.duals), inst.graph.n)
    den = math.lcm(*(y.denominator for y in ys)) if ys else 1
    ints = [int(y * den) for y in ys]
    res = separation_oracle(inst.graph, inst.weights.with_column("dual", ints), inst.spec,
                            args.eps, dual_scale=Fraction(1, den), threads=args.threads)
    write_json(res.to_json(), args.output)
    return EXIT_OK


def cmd_validate(args) -> int:
    inst = instance_from_json(read_json(args.instance))
    plan = districts_from_json(read_json(args.plan), inst.graph.n)
    spec = inst.spec if args.delta is None else inst.spec.replace(delta=as_fraction(args.delta))
    rep = validate_districting(inst.graph, inst.weights, spec, plan, args.relaxed)
    write_json(rep.to_json(), args.output)
    return EXIT_OK


def cmd_measure(args) -> int:
    inst = instance_from_json(read_json(args.instance))
    fs = fractional_from_json(read_json(args.fractional), inst.weights)
    if not fs.columns:
        raise SchemaError("fractional solution has no columns")
    write_json({"v": 1, "correlation_ratio": correlation_ratio(fs),
                "objective": fs.objective, "feasible": fs.is_feasible()}, args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="district-pack",
                                description="Pack connected, radius-bounded districts.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, threads=False):
        sp.add_argument("-o", "--output", default=None, help="output file (default stdout)")
        if threads:
            sp.add_argument("--threads", type=int, default=default_threads(),
                            help="worker threads (env DISTRICT_PACK_THREADS)")

    gen = sub.add_parser("gen", help="generate an instance")
    gen.add_argument("kind", choices=["grid", "tree", "planar", "knapsack-tree",
                                      "is-reduction", "clique-reduction"])
    gen.add_argument("--rows", type=int, default=2)
    gen.add_argument("--cols", type=int, default=2)
    gen.add_argument("--pattern", choices=["unit", "random"], default="unit")
    gen.add_argument("--n", type=int, default=9)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--max-weight", type=int, default=5)
    gen.add_argument("--items", help="knapsack items as u:w,u:w,...")
    gen.add_argument("--U", type=int)
    gen.add_argument("--n0", type=int, help="vertex count of the source graph")
    gen.add_argument("--edges", default="", help="source graph edges as 0-1,1-2,...")
    gen.add_argument("--T", type=int, help="clique size")
    gen.add_argument("--k", type=int, default=None)
    gen.add_argument("--mode", choices=["balanced", "threshold"])
    gen.add_argument("--radius", choices=["strong", "weak"])
    gen.add_argument("--c")
    gen.add_argument("--B", type=int)
    gen.add_argument("--delta")
    common(gen)
    gen.set_defaults(func=cmd_gen)

    solve = sub.add_parser("solve", help="solve an instance")
    solve.add_argument("instance")
    solve.add_argument("--algo", choices=["lp-round", "dp", "baker", "brute"], required=True)
    solve.add_argument("--eps", default="0.1")
    solve.add_argument("--delta", default=None)
    solve.add_argument("--seed", type=int, default=0)
    solve.add_argument("--repeats", type=int, default=50)
    solve.add_argument("--root", type=int, default=None)
    solve.add_argument("--max-iters", type=int, default=200)
    solve.add_argument("--no-time", action="store_true", help="omit wall_time from the report")
    common(solve, threads=True)
    solve.set_defaults(func=cmd_solve)

    orc = sub.add_parser("oracle", help="run the separation oracle")
    orc.add_argument("instance")
    orc.add_argument("duals")
    orc.add_argument("--eps", default="0.1")
    common(orc, threads=True)
    orc.set_defaults(func=cmd_oracle)

    val = sub.add_parser("validate", help="validate a plan")
    val.add_argument("instance")
    val.add_argument("plan")
    val.add_argument("--relaxed", action="store_true")
    val.add_argument("--delta", default=None)
    common(val)
    val.set_defaults(func=cmd_validate)

    mea = sub.add_parser("measure", help="correlation ratio of a fractional solution")
    mea.add_argument("instance")
    mea.add_argument("fractional")
    common(mea)
    mea.set_defaults(func=cmd_measure)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "gen":
        missing = {"knapsack-tree": ("items", "U"), "is-reduction": ("n0",),
                   "clique-reduction": ("n0", "T")}.get(args.kind, ())
        for name in missing:
            if getattr(args, name) is None:
                parser.error(f"gen {args.kind} requires --{name}")
        if args.kind in ("is-reduction",) and args.k is None:
            args.k = 1
        if args.kind == "clique-reduction" and args.k is None:
            args.k = 2
    try:
        return args.func(args)
    except (ConfigError, SchemaError, ValueError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
