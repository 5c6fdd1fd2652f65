"""Command-line entry point: ``crh run|bench-tsp|gen|batch|oracle``.

Exit codes: 0 on success, 1 on a runtime failure, 2 on a usage or input
file error.
"""
from __future__ import annotations

import argparse
import json
import math
import statistics
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path
from typing import List, Optional, Sequence

from sklearn.base import clone
from sklearn.model_selection import ParameterGrid

from .engine import run_mission
from .estimator import CRHController
from .generate import RandomMissionParams, gen_random
from .mission import ControllerConfig, MissionSpec, SpaceExtent
from .oracle import exhaustive_optimal
from .serialize import parse_mission, write_mission, write_summary, write_trajectory, summary_dict
from .tsplib import (
    RewardPolicy,
    UnsupportedInstance,
    bundled_instance,
    known_optima,
    parse_tsplib,
    visit_order_length,
)
from .validation import MissionValidationError


class InputError(Exception):
    """Problem with a file or argument the user supplied (exit code 2)."""


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None


def _write(path: Optional[str], text: str):
    if path is None:
        return
    if path == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc.strerror or exc}") from None


def _load_mission(path: str) -> MissionSpec:
    try:
        return parse_mission(_read(path))
    except MissionValidationError as exc:
        raise InputError(f"{path}: {exc}") from None


def _override(cfg: ControllerConfig, args) -> ControllerConfig:
    kw = {}
    if getattr(args, "lookahead", None) is not None:
        kw["lookahead_depth"] = args.lookahead
    if getattr(args, "gamma", None) is not None:
        kw["sparsity_gamma"] = args.gamma
    if getattr(args, "sparsity_neighbors", None) is not None:
        kw["sparsity_neighbors"] = args.sparsity_neighbors
    if getattr(args, "delta", None) is not None:
        kw["cooperation_delta"] = args.delta
    return replace(cfg, **kw)


def _with_sensing(spec: MissionSpec, fraction: Optional[float]) -> MissionSpec:
    if fraction is None:
        return spec
    if fraction <= 0:
        raise InputError("--sensing-fraction must be positive")
    rng = fraction * spec.space_extent.max_dimension
    return replace(spec, agents=tuple(replace(a, sensing_range=rng) for a in spec.agents))


def _checked(spec: MissionSpec) -> MissionSpec:
    from .validation import mission_violations

    bad = mission_violations(spec)
    if bad:
        raise InputError("invalid settings: " + "; ".join(bad))
    return spec


# ---------------------------------------------------------------- commands
def cmd_run(args) -> int:
    spec = _load_mission(args.mission)
    spec = _checked(_with_sensing(replace(spec, config=_override(spec.config, args)), args.sensing_fraction))
    log = run_mission(spec)
    _write(args.out, write_trajectory(log))
    _write(args.summary, write_summary(log, spec))
    print(f"total_reward {log.total_reward:.6f}")
    print(f"completion_time {log.completion_time:.6f}")
    print(f"visits {len(log.visits())}/{len(spec.targets)}")
    return 0


def _tsp_text(ref: str) -> str:
    if Path(ref).exists():
        return _read(ref)
    try:
        return bundled_instance(ref)
    except (FileNotFoundError, OSError):
        raise InputError(f"cannot read {ref}: no such file or bundled instance") from None


def cmd_bench_tsp(args) -> int:
    text = _tsp_text(args.instance)
    cfg = _override(ControllerConfig(lookahead_depth=2), args)
    policy = RewardPolicy(deadline_factor=args.deadline_factor)
    try:
        spec = parse_tsplib(text, policy, cfg)
    except UnsupportedInstance as exc:
        print(f"skipped: {exc}", file=sys.stderr)
        return 0
    except ValueError as exc:
        raise InputError(f"{args.instance}: {exc}") from None
    spec = _checked(_with_sensing(spec, args.sensing_fraction))
    name = spec.meta.get("name", "instance")
    log = run_mission(spec)
    order = log.visit_order()
    if len(order) < len(spec.targets):
        print(f"warning: {len(spec.targets) - len(order)} nodes were not visited", file=sys.stderr)
    length = visit_order_length(spec, order)
    optimum = args.optimum if args.optimum is not None else known_optima().get(name)
    print(f"instance {name}")
    print(f"lookahead {spec.config.lookahead_depth}")
    print(f"tour_length {length}")
    doc = summary_dict(log, spec, tour_length=length)
    if optimum is not None:
        err = (length - optimum) / optimum * 100.0
        print(f"optimum {optimum}")
        print(f"error_percent {err:.2f}")
        doc["optimum"] = optimum
        doc["error_percent"] = err
    doc["visit_order"] = order
    _write(args.summary, json.dumps(doc, indent=2, sort_keys=True) + "\n")
    _write(args.out, write_trajectory(log))
    return 0


def _params(args, seed: int, clusters: int) -> RandomMissionParams:
    size = args.size
    box = SpaceExtent(0.0, 0.0, size, size)
    return RandomMissionParams(
        target_count=args.targets,
        agent_count=args.agents,
        space_extent=box,
        cluster_count=clusters,
        reward_low=args.reward_low,
        reward_high=args.reward_high,
        deadline_low=args.deadline_low,
        deadline_high=args.deadline_high,
        appearance_fraction=args.appearance_fraction,
        seed=seed,
        mission_time=args.mission_time,
        sensing_range=None if args.sensing_fraction is None else args.sensing_fraction * size,
    )


def cmd_gen(args) -> int:
    try:
        spec = gen_random(_params(args, args.seed, args.clusters))
    except ValueError as exc:
        raise InputError(str(exc)) from None
    spec = _checked(replace(spec, config=_override(spec.config, args)))
    _write(args.out or "-", write_mission(spec))
    return 0


def _run_variant(job):
    est, spec = job
    log = clone(est).fit(spec).simulate()
    return log.total_reward, log.completion_time


def cmd_batch(args) -> int:
    grid = list(ParameterGrid({
        "lookahead_depth": args.lookahead,
        "sparsity_gamma": args.gamma,
        "sparsity_neighbors": [args.sparsity_neighbors],
        "cooperation_delta": [args.delta],
    }))
    base = CRHController()
    variants = [clone(base).set_params(**p) for p in grid]
    layouts = args.clusters
    columns = [(c, v) for c in layouts for v in range(len(variants))]
    jobs = []
    for i in range(args.missions):
        seed = args.seed + i
        for c in layouts:
            try:
                spec = gen_random(_params(args, seed, c))
            except ValueError as exc:
                raise InputError(str(exc)) from None
            for v in variants:
                jobs.append((v, spec))
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_run_variant, jobs))
    else:
        results = [_run_variant(j) for j in jobs]

    def label(c, v):
        p = grid[v]
        layout = "uniform" if c == 0 else f"{c}clusters"
        return f"{layout} K={p['lookahead_depth']} g={p['sparsity_gamma']:g}"

    width = len(columns)
    rows = [results[i * width:(i + 1) * width] for i in range(args.missions)]
    head = ["Mission"] + [label(c, v) for c, v in columns]
    print("\t".join(head))
    for i, row in enumerate(rows):
        print("\t".join([str(i + 1)] + [f"{r:.2f} / {t:.1f}" for r, t in row]))
    avg = [(statistics.fmean(r[k][0] for r in rows), statistics.fmean(r[k][1] for r in rows)) for k in range(width)]
    print("\t".join(["Average"] + [f"{r:.2f} / {t:.1f}" for r, t in avg]))

    doc = {
        "columns": [label(c, v) for c, v in columns],
        "missions": [
            {"seed": args.seed + i, "results": [{"reward": r, "time": t} for r, t in row]}
            for i, row in enumerate(rows)
        ],
        "average": [{"reward": r, "time": t} for r, t in avg],
    }
    _write(args.summary, json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return 0


def cmd_oracle(args) -> int:
    spec = _load_mission(args.mission)
    spec = replace(spec, config=_override(spec.config, args))
    try:
        best = exhaustive_optimal(spec, cap=args.cap)
    except ValueError as exc:
        print(f"oracle: {exc}", file=sys.stderr)
        return 2
    print(f"optimum {best.reward:.6f} order {list(best.order)}")
    top = args.max_k or len(spec.targets)
    rows = []
    prev = None
    for K in range(1, top + 1):
        s = replace(spec, config=replace(spec.config, lookahead_depth=K))
        log = run_mission(s)
        gap = best.reward - log.total_reward
        note = ""
        if prev is not None and log.total_reward < prev - 1e-9:
            note = " (worse than K-1)"
        prev = log.total_reward
        print(f"K={K} reward {log.total_reward:.6f} gap {gap:.6f} order {log.visit_order()}{note}")
        rows.append({"K": K, "reward": log.total_reward, "gap": gap, "order": log.visit_order()})
    _write(args.summary, json.dumps({"optimum": best.reward, "order": list(best.order), "crh": rows}, indent=2, sort_keys=True) + "\n")
    return 0


# ------------------------------------------------------------------ parser
def _controller_flags(p: argparse.ArgumentParser, many: bool = False):
    if many:
        p.add_argument("--lookahead", type=int, nargs="+", default=[1], help="lookahead depths to compare")
        p.add_argument("--gamma", type=float, nargs="+", default=[0.0], help="sparsity weights to compare")
        p.add_argument("--sparsity-neighbors", type=int, default=5)
        p.add_argument("--delta", type=float, default=0.0)
    else:
        p.add_argument("--lookahead", type=int, help="lookahead depth K")
        p.add_argument("--gamma", type=float, help="sparsity weight")
        p.add_argument("--sparsity-neighbors", type=int, help="neighbours in the sparsity term")
        p.add_argument("--delta", type=float, help="cooperation parameter of the proximity function")


def _generator_flags(p: argparse.ArgumentParser, clusters_many: bool = False):
    p.add_argument("--targets", type=int, default=20)
    p.add_argument("--agents", type=int, default=2)
    if clusters_many:
        p.add_argument("--clusters", type=int, nargs="+", default=[0], help="cluster counts (0 = uniform)")
    else:
        p.add_argument("--clusters", type=int, default=0, help="cluster count (0 = uniform)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--size", type=float, default=300.0, help="side of the square mission space")
    p.add_argument("--mission-time", type=float, default=1000.0)
    p.add_argument("--reward-low", type=float, default=10.0)
    p.add_argument("--reward-high", type=float, default=20.0)
    p.add_argument("--deadline-low", type=float, default=300.0)
    p.add_argument("--deadline-high", type=float, default=600.0)
    p.add_argument("--appearance-fraction", type=float, default=0.0)
    p.add_argument("--sensing-fraction", type=float, help="sensing range as a fraction of the space size")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="crh", description="Cooperative receding horizon reward collection")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="simulate a mission file")
    p.add_argument("mission")
    _controller_flags(p)
    p.add_argument("--sensing-fraction", type=float)
    p.add_argument("--seed", type=int, help="accepted for symmetry; runs are deterministic")
    p.add_argument("--out", help="trajectory CSV path")
    p.add_argument("--summary", help="summary JSON path")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("bench-tsp", help="run a TSPLIB EUC_2D instance")
    p.add_argument("instance", help="path to a .tsp file or a bundled instance name")
    _controller_flags(p)
    p.add_argument("--optimum", type=int, help="known optimal tour length")
    p.add_argument("--sensing-fraction", type=float)
    p.add_argument("--deadline-factor", type=float, default=10.0)
    p.add_argument("--out")
    p.add_argument("--summary")
    p.set_defaults(func=cmd_bench_tsp)

    p = sub.add_parser("gen", help="generate a random mission file")
    _generator_flags(p)
    _controller_flags(p)
    p.add_argument("--out", help="output path (default stdout)")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("batch", help="compare controller variants on generated missions")
    _generator_flags(p, clusters_many=True)
    _controller_flags(p, many=True)
    p.add_argument("--missions", type=int, default=10)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--summary")
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("oracle", help="exhaustive optimum versus CRH for K = 1..M")
    p.add_argument("mission")
    _controller_flags(p)
    p.add_argument("--max-k", type=int)
    p.add_argument("--cap", type=int, default=10)
    p.add_argument("--summary")
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - report and map to the runtime exit code
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
