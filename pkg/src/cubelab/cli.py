"""Command-line surface: generation, solving, certification, rendering,
evaluation, table management, policy training, and the session service."""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from .cache import default_table_dir, file_checksum
from .codecs import decode_initial
from .metrics import MetricKind
from .observe import Tier, Viewpoint, observe
from .session import compute_metrics
from .tasks import (DEFAULT_DEPTHS, SplitConfig, TaskGenerator, TestCase,
                    load_manifest, write_manifest)


def _tables():
    from .twophase import build_tables

    return build_tables()


def _pdbs():
    from .optimal import build_pdbs

    return build_pdbs()


def cmd_tables(args) -> int:
    t0 = time.monotonic()
    tables = _tables()
    pdbs = _pdbs()
    print(f"two-phase tables ready ({tables.build_seconds:.1f}s build, "
          f"total {time.monotonic() - t0:.1f}s)")
    for name, info in pdbs.stats().items():
        print(f"pattern db {name}: {info['size']} entries, max distance {info['max']}")
    for f in sorted(default_table_dir().glob("*.tbl")):
        print(f"{f}  sha256={file_checksum(f)[:16]}  {f.stat().st_size/1e6:.1f} MB")
    return 0


def cmd_generate(args) -> int:
    config = SplitConfig(
        depths=tuple(args.depths),
        states_per_depth=args.per_depth,
        settings=tuple(Tier(s) for s in args.settings),
        master_seed=args.seed,
        inline_certify_max=args.inline_max,
    )
    gen = TaskGenerator(_tables(), _pdbs())
    split = gen.generate_split(config)
    write_manifest(split, Path(args.out))
    certified = sum(1 for c in split.cases if c.certified)
    print(f"wrote {len(split.rows)} configurations ({len(split.cases)} cases, "
          f"{certified} certified) to {args.out}")
    return 0


def cmd_certify(args) -> int:
    from .optimal import Certificate, certify_depth

    split = load_manifest(Path(args.manifest))
    pdbs = _pdbs()
    changed = 0
    for i, case in enumerate(split.cases):
        if args.ids and case.id not in args.ids:
            continue
        if case.certified and not args.recheck:
            continue
        resume = None
        payload = case.certificate
        if payload.get("status") == "budget_exceeded":
            resume = Certificate.from_json(json.dumps(
                {k: payload[k] for k in ("status", "target_depth", "optimal_depth",
                                         "witness", "exhausted_bound", "next_bound",
                                         "nodes", "heuristics", "wall_seconds")}))
        cert = certify_depth(case.cube(), case.depth, pdbs,
                             max_nodes=args.max_nodes, resume=resume)
        payload = json.loads(cert.to_json())
        payload["wall_seconds"] = 0.0
        split.cases[i] = TestCase(case.id, case.state, case.depth, case.seed,
                                  cert.status == "certified", payload)
        changed += 1
        print(f"{case.id}: {cert.status} (nodes {cert.nodes})")
    if changed:
        write_manifest(split, Path(args.manifest))
    return 0


def cmd_solve(args) -> int:
    from .twophase import solve_facelets, solve_state, InvalidCubeString

    try:
        if args.format == "solver":
            plan = solve_facelets(args.cube, _tables(), length_goal=args.goal,
                                  time_budget=args.budget)
        else:
            state = decode_initial(args.cube)
            plan = solve_state(state, _tables(), length_goal=args.goal,
                               time_budget=args.budget)
    except InvalidCubeString as exc:
        print(str(exc))
        return 1
    print(plan.rendered)
    return 0


def cmd_optimal(args) -> int:
    from .optimal import ExceedsCap, solve_optimal

    state = decode_initial(args.cube)
    try:
        result = solve_optimal(state, _pdbs(), depth_cap=args.cap)
    except ExceedsCap as exc:
        print(f"exceeds cap: {exc}")
        return 1
    print(f"{result.plan.rendered}  depth={result.depth} nodes={result.certificate.nodes}")
    return 0


def cmd_render(args) -> int:
    state = decode_initial(args.cube)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    tiers = [Tier(args.tier)] if args.tier else list(Tier)
    written = []
    for tier in tiers:
        if tier == Tier.FULL_SYMBOLIC:
            continue
        vp = Viewpoint.for_tier(tier)
        if tier == Tier.FACE_VIEW and args.face:
            vp = Viewpoint(face=args.face)
        if tier == Tier.VERTEX_VIEW and args.vertex:
            vp = Viewpoint(vertex=args.vertex)
        image = observe(state, tier, vp)
        path = out / f"{tier.value}.png"
        path.write_bytes(image.to_png_bytes())
        written.append(path)
    print("\n".join(str(p) for p in written))
    return 0


def _apply_config_file(args, fields: tuple[str, ...]) -> None:
    """Fill unset argparse fields from a declarative JSON config file."""
    if not getattr(args, "config", None):
        return
    raw = json.loads(Path(args.config).read_text())
    for key in fields:
        if getattr(args, key, None) in (None, False) and key in raw:
            setattr(args, key, raw[key])


def cmd_evaluate(args) -> int:
    from .agents import evaluate_oracle, read_episode_log, write_episode_log
    from .session import replay

    _apply_config_file(args, ("manifest", "agent", "metric", "certified_only",
                              "max_depth", "logs"))
    if not args.manifest:
        print("a manifest is required (flag or config file)", file=sys.stderr)
        return 2
    split = load_manifest(Path(args.manifest))
    if args.agent == "oracle":
        cases = [c for c in split.cases
                 if (args.certified_only and c.certified) or not args.certified_only]
        if args.max_depth is not None:
            cases = [c for c in cases if c.depth <= args.max_depth]
        records, report = evaluate_oracle(cases, _tables(),
                                          metric=MetricKind(args.metric))
        if args.logs:
            write_episode_log(records, Path(args.logs))
    elif args.agent.startswith("replay:"):
        records = read_episode_log(Path(args.agent.split(":", 1)[1]))
        for record in records:
            session = replay(record)
            if session.state.stickers != record.final_state:
                print(f"replay mismatch for case {record.config.get('case_id')}")
                return 1
        report = compute_metrics(records, depths=split.depths_by_id())
    else:
        print(f"unknown agent {args.agent!r}", file=sys.stderr)
        return 2
    print(json.dumps(report.to_dict(), indent=2))
    return 0


def cmd_train_pg(args) -> int:
    from .rl import TrainConfig, train_curriculum

    schedule = tuple((int(d), int(t)) for d, t in
                     (pair.split(":") for pair in args.schedule)) if args.schedule else None
    config = TrainConfig(master_seed=args.seed)
    if schedule:
        config = TrainConfig(master_seed=args.seed, short_schedule=schedule)
    result = train_curriculum(config, checkpoint_dir=Path(args.out),
                              include_long=args.long)
    log_path = Path(args.out) / "training_log.jsonl"
    with open(log_path, "w") as fh:
        for entry in result.log:
            fh.write(json.dumps(entry) + "\n")
    print(f"checkpoints and {log_path} written")
    return 0


def cmd_eval_policy(args) -> int:
    from .rl import evaluate_policy, load_checkpoint

    policy, _ = load_checkpoint(Path(args.checkpoint))
    split = load_manifest(Path(args.manifest))
    cases = [c for c in split.cases if c.depth in set(args.depths)] if args.depths \
        else split.cases
    records, report = evaluate_policy(policy, cases, move_cap=args.cap)
    print(json.dumps(report.to_dict(), indent=2))
    return 0


def cmd_serve(args) -> int:
    import os

    from .service import serve

    _apply_config_file(args, ("bind", "manifest"))
    bind = os.environ.get("CUBELAB_BIND") or args.bind or "127.0.0.1:7424"
    print(f"serving on {bind} (ctrl-c to stop)")
    serve(bind, tables=_tables(),
          manifest=Path(args.manifest) if args.manifest else None)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cubelab",
                                     description="Rubik's Cube benchmark environment")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tables", help="build or verify the solver table caches")
    p.set_defaults(fn=cmd_tables)

    p = sub.add_parser("generate", help="generate a depth-certified evaluation split")
    p.add_argument("--out", required=True)
    p.add_argument("--depths", type=int, nargs="+", default=list(DEFAULT_DEPTHS))
    p.add_argument("--per-depth", type=int, default=5)
    p.add_argument("--settings", nargs="+",
                   default=[t.value for t in (Tier.FULL_SYMBOLIC, Tier.FULL_VISUAL,
                                              Tier.FACE_VIEW, Tier.VERTEX_VIEW)])
    p.add_argument("--seed", type=int, default=2024)
    p.add_argument("--inline-max", type=int, default=12,
                   help="certify depths up to this inline; deeper cases stay pending")
    p.set_defaults(fn=cmd_generate)

    p = sub.add_parser("certify", help="finish or re-check manifest certificates")
    p.add_argument("--manifest", required=True)
    p.add_argument("--ids", nargs="*", default=None)
    p.add_argument("--max-nodes", type=int, default=2**40)
    p.add_argument("--recheck", action="store_true")
    p.set_defaults(fn=cmd_certify)

    p = sub.add_parser("solve", help="two-phase plan for a facelet string")
    p.add_argument("cube")
    p.add_argument("--format", choices=("solver", "initial"), default="solver")
    p.add_argument("--goal", type=int, default=20)
    p.add_argument("--budget", type=float, default=1.0)
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("optimal", help="provably optimal solve (Initial format)")
    p.add_argument("cube")
    p.add_argument("--cap", type=int, default=20)
    p.set_defaults(fn=cmd_optimal)

    p = sub.add_parser("render", help="write PNG observations of a state")
    p.add_argument("cube")
    p.add_argument("--tier", choices=[t.value for t in Tier if t != Tier.FULL_SYMBOLIC])
    p.add_argument("--face")
    p.add_argument("--vertex")
    p.add_argument("--out", default="renders")
    p.set_defaults(fn=cmd_render)

    p = sub.add_parser("evaluate", help="run a scripted agent over a manifest")
    p.add_argument("--manifest", default=None)
    p.add_argument("--config", default=None,
                   help="declarative JSON run definition; flags take precedence")
    p.add_argument("--agent", default="oracle", help="oracle or replay:FILE")
    p.add_argument("--metric", default="no_reward")
    p.add_argument("--certified-only", action="store_true")
    p.add_argument("--max-depth", type=int, default=None)
    p.add_argument("--logs", default=None)
    p.set_defaults(fn=cmd_evaluate)

    p = sub.add_parser("train-pg", help="train the REINFORCE baseline")
    p.add_argument("--out", default="pg_runs")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--schedule", nargs="*", default=None,
                   help="override short phases as depth:timesteps pairs")
    p.add_argument("--long", action="store_true", help="continue with the long phases")
    p.set_defaults(fn=cmd_train_pg)

    p = sub.add_parser("eval-policy", help="greedy-evaluate a trained checkpoint")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--cap", type=int, default=16)
    p.add_argument("--depths", type=int, nargs="*", default=None)
    p.set_defaults(fn=cmd_eval_policy)

    p = sub.add_parser("serve", help="run the session service")
    p.add_argument("--bind", default=None,
                   help="host:port; CUBELAB_BIND overrides, default 127.0.0.1:7424")
    p.add_argument("--config", default=None)
    p.add_argument("--manifest", default=None)
    p.set_defaults(fn=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except KeyboardInterrupt:
        return 130
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
