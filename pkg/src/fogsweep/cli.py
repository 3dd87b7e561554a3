"""Command line entry point.

Subcommands: run (experiments to CSV + summary), theory (closed-form capture
table), validate (Monte Carlo oracle agreement), serve (lockstep protocol
server). Exit codes: 0 ok, 1 usage error, 2 runtime error, 3 validation
failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any

from . import agents as agents_mod
from . import runner, server, theory
from .episode import MAP_IDS, EpisodeConfig
from .world import GameDomain


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage problems; the published contract says 1."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _map_id(value: str) -> str:
    canon = value.replace("-", "_")
    if canon not in MAP_IDS:
        raise argparse.ArgumentTypeError(
            f"unknown map {value!r} (choose from {', '.join(MAP_IDS)})"
        )
    return canon


def _config_json(value: str) -> dict[str, Any]:
    try:
        d = json.loads(value)
    except json.JSONDecodeError as e:
        raise argparse.ArgumentTypeError(f"config is not valid JSON: {e.msg}") from e
    if not isinstance(d, dict):
        raise argparse.ArgumentTypeError("config JSON must be an object")
    return d


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fogsweep", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="play scripted episodes, print summary, write CSV")
    p_run.add_argument("--map", type=_map_id, default="find_and_defeat_zerglings")
    p_run.add_argument("--pursuer", default="traversal", choices=agents_mod.PURSUER_AGENTS)
    p_run.add_argument("--evader", default="builtin", choices=agents_mod.EVADER_AGENTS)
    p_run.add_argument("--episodes", type=int, default=100)
    p_run.add_argument("--seed", type=int, default=0)
    p_run.add_argument("--csv", default=None, help="write per-episode records here")
    p_run.add_argument("--timing", action="store_true", help="include wall_ms in the CSV")
    p_run.add_argument("--config", type=_config_json, default={}, help="EpisodeConfig overrides (JSON)")

    p_theory = sub.add_parser("theory", help="closed-form capture-time table for a map")
    p_theory.add_argument("--map", type=_map_id, default="find_and_defeat_zerglings")
    p_theory.add_argument("--config", type=_config_json, default={}, help="EpisodeConfig overrides (JSON)")
    p_theory.add_argument(
        "--rounded-r",
        action="store_true",
        help="use the 1.4*lx rounding of the transit diagonal",
    )

    p_val = sub.add_parser("validate", help="Monte Carlo oracles vs closed forms")
    p_val.add_argument("--trials", type=int, default=100_000)
    p_val.add_argument("--seed", type=int, default=2024)

    p_serve = sub.add_parser("serve", help="lockstep protocol server")
    p_serve.add_argument("--map", type=_map_id, default="find_and_defeat_zerglings")
    p_serve.add_argument("--pursuer", default="socket", help='"socket" or a scripted agent name')
    p_serve.add_argument("--evader", default="socket", help='"socket" or a scripted agent name')
    p_serve.add_argument("--episodes", type=int, default=1)
    p_serve.add_argument("--seed", type=int, default=0)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=0, help="0 picks a free port")
    p_serve.add_argument("--timeout-ms", type=int, default=server.ACT_TIMEOUT_MS)
    p_serve.add_argument("--stdio", action="store_true", help="single agent over stdin/stdout")
    p_serve.add_argument("--config", type=_config_json, default={}, help="EpisodeConfig overrides (JSON)")
    return parser


def _episode_config(map_id: str, seed: int, overrides: dict[str, Any]) -> EpisodeConfig:
    d = dict(overrides)
    d["map_id"] = map_id
    d["seed"] = seed
    return EpisodeConfig.from_dict(d)


def cmd_run(args: argparse.Namespace) -> int:
    spec = runner.ExperimentSpec(
        map_id=args.map,
        pursuer=args.pursuer,
        evader=args.evader,
        episodes=args.episodes,
        seed=args.seed,
        csv_path=None,  # written below so --timing can apply
        overrides=args.config,
    )
    records, summary = runner.run_experiment(spec)
    if args.csv is not None:
        with open(args.csv, "w", encoding="utf-8", newline="\n") as f:
            runner.write_csv(records, f, timing=args.timing)
    print(f"{args.pursuer} vs {args.evader} on {args.map}")
    for line in summary.lines():
        print(line)
    if args.csv is not None:
        print(f"records -> {args.csv}")
    return 0


def cmd_theory(args: argparse.Namespace) -> int:
    overrides = dict(args.config)
    domain = overrides.pop("domain", None)
    if domain is not None:
        domain = GameDomain(float(domain["lx"]), float(domain["ly"]))
    kwargs: dict[str, Any] = {}
    for key in ("n_evaders", "n_pursuers", "time_limit"):
        if key in overrides:
            kwargs[key] = overrides.pop(key)
    if overrides:
        print(f"theory ignores config keys: {sorted(overrides)}", file=sys.stderr)

    plain = theory.inputs_for(args.map, domain=domain, **kwargs)
    r_override = theory.rounded_diagonal(plain.domain) if args.rounded_r else None
    transit = theory.inputs_for(
        args.map, domain=domain, use_R=True, R_override=r_override, **kwargs
    )
    spec = theory.SearchGridSpec.for_domain(plain.domain, plain.attack_range)
    rep_plain = theory.report(plain, spec)
    rep_transit = theory.report(transit, spec)

    print(f"map                 {args.map}")
    print(f"blocks M            {rep_plain.M}")
    print(f"capture prob p      {rep_plain.p:.4f}")
    print(f"kill time T_k       {rep_plain.t_k:.2f} s")
    label = ("rounded " if args.rounded_r else "") + f"R = {transit.R:.2f}"
    print(f"lane sweep:   round {rep_plain.round_time:.2f} s   v {rep_plain.v:.2f} s   reward {rep_plain.reward:.1f}")
    print(f"with transit: round {rep_transit.round_time:.2f} s   v {rep_transit.v:.2f} s   reward {rep_transit.reward:.1f}   ({label})")
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    if args.trials < 10_000:
        print("validate needs --trials >= 10000", file=sys.stderr)
        return 1
    results = theory.run_validation(trials=args.trials, seed=args.seed)
    width = max(len(r.name) for r in results)
    failed = False
    for r in results:
        mark = "ok" if r.passed else "FAIL"
        print(
            f"{r.name:<{width}}  expected {r.expected:10.3f}  observed {r.observed:10.3f}"
            f"  dev {100 * r.rel_dev:5.2f}%  {mark}"
        )
        failed = failed or not r.passed
    print(f"{'FAIL' if failed else 'ok'}: {len(results)} checks, tolerance 2%")
    return 3 if failed else 0


def cmd_serve(args: argparse.Namespace) -> int:
    options = server.ServeOptions(
        config=_episode_config(args.map, args.seed, args.config),
        episodes=args.episodes,
        pursuer=args.pursuer,
        evader=args.evader,
        host=args.host,
        port=args.port,
        act_timeout_ms=args.timeout_ms,
        on_listen=lambda port: print(f"listening on {args.host}:{port}", flush=True),
    )
    if args.stdio:
        outcome = server.serve_stdio(options)
    else:
        outcome = server.serve(options)
    for i, score in enumerate(outcome.scores):
        print(f"episode {i}: score {score}", file=sys.stderr)
    if outcome.aborted:
        print(f"session aborted: {outcome.detail}", file=sys.stderr)
        return 2
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "run": cmd_run,
        "theory": cmd_theory,
        "validate": cmd_validate,
        "serve": cmd_serve,
    }
    try:
        return handlers[args.command](args)
    except ValueError as e:
        print(f"fogsweep {args.command}: {e}", file=sys.stderr)
        return 1
    except (OSError, TimeoutError, RuntimeError) as e:
        print(f"fogsweep {args.command}: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
