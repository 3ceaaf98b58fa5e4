"""Command-line front end: run experiment presets, print bounds, emit vectors.

Exit codes: 0 success, 1 configuration error, 2 I/O error.
"""

import argparse
import json
import sys
from pathlib import Path

from .bounds import BoundInputs, mud_bound, spirap_bound, tdma_bound
from .harness import (PRESET_GROUPS, emit_results, preset, run_scenario,
                      scenario_from_config)
from .vectors import write_vectors


def _resolve_scenarios(args):
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except OSError as exc:
            raise OSError(f"cannot read config {args.config}: {exc}") from exc
        return [scenario_from_config(data)]
    if not args.preset:
        raise ValueError("run needs a preset name or --config file")
    names = PRESET_GROUPS.get(args.preset, (args.preset,))
    return [preset(n) for n in names]


def _cmd_run(args) -> int:
    scenarios = _resolve_scenarios(args)
    out_dir = Path(args.out_dir)
    for scn in scenarios:
        if args.seed is not None:
            scn.master_seed = args.seed
        if args.budget is not None:
            scn.budget_slots = args.budget
        rows = run_scenario(scn, jobs=args.jobs)
        suffix = ".json" if args.format == "json" else ".csv"
        written = emit_results(rows, args.format, out_dir / (scn.name + suffix),
                               scenario=scn)
        for row in rows:
            ci = f" +/-{row.rate_ci95:.3f}" if row.rate_ci95 else ""
            print(f"{scn.name} {row.sweep_name}={row.sweep_value:g}: "
                  f"rate={row.rate_bps:.3f}{ci} b/sym  loss={row.loss_rate:.3f} "
                  f"passes={row.mean_passes:.2f}  [{row.wall_clock_s:.1f}s]")
        for p in written:
            print(f"wrote {p}")
    return 0


def _cmd_bounds(args) -> int:
    inputs = BoundInputs(P1=max(args.P1, args.P2), P2=min(args.P1, args.P2),
                         N=args.N)
    print(f"P1={inputs.P1:g} P2={inputs.P2:g} N={inputs.N:g}")
    print(f"  mud_bound    = {mud_bound(inputs):.6f} bits/symbol")
    print(f"  tdma_bound   = {tdma_bound(inputs):.6f} bits/symbol")
    print(f"  spirap_bound = {spirap_bound(inputs):.6f} bits/symbol")
    return 0


def _cmd_vectors(args) -> int:
    write_vectors(args.out)
    print(f"wrote {args.out}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="spirap",
        description="Spinal-code random-access protocol simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a preset or config-file scenario")
    run_p.add_argument("preset", nargs="?",
                       help="preset name (fig4..fig9 or a variant)")
    run_p.add_argument("--config", help="JSON scenario config file")
    run_p.add_argument("--seed", type=int, help="master seed override")
    run_p.add_argument("--budget", type=int, help="slots per grid point")
    run_p.add_argument("--out-dir", default="results")
    run_p.add_argument("--format", choices=("csv", "json"), default="csv")
    run_p.add_argument("--jobs", type=int, default=1)
    run_p.set_defaults(func=_cmd_run)

    bounds_p = sub.add_parser("bounds", help="print the two-user bound table")
    bounds_p.add_argument("P1", type=float)
    bounds_p.add_argument("P2", type=float)
    bounds_p.add_argument("N", type=float)
    bounds_p.set_defaults(func=_cmd_bounds)

    vec_p = sub.add_parser("vectors", help="emit the codec test-vector file")
    vec_p.add_argument("--out", default="vectors/codec_vectors.txt")
    vec_p.set_defaults(func=_cmd_vectors)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
