#!/usr/bin/env python3
"""Run a quick-look version of one experiment preset end to end.

Uses the CI budget (200 slots per grid point) so it finishes in about a
minute; pass a preset name and optionally a budget to go bigger, e.g.

    python demos/05_experiment_sweep.py fig5 500
"""

import sys

from spirap.harness import CI_BUDGET, emit_results, preset, run_scenario

name = sys.argv[1] if len(sys.argv) > 1 else "fig9_k2"
budget = int(sys.argv[2]) if len(sys.argv) > 2 else CI_BUDGET

scenario = preset(name)
scenario.budget_slots = budget
print(f"running {name}: sweep {scenario.sweep_name} over "
      f"{list(scenario.sweep_grid)}, {budget} slots per point")

rows = run_scenario(scenario)
for row in rows:
    bound = f"  mud<={row.mud_bound:.2f}" if row.mud_bound else ""
    print(f"  {scenario.sweep_name}={row.sweep_value:g}: "
          f"rate {row.rate_bps:.3f} +/- {row.rate_ci95:.3f} b/sym, "
          f"loss {row.loss_rate:.2f}{bound}")

paths = emit_results(rows, "csv", f"results/{name}.csv", scenario=scenario)
for p in paths:
    print(f"wrote {p}")
