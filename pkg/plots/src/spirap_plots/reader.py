"""Parsing and validation of the harness result CSV schema."""

import csv
from dataclasses import dataclass
from pathlib import Path

EXPECTED_COLUMNS = ("scenario", "sweep_name", "sweep_value", "rate_bps",
                    "rate_ci95", "per_user_rates", "loss_rate", "mean_passes",
                    "mud_bound", "tdma_bound", "spirap_bound")

BOUND_COLUMNS = ("mud_bound", "tdma_bound", "spirap_bound")


class SchemaError(ValueError):
    pass


@dataclass
class ResultTable:
    path: Path
    scenario: str
    sweep_name: str
    sweep_values: list
    rates: list
    ci95: list
    bounds: dict   # column -> list[float] or None when absent

    def __len__(self):
        return len(self.sweep_values)


def read_results(path) -> ResultTable:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"input CSV not found: {path}")
    with path.open(newline="") as fh:
        rows = list(csv.DictReader(fh))
        header = tuple(csv.DictReader(open(path, newline="")).fieldnames or ())
    for col in EXPECTED_COLUMNS:
        if col not in header:
            raise SchemaError(f"{path}: missing column {col!r}")
    if not rows:
        raise SchemaError(f"{path}: no data rows")

    scenario = rows[0]["scenario"]
    sweep_name = rows[0]["sweep_name"]
    sweep_values = [float(r["sweep_value"]) for r in rows]
    rates = [float(r["rate_bps"]) for r in rows]
    ci95 = [float(r["rate_ci95"]) if r["rate_ci95"] else 0.0 for r in rows]
    bounds = {}
    for col in BOUND_COLUMNS:
        vals = [r[col] for r in rows]
        bounds[col] = [float(v) for v in vals] if all(vals) else None
    return ResultTable(path=path, scenario=scenario, sweep_name=sweep_name,
                       sweep_values=sweep_values, rates=rates, ci95=ci95,
                       bounds=bounds)
