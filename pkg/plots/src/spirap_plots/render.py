"""Chart rendering for the documented result-CSV schema.

One chart per spec: simulated curves solid (second input dashed, third
dash-dotted, matching the fast/slow fading convention), theoretical bounds
dotted when requested, confidence intervals as shaded bands.  Output bytes
depend only on the input CSVs and the spec: fixed style, no timestamps.
"""

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .reader import ResultTable, SchemaError, read_results  # noqa: E402

STYLES = {
    "rate-vs-ratio": ("power_ratio_db", "strong-to-weak power ratio P1/P2 [dB]"),
    "rate-vs-gamma": ("gamma", "per-slot start probability gamma"),
    "rate-vs-k": ("k", "chunk size k [bits]"),
    "rate-vs-users": ("num_users", "number of users"),
    "mode-comparison": ("power_ratio_db", "strong-to-weak power ratio P1/P2 [dB]"),
}

_BOUND_STYLE = {"mud_bound": "joint-detection bound",
                "tdma_bound": "time-sharing bound",
                "spirap_bound": "cancellation bound"}

_LINESTYLES = ("-", "--", "-.", (0, (1, 1)))


@dataclass
class PlotSpec:
    inputs: list            # CSV paths, order fixes line styles
    style: str
    out_path: str
    overlay_bounds: bool = False
    title: str = ""

    def __post_init__(self):
        if self.style not in STYLES:
            raise ValueError(f"unknown style {self.style!r}; valid: "
                             + ", ".join(sorted(STYLES)))
        if not self.inputs:
            raise ValueError("need at least one input CSV")


def render(spec: PlotSpec) -> Path:
    tables = [read_results(p) for p in spec.inputs]
    want_sweep, xlabel = STYLES[spec.style]
    for t in tables:
        if t.sweep_name != want_sweep:
            raise SchemaError(
                f"{t.path}: style {spec.style!r} expects sweep "
                f"{want_sweep!r} but the CSV sweeps {t.sweep_name!r}")

    fig, ax = plt.subplots(figsize=(7.0, 4.6), dpi=120)
    for i, t in enumerate(tables):
        ls = _LINESTYLES[i % len(_LINESTYLES)]
        x = t.sweep_values
        ax.plot(x, t.rates, ls, marker="o", markersize=3.5,
                label=t.scenario, linewidth=1.6)
        if any(c > 0 for c in t.ci95):
            lo = [r - c for r, c in zip(t.rates, t.ci95)]
            hi = [r + c for r, c in zip(t.rates, t.ci95)]
            ax.fill_between(x, lo, hi, alpha=0.18)

    if spec.overlay_bounds:
        ref = next((t for t in tables if t.bounds["mud_bound"]), None)
        if ref is None:
            raise SchemaError("bound overlay requested but no input carries "
                              "filled bound columns")
        for col, label in _BOUND_STYLE.items():
            ax.plot(ref.sweep_values, ref.bounds[col], linestyle=":",
                    linewidth=1.4, label=label)

    ax.set_xlabel(xlabel)
    ax.set_ylabel("aggregate rate [bits/symbol]")
    if spec.title:
        ax.set_title(spec.title)
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()

    out = Path(spec.out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, metadata=_clean_metadata(out.suffix))
    plt.close(fig)
    return out


def _clean_metadata(suffix: str):
    # strip the writer's software tag so output bytes are reproducible
    if suffix.lower() == ".png":
        return {"Software": None}
    if suffix.lower() == ".svg":
        return {"Date": None}
    return None
