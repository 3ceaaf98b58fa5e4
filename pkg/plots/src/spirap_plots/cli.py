"""Command line: regenerate a chart from harness CSV output.

    spirap-plot --input results/fig5.csv --style rate-vs-ratio --bounds \
                --out charts/fig5.png

Exit codes: 0 success, 1 bad arguments or schema mismatch, 2 I/O error.
"""

import argparse
import sys

from .reader import SchemaError
from .render import STYLES, PlotSpec, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="spirap-plot",
        description="render a chart from spirap result CSVs")
    parser.add_argument("--input", action="append", required=True,
                        help="result CSV (repeat for overlaid curves)")
    parser.add_argument("--style", required=True, choices=sorted(STYLES))
    parser.add_argument("--bounds", action="store_true",
                        help="overlay the closed-form bound columns (dotted)")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--title", default="")
    args = parser.parse_args(argv)

    try:
        spec = PlotSpec(inputs=args.input, style=args.style,
                        out_path=args.out, overlay_bounds=args.bounds,
                        title=args.title)
        out = render(spec)
    except (SchemaError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (FileNotFoundError, OSError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
