"""Command line: ``plot --x sg_calls --out fig.svg trace1.csv trace2.csv ...``

Exit codes: 0 success, 2 bad arguments, 3 unreadable or schema-mismatched
input.
"""

import argparse
import sys

from .figures import FigureSpec, SchemaError, render


def build_parser():
    ap = argparse.ArgumentParser(
        prog="plot",
        description="Render log-log convergence figures from trace CSVs",
    )
    ap.add_argument("traces", nargs="+", help="trace CSV files (sidecars required)")
    ap.add_argument("--x", choices=["sg_calls", "loo_calls"], default="sg_calls")
    ap.add_argument("--out", default="figure.svg",
                    help="output image; extension picks the format (svg default)")
    ap.add_argument("--bounds", help="certificate report CSV to overlay, dashed")
    ap.add_argument("--smooth", type=int, default=1,
                    help="median smoothing window (default: off)")
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        spec = FigureSpec(traces=args.traces, x_axis=args.x, out=args.out,
                          bounds=args.bounds, smooth=args.smooth)
        render(spec)
    except SchemaError as e:
        print("bad input: %s" % e, file=sys.stderr)
        return 3
    except OSError as e:
        print("io error: %s" % e, file=sys.stderr)
        return 3
    print("wrote %s" % args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
