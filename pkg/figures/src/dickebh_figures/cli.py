"""Command line for figure rendering: --input/--kind/--output, plus a multi-panel mode."""

import argparse
import sys

from .io import EXPECTED_HEADERS, SchemaError
from .render import FigureJob, render, render_multi_panel


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="dickebh-figures",
        description="Render figures from dickebh CSV outputs",
    )
    parser.add_argument("--input", action="append", required=True,
                        help="input CSV; repeat for multi-panel figures")
    parser.add_argument("--kind", required=True, choices=sorted(EXPECTED_HEADERS))
    parser.add_argument("--output", required=True, help="output image path")
    parser.add_argument("--title", default=None)
    parser.add_argument("--xlabel", default=None)
    parser.add_argument("--ylabel", default=None)
    parser.add_argument("--style", default=None, help="JSON file of style overrides")
    parser.add_argument("--force", action="store_true",
                        help="union mismatched axis ranges in multi-panel mode")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        ns = parser.parse_args(sys.argv[1:] if argv is None else argv)
    except SystemExit as err:
        return int(err.code or 0)
    jobs = [
        FigureJob(input_csv=path, figure_kind=ns.kind, output_image=ns.output,
                  title=ns.title, xlabel=ns.xlabel, ylabel=ns.ylabel, style_file=ns.style)
        for path in ns.input
    ]
    try:
        if ns.kind == "multi_N_panel" or len(jobs) > 1:
            render_multi_panel(jobs, force=ns.force, output_image=ns.output)
        else:
            render(jobs[0])
    except (SchemaError, ValueError, OSError) as err:
        print(f"dickebh-figures: {err}", file=sys.stderr)
        return 1
    print(f"dickebh-figures: wrote {ns.output}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
