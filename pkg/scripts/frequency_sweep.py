#!/usr/bin/env python3
"""Follow the breather branch from deep above the band toward its edge.

Seeds each frequency from the previous converged field and prints the
weighted-norm trend; per-point artifacts land under results/sweep/.
"""

import sys

from breather_forge.cli_io import run_command


def main():
    out = sys.argv[1] if len(sys.argv) > 1 else "results/sweep"
    return run_command([
        "sweep",
        "--omega-from", "2.6",
        "--omega-to", "2.05",
        "--steps", "12",
        "--quartic", "1.0",
        "--parity", "odd",
        "--n-sites", "96",
        "--harmonics", "16",
        "--seed-amplitude", "0.8",
        "--seed-width", "1.0",
        "--out", out,
    ])


if __name__ == "__main__":
    sys.exit(main())
