"""Regenerate every figure CSV/SVG from the configs in configs/.

Usage: python3 scripts/reproduce_figures.py [--out results]
"""

import argparse
import sys
from pathlib import Path

from darkstate_lab.cli import main as cli_main

ROOT = Path(__file__).resolve().parents[1]

RUNS = [
    ("spectrum", "spectrum.json"),
    ("sweep", "sweep_n2.json"),
    ("sweep", "sweep_n3_n4.json"),
    ("perturb", "perturb.json"),
    ("evolve", "evolve_n2.json"),
    ("evolve", "evolve_n3.json"),
]


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--out", default=None, help="override every output_dir with this root")
    args = parser.parse_args(argv)
    for command, cfg in RUNS:
        cli_args = [command, "--config", str(ROOT / "configs" / cfg)]
        if args.out is not None:
            cli_args += ["--out", str(Path(args.out) / command)]
        print(f"== {command} {cfg}", flush=True)
        code = cli_main(cli_args)
        if code != 0:
            print(f"{command} {cfg} exited with {code}", file=sys.stderr)
            return code
    return 0


if __name__ == "__main__":
    sys.exit(main())
