#!/usr/bin/env python3
"""Run every config in configs/ through the batch pipeline.

Scenarios with a reduction block go through the reduce path, the rest through
simulate.  Outputs land in out/<scenario>/ next to the repo root; the summary
numbers that matter (norm drift, momentum drift, reduction residual) are
printed as one line per scenario.
"""

import argparse
import sys
from pathlib import Path

from geoschro.cli import run_reduce, run_simulate
from geoschro.config import parse_config

REPO = Path(__file__).resolve().parent.parent


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--configs", default=str(REPO / "configs"), help="config directory")
    ap.add_argument("--out", default=str(REPO / "out"), help="output root")
    args = ap.parse_args(argv)

    config_dir = Path(args.configs)
    out_root = Path(args.out)
    paths = sorted(config_dir.glob("*.json"))
    if not paths:
        print(f"no configs found under {config_dir}", file=sys.stderr)
        return 1

    for path in paths:
        config = parse_config(path)
        out_dir = out_root / path.stem
        if config.reduction is not None:
            summary = run_reduce(config, out_dir)
            print(f"{path.stem:24s} reduce   records {summary['records']:4d}"
                  f"  norm drift {summary['max_norm_drift']:.3e}"
                  f"  residual {summary['max_residual']:.3e}")
        else:
            summary = run_simulate(config, out_dir)
            print(f"{path.stem:24s} simulate records {summary['records']:4d}"
                  f"  norm drift {summary['max_norm_drift']:.3e}"
                  f"  J drift {summary['max_J_drift']:.3e}")
    print(f"outputs under {out_root}/ (gnuplot scripts: <scenario>/plot.gp)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
