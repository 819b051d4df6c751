#!/usr/bin/env python3
"""Desk-scale reproduction of the standard experiment grids.

Two result sets are produced:

* runtime grid: plain-DP wall times and consensus-set sizes under the
  uniform (phi = 1) culture, for k in {2, m/2, m} at each m;
* preprocessing grid: DP versus digraph-preprocessed solving at k = 3
  across dispersion values, including the average largest strongly
  connected component after refinement.

Outputs land in --out-dir as CSV plus a JSON report with full metadata.
Everything except the timing columns is deterministic under --seed.
"""

import argparse
import pathlib
import sys

from kwise_kemeny import ExperimentConfig, run_bench


def parse_args(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="bench-results")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--n", type=int, default=50, help="voters per instance")
    parser.add_argument("--instances", type=int, default=50)
    parser.add_argument(
        "--include-m18",
        action="store_true",
        help="add the m=18 cells (minutes of runtime)",
    )
    return parser.parse_args(argv)


def announce(cell):
    print(
        f"  m={cell.m} k={cell.k} phi={cell.phi:g} mode={cell.mode}: "
        f"avg {cell.avg_ms:.1f} ms, |R*| {cell.avg_consensus:.2f}, "
        f"largest SCC {cell.avg_largest_scc:.2f}",
        flush=True,
    )


def main(argv=None) -> int:
    args = parse_args(argv)
    out = pathlib.Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    ms = (6, 10, 14) + ((18,) if args.include_m18 else ())

    print("runtime grid (phi = 1, plain DP)")
    runtime_cells = []
    for m in ms:
        config = ExperimentConfig(
            ms=(m,),
            ks=(2, m // 2, "m"),
            phis=(1.0,),
            n=args.n,
            instances=args.instances,
            seed=args.seed,
            modes=("dp",),
        )
        report = run_bench(config, progress=announce)
        runtime_cells.append(report)
    _write(out / "runtime_grid", runtime_cells)

    print("preprocessing grid (k = 3)")
    config = ExperimentConfig(
        ms=ms,
        ks=(3,),
        phis=(0.5, 0.8, 0.85, 0.9, 0.95),
        n=args.n,
        instances=args.instances,
        seed=args.seed,
        modes=("dp", "pre-refined"),
    )
    report = run_bench(config, progress=announce)
    _write(out / "preprocessing_grid", [report])

    print(f"reports written to {out}/")
    return 0


def _write(stem: pathlib.Path, reports) -> None:
    csv_lines = []
    for i, report in enumerate(reports):
        text = report.to_csv().splitlines()
        csv_lines.extend(text if i == 0 else text[1:])
    stem.with_suffix(".csv").write_text("\n".join(csv_lines) + "\n")
    if len(reports) == 1:
        stem.with_suffix(".json").write_text(reports[0].to_json())


if __name__ == "__main__":
    sys.exit(main())
