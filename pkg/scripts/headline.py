#!/usr/bin/env python3
"""Evaluate both published reference configurations and print the breakdown.

Equivalent to `python -m critprop eval --preset ...` twice, but through the
library API, with the six constants tabulated side by side.
"""

import argparse
import time

from critprop import (
    GridSettings,
    TERM_NAMES,
    evaluate_bound,
    paper_kappa_config,
    paper_kappa_star_config,
)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nodes-low", type=int, default=24,
                    help="nodes per dimension for the 1-4 dimensional terms")
    ap.add_argument("--nodes-high", type=int, default=16,
                    help="nodes per dimension for the 5 dimensional terms")
    ns = ap.parse_args()

    grid = GridSettings(nodes_low_dim=ns.nodes_low, nodes_high_dim=ns.nodes_high)
    configs = {
        "on-line zeros": paper_kappa_config(grid),
        "simple zeros": paper_kappa_star_config(grid),
    }

    reports = {}
    for label, cfg in configs.items():
        started = time.perf_counter()
        reports[label] = (evaluate_bound(cfg), time.perf_counter() - started)

    header = f"{'term':>8}" + "".join(f"{label:>18}" for label in configs)
    print(header)
    for name in TERM_NAMES:
        row = f"{name:>8}"
        for label in configs:
            value = reports[label][0].breakdown.as_dict()[name].value
            row += f"{value:>18.10f}"
        print(row)
    for quantity in ("c_total", "R", "bound"):
        row = f"{quantity:>8}"
        for label in configs:
            row += f"{getattr(reports[label][0], quantity):>18.10f}"
        print(row)
    print(f"{'wall/s':>8}" + "".join(f"{reports[label][1]:>18.1f}" for label in configs))


if __name__ == "__main__":
    main()
