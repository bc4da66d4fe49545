#!/usr/bin/env python3
"""Measure the continuity ratio of the jump demonstration over many seeds.

The assertion constant in the package (JUMP_RATIO_BOUND = 10) was frozen
from this scan; re-run it to reproduce the measured supremum (~1.7124).
"""

from __future__ import annotations

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from quadcone.decider import jump_demo  # noqa: E402


def main() -> None:
    worst_ratio = 0.0
    worst_residual = 0.0
    for seed in range(12):
        rep = jump_demo(seed=seed, samples=50_000)
        worst_ratio = max(worst_ratio, rep.continuity_ratio)
        worst_residual = max(worst_residual, rep.identity_residual)
        print(
            f"seed {seed:2d}: ratio {rep.continuity_ratio:.6f} "
            f"identity residual {rep.identity_residual:.3e}"
        )
    print(f"\nsup ratio over scan: {worst_ratio:.6f} (frozen bound 10.0)")
    print(f"sup identity residual: {worst_residual:.3e} (tolerance 1e-12)")


if __name__ == "__main__":
    main()
