#!/usr/bin/env python3
"""Sweep the two-parameter normal-form rows and print the verdict grid.

For the |z1|^2 - |z2|^2 row the expected pattern is two-sided exactly when
B <= A <= 1 or A = B; everything else extends from the negative side.
"""

from __future__ import annotations

import pathlib
import sys

import numpy as np

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from quadcone.decider import decide2  # noqa: E402
from quadcone.normalform import NormalFormResult, NormalFormType, render_cone  # noqa: E402


def verdict_of(tag: str, a, b=None) -> str:
    ntype = NormalFormType(tag, a=a, b=b) if b is not None else NormalFormType(tag, a=a)
    res = NormalFormResult(ntype=ntype, T=np.eye(2, dtype=complex), lam=1.0, sign=1, residual=0.0)
    v = decide2(res, render_cone(ntype))
    if v.outcome == "one_sided":
        return "+" if v.side > 0 else "-"
    return "2"


def main() -> None:
    grid = [0.25 * k for k in range(1, 9)]
    print("M11_1 verdicts ('2' two-sided, '-' one-sided from below); rows A, cols B <= A")
    header = "A\\B  " + "".join(f"{b:6.2f}" for b in grid)
    print(header)
    for a in grid:
        cells = []
        for b in grid:
            cells.append(f"{verdict_of('M11_1', a, b):>6s}" if b <= a else "      ")
        print(f"{a:4.2f} " + "".join(cells))

    print("\nM20 verdicts (A > 1):")
    for a in [1.25, 1.5, 2.0, 4.0]:
        row = [verdict_of("M20", a, b) for b in grid if b <= a]
        print(f"A={a:4.2f}: {' '.join(row)}")

    print("\nM10_1 verdicts:", [verdict_of("M10_1", a) for a in [0.0, 0.5, 1.0, 2.0]])
    print("M11_2 verdicts:", [verdict_of("M11_2", complex(re, im)) for re, im in [(1, 0), (1, 1), (0.5, 2)]])
    for tag in ("M11_3", "M10_2", "M00_1"):
        ntype = NormalFormType(tag)
        res = NormalFormResult(ntype=ntype, T=np.eye(2, dtype=complex), lam=1.0, sign=1, residual=0.0)
        print(f"{tag}: {decide2(res, render_cone(ntype)).outcome}")


if __name__ == "__main__":
    main()
