#!/usr/bin/env python3
"""Regenerate fixtures/*.json from the programmatic fixture constructors."""

from __future__ import annotations

import json
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from quadcone.cli import _mat2j  # noqa: E402
from quadcone.fixtures import FIXTURES  # noqa: E402


def main() -> None:
    out_dir = pathlib.Path(__file__).resolve().parents[1] / "fixtures"
    out_dir.mkdir(exist_ok=True)
    for name, make in sorted(FIXTURES.items()):
        cone = make()
        spec = {"n": cone.n, "S": _mat2j(cone.S), "H": _mat2j(cone.H)}
        path = out_dir / f"{name}.json"
        path.write_text(json.dumps(spec, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
