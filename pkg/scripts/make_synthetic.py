#!/usr/bin/env python3
"""Generate the synthetic FNR-disparity dataset used by configs/synthetic_fnr.json."""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from fairboost.synthetic import write_disparity_csv

OUT = Path(__file__).resolve().parent.parent / "data" / "synthetic_fnr.csv"


def main() -> int:
    OUT.parent.mkdir(parents=True, exist_ok=True)
    write_disparity_csv(OUT, n=8414, seed=0)
    print(f"wrote {OUT}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
