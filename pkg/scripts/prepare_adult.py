#!/usr/bin/env python3
"""Convert the raw UCI Adult files into one clean CSV with a header row.

Reads data/raw/adult.data and data/raw/adult.test (as published: no header,
comma-separated, the test file carries a banner line and trailing periods on
labels) and writes data/adult.csv.  Rows with missing cells ("?") are kept;
the loader drops them under its own missing-value policy.
"""

import csv
import sys
from pathlib import Path

COLUMNS = [
    "age", "workclass", "fnlwgt", "education", "education-num",
    "marital-status", "occupation", "relationship", "race", "sex",
    "capital-gain", "capital-loss", "hours-per-week", "native-country",
    "income",
]

ROOT = Path(__file__).resolve().parent.parent
RAW = ROOT / "data" / "raw"
OUT = ROOT / "data" / "adult.csv"


def rows_from(path: Path):
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("|"):
                continue
            cells = [c.strip() for c in line.split(",")]
            if len(cells) != len(COLUMNS):
                continue
            cells[-1] = cells[-1].rstrip(".")  # adult.test labels end with '.'
            yield cells


def main() -> int:
    sources = [RAW / "adult.data", RAW / "adult.test"]
    missing = [str(p) for p in sources if not p.exists()]
    if missing:
        print(f"missing raw files: {missing}; run scripts/fetch_data.sh first", file=sys.stderr)
        return 1
    n = 0
    with open(OUT, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(COLUMNS)
        for src in sources:
            for cells in rows_from(src):
                writer.writerow(cells)
                n += 1
    print(f"wrote {OUT} with {n} rows")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
