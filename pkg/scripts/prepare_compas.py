#!/usr/bin/env python3
"""Filter the ProPublica two-year recidivism file down to the modeling table.

Applies the standard row filters (screening window, valid recidivism flag,
non-ordinary charge degree, scored cases, two largest race groups) and keeps
eight features plus the label.  Writes data/compas.csv.
"""

import csv
import sys
from pathlib import Path

KEEP = [
    "sex", "age", "race",
    "juv_fel_count", "juv_misd_count", "juv_other_count",
    "priors_count", "c_charge_degree", "two_year_recid",
]

ROOT = Path(__file__).resolve().parent.parent
RAW = ROOT / "data" / "raw" / "compas-scores-two-years.csv"
OUT = ROOT / "data" / "compas.csv"


def keep_row(row: dict) -> bool:
    try:
        days = float(row["days_b_screening_arrest"])
    except (ValueError, KeyError):
        return False
    return (
        -30.0 <= days <= 30.0
        and row["is_recid"] != "-1"
        and row["c_charge_degree"] != "O"
        and row["score_text"] != "N/A"
        and row["race"] in ("African-American", "Caucasian")
    )


def main() -> int:
    if not RAW.exists():
        print(f"missing raw file: {RAW}; run scripts/fetch_data.sh first", file=sys.stderr)
        return 1
    by_race = {"African-American": 0, "Caucasian": 0}
    with open(RAW, newline="", encoding="utf-8") as src, open(
        OUT, "w", newline="", encoding="utf-8"
    ) as dst:
        reader = csv.DictReader(src)
        writer = csv.writer(dst)
        writer.writerow(KEEP)
        for row in reader:
            if not keep_row(row):
                continue
            by_race[row["race"]] += 1
            writer.writerow([row[c].strip() for c in KEEP])
    total = sum(by_race.values())
    print(f"wrote {OUT} with {total} rows ({by_race})")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
