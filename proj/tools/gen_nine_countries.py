#!/usr/bin/env python3
"""Writes the synthetic nine-country replicate used by the health-funding configs.

Funding is health expenditure per capita in units of 10 PPP dollars; the
outcome is life expectancy at birth in years. Per-country G values are
chosen so that G * (2015 funding) lands near the observed 2015 life
expectancy; the 1985-2015 history is a noisy ramp towards that point.

Usage: gen_nine_countries.py [output_dir]   (default: ../data next to this file)
"""
import csv
import json
import pathlib
import sys

import numpy as np

COUNTRIES = [
    # code, name, funding (10 PPP$), G (years per 10 PPP$)
    ("KE", "Kenya", 16.0, 4.1),
    ("UG", "Uganda", 13.0, 4.7),
    ("TZ", "Tanzania", 13.5, 4.7),
    ("RW", "Rwanda", 12.5, 5.4),
    ("BI", "Burundi", 6.5, 9.2),
    ("ET", "Ethiopia", 7.0, 9.3),
    ("SS", "South Sudan", 5.0, 11.4),
    ("CD", "DR Congo", 3.5, 16.9),
    ("ZM", "Zambia", 19.0, 3.3),
]

BORDERS = [
    ("KE", "UG"), ("KE", "TZ"), ("KE", "ET"), ("KE", "SS"), ("UG", "TZ"), ("UG", "RW"),
    ("UG", "SS"), ("UG", "CD"), ("TZ", "RW"), ("TZ", "BI"), ("TZ", "CD"), ("TZ", "ZM"),
    ("RW", "BI"), ("RW", "CD"), ("BI", "CD"), ("ET", "SS"), ("SS", "CD"), ("CD", "ZM"),
]

FIRST_YEAR, LAST_YEAR = 1985, 2015
SEED = 20151985


def main():
    out = pathlib.Path(sys.argv[1]) if len(sys.argv) > 1 else pathlib.Path(__file__).resolve().parent.parent / "data"
    out.mkdir(parents=True, exist_ok=True)
    index = {code: i for i, (code, *_rest) in enumerate(COUNTRIES)}

    doc = {
        "schema_version": 1,
        "units": {"funding": "health expenditure per capita, 10 PPP USD", "outcome": "life expectancy at birth, years"},
        "a_mean": 0.5,
        "a_std": 0.1,
        "drift_target_G": 25.0,
        "communities": [
            {"code": code, "name": name, "initial_funding": funding, "G": g}
            for code, name, funding, g in COUNTRIES
        ],
    }
    (out / "nine_countries.json").write_text(json.dumps(doc, indent=2) + "\n")

    with open(out / "nine_countries.edges", "w") as f:
        f.write("# land borders, zero-based indices in nine_countries.json order\n")
        for a, b in BORDERS:
            f.write(f"{index[a]} {index[b]}  # {a}-{b}\n")

    rng = np.random.default_rng(SEED)
    years = range(FIRST_YEAR, LAST_YEAR + 1)
    with open(out / "nine_countries_history.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["community", "period", "u_1", "y_1"])
        for i, (_code, _name, funding, g) in enumerate(COUNTRIES):
            for year in years:
                ramp = 0.6 + 0.4 * (year - FIRST_YEAR) / (LAST_YEAR - FIRST_YEAR)
                u = funding * ramp * (1.0 + 0.05 * rng.standard_normal())
                y = g * u * (1.0 + 0.01 * rng.standard_normal())
                w.writerow([i, year, f"{u:.6f}", f"{y:.6f}"])


if __name__ == "__main__":
    main()
