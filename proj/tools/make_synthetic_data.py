#!/usr/bin/env python3
"""Generate the bundled synthetic auction dataset.

200 auction records over 2005-2014 whose real (2014 BRL) prices follow a
two-component mixture centred near 105 and 145 BRL/MWh. Nominal prices are
obtained by dividing real prices by the year's deflator factor, so feeding
auction.csv and deflator.csv through the ingest stage with base year 2014
recovers the real prices up to the two-decimal rounding.

The deflator is the cumulative IPCA-style index to 2014 computed from the
annual rates below.

Usage: make_synthetic_data.py [OUTPUT_DIR]   (default: data/synthetic)
"""

import os
import random
import sys

SEED = 20050101
N_RECORDS = 200
YEARS = list(range(2005, 2015))

# Annual inflation, in percent, for the year after the key.
ANNUAL_RATE = {
    2005: 3.14, 2006: 4.46, 2007: 5.90, 2008: 4.31, 2009: 5.91,
    2010: 6.50, 2011: 5.84, 2012: 5.91, 2013: 6.41,
}


def deflator():
    factors = {2014: 1.0}
    for year in range(2013, 2004, -1):
        factors[year] = factors[year + 1] * (1.0 + ANNUAL_RATE[year] / 100.0)
    return {y: round(f, 4) for y, f in factors.items()}


def main():
    out_dir = sys.argv[1] if len(sys.argv) > 1 else os.path.join("data", "synthetic")
    os.makedirs(out_dir, exist_ok=True)
    rng = random.Random(SEED)
    factors = deflator()

    with open(os.path.join(out_dir, "deflator.csv"), "w", newline="\n") as f:
        f.write("year,factor\n")
        for year in YEARS:
            f.write(f"{year},{factors[year]:.4f}\n")

    with open(os.path.join(out_dir, "auction.csv"), "w", newline="\n") as f:
        f.write("year,price_brl_mwh,auction_id\n")
        for i in range(N_RECORDS):
            year = YEARS[i % len(YEARS)]
            if rng.random() < 0.55:
                real = rng.gauss(105.0, 8.0)
            else:
                real = rng.gauss(145.0, 9.0)
            real = max(real, 60.0)
            nominal = real / factors[year]
            f.write(f"{year},{nominal:.2f},LEE-{year}-{i // len(YEARS) + 1:02d}\n")


if __name__ == "__main__":
    main()
