#!/usr/bin/env python3
"""Writes data/sample_appreciating.csv: a synthetic daily price path.

Geometric Brownian motion with 60% annual drift and 80% annual volatility,
one point per calendar day from 2017-01-01 to 2023-12-31, starting at 1000.
The series is synthetic; it only mimics a volatile, appreciating asset.
"""

import argparse
import datetime as dt
import math
import random


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="data/sample_appreciating.csv")
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--drift", type=float, default=0.6)
    parser.add_argument("--vol", type=float, default=0.8)
    parser.add_argument("--start-price", type=float, default=1000.0)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    dt_year = 1.0 / 365.0
    mu = (args.drift - 0.5 * args.vol**2) * dt_year
    sigma = args.vol * math.sqrt(dt_year)

    day = dt.date(2017, 1, 1)
    end = dt.date(2023, 12, 31)
    price = args.start_price
    with open(args.out, "w", newline="\n") as f:
        f.write("date,price\n")
        while day <= end:
            f.write(f"{day.isoformat()},{price:.2f}\n")
            price *= math.exp(mu + sigma * rng.gauss(0.0, 1.0))
            day += dt.timedelta(days=1)


if __name__ == "__main__":
    main()
