#!/usr/bin/env python3
"""Generate the committed test dataset: 80 rows of categorical service-review
style data with a learnable label. Deterministic; run once, commit the CSV."""
import csv
import os

import numpy as np

OUT = os.path.join(os.path.dirname(__file__), os.pardir, "tests", "data",
                   "reviews.csv")


def main():
    rng = np.random.default_rng(2027)
    header = ["plan", "region", "usage", "channel", "churned"]
    rows = []
    for _ in range(80):
        plan = rng.choice(["basic", "plus", "pro"], p=[0.5, 0.3, 0.2])
        region = rng.choice(["north", "south", "east", "west"])
        usage = rng.choice(["low", "mid", "high"], p=[0.4, 0.4, 0.2])
        channel = rng.choice(["web", "phone", "store"])
        churn_p = 0.75 if (plan == "basic" and usage == "low") else \
            0.45 if usage == "low" else 0.15
        churned = "yes" if rng.random() < churn_p else "no"
        rows.append([plan, region, usage, channel, churned])
    os.makedirs(os.path.dirname(OUT), exist_ok=True)
    with open(OUT, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
    print(f"wrote {os.path.normpath(OUT)}")


if __name__ == "__main__":
    main()
