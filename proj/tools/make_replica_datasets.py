#!/usr/bin/env python3
"""Generates stand-in copies of the drug200 and Car Evaluation datasets.

The real files are distributed by Kaggle and the UCI repository and are not
redistributed here. The replicas keep the column names, value domains and row
counts of the originals and label rows with fixed rules:

* drug200: the decision rules that separate the Kaggle file perfectly
  (Na_to_K > 14.829 -> DrugY, then BP/Age/Cholesterol splits).
* car: every combination of the six attribute domains (1728 rows, as in the
  UCI file) labelled by a four-level hierarchical model shaped like the one the
  UCI data was generated from (PRICE, COMFORT, TECH -> CAR).

Run from the repository root:
    python3 tools/make_replica_datasets.py tests/data
"""

import csv
import itertools
import random
import sys
from pathlib import Path


def drug_label(age, bp, chol, na_to_k):
    if na_to_k > 14.829:
        return "DrugY"
    if bp == "HIGH":
        return "drugA" if age <= 50 else "drugB"
    if bp == "LOW" and chol == "HIGH":
        return "drugC"
    return "drugX"


def make_drug200(rng):
    rows = [
        # Rows pinning the observed ranges (Age 15..74, Na_to_K 6.269..38.247)
        # and the worked example used in the tests.
        (16, "M", "LOW", "HIGH", 12.006),
        (15, "F", "HIGH", "NORMAL", 16.725),
        (74, "M", "HIGH", "HIGH", 9.567),
        (47, "F", "NORMAL", "HIGH", 6.269),
        (23, "M", "LOW", "NORMAL", 38.247),
    ]
    while len(rows) < 200:
        age = rng.randint(15, 74)
        sex = rng.choice(["F", "M"])
        bp = rng.choice(["HIGH", "HIGH", "LOW", "NORMAL"])
        chol = rng.choice(["HIGH", "NORMAL"])
        if rng.random() < 0.45:
            na_to_k = rng.uniform(14.9, 38.2)
        else:
            na_to_k = rng.uniform(6.3, 14.8)
        rows.append((age, sex, bp, chol, round(na_to_k, 3)))
    rng.shuffle(rows)
    out = []
    for age, sex, bp, chol, na in rows:
        out.append([str(age), sex, bp, chol, f"{na:.3f}", drug_label(age, bp, chol, na)])
    return ["Age", "Sex", "BP", "Cholesterol", "Na_to_K", "Drug"], out


BUYING = ["vhigh", "high", "med", "low"]
MAINT = ["vhigh", "high", "med", "low"]
DOORS = ["2", "3", "4", "5more"]
PERSONS = ["2", "4", "more"]
LUG = ["small", "med", "big"]
SAFETY = ["low", "med", "high"]


def car_label(buying, maint, doors, persons, lug, safety):
    b, m = BUYING.index(buying), MAINT.index(maint)
    if (b == 0 and m <= 1) or (b == 1 and m == 0):
        price = "high"
    elif b + m >= 5:
        price = "low"
    else:
        price = "med"

    space = min(DOORS.index(doors), 2) + LUG.index(lug)
    if persons == "2" or space == 0:
        comfort = "low"
    elif space <= 2 or (persons == "4" and doors == "2"):
        comfort = "med"
    else:
        comfort = "high"

    if safety == "low" or comfort == "low":
        tech = "bad"
    elif comfort == "med" and safety == "med":
        tech = "acc"
    elif comfort == "high" and safety == "high":
        tech = "exc"
    else:
        tech = "good"

    if tech == "bad" or price == "high":
        return "unacc"
    if price == "med" or tech == "acc":
        return "acc"
    if tech == "exc" or (price == "low" and b + m == 6 and safety == "high"):
        return "vgood"
    return "good"


def make_car():
    rows = []
    for combo in itertools.product(BUYING, MAINT, DOORS, PERSONS, LUG, SAFETY):
        rows.append(list(combo) + [car_label(*combo)])
    return ["buying", "maint", "doors", "persons", "lug_boot", "safety", "class"], rows


def write(path, header, rows):
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def main():
    out_dir = Path(sys.argv[1] if len(sys.argv) > 1 else "tests/data")
    out_dir.mkdir(parents=True, exist_ok=True)
    write(out_dir / "drug200_replica.csv", *make_drug200(random.Random(200)))
    write(out_dir / "car_replica.csv", *make_car())


if __name__ == "__main__":
    main()
