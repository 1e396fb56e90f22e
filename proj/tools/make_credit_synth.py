#!/usr/bin/env python3
# Copyright 2026 The prefcf Authors.
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Writes the bundled credit-like dataset and its schema to data/."""

import argparse
import json
import pathlib

import numpy as np
import pandas as pd

JOBS = ["unskilled", "skilled", "management", "self_employed"]
HOUSING = ["own", "rent", "free"]
PURPOSES = ["car", "education", "business", "furniture", "repairs"]


def make(rows, seed):
    rng = np.random.default_rng(seed)
    age = rng.integers(19, 71, rows)
    job = rng.choice(JOBS, rows, p=[0.2, 0.45, 0.2, 0.15])
    housing = rng.choice(HOUSING, rows, p=[0.55, 0.35, 0.10])
    purpose = rng.choice(PURPOSES, rows)
    income = np.round(rng.normal(2.0, 0.6, rows) + 0.9 * (job == "management"), 1)
    income = np.clip(income, 0.5, 5.0)
    amount = np.round(rng.gamma(2.0, 2.2, rows) + 1.0, 1)

    logit = (1.6 * (income - 2.2) - 0.35 * (amount - 5.4) + 0.02 * (age - 40)
             + 0.8 * (housing == "own") - 0.6 * (housing == "free")
             + 0.5 * (job == "management") - 0.7 * (job == "unskilled")
             + 0.4 * (purpose == "car") - 0.5 * (purpose == "business"))
    noise = rng.logistic(0.0, 0.6, rows)
    approved = np.where(logit + noise > 0.0, "yes", "no")
    return pd.DataFrame({
        "age": age, "job": job, "housing": housing, "purpose": purpose,
        "income": income, "credit_amount": amount, "approved": approved,
    })


def has_tied_rates(frame):
    for column in ["job", "housing", "purpose"]:
        rates = frame.groupby(column)["approved"].apply(lambda s: (s == "yes").mean())
        if rates.round(12).duplicated().any():
            return True
    return False


def schema():
    numeric = {"kind": "numeric", "mutability": "mutable"}
    return {
        "target": {"name": "approved", "class": "yes"},
        "features": [
            {"name": "age", "kind": "numeric", "mutability": "immutable",
             "domain": {"min": 18, "max": 90}},
            {"name": "job", "kind": "categorical", "mutability": "mutable",
             "domain": JOBS},
            {"name": "housing", "kind": "categorical", "mutability": "mutable",
             "domain": HOUSING},
            {"name": "purpose", "kind": "categorical", "mutability": "mutable",
             "domain": PURPOSES},
            dict(numeric, name="income"),
            dict(numeric, name="credit_amount"),
        ],
    }


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--out-dir", default=str(pathlib.Path(__file__).parents[1] / "data"))
    parser.add_argument("--rows", type=int, default=200)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    seed = args.seed
    frame = make(args.rows, seed)
    while has_tied_rates(frame):
        seed += 1
        frame = make(args.rows, seed)
    out = pathlib.Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    frame.to_csv(out / "credit_synth.csv", index=False)
    with open(out / "credit_synth.schema.json", "w") as f:
        json.dump(schema(), f, indent=2)
        f.write("\n")
    share = (frame["approved"] == "yes").mean()
    print(f"seed {seed}: {len(frame)} rows, {share:.2f} approved")


if __name__ == "__main__":
    main()
