"""Regenerates seeds.csv and shelf.csv for the end-to-end CLI test.

Synthetic: three experts answer ten seed questions; the truths are drawn
from a fixed seed. expert1 is roughly calibrated, expert2 is overconfident
and biased high, expert3 is wide. The consensus sits between them.
"""
import csv
import math
import random
from pathlib import Path

HERE = Path(__file__).parent
rng = random.Random(20190321)

QUESTIONS = [
    # (id, scale, centre, spread)
    ("s01", "linear", 62.0, 8.0),
    ("s02", "log", 120.0, 0.3),
    ("s03", "linear", 0.35, 0.08),
    ("s04", "linear", 14.0, 3.0),
    ("s05", "log", 42.0, 0.5),
    ("s06", "linear", 71.0, 6.0),
    ("s07", "log", 300.0, 0.3),
    ("s08", "linear", 5.5, 1.2),
    ("s09", "linear", 120.0, 15.0),
    ("s10", "log", 9.0, 0.4),
]

EXPERTS = {
    # name: (bias in spreads, width multiplier)
    "expert1": (0.1, 1.0),
    "expert2": (1.4, 0.35),
    "expert3": (-0.3, 1.5),
}

Z = {"min": -2.326, "q25": -0.674, "median": 0.0, "q75": 0.674, "max": 2.326}


def fmt(v):
    return f"{v:.6g}"


rows = []
shelf = []
for qid, scale, centre, spread in QUESTIONS:
    noise = rng.gauss(0.0, 1.0)
    if scale == "log":
        truth = centre * math.exp(spread * noise)
    else:
        truth = centre + spread * noise
    for name, (bias, width) in EXPERTS.items():
        jitter = rng.gauss(0.0, 0.5)
        values = {}
        for k, z in Z.items():
            shift = (bias + jitter + z * width)
            values[k] = centre * math.exp(spread * shift) if scale == "log" else centre + spread * shift
        rows.append([qid, name] + [fmt(values[k]) for k in Z] + [fmt(truth), scale])
    m = 0.3
    values = {}
    for k, z in Z.items():
        shift = m + 1.2 * z
        values[k] = centre * math.exp(spread * shift) if scale == "log" else centre + spread * shift
    shelf.append([qid] + [fmt(values[k]) for k in Z])

with open(HERE / "seeds.csv", "w", newline="") as f:
    w = csv.writer(f, lineterminator="\n")
    w.writerow(["question_id", "expert_id", "min", "q25", "median", "q75", "max", "truth", "scale"])
    w.writerows(rows)

with open(HERE / "shelf.csv", "w", newline="") as f:
    w = csv.writer(f, lineterminator="\n")
    w.writerow(["question_id", "min", "q25", "median", "q75", "max"])
    w.writerows(shelf)
