#!/usr/bin/env python3
"""Write the two-room fetch scenario (kitchen table, living-room coffee table and bench).

The apple sits on the kitchen table behind a cracker box and a cereal box; a
banana next to them stays in view. Geometry knobs can be overridden with
--set key=value for tuning.
"""

import argparse
import json
import math
from pathlib import Path

P = {
    "kitchen_w": 5.0,
    "living_w": 20.0,
    "depth": 5.0,
    "door_y": 0.5,
    "table": [1.6, 2.0, 3.0, 2.7],
    # the boxes stand on the table in an L that hides its north-west corner
    # from the east and the south
    "corner": [2.05, 2.3],  # inner corner of the L
    "apple": [1.75, 2.55],
    "banana": [2.75, 2.35],
    "coffee": [6.5, 2.2, 11.5, 2.8],
    "bench": [16.0, 3.6, 17.4, 4.2],
    "start": [8.0, 1.2, 0.0],
    "move_cost_per_m": 0.3,
    "sim_words": 6,
    "seed": 1,
    # scripted false-negative coins, one per in-view object per detect
    "fn_baseline": [],
    "fn_comodel": [],
    "fn_mcqa_comodel": [],
}


def build(p):
    kw, lw, d = p["kitchen_w"], p["living_w"], p["depth"]
    rooms = [{"id": 0, "label": "kitchen", "rect": [0.0, 0.0, kw, d]},
             {"id": 1, "label": "living room", "rect": [kw, 0.0, kw + lw, d]}]
    surfaces = [{"id": 0, "label": "table", "room": 0, "rect": p["table"], "height": "mid"},
                {"id": 1, "label": "coffee table", "room": 1, "rect": p["coffee"], "height": "mid"},
                {"id": 2, "label": "bench", "room": 1, "rect": p["bench"], "height": "mid"}]
    t = p["table"]
    cx, cy = p["corner"]
    occluders = [{"label": "cracker_box", "rect": [cx, cy, cx + 0.2, t[3]]},
                 {"label": "cereal_box", "rect": [t[0], cy - 0.2, cx + 0.2, cy]}]
    b = p["bench"]
    bench_mid = [0.5 * (b[0] + b[2]), 0.5 * (b[1] + b[3])]
    objects = [{"id": 0, "label": "apple", "surface": 0, "pose": p["apple"] + [0.0]},
               {"id": 1, "label": "banana", "surface": 0, "pose": p["banana"] + [0.0]},
               {"id": 2, "label": "screwdriver", "surface": 2, "pose": bench_mid + [0.0]}]
    doorways = [{"rooms": [0, 1], "gap": [kw, p["door_y"], kw, p["door_y"] + 1.0]}]
    env = {"schema_version": 1, "rooms": rooms, "surfaces": surfaces, "occluders": occluders,
           "objects": objects, "doorways": doorways}

    fruit = "fruit snack eaten fresh sweet kitchen bowl".split()
    shared = " ".join(fruit[: p["sim_words"]])
    descriptions = {
        "apple": f"An apple is a crisp {shared} with red skin and a core.",
        "banana": f"A banana is a soft {shared} with yellow peel.",
        "screwdriver": "A screwdriver turns screws when assembling furniture or fixing hinges in a garage workshop.",
    }
    uniform2 = [math.log(0.5), math.log(0.5)]
    mcqa = [
        {"object": "apple", "level": "room", "labels": ["kitchen", "living room"],
         "logprobs": [math.log(0.9), math.log(0.1)]},
        {"object": "apple", "level": "surface", "room": "living room", "labels": ["coffee table", "bench"],
         "logprobs": uniform2},
    ]
    task = {
        "objects": ["apple"],
        "initial_literals": ["(IsItem ?apple)", "(IsItem ?banana)", "(IsItem ?screwdriver)",
                             "(IsSurf ?coffee_table)", "(IsSurf ?bench)", "(IsSurf ?table)",
                             "(IsRoom ?living_room)", "(IsRoom ?kitchen)", "(HandEmpty ?arm)",
                             "(AtBConf ?start)"],
        "goal_literals": ["(At ?apple ?coffee_table)"],
    }
    return {
        "name": "two-room apple fetch",
        "environment": env,
        "start": p["start"],
        "task": task,
        "seed": p["seed"],
        "planner": {"move_cost_per_m": p["move_cost_per_m"]},
        "priors": {"mcqa": mcqa, "descriptions": descriptions, "dispersed": []},
        "runs": {
            "baseline": {"false_negatives": p["fn_baseline"], "expect": {"detects": ["coffee table living room", "table kitchen", "bench living room",
                                                "coffee table living room", "table kitchen"], "replans": 4}},
            "comodel": {"false_negatives": p["fn_comodel"], "expect": {"detects": ["coffee table living room", "table kitchen", "table kitchen"],
                                   "replans": 2}},
            "mcqa+comodel": {"false_negatives": p["fn_mcqa_comodel"], "expect": {"detects": ["table kitchen", "table kitchen"], "replans": 1}},
        },
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "data" / "two_room_fetch.json"))
    ap.add_argument("--set", action="append", default=[], help="key=json value")
    args = ap.parse_args()
    p = dict(P)
    for kv in args.set:
        k, v = kv.split("=", 1)
        if k not in p:
            raise SystemExit(f"unknown knob {k}")
        p[k] = json.loads(v)
    with open(args.out, "w") as f:
        json.dump(build(p), f, indent=1)
        f.write("\n")


if __name__ == "__main__":
    main()
