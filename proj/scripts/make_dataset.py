#!/usr/bin/env python3
"""Generate the bundled synthetic placement dataset and object knowledge table.

The rows follow the annotation schema (object, room, correct, incorrect,
implausible, annotator). Ten simulated annotators rank every room's surfaces
for every object from a category-level preference table plus noise.
Output is deterministic for a given seed.
"""

import argparse
import json
import random
from pathlib import Path

ROOMS = {
    "kitchen": ["carpet", "fridge", "table", "counter", "sink", "chest", "cooktop", "microwave",
                "dishwasher", "stove", "oven", "shelf", "top cabinet", "chair", "bottom cabinet"],
    "living room": ["coffee table", "sofa", "tv stand", "bookshelf", "armchair", "side table", "rug",
                    "mantel", "ottoman", "bench", "console table"],
    "bedroom": ["bed", "nightstand", "dresser", "wardrobe", "vanity", "window seat", "hamper",
                "blanket chest"],
    "bathroom": ["bathtub", "toilet", "bathroom sink", "bathroom counter", "medicine cabinet",
                 "towel rack", "shower shelf", "laundry basket"],
    "office": ["desk", "office chair", "filing cabinet", "printer table", "bookcase", "office shelf",
               "credenza", "whiteboard ledge"],
    "dining room": ["dining table", "sideboard", "buffet", "china cabinet", "dining chair", "bar cart",
                    "serving table", "wine rack"],
    "laundry room": ["washing machine", "dryer", "ironing board", "utility sink", "laundry shelf",
                     "folding table", "drying rack", "storage bin"],
    "garage": ["workbench", "tool chest", "garage shelf", "storage rack", "pegboard", "garage cabinet",
               "paint shelf", "recycling bin"],
    "kids room": ["toy chest", "bunk bed", "play table", "kids desk", "toy shelf", "crib", "beanbag",
                  "changing table"],
    "hallway": ["shoe rack", "coat stand", "entry table", "hallway bench", "key shelf", "umbrella stand",
                "hallway cabinet", "mail tray"],
}

# category -> room -> (affinity in [0,1], preferred surfaces best first, implausible surfaces)
PREFS = {
    "fruit": {
        "kitchen": (1.0, ["table", "counter", "fridge", "top cabinet", "shelf"],
                    ["dishwasher", "oven", "stove", "cooktop", "carpet", "sink"]),
        "dining room": (0.5, ["dining table", "sideboard", "serving table"], ["wine rack", "dining chair"]),
        "living room": (0.25, ["coffee table", "side table"], ["rug", "mantel"]),
        "kids room": (0.1, ["play table"], ["crib", "changing table"]),
    },
    "snacks": {
        "kitchen": (1.0, ["top cabinet", "counter", "shelf", "table", "bottom cabinet"],
                    ["dishwasher", "oven", "stove", "sink", "cooktop"]),
        "living room": (0.4, ["coffee table", "side table", "tv stand"], ["rug", "mantel"]),
        "kids room": (0.2, ["play table", "toy shelf"], ["crib"]),
        "office": (0.15, ["desk"], ["filing cabinet"]),
    },
    "kitchenware": {
        "kitchen": (1.0, ["counter", "top cabinet", "bottom cabinet", "shelf", "dishwasher", "sink"],
                    ["carpet", "chair", "fridge"]),
        "dining room": (0.5, ["dining table", "china cabinet", "sideboard", "buffet"], ["dining chair"]),
    },
    "tools": {
        "garage": (1.0, ["workbench", "tool chest", "pegboard", "garage shelf", "garage cabinet"],
                   ["recycling bin"]),
        "laundry room": (0.3, ["laundry shelf", "storage bin"], ["washing machine", "dryer"]),
        "kitchen": (0.08, ["bottom cabinet"], ["fridge", "oven", "stove", "microwave", "dishwasher", "sink"]),
        "hallway": (0.1, ["hallway cabinet"], ["umbrella stand"]),
    },
    "toiletries": {
        "bathroom": (1.0, ["bathroom counter", "medicine cabinet", "bathroom sink", "shower shelf", "bathtub"],
                     ["toilet", "laundry basket"]),
        "bedroom": (0.2, ["vanity", "dresser"], ["bed", "hamper"]),
    },
    "office": {
        "office": (1.0, ["desk", "office shelf", "filing cabinet", "credenza", "bookcase"], ["office chair"]),
        "living room": (0.2, ["side table", "console table"], ["rug", "sofa"]),
        "bedroom": (0.15, ["nightstand"], ["hamper"]),
        "kitchen": (0.05, ["table"], ["stove", "oven", "sink", "dishwasher"]),
    },
    "clothes": {
        "bedroom": (1.0, ["dresser", "wardrobe", "bed", "hamper", "blanket chest"], ["vanity"]),
        "laundry room": (0.6, ["folding table", "dryer", "washing machine", "drying rack"], ["utility sink"]),
        "bathroom": (0.15, ["laundry basket", "towel rack"], ["toilet", "bathroom sink"]),
    },
    "toys": {
        "kids room": (1.0, ["toy chest", "toy shelf", "play table", "beanbag", "bunk bed"], ["changing table"]),
        "living room": (0.3, ["rug", "coffee table", "ottoman"], ["mantel"]),
        "bedroom": (0.1, ["bed"], ["vanity"]),
    },
    "media": {
        "living room": (1.0, ["coffee table", "tv stand", "bookshelf", "side table", "sofa"], ["rug"]),
        "office": (0.4, ["desk", "bookcase", "office shelf"], ["office chair"]),
        "bedroom": (0.3, ["nightstand", "bed"], ["hamper"]),
    },
    "dispersed": {room: (0.45, surfaces[:3], []) for room, surfaces in ROOMS.items()},
}

OBJECTS = {
    "fruit": ["apple", "banana", "orange", "pear", "lemon", "peach"],
    "snacks": ["cracker box", "cereal box", "chips bag", "granola bar", "cookie jar"],
    "kitchenware": ["mug", "plate", "bowl", "spatula", "kettle", "toaster", "cutting board"],
    "tools": ["screwdriver", "hammer", "wrench", "tape measure", "drill", "pliers"],
    "toiletries": ["toothbrush", "shampoo", "soap", "toothpaste", "razor", "hand towel"],
    "office": ["stapler", "notebook", "pen holder", "laptop", "multiport hub", "scissors"],
    "clothes": ["shirt", "socks", "sweater", "jeans", "scarf"],
    "toys": ["teddy bear", "toy car", "puzzle box", "building blocks", "doll"],
    "media": ["book", "magazine", "remote control", "headphones"],
    "dispersed": ["light switch", "tissue box", "phone charger", "power strip"],
}

DESCRIPTIONS = {
    "fruit": "A {o} is a fresh fruit eaten raw as a healthy snack or with breakfast. It rests in a fruit "
             "bowl in the kitchen or chills in the fridge to remain ripe. Its sweet juicy flesh supplies vitamins "
             "and fiber for desserts, salads and lunch boxes.",
    "snacks": "A {o} holds packaged dry food eaten as a quick snack between meals. It lives in the kitchen "
              "pantry cabinet and gets opened when someone is hungry. Its crunchy contents are shared with guests or "
              "packed for school lunches.",
    "kitchenware": "A {o} is a kitchen utensil for cooking, serving or drinking. It is rinsed in the sink or "
                   "dishwasher and put away in kitchen cabinets. Meals and hot drinks are prepared and served "
                   "with it daily.",
    "tools": "A {o} is a manual tool for repairs, construction and assembling furniture. It belongs in a toolbox or on "
             "a garage workbench. It tightens, fastens, cuts or measures parts throughout maintenance projects.",
    "toiletries": "A {o} is a personal hygiene product for washing, grooming and dental care. It waits in the "
                  "bathroom beside the washbasin or shower. It is part of the morning and evening routine for feeling "
                  "clean and tidy.",
    "office": "A {o} is office equipment for work, study and paperwork. It sits on a desk in a study or home "
              "office. It organizes documents, connects devices or supports writing and computing tasks.",
    "clothes": "A {o} is a garment worn to stay warm and dressed. It is folded in a dresser or hung in a "
               "wardrobe, and laundered regularly. It is chosen each day to match the weather and outfit.",
    "toys": "A {o} is a toy children play with for fun and imagination. It goes into a toy chest or onto "
            "shelves in the playroom. It entertains kids through games, pretend play and learning activities.",
    "media": "A {o} is for entertainment and relaxation in leisure time. It is found near the sofa, on a "
             "nightstand or on a bookshelf. It is enjoyed while reading, listening or watching television.",
    "dispersed": "A {o} is installed or placed in nearly every room of the house. It provides electricity, light "
                 "or convenience wherever residents happen to be. Homes contain many of them spread around walls "
                 "and outlets.",
}

TOASTER = ("A toaster browns sliced bread until both sides are crisp. People also use it to warm bagels and "
           "frozen waffles in the morning. It usually sits on a kitchen counter next to a power outlet.")

FIXTURE = {
    "object": "multiport hub",
    "room": "kitchen",
    "correct": ["carpet", "fridge", "table", "counter", "sink"],
    "incorrect": ["chest", "cooktop", "microwave", "dishwasher", "stove"],
    "implausible": ["oven", "shelf", "top cabinet", "chair", "bottom cabinet"],
    "annotator": 0,
}

ANNOTATORS = 10


def annotate(rng, category, room, surfaces):
    affinity, preferred, implausible = PREFS[category].get(room, (0.0, [], []))
    base = {}
    for s in surfaces:
        if s in preferred:
            base[s] = 3.0 - 0.4 * preferred.index(s)
        elif s in implausible:
            base[s] = -2.5
        else:
            base[s] = 0.0
    utility = {s: base[s] + rng.gauss(0.0, 0.7) for s in surfaces}
    ranked = sorted(surfaces, key=lambda s: -utility[s])
    k = round(affinity * min(len(preferred), len(surfaces) // 2) + rng.uniform(-0.5, 0.5))
    k = max(0, min(k, len(surfaces) - 1))
    correct = ranked[:k]
    rest = [s for s in ranked[k:]]
    bad = [s for s in rest if utility[s] < -1.5]
    middle = [s for s in rest if s not in bad]
    incorrect = sorted(middle, key=lambda s: utility[s])
    return correct, incorrect, bad


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "data"))
    ap.add_argument("--seed", type=int, default=20240917)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    rows = []
    for category, objects in OBJECTS.items():
        for obj in objects:
            for room, surfaces in ROOMS.items():
                for a in range(ANNOTATORS):
                    if obj == FIXTURE["object"] and room == FIXTURE["room"] and a == 0:
                        rows.append(dict(FIXTURE))
                        continue
                    correct, incorrect, implausible = annotate(rng, category, room, surfaces)
                    rows.append({"object": obj, "room": room, "correct": correct, "incorrect": incorrect,
                                 "implausible": implausible, "annotator": a})
    with open(out / "dataset.jsonl", "w") as f:
        for r in rows:
            f.write(json.dumps(r) + "\n")

    knowledge = {}
    for category, objects in OBJECTS.items():
        for obj in objects:
            knowledge[obj] = {"category": category, "description": DESCRIPTIONS[category].format(o=obj),
                              "dispersed": category == "dispersed"}
    knowledge["toaster"]["description"] = TOASTER
    with open(out / "object_knowledge.json", "w") as f:
        json.dump(knowledge, f, indent=1, sort_keys=True)
        f.write("\n")
    print(f"{len(rows)} annotation rows, {len(knowledge)} objects -> {out}")


if __name__ == "__main__":
    main()
