#!/usr/bin/env python3
"""Generate the desk-scale corpus and gazetteer used by the acceptance suite.

Twenty regions, each with five towns within 12 km of its centre. Sixty town
names also exist far away (with higher importance), and twenty unrelated
names exist twice, far from every region. Every document names 3-5 towns of
its region plus 1-2 of the unrelated names; its true location is the region
centre.

    python3 tools/make_desk_corpus.py tests/data
"""

import json
import math
import random
import sys
from pathlib import Path

R = 6371.0
SEED = 20240611

CENTRES = [
    (44.39, -79.69), (48.14, 11.58), (35.68, 139.69), (-33.87, 151.21),
    (40.42, -3.70), (55.76, 37.62), (-23.55, -46.63), (19.43, -99.13),
    (30.04, 31.24), (1.35, 103.82), (-1.29, 36.82), (64.15, -21.94),
    (39.90, 116.41), (28.61, 77.21), (-34.60, -58.38), (47.61, -122.33),
    (25.76, -80.19), (59.33, 18.07), (-41.29, 174.78), (14.69, -17.44),
]
SYLLABLES = ["al", "bra", "cor", "dun", "el", "fen", "gar", "hol", "is", "jor",
             "kel", "lan", "mor", "nev", "os", "pel", "quin", "ros", "sal", "tor",
             "ul", "ver", "wen", "yar", "zel"]
SUFFIXES = ["Falls", "Harbour", "Mills", "Crossing", "Heights"]


def distance(a, b):
    pa, pb = math.radians(a[0]), math.radians(b[0])
    dl = math.radians(a[1] - b[1])
    arg = math.sin(pa) * math.sin(pb) + math.cos(pa) * math.cos(pb) * math.cos(dl)
    return R * math.acos(max(-1.0, min(1.0, arg)))


def offset(centre, km, bearing):
    lat = centre[0] + km / 111.2 * math.cos(bearing)
    lon = centre[1] + km / (111.2 * math.cos(math.radians(centre[0]))) * math.sin(bearing)
    return (round(lat, 5), round(lon, 5))


def main(out_dir):
    rng = random.Random(SEED)
    for i, a in enumerate(CENTRES):
        for b in CENTRES[i + 1:]:
            assert distance(a, b) > 1000, (a, b)

    used = set()

    def fresh_name():
        while True:
            word = "".join(rng.choice(SYLLABLES) for _ in range(rng.choice([2, 3]))).capitalize()
            name = word if rng.random() < 0.7 else word + " " + rng.choice(SUFFIXES)
            if name.lower() not in used and word.lower() not in used:
                used.add(name.lower())
                used.add(word.lower())
                return name

    far_points = []

    def far_point():
        while True:
            lat = math.degrees(math.asin(rng.uniform(-0.95, 0.95)))
            p = (round(lat, 4), round(rng.uniform(-180, 180), 4))
            if all(distance(p, c) > 1500 for c in CENTRES) and \
                    all(distance(p, q) > 300 for q in far_points):
                far_points.append(p)
                return p

    entries = []  # (id, name, lat, lon, importance, class, display)
    regions = []
    for r, centre in enumerate(CENTRES):
        towns = []
        for t in range(5):
            name = fresh_name()
            p = offset(centre, rng.uniform(2, 12), rng.uniform(0, 2 * math.pi))
            towns.append(name)
            entries.append((f"r{r:02d}t{t}", name, p, round(rng.uniform(0.3, 0.5), 3),
                            "town", f"{name}, Region {r}"))
        regions.append(towns)

    town_names = [name for towns in regions for name in towns]
    for k, name in enumerate(rng.sample(town_names, 60)):
        entries.append((f"h{k:02d}", name, far_point(), round(rng.uniform(0.6, 0.8), 3),
                        "town", f"{name}, elsewhere"))

    distractors = [fresh_name() for _ in range(20)]
    for k, name in enumerate(distractors):
        for copy in range(2):
            entries.append((f"d{k:02d}{'ab'[copy]}", name, far_point(),
                            round(rng.uniform(0.4, 0.9), 3), "town", f"{name} {copy + 1}"))
    assert len(entries) == 200

    # Every candidate outside the region is far from it; towns are close together.
    for r, towns in enumerate(regions):
        for e in entries:
            if e[1] in towns:
                d = distance(e[2], CENTRES[r])
                assert (d < 15) if e[0].startswith(f"r{r:02d}") else (d > 1000), e

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "desk_gazetteer.tsv", "w") as f:
        f.write("# source_id\tname\talt_names\tlat\tlon\timportance\tclass\tdisplay_name\n")
        for sid, name, (lat, lon), imp, cls, display in entries:
            f.write(f"{sid}\t{name}\t\t{lat}\t{lon}\t{imp}\t{cls}\t{display}\n")

    def words(name):
        return [[w, "NNP", "LOCATION"] for w in name.split()]

    def plain(*pairs):
        return [[w, tag, "O"] for w, tag in pairs]

    with open(out / "desk_corpus.jsonl", "w") as f:
        for r, towns in enumerate(regions):
            k = 3 + r % 3
            named = rng.sample(towns, k)
            extra = rng.sample(distractors, 1 + r % 2)
            toks = plain(("We", "PRP"), ("stayed", "VBD"), ("in", "IN")) + words(named[0])
            toks += plain((",", ","), ("then", "RB"), ("drove", "VBD"), ("to", "TO")) + words(named[1])
            for town in named[2:]:
                toks += plain(("and", "CC")) + words(town)
            toks += plain((".", "."))
            for d in extra:
                toks += plain(("The", "DT"), ("menu", "NN"), ("mentioned", "VBD"),
                              ("dishes", "NNS"), ("from", "IN")) + words(d) + plain((".", "."))
            if r % 4 == 0:
                toks += plain(("Back", "RB"), ("in", "IN")) + words(named[0]) + plain((".", "."))
            doc = {
                "id": f"desk-{r:02d}",
                "lat": CENTRES[r][0],
                "lon": CENTRES[r][1],
                "type": "travel" if r % 2 == 0 else "news",
                "tokens": [{"text": t, "pos": p, "ner": n} for t, p, n in toks],
            }
            f.write(json.dumps(doc) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "tests/data")
