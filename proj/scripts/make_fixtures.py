#!/usr/bin/env python3
"""Regenerates the synthetic corpora under data/.

Deterministic: rerunning produces byte-identical files.
"""
import csv
import io
import itertools
import json
import os
import random

ROOT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "data")


def write(path, text):
    full = os.path.join(ROOT, path)
    os.makedirs(os.path.dirname(full), exist_ok=True)
    with open(full, "w", encoding="utf-8", newline="") as f:
        f.write(text)


def write_csv(path, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["mr", "ref"])
    w.writerows(rows)
    write(path, buf.getvalue())


def mr_string(mr, order):
    return ", ".join("%s[%s]" % (a, mr[a]) for a in order if a in mr)


def join_clauses(clauses):
    if len(clauses) == 1:
        return clauses[0]
    return ", ".join(clauses[:-1]) + " and " + clauses[-1]


def article(word):
    return "an" if word[0] in "aeiou" else "a"


# ---------------------------------------------------------------- E2E ----

E2E = json.load(open(os.path.join(ROOT, "e2e", "schema.json"), encoding="utf-8"))
E2E_VALUES = {a["name"]: a["values"] for a in E2E["attributes"]}
E2E_ORDER = ["name", "eatType", "food", "priceRange", "customerRating", "area",
             "familyFriendly", "near"]

FOOD_WORD = {v: v.lower() for v in E2E_VALUES["food"]}

# Paraphrases per (attribute, value). The first entry is the template
# phrase; entries marked with a leading "~" are not covered by the rule pack
# and stand in for the long tail of real references.
E2E_PHRASES = {
    "eatType": {v: ["is a " + v] for v in E2E_VALUES["eatType"]},
    "food": {},
    "priceRange": {
        "cheap": ["is cheap", "has cheap prices", "offers cheap meals", "~won't break the bank"],
        "moderate": ["is moderately priced", "has moderate prices",
                     "has a moderate price range", "~is reasonably priced"],
        "high": ["is expensive", "has high prices", "has a high price range", "~is pricey"],
        "less than £20": ["has prices less than £20", "costs less than £20"],
        "£20-25": ["has prices of £20-25", "costs £20-25"],
        "more than £30": ["costs more than £30", "has prices of more than £30"],
    },
    "customerRating": {
        "average": ["has an average customer rating", "is rated average",
                    "has an average rating"],
        "high": ["has a high customer rating", "is highly rated", "has a high rating",
                 "~gets great reviews"],
        "low": ["has a low customer rating", "is rated low", "is poorly rated",
                "~gets bad reviews"],
    },
    "area": {
        "city centre": ["is in the city centre", "is located in the city centre",
                        "is in the centre of the city", "~is downtown"],
        "riverside": ["is in the riverside area", "is by the riverside",
                      "is located by the river"],
    },
    "familyFriendly": {
        "yes": ["is family friendly", "is kid friendly", "is child friendly",
                "welcomes families"],
        "no": ["is not family friendly", "is not kid friendly", "is not child friendly",
               "does not welcome children", "~is adults only"],
    },
    "near": {},
}
for v in E2E_VALUES["food"]:
    if v == "Fast food":
        E2E_PHRASES["food"][v] = ["serves fast food", "offers fast food", "sells fast food"]
    else:
        w = FOOD_WORD[v]
        E2E_PHRASES["food"][v] = ["serves %s food" % w, "offers %s food" % w,
                                  "provides %s cuisine" % w, "serves %s cuisine" % w,
                                  "~cooks %s dishes" % w]
for v in ["1 out of 5", "3 out of 5", "5 out of 5"]:
    E2E_PHRASES["customerRating"][v] = ["has a customer rating of " + v, "is rated " + v,
                                        "has a rating of " + v]
for v in E2E_VALUES["near"]:
    E2E_PHRASES["near"][v] = ["is near " + v, "is close to " + v, "is located near " + v]

# Normalization phenomena: references that contradict their MR the way real
# crowd-sourced data does.
PRICE_NUMERIC = {"cheap": "less than £20", "moderate": "£20-25", "high": "more than £30"}
RATING_NUMERIC = {"low": "1 out of 5", "average": "3 out of 5", "high": "5 out of 5"}


def pick_phrase(rng, attr, value, allow_uncovered):
    options = E2E_PHRASES[attr][value]
    covered = [p for p in options if not p.startswith("~")]
    uncovered = [p[1:] for p in options if p.startswith("~")]
    if allow_uncovered and uncovered and rng.random() < 0.12:
        return rng.choice(uncovered)
    return rng.choice(covered)


def realize_e2e(mr, rng, noisy):
    name = mr["name"]
    attrs = [a for a in E2E_ORDER if a in mr and a != "name"]
    clauses = []
    eat = mr.get("eatType")
    food = mr.get("food")
    merged = False
    if eat and food and food != "Fast food" and rng.random() < 0.4:
        w = FOOD_WORD[food]
        clauses.append("is %s %s %s" % (article(w), w, eat))
        merged = True
    for a in attrs:
        if merged and a in ("eatType", "food"):
            continue
        if noisy and rng.random() < 0.03:
            continue  # omitted by the writer
        v = mr[a]
        if noisy and a == "priceRange" and v in PRICE_NUMERIC and rng.random() < 0.06:
            v = PRICE_NUMERIC[v]
        if noisy and a == "customerRating" and v in RATING_NUMERIC and rng.random() < 0.06:
            v = RATING_NUMERIC[v]
        clauses.append(pick_phrase(rng, a, v, noisy))
    if noisy and not eat and rng.random() < 0.15:
        clauses.insert(0, "is a restaurant")
    if not clauses:
        return "%s is a place to eat ." % name
    rng.shuffle(clauses)
    if len(clauses) <= 3 or not noisy or rng.random() < 0.4:
        return "%s %s ." % (name, join_clauses(clauses))
    cut = rng.randint(1, len(clauses) - 1)
    return "%s %s . It %s ." % (name, join_clauses(clauses[:cut]), join_clauses(clauses[cut:]))


def sample_e2e_mr(rng):
    others = [a for a in E2E_ORDER if a != "name"]
    size = rng.choice([2, 3, 3, 4, 4, 4, 5, 5, 5, 6, 6, 7, 8]) - 1
    mr = {"name": rng.choice(E2E_VALUES["name"])}
    for a in rng.sample(others, size):
        values = E2E_VALUES[a]
        if a == "priceRange":
            values = values + ["cheap", "moderate", "high"]  # word forms dominate
        mr[a] = rng.choice(values)
    return mr


def e2e_split(rng, n_mrs, refs, noisy):
    rows = []
    for _ in range(n_mrs):
        mr = sample_e2e_mr(rng)
        for _ in range(refs):
            rows.append([mr_string(mr, E2E_ORDER), realize_e2e(mr, rng, noisy)])
    return rows


def e2e_templates():
    phrases = {}
    for attr, by_value in E2E_PHRASES.items():
        phrases[attr] = {v: p[0] for v, p in by_value.items()}
    return {"subject": "name", "phrases": phrases}


E2E_RULES = r"""# E2E restaurant domain.
# Patterns run over the space-joined lowercase tokens; "£20" is tokenized as
# "£ 20". Names and landmarks are matched verbatim (or as placeholders) first
# and hidden from the other patterns.

[attribute name]
@literal
@placeholder

[attribute near]
@literal
@placeholder

[attribute eatType]
\bcoffee shop\b => coffee shop
\bpub\b => pub
\brestaurant\b => restaurant

[attribute food]
\b(chinese|english|french|indian|italian|japanese) (food|cuisine|restaurant|pub|coffee shop)\b => $1
\bfast food\b => Fast food

[attribute priceRange]
\bcheap\b => cheap
\bmoderately priced\b => moderate
\bmoderate (prices|price range)\b => moderate
\bexpensive\b => high
\bhigh (prices|price range)\b => high
\bless than £ 20\b => less than £20
£ 20-25\b => £20-25
\bmore than £ 30\b => more than £30

[attribute customerRating]
\b([135] out of 5)\b => $1
\baverage (customer )?rating\b => average
\brated average\b => average
\bhigh (customer )?rating\b => high
\bhighly rated\b => high
\blow (customer )?rating\b => low
\brated low\b => low
\bpoorly rated\b => low

[attribute area]
\bcity centre\b => city centre
\bcentre of (the )?city\b => city centre
\briverside\b => riverside
\bby the river\b => riverside

[attribute familyFriendly]
\b(family|kid|child)[ -]friendly\b => yes
\bwelcomes (families|children|kids)\b => yes
\bnot (family|kid|child)[ -]friendly\b => no
\bdoes not (welcome|allow) (families|children|kids)\b => no
"""

E2E_NORMALIZATION = {
    "amend": [
        {"attribute": "eatType", "value": "restaurant", "trigger": "\\brestaurant\\b"},
    ],
    "remap": [
        {"attribute": "priceRange", "from": "cheap", "to": "less than £20",
         "when": "numeric", "evidence": "£", "symmetric": True},
        {"attribute": "priceRange", "from": "moderate", "to": "£20-25",
         "when": "numeric", "evidence": "£", "symmetric": True},
        {"attribute": "priceRange", "from": "high", "to": "more than £30",
         "when": "numeric", "evidence": "£", "symmetric": True},
        {"attribute": "customerRating", "from": "low", "to": "1 out of 5",
         "when": "numeric", "evidence": "out of", "symmetric": True},
        {"attribute": "customerRating", "from": "average", "to": "3 out of 5",
         "when": "numeric", "evidence": "out of", "symmetric": True},
        {"attribute": "customerRating", "from": "high", "to": "5 out of 5",
         "when": "numeric", "evidence": "out of", "symmetric": True},
    ],
}


def make_e2e():
    rng = random.Random(2018)
    write_csv("e2e/train.csv", e2e_split(rng, 400, 2, True))
    write_csv("e2e/valid.csv", e2e_split(rng, 120, 2, True))
    write_csv("e2e/test.csv", e2e_split(rng, 60, 1, True))
    write("e2e/templates.json", json.dumps(e2e_templates(), indent=1, ensure_ascii=False) + "\n")
    write("e2e/rules.txt", E2E_RULES)
    write("e2e/normalization.json",
          json.dumps(E2E_NORMALIZATION, indent=1, ensure_ascii=False) + "\n")


# ---------------------------------------------------------------- toy ----

TOY_NAMES = ["Bistro Uno", "Cafe Luna", "The Anchor", "Golden Wok", "Spice Hut",
             "Blue Door", "Green Leaf", "Olive Tree"]
TOY_VALUES = {
    "food": ["italian", "french", "chinese", "indian"],
    "area": ["north", "south", "centre", "riverside"],
    "price": ["cheap", "moderate", "expensive"],
}
TOY_ORDER = ["name", "food", "area", "price"]

TOY_SCHEMA = {
    "name": "toy",
    "linearization": "fixed-position",
    "dialogue_acts": [{"name": "inform", "token": "inform", "required": ["name"]}],
    "attributes": [
        {"name": "food", "token": "food", "label": "Food", "values": TOY_VALUES["food"]},
        {"name": "area", "token": "area", "label": "Area", "values": TOY_VALUES["area"]},
        {"name": "price", "token": "price", "label": "Price", "values": TOY_VALUES["price"]},
        {"name": "name", "token": "name", "label": "Name", "placeholder": "NAME",
         "delexicalized": True, "values": TOY_NAMES},
    ],
    "report_order": ["name", "food", "area", "price"],
}


def toy_phrases(attr, v):
    if attr == "food":
        return ["serves %s food" % v, "is %s %s restaurant" % (article(v), v),
                "offers %s food" % v]
    if attr == "area":
        return ["is in the %s" % v, "is located in the %s" % v]
    return {"cheap": ["is cheap", "has cheap prices"],
            "moderate": ["is moderately priced", "has moderate prices"],
            "expensive": ["is expensive", "has high prices"]}[v]


def realize_toy(mr, rng):
    clauses = [rng.choice(toy_phrases(a, mr[a])) for a in TOY_ORDER[1:] if a in mr]
    if rng.random() < 0.5:
        rng.shuffle(clauses)
    return "%s %s ." % (mr["name"], join_clauses(clauses))


TOY_RULES = r"""# Toy restaurant domain.

[attribute name]
@literal
@placeholder

[attribute food]
\b(italian|french|chinese|indian) (food|restaurant)\b => $1

[attribute area]
\bin the (north|south|centre|riverside)\b => $1

[attribute price]
\bcheap\b => cheap
\bmoderate(ly priced| prices)\b => moderate
\bexpensive\b => expensive
\bhigh prices\b => expensive
"""


# In three-attribute training MRs price follows food, so a generator can
# get away with ignoring the price input there. The held-out test MRs break
# that tie.
TOY_TIED_PRICE = {"italian": "cheap", "french": "expensive", "chinese": "moderate",
                  "indian": "cheap"}


def make_toy():
    rng = random.Random(7)
    attrs = TOY_ORDER[1:]
    combos = {1: [], 2: [], 3: []}
    for size in (1, 2, 3):
        for subset in itertools.combinations(attrs, size):
            for values in itertools.product(*(TOY_VALUES[a] for a in subset)):
                combos[size].append(dict(zip(subset, values)))
    tied = [c for c in combos[3] if TOY_TIED_PRICE[c["food"]] == c["price"]]
    novel = [c for c in combos[3] if TOY_TIED_PRICE[c["food"]] != c["price"]]
    pairs = list(combos[2])
    rng.shuffle(pairs)
    rng.shuffle(tied)
    train_mrs = combos[1] + pairs[:32] + tied[:12]
    valid_mrs = pairs[32:] + tied[12:]
    rows = {"train": [], "valid": [], "test": []}
    for split, mrs, refs in (("train", train_mrs, 3), ("valid", valid_mrs, 2)):
        for slots in mrs:
            for _ in range(refs):
                mr = dict(slots, name=rng.choice(TOY_NAMES))
                rows[split].append([mr_string(mr, TOY_ORDER), realize_toy(mr, rng)])
    rng.shuffle(novel)
    for slots in novel[:30]:
        mr = dict(slots, name=rng.choice(TOY_NAMES))
        rows["test"].append([mr_string(mr, TOY_ORDER), realize_toy(mr, rng)])
    for split in rows:
        write_csv("toy/%s.csv" % split, rows[split])
    write("toy/schema.json", json.dumps(TOY_SCHEMA, indent=1) + "\n")
    write("toy/rules.txt", TOY_RULES)
    templates = {"subject": "name",
                 "phrases": {a: {v: toy_phrases(a, v)[0] for v in TOY_VALUES[a]}
                             for a in attrs}}
    write("toy/templates.json", json.dumps(templates, indent=1) + "\n")


# ------------------------------------------------------------- laptop ----

LAPTOP = json.load(open(os.path.join(ROOT, "laptop", "schema.json"), encoding="utf-8"))
LV = {a["name"]: a["values"] for a in LAPTOP["attributes"]}

LAPTOP_PHRASE = {
    "family": lambda v: "in any family" if v == "don't care" else "in the %s family" % v,
    "priceRange": lambda v: "in any price range" if v == "don't care" else "in the %s price range" % v,
    "weightRange": lambda v: "of any weight" if v == "don't care" else "that are %s" % v,
    "isForBusiness": lambda v: "for business use" if v == "yes" else "for personal use",
    "platform": lambda v: "running %s" % v,
    "batteryRating": lambda v: "with %s battery rating" % v,
    "price": lambda v: "at %s" % v,
    "weight": lambda v: "weighing %s" % v,
    "drive": lambda v: "with a %s drive" % v,
    "memory": lambda v: "with %s of memory" % v,
}


def laptop_example(rng):
    act = rng.choice(["inform", "inform", "inform_count", "inform_no_match", "recommend",
                      "compare", "goodbye"])
    slots = []
    if act == "goodbye":
        if rng.random() < 0.5:
            return act, [("type", "laptop")], "thank you for using the laptop finder , goodbye ."
        return act, [], "thank you , goodbye ."
    if act == "compare":
        names = rng.sample(LV["name"], 2)
        attr = rng.choice(["price", "memory", "drive", "weight"])
        vals = rng.sample(LV[attr], 2)
        slots = [("name", names[0]), (attr, vals[0]), ("name", names[1]), (attr, vals[1])]
        text = "the %s is %s while the %s is %s ." % (
            names[0], LAPTOP_PHRASE[attr](vals[0]), names[1], LAPTOP_PHRASE[attr](vals[1]))
        return act, slots, "compared to each other , " + text
    if act in ("inform", "recommend"):
        name = rng.choice(LV["name"])
        extra = rng.sample(["platform", "batteryRating", "price", "weight", "drive",
                            "memory", "isForBusiness"], rng.randint(1, 3))
        slots = [("name", name)] + [(a, rng.choice([v for v in LV[a] if v != "don't care"]))
                                    for a in extra]
        clause = " ".join(LAPTOP_PHRASE[a](v) for a, v in slots[1:])
        lead = "the %s is a laptop" if act == "inform" else "i recommend the %s , a laptop"
        return act, slots, (lead % name) + " " + clause + " ."
    filters = rng.sample(["family", "priceRange", "weightRange", "isForBusiness", "platform"],
                         rng.randint(1, 2))
    slots = [(a, rng.choice(LV[a])) for a in filters]
    clause = " ".join(LAPTOP_PHRASE[a](v) for a, v in slots)
    if act == "inform_count":
        count = rng.choice(LV["count"])
        return act, [("count", count)] + slots, "there are %s laptops %s ." % (count, clause)
    return act, slots, "there are no laptops %s ." % clause


def da_string(act, slots):
    return "%s(%s)" % (act, ", ".join("%s[%s]" % s for s in slots))


LAPTOP_RULES = r"""# Laptop domain. Placeholder attributes are matched by their tokens;
# values are also matched verbatim for lexicalized text.

[act]
\bthere are (?!no )[^ ]+ laptops\b => inform_count
\bthere are no laptops\b => inform_no_match
\bi recommend\b => recommend
\bcompared to each other\b => compare
\bgoodbye\b => goodbye
\bis a laptop\b => inform

[attribute name]
@literal
@placeholder

[attribute type]
\blaptop finder\b => laptop

[attribute count]
@literal
@placeholder

[attribute family]
\bin the (satellite|tecra|portege|aspire) family\b => $1
\bin any family\b => don't care

[attribute price]
@literal
@placeholder

[attribute priceRange]
\bin the (budget|moderate|expensive) price range\b => $1
\bin any price range\b => don't care

[attribute batteryRating]
@literal
@placeholder

[attribute weight]
@literal
@placeholder

[attribute weightRange]
\bthat are (light weight|mid weight|heavy)\b => $1
\bof any weight\b => don't care

[attribute isForBusiness]
\bfor business use\b => yes
\bfor personal use\b => no

[attribute drive]
@literal
@placeholder

[attribute memory]
@literal
@placeholder

[attribute platform]
\brunning (windows 10|chrome os|linux)\b => $1
"""


def make_laptop():
    rng = random.Random(11)
    for split, n in (("train", 120), ("valid", 30), ("test", 30)):
        records = []
        for _ in range(n):
            act, slots, text = laptop_example(rng)
            records.append({"mr": da_string(act, slots), "refs": [text]})
        write("laptop/%s.json" % split, json.dumps(records, indent=1) + "\n")
    write("laptop/rules.txt", LAPTOP_RULES)


if __name__ == "__main__":
    make_e2e()
    make_toy()
    make_laptop()
