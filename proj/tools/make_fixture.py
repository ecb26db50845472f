#!/usr/bin/env python3
"""Regenerates tests/data/fixture_1k: a templated, POS-tagged Hindi-English bitext.

Usage: python3 tools/make_fixture.py [--pairs 1000] [--seed 7] [--out DIR]

The output is committed; rerunning with the defaults reproduces it byte for byte.
"""
import argparse
import pathlib
import random

NOUNS = [
    ("सुरक्षा", "security"), ("प्रमाणपत्र", "certificate"), ("कंप्यूटर", "computer"),
    ("किताब", "book"), ("दरवाज़ा", "door"), ("खिड़की", "window"), ("पानी", "water"),
    ("घर", "house"), ("गाड़ी", "car"), ("सड़क", "road"), ("पेड़", "tree"), ("फूल", "flower"),
    ("बाज़ार", "market"), ("स्कूल", "school"), ("शहर", "city"), ("गाँव", "village"),
    ("नदी", "river"), ("पहाड़", "mountain"), ("मेज़", "table"), ("कुर्सी", "chair"),
    ("कमरा", "room"), ("दीवार", "wall"), ("बगीचा", "garden"), ("रसोई", "kitchen"),
    ("खाना", "food"), ("दूध", "milk"), ("चाय", "tea"), ("फल", "fruit"), ("कपड़ा", "cloth"),
    ("जूता", "shoe"), ("घड़ी", "watch"), ("फ़ोन", "phone"), ("संदेश", "message"),
    ("पत्र", "letter"), ("खेत", "field"), ("बादल", "cloud"), ("समुद्र", "sea"),
    ("रास्ता", "path"), ("बिस्तर", "bed"), ("दुकान", "shop"),
]
ADJECTIVES = [
    ("विश्वशनीय", "trusted"), ("सुंदर", "beautiful"), ("बड़ा", "big"), ("छोटा", "small"),
    ("नया", "new"), ("पुराना", "old"), ("साफ़", "clean"), ("गंदा", "dirty"), ("सस्ता", "cheap"),
    ("महंगा", "expensive"), ("मज़बूत", "strong"), ("ठंडा", "cold"), ("गरम", "hot"),
    ("सुरक्षित", "safe"), ("खाली", "empty"),
]
QUANTIFIERS = [("कुछ", "some"), ("सभी", "all"), ("कई", "many"), ("ज़्यादातर", "most")]

# The worked example every downstream check looks for.
ANCHOR = (
    [("यह", "DEM"), ("सुरक्षा", "NN"), ("प्रमाणपत्र", "NN"), ("विश्वशनीय", "JJ"),
     ("नहीं", "NEG"), ("है", "VAUX"), ("।", "SYM")],
    "This security certificate is not trusted .",
)


def pick(rng, table, k):
    return rng.sample(table, k)


def template_a(rng):
    (n1, e1), (n2, e2) = pick(rng, NOUNS, 2)
    a, ea = rng.choice(ADJECTIVES)
    hi = [("यह", "DEM"), (n1, "NN"), (n2, "NN"), (a, "JJ"), ("नहीं", "NEG"), ("है", "VAUX"), ("।", "SYM")]
    return hi, f"This {e1} {e2} is not {ea} ."


def template_b(rng):
    q, eq = rng.choice(QUANTIFIERS)
    n, en = rng.choice(NOUNS)
    a, ea = rng.choice(ADJECTIVES)
    hi = [(q, "QF"), (n, "NN"), ("आज", "NN_T"), (a, "JJ"), ("हैं", "VAUX"), ("।", "SYM")]
    return hi, f"{eq} {en} are {ea} today ."


def template_c(rng):
    n, en = rng.choice(NOUNS)
    a, ea = rng.choice(ADJECTIVES)
    hi = [("मेरा", "PRP"), (n, "NN"), ("बहुत", "INTF"), (a, "JJ"), ("है", "VAUX"), ("।", "SYM")]
    return hi, f"My {en} is very {ea} ."


def template_d(rng):
    (n1, e1), (n2, e2) = pick(rng, NOUNS, 2)
    a, ea = rng.choice(ADJECTIVES)
    hi = [(n1, "NN"), ("और", "CC"), (n2, "NN"), (a, "JJ"), ("हैं", "VAUX"), ("।", "SYM")]
    return hi, f"{e1} and {e2} are {ea} ."


def template_e(rng):
    (n1, e1), (n2, e2), (n3, e3) = pick(rng, NOUNS, 3)
    (a1, ea1), (a2, ea2) = pick(rng, ADJECTIVES, 2)
    hi = [(a1, "JJ"), (n1, "NN"), ("और", "CC"), (a2, "JJ"), (n2, "NN"), (n3, "NN"),
          ("में", "PSP"), ("हैं", "VAUX"), ("।", "SYM")]
    return hi, f"{ea1} {e1} and {ea2} {e2} are in {e3} ."


def template_f(rng):
    q, eq = rng.choice(QUANTIFIERS)
    (n1, e1), (n2, e2), (n3, e3), (n4, e4) = pick(rng, NOUNS, 4)
    (a1, ea1), (a2, ea2), (a3, ea3) = pick(rng, ADJECTIVES, 3)
    hi = [(q, "QF"), (a1, "JJ"), (n1, "NN"), (",", "SYM"), (a2, "JJ"), (n2, "NN"), ("और", "CC"),
          (a3, "JJ"), (n3, "NN"), ("भी", "RP"), ("इस", "DEM"), (n4, "NN"), ("में", "PSP"),
          ("रखे", "VM"), ("गए", "VAUX"), ("हैं", "VAUX"), ("।", "SYM")]
    en = f"{eq} {ea1} {e1} , {ea2} {e2} and {ea3} {e3} were also kept in this {e4} ."
    return hi, en


def template_g(rng):
    (n1, e1), (n2, e2) = pick(rng, NOUNS, 2)
    hi = [(n1, "NN"), (n2, "NN"), ("के", "PSP"), ("पास", "NST"), ("है", "VAUX"), ("।", "SYM")]
    return hi, f"{e1} is near {e2} ."


TEMPLATES = [
    (template_a, 20), (template_b, 15), (template_c, 15), (template_d, 15),
    (template_e, 15), (template_f, 10), (template_g, 10),
]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--pairs", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent
                                         / "tests" / "data" / "fixture_1k"))
    args = ap.parse_args()

    rng = random.Random(args.seed)
    funcs = [f for f, _ in TEMPLATES]
    weights = [w for _, w in TEMPLATES]
    pairs = [ANCHOR]
    seen = {ANCHOR[1]}
    while len(pairs) < args.pairs:
        hi, en = rng.choices(funcs, weights)[0](rng)
        if en in seen:
            continue
        seen.add(en)
        pairs.append((hi, en))

    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "source.tagged", "w", encoding="utf-8", newline="\n") as f:
        for hi, _ in pairs:
            for tok, pos in hi:
                f.write(f"{tok}\t{pos}\n")
            f.write("\n")
    with open(out / "target.en", "w", encoding="utf-8", newline="\n") as f:
        for _, en in pairs:
            f.write(en + "\n")
    with open(out / "overrides.tsv", "w", encoding="utf-8", newline="\n") as f:
        f.write("यह\tYeh\nनहीं\tnahi\nहै\thai\n")


if __name__ == "__main__":
    main()
