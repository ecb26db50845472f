#!/usr/bin/env python3
"""Regenerates data/devanagari.tsv, the default Devanagari -> Latin rule table.

Rows are "pattern<TAB>replacement". Bare consonants carry the inherent
vowel "a"; consonant + vowel sign and consonant + virama combinations are
listed explicitly so a longest-match pass needs no syllable logic.
"""
import sys

CONSONANTS = [
    ("क", "k"), ("ख", "kh"), ("ग", "g"), ("घ", "gh"), ("ङ", "n"),
    ("च", "ch"), ("छ", "chh"), ("ज", "j"), ("झ", "jh"), ("ञ", "ny"),
    ("ट", "t"), ("ठ", "th"), ("ड", "d"), ("ढ", "dh"), ("ण", "n"),
    ("त", "t"), ("थ", "th"), ("द", "d"), ("ध", "dh"), ("न", "n"),
    ("प", "p"), ("फ", "ph"), ("ब", "b"), ("भ", "bh"), ("म", "m"),
    ("य", "y"), ("र", "r"), ("ल", "l"), ("ळ", "l"), ("व", "v"),
    ("श", "sh"), ("ष", "sh"), ("स", "s"), ("ह", "h"),
]
NUKTA = "़"
# Consonant + nukta. NFC keeps these decomposed (U+0958..U+095F are composition exclusions).
NUKTA_CONSONANTS = [
    ("क" + NUKTA, "q"), ("ख" + NUKTA, "kh"), ("ग" + NUKTA, "g"), ("ज" + NUKTA, "z"),
    ("ड" + NUKTA, "r"), ("ढ" + NUKTA, "rh"), ("फ" + NUKTA, "f"), ("य" + NUKTA, "y"),
]
VIRAMA = "्"
MATRAS = [
    ("ा", "a"),   # aa
    ("ि", "i"),   # i
    ("ी", "i"),   # ii
    ("ु", "u"),   # u
    ("ू", "u"),   # uu
    ("ृ", "ri"),  # vocalic r
    ("ॅ", "e"),   # candra e
    ("े", "e"),   # e
    ("ै", "ai"),  # ai
    ("ॉ", "o"),   # candra o
    ("ो", "o"),   # o
    ("ौ", "au"),  # au
]
VOWELS = [
    ("अ", "a"), ("आ", "aa"), ("इ", "i"), ("ई", "i"), ("उ", "u"), ("ऊ", "u"),
    ("ऋ", "ri"), ("ऍ", "e"), ("ए", "e"), ("ऐ", "ai"), ("ऑ", "o"), ("ओ", "o"), ("औ", "au"),
]
SIGNS = [
    ("ँ", "n"),  # candrabindu
    ("ं", "n"),  # anusvara
    ("ः", "h"),  # visarga
    (NUKTA, ""),
    (VIRAMA, ""),
    ("ऽ", ""),   # avagraha
    ("‌", ""),   # ZWNJ
    ("‍", ""),   # ZWJ
]


def rows():
    for pattern, roman in VOWELS:
        yield pattern, roman
    for base, roman in CONSONANTS + NUKTA_CONSONANTS:
        yield base, roman + "a"
        yield base + VIRAMA, roman
        for sign, vowel in MATRAS:
            yield base + sign, roman + vowel
    for sign, vowel in MATRAS:
        yield sign, vowel
    for pattern, roman in SIGNS:
        yield pattern, roman


def main():
    out = sys.stdout
    out.write("# Default Devanagari -> Latin rules. Generated by tools/gen_devanagari_table.py.\n")
    seen = set()
    for pattern, roman in rows():
        assert pattern not in seen, pattern
        seen.add(pattern)
        out.write(f"{pattern}\t{roman}\n")


if __name__ == "__main__":
    main()
