#!/usr/bin/env python3
"""Regenerates tests/fixtures/porter_vocabulary.txt.

The reference is NLTK's PorterStemmer in MARTIN_EXTENSIONS mode, which
reproduces the ANSI C implementation distributed by Martin Porter (the one
that produced the canonical voc.txt / output.txt pair). The word sample is
the classic rule-table vocabulary plus a seeded draw from the public-domain
Webster's 2nd wordlist shipped in the `english-words` package.
"""
import pickle
import random
import sys

from nltk.stem.porter import PorterStemmer

CLASSIC = """caresses ponies ties caress cats feed agreed plastered bled motoring
sing conflated troubled sized hopping tanned falling hissing fizzed failing
filing happy sky relational conditional rational valenci hesitanci digitizer
conformabli radicalli differentli vileli analogousli vietnamization
predication operator feudalism decisiveness hopefulness callousness
formaliti sensitiviti sensibiliti triplicate formative formalize electriciti
electrical hopeful goodness revival allowance inference airliner gyroscopic
adjustable defensible irritant replacement adjustment dependent adoption
homologou communism activate angulariti homologous effective bowdlerize
probate rate cease controll roll generalizations oscillators abli logical
a is as at by""".split()


def main(web2_pickle: str, out: str, sample: int = 400, seed: int = 20120817) -> None:
    words = sorted(w for w in pickle.load(open(web2_pickle, "rb")) if w.isascii() and w.isalpha())
    rng = random.Random(seed)
    drawn = rng.sample([w for w in words if len(w) >= 4], sample)
    stemmer = PorterStemmer(mode=PorterStemmer.MARTIN_EXTENSIONS)
    seen = set()
    with open(out, "w") as fh:
        for w in CLASSIC + drawn:
            if w in seen:
                continue
            seen.add(w)
            fh.write(f"{w} {stemmer.stem(w, to_lowercase=False)}\n")


if __name__ == "__main__":
    main(sys.argv[1], sys.argv[2])
