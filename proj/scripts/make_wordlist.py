#!/usr/bin/env python3
"""Builds data/words_en.txt, the word pool for natural-word synthetic corpora.

Words come from the public-domain Webster's 2nd wordlist (`english-words`
package). Every kept word has a distinct Porter stem, so planted tokens stay
unique after preprocessing.
"""
import pickle
import random
import sys

from nltk.stem.porter import PorterStemmer


def main(web2_pickle: str, stoplist: str, out: str, count: int = 6000, seed: int = 7) -> None:
    stops = set(open(stoplist).read().split())
    words = sorted(w for w in pickle.load(open(web2_pickle, "rb"))
                   if w.isascii() and w.isalpha() and w.islower() and 5 <= len(w) <= 9)
    random.Random(seed).shuffle(words)
    stemmer = PorterStemmer(mode=PorterStemmer.MARTIN_EXTENSIONS)
    kept, stems = [], set()
    for w in words:
        s = stemmer.stem(w, to_lowercase=False)
        if w in stops or s in stems or s in stops:
            continue
        stems.add(s)
        kept.append(w)
        if len(kept) == count:
            break
    with open(out, "w") as fh:
        fh.write("\n".join(kept) + "\n")


if __name__ == "__main__":
    main(sys.argv[1], sys.argv[2], sys.argv[3])
