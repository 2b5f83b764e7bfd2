"""Compare the linear-time engine with the reference procedures on random words.

Contractibility is checked against Dehn's algorithm.  Free homotopy is checked
against bounded conjugator search for pairs built as conjugates, and against
homology for pairs that differ there.
"""

import argparse
import random

from surfhomotopy import free_homotopic, is_contractible, preprocess
from surfhomotopy.cli import gen_canonical, random_word
from surfhomotopy.oracle import Presentation, Verdict, abelianize, brute_conjugate, dehn_trivial, word_from_darts


def inverse(w):
    return [d ^ 1 for d in reversed(w)]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--genus", type=int, nargs="+", default=[2, 3])
    ap.add_argument("--words", type=int, default=1000)
    ap.add_argument("--max-len", type=int, default=40)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    for genus in args.genus:
        pre = preprocess(gen_canonical(genus))
        pres = Presentation.canonical(genus)
        n_gens = 2 * genus
        word_agree = conj_agree = conj_n = homo_agree = homo_n = 0
        for _ in range(args.words):
            w = random_word(rng, n_gens, rng.randint(0, args.max_len))
            word_agree += is_contractible(w, pre) == dehn_trivial(word_from_darts(w), pres)

            g = random_word(rng, n_gens, rng.randint(0, 2))
            if w and not is_contractible(w, pre):
                d = g + w + inverse(g)
                conj_n += 1
                brute = brute_conjugate(word_from_darts(w), word_from_darts(d), pres, 2) is Verdict.YES
                conj_agree += free_homotopic(w, d, pre) and brute

            d = random_word(rng, n_gens, rng.randint(0, args.max_len))
            if abelianize(word_from_darts(w), n_gens) != abelianize(word_from_darts(d), n_gens):
                homo_n += 1
                homo_agree += not free_homotopic(w, d, pre)
        print(
            f"genus {genus}: word problem {word_agree}/{args.words}, "
            f"conjugates {conj_agree}/{conj_n}, homology-distinct {homo_agree}/{homo_n}"
        )


if __name__ == "__main__":
    main()
