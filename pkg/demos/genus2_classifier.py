"""Classify a few genus-2 SBLFs and compare with the handle decomposition they build."""

from foldcalc.kirby import catalog, invariants
from foldcalc.sblf import build_kirby, classify_genus2, parse_sblf, validate


def main():
    for fold, cycles, n, parity in [(None, [], 4, 0), ("b", [], 2, 0), ("b", [], 2, 1), (None, ["b"] * 6, 5, 0)]:
        d = parse_sblf(2, fold, cycles, n, parity)
        t = classify_genus2(d)
        built, ref = invariants(build_kirby(d)), invariants(catalog(t.tag, *t.params))
        print(f"{validate(d).verdict:14s} {str(t):12s} H1 {built.h1} vs {ref.h1}, chi {built.euler_char} vs {ref.euler_char}")


if __name__ == "__main__":
    main()
