"""Invariants of catalog manifolds and of their orientation double covers."""

from foldcalc.kirby import catalog, double_cover, invariants, verify_double_cover


def main():
    for name, params in [("K", (3,)), ("N", (2,)), ("RP4", ()), ("RP4#RP4", ()), ("R", (4,))]:
        h = catalog(name, *params)
        inv = invariants(h)
        c = double_cover(h)
        print(f"{h.label:10s} H1 = {inv.h1}  chi = {inv.euler_char:3d}  cover H1 = {invariants(c).h1}  verified = {verify_double_cover(h, c)}")


if __name__ == "__main__":
    main()
