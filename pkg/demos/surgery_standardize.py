"""Standardize K_2 and a twisted S1 x S3 sum by torus surgeries."""

from foldcalc.algebra import FpPresentation
from foldcalc.kirby import catalog, invariants
from foldcalc.surgery import ManifoldData, standardize


def main():
    inv = invariants(catalog("K", 2))
    inputs = [
        ("K_2 via RP4", ManifoldData(inv.pi1, inv.euler_char, "rp4")),
        ("K_2 via S2xRP2", ManifoldData(inv.pi1, inv.euler_char, "s2xrp2")),
        ("#_3 S1xtS3", ManifoldData(FpPresentation.build([("t1", True), ("t2", True), ("t3", True)]), -4, "s2xrp2")),
    ]
    for name, x in inputs:
        s = standardize(x)
        print(f"{name}: kill {[k.locus for k in s.schedule.kills()]} -> {s.target}")


if __name__ == "__main__":
    main()
