"""Simplify the two-definite-circle seed to SBLF normal form and trisect it."""

from foldcalc.basediagram import s1s3_seed, sblf_to_trisection, simplify_to_sblf, total_euler_char
from foldcalc.render import render_base_diagram


def main():
    seed = s1s3_seed()
    r = simplify_to_sblf(seed)
    print("seed:", seed.summary())
    for m in r.log:
        print("  ", m.name, m.args)
    print("result:", r.result.summary())
    print("cusp ledger:", r.cusp_ledger)
    print("total chi:", total_euler_char(seed), "->", total_euler_char(r.result))
    t = sblf_to_trisection(r.result)
    print("trisection (g, k):", (t.params.g, t.params.k))
    with open("s1s3.svg", "w") as f:
        f.write(render_base_diagram(r.result))
    print("wrote s1s3.svg")


if __name__ == "__main__":
    main()
