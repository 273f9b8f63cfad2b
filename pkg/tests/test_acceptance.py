"""The twelve acceptance criteria, one test each.

Each test prints a single ``PASS criterion N`` or ``FAIL criterion N`` line
to the terminal, even without ``-s``. The last test checks the module's
total wall time.
"""

import random
import time

import pytest

from foldcalc.algebra import AbelianInvariants, abelianization, invariants_from_orders
from foldcalc.basediagram import (
    S2,
    BaseDiagram,
    N,
    flip_and_slip,
    is_sblf_normal_form,
    notall_script,
    notall_seed,
    s1s3_seed,
    sblf_to_trisection,
    simplify_to_sblf,
    total_euler_char,
)
from foldcalc.kirby import CATALOG_ARITY, catalog, double_cover, invariants, verify_double_cover
from foldcalc.sblf import DiffeoType, NonMinimalCase, build_kirby, classify_genus2, parse_sblf
from foldcalc.surgery import STANDARD, AlreadyOrientable, ManifoldData, SumExpression, kill_loop, larson_rule, lickorish_wallace_form, standardize

from test_algebra import check_snf
from test_basediagram import R2_RP4, R2_S1XTS3, beta_sum, random_walk, sblf
from test_surgery import abel_oracle, k_data, random_presentation, random_preserving_word, twisted_sum

START = time.perf_counter()


def Ab(rank, *torsion):
    return AbelianInvariants(rank, tuple(torsion))


@pytest.fixture
def report(capsys):
    def run(n, what, body):
        try:
            detail = body()
        except BaseException as e:
            with capsys.disabled():
                print(f"\nFAIL criterion {n}: {what} ({type(e).__name__}: {e})")
            raise
        with capsys.disabled():
            print(f"\nPASS criterion {n}: {what}" + (f" [{detail}]" if detail else ""))

    return run


def test_criterion_01_k_family_homology(report):
    def body():
        for n in range(21):
            inv = invariants(catalog("K", n))
            # Z_0 is Z
            assert abelianization(inv.pi1) == inv.h1 == invariants_from_orders([2 * n, 2])
        return "n = 0..20"

    report(1, "H1(K_n) = Z_2n + Z_2", body)


def test_criterion_02_double_covers(report):
    def body():
        checked = 0
        for n in range(21):
            h = catalog("K", n)
            c = double_cover(h)
            # S1 x L(n,1): Z + Z_n, with L(0,1) = S1 x S2 and L(1,1) = S3
            assert invariants(c).h1 == (Ab(2) if n == 0 else Ab(1) if n == 1 else Ab(1, n))
            assert verify_double_cover(h, c)
            checked += 1
        for name, h1 in [("RP4#RP4", Ab(1)), ("RP4", Ab(0))]:
            c = double_cover(catalog(name))
            assert invariants(c).h1 == h1
            assert verify_double_cover(catalog(name), c)
            checked += 1
        for n in range(1, 21):
            h = catalog("R", n)
            c = double_cover(h)
            h1 = invariants(c).h1
            assert h1 == (Ab(0) if n == 1 else Ab(0, n))
            assert h1 == invariants(catalog("B", n)).h1
            assert verify_double_cover(h, c)
            checked += 1
        return f"{checked} covers"

    report(2, "verify_double_cover on K_n, RP4#RP4, RP4 and R_n", body)


def whole_catalog():
    out = []
    for name, arity in CATALOG_ARITY.items():
        if arity == 0:
            out.append(catalog(name))
        elif name == "M":
            out += [catalog(name, m, n) for m in range(1, 11) for n in range(11)]
        elif name == "notall":
            out += [catalog(name, g, k) for g in range(1, 11) for k in range(g + 1)]
        else:
            lo = 1 if name in ("X", "R", "B", "NxS2") else 0
            out += [catalog(name, n) for n in range(lo, 21)]
    return out


def test_criterion_03_cover_doubles_euler_characteristic(report):
    def body():
        twisted = orientable = 0
        for h in whole_catalog():
            if not h.twisted_count():
                # an orientable manifold has no orientation double cover
                orientable += 1
                continue
            c = double_cover(h, strict=False)
            assert c.euler_char == 2 * h.euler_char
            assert invariants(c).euler_char == 2 * invariants(h).euler_char
            twisted += 1
        return f"{twisted} nonorientable entries, {orientable} orientable skipped"

    report(3, "chi(double_cover(h)) = 2 chi(h) over the catalog", body)


def test_criterion_04_base_diagram_conservation(report):
    def body():
        rnd = random.Random(20261014)
        used = set()
        for _ in range(1000):
            used |= random_walk(rnd, rnd.randint(1, 30))
        assert len(used) == 10
        return "1000 sequences, all 10 moves used"

    report(4, "total Euler characteristic conserved by random move sequences", body)


def test_criterion_05_s1s3_replay(report):
    def body():
        r = simplify_to_sblf(s1s3_seed())
        assert is_sblf_normal_form(r.result)
        assert [x.fiber.label() for x in r.result.regions] == ["N_6", "N_4"]
        assert r.result.total_lefschetz == r.result.regions[0].lefschetz == 6
        assert r.cusp_ledger == (0, 8, 6, 0)
        assert simplify_to_sblf(s1s3_seed(), list(r.log)).result == r.result
        return f"{len(r.log)} logged moves"

    report(5, "s1s3 seed reaches N_6/N_4 with 6 Lefschetz points, cusps 0-8-6-0", body)


def test_criterion_06_notall_replay(report):
    def body():
        for g in range(1, 11):
            r = simplify_to_sblf(notall_seed(g), notall_script(g)).result
            assert [x.fiber.label() for x in r.regions] == [f"N_{2 * g + 4}", f"N_{2 * g + 2}"]
            assert r.total_lefschetz == 2 * g + 4
            assert total_euler_char(r) == 2 - 2 * g == catalog("notall", g, 0).euler_char
        return "g = 1..10"

    report(6, "notall replay to N_{2g+4}/N_{2g+2} with 2g+4 Lefschetz points", body)


def trisection_table():
    rows = [("S1xtS3", R2_S1XTS3, catalog("S1xtS3"), (1, 1)), ("RP4", R2_RP4, catalog("RP4"), (2, 1))]
    rows += [(f"K_{n}", BaseDiagram.make([N(2)], []), catalog("K", n), (4, 2)) for n in range(11)]
    for n in range(11):
        rows += [(f"N_{n}", sblf(N(2), S2), catalog("N", n), (3, 1)), (f"N'_{n}", sblf(N(2), S2), catalog("Nprime", n), (3, 1))]
    rows += [(f"N_{g}xS2", BaseDiagram.make([N(g)], []), catalog("NxS2", g), (g + 2, g)) for g in range(1, 11)]
    return rows


def test_criterion_07_trisection_table(report):
    def body():
        rows = trisection_table()
        for name, d, h, gk in rows:
            p = sblf_to_trisection(d).params
            assert (p.g, p.k) == gk, name
            assert 2 + p.g - 3 * p.k == p.euler_char == h.euler_char == invariants(h).euler_char, name
        return f"{len(rows)} rows"

    report(7, "trisection parameters and 2 + g - 3k = chi", body)


def test_criterion_08_genus_bound(report):
    def body():
        minimal = trisection_table()
        for name, d, h, _ in minimal:
            assert sblf_to_trisection(d).params.g == beta_sum(h), name
        others = [(simplify_to_sblf(s1s3_seed()).result, catalog("S1xtS3"))]
        others += [(simplify_to_sblf(notall_seed(g), notall_script(g)).result, catalog("notall", g, 0)) for g in range(1, 11)]
        for d, h in others:
            assert sblf_to_trisection(d).params.g > beta_sum(h), h.label
        return f"{len(minimal)} sharp, {len(others)} strict"

    report(8, "g >= b1 + b2 (Z2), with equality on the minimal examples", body)


def expected_type(fold, m, n, parity):
    if fold and m:
        return None
    if fold:
        return DiffeoType("Nprime" if parity else "N", (n,))
    if m:
        return DiffeoType("M", (m, n))
    return DiffeoType("K", (n,))


def test_criterion_09_genus_two_classifier(report):
    def body():
        count = 0
        for fold in (None, "b"):
            for m in range(11):
                for n in range(11):
                    for parity in (0, 1):
                        d = parse_sblf(2, fold, ["b"] * (2 * m), n, parity)
                        want = expected_type(fold, m, n, parity)
                        count += 1
                        if want is None:
                            with pytest.raises(NonMinimalCase):
                                classify_genus2(d)
                            continue
                        got = classify_genus2(d)
                        assert got == want
                        built, ref = invariants(build_kirby(d)), invariants(catalog(got.tag, *got.params))
                        assert (built.h1, built.euler_char, built.z2_betti) == (ref.h1, ref.euler_char, ref.z2_betti)
                        if got.tag == "M":
                            assert ref.h1 == (Ab(1) if n == 0 else Ab(0, 2 * n))
                            assert ref.euler_char == 2 * m
        return f"{count} combinations"

    report(9, "genus-2 decision table and invariants against the catalog", body)


def test_criterion_10_smith_normal_form(report):
    def body():
        rnd = random.Random(10)
        for _ in range(1000):
            r, c = rnd.randint(1, 4), rnd.randint(1, 4)
            check_snf([[rnd.randint(-9, 9) for _ in range(c)] for _ in range(r)])
        return "1000 matrices up to 4x4"

    report(10, "Smith form equals the gcd-of-minors oracle with unimodular transforms", body)


def test_criterion_11_surgery(report):
    def body():
        rnd = random.Random(11)
        names = sorted(STANDARD)
        applied = 0
        while applied < 1000:
            e = SumExpression.of(*rnd.choices(names, k=rnd.randint(0, 4)))
            rule = rnd.choice(["i0", "i1", "kill", "lw"])
            if rule in ("i0", "i1"):
                out = larson_rule(e, rule)
            elif rule == "kill":
                if not e.pi1.generators:
                    continue
                out = kill_loop(e, random_preserving_word(rnd, e.pi1))
            else:
                if e.orientable:
                    with pytest.raises(AlreadyOrientable):
                        lickorish_wallace_form(e)
                    continue
                out = lickorish_wallace_form(e)
            assert out.euler_char == e.euler_char
            applied += 1
        inputs = [k_data(n) for n in range(11)] + [twisted_sum(g) for g in range(1, 11)]
        rp4 = invariants(catalog("RP4"))
        inputs.append(ManifoldData(rp4.pi1, rp4.euler_char, "rp4"))
        for x in inputs:
            t = standardize(x).target
            c = t.counts()
            assert c["RP4"] + c["S2xRP2"] == 1
            assert t.euler_char == x.chi
        rnd = random.Random(7)
        for _ in range(1000):
            g = random_presentation(rnd)
            w = random_preserving_word(rnd, g)
            assert abelianization(kill_loop(g, w)) == abel_oracle(g.with_relators([w])).direct_sum(Ab(1))
        return f"{applied} rule applications, {len(inputs)} standardizations, 1000 kills"

    report(11, "surgery rules keep chi, standardize targets have a + b = 1", body)


def test_criterion_12_flip_and_slip(report):
    def body():
        starts = [sblf(N(2), S2), sblf(N(4), N(2), 3), sblf(N(6), N(4), 1)]
        for d in starts:
            chi = total_euler_char(d)
            for _ in range(5):
                nxt = flip_and_slip(d)
                assert is_sblf_normal_form(nxt)
                assert nxt.regions[0].fiber == N(d.regions[0].fiber.parts[0].genus + 2)
                assert nxt.total_lefschetz == d.total_lefschetz + 4
                assert total_euler_char(nxt) == chi
                d = nxt
        return f"{len(starts)} starts, 5 iterations each"

    report(12, "flip-and-slip raises genus by 2 with 4 new Lefschetz points", body)


def test_total_runtime(capsys):
    elapsed = time.perf_counter() - START
    with capsys.disabled():
        print(f"\nacceptance suite wall time {elapsed:.1f} s")
    assert elapsed < 60
