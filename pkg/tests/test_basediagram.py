import random

import pytest
from hypothesis import given, settings, strategies as st

from foldcalc.basediagram import (
    DEFINITE,
    EMPTY,
    INDEFINITE,
    INWARD,
    OUTWARD,
    S2,
    BadParams,
    BaseDiagram,
    DiagramError,
    DisconnectedFiber,
    FiberClass,
    InconsistentFibers,
    Move,
    MoveInvalid,
    N,
    NoAbsorbableEnd,
    NoCusp,
    NoCuspAvailable,
    NoLefschetzPoint,
    NotAdjacent,
    NotDefinite,
    NotEndRegion,
    NotIndefinite,
    NotInwardIndefinite,
    NotSblfNormalForm,
    Sigma,
    StrategyStuck,
    UnslippedLoop,
    WrongDirection,
    apply_move,
    cusp_merge,
    definite_to_indefinite,
    flip,
    flip_and_slip,
    invert_fold,
    is_sblf_normal_form,
    notall_script,
    notall_seed,
    push_lefschetz,
    recenter,
    replay,
    s1s3_seed,
    sblf_to_trisection,
    simplify_to_sblf,
    slip,
    spin_and_product_trisections,
    total_euler_char,
    trisection_params,
    trisection_to_sblf_params,
    tube,
    unsink,
    wrinkle,
)
from foldcalc.errors import ParseError
from foldcalc.kirby import catalog, invariants
from foldcalc.surface import SurfaceModel


def sblf(higher, lower, lefschetz=0):
    return BaseDiagram.make([higher, lower], [INDEFINITE], lefschetz=[lefschetz, 0])


def labels(d):
    return [r.fiber.label() for r in d.regions]


# ---------------------------------------------------------------------------
# fibers and validity
# ---------------------------------------------------------------------------


def test_fiber_classes():
    assert EMPTY.euler_char == 0
    assert FiberClass.of(SurfaceModel.N(3), SurfaceModel.N(3)).euler_char == -2
    assert tube(S2, True) == N(2)
    assert tube(S2, False) == Sigma(1)
    assert tube(Sigma(2), True) == N(6)
    assert tube(N(3)) == N(5)
    assert tube(FiberClass.of(SurfaceModel.N(2), SurfaceModel.Sigma(1))) == N(4)
    for f in (EMPTY, S2, N(4), FiberClass.of(SurfaceModel.N(2), SurfaceModel.N(2))):
        assert FiberClass.from_json(f.to_json()) == f


def test_diagram_rejects_bad_gap():
    with pytest.raises(InconsistentFibers):
        BaseDiagram.make([N(2), N(6)], [INDEFINITE])
    with pytest.raises(InconsistentFibers):
        BaseDiagram.make([N(2), EMPTY], [DEFINITE])
    with pytest.raises(InconsistentFibers):
        BaseDiagram.make([EMPTY, S2], [INDEFINITE])
    with pytest.raises(InconsistentFibers):
        BaseDiagram.make([EMPTY], [], lefschetz=[1])


def test_arrows_follow_euler_characteristic():
    d = BaseDiagram.make([N(4), N(2), S2, EMPTY], [INDEFINITE, INDEFINITE, DEFINITE])
    assert [c.arrow for c in d.circles] == [OUTWARD, OUTWARD, INWARD]


# ---------------------------------------------------------------------------
# moves, one at a time
# ---------------------------------------------------------------------------


def test_definite_to_indefinite():
    d = s1s3_seed()
    d = definite_to_indefinite(d, 0, True)
    d = definite_to_indefinite(d, 1, True)
    assert [r.fiber for r in d.regions] == [N(2), S2, N(2)]
    t = definite_to_indefinite(BaseDiagram.make([S2, EMPTY], [DEFINITE]), 0, False)
    assert t.regions[1].fiber == Sigma(1)
    with pytest.raises(NotDefinite):
        definite_to_indefinite(t, 0)


def test_flip():
    d = sblf(N(4), N(2))
    f = flip(d, 0)
    assert f.circles[0].cusps == 2
    assert total_euler_char(f) == total_euler_char(d)
    with pytest.raises(NotIndefinite):
        flip(s1s3_seed(), 0)


def test_slip():
    d = flip(flip(sblf(N(4), N(2)), 0), 0)
    s = slip(d, 0)
    assert labels(s) == ["N_6", "N_4"]
    assert not s.circles[0].loops
    assert total_euler_char(s) == total_euler_char(d)
    with pytest.raises(UnslippedLoop):
        slip(flip(sblf(N(4), N(2)), 0), 0)


def test_cusp_merge_arithmetic():
    d = BaseDiagram.make([N(6), N(4), N(6)], [INDEFINITE, INDEFINITE], cusps=[4, 4])
    m = cusp_merge(d, 0, 1)
    assert len(m.circles) == 1
    assert m.circles[0].cusps == 6
    assert total_euler_char(m) == total_euler_char(d)
    one = cusp_merge(BaseDiagram.make([N(6), N(4), N(6)], [INDEFINITE, INDEFINITE], cusps=[1, 1]), 0, 1)
    assert one.circles[0].cusps == 0


def test_cusp_merge_errors():
    three = BaseDiagram.make([N(6), N(4), N(2), N(4)], [INDEFINITE] * 3, cusps=[1, 1, 1])
    with pytest.raises(NotAdjacent):
        cusp_merge(three, 0, 2)
    with pytest.raises(NoCuspAvailable):
        cusp_merge(BaseDiagram.make([N(6), N(4), N(6)], [INDEFINITE] * 2, cusps=[0, 2]), 0, 1)
    with pytest.raises(UnslippedLoop):
        cusp_merge(flip(BaseDiagram.make([N(6), N(4), N(6)], [INDEFINITE] * 2, cusps=[0, 2]), 0), 0, 1)
    split = FiberClass.of(SurfaceModel.N(2), SurfaceModel.N(2))
    with pytest.raises(DisconnectedFiber):
        cusp_merge(BaseDiagram.make([N(4), split, N(4)], [INDEFINITE] * 2, cusps=[1, 1]), 0, 1)
    with pytest.raises(NoAbsorbableEnd):
        cusp_merge(BaseDiagram.make([N(2), N(4), N(2)], [INDEFINITE] * 2, cusps=[1, 1]), 0, 1)


def test_unsink():
    d = BaseDiagram.make([N(6), N(4)], [INDEFINITE], cusps=[6])
    for _ in range(6):
        d = unsink(d, 0)
    assert d.circles[0].cusps == 0
    assert d.regions[0].lefschetz == 6
    assert total_euler_char(d) == (2 - 6) + (2 - 4) + 6
    with pytest.raises(NoCusp):
        unsink(d, 0)


def test_push_lefschetz():
    d = BaseDiagram.make([N(4), N(2)], [INDEFINITE], lefschetz=[0, 2])
    p = push_lefschetz(d, 1, 0)
    assert [r.lefschetz for r in p.regions] == [1, 1]
    assert total_euler_char(p) == total_euler_char(d)
    with pytest.raises(WrongDirection):
        push_lefschetz(p, 0, 1)
    with pytest.raises(NoLefschetzPoint):
        push_lefschetz(BaseDiagram.make([N(4), N(2)], [INDEFINITE]), 1, 0)
    with pytest.raises(NotIndefinite):
        push_lefschetz(BaseDiagram.make([S2, EMPTY], [DEFINITE]), 0, 1)


def test_wrinkle():
    d = BaseDiagram.make([N(2)], [], lefschetz=[1])
    w = wrinkle(d, 0)
    assert w.circles[0].cusps == 3
    assert w.regions[0].fiber == N(4)
    assert total_euler_char(w) == total_euler_char(d)
    with pytest.raises(NoLefschetzPoint):
        wrinkle(BaseDiagram.make([N(2)], []), 0)
    mid = BaseDiagram.make([N(4), N(2), N(4)], [INDEFINITE] * 2, lefschetz=[0, 1, 0])
    with pytest.raises(NotEndRegion):
        wrinkle(mid, 1)


def test_wrinkle_round_trip_at_euler_level():
    d = BaseDiagram.make([N(4), N(2)], [INDEFINITE], lefschetz=[1, 0])
    w = wrinkle(d, 0)
    for _ in range(3):
        w = unsink(w, 0)
    assert total_euler_char(w) == total_euler_char(d)
    assert w.total_lefschetz == 3


def test_invert_fold():
    inward = BaseDiagram.make([S2, N(2)], [INDEFINITE])
    assert inward.circles[0].arrow == INWARD
    inv = invert_fold(inward, 0)
    assert [c.cusps for c in inv.circles] == [3, 3]
    assert total_euler_char(inv) == total_euler_char(inward)
    with pytest.raises(NotInwardIndefinite):
        invert_fold(BaseDiagram.make([N(4), N(2)], [INDEFINITE]), 0)


def test_recenter_is_an_involution():
    d = notall_seed(3)
    assert recenter(recenter(d)) == d
    assert total_euler_char(recenter(d)) == total_euler_char(d)


def test_apply_move_argument_checks():
    d = sblf(N(4), N(2))
    with pytest.raises(ParseError):
        apply_move(d, Move("teleport"))
    with pytest.raises(ParseError):
        apply_move(d, Move("flip", {"circle": 0, "bogus": 1}))
    with pytest.raises(ParseError):
        apply_move(d, Move("cusp_merge", {"i": 0}))
    assert Move.from_json(Move("push_lefschetz", {"from": 1, "to": 0}).to_json()) == Move("push_lefschetz", {"from": 1, "to": 0})


def test_replay_reports_position():
    with pytest.raises(MoveInvalid) as err:
        replay(sblf(N(4), N(2)), [Move("flip", {"circle": 0}), Move("unsink", {"circle": 0})])
    assert err.value.position == 1
    assert isinstance(err.value.cause, UnslippedLoop)


# ---------------------------------------------------------------------------
# random walks: conservation and validity closure
# ---------------------------------------------------------------------------


def _untubes(f):
    """Connected fibers whose tube is ``f``."""
    if not f.connected:
        return []
    s = f.parts[0]
    out = []
    if s.orientable and s.genus >= 1:
        out.append(Sigma(s.genus - 1))
    if not s.orientable:
        if s.genus >= 3:
            out.append(N(s.genus - 2))
        if s.genus % 2 == 0 and s.genus >= 2:
            out.append(Sigma((s.genus - 2) // 2))
    return out


def random_seed(rnd):
    start = rnd.choice([EMPTY, S2, N(1), N(2), N(3), N(4), Sigma(1), Sigma(2)])
    fibers, kinds = [start], []
    for _ in range(rnd.randint(0, 5)):
        cur = fibers[-1]
        options = []
        if cur.is_empty:
            options.append((DEFINITE, S2))
        else:
            if cur.components <= 2:
                options.append((INDEFINITE, tube(cur, rnd.random() < 0.7)))
            options += [(INDEFINITE, f) for f in _untubes(cur)]
            if cur.components == 1:
                options.append((DEFINITE, FiberClass(cur.parts + (SurfaceModel.Sigma(0),))))
            if cur == S2:
                options.append((DEFINITE, EMPTY))
        kind, nxt = rnd.choice(options)
        kinds.append(kind)
        fibers.append(nxt)
    cusps = [rnd.randint(0, 3) if k == INDEFINITE else 0 for k in kinds]
    lef = [0 if f.is_empty else rnd.randint(0, 2) for f in fibers]
    return BaseDiagram.make(fibers, kinds, cusps, lef)


def candidate_moves(d):
    n, r = len(d.circles), len(d.regions)
    out = [Move("recenter"), Move("flip_and_slip")]
    for i in range(n):
        for t in (True, False):
            out += [Move("definite_to_indefinite", {"circle": i, "nonorientable_tube": t}), Move("flip", {"circle": i, "nonorientable_tube": t})]
            out.append(Move("invert_fold", {"circle": i, "nonorientable_tube": t}))
        out += [Move("slip", {"circle": i}), Move("unsink", {"circle": i})]
    for i in range(n - 1):
        out.append(Move("cusp_merge", {"i": i, "j": i + 1}))
    for j in range(r):
        out.append(Move("wrinkle", {"region": j, "nonorientable_tube": j % 2 == 0}))
        for k in (j - 1, j + 1):
            out.append(Move("push_lefschetz", {"from": j, "to": k}))
    return out


def random_legal_move(rnd, d):
    """Pick a move kind uniformly among the applicable kinds, then its arguments."""
    by_name = {}
    for m in candidate_moves(d):
        by_name.setdefault(m.name, []).append(m)
    names = sorted(by_name)
    rnd.shuffle(names)
    for name in names:
        moves = by_name[name]
        rnd.shuffle(moves)
        for m in moves:
            try:
                return m, apply_move(d, m)
            except DiagramError:
                pass
    return None


def check_valid(d):
    # reconstruction re-runs every adjacency check
    assert BaseDiagram.from_json(d.to_json()) == d
    for i, c in enumerate(d.circles):
        a, b = d.regions[i].fiber, d.regions[i + 1].fiber
        assert abs(a.euler_char - b.euler_char) == 2
        if c.definite:
            hi, lo = (a, b) if a.euler_char > b.euler_char else (b, a)
            assert hi.components == lo.components + 1
        assert c.arrow == (INWARD if a.euler_char > b.euler_char else OUTWARD)


def random_walk(rnd, length):
    d = random_seed(rnd)
    chi = total_euler_char(d)
    used = set()
    for _ in range(length):
        step = random_legal_move(rnd, d)
        if step is None:
            break
        m, d = step
        used.add(m.name)
        check_valid(d)
        assert total_euler_char(d) == chi, (m, d.summary())
    return used


def test_conservation_under_random_move_sequences():
    rnd = random.Random(20261014)
    used = set()
    for _ in range(1000):
        used |= random_walk(rnd, rnd.randint(1, 30))
    # every move of the calculus was exercised
    assert used >= {"definite_to_indefinite", "flip", "slip", "cusp_merge", "unsink", "push_lefschetz", "wrinkle", "invert_fold", "recenter", "flip_and_slip"}


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_random_seeds_are_valid(seed):
    check_valid(random_seed(random.Random(seed)))


def test_json_round_trip_with_loops():
    d = flip(sblf(N(4), N(2), 1), 0)
    assert BaseDiagram.from_json(d.to_json()) == d
    with pytest.raises(ParseError):
        BaseDiagram.from_json({"circles": []})


# ---------------------------------------------------------------------------
# worked examples
# ---------------------------------------------------------------------------


def test_s1s3_strategy():
    r = simplify_to_sblf(s1s3_seed())
    assert labels(r.result) == ["N_6", "N_4"]
    assert r.result.regions[0].lefschetz == 6
    assert r.cusp_ledger == (0, 8, 6, 0)
    assert total_euler_char(r.result) == total_euler_char(s1s3_seed()) == 0


def test_s1s3_log_replays():
    r = simplify_to_sblf(s1s3_seed())
    again = simplify_to_sblf(s1s3_seed(), list(r.log))
    assert again.result == r.result
    assert again.cusp_ledger == r.cusp_ledger


@pytest.mark.parametrize("g", range(1, 6))
def test_notall_replay(g):
    r = simplify_to_sblf(notall_seed(g), notall_script(g))
    assert labels(r.result) == [f"N_{2 * g + 4}", f"N_{2 * g + 2}"]
    assert r.result.total_lefschetz == 2 * g + 4
    assert total_euler_char(r.result) == 2 - 2 * g


@pytest.mark.parametrize("g", range(2, 5))
def test_notall_strategy_agrees_with_script(g):
    assert simplify_to_sblf(notall_seed(g)).result == simplify_to_sblf(notall_seed(g), notall_script(g)).result


def test_notall_seed_params():
    with pytest.raises(BadParams):
        notall_seed(0)
    d = notall_seed(3, 2)
    assert total_euler_char(d) == 2 - 2 * 3 + 2 == catalog("notall", 3, 2).euler_char
    assert d.regions[0].lefschetz == 4


def test_normal_form_input_gives_empty_log():
    d = sblf(N(4), N(2), 3)
    r = simplify_to_sblf(d)
    assert r.result == d
    assert r.log == ()


def test_script_must_end_in_normal_form():
    with pytest.raises(StrategyStuck):
        simplify_to_sblf(s1s3_seed(), [Move("definite_to_indefinite", {"circle": 0})])


def test_flip_and_slip_macro():
    d = sblf(N(2), S2)
    once = flip_and_slip(d)
    assert labels(once) == ["N_4", "N_2"]
    assert once.total_lefschetz == 4
    twice = flip_and_slip(once)
    assert labels(twice) == ["N_6", "N_4"]
    assert twice.total_lefschetz == 8
    assert total_euler_char(twice) == total_euler_char(d)
    with pytest.raises(NotSblfNormalForm):
        flip_and_slip(s1s3_seed())


# ---------------------------------------------------------------------------
# trisections
# ---------------------------------------------------------------------------

R2_S1XTS3 = BaseDiagram.make([N(2), S2, EMPTY], [INDEFINITE, DEFINITE])
R2_RP4 = BaseDiagram.make([N(2), S2, EMPTY], [INDEFINITE, DEFINITE], lefschetz=[1, 0, 0])


def beta_sum(h):
    b = invariants(h).z2_betti
    return b[1] + b[2]


TRISECTION_TABLE = [
    ("S1xtS3", R2_S1XTS3, catalog("S1xtS3"), (1, 1)),
    ("RP4", R2_RP4, catalog("RP4"), (2, 1)),
    ("K_2", BaseDiagram.make([N(2)], []), catalog("K", 2), (4, 2)),
    ("N_3", sblf(N(2), S2), catalog("N", 3), (3, 1)),
    ("N'_3", sblf(N(2), S2), catalog("Nprime", 3), (3, 1)),
] + [(f"N_{g}xS2", BaseDiagram.make([N(g)], []), catalog("NxS2", g), (g + 2, g)) for g in range(1, 6)]


@pytest.mark.parametrize("name, d, h, gk", TRISECTION_TABLE, ids=[t[0] for t in TRISECTION_TABLE])
def test_trisection_table(name, d, h, gk):
    t = sblf_to_trisection(d)
    assert (t.params.g, t.params.k) == gk
    assert t.params.euler_char == total_euler_char(d) == h.euler_char
    assert trisection_params(t.diagram) == t.params
    # these are the minimal examples, so the genus bound is sharp
    assert t.params.g == beta_sum(h)


def test_trisection_bound_on_non_minimal_examples():
    s = simplify_to_sblf(s1s3_seed()).result
    t = sblf_to_trisection(s)
    assert (t.params.g, t.params.k) == (13, 5)
    assert t.params.g > beta_sum(catalog("S1xtS3"))
    for g in range(1, 4):
        r = simplify_to_sblf(notall_seed(g), notall_script(g)).result
        p = sblf_to_trisection(r).params
        assert p.euler_char == 2 - 2 * g
        assert p.g > beta_sum(catalog("notall", g, 0))


def test_trisection_rejects_other_states():
    with pytest.raises(NotSblfNormalForm):
        sblf_to_trisection(s1s3_seed())


def test_trisection_to_sblf_params():
    r = trisection_to_sblf_params(1, 1)
    assert (r.higher.label(), r.lower.label(), r.lefschetz) == ("N_6", "N_4", 9)
    assert r.chi_from_trisection == 0
    assert r.chi_from_fibration == 2 - 2 + 3
    assert not r.consistent
    z = trisection_to_sblf_params(0, 0)
    assert (z.higher.label(), z.lower.label(), z.lefschetz) == ("N_4", "N_2", 4)
    with pytest.raises(BadParams):
        trisection_to_sblf_params(1, 2)


def test_spin_and_product():
    r = spin_and_product_trisections(2, 2)
    assert (r.product.g, r.product.k) == (7, 3)
    assert r.minimal
    s = spin_and_product_trisections(1, 1)
    assert (s.spin.g, s.spin.k) == (3, 1)
    assert not spin_and_product_trisections(3, 1).minimal
    with pytest.raises(BadParams):
        spin_and_product_trisections(1, 2)
