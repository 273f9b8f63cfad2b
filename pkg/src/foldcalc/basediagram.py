"""Concentric base diagrams and their move calculus.

A diagram on S^2 is a nested list of fold circles, innermost first, and the
regions between them, also innermost first. Each region carries a fiber
(a possibly empty disjoint union of closed surfaces) and a count of
Lefschetz critical values. Moves rewrite these lists and re-check every
adjacency condition on the way out.

Two bookkeeping devices go beyond the bare picture:

* a flipped circle remembers each flip as a *loop* until a ``slip`` removes
  two of them by spinning the fibers, which adds a tube to every region;
* cusps count toward the Euler characteristic, one each, so that unsinking a
  cusp into a Lefschetz point is conservative.

With these, ``total_euler_char`` is preserved by every move.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Any, Callable, Optional, Sequence

from .errors import ParseError, PreconditionError
from .surface import SurfaceModel


class DiagramError(PreconditionError):
    pass


class InconsistentFibers(DiagramError):
    pass


class NotDefinite(DiagramError):
    pass


class NotIndefinite(DiagramError):
    pass


class NotAdjacent(DiagramError):
    pass


class NoCuspAvailable(DiagramError):
    pass


class NoCusp(DiagramError):
    pass


class DisconnectedFiber(DiagramError):
    pass


class UnslippedLoop(DiagramError):
    pass


class NoAbsorbableEnd(DiagramError):
    pass


class WrongDirection(DiagramError):
    pass


class NoLefschetzPoint(DiagramError):
    pass


class NotEndRegion(DiagramError):
    pass


class NotInwardIndefinite(DiagramError):
    pass


class NotSblfNormalForm(DiagramError):
    pass


class StrategyStuck(DiagramError):
    pass


class BadParams(DiagramError):
    pass


class MoveInvalid(DiagramError):
    def __init__(self, position: int, cause: Exception):
        super().__init__(f"move {position} rejected: {type(cause).__name__}: {cause}")
        self.position = position
        self.cause = cause


# ---------------------------------------------------------------------------
# fibers
# ---------------------------------------------------------------------------


def _key(s: SurfaceModel) -> tuple[int, int]:
    return (0 if s.orientable else 1, s.genus)


def connected_sum(a: SurfaceModel, b: SurfaceModel) -> SurfaceModel:
    if a.orientable and b.orientable:
        return SurfaceModel.Sigma(a.genus + b.genus)
    k = (a.genus if not a.orientable else 2 * a.genus) + (b.genus if not b.orientable else 2 * b.genus)
    return SurfaceModel.N(k)


@dataclass(frozen=True)
class FiberClass:
    parts: tuple[SurfaceModel, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "parts", tuple(sorted(self.parts, key=_key)))

    @classmethod
    def empty(cls) -> "FiberClass":
        return cls(())

    @classmethod
    def of(cls, *parts: SurfaceModel) -> "FiberClass":
        return cls(tuple(parts))

    @property
    def is_empty(self) -> bool:
        return not self.parts

    @property
    def components(self) -> int:
        return len(self.parts)

    @property
    def euler_char(self) -> int:
        return sum(p.euler_char for p in self.parts)

    @property
    def connected(self) -> bool:
        return len(self.parts) == 1

    def label(self) -> str:
        if not self.parts:
            return "empty"
        return " + ".join(p.label() for p in self.parts)

    def to_json(self) -> dict:
        if not self.parts:
            return {"empty": True}
        if len(set(self.parts)) == 1:
            p = self.parts[0]
            return {"orientable": p.orientable, "genus": p.genus, "components": len(self.parts)}
        return {"parts": [p.to_json() for p in self.parts]}

    @classmethod
    def from_json(cls, data: dict) -> "FiberClass":
        try:
            if data.get("empty"):
                return cls.empty()
            if "parts" in data:
                return cls(tuple(SurfaceModel.from_json(p) for p in data["parts"]))
            s = SurfaceModel(bool(data["orientable"]), int(data["genus"]))
            n = int(data.get("components", 1))
            if n < 1:
                raise ValueError("components must be positive")
            return cls((s,) * n)
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise ParseError(f"malformed fiber: {exc}") from exc


EMPTY = FiberClass.empty()
S2 = FiberClass.of(SurfaceModel.Sigma(0))


def N(k: int) -> FiberClass:
    return FiberClass.of(SurfaceModel.N(k))


def Sigma(g: int) -> FiberClass:
    return FiberClass.of(SurfaceModel.Sigma(g))


def tube(f: FiberClass, nonorientable: bool = True) -> FiberClass:
    """Attach one 1-handle to the fiber.

    On two components the tube joins them. On a connected orientable fiber a
    nonorientable tube is a crosscap pair, so ``Sigma_g`` becomes ``N_{2g+2}``.
    """
    if f.components == 2:
        return FiberClass.of(connected_sum(*f.parts))
    if f.components != 1:
        raise InconsistentFibers(f"cannot attach a tube to a fiber with {f.components} components")
    s = f.parts[0]
    if not s.orientable:
        return N(s.genus + 2)
    return N(2 * s.genus + 2) if nonorientable else Sigma(s.genus + 1)


def _is_tube_of(lower: FiberClass, higher: FiberClass) -> bool:
    if lower.is_empty or higher.is_empty or higher.components > 2:
        return False
    return lower in (tube(higher, True), tube(higher, False))


def tube_orientability(lower: FiberClass, higher: FiberClass) -> bool:
    """True when ``lower`` is reached from ``higher`` only by a nonorientable tube."""
    return lower != tube(higher, False)


# ---------------------------------------------------------------------------
# diagrams
# ---------------------------------------------------------------------------

DEFINITE = "definite"
INDEFINITE = "indefinite"
INWARD = "inward"
OUTWARD = "outward"


@dataclass(frozen=True)
class FoldCircle:
    kind: str
    cusps: int = 0
    loops: tuple[bool, ...] = ()
    arrow: str = ""

    def __post_init__(self) -> None:
        if self.kind not in (DEFINITE, INDEFINITE):
            raise InconsistentFibers(f"unknown fold kind {self.kind!r}")
        if self.cusps < 0:
            raise InconsistentFibers("cusp count must be nonnegative")
        if self.kind == DEFINITE and (self.cusps or self.loops):
            raise InconsistentFibers("definite folds carry no cusps")

    @property
    def definite(self) -> bool:
        return self.kind == DEFINITE


@dataclass(frozen=True)
class Region:
    fiber: FiberClass
    lefschetz: int = 0


@dataclass(frozen=True)
class BaseDiagram:
    circles: tuple[FoldCircle, ...]
    regions: tuple[Region, ...]

    def __post_init__(self) -> None:
        if len(self.regions) != len(self.circles) + 1:
            raise InconsistentFibers("need exactly one more region than circles")
        for i, r in enumerate(self.regions):
            if r.lefschetz < 0:
                raise InconsistentFibers("negative Lefschetz count")
            if r.lefschetz and r.fiber.is_empty:
                raise InconsistentFibers(f"region {i} has Lefschetz points over an empty fiber")
        arrows = []
        for i, c in enumerate(self.circles):
            a, b = self.regions[i].fiber, self.regions[i + 1].fiber
            if abs(a.euler_char - b.euler_char) != 2:
                raise InconsistentFibers(f"circle {i}: fiber Euler characteristics must differ by 2")
            hi, lo = (a, b) if a.euler_char > b.euler_char else (b, a)
            if c.definite:
                if FiberClass(lo.parts + (SurfaceModel.Sigma(0),)) != hi:
                    raise InconsistentFibers(f"circle {i}: definite fold must add one sphere")
            elif not _is_tube_of(lo, hi):
                raise InconsistentFibers(f"circle {i}: indefinite fold must attach one tube ({hi.label()} -> {lo.label()})")
            arrows.append(INWARD if a.euler_char > b.euler_char else OUTWARD)
        fixed = tuple(replace(c, arrow=w) for c, w in zip(self.circles, arrows))
        object.__setattr__(self, "circles", fixed)

    # convenience --------------------------------------------------------

    @classmethod
    def make(cls, fibers: Sequence[FiberClass], kinds: Sequence[str], cusps: Sequence[int] | None = None,
             lefschetz: Sequence[int] | None = None) -> "BaseDiagram":
        cusps = cusps or [0] * len(kinds)
        lefschetz = lefschetz or [0] * len(fibers)
        return cls(
            tuple(FoldCircle(k, c) for k, c in zip(kinds, cusps)),
            tuple(Region(f, n) for f, n in zip(fibers, lefschetz)),
        )

    @property
    def fibers(self) -> list[FiberClass]:
        return [r.fiber for r in self.regions]

    @property
    def total_cusps(self) -> int:
        return sum(c.cusps for c in self.circles)

    @property
    def total_lefschetz(self) -> int:
        return sum(r.lefschetz for r in self.regions)

    def summary(self) -> str:
        parts = []
        for i, r in enumerate(self.regions):
            s = r.fiber.label() + (f" [{r.lefschetz}L]" if r.lefschetz else "")
            parts.append(s)
            if i < len(self.circles):
                c = self.circles[i]
                tag = "def" if c.definite else f"ind{c.cusps}c" + ("" if not c.loops else f"{len(c.loops)}l")
                parts.append(f"|{tag},{c.arrow[0]}|")
        return " ".join(parts)

    def to_json(self) -> dict:
        circles = []
        for c in self.circles:
            e: dict = {"kind": c.kind, "cusps": c.cusps, "arrow": c.arrow}
            if c.loops:
                e["loops"] = list(c.loops)
            circles.append(e)
        return {
            "circles": circles,
            "regions": [{"fiber": r.fiber.to_json(), "lefschetz": r.lefschetz} for r in self.regions],
        }

    @classmethod
    def from_json(cls, data: dict) -> "BaseDiagram":
        try:
            circles = tuple(
                FoldCircle(str(c["kind"]), int(c.get("cusps", 0)), tuple(bool(x) for x in c.get("loops", ())))
                for c in data.get("circles", [])
            )
            regions = tuple(
                Region(FiberClass.from_json(r["fiber"]), int(r.get("lefschetz", 0))) for r in data["regions"]
            )
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise ParseError(f"malformed diagram: {exc}") from exc
        return cls(circles, regions)


def total_euler_char(d: BaseDiagram) -> int:
    """Euler characteristic of the total space.

    The annular regions contribute nothing. The disks at the two ends
    contribute their fibers, Lefschetz points and cusps add one each, and each
    unslipped flip loop subtracts two.
    """
    lef = d.total_lefschetz
    if not d.circles:
        return 2 * d.regions[0].fiber.euler_char + lef
    loops = sum(len(c.loops) for c in d.circles)
    return d.regions[0].fiber.euler_char + d.regions[-1].fiber.euler_char + lef + d.total_cusps - 2 * loops


# ---------------------------------------------------------------------------
# moves
# ---------------------------------------------------------------------------


def _circle(d: BaseDiagram, i: int) -> FoldCircle:
    if not 0 <= i < len(d.circles):
        raise NotAdjacent(f"no circle {i}")
    return d.circles[i]


def _sides(d: BaseDiagram, i: int) -> tuple[int, int]:
    """(higher chi region index, lower chi region index) of circle ``i``."""
    a, b = i, i + 1
    return (a, b) if d.regions[a].fiber.euler_char > d.regions[b].fiber.euler_char else (b, a)


def _rebuild(circles: Sequence[FoldCircle], regions: Sequence[Region]) -> BaseDiagram:
    return BaseDiagram(tuple(replace(c, arrow="") for c in circles), tuple(regions))


def _set(seq: Sequence, i: int, value: Any) -> list:
    out = list(seq)
    out[i] = value
    return out


def definite_to_indefinite(d: BaseDiagram, i: int, nonorientable_tube: bool = True) -> BaseDiagram:
    c = _circle(d, i)
    if not c.definite:
        raise NotDefinite(f"circle {i} is indefinite")
    hi, lo = _sides(d, i)
    new_lo = tube(d.regions[hi].fiber, nonorientable_tube)
    regions = _set(d.regions, lo, replace(d.regions[lo], fiber=new_lo))
    return _rebuild(_set(d.circles, i, FoldCircle(INDEFINITE)), regions)


def flip(d: BaseDiagram, i: int, nonorientable_tube: bool = True) -> BaseDiagram:
    c = _circle(d, i)
    if c.definite:
        raise NotIndefinite(f"circle {i} is definite")
    return _rebuild(_set(d.circles, i, replace(c, cusps=c.cusps + 2, loops=c.loops + (nonorientable_tube,))), d.regions)


def slip(d: BaseDiagram, i: int) -> BaseDiagram:
    """Spin two flip loops of circle ``i`` around the sphere.

    Both loops disappear and every fiber picks up one tube.
    """
    c = _circle(d, i)
    if len(c.loops) < 2:
        raise UnslippedLoop(f"circle {i} carries {len(c.loops)} loop(s); a slip needs two")
    if any(x.definite for x in d.circles):
        raise NotIndefinite("slip needs every circle to be indefinite")
    if any(r.fiber.is_empty for r in d.regions):
        raise InconsistentFibers("slip needs every fiber to be nonempty")
    nonor = c.loops[-1] or c.loops[-2]
    circles = _set(d.circles, i, replace(c, loops=c.loops[:-2]))
    regions = [replace(r, fiber=tube(r.fiber, nonor)) for r in d.regions]
    return _rebuild(circles, regions)


def cusp_merge(d: BaseDiagram, i: int, j: int) -> BaseDiagram:
    """Merge two adjacent cusped circles across a connected fiber.

    One end region is absorbed. Its fiber must be the tube of the region
    between the circles, which then becomes the new end.
    """
    i, j = min(i, j), max(i, j)
    _circle(d, i)
    _circle(d, j)
    if j != i + 1:
        raise NotAdjacent(f"circles {i} and {j} are not adjacent")
    ci, cj = d.circles[i], d.circles[j]
    if ci.definite or cj.definite:
        raise NotIndefinite("both circles must be indefinite")
    if ci.cusps < 1 or cj.cusps < 1:
        raise NoCuspAvailable("both circles need a cusp")
    if ci.loops or cj.loops:
        raise UnslippedLoop("slip the flip loops before merging")
    mid = d.regions[j]
    if not mid.fiber.connected:
        raise DisconnectedFiber("the fibers between the circles must be connected")
    target = (tube(mid.fiber, True), tube(mid.fiber, False))
    merged = FoldCircle(INDEFINITE, ci.cusps + cj.cusps - 2)
    regions = list(d.regions)
    circles = list(d.circles)
    if i == 0 and regions[0].fiber in target:
        lef = regions[0].lefschetz
        regions = [replace(mid, lefschetz=mid.lefschetz + lef)] + regions[2:]
        circles = [merged] + circles[2:]
    elif j == len(circles) - 1 and regions[-1].fiber in target:
        lef = regions[-1].lefschetz
        regions = regions[:-2] + [replace(mid, lefschetz=mid.lefschetz + lef)]
        circles = circles[:-2] + [merged]
    else:
        raise NoAbsorbableEnd("neither neighbouring end region is the tube of the middle fiber")
    return _rebuild(circles, regions)


def unsink(d: BaseDiagram, i: int) -> BaseDiagram:
    c = _circle(d, i)
    if c.definite or c.cusps < 1:
        raise NoCusp(f"circle {i} has no cusp to unsink")
    if c.loops:
        raise UnslippedLoop("slip the flip loops before unsinking")
    _, lo = _sides(d, i)
    regions = _set(d.regions, lo, replace(d.regions[lo], lefschetz=d.regions[lo].lefschetz + 1))
    return _rebuild(_set(d.circles, i, replace(c, cusps=c.cusps - 1)), regions)


def push_lefschetz(d: BaseDiagram, src: int, dst: int) -> BaseDiagram:
    if not (0 <= src < len(d.regions) and 0 <= dst < len(d.regions)) or abs(src - dst) != 1:
        raise NotAdjacent("regions must be adjacent")
    if d.circles[min(src, dst)].definite:
        raise NotIndefinite("points cross indefinite folds only")
    if d.regions[dst].fiber.euler_char >= d.regions[src].fiber.euler_char:
        raise WrongDirection("Lefschetz points move toward the higher genus side")
    if d.regions[src].lefschetz < 1:
        raise NoLefschetzPoint(f"region {src} has no Lefschetz point")
    regions = list(d.regions)
    regions[src] = replace(regions[src], lefschetz=regions[src].lefschetz - 1)
    regions[dst] = replace(regions[dst], lefschetz=regions[dst].lefschetz + 1)
    return _rebuild(d.circles, regions)


def wrinkle(d: BaseDiagram, region: int, nonorientable_tube: bool = True) -> BaseDiagram:
    """Trade a Lefschetz point in an end region for a circle with three cusps."""
    last = len(d.regions) - 1
    if not 0 <= region <= last:
        raise NotEndRegion(f"no region {region}")
    r = d.regions[region]
    if r.lefschetz < 1:
        raise NoLefschetzPoint(f"region {region} has no Lefschetz point")
    if region not in (0, last):
        raise NotEndRegion("only an end region can hold the new disk")
    new = Region(tube(r.fiber, nonorientable_tube))
    old = replace(r, lefschetz=r.lefschetz - 1)
    circle = FoldCircle(INDEFINITE, 3)
    if region == 0:
        return _rebuild([circle] + list(d.circles), [new, old] + list(d.regions[1:]))
    return _rebuild(list(d.circles) + [circle], list(d.regions[:-1]) + [old, new])


def invert_fold(d: BaseDiagram, i: int, nonorientable_tube: bool = True) -> BaseDiagram:
    """Replace an inward cuspless indefinite fold by two outward ones with three cusps."""
    c = _circle(d, i)
    if c.definite or c.arrow != INWARD or c.cusps or c.loops:
        raise NotInwardIndefinite(f"circle {i} is not an inward cuspless indefinite fold")
    t = nonorientable_tube
    outer = d.regions[i + 1].fiber
    mid = tube(outer, t)
    inner = tube(mid, t)
    regions = [replace(r, fiber=tube(tube(tube(r.fiber, t), t), t)) for r in d.regions[:i]]
    regions += [replace(d.regions[i], fiber=inner), Region(mid)] + list(d.regions[i + 1 :])
    circles = list(d.circles[:i]) + [FoldCircle(INDEFINITE, 3), FoldCircle(INDEFINITE, 3)] + list(d.circles[i + 1 :])
    return _rebuild(circles, regions)


def recenter(d: BaseDiagram) -> BaseDiagram:
    """Move the center of the picture to the other pole."""
    return _rebuild(list(reversed(d.circles)), list(reversed(d.regions)))


def is_sblf_normal_form(d: BaseDiagram) -> bool:
    if len(d.circles) > 1 or any(r.fiber.components != 1 for r in d.regions):
        return False
    if not d.circles:
        return True
    c = d.circles[0]
    if c.definite or c.cusps or c.loops:
        return False
    hi, _ = _sides(d, 0)
    return d.regions[hi].lefschetz == 0


def flip_and_slip(d: BaseDiagram) -> BaseDiagram:
    """Raise the higher genus by two, trading the new cusps for four Lefschetz points."""
    if not is_sblf_normal_form(d) or len(d.circles) != 1:
        raise NotSblfNormalForm("flip-and-slip needs a single cuspless indefinite fold")
    for m in flip_and_slip_script():
        d = apply_move(d, m)
    return d


def flip_and_slip_script(circle: int = 0) -> list["Move"]:
    return [Move("flip", {"circle": circle}), Move("flip", {"circle": circle}), Move("slip", {"circle": circle})] + [
        Move("unsink", {"circle": circle})
    ] * 4


# ---------------------------------------------------------------------------
# move scripts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Move:
    name: str
    args: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"move": self.name, **self.args}

    @classmethod
    def from_json(cls, data: dict) -> "Move":
        if not isinstance(data, dict) or "move" not in data:
            raise ParseError("a move needs a 'move' key")
        args = {k: v for k, v in data.items() if k != "move"}
        return cls(str(data["move"]), args)

    def __hash__(self) -> int:
        return hash((self.name, tuple(sorted(self.args.items()))))


_MOVES: dict[str, tuple[Callable[..., BaseDiagram], tuple[str, ...]]] = {
    "definite_to_indefinite": (definite_to_indefinite, ("circle", "nonorientable_tube")),
    "flip": (flip, ("circle", "nonorientable_tube")),
    "slip": (slip, ("circle",)),
    "cusp_merge": (cusp_merge, ("i", "j")),
    "unsink": (unsink, ("circle",)),
    "push_lefschetz": (push_lefschetz, ("from", "to")),
    "wrinkle": (wrinkle, ("region", "nonorientable_tube")),
    "invert_fold": (invert_fold, ("circle", "nonorientable_tube")),
    "recenter": (recenter, ()),
    "flip_and_slip": (flip_and_slip, ()),
}

MOVE_NAMES = tuple(_MOVES)


def apply_move(d: BaseDiagram, m: Move) -> BaseDiagram:
    if m.name not in _MOVES:
        raise ParseError(f"unknown move {m.name!r}")
    fn, params = _MOVES[m.name]
    unknown = set(m.args) - set(params)
    if unknown:
        raise ParseError(f"move {m.name} does not take {sorted(unknown)}")
    args = [m.args[p] for p in params if p in m.args]
    if len(args) < len([p for p in params if p != "nonorientable_tube"]):
        raise ParseError(f"move {m.name} needs {list(params)}")
    return fn(d, *args)


def replay(d: BaseDiagram, script: Sequence[Move]) -> tuple[BaseDiagram, list[BaseDiagram]]:
    states = [d]
    for pos, m in enumerate(script):
        try:
            d = apply_move(d, m)
        except DiagramError as exc:
            raise MoveInvalid(pos, exc) from exc
        states.append(d)
    return d, states


# ---------------------------------------------------------------------------
# strategy
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SimplifyResult:
    result: BaseDiagram
    log: tuple[Move, ...]
    cusp_ledger: tuple[int, ...]

    def to_json(self) -> dict:
        return {
            "result": self.result.to_json(),
            "log": [m.to_json() for m in self.log],
            "cusp_ledger": list(self.cusp_ledger),
        }


class _Runner:
    def __init__(self, d: BaseDiagram):
        self.d = d
        self.log: list[Move] = []
        self.states = [d]

    def do(self, name: str, **args: Any) -> None:
        m = Move(name, args)
        try:
            self.d = apply_move(self.d, m)
        except DiagramError as exc:
            raise StrategyStuck(f"step {len(self.log)} ({name} {args}) failed: {exc}") from exc
        self.log.append(m)
        self.states.append(self.d)


def _push_all(run: _Runner) -> None:
    if len(run.d.circles) != 1:
        return
    hi, lo = _sides(run.d, 0)
    for _ in range(run.d.regions[hi].lefschetz):
        run.do("push_lefschetz", **{"from": hi, "to": lo})


def simplify_to_sblf(d: BaseDiagram, script: Optional[Sequence[Move]] = None) -> SimplifyResult:
    """Homotope a concentric diagram into SBLF normal form.

    With a script, the moves are replayed and the result must be in normal
    form. Without one, definite folds become indefinite, every circle is
    flipped twice and slipped, circles are merged from the center out, and
    the remaining cusps are unsunk. The higher genus side is put in the
    center.
    """
    if script is not None:
        result, states = replay(d, script)
        if not is_sblf_normal_form(result):
            raise StrategyStuck("the script does not end in SBLF normal form")
        return SimplifyResult(result, tuple(script), cusp_ledger(states, script))

    if is_sblf_normal_form(d):
        return SimplifyResult(d, (), (d.total_cusps,))
    run = _Runner(d)
    for i, c in enumerate(d.circles):
        if c.definite:
            run.do("definite_to_indefinite", circle=i, nonorientable_tube=True)
    if len(run.d.circles) > 1:
        for i in range(len(run.d.circles)):
            run.do("flip", circle=i, nonorientable_tube=True)
            run.do("flip", circle=i, nonorientable_tube=True)
            run.do("slip", circle=i)
    for i, c in enumerate(run.d.circles):
        while len(run.d.circles[i].loops) >= 2:
            run.do("slip", circle=i)
        if run.d.circles[i].loops:
            run.do("flip", circle=i, nonorientable_tube=True)
            run.do("slip", circle=i)
    while len(run.d.circles) > 1:
        try:
            apply_move(run.d, Move("cusp_merge", {"i": 0, "j": 1}))
            run.do("cusp_merge", i=0, j=1)
        except DiagramError:
            n = len(run.d.circles)
            run.do("cusp_merge", i=n - 2, j=n - 1)
    if run.d.circles:
        while run.d.circles[0].cusps:
            run.do("unsink", circle=0)
        _push_all(run)
        hi, lo = _sides(run.d, 0)
        if lo != 0:
            run.do("recenter")
    if not is_sblf_normal_form(run.d):
        raise StrategyStuck("strategy finished outside SBLF normal form")
    return SimplifyResult(run.d, tuple(run.log), cusp_ledger(run.states, run.log))


def cusp_ledger(states: Sequence[BaseDiagram], log: Sequence[Move]) -> tuple[int, ...]:
    """Total cusps at the start and after each run of like moves.

    Flips and slips count as one kind of move. Repeated values are dropped.
    """
    group = {"slip": "flip"}
    out = [states[0].total_cusps]
    for pos, m in enumerate(log):
        nxt = log[pos + 1].name if pos + 1 < len(log) else None
        if nxt is None or group.get(nxt, nxt) != group.get(m.name, m.name):
            v = states[pos + 1].total_cusps
            if v != out[-1]:
                out.append(v)
    return tuple(out)


# ---------------------------------------------------------------------------
# worked-example seeds and scripts
# ---------------------------------------------------------------------------


def s1s3_seed() -> BaseDiagram:
    """Two definite folds bounding an annulus of sphere fibers."""
    return BaseDiagram.make([EMPTY, S2, EMPTY], [DEFINITE, DEFINITE])


def notall_seed(g: int, blowups: int = 0) -> BaseDiagram:
    """Directed fibration with ``g`` outward folds from ``N_{2g+2}`` in the center to tori."""
    if g < 1 or not 0 <= blowups <= g:
        raise BadParams("need g >= 1 and 0 <= blowups <= g")
    fibers = [N(2 * g + 2 - 2 * j) for j in range(g)] + [Sigma(1)]
    lef = [2 + blowups] + [0] * g
    return BaseDiagram.make(fibers, [INDEFINITE] * g, lefschetz=lef)


def notall_script(g: int) -> list[Move]:
    """Flip every circle twice and slip, merge from the center, unsink."""
    script: list[Move] = []
    for i in range(g):
        script += [Move("flip", {"circle": i}), Move("flip", {"circle": i}), Move("slip", {"circle": i})]
    script += [Move("cusp_merge", {"i": 0, "j": 1})] * (g - 1)
    script += [Move("unsink", {"circle": 0})] * (2 * g + 2)
    return script


# ---------------------------------------------------------------------------
# trisections
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TrisectionParams:
    g: int
    k: int

    def __post_init__(self) -> None:
        if not 0 <= self.k <= self.g:
            raise BadParams("need g >= k >= 0")

    @property
    def euler_char(self) -> int:
        return 2 + self.g - 3 * self.k

    def to_json(self) -> dict:
        return {"g": self.g, "k": self.k}


def is_trisection_state(d: BaseDiagram) -> bool:
    if not d.circles or d.total_lefschetz:
        return False
    last = d.circles[-1]
    if not last.definite or d.regions[-1].fiber != EMPTY or d.regions[-2].fiber != S2:
        return False
    for c in d.circles[:-1]:
        if c.definite or c.arrow != OUTWARD or c.cusps not in (0, 3) or c.loops:
            return False
    return True


def trisection_params(d: BaseDiagram) -> TrisectionParams:
    if not is_trisection_state(d):
        raise NotSblfNormalForm("diagram is not a simplified trisection diagram")
    ind = d.circles[:-1]
    return TrisectionParams(len(ind), sum(1 for c in ind if c.cusps == 0))


def _ladder(top: SurfaceModel) -> list[FiberClass]:
    """Fibers from ``top`` down to S^2, removing one tube at a time."""
    out = [FiberClass.of(top)]
    s = top
    while not (s.orientable and s.genus == 0):
        if s.orientable:
            s = SurfaceModel.Sigma(s.genus - 1)
        elif s.genus == 2:
            s = SurfaceModel.Sigma(0)
        elif s.genus > 2:
            s = SurfaceModel.N(s.genus - 2)
        else:
            raise NotSblfNormalForm("odd nonorientable genus has no tube ladder to S^2")
        out.append(FiberClass.of(s))
    return out


def _r2_map(d: BaseDiagram) -> BaseDiagram:
    """Refiber so the map lands in R^2: both fibers over a central disk, a
    joining fold, a ladder of outward folds down to S^2 and a definite fold."""
    if not d.circles:
        f = d.regions[0].fiber
        plus, minus, lef = f.parts[0], f.parts[0], d.regions[0].lefschetz
    else:
        hi, lo = _sides(d, 0)
        plus, minus = d.regions[lo].fiber.parts[0], d.regions[hi].fiber.parts[0]
        lef = d.regions[lo].lefschetz
    ladder = _ladder(connected_sum(plus, minus))
    fibers = [FiberClass.of(plus, minus)] + ladder + [EMPTY]
    kinds = [INDEFINITE] * len(ladder) + [DEFINITE]
    lefs = [lef] + [0] * (len(fibers) - 1)
    return BaseDiagram.make(fibers, kinds, lefschetz=lefs)


def _is_r2_map(d: BaseDiagram) -> bool:
    return bool(d.circles) and d.circles[-1].definite and d.regions[-1].fiber == EMPTY


@dataclass(frozen=True)
class TrisectionResult:
    diagram: BaseDiagram
    params: TrisectionParams
    log: tuple[Move, ...]

    def to_json(self) -> dict:
        return {"diagram": self.diagram.to_json(), "params": self.params.to_json(), "log": [m.to_json() for m in self.log]}


def sblf_to_trisection(d: BaseDiagram) -> TrisectionResult:
    """Turn an SBLF (or a map already landing in a disk) into a simplified
    trisection map: invert the inward cuspless fold, collect Lefschetz
    points in the center and wrinkle each one."""
    if is_sblf_normal_form(d):
        d = _r2_map(d)
    elif not _is_r2_map(d):
        raise NotSblfNormalForm("expected SBLF normal form or a map with an outer definite fold")
    run = _Runner(d)
    i = 0
    while i < len(run.d.circles):
        c = run.d.circles[i]
        if not c.definite and c.arrow == INWARD and not c.cusps and not c.loops:
            run.do("invert_fold", circle=i)
        i += 1
    while run.d.total_lefschetz:
        for r in range(1, len(run.d.regions)):
            for _ in range(run.d.regions[r].lefschetz):
                for s in range(r, 0, -1):
                    run.do("push_lefschetz", **{"from": s, "to": s - 1})
        run.do("wrinkle", region=0)
    return TrisectionResult(run.d, trisection_params(run.d), tuple(run.log))


@dataclass(frozen=True)
class SblfFromTrisection:
    higher: SurfaceModel
    lower: SurfaceModel
    lefschetz: int
    chi_from_fibration: int
    chi_from_trisection: int

    @property
    def consistent(self) -> bool:
        return self.chi_from_fibration == self.chi_from_trisection

    def to_json(self) -> dict:
        return {
            "higher": self.higher.to_json(),
            "lower": self.lower.to_json(),
            "lefschetz": self.lefschetz,
            "chi_from_fibration": self.chi_from_fibration,
            "chi_from_trisection": self.chi_from_trisection,
            "consistent": self.consistent,
        }


def trisection_to_sblf_params(g: int, k: int) -> SblfFromTrisection:
    """Fiber pair and point count for the reverse conversion, with both
    Euler characteristic readings reported side by side."""
    if not 0 <= k <= g:
        raise BadParams("need g >= k >= 0")
    hi, lo, n = SurfaceModel.N(2 * g + 4), SurfaceModel.N(2 * g + 2), 2 * g + 3 * k + 4
    return SblfFromTrisection(hi, lo, n, hi.euler_char + lo.euler_char + n, 2 + g - 3 * k)


@dataclass(frozen=True)
class SpinProductTrisections:
    product: TrisectionParams
    spin: TrisectionParams
    minimal: bool

    def to_json(self) -> dict:
        return {"product": self.product.to_json(), "spin": self.spin.to_json(), "minimal": self.minimal}


def spin_and_product_trisections(m: int, b: int) -> SpinProductTrisections:
    """Trisections of ``S^1 x Y`` and of the spun manifold for a 3-manifold
    ``Y`` with a genus ``m`` Heegaard splitting and ``beta_1(Y; Z2) = b``."""
    if b < 0 or m < b:
        raise BadParams("need m >= b >= 0")
    return SpinProductTrisections(TrisectionParams(3 * m + 1, m + 1), TrisectionParams(3 * m, m), m == b)
