"""Torus surgery on formal connected sums.

Everything here is symbolic. An expression is a multiset of summands with
known Euler characteristic and fundamental group. Surgery rules act on that
data and must leave the Euler characteristic alone.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence, Union

from .algebra import (
    FpPresentation,
    Generator,
    Word,
    canonical_cyclic,
    format_word,
    free_product,
    invert,
)
from .errors import PreconditionError


class OrientationReversingLoop(PreconditionError):
    """The loop has no S^1 x D^3 neighbourhood, so it cannot be surgered."""


class AlreadyOrientable(PreconditionError):
    pass


class BadInput(PreconditionError):
    pass


def _group(gens: Sequence[tuple[str, bool]], rels: Sequence[str] = ()) -> FpPresentation:
    return FpPresentation.build(list(gens), list(rels))


# name -> (chi, pi_1, orientable)
STANDARD = {
    "S4": (2, _group([]), True),
    "CP2": (3, _group([]), True),
    "CP2bar": (3, _group([]), True),
    "S2xS2": (4, _group([]), True),
    "S1xS3": (0, _group([("s", False)]), True),
    "S1xtS3": (0, _group([("t", True)]), False),
    "RP4": (1, _group([("t", True)], ["t^2"]), False),
    "S2xRP2": (2, _group([("t", True)], ["t^2"]), False),
}


@dataclass(frozen=True)
class Summand:
    name: str
    chi: int
    pi1: FpPresentation
    orientable: bool
    custom: bool = False

    @classmethod
    def standard(cls, name: str) -> "Summand":
        if name not in STANDARD:
            raise BadInput(f"unknown summand {name!r}")
        chi, g, o = STANDARD[name]
        return cls(name, chi, g, o)

    @classmethod
    def make_custom(cls, name: str, chi: int, pi1: FpPresentation, orientable: Optional[bool] = None) -> "Summand":
        if orientable is None:
            orientable = not any(g.reverses_orientation for g in pi1.generators)
        return cls(name, chi, pi1, orientable, True)

    def to_json(self) -> dict:
        if not self.custom:
            return {"name": self.name}
        return {"name": self.name, "custom": True, "chi": self.chi, "pi1": self.pi1.to_json(), "orientable": self.orientable}

    @classmethod
    def from_json(cls, data: Union[str, dict]) -> "Summand":
        if isinstance(data, str):
            return cls.standard(data)
        if not data.get("custom"):
            return cls.standard(data["name"])
        return cls.make_custom(data["name"], int(data["chi"]), FpPresentation.from_json(data["pi1"]), data.get("orientable"))


@dataclass(frozen=True)
class SumExpression:
    summands: tuple[Summand, ...] = ()
    tags: tuple[str, ...] = ()

    @classmethod
    def of(cls, *names: str) -> "SumExpression":
        return cls(tuple(Summand.standard(n) for n in names))

    @property
    def euler_char(self) -> int:
        if not self.summands:
            return 2
        return sum(s.chi for s in self.summands) - 2 * (len(self.summands) - 1)

    @property
    def orientable(self) -> bool:
        return all(s.orientable for s in self.summands)

    @property
    def pi1(self) -> FpPresentation:
        if not self.summands:
            return _group([])
        return free_product(*(s.pi1 for s in self.summands))

    def counts(self) -> Counter:
        return Counter(s.name for s in self.summands)

    def append(self, *names: str) -> "SumExpression":
        return replace(self, summands=self.summands + tuple(Summand.standard(n) for n in names))

    def __str__(self) -> str:
        if not self.summands:
            return "S4"
        parts = []
        for name, n in sorted(self.counts().items()):
            parts.append(name if n == 1 else f"{n}{name}")
        return " # ".join(parts)

    def to_json(self) -> dict:
        return {"summands": [s.to_json() for s in self.summands], "tags": list(self.tags), "text": str(self), "chi": self.euler_char}

    @classmethod
    def from_json(cls, data: dict) -> "SumExpression":
        return cls(tuple(Summand.from_json(s) for s in data.get("summands", [])), tuple(data.get("tags", [])))


# ---------------------------------------------------------------------------
# rules
# ---------------------------------------------------------------------------


def _as_word(g: FpPresentation, gamma: Union[str, Word, Sequence[tuple[str, int]]]) -> Word:
    if isinstance(gamma, str) or (gamma and isinstance(gamma[0][0], str)):  # type: ignore[index]
        return g.parse_word(gamma)  # type: ignore[arg-type]
    return tuple(gamma)  # type: ignore[arg-type]


def _kill_in_group(g: FpPresentation, gamma: Word) -> FpPresentation:
    if g.word_parity(gamma):
        raise OrientationReversingLoop(f"{format_word(gamma, g.names)} reverses orientation")
    fresh = Generator(g.fresh_name("u"), False)
    return g.with_relators([gamma]).with_generator(fresh)


def kill_loop(e: Union[SumExpression, FpPresentation], gamma) -> Union[SumExpression, FpPresentation]:
    """Surger a torus around a loop: the loop dies and a new free generator appears.

    On an expression the summands collapse into one custom summand carrying
    the new group, and an ``S1xS3`` tag records the created summand.
    """
    if isinstance(e, FpPresentation):
        return _kill_in_group(e, _as_word(e, gamma))
    g = e.pi1
    new = _kill_in_group(g, _as_word(g, gamma))
    chi = e.euler_char
    s = Summand.make_custom(f"surgered({e})", chi, new, e.orientable)
    return SumExpression((s,), e.tags + ("S1xS3",))


def larson_rule(e: SumExpression, variant: str) -> SumExpression:
    """Surgery on an unknotted torus in a 4-ball."""
    if variant == "i0":
        out = e.append("S2xS2", "S1xS3")
    elif variant == "i1":
        out = e.append("CP2", "CP2bar", "S1xS3")
    else:
        raise BadInput(f"unknown Larson variant {variant!r}")
    assert out.euler_char == e.euler_char
    return out


# ---------------------------------------------------------------------------
# standardization
# ---------------------------------------------------------------------------

KILL = "KillLoop"
LARSON_I0 = "LarsonI0"
LARSON_I1 = "LarsonI1"
GENERIC = "Generic"
GOMPF = "GompfStabilization"


@dataclass(frozen=True)
class Step:
    rule: str
    locus: str
    word: Optional[Word] = None

    def to_json(self) -> dict:
        out: dict = {"rule": self.rule, "locus": self.locus}
        if self.word is not None:
            out["word"] = [list(x) for x in self.word]
        return out


@dataclass(frozen=True)
class SurgerySchedule:
    steps: tuple[Step, ...]
    # disjointness of the surgery tori is assumed, not checked
    disjointness_verified: bool = False

    def kills(self) -> list[Step]:
        return [s for s in self.steps if s.rule == KILL]

    def to_json(self) -> dict:
        return {"steps": [s.to_json() for s in self.steps], "disjointness_verified": self.disjointness_verified}


@dataclass(frozen=True)
class ManifoldData:
    pi1: FpPresentation
    chi: int
    cobordism: str  # "rp4" or "s2xrp2"

    def __post_init__(self) -> None:
        if self.cobordism not in ("rp4", "s2xrp2"):
            raise BadInput("cobordism class must be rp4 or s2xrp2")

    @property
    def orientable(self) -> bool:
        return not any(g.reverses_orientation for g in self.pi1.generators)


@dataclass(frozen=True)
class Standardization:
    target: SumExpression
    schedule: SurgerySchedule
    gompf: str = "k >= k0 (k0 not determined)"

    def to_json(self) -> dict:
        return {"target": self.target.to_json(), "schedule": self.schedule.to_json(), "gompf": self.gompf}


def _redundant(g: FpPresentation, w: Word) -> bool:
    c = canonical_cyclic(w)
    return not c or c in g.relators or canonical_cyclic(invert(c)) in g.relators


def _schedule(x: ManifoldData) -> SurgerySchedule:
    g = x.pi1
    rev = [i for i, gen in enumerate(g.generators) if gen.reverses_orientation]
    if not rev:
        raise AlreadyOrientable("every generator preserves orientation")
    names = g.names
    p = rev[0]
    steps = []
    for i, gen in enumerate(g.generators):
        if i == p:
            continue
        w: Word = ((i, 1), (p, -1)) if gen.reverses_orientation else ((i, 1),)
        steps.append(Step(KILL, format_word(w, names), w))
    sq: Word = ((p, 1), (p, 1))
    if not _redundant(g, sq):
        steps.append(Step(KILL, format_word(sq, names), sq))
    steps.append(Step(LARSON_I1, "unknotted torus in a 4-ball"))
    steps.append(Step(GOMPF, "k >= k0 copies, k0 not determined"))
    return SurgerySchedule(tuple(steps))


def identify(e: SumExpression, cobordism: str) -> SumExpression:
    """Name the standard form reached after a schedule.

    Every kill and every Larson torus leaves one ``S1xS3`` summand. The
    CP2-bar summands are those created by Larson tori, and the CP2 count is
    whatever makes the Euler characteristic come out right.
    """
    base = "S2xRP2" if cobordism == "s2xrp2" else "RP4"
    counts = e.counts()
    c = e.tags.count("S1xS3") + counts["S1xS3"]
    bar = counts["CP2bar"]
    total_cp = e.euler_char - STANDARD[base][0] + 2 * c
    d = total_cp - bar
    if d < 0:
        raise BadInput("Euler characteristic too small for the claimed fundamental group")
    return SumExpression.of(base, *["S1xS3"] * c, *["CP2"] * d, *["CP2bar"] * bar)


def replay_schedule(x: ManifoldData, schedule: SurgerySchedule) -> SumExpression:
    e = SumExpression((Summand.make_custom("X", x.chi, x.pi1, False),))
    for s in schedule.steps:
        if s.rule == KILL:
            e = kill_loop(e, s.word)  # type: ignore[assignment]
        elif s.rule == LARSON_I0:
            e = larson_rule(e, "i0")
        elif s.rule == LARSON_I1:
            e = larson_rule(e, "i1")
        # generic and Gompf steps keep the recorded data unchanged
        assert e.euler_char == x.chi  # type: ignore[union-attr]
    return identify(e, x.cobordism)  # type: ignore[arg-type]


def standardize(x: ManifoldData) -> Standardization:
    """Schedule of torus surgeries turning ``x`` into a standard connected sum.

    Orientation-preserving generators are killed, every other reversing
    generator is identified with the first one ``t``, then ``t^2`` is killed
    unless it is already a relator. One Larson torus supplies a CP2 pair.
    """
    if x.orientable:
        raise AlreadyOrientable("input is orientable")
    schedule = _schedule(x)
    target = replay_schedule(x, schedule)
    counts = target.counts()
    assert counts["RP4"] + counts["S2xRP2"] == 1
    assert target.euler_char == x.chi
    return Standardization(target, schedule)


def lickorish_wallace_form(x: Union[ManifoldData, SumExpression]) -> SumExpression:
    """Rewrite CP2-bar summands as CP2, valid once a nonorientable summand is present."""
    e = standardize(x).target if isinstance(x, ManifoldData) else x
    if e.orientable:
        raise AlreadyOrientable("the rewrite needs a nonorientable summand")
    names = ["CP2" if s.name == "CP2bar" else None for s in e.summands]
    out = tuple(Summand.standard("CP2") if n else s for s, n in zip(e.summands, names))
    return replace(e, summands=out)
