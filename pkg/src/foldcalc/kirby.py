"""Combinatorial Kirby diagrams of (mostly closed) 4-manifolds.

A diagram is a handle inventory plus, for every 2-handle, the cyclic word it
traces through the 1-handles. That is exactly the data needed for the
fundamental group, the orientation character, the Euler characteristic and
the mod 2 Betti numbers. Linking and planar data are deliberately absent, so
framings are stored only as labels.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

from .algebra import (
    AbelianInvariants,
    FpPresentation,
    Generator,
    abelianization,
    index2_subgroup,
    parse_word_string,
    rank_mod2,
    z2_first_betti,
)
from .errors import ParseError, PreconditionError


class PropositionHypothesisViolated(PreconditionError):
    """The lifting algorithm needs one 0-handle and one twisted 1-handle."""


class PatternNotRecognized(PreconditionError):
    pass


class UnknownName(PreconditionError):
    pass


class BadParams(PreconditionError):
    pass


class MalformedDiagram(PreconditionError):
    pass


@dataclass(frozen=True)
class OneHandle:
    twisted: bool
    name: str
    ends: tuple[int, int] = (0, 0)


@dataclass(frozen=True)
class TwoHandle:
    word: tuple[tuple[int, int], ...]
    framings: tuple[int, ...] = (0,)


@dataclass(frozen=True)
class HandleDecomposition:
    zero_handles: int
    one_handles: tuple[OneHandle, ...]
    two_handles: tuple[TwoHandle, ...]
    three_untwisted: int = 0
    three_twisted: int = 0
    four_handles: int = 1
    closed: bool = True
    label: str = ""

    def __post_init__(self) -> None:
        if self.zero_handles < 1:
            raise MalformedDiagram("at least one 0-handle is required")
        n = len(self.one_handles)
        for h in self.one_handles:
            if not all(0 <= e < self.zero_handles for e in h.ends):
                raise MalformedDiagram(f"1-handle {h.name} attaches to a missing 0-handle")
        for t in self.two_handles:
            if any(not 0 <= g < n or s not in (1, -1) for g, s in t.word):
                raise MalformedDiagram("2-handle letter references an undeclared 1-handle")
        if len({h.name for h in self.one_handles}) != n:
            raise MalformedDiagram("1-handle names must be distinct")

    @property
    def euler_char(self) -> int:
        h3 = self.three_untwisted + self.three_twisted
        return self.zero_handles - len(self.one_handles) + len(self.two_handles) - h3 + self.four_handles

    @property
    def names(self) -> list[str]:
        return [h.name for h in self.one_handles]

    def twisted_count(self) -> int:
        return sum(h.twisted for h in self.one_handles)

    # serialization ----------------------------------------------------------

    def to_json(self) -> dict:
        names = self.names
        h1 = []
        for h in self.one_handles:
            entry: dict = {"twisted": h.twisted, "name": h.name}
            if h.ends != (0, 0):
                entry["ends"] = list(h.ends)
            h1.append(entry)
        out = {
            "h0": self.zero_handles,
            "h1": h1,
            "h2": [{"word": [[names[g], s] for g, s in t.word], "framings": list(t.framings)} for t in self.two_handles],
            "h3": {"untwisted": self.three_untwisted, "twisted": self.three_twisted},
            "h4": self.four_handles,
        }
        if not self.closed:
            out["closed"] = False
        if self.label:
            out["label"] = self.label
        return out

    @classmethod
    def from_json(cls, data: dict) -> "HandleDecomposition":
        try:
            ones = []
            for i, e in enumerate(data.get("h1", [])):
                ends = tuple(int(x) for x in e.get("ends", (0, 0)))
                ones.append(OneHandle(bool(e["twisted"]), str(e.get("name", f"x{i}")), ends))  # type: ignore[arg-type]
            index = {h.name: i for i, h in enumerate(ones)}
            twos = []
            for t in data.get("h2", []):
                raw = t.get("word", [])
                pairs = parse_word_string(raw) if isinstance(raw, str) else [(str(n), int(s)) for n, s in raw]
                word = []
                for name, e in pairs:
                    if name not in index:
                        raise ParseError(f"2-handle letter {name!r} is not a 1-handle")
                    word.extend([(index[name], 1 if e > 0 else -1)] * abs(e))
                twos.append(TwoHandle(tuple(word), tuple(int(f) for f in t.get("framings", [0]))))
            h3 = data.get("h3", {})
            return cls(
                int(data.get("h0", 1)),
                tuple(ones),
                tuple(twos),
                int(h3.get("untwisted", 0)),
                int(h3.get("twisted", 0)),
                int(data.get("h4", 1)),
                bool(data.get("closed", True)),
                str(data.get("label", "")),
            )
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise ParseError(f"malformed diagram: {exc}") from exc


@dataclass(frozen=True)
class ManifoldInvariants:
    euler_char: int
    pi1: FpPresentation
    h1: AbelianInvariants
    z2_betti: tuple[int, int, int, int, int]
    orientable: bool

    def to_json(self) -> dict:
        return {
            "euler_char": self.euler_char,
            "pi1": self.pi1.to_json(),
            "h1": self.h1.to_json(),
            "h1_text": str(self.h1),
            "z2_betti": list(self.z2_betti),
            "orientable": self.orientable,
        }


# ---------------------------------------------------------------------------
# invariants
# ---------------------------------------------------------------------------


def _spanning_tree(h: HandleDecomposition) -> tuple[set[int], dict[int, int]]:
    """Tree edges and the twisted parity of the tree path from 0-handle 0."""
    parity = {0: 0}
    tree: set[int] = set()
    grew = True
    while grew:
        grew = False
        for idx, e in enumerate(h.one_handles):
            i, j = e.ends
            if (i in parity) != (j in parity):
                known, new = (i, j) if i in parity else (j, i)
                parity[new] = parity[known] ^ int(e.twisted)
                tree.add(idx)
                grew = True
    if len(parity) != h.zero_handles:
        raise MalformedDiagram("the 1-skeleton is disconnected")
    return tree, parity


def _check_closed_paths(h: HandleDecomposition) -> None:
    for t in h.two_handles:
        if not t.word:
            continue
        pos = None
        start = None
        for g, s in t.word:
            a, b = h.one_handles[g].ends
            src, dst = (a, b) if s == 1 else (b, a)
            if pos is None:
                start = src
            elif pos != src:
                raise MalformedDiagram("2-handle word does not trace a path in the 1-skeleton")
            pos = dst
        if pos != start:
            raise MalformedDiagram("2-handle word does not close up")


def fundamental_group(h: HandleDecomposition) -> FpPresentation:
    _check_closed_paths(h)
    tree, parity = _spanning_tree(h)
    gens: list[Generator] = []
    remap: dict[int, int] = {}
    for idx, e in enumerate(h.one_handles):
        if idx in tree:
            continue
        i, j = e.ends
        w = parity[i] ^ int(e.twisted) ^ parity[j]
        remap[idx] = len(gens)
        gens.append(Generator(e.name, bool(w)))
    rels = []
    for t in h.two_handles:
        rels.append(tuple((remap[g], s) for g, s in t.word if g in remap))
    g = FpPresentation(tuple(gens), tuple(rels))
    for t in h.two_handles:
        twisted = sum(1 for x, _ in t.word if h.one_handles[x].twisted)
        if h.zero_handles == 1 and twisted % 2:
            raise MalformedDiagram("a 2-handle runs an odd number of times over twisted 1-handles")
    return g


def _betti_open(h: HandleDecomposition) -> tuple[int, int, int, int, int]:
    if h.three_untwisted or h.three_twisted or h.four_handles:
        raise MalformedDiagram("open diagrams are limited to handles of index at most 2")
    d1 = []
    for e in h.one_handles:
        row = [0] * h.zero_handles
        i, j = e.ends
        if i != j:
            row[i] = row[j] = 1
        d1.append(row)
    d2 = []
    for t in h.two_handles:
        row = [0] * len(h.one_handles)
        for g, _ in t.word:
            row[g] += 1
        d2.append(row)
    r1 = rank_mod2(d1)
    r2 = rank_mod2(d2)
    return (h.zero_handles - r1, len(h.one_handles) - r1 - r2, len(h.two_handles) - r2, 0, 0)


def invariants(h: HandleDecomposition) -> ManifoldInvariants:
    """Euler characteristic, pi_1, H_1 and mod 2 Betti numbers.

    For closed diagrams the Betti numbers use mod 2 Poincare duality,
    ``b2 = chi - 2 + 2 b1``. Open 2-handlebodies use the cellular chain
    complex mod 2 directly.
    """
    pi1 = fundamental_group(h)
    chi = h.euler_char
    if h.closed:
        b1 = z2_first_betti(pi1)
        betti = (1, b1, chi - 2 + 2 * b1, b1, 1)
    else:
        betti = _betti_open(h)
    orientable = not any(g.reverses_orientation for g in pi1.generators)
    return ManifoldInvariants(chi, pi1, abelianization(pi1), betti, orientable)  # type: ignore[arg-type]


# ---------------------------------------------------------------------------
# double covers
# ---------------------------------------------------------------------------


def _lift_word(h: HandleDecomposition, word: Sequence[tuple[int, int]], start: int) -> tuple[tuple[int, int], ...]:
    n = len(h.one_handles)
    sheet = start
    out = []
    for g, s in word:
        if not h.one_handles[g].twisted:
            out.append((sheet * n + g, s))
        elif s == 1:
            out.append((sheet * n + g, 1))
            sheet ^= 1
        else:
            # the copy ending on the current sheet starts on the other one
            sheet ^= 1
            out.append((sheet * n + g, -1))
    if sheet != start:
        raise PropositionHypothesisViolated("a 2-handle lift does not close up on its sheet")
    return tuple(out)


def double_cover(h: HandleDecomposition, strict: bool = True) -> HandleDecomposition:
    """Orientation double cover drawn on two 0-handles.

    Each untwisted 1-handle gets one copy per sheet. Each twisted 1-handle
    gets two copies running between the sheets. Every 2-handle lifts to two
    copies by switching sheets at twisted letters. The lift starting on the
    second sheet has its framing labels negated, as that half of the picture
    is mirrored. Higher handles are duplicated per sheet.

    ``strict`` enforces a single twisted 1-handle. Without it any number of
    twisted 1-handles is allowed; the rule above is unchanged.
    """
    if h.zero_handles != 1:
        raise PropositionHypothesisViolated("exactly one 0-handle is required")
    tw = h.twisted_count()
    if strict and tw != 1:
        raise PropositionHypothesisViolated(f"exactly one twisted 1-handle is required, found {tw}")
    if tw == 0:
        raise PropositionHypothesisViolated("no twisted 1-handle, so the diagram is orientable")
    ones = []
    for sheet in (0, 1):
        for e in h.one_handles:
            ends = (sheet, 1 - sheet) if e.twisted else (sheet, sheet)
            ones.append(OneHandle(False, f"{e.name}_{sheet + 1}", ends))
    twos = []
    for sheet in (0, 1):
        sign = 1 if sheet == 0 else -1
        for t in h.two_handles:
            twos.append(TwoHandle(_lift_word(h, t.word, sheet), tuple(sign * f for f in t.framings)))
    return HandleDecomposition(
        2,
        tuple(ones),
        tuple(twos),
        2 * (h.three_untwisted + h.three_twisted),
        0,
        2 * h.four_handles,
        h.closed,
        f"cover({h.label})" if h.label else "cover",
    )


def verify_double_cover(base: HandleDecomposition, cover: HandleDecomposition) -> bool:
    """Compare the cover's H_1 with the Reidemeister-Schreier kernel, and chi."""
    expected = abelianization(index2_subgroup(fundamental_group(base)))
    got = abelianization(fundamental_group(cover))
    return got == expected and cover.euler_char == 2 * base.euler_char


# ---------------------------------------------------------------------------
# blow-ups and blow-downs
# ---------------------------------------------------------------------------


def _drop_two_handle(h: HandleDecomposition, index: int) -> HandleDecomposition:
    twos = h.two_handles[:index] + h.two_handles[index + 1 :]
    return replace(h, two_handles=twos, label=f"blowdown({h.label})" if h.label else "")


def _checked(h: HandleDecomposition, index: int) -> TwoHandle:
    if not 0 <= index < len(h.two_handles):
        raise PatternNotRecognized(f"no 2-handle at index {index}")
    return h.two_handles[index]


def blow_down_orientable(h: HandleDecomposition, index: int) -> HandleDecomposition:
    """Remove a split unknot with framing +-1 (a CP2 or CP2-bar summand)."""
    t = _checked(h, index)
    if t.word or len(t.framings) != 1 or abs(t.framings[0]) != 1:
        raise PatternNotRecognized("expected an empty word with framing +1 or -1")
    return _drop_two_handle(h, index)


def blow_down_nonorientable(h: HandleDecomposition, index: int) -> HandleDecomposition:
    """Remove a 2-handle running twice over one twisted 1-handle with odd framing.

    The RP4 summand it belongs to becomes a twisted S1 x S3 summand.
    """
    t = _checked(h, index)
    ok = (
        len(t.word) == 2
        and t.word[0] == t.word[1]
        and h.one_handles[t.word[0][0]].twisted
        and t.framings
        and all(f % 2 for f in t.framings)
    )
    if not ok:
        raise PatternNotRecognized("expected the word t^2 over a twisted 1-handle with odd framing")
    return _drop_two_handle(h, index)


def blow_up_orientable(h: HandleDecomposition, sign: int = 1) -> HandleDecomposition:
    return replace(h, two_handles=h.two_handles + (TwoHandle((), (1 if sign > 0 else -1,)),))


def blow_up_nonorientable(h: HandleDecomposition) -> HandleDecomposition:
    """Connected sum with the standard RP4 diagram."""
    name = "e"
    i = 1
    taken = set(h.names)
    while f"{name}{i}" in taken:
        i += 1
    t = len(h.one_handles)
    return replace(
        h,
        one_handles=h.one_handles + (OneHandle(True, f"{name}{i}"),),
        two_handles=h.two_handles + (TwoHandle(((t, 1), (t, 1)), (1,)),),
        three_twisted=h.three_twisted + 1,
    )


# ---------------------------------------------------------------------------
# catalog
# ---------------------------------------------------------------------------


def _diagram(
    handles: Sequence[tuple[str, bool]],
    words: Sequence[tuple[str, Sequence[int]]],
    h3: tuple[int, int],
    h4: int = 1,
    closed: bool = True,
    label: str = "",
) -> HandleDecomposition:
    ones = tuple(OneHandle(tw, name) for name, tw in handles)
    index = {name: i for i, (name, _) in enumerate(handles)}
    twos = []
    for text, framings in words:
        word = []
        for name, e in parse_word_string(text) if text.strip() else []:
            word.extend([(index[name], 1 if e > 0 else -1)] * abs(e))
        twos.append(TwoHandle(tuple(word), tuple(framings)))
    return HandleDecomposition(1, ones, tuple(twos), h3[0], h3[1], h4, closed, label)


KLEIN = [("a", True), ("b", False)]
KLEIN_FIBER = "a b a^-1 b"


def _power(letter: str, e: int) -> str:
    return f"{letter}^{e}" if e else ""


def _nonneg(*xs: int) -> None:
    if any(x < 0 for x in xs):
        raise BadParams("parameters must be nonnegative")


def _cat_K(n: int) -> HandleDecomposition:
    _nonneg(n)
    return _diagram(KLEIN, [(KLEIN_FIBER, (0,)), (_power("a", 2 * n), (0,))], (1, 1), label=f"K_{n}")


def _cat_N(n: int, odd: bool = False) -> HandleDecomposition:
    _nonneg(n)
    words = [(KLEIN_FIBER, (0,)), ("b", (0,)), (_power("a", 2 * n), (int(odd),))]
    return _diagram(KLEIN, words, (0, 1), label=f"N'_{n}" if odd else f"N_{n}")


def _cat_M(m: int, n: int | None) -> HandleDecomposition:
    if m < 1:
        raise BadParams("m must be at least 1")
    words = [(KLEIN_FIBER, (0,))] + [("b", (-1,))] * (2 * m)
    if n is None:
        words.append(("", (0,)))
        label = f"X({m})"
    else:
        _nonneg(n)
        words.append((_power("a", 2 * n), (0,)))
        label = f"M_{m},{n}"
    return _diagram(KLEIN, words, (1, 1), label=label)


def _cat_R(n: int) -> HandleDecomposition:
    if n < 1:
        raise BadParams("n must be at least 1")
    return _diagram([("a", True)], [(f"a^{2 * n}", (0,))], (0, 0), 0, closed=False, label=f"R_{n}")


def _cat_B(n: int) -> HandleDecomposition:
    if n < 1:
        raise BadParams("n must be at least 1")
    return _diagram([("x", False)], [(f"x^{n}", (0,))], (0, 0), 0, closed=False, label=f"B_{n}")


def _cat_notall(g: int, k: int) -> HandleDecomposition:
    if g < 1 or not 0 <= k <= g:
        raise BadParams("need g >= 1 and 0 <= k <= g")
    handles = [(f"t{i}", True) for i in range(1, g + 1)]
    words = [(f"t{i}^2", (1,)) for i in range(1, k + 1)]
    return _diagram(handles, words, (0, g), label=f"#{k}RP4 # #{g - k}S1xtS3")


def _cat_NxS2(g: int) -> HandleDecomposition:
    if g < 1:
        raise BadParams("g must be at least 1")
    handles = [(f"a{i}", True) for i in range(1, g + 1)]
    fiber = " ".join(f"a{i}^2" for i in range(1, g + 1))
    return _diagram(handles, [(fiber, (0,)), ("", (0,))], (0, g), label=f"N_{g}xS2")


_FIXED = {
    "RP4": lambda: _diagram([("t", True)], [("t^2", (1,))], (0, 1), label="RP4"),
    # Klein bottle bundle form, one twisted and one untwisted 1-handle
    "RP4#RP4": lambda: _diagram(KLEIN, [(KLEIN_FIBER, (0,)), ("a^2", (1,))], (1, 1), label="RP4#RP4"),
    # after the handle slides: two twisted 1-handles
    "RP4#RP4-split": lambda: _diagram(
        [("t1", True), ("t2", True)], [("t1^2", (1,)), ("t2^2", (1,))], (0, 2), label="RP4#RP4"
    ),
    "S1xtS3": lambda: _diagram([("t", True)], [], (0, 1), label="S1xtS3"),
    "S1xS3": lambda: _diagram([("s", False)], [], (1, 0), label="S1xS3"),
    "S4": lambda: _diagram([], [], (0, 0), label="S4"),
    "CP2": lambda: _diagram([], [("", (1,))], (0, 0), label="CP2"),
    "CP2bar": lambda: _diagram([], [("", (-1,))], (0, 0), label="CP2bar"),
    "S2xS2": lambda: _diagram([], [("", (0,)), ("", (0,))], (0, 0), label="S2xS2"),
}

# name -> number of integer parameters
CATALOG_ARITY = {
    "K": 1,
    "N": 1,
    "Nprime": 1,
    "M": 2,
    "X": 1,
    "R": 1,
    "B": 1,
    "notall": 2,
    "NxS2": 1,
    **{k: 0 for k in _FIXED},
}


def catalog(name: str, *params: int) -> HandleDecomposition:
    if name not in CATALOG_ARITY:
        raise UnknownName(f"no catalog entry named {name!r}")
    if len(params) != CATALOG_ARITY[name]:
        raise BadParams(f"{name} takes {CATALOG_ARITY[name]} integer parameter(s)")
    p = [int(x) for x in params]
    if name in _FIXED:
        return _FIXED[name]()
    return {
        "K": lambda: _cat_K(p[0]),
        "N": lambda: _cat_N(p[0]),
        "Nprime": lambda: _cat_N(p[0], odd=True),
        "M": lambda: _cat_M(p[0], p[1]),
        "X": lambda: _cat_M(p[0], None),
        "R": lambda: _cat_R(p[0]),
        "B": lambda: _cat_B(p[0]),
        "notall": lambda: _cat_notall(p[0], p[1]),
        "NxS2": lambda: _cat_NxS2(p[0]),
    }[name]()
