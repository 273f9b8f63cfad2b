"""Exact integer linear algebra and finitely presented groups.

Everything here works over Python integers, so intermediate values never
overflow. Words are tuples of ``(generator_index, sign)`` letters with
``sign`` in ``{+1, -1}``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import ParseError, PreconditionError

Letter = tuple[int, int]
Word = tuple[Letter, ...]


class AllGeneratorsPreserveOrientation(PreconditionError):
    """The orientation character is trivial, so there is no index-2 kernel."""


# ---------------------------------------------------------------------------
# Integer matrices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IntMatrix:
    rows: int
    cols: int
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if self.rows < 0 or self.cols < 0:
            raise ValueError("matrix dimensions must be nonnegative")
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise ValueError("entry count does not match rows x cols")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> "IntMatrix":
        data = tuple(tuple(int(x) for x in r) for r in rows)
        if cols is None:
            cols = len(data[0]) if data else 0
        return cls(len(data), cols, data)

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, tuple((0,) * cols for _ in range(rows)))

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i][j]

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        cols_b = list(zip(*other.entries)) if other.rows else [()] * other.cols
        out = tuple(
            tuple(sum(a * b for a, b in zip(row, col)) for col in cols_b) for row in self.entries
        )
        return IntMatrix(self.rows, other.cols, out)

    def transpose(self) -> "IntMatrix":
        return IntMatrix(self.cols, self.rows, tuple(zip(*self.entries)) if self.rows else tuple(() for _ in range(self.cols)))

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.entries]

    def det(self) -> int:
        """Determinant by fraction-free Bareiss elimination."""
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        n = self.rows
        if n == 0:
            return 1
        a = self.tolist()
        sign = 1
        prev = 1
        for k in range(n - 1):
            if a[k][k] == 0:
                swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
                if swap is None:
                    return 0
                a[k], a[swap] = a[swap], a[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            prev = a[k][k]
        return sign * a[n - 1][n - 1]


@dataclass(frozen=True)
class SmithForm:
    diagonal: tuple[int, ...]
    left: IntMatrix
    right: IntMatrix


def smith_normal_form(m: IntMatrix) -> SmithForm:
    """Smith normal form with unimodular transforms, ``left @ m @ right = D``.

    Pivots are chosen as the nonzero entry of smallest absolute value in the
    remaining block, ties broken by lowest (row, column) index.
    """
    r, c = m.rows, m.cols
    a = m.tolist()
    left = [[int(i == j) for j in range(r)] for i in range(r)]
    right = [[int(i == j) for j in range(c)] for i in range(c)]

    def swap_rows(i: int, j: int) -> None:
        a[i], a[j] = a[j], a[i]
        left[i], left[j] = left[j], left[i]

    def swap_cols(i: int, j: int) -> None:
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in right:
            row[i], row[j] = row[j], row[i]

    def add_row(dst: int, src: int, q: int) -> None:
        # row_dst += q * row_src
        a[dst] = [x + q * y for x, y in zip(a[dst], a[src])]
        left[dst] = [x + q * y for x, y in zip(left[dst], left[src])]

    def add_col(dst: int, src: int, q: int) -> None:
        for row in a:
            row[dst] += q * row[src]
        for row in right:
            row[dst] += q * row[src]

    def place_pivot(t: int) -> bool:
        best = None
        for i in range(t, r):
            for j in range(t, c):
                v = abs(a[i][j])
                if v and (best is None or v < best[0]):
                    best = (v, i, j)
        if best is None:
            return False
        _, i, j = best
        if i != t:
            swap_rows(t, i)
        if j != t:
            swap_cols(t, j)
        return True

    diag: list[int] = []
    for t in range(min(r, c)):
        if not place_pivot(t):
            break
        while True:
            p = a[t][t]
            dirty = False
            for i in range(t + 1, r):
                if a[i][t]:
                    add_row(i, t, -(a[i][t] // p))
                    dirty = dirty or a[i][t] != 0
            for j in range(t + 1, c):
                if a[t][j]:
                    add_col(j, t, -(a[t][j] // p))
                    dirty = dirty or a[t][j] != 0
            if dirty:
                place_pivot(t)
                continue
            bad = next(
                (i for i in range(t + 1, r) for j in range(t + 1, c) if a[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            left[t] = [-x for x in left[t]]
        diag.append(a[t][t])
    diag.extend([0] * (min(r, c) - len(diag)))
    return SmithForm(tuple(diag), IntMatrix.from_rows(left, r), IntMatrix.from_rows(right, c))


# ---------------------------------------------------------------------------
# Words
# ---------------------------------------------------------------------------


def free_reduce(word: Iterable[Letter]) -> Word:
    out: list[Letter] = []
    for g, s in word:
        if out and out[-1][0] == g and out[-1][1] == -s:
            out.pop()
        else:
            out.append((g, s))
    return tuple(out)


def cyclic_reduce(word: Iterable[Letter]) -> Word:
    w = list(free_reduce(word))
    while len(w) >= 2 and w[0][0] == w[-1][0] and w[0][1] == -w[-1][1]:
        w = w[1:-1]
    return tuple(w)


def canonical_cyclic(word: Iterable[Letter]) -> Word:
    """Cyclically reduce, then pick the lexicographically least rotation."""
    w = cyclic_reduce(word)
    if not w:
        return w
    return min(w[i:] + w[:i] for i in range(len(w)))


def invert(word: Sequence[Letter]) -> Word:
    return tuple((g, -s) for g, s in reversed(word))


_TOKEN = re.compile(r"^([A-Za-z][A-Za-z0-9_.@']*)(?:\^\(?(-?\d+)\)?)?$")


def parse_word_string(text: str) -> list[tuple[str, int]]:
    """Parse ``"a b a^-1 b"`` into ``[("a", 1), ("b", 1), ("a", -1), ("b", 1)]``."""
    out: list[tuple[str, int]] = []
    for tok in text.replace("*", " ").split():
        m = _TOKEN.match(tok)
        if not m:
            raise ParseError(f"cannot parse letter {tok!r}")
        out.append((m.group(1), int(m.group(2)) if m.group(2) is not None else 1))
    return out


def format_word(word: Sequence[Letter], names: Sequence[str]) -> str:
    if not word:
        return "1"
    parts = []
    i = 0
    while i < len(word):
        g, s = word[i]
        j = i
        while j < len(word) and word[j] == (g, s):
            j += 1
        e = (j - i) * s
        parts.append(names[g] if e == 1 else f"{names[g]}^{e}")
        i = j
    return " ".join(parts)


# ---------------------------------------------------------------------------
# Presentations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Generator:
    name: str
    reverses_orientation: bool = False


@dataclass(frozen=True)
class AbelianInvariants:
    free_rank: int
    torsion: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.free_rank < 0:
            raise ValueError("negative free rank")
        if any(t < 2 for t in self.torsion):
            raise ValueError("torsion coefficients must be at least 2")
        if any(b % a for a, b in zip(self.torsion, self.torsion[1:])):
            raise ValueError("torsion coefficients must form a divisibility chain")

    def __str__(self) -> str:
        parts = ["Z"] * min(self.free_rank, 1)
        if self.free_rank > 1:
            parts = [f"Z^{self.free_rank}"]
        parts += [f"Z{t}" for t in self.torsion]
        return " + ".join(parts) if parts else "0"

    def direct_sum(self, other: "AbelianInvariants") -> "AbelianInvariants":
        return invariants_from_orders([0] * (self.free_rank + other.free_rank) + list(self.torsion) + list(other.torsion))

    def to_json(self) -> dict:
        return {"free_rank": self.free_rank, "torsion": list(self.torsion)}


def invariants_from_orders(orders: Iterable[int]) -> AbelianInvariants:
    """Invariants of a direct sum of cyclic groups (0 means infinite cyclic)."""
    orders = [abs(int(o)) for o in orders]
    diag = smith_normal_form(
        IntMatrix.from_rows([[o if i == j else 0 for j in range(len(orders))] for i, o in enumerate(orders)], len(orders))
    ).diagonal
    return AbelianInvariants(sum(1 for d in diag if d == 0), tuple(d for d in diag if d > 1))


@dataclass(frozen=True)
class FpPresentation:
    generators: tuple[Generator, ...]
    relators: tuple[Word, ...] = field(default=())

    def __post_init__(self) -> None:
        n = len(self.generators)
        rels = []
        for rel in self.relators:
            rel = tuple((int(g), int(s)) for g, s in rel)
            for g, s in rel:
                if not 0 <= g < n:
                    raise ValueError(f"relator letter references undeclared generator {g}")
                if s not in (1, -1):
                    raise ValueError("letter signs must be +1 or -1")
            rels.append(canonical_cyclic(rel))
        object.__setattr__(self, "generators", tuple(self.generators))
        object.__setattr__(self, "relators", tuple(rels))

    # construction helpers -------------------------------------------------

    @classmethod
    def build(
        cls,
        generators: Sequence[str | tuple[str, bool] | Generator],
        relators: Sequence[str | Sequence[tuple[str, int]]] = (),
    ) -> "FpPresentation":
        """Build from names; each generator is a name or ``(name, reverses)``.

        >>> FpPresentation.build([("a", True), "b"], ["a b a^-1 b"]).relators
        (((0, 1), (1, 1), (0, -1), (1, 1)),)
        """
        gens = []
        for g in generators:
            if isinstance(g, Generator):
                gens.append(g)
            elif isinstance(g, str):
                gens.append(Generator(g))
            else:
                gens.append(Generator(g[0], bool(g[1])))
        index = {g.name: i for i, g in enumerate(gens)}
        if len(index) != len(gens):
            raise ParseError("duplicate generator names")
        rels = []
        for r in relators:
            pairs = parse_word_string(r) if isinstance(r, str) else [(n, int(e)) for n, e in r]
            rels.append(expand(pairs, index))
        return cls(tuple(gens), tuple(rels))

    @property
    def names(self) -> list[str]:
        return [g.name for g in self.generators]

    @property
    def orientation_character(self) -> tuple[int, ...]:
        return tuple(int(g.reverses_orientation) for g in self.generators)

    def word_parity(self, word: Sequence[Letter]) -> int:
        w = self.orientation_character
        return sum(w[g] for g, _ in word) % 2

    def exponent_matrix(self) -> IntMatrix:
        n = len(self.generators)
        rows = []
        for rel in self.relators:
            row = [0] * n
            for g, s in rel:
                row[g] += s
            rows.append(row)
        return IntMatrix.from_rows(rows, n)

    def with_relators(self, extra: Iterable[Word]) -> "FpPresentation":
        return FpPresentation(self.generators, self.relators + tuple(extra))

    def with_generator(self, gen: Generator) -> "FpPresentation":
        return FpPresentation(self.generators + (gen,), self.relators)

    def fresh_name(self, stem: str = "g") -> str:
        taken = set(self.names)
        i = len(self.generators)
        while f"{stem}{i}" in taken:
            i += 1
        return f"{stem}{i}"

    def parse_word(self, text: str | Sequence[tuple[str, int]]) -> Word:
        index = {g.name: i for i, g in enumerate(self.generators)}
        pairs = parse_word_string(text) if isinstance(text, str) else [(n, int(e)) for n, e in text]
        return expand(pairs, index)

    def __str__(self) -> str:
        names = self.names
        rels = ", ".join(format_word(r, names) for r in self.relators)
        return f"<{', '.join(names)} | {rels}>"

    # serialization ----------------------------------------------------------

    def to_json(self) -> dict:
        names = self.names
        return {
            "generators": [
                {"name": g.name, "reverses_orientation": g.reverses_orientation} for g in self.generators
            ],
            "relators": [[[names[g], s] for g, s in rel] for rel in self.relators],
        }

    @classmethod
    def from_json(cls, data: dict) -> "FpPresentation":
        try:
            gens = [Generator(str(g["name"]), bool(g.get("reverses_orientation", False))) for g in data["generators"]]
            index = {g.name: i for i, g in enumerate(gens)}
            rels = []
            for rel in data.get("relators", []):
                pairs = parse_word_string(rel) if isinstance(rel, str) else [(str(n), int(e)) for n, e in rel]
                rels.append(expand(pairs, index))
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed presentation: {exc}") from exc
        return cls(tuple(gens), tuple(rels))


def expand(pairs: Iterable[tuple[str, int]], index: dict[str, int]) -> Word:
    out: list[Letter] = []
    for name, e in pairs:
        if name not in index:
            raise ParseError(f"letter {name!r} is not a declared generator")
        s = 1 if e > 0 else -1
        out.extend([(index[name], s)] * abs(e))
    return tuple(out)


def free_product(*groups: FpPresentation, prefixes: Sequence[str] | None = None) -> FpPresentation:
    """Free product; generator names get a prefix when they would collide."""
    gens: list[Generator] = []
    rels: list[Word] = []
    seen: set[str] = set()
    for k, g in enumerate(groups):
        offset = len(gens)
        for gen in g.generators:
            name = gen.name
            if prefixes is not None:
                name = f"{prefixes[k]}{name}"
            elif name in seen:
                name = f"{name}@{k}"
            seen.add(name)
            gens.append(Generator(name, gen.reverses_orientation))
        rels.extend(tuple((i + offset, s) for i, s in rel) for rel in g.relators)
    return FpPresentation(tuple(gens), tuple(rels))


# ---------------------------------------------------------------------------
# Invariants
# ---------------------------------------------------------------------------


def abelianization(g: FpPresentation) -> AbelianInvariants:
    diag = smith_normal_form(g.exponent_matrix()).diagonal
    n = len(g.generators)
    nonzero = [d for d in diag if d != 0]
    return AbelianInvariants(n - len(nonzero), tuple(d for d in nonzero if d > 1))


def rank_mod2(rows: Iterable[Iterable[int]]) -> int:
    """Rank over the two-element field, rows packed into bit masks."""
    pivots: dict[int, int] = {}
    rank = 0
    for row in rows:
        v = 0
        for j, x in enumerate(row):
            if x % 2:
                v |= 1 << j
        while v:
            top = v.bit_length() - 1
            if top in pivots:
                v ^= pivots[top]
            else:
                pivots[top] = v
                rank += 1
                break
    return rank


def z2_first_betti(g: FpPresentation) -> int:
    return len(g.generators) - rank_mod2(g.exponent_matrix().entries)


def index2_subgroup(g: FpPresentation, pivot: int | None = None) -> FpPresentation:
    """Reidemeister-Schreier presentation of the kernel of the orientation character.

    The transversal is ``{1, x}`` with ``x`` the first orientation-reversing
    generator (or ``pivot``). Schreier generator ``(c, y)`` stands for
    ``r_c y r_{c+w(y)}^{-1}``; the one for ``(0, x)`` is trivial and dropped.
    Every relator is rewritten from both cosets, so no relator is lost.
    """
    w = g.orientation_character
    if pivot is None:
        pivot = next((i for i, v in enumerate(w) if v), None)
        if pivot is None:
            raise AllGeneratorsPreserveOrientation("orientation character is trivial")
    elif not w[pivot]:
        raise AllGeneratorsPreserveOrientation("pivot generator preserves orientation")
    names = g.names
    xname = names[pivot]
    index: dict[tuple[int, int], int] = {}
    gens: list[Generator] = []
    for c in (0, 1):
        for y in range(len(names)):
            if (c, y) == (0, pivot):
                continue
            index[(c, y)] = len(gens)
            label = names[y] if c == 0 else f"{xname}.{names[y]}"
            gens.append(Generator(label, False))

    def rewrite(rel: Word, start: int) -> Word:
        out: list[Letter] = []
        c = start
        for y, s in rel:
            if s == 1:
                key = (c, y)
                c = (c + w[y]) % 2
            else:
                c = (c + w[y]) % 2
                key = (c, y)
            if key != (0, pivot):
                out.append((index[key], s))
        return tuple(out)

    rels = [rewrite(rel, start) for rel in g.relators for start in (0, 1)]
    return FpPresentation(tuple(gens), tuple(rels))


def tietze_reduce(g: FpPresentation) -> FpPresentation:
    """Drop empty relators and eliminate generators killed by one-letter relators.

    No other Tietze move is attempted, so the output is generally not minimal.
    """
    gens = list(g.generators)
    rels = [canonical_cyclic(r) for r in g.relators]
    while True:
        rels = [r for r in rels if r]
        single = next((r for r in rels if len(r) == 1), None)
        if single is None:
            break
        dead = single[0][0]
        rels = [canonical_cyclic((x - (x > dead), s) for x, s in r if x != dead) for r in rels]
        del gens[dead]
    out = FpPresentation(tuple(gens), tuple(rels))
    if abelianization(out) != abelianization(g):
        raise AssertionError("tietze_reduce changed the abelianization")
    return out
