"""Model surfaces, curve words and their Z2-homology calculus.

Homology classes live in the crosscap basis on ``N_k`` (intersection form the
identity) and in the basis ``a1, b1, ..., ag, bg`` on ``Sigma_g`` (standard
symplectic form). All linear algebra is mod 2 on small ``numpy`` arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .algebra import Word, canonical_cyclic, format_word, parse_word_string
from .errors import ParseError, PreconditionError


class SurfaceMismatch(PreconditionError):
    pass


class OneSidedCurve(PreconditionError):
    pass


class NullClass(PreconditionError):
    pass


class DoesNotStabilize(PreconditionError):
    pass


@dataclass(frozen=True)
class SurfaceModel:
    orientable: bool
    genus: int

    def __post_init__(self) -> None:
        if self.genus < 0:
            raise ValueError("genus must be nonnegative")
        if not self.orientable and self.genus < 1:
            raise ValueError("a nonorientable surface has genus at least 1")

    @classmethod
    def N(cls, k: int) -> "SurfaceModel":
        return cls(False, k)

    @classmethod
    def Sigma(cls, g: int) -> "SurfaceModel":
        return cls(True, g)

    @property
    def euler_char(self) -> int:
        return 2 - 2 * self.genus if self.orientable else 2 - self.genus

    @property
    def dim(self) -> int:
        """First Z2 Betti number."""
        return 2 * self.genus if self.orientable else self.genus

    @property
    def generator_names(self) -> list[str]:
        if self.orientable:
            return [f"{x}{i}" for i in range(1, self.genus + 1) for x in ("a", "b")]
        return [f"a{i}" for i in range(1, self.genus + 1)]

    @cached_property
    def form(self) -> np.ndarray:
        q = np.zeros((self.dim, self.dim), dtype=np.uint8)
        if self.orientable:
            for i in range(self.genus):
                q[2 * i, 2 * i + 1] = q[2 * i + 1, 2 * i] = 1
        else:
            np.fill_diagonal(q, 1)
        return q

    def label(self) -> str:
        if self.orientable:
            return "S2" if self.genus == 0 else f"Sigma_{self.genus}"
        return f"N_{self.genus}"

    def to_json(self) -> dict:
        return {"orientable": self.orientable, "genus": self.genus}

    @classmethod
    def from_json(cls, data: dict) -> "SurfaceModel":
        try:
            return cls(bool(data["orientable"]), int(data["genus"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed surface: {exc}") from exc


# On the Klein bottle the letters ``a`` (one-sided) and ``b`` (the two-sided
# nonseparating curve) are accepted as shorthand for ``a1`` and ``a1 a2``.
KLEIN_ALIASES = {"a": ["a1"], "b": ["a1", "a2"]}


@dataclass(frozen=True)
class CurveWord:
    surface: SurfaceModel
    word: Word

    def __post_init__(self) -> None:
        n = len(self.surface.generator_names)
        if any(not 0 <= g < n for g, _ in self.word):
            raise ValueError("curve letter outside the surface generators")
        w = canonical_cyclic(self.word)
        if not w:
            raise ValueError("a curve word must be nonempty after cyclic reduction")
        object.__setattr__(self, "word", w)

    @classmethod
    def parse(cls, surface: SurfaceModel, text: str) -> "CurveWord":
        names = surface.generator_names
        index = {n: i for i, n in enumerate(names)}
        letters = []
        for name, e in parse_word_string(text):
            if name in index:
                expansion = [name]
            elif surface == SurfaceModel.N(2) and name in KLEIN_ALIASES:
                expansion = KLEIN_ALIASES[name]
            else:
                raise ParseError(f"letter {name!r} is not a generator of {surface.label()}")
            block = [(index[x], 1) for x in expansion]
            if e < 0:
                block = [(g, -s) for g, s in reversed(block)]
            letters.extend(block * abs(e))
        try:
            return cls(surface, tuple(letters))
        except ValueError as exc:
            raise ParseError(str(exc)) from exc

    def __str__(self) -> str:
        return format_word(self.word, self.surface.generator_names)


@dataclass(frozen=True)
class Z2Class:
    surface: SurfaceModel
    vector: tuple[int, ...]

    def __post_init__(self) -> None:
        v = tuple(int(x) % 2 for x in self.vector)
        if len(v) != self.surface.dim:
            raise ValueError("class length does not match the first Z2 Betti number")
        object.__setattr__(self, "vector", v)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.vector, dtype=np.uint8)

    def is_zero(self) -> bool:
        return not any(self.vector)


def z2_class(c: CurveWord) -> Z2Class:
    v = [0] * c.surface.dim
    for g, _ in c.word:
        v[g] ^= 1
    return Z2Class(c.surface, tuple(v))


def _pair(q: np.ndarray, x: np.ndarray, y: np.ndarray) -> int:
    return int(x.astype(np.int64) @ q.astype(np.int64) @ y.astype(np.int64)) % 2


def intersection_mod2(x: Z2Class, y: Z2Class) -> int:
    if x.surface != y.surface:
        raise SurfaceMismatch("classes live on different surfaces")
    return _pair(x.surface.form, x.array, y.array)


def is_two_sided(c: CurveWord) -> bool:
    x = z2_class(c)
    return intersection_mod2(x, x) == 0


def is_essential_z2(c: CurveWord) -> bool:
    """Nonzero Z2 class. Sufficient for essentiality, not necessary."""
    return not z2_class(c).is_zero()


# ---------------------------------------------------------------------------
# mod 2 linear algebra
# ---------------------------------------------------------------------------


def _rref(m: np.ndarray) -> tuple[np.ndarray, list[int]]:
    a = (m.astype(np.uint8) % 2).copy()
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for j in range(cols):
        hit = next((i for i in range(r, rows) if a[i, j]), None)
        if hit is None:
            continue
        a[[r, hit]] = a[[hit, r]]
        for i in range(rows):
            if i != r and a[i, j]:
                a[i] ^= a[r]
        pivots.append(j)
        r += 1
        if r == rows:
            break
    return a, pivots


def rank2(m: np.ndarray) -> int:
    if m.size == 0:
        return 0
    return len(_rref(m)[1])


def nullspace2(m: np.ndarray) -> np.ndarray:
    """Rows form a basis of ``{x : m x = 0}``."""
    cols = m.shape[1]
    a, pivots = _rref(m) if m.size else (np.zeros((0, cols), dtype=np.uint8), [])
    free = [j for j in range(cols) if j not in pivots]
    basis = []
    for f in free:
        v = np.zeros(cols, dtype=np.uint8)
        v[f] = 1
        for i, p in enumerate(pivots):
            if a[i, f]:
                v[p] = 1
        basis.append(v)
    return np.array(basis, dtype=np.uint8).reshape(len(basis), cols)


def solve2(basis_rows: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Coordinates of ``x`` in the (invertible) basis given as rows."""
    n = basis_rows.shape[0]
    aug = np.concatenate([basis_rows.T % 2, x.reshape(-1, 1) % 2], axis=1).astype(np.uint8)
    a, pivots = _rref(aug)
    if n in pivots or len(pivots) != n:
        raise ValueError("vector not in span or basis degenerate")
    return a[:n, n].copy()


def _extend_basis(start: list[np.ndarray], dim: int) -> list[np.ndarray]:
    basis = list(start)
    for i in range(dim):
        e = np.zeros(dim, dtype=np.uint8)
        e[i] = 1
        if rank2(np.array(basis + [e])) > len(basis):
            basis.append(e)
    return basis


# ---------------------------------------------------------------------------
# Twists and cut-cap-forget
# ---------------------------------------------------------------------------


def dehn_twist_z2(c: Z2Class) -> np.ndarray:
    """Matrix of ``x -> x + (x.c) c`` acting on column vectors."""
    if intersection_mod2(c, c):
        raise OneSidedCurve("twist along a one-sided class")
    cv = c.array.astype(np.int64)
    q = c.surface.form.astype(np.int64)
    m = np.eye(c.surface.dim, dtype=np.int64) + np.outer(cv, cv @ q)
    return (m % 2).astype(np.uint8)


def apply2(m: np.ndarray, x: np.ndarray) -> np.ndarray:
    return ((m.astype(np.int64) @ x.astype(np.int64)) % 2).astype(np.uint8)


def compose2(*maps: np.ndarray) -> np.ndarray:
    """``compose2(f, g)`` is ``f`` after ``g``."""
    out = maps[-1].astype(np.int64)
    for m in reversed(maps[:-1]):
        out = m.astype(np.int64) @ out
    return (out % 2).astype(np.uint8)


@dataclass(frozen=True)
class CutCapForget:
    """``c^perp``, the quotient ``c^perp / <c>`` and the projection onto it.

    ``perp_basis`` rows are ``c`` followed by lifts of a quotient basis.
    ``projection`` is a ``(dim-2) x dim`` matrix that is exact on ``c^perp``.
    """

    c: Z2Class
    perp_basis: np.ndarray
    projection: np.ndarray

    @property
    def quotient_dim(self) -> int:
        return self.perp_basis.shape[0] - 1

    def contains(self, x: np.ndarray) -> bool:
        return _pair(self.c.surface.form, x, self.c.array) == 0

    def project(self, x: np.ndarray) -> np.ndarray:
        if not self.contains(x):
            raise ValueError("vector is not orthogonal to the cut class")
        return apply2(self.projection, x)


def cut_cap_forget_z2(c: Z2Class) -> CutCapForget:
    if intersection_mod2(c, c):
        raise OneSidedCurve("cut along a one-sided class")
    if c.is_zero():
        raise NullClass("cut along a null-homologous class")
    dim = c.surface.dim
    functional = (c.array.astype(np.int64) @ c.surface.form.astype(np.int64)) % 2
    perp = nullspace2(functional.reshape(1, dim).astype(np.uint8))
    basis = _extend_basis([c.array], dim)[:1]
    for v in perp:
        if rank2(np.array(basis + [v])) > len(basis):
            basis.append(v)
    perp_basis = np.array(basis, dtype=np.uint8)
    full = _extend_basis(list(perp_basis), dim)
    full_m = np.array(full, dtype=np.uint8)
    # coordinates in the full basis, keeping only the quotient directions
    inv = np.array([solve2(full_m, e) for e in np.eye(dim, dtype=np.uint8)], dtype=np.uint8).T
    projection = inv[1 : len(basis), :]
    return CutCapForget(c, perp_basis, projection)


@dataclass(frozen=True)
class QuotientAction:
    matrix: np.ndarray

    @property
    def is_identity(self) -> bool:
        return bool(np.array_equal(self.matrix, np.eye(self.matrix.shape[0], dtype=np.uint8)))


def composite_twist(twists: Sequence[Z2Class], surface: SurfaceModel) -> np.ndarray:
    """``t_{c_n} ... t_{c_1}``: the first twist in the list acts first."""
    m = np.eye(surface.dim, dtype=np.uint8)
    for t in twists:
        if t.surface != surface:
            raise SurfaceMismatch("twist class on a different surface")
        m = compose2(dehn_twist_z2(t), m)
    return m


def induced_quotient_action(twists: Sequence[Z2Class], c: Z2Class) -> QuotientAction:
    ccf = cut_cap_forget_z2(c)
    m = composite_twist(twists, c.surface)
    if not np.array_equal(apply2(m, c.array), c.array):
        raise DoesNotStabilize("composite twist moves the cut class")
    lifts = ccf.perp_basis[1:]
    cols = []
    for v in lifts:
        image = apply2(m, v)
        if not ccf.contains(image):
            raise DoesNotStabilize("composite twist does not preserve the orthogonal complement")
        cols.append(ccf.project(image))
    q = ccf.quotient_dim
    mat = np.array(cols, dtype=np.uint8).T.reshape(q, q) if q else np.zeros((0, 0), dtype=np.uint8)
    return QuotientAction(mat)


def lower_surface(c: Z2Class) -> SurfaceModel:
    """Surface left after cutting along ``c`` and capping.

    On ``N_k`` the result is orientable exactly when ``c`` is the sum of all
    crosscap classes, since the first Stiefel-Whitney class ``x -> x.x`` then
    vanishes on ``c^perp``.
    """
    s = c.surface
    ccf = cut_cap_forget_z2(c)
    if s.orientable:
        return SurfaceModel.Sigma(s.genus - 1)
    if all(c.vector):
        return SurfaceModel.Sigma(ccf.quotient_dim // 2)
    return SurfaceModel.N(ccf.quotient_dim)


def standard_relator(surface: SurfaceModel) -> Word:
    if surface.orientable:
        out = []
        for i in range(surface.genus):
            a, b = 2 * i, 2 * i + 1
            out += [(a, 1), (b, 1), (a, -1), (b, -1)]
        return tuple(out)
    return tuple((i, 1) for i in range(surface.genus) for _ in range(2))
