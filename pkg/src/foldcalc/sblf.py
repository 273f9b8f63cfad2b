"""Monodromy data of simplified broken Lefschetz fibrations.

An ``SblfData`` records the higher genus fiber, the optional round
vanishing cycle, the Lefschetz vanishing cycles and the two gluing choices
that the skeleton cannot see. Validity is certified at the level of Z2
homology, except on the Klein bottle where the exact answer is known.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .algebra import cyclic_reduce
from .errors import ParseError, PreconditionError
from .kirby import (
    HandleDecomposition,
    OneHandle,
    TwoHandle,
    blow_up_nonorientable,
    blow_up_orientable,
    catalog,
)
from .surface import (
    CurveWord,
    DoesNotStabilize,
    SurfaceModel,
    composite_twist,
    induced_quotient_action,
    is_essential_z2,
    is_two_sided,
    lower_surface,
    z2_class,
)


class InvalidData(PreconditionError):
    pass


class WrongGenus(PreconditionError):
    pass


class NonMinimalCase(PreconditionError):
    pass


KLEIN = SurfaceModel.N(2)


@dataclass(frozen=True)
class SblfData:
    fiber: SurfaceModel
    fold_curve: Optional[CurveWord] = None
    lefschetz_cycles: tuple[CurveWord, ...] = ()
    lower_fiber: Optional[SurfaceModel] = None
    gluing_parameter: int = 0
    framing_parity: int = 0

    def __post_init__(self) -> None:
        f = self.fiber
        if f.orientable or f.genus < 2 or f.genus % 2:
            raise InvalidData("the fiber must be N_k with k even and k >= 2")
        if self.gluing_parameter < 0:
            raise InvalidData("gluing parameter must be nonnegative")
        if self.framing_parity not in (0, 1):
            raise InvalidData("framing parity is a bit")
        curves = self.lefschetz_cycles + ((self.fold_curve,) if self.fold_curve else ())
        if any(c.surface != f for c in curves):
            raise InvalidData("every curve must live on the fiber")
        if self.fold_curve is None:
            if self.lower_fiber is not None:
                raise InvalidData("a lower fiber needs a fold curve")
            return
        cls = z2_class(self.fold_curve)
        if cls.is_zero() or not is_two_sided(self.fold_curve):
            # validate() reports this; the lower fiber stays undetermined
            return
        derived = lower_surface(cls)
        if self.lower_fiber is None:
            object.__setattr__(self, "lower_fiber", derived)
        elif self.lower_fiber != derived:
            raise InvalidData(f"lower fiber {self.lower_fiber.label()} disagrees with the fold curve ({derived.label()})")

    @property
    def genus(self) -> int:
        return self.fiber.genus

    def to_json(self) -> dict:
        return {
            "fiber": self.fiber.to_json(),
            "fold": str(self.fold_curve) if self.fold_curve else None,
            "cycles": [str(c) for c in self.lefschetz_cycles],
            "lower_fiber": self.lower_fiber.to_json() if self.lower_fiber else None,
            "gluing": self.gluing_parameter,
            "parity": self.framing_parity,
        }

    @classmethod
    def from_json(cls, data: dict) -> "SblfData":
        try:
            fiber = SurfaceModel.from_json(data["fiber"])
            fold = data.get("fold")
            lower = data.get("lower_fiber")
            return cls(
                fiber,
                CurveWord.parse(fiber, fold) if fold else None,
                tuple(CurveWord.parse(fiber, c) for c in data.get("cycles", [])),
                SurfaceModel.from_json(lower) if lower else None,
                int(data.get("gluing", 0)),
                int(data.get("parity", 0)),
            )
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise ParseError(f"malformed SBLF data: {exc}") from exc


def parse_sblf(fiber_genus: int, fold: str | None, cycles: list[str], gluing: int = 0, parity: int = 0) -> SblfData:
    f = SurfaceModel.N(fiber_genus)
    return SblfData(
        f,
        CurveWord.parse(f, fold) if fold else None,
        tuple(CurveWord.parse(f, c) for c in cycles),
        None,
        gluing,
        parity,
    )


# ---------------------------------------------------------------------------
# certification
# ---------------------------------------------------------------------------

PASS_EXACT = "PASS-exact"
PASS_NECESSARY = "PASS-necessary"
FAIL = "FAIL"


@dataclass(frozen=True)
class Check:
    name: str
    ok: Optional[bool]
    detail: str = ""


@dataclass(frozen=True)
class CertificationReport:
    verdict: str
    checks: tuple[Check, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return self.verdict != FAIL

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "checks": [{"name": c.name, "ok": c.ok, "detail": c.detail} for c in self.checks],
        }


def validate(d: SblfData) -> CertificationReport:
    checks = []
    sided = [i for i, c in enumerate(d.lefschetz_cycles) if not is_two_sided(c)]
    checks.append(Check("two_sided", not sided, f"one-sided cycles at {sided}" if sided else ""))
    if sided:
        # a one-sided class has no Dehn twist, so the monodromy checks do not apply
        checks.append(Check("monodromy", None, "skipped"))
        return CertificationReport(FAIL, tuple(checks))
    twists = [z2_class(c) for c in d.lefschetz_cycles]
    if d.fold_curve is not None:
        fold_ok = is_two_sided(d.fold_curve) and is_essential_z2(d.fold_curve)
        checks.append(Check("fold_essential", fold_ok, "" if fold_ok else "fold curve is one-sided or Z2-null"))
        c = z2_class(d.fold_curve)
        m = composite_twist(twists, d.fiber)
        fixes = bool(np.array_equal((m.astype(np.int64) @ c.array) % 2, c.array))
        checks.append(Check("fixes_fold_class", fixes))
        if fold_ok and fixes:
            try:
                ident = induced_quotient_action(twists, c).is_identity
                checks.append(Check("quotient_identity", ident))
            except DoesNotStabilize as exc:
                checks.append(Check("quotient_identity", False, str(exc)))
        else:
            checks.append(Check("quotient_identity", None, "skipped"))
    else:
        m = composite_twist(twists, d.fiber)
        ident = bool(np.array_equal(m, np.eye(d.fiber.dim, dtype=np.uint8)))
        checks.append(Check("monodromy_identity", ident))
    if d.fiber == KLEIN:
        n = len(d.lefschetz_cycles)
        even = n % 2 == 0
        gamma = all(z2_class(c).vector == (1, 1) for c in d.lefschetz_cycles)
        checks.append(Check("klein_exact", even and gamma, f"{n} cycles" + ("" if gamma else ", some not the class of b")))
    if any(c.ok is False for c in checks):
        return CertificationReport(FAIL, tuple(checks))
    return CertificationReport(PASS_EXACT if d.fiber == KLEIN else PASS_NECESSARY, tuple(checks))


def relative_minimality_report(d: SblfData) -> list[int]:
    """Indices of cycles whose Z2 class vanishes.

    Such a cycle may bound a disk or a Mobius band, so the fibration may fail
    to be relatively minimal. A nonzero class rules this out.
    """
    out = [i for i, c in enumerate(d.lefschetz_cycles) if not is_essential_z2(c)]
    assert all(not z2_class(d.lefschetz_cycles[i]).is_zero() for i in range(len(d.lefschetz_cycles)) if i not in out)
    return out


def sblf_euler_char(d: SblfData) -> int:
    n = len(d.lefschetz_cycles)
    if d.fold_curve is None:
        return 2 * d.fiber.euler_char + n
    if d.lower_fiber is None:
        raise InvalidData("fold curve does not determine a lower fiber")
    return d.fiber.euler_char + d.lower_fiber.euler_char + n


# ---------------------------------------------------------------------------
# Kirby realization
# ---------------------------------------------------------------------------


def _kirby_word(d: SblfData, c: CurveWord) -> tuple[tuple[int, int], ...]:
    if d.fiber != KLEIN:
        return c.word
    # a1 = a and a2 = a^-1 b, with a at index 0 and b at index 1
    subst = {0: [(0, 1)], 1: [(0, -1), (1, 1)]}
    out: list[tuple[int, int]] = []
    for g, s in c.word:
        block = subst[g] if s == 1 else [(x, -e) for x, e in reversed(subst[g])]
        out.extend(block)
    return cyclic_reduce(out)


def build_kirby(d: SblfData) -> HandleDecomposition:
    """Handle decomposition of the total space.

    The higher side ``N_k x D^2`` gives a 0-handle, ``k`` twisted 1-handles
    and the fiber 2-handle. Lefschetz cycles add (-1)-framed 2-handles. A fold
    adds a 0-framed 2-handle and a 3-handle (the round 2-handle). The lower
    side contributes the closing 2-handle, one 3-handle per 1-handle of the
    lower fiber and a 4-handle.
    """
    rep = validate(d)
    if not rep.passed:
        bad = [c.name for c in rep.checks if c.ok is False]
        raise InvalidData(f"monodromy data fails certification: {bad}")
    k = d.genus
    n = d.gluing_parameter
    if d.fiber == KLEIN:
        ones: tuple[OneHandle, ...] = (OneHandle(True, "a"), OneHandle(False, "b"))
        fiber_word = ((0, 1), (1, 1), (0, -1), (1, 1))
        closing = tuple([(0, 1)] * (2 * n))
    else:
        ones = tuple(OneHandle(True, f"a{i}") for i in range(1, k + 1))
        fiber_word = tuple((i, 1) for i in range(k) for _ in range(2))
        # the gluing is unique up to isotopy here
        closing = ()
    twos = [TwoHandle(fiber_word, (0,))]
    twos += [TwoHandle(_kirby_word(d, c), (-1,)) for c in d.lefschetz_cycles]
    untwisted = twisted = 0
    if d.fold_curve is not None:
        lower = d.lower_fiber
        assert lower is not None
        twos.append(TwoHandle(_kirby_word(d, d.fold_curve), (0,)))
        if lower.orientable:
            twisted += 1
            untwisted += k - 2
        else:
            untwisted += 1
            twisted += k - 2
    elif d.fiber == KLEIN:
        untwisted, twisted = 1, 1
    else:
        twisted = k
    twos.append(TwoHandle(closing, (d.framing_parity,)))
    return HandleDecomposition(1, ones, tuple(twos), untwisted, twisted, 1, True, "sblf")


# ---------------------------------------------------------------------------
# genus two classification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DiffeoType:
    tag: str
    params: tuple[int, ...] = ()
    base: Optional["DiffeoType"] = None
    orientable_count: int = 0
    nonorientable_count: int = 0

    def __post_init__(self) -> None:
        if self.tag == "BlowupOf":
            if self.base is None or self.orientable_count < 0 or self.nonorientable_count < 0:
                raise InvalidData("a blow-up needs a base type and nonnegative counts")
            return
        if self.tag not in ("K", "N", "Nprime", "M"):
            raise InvalidData(f"unknown diffeomorphism type {self.tag!r}")
        if any(p < 0 for p in self.params) or (self.tag == "M" and self.params[0] < 1):
            raise InvalidData("parameters out of range")

    def __str__(self) -> str:
        if self.tag == "BlowupOf":
            return f"{self.base} # {self.orientable_count}CP2bar # {self.nonorientable_count}RP4"
        return f"{self.tag}({', '.join(map(str, self.params))})"

    def to_kirby(self) -> HandleDecomposition:
        if self.tag != "BlowupOf":
            return catalog(self.tag, *self.params)
        assert self.base is not None
        h = self.base.to_kirby()
        for _ in range(self.orientable_count):
            h = blow_up_orientable(h, -1)
        for _ in range(self.nonorientable_count):
            h = blow_up_nonorientable(h)
        return h

    def to_json(self) -> dict:
        out: dict = {"tag": self.tag, "params": list(self.params), "text": str(self)}
        if self.base is not None:
            out["base"] = self.base.to_json()
            out["orientable_count"] = self.orientable_count
            out["nonorientable_count"] = self.nonorientable_count
        return out


def classify_genus2(d: SblfData) -> DiffeoType:
    """Diffeomorphism type of a relatively minimal genus two SBLF.

    The two fold-only types ``N(n)`` and ``Nprime(n)`` share chi, pi_1 and
    Z2 Betti numbers. Only the framing parity input tells them apart.
    """
    if d.fiber != KLEIN:
        raise WrongGenus(f"classification needs Klein bottle fibers, got {d.fiber.label()}")
    offenders = relative_minimality_report(d)
    if offenders:
        raise NonMinimalCase(f"cycles {offenders} may bound a disk or Mobius band")
    n = d.gluing_parameter
    cycles = len(d.lefschetz_cycles)
    if d.fold_curve is None and cycles == 0:
        return DiffeoType("K", (n,))
    if d.fold_curve is not None and cycles == 0:
        return DiffeoType("Nprime" if d.framing_parity else "N", (n,))
    if d.fold_curve is None:
        if not validate(d).passed:
            raise InvalidData("Lefschetz cycles must be an even number of copies of b")
        return DiffeoType("M", (cycles // 2, n))
    raise NonMinimalCase("fold and Lefschetz singularities together force a non-minimal fibration")
