"""Regression corpus of worked examples.

Each entry is a JSON file naming a pipeline, its input and the expected
outputs. Every expected value carries a ``source`` field: ``worked-example``
for values read off a published example, ``derived`` for values computed
independently, ``trivial`` for direct consequences of a definition.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any, Callable

from .algebra import abelianization, index2_subgroup
from .basediagram import (
    BaseDiagram,
    Move,
    flip_and_slip,
    simplify_to_sblf,
    sblf_to_trisection,
    spin_and_product_trisections,
    total_euler_char,
    trisection_to_sblf_params,
)
from .errors import ParseError
from .kirby import HandleDecomposition, catalog, double_cover, invariants, verify_double_cover
from .sblf import SblfData, build_kirby, classify_genus2, validate
from .surgery import ManifoldData, standardize

SOURCES = ("worked-example", "derived", "trivial")


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    pipeline: str
    input: Any
    expected: dict

    @classmethod
    def from_json(cls, data: dict) -> "CorpusEntry":
        try:
            exp = data["expected"]
            for key, v in exp.items():
                if v.get("source") not in SOURCES:
                    raise ParseError(f"expected value {key!r} lacks a valid source")
            return cls(str(data["name"]), str(data["pipeline"]), data["input"], exp)
        except (KeyError, AttributeError, TypeError) as exc:
            raise ParseError(f"malformed corpus entry: {exc}") from exc


@dataclass(frozen=True)
class EntryResult:
    name: str
    passed: bool
    actual: dict
    mismatches: tuple[str, ...]
    summary: str

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "summary": self.summary,
            "actual": self.actual,
            "mismatches": list(self.mismatches),
        }


def _diagram(src: Any) -> HandleDecomposition:
    if isinstance(src, dict) and "catalog" in src:
        return catalog(src["catalog"], *src.get("params", []))
    return HandleDecomposition.from_json(src)


def _run_simplify(inp: dict) -> tuple[dict, str]:
    d = BaseDiagram.from_json(inp["diagram"])
    script = [Move.from_json(m) for m in inp["script"]] if "script" in inp else None
    r = simplify_to_sblf(d, script)
    hi = r.result.regions[0]
    lo = r.result.regions[-1]
    out = {
        "higher": hi.fiber.label(),
        "lower": lo.fiber.label(),
        "lefschetz": r.result.total_lefschetz,
        "cusp_ledger": list(r.cusp_ledger),
        "chi": total_euler_char(r.result),
        "chi_seed": total_euler_char(d),
    }
    genus = hi.fiber.parts[0].genus
    ledger = " -> ".join(map(str, r.cusp_ledger))
    return out, f"cusps {ledger}; genus {genus}, {out['lefschetz']} Lefschetz"


def _run_invariants(inp: Any) -> tuple[dict, str]:
    inv = invariants(_diagram(inp))
    out = {"h1": str(inv.h1), "chi": inv.euler_char, "z2_betti": list(inv.z2_betti), "orientable": inv.orientable}
    return out, f"H1 = {inv.h1}, chi = {inv.euler_char}"


def _run_double_cover(inp: Any) -> tuple[dict, str]:
    h = _diagram(inp)
    c = double_cover(h, strict=inp.get("strict", True) if isinstance(inp, dict) else True)
    inv = invariants(c)
    kernel = abelianization(index2_subgroup(invariants(h).pi1))
    out = {"cover_h1": str(inv.h1), "kernel_h1": str(kernel), "cover_chi": inv.euler_char, "verified": verify_double_cover(h, c)}
    return out, f"cover H1 = {inv.h1}"


def _run_trisect(inp: dict) -> tuple[dict, str]:
    d = BaseDiagram.from_json(inp["diagram"])
    t = sblf_to_trisection(d)
    out = {"g": t.params.g, "k": t.params.k, "chi": t.params.euler_char, "chi_input": total_euler_char(d)}
    return out, f"({t.params.g},{t.params.k}) simplified trisection"


def _run_flip_and_slip(inp: dict) -> tuple[dict, str]:
    d = BaseDiagram.from_json(inp["diagram"])
    r = d
    for _ in range(int(inp.get("times", 1))):
        r = flip_and_slip(r)
    out = {
        "higher": r.regions[0].fiber.label(),
        "lefschetz": r.total_lefschetz,
        "chi": total_euler_char(r),
        "chi_input": total_euler_char(d),
    }
    return out, f"{out['higher']} with {out['lefschetz']} Lefschetz"


def _run_sblf(inp: dict) -> tuple[dict, str]:
    d = SblfData.from_json(inp["sblf"])
    rep = validate(d)
    out: dict = {"verdict": rep.verdict}
    if rep.passed:
        inv = invariants(build_kirby(d))
        out.update({"h1": str(inv.h1), "chi": inv.euler_char})
        if d.fiber.genus == 2:
            out["type"] = str(classify_genus2(d))
    return out, " ".join(f"{k}={v}" for k, v in out.items())


def _run_standardize(inp: dict) -> tuple[dict, str]:
    g = _diagram(inp["manifold"])
    inv = invariants(g)
    s = standardize(ManifoldData(inv.pi1, inv.euler_char, inp["cobordism"]))
    counts = s.target.counts()
    out = {
        "target": str(s.target),
        "chi": s.target.euler_char,
        "a_plus_b": counts["RP4"] + counts["S2xRP2"],
        "kills": len(s.schedule.kills()),
    }
    return out, f"target {s.target}"


def _run_trisection_to_sblf(inp: dict) -> tuple[dict, str]:
    r = trisection_to_sblf_params(int(inp["g"]), int(inp["k"]))
    out = {"higher": r.higher.label(), "lower": r.lower.label(), "lefschetz": r.lefschetz, "consistent": r.consistent}
    return out, f"{r.higher.label()}/{r.lower.label()} with {r.lefschetz} Lefschetz"


def _run_spin(inp: dict) -> tuple[dict, str]:
    r = spin_and_product_trisections(int(inp["m"]), int(inp["b"]))
    out = {"product": [r.product.g, r.product.k], "spin": [r.spin.g, r.spin.k], "minimal": r.minimal}
    return out, f"product {tuple(out['product'])}, spin {tuple(out['spin'])}"


PIPELINES: dict[str, Callable[[Any], tuple[dict, str]]] = {
    "simplify": _run_simplify,
    "invariants": _run_invariants,
    "double_cover": _run_double_cover,
    "trisect": _run_trisect,
    "flip_and_slip": _run_flip_and_slip,
    "sblf": _run_sblf,
    "standardize": _run_standardize,
    "trisection_to_sblf": _run_trisection_to_sblf,
    "spin_product": _run_spin,
}


def run_entry(e: CorpusEntry) -> EntryResult:
    if e.pipeline not in PIPELINES:
        raise ParseError(f"unknown pipeline {e.pipeline!r}")
    actual, summary = PIPELINES[e.pipeline](e.input)
    bad = []
    for key, want in e.expected.items():
        if key not in actual:
            bad.append(f"{key}: not produced")
        elif actual[key] != want["value"]:
            bad.append(f"{key}: expected {want['value']!r}, got {actual[key]!r}")
    return EntryResult(e.name, not bad, actual, tuple(bad), summary)


def corpus_dir() -> Path:
    env = os.environ.get("FOLDCALC_CORPUS_DIR")
    if env:
        return Path(env)
    return Path(str(resources.files("foldcalc") / "corpus"))


def load_corpus(directory: Path | None = None) -> list[CorpusEntry]:
    directory = directory or corpus_dir()
    entries = []
    for p in sorted(directory.glob("*.json")):
        try:
            data = json.loads(p.read_text())
        except json.JSONDecodeError as exc:
            raise ParseError(f"{p.name}: {exc}") from exc
        entries.append(CorpusEntry.from_json(data))
    return entries


def run_corpus(names: list[str] | None = None, directory: Path | None = None) -> list[EntryResult]:
    entries = load_corpus(directory)
    if names:
        known = {e.name for e in entries}
        missing = [n for n in names if n not in known]
        if missing:
            raise ParseError(f"no corpus entries named {missing}")
        entries = [e for e in entries if e.name in names]
    with ThreadPoolExecutor() as pool:
        return list(pool.map(run_entry, entries))
