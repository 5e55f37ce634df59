"""Brute-force re-checks of what the construction claims.

Nothing here trusts the construction log: logged words and points are only
used as extra *candidates*, and every claim is re-evaluated on the total
permutations.  A word that fixes a whole finite window is reported as a
flag, never as an error, because a nontrivial element can fix any finite
set.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .engine import EmbeddingSpec
from .permutation import DEFAULT_CAP, FinPerm, Window, orbit_structure, window_fixing_power
from .words import IDENTITY, Word, enumerate_reduced_words, evaluate

CERTIFIED = "certified"
RELATOR_EQUIVALENT = "relator-equivalent"
UNVERIFIED = "unverified"


@dataclass
class FreenessReport:
    checked: int
    flags: list[Word] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.flags

    def to_json(self) -> dict:
        return {"checked": self.checked, "flags": [str(w) for w in self.flags]}


def _points(window: Window, extra: Iterable[int]) -> list[int]:
    seen = dict.fromkeys(extra)
    seen.update(dict.fromkeys(window))
    return list(seen)


def check_freeness(
    assign: Mapping[str, FinPerm],
    max_len: int,
    search_window: Window,
    extra_points: Iterable[int] = (),
    alphabet: Sequence[str] | None = None,
) -> FreenessReport:
    """Flag every reduced nonempty word up to ``max_len`` fixing all searched points."""
    alphabet = list(alphabet or assign)
    pts = _points(search_window, extra_points)
    words = enumerate_reduced_words(alphabet, max_len)
    report = FreenessReport(len(words))
    for w in words:
        if all(evaluate(w, assign, a) == a for a in pts):
            report.flags.append(w)
    return report


@dataclass
class TransitivityReport:
    k: int
    total: int
    unrealized: list[tuple[tuple[int, ...], tuple[int, ...]]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.unrealized

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "total": self.total,
            "unrealized": [[list(x), list(y)] for x, y in self.unrealized],
        }


def check_transitivity(
    assign: Mapping[str, FinPerm],
    k: int,
    window: Window,
    word_len_cap: int,
    witness_words: Iterable[Word] = (),
    alphabet: Sequence[str] | None = None,
) -> TransitivityReport:
    """Which pairs of ``k``-tuples of distinct window points no candidate word realizes.

    Candidates are the identity, every reduced word up to ``word_len_cap``
    and any extra ``witness_words``.
    """
    alphabet = list(alphabet or assign)
    pts = list(window)
    tuples = list(itertools.permutations(pts, k))
    candidates = dict.fromkeys([IDENTITY, *enumerate_reduced_words(alphabet, word_len_cap), *witness_words])
    realized: set[tuple[tuple[int, ...], tuple[int, ...]]] = set()
    for w in candidates:
        img = {a: evaluate(w, assign, a) for a in pts}
        for x in tuples:
            y = tuple(img[a] for a in x)
            if all(b in window for b in y):
                realized.add((x, y))
    report = TransitivityReport(k, len(tuples) ** 2)
    for x in tuples:
        for y in tuples:
            if (x, y) not in realized:
                report.unrealized.append((x, y))
    return report


@dataclass
class NondiscreteResult:
    """``w^q`` fixes the window; ``moved`` is a point it moves, if one was found."""

    q: int
    moved: int | None

    @property
    def degenerate(self) -> bool:
        return self.moved is None

    def to_json(self) -> dict:
        return {"q": self.q, "moved": self.moved, "degenerate": self.degenerate}


def moved_by_power(w: Word, assign, a: int, q: int, cap: int = DEFAULT_CAP) -> bool | None:
    """Whether ``w^q`` moves ``a``; ``None`` if undecidable within ``cap`` steps."""
    b = a
    for n in range(1, min(q, cap) + 1):
        b = evaluate(w, assign, b)
        if b == a:
            return q % n != 0
    return True if q <= cap else None


def _search_moved(w, assign, window, q, cap, candidates, search_radius) -> int | None:
    outside = itertools.chain.from_iterable(
        (r, -r) for r in range(window.radius + 1, search_radius + 1)
    )
    for a in itertools.chain(candidates, outside):
        if a in window:
            continue
        if moved_by_power(w, assign, a, q, cap):
            return a
    return None


def check_nondiscrete(
    w: Word,
    assign: Mapping[str, FinPerm],
    window: Window,
    cap: int = DEFAULT_CAP,
    candidates: Iterable[int] = (),
    search_radius: int | None = None,
) -> NondiscreteResult:
    """A power of ``w`` fixing ``window`` pointwise, and a point outside it that power moves.

    Candidates are tried first, then points outward from the window up to
    ``search_radius``.  Raises ``OrbitExceedsCap`` if an orbit through the
    window does not close.
    """
    q = window_fixing_power(w, assign, window, cap)
    radius = search_radius if search_radius is not None else window.radius + 1000
    return NondiscreteResult(q, _search_moved(w, assign, window, q, cap, candidates, radius))


@dataclass
class PairNondiscreteResult:
    q: int
    moved: tuple[int | None, int | None]

    @property
    def degenerate(self) -> bool:
        return None in self.moved

    def to_json(self) -> dict:
        return {"q": self.q, "moved": list(self.moved), "degenerate": self.degenerate}


def check_nondiscrete_pair(
    w1: Word,
    w2: Word,
    assign: Mapping[str, FinPerm],
    window: Window,
    cap: int = DEFAULT_CAP,
    candidates: Iterable[int] = (),
    search_radius: int | None = None,
) -> PairNondiscreteResult:
    """Common power of ``w1`` and ``w2`` fixing ``window``, with a moved point for each."""
    q = math.lcm(window_fixing_power(w1, assign, window, cap), window_fixing_power(w2, assign, window, cap))
    radius = search_radius if search_radius is not None else window.radius + 1000
    cands = list(candidates)
    moved = tuple(_search_moved(w, assign, window, q, cap, cands, radius) for w in (w1, w2))
    return PairNondiscreteResult(q, moved)


@dataclass
class EmbeddingItem:
    element: Word
    status: str
    image_length: int
    coherent: bool = True

    def to_json(self) -> dict:
        return {
            "element": str(self.element),
            "status": self.status,
            "image_length": self.image_length,
            "coherent": self.coherent,
        }


def check_embedding(
    spec: EmbeddingSpec,
    sample: Iterable[Word],
    window: Window,
    extra_points: Iterable[int] = (),
) -> list[EmbeddingItem]:
    """Classify each sample element by its image.

    Symbolically trivial images are relator-equivalent (and must fix every
    tested point); otherwise an element is certified when its image moves a
    tested point and unverified when it does not.
    """
    pts = _points(window, extra_points)
    out = []
    for g in sample:
        img = spec.image(g)
        moved = any(evaluate(img, spec.assignment, a) != a for a in pts)
        if img.is_identity:
            out.append(EmbeddingItem(g, RELATOR_EQUIVALENT, 0, coherent=not moved))
        else:
            out.append(EmbeddingItem(g, CERTIFIED if moved else UNVERIFIED, len(img)))
    return out


def default_sample(spec: EmbeddingSpec) -> list[Word]:
    """Generators, the relator and a few short products of the surface group."""
    gens = spec.presentation.generators
    sample = [Word.gen(g) for g in gens] + [spec.presentation.relator]
    for x, y in itertools.combinations(gens, 2):
        sample.append(Word.gen(x) * Word.gen(y).inverse())
        sample.append(Word.gen(x) * Word.gen(y) * Word.gen(x).inverse() * Word.gen(y).inverse())
    return sample


def table_hull(assign: Mapping[str, FinPerm]) -> Window:
    """Smallest window containing every tabled point."""
    radius = 0
    for p in assign.values():
        table = getattr(p, "table", None)
        if table:
            radius = max(radius, max(abs(v) for pair in table.pairs for v in pair))
    return Window(radius)


def verify_spec(spec: EmbeddingSpec, cap: int = 10**4, relator_radius: int = 50) -> dict:
    """Run every check at the budget recorded in ``spec``.

    The result carries ``replay_failures``; callers treat a nonzero count as
    failure.  Other sections are informational.
    """
    assign = spec.assignment
    report: dict = {"genus": spec.genus, "power": spec.power}
    log = spec.log
    budget = spec.budget
    failures = log.failed_replays(assign) if log is not None else []
    report["replay"] = {"witnesses": len(log) if log is not None else 0, "failures": failures}
    report["replay_failures"] = len(failures)

    hull = table_hull(assign)
    if budget is not None:
        win = budget.window_set
        report["freeness"] = check_freeness(assign, budget.word_len, hull).to_json()
        witness_words = [w.word for w in log.witnesses("Mapping")] if log is not None else []
        report["transitivity"] = [
            check_transitivity(assign, k, win, budget.word_len, witness_words).to_json()
            for k in range(1, budget.tuple_max + 1)
        ]
        chains = {}
        if log is not None:
            for wit in log.witnesses("LongOrbit"):
                chains.setdefault(wit.word, []).extend(wit.data["chain"])
        orbits = []
        for w in budget.designated:
            rep = orbit_structure(w, assign, win, cap)
            item = {
                "word": str(w),
                "all_finite": rep.all_finite,
                "max_length": rep.max_length,
                "lengths": list(rep.orbit_lengths),
            }
            if rep.all_finite:
                nd = check_nondiscrete(w, assign, win, cap, chains.get(w, ()), hull.radius + 1)
                item["nondiscrete"] = nd.to_json()
            orbits.append(item)
        report["orbits"] = orbits

    rel = spec.relator_image()
    rel_win = Window(relator_radius)
    report["relator"] = {
        "symbolic_identity": rel.is_identity,
        "fixes_window": all(evaluate(rel, assign, a) == a for a in rel_win),
        "radius": relator_radius,
    }
    items = check_embedding(spec, default_sample(spec), hull)
    report["embedding"] = [it.to_json() for it in items]
    return report


__all__ = [
    "CERTIFIED",
    "RELATOR_EQUIVALENT",
    "UNVERIFIED",
    "check_embedding",
    "check_freeness",
    "check_nondiscrete",
    "check_nondiscrete_pair",
    "check_transitivity",
    "default_sample",
    "moved_by_power",
    "table_hull",
    "verify_spec",
]
