"""Requirement scheduling, finalization and assembly of the surface-group maps.

The construction works over the alphabet ``sigma, tau1, ..., tauN`` with
``sigma`` the shift.  Every requirement in a finite budget is discharged in
a fixed order by one forcing step; the tables are then completed to total
permutations and the surface generators are sent to words in them.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

from . import surface
from .forcing import (
    SIGMA,
    Extension,
    PartialAssignment,
    Witness,
    _finite_orbit,
    _long_orbit,
    _mapping,
    _nontrivial,
)
from .permutation import FinPerm, Window
from .words import Word, commutator, enumerate_reduced_words, is_conjugate_power_of, product

GAMMA = "gamma"


class InvalidRank(ValueError):
    """The assignment has too few generators for the requested genus."""


def free_generator_names(n_free: int) -> tuple[str, ...]:
    return tuple(f"tau{i}" for i in range(1, n_free + 1))


@dataclass(frozen=True)
class ConstructionBudget:
    n_free: int = 2
    word_len: int = 2
    tuple_max: int = 1
    window: int = 1
    orbit_target: int = 2
    designated: tuple[Word, ...] = ()
    seed: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "designated", tuple(self.designated))
        if self.n_free < 1:
            raise ValueError("n_free must be at least 1")
        for name in ("word_len", "tuple_max", "window", "orbit_target"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        alphabet = set(self.alphabet)
        for w in self.designated:
            if w.is_identity:
                raise ValueError("designated words must be nonempty")
            if w.generators() - alphabet:
                raise ValueError(f"designated word {w} uses letters outside {sorted(alphabet)}")
            if is_conjugate_power_of(w, SIGMA):
                raise ValueError(f"designated word {w} is conjugate to a power of {SIGMA}")

    @property
    def free_generators(self) -> tuple[str, ...]:
        return free_generator_names(self.n_free)

    @property
    def alphabet(self) -> tuple[str, ...]:
        return (SIGMA,) + self.free_generators

    @property
    def window_set(self) -> Window:
        return Window(self.window)

    def to_json(self) -> dict:
        return {
            "n_free": self.n_free,
            "word_len": self.word_len,
            "tuple_max": self.tuple_max,
            "window": self.window,
            "orbit_target": self.orbit_target,
            "designated": [str(w) for w in self.designated],
            "seed": self.seed,
        }

    @classmethod
    def from_json(cls, data: Mapping) -> ConstructionBudget:
        return cls(
            n_free=data["n_free"],
            word_len=data["word_len"],
            tuple_max=data["tuple_max"],
            window=data["window"],
            orbit_target=data["orbit_target"],
            designated=tuple(Word.parse(w) for w in data.get("designated", ())),
            seed=data.get("seed"),
        )


@dataclass(frozen=True)
class Freeness:
    word: Word

    def discharge(self, assign: PartialAssignment, budget: ConstructionBudget) -> Extension:
        return _nontrivial(assign, self.word)

    def to_json(self) -> dict:
        return {"kind": "Freeness", "word": str(self.word)}


@dataclass(frozen=True)
class Transitivity:
    x: tuple[int, ...]
    y: tuple[int, ...]

    def discharge(self, assign: PartialAssignment, budget: ConstructionBudget) -> Extension:
        return _mapping(assign, self.x, self.y)

    def to_json(self) -> dict:
        return {"kind": "Transitivity", "x": list(self.x), "y": list(self.y)}


@dataclass(frozen=True)
class LongOrbit:
    word: Word
    t: int

    def discharge(self, assign: PartialAssignment, budget: ConstructionBudget) -> Extension:
        return _long_orbit(assign, self.word, self.t)

    def to_json(self) -> dict:
        return {"kind": "LongOrbit", "word": str(self.word), "t": self.t}


@dataclass(frozen=True)
class FiniteOrbit:
    word: Word
    a: int

    def discharge(self, assign: PartialAssignment, budget: ConstructionBudget) -> Extension:
        # window orbits are closed at length >= orbit_target so long orbits meet the window
        return _finite_orbit(assign, self.word, self.a, max(1, budget.orbit_target))

    def to_json(self) -> dict:
        return {"kind": "FiniteOrbit", "word": str(self.word), "a": self.a}


Requirement = Freeness | Transitivity | LongOrbit | FiniteOrbit


def requirement_from_json(data: Mapping) -> Requirement:
    kind = data["kind"]
    if kind == "Freeness":
        return Freeness(Word.parse(data["word"]))
    if kind == "Transitivity":
        return Transitivity(tuple(data["x"]), tuple(data["y"]))
    if kind == "LongOrbit":
        return LongOrbit(Word.parse(data["word"]), int(data["t"]))
    if kind == "FiniteOrbit":
        return FiniteOrbit(Word.parse(data["word"]), int(data["a"]))
    raise ValueError(f"unknown requirement kind {kind!r}")


def enumerate_requirements(budget: ConstructionBudget) -> list[Requirement]:
    """All requirements of ``budget`` in discharge order.

    Freeness for every reduced word up to ``word_len`` (free generators
    first, then ``sigma``), transitivity for every pair of ``k``-tuples of
    distinct window points with ``k <= tuple_max``, then for each
    designated word the long-orbit targets ``1..orbit_target`` and finally
    the finite-orbit requirement at every window point.
    """
    reqs: list[Requirement] = []
    words_alphabet = budget.free_generators + (SIGMA,)
    reqs.extend(Freeness(w) for w in enumerate_reduced_words(words_alphabet, budget.word_len))
    pts = list(budget.window_set)
    for k in range(1, budget.tuple_max + 1):
        tuples = list(itertools.permutations(pts, k))
        reqs.extend(Transitivity(x, y) for x in tuples for y in tuples)
    for w in budget.designated:
        reqs.extend(LongOrbit(w, t) for t in range(1, budget.orbit_target + 1))
    for w in budget.designated:
        reqs.extend(FiniteOrbit(w, a) for a in pts)
    return reqs


@dataclass
class LogEntry:
    requirement: Requirement
    extension: Extension

    @property
    def witness(self) -> Witness:
        return self.extension.witness

    def to_json(self) -> dict:
        return {**self.extension.to_json(), "requirement": self.requirement.to_json()}

    @classmethod
    def from_json(cls, data: Mapping) -> LogEntry:
        ext = Extension(
            data["op"],
            Witness.from_json(data["witness"]),
            [(g, int(s), int(t)) for g, s, t in data["inserted"]],
        )
        return cls(requirement_from_json(data["requirement"]), ext)


@dataclass
class ConstructionLog:
    entries: list[LogEntry] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[LogEntry]:
        return iter(self.entries)

    def witnesses(self, kind: str | None = None) -> list[Witness]:
        return [e.witness for e in self.entries if kind is None or e.witness.kind == kind]

    def to_records(self) -> list[dict]:
        return [e.to_json() for e in self.entries]

    def to_jsonl(self) -> str:
        return "".join(json.dumps(r, sort_keys=True) + "\n" for r in self.to_records())

    @classmethod
    def from_records(cls, records: Iterable[Mapping]) -> ConstructionLog:
        return cls([LogEntry.from_json(r) for r in records])

    @classmethod
    def from_jsonl(cls, text: str) -> ConstructionLog:
        return cls.from_records(json.loads(line) for line in text.splitlines() if line.strip())

    def rebuild(self, generators: Sequence[str], protected: Window = Window(0)) -> PartialAssignment:
        """Tables obtained by replaying every logged insertion."""
        pa = PartialAssignment(generators, protected)
        for e in self.entries:
            for g, s, t in e.extension.inserted:
                pa.insert(g, s, t)
        return pa

    def failed_replays(self, assign) -> list[int]:
        """Indices of entries whose witness no longer holds on ``assign``."""
        return [i for i, e in enumerate(self.entries) if not e.witness.replay(assign)]


def run_construction(budget: ConstructionBudget) -> tuple[PartialAssignment, ConstructionLog]:
    """Discharge every requirement of ``budget`` in order."""
    assign = PartialAssignment(budget.free_generators, budget.window_set, SIGMA, seed=budget.seed)
    log = ConstructionLog()
    for req in enumerate_requirements(budget):
        log.entries.append(LogEntry(req, req.discharge(assign, budget)))
    return assign, log


def finalize(assign: PartialAssignment) -> dict[str, FinPerm]:
    return assign.finalize()


def default_symbols(genus: int, generators: Sequence[str]) -> dict[str, str]:
    """Send the free target alphabet of ``genus`` positionally onto ``generators``."""
    names = surface.free_alphabet(genus)
    if len(generators) < len(names):
        raise InvalidRank(f"genus {genus} needs {len(names)} generators, assignment has {len(generators)}")
    return dict(zip(names, generators))


def n_free_for_genus(genus: int) -> int:
    """Free generators besides ``sigma`` needed for ``genus``."""
    return len(surface.free_alphabet(genus)) - 1


def gamma_word(genus: int) -> Word:
    """``[phi1,phi1']...[phir,phir']``, followed by ``tau`` for odd genus."""
    r, odd = divmod(genus, 2)
    w = product(commutator(Word.gen(f"phi{i}"), Word.gen(f"phi{i}'")) for i in range(1, r + 1))
    return w * Word.gen("tau") if odd else w


def designated_for_genus(genus: int, symbols: Mapping[str, str] | None = None) -> tuple[Word, ...]:
    """Words whose cyclic groups must be non-discrete for the surface maps."""
    symbols = symbols or default_symbols(genus, (SIGMA,) + free_generator_names(n_free_for_genus(genus)))
    sub = {k: Word.gen(v) for k, v in symbols.items()}
    gamma = gamma_word(genus).substitute(sub)
    if genus % 2:
        return (sub["tau"], gamma)
    return (gamma,)


@dataclass
class EmbeddingSpec:
    """A surface-group homomorphism into the finalized permutations.

    ``images`` are words in the free target alphabet plus the symbol
    ``gamma``; ``symbols`` names the assignment generator standing for each
    free target letter.
    """

    assignment: dict[str, FinPerm]
    genus: int
    power: int
    symbols: dict[str, str]
    images: dict[str, Word]
    budget: ConstructionBudget | None = None
    log: ConstructionLog | None = None

    @property
    def r(self) -> int:
        return self.genus // 2

    @property
    def parity(self) -> str:
        return "odd" if self.genus % 2 else "even"

    @property
    def presentation(self) -> surface.Presentation:
        return surface.presentation(self.genus)

    def _substitution(self) -> dict[str, Word]:
        sub = {k: Word.gen(v) for k, v in self.symbols.items()}
        sub[GAMMA] = gamma_word(self.genus).substitute(sub)
        return sub

    def expanded_images(self) -> dict[str, Word]:
        """Generator images as words in the assignment alphabet."""
        sub = self._substitution()
        return {g: w.substitute(sub) for g, w in self.images.items()}

    def image(self, g: Word) -> Word:
        """Image of a surface-group word, in the assignment alphabet."""
        return g.substitute(self.expanded_images())

    def relator_image(self) -> Word:
        return self.image(self.presentation.relator)

    def to_json(self) -> dict:
        out = {
            "genus": self.genus,
            "parity": self.parity,
            "power": self.power,
            "symbols": dict(self.symbols),
            "assignment": {g: p.to_json() for g, p in self.assignment.items()},
            "images": {g: str(w) for g, w in self.images.items()},
        }
        if self.budget is not None:
            out["budget"] = self.budget.to_json()
        if self.log is not None:
            out["log"] = self.log.to_records()
        return out

    @classmethod
    def from_json(cls, data: Mapping) -> EmbeddingSpec:
        return cls(
            assignment={g: FinPerm.from_json(p) for g, p in data["assignment"].items()},
            genus=int(data["genus"]),
            power=int(data["power"]),
            symbols=dict(data["symbols"]),
            images={g: Word.parse(w) for g, w in data["images"].items()},
            budget=ConstructionBudget.from_json(data["budget"]) if "budget" in data else None,
            log=ConstructionLog.from_records(data["log"]) if "log" in data else None,
        )


def _check_rank(assign: Mapping[str, FinPerm], symbols: Mapping[str, str], genus: int) -> None:
    need = set(surface.free_alphabet(genus))
    if set(symbols) != need:
        raise InvalidRank(f"symbols must cover exactly {sorted(need)}")
    missing = set(symbols.values()) - set(assign)
    if missing:
        raise InvalidRank(f"assignment lacks {sorted(missing)}")
    if len(set(symbols.values())) != len(symbols):
        raise InvalidRank("free target letters must go to distinct generators")


def _assemble(assign, genus, n, symbols, images, budget, log) -> EmbeddingSpec:
    if n < 1:
        raise ValueError("power must be at least 1")
    symbols = dict(symbols or default_symbols(genus, list(assign)))
    _check_rank(assign, symbols, genus)
    spec = EmbeddingSpec(dict(assign), genus, n, symbols, images, budget, log)
    rel = spec.relator_image()
    if not rel.is_identity:
        raise surface.RelatorError(f"relator image does not collapse: {rel}")
    return spec


def surface_hom_even(
    assign: Mapping[str, FinPerm],
    r: int,
    n: int = 2,
    symbols: Mapping[str, str] | None = None,
    budget: ConstructionBudget | None = None,
    log: ConstructionLog | None = None,
) -> EmbeddingSpec:
    """``a_i -> phi_i``, ``b_i -> gamma^n phi_i gamma^-n`` (primed alike)."""
    g = Word.gen(GAMMA, n)
    images: dict[str, Word] = {}
    for i in range(1, r + 1):
        for p in ("", "'"):
            phi = Word.gen(f"phi{i}{p}")
            images[f"a{i}{p}"] = phi
            images[f"b{i}{p}"] = g * phi * g.inverse()
    ordered = {x: images[x] for x in surface.presentation_even(r).generators}
    return _assemble(assign, 2 * r, n, symbols, ordered, budget, log)


def surface_hom_odd(
    assign: Mapping[str, FinPerm],
    r: int,
    n: int = 2,
    symbols: Mapping[str, str] | None = None,
    budget: ConstructionBudget | None = None,
    log: ConstructionLog | None = None,
) -> EmbeddingSpec:
    """``a_i -> phi_i``, ``b -> psi xi^-1``, ``b' -> tau``, ``c_i -> psi phi_i psi^-1``
    with ``psi = gamma^n`` and ``xi = tau^n``.

    The generator images are also checked against the twist-and-fold route
    ``k o (delta o zeta)^n``.
    """
    psi = Word.gen(GAMMA, n)
    xi = Word.gen("tau", n)
    images: dict[str, Word] = {"b": psi * xi.inverse(), "b'": Word.gen("tau")}
    for i in range(1, r + 1):
        for p in ("", "'"):
            phi = Word.gen(f"phi{i}{p}")
            images[f"a{i}{p}"] = phi
            images[f"c{i}{p}"] = psi * phi * psi.inverse()
    ordered = {x: images[x] for x in surface.presentation_odd(r).generators}
    spec = _assemble(assign, 2 * r + 1, n, symbols, ordered, budget, log)
    mismatched = twist_route_mismatches(spec)
    if mismatched:
        raise surface.RelatorError(f"images disagree with the twist route on {mismatched}")
    return spec


def surface_hom(assign, genus: int, n: int = 2, **kw) -> EmbeddingSpec:
    if genus < 2:
        raise ValueError(f"genus must be at least 2, got {genus}")
    r, odd = divmod(genus, 2)
    return (surface_hom_odd if odd else surface_hom_even)(assign, r, n, **kw)


def twist_route_mismatches(spec: EmbeddingSpec) -> list[str]:
    """Generators whose image differs from the twist-and-fold map of the same power."""
    seq = surface.EventuallyFaithfulSequence(spec.genus)
    sub = {k: Word.gen(v) for k, v in spec.symbols.items()}
    expanded = spec.expanded_images()
    bad = []
    for g in spec.presentation.generators:
        route = seq.image(Word.gen(g), spec.power).substitute(sub)
        if route != expanded[g]:
            bad.append(g)
    return bad
