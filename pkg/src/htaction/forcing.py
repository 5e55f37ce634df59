"""Growing finite partial permutations to discharge one requirement at a time.

A :class:`PartialAssignment` holds a finite injective table for every free
generator, with the distinguished generator pinned to the shift
``a -> a + 1``.  Each ``force_*`` function extends the tables (never
rewriting a pair) so that a single requirement holds for *every* later
completion, and returns a :class:`Witness` that can be replayed to confirm
it.

Fresh points are drawn in the order ``0, 1, -1, 2, -2, ...`` skipping the
protected window, every point already present in some table, and anything
reserved by the current call.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

from .permutation import FinPerm, PartialInjection, Shift, Tabled, Window
from .words import Letter, Word, cyclic_reduce, evaluate, trace

SIGMA = "sigma"


class ConflictImpossible(AssertionError):
    """A table insertion clashed with existing data.

    Freshness makes this unreachable when preconditions hold; seeing it
    means a bug, not a bad input.
    """


def _candidate(idx: int) -> int:
    if idx == 0:
        return 0
    return (idx + 1) // 2 if idx % 2 else -(idx // 2)


class PartialAssignment:
    """Finite partial bijections for the free generators plus the pinned shift.

    Mutated only through :meth:`insert` (called by the ``force_*``
    operations); growth is monotone.
    """

    def __init__(
        self,
        generators: Sequence[str],
        protected: Window = Window(0),
        sigma: str = SIGMA,
        seed: int | None = None,
    ):
        if sigma in generators:
            raise ValueError(f"{sigma!r} is pinned to the shift and cannot be tabled")
        if len(set(generators)) != len(generators):
            raise ValueError("generator names must be distinct")
        self.sigma = sigma
        self.generators = tuple(generators)
        self.protected = protected
        self.seed = seed
        self._rng = random.Random(seed) if seed is not None else None
        self._fwd: dict[str, dict[int, int]] = {g: {} for g in self.generators}
        self._bwd: dict[str, dict[int, int]] = {g: {} for g in self.generators}
        self._touched: set[int] = set()
        self._any_dom: set[int] = set()
        self._any_cod: set[int] = set()
        self._frontier = 0

    @property
    def alphabet(self) -> tuple[str, ...]:
        return (self.sigma,) + self.generators

    def copy(self) -> PartialAssignment:
        other = PartialAssignment(self.generators, self.protected, self.sigma)
        other.seed = self.seed
        other._rng = random.Random()
        if self._rng is not None:
            other._rng.setstate(self._rng.getstate())
        else:
            other._rng = None
        other._fwd = {g: dict(t) for g, t in self._fwd.items()}
        other._bwd = {g: dict(t) for g, t in self._bwd.items()}
        other._touched = set(self._touched)
        other._any_dom = set(self._any_dom)
        other._any_cod = set(self._any_cod)
        other._frontier = self._frontier
        return other

    def table(self, g: str) -> PartialInjection:
        return PartialInjection(self._fwd[g])

    def tables(self) -> dict[str, PartialInjection]:
        return {g: self.table(g) for g in self.generators}

    def pairs(self) -> Iterator[tuple[str, int, int]]:
        for g in self.generators:
            for s, t in sorted(self._fwd[g].items()):
                yield g, s, t

    def size(self) -> int:
        return sum(len(t) for t in self._fwd.values())

    def contains(self, other: PartialAssignment) -> bool:
        """True if every pair of ``other`` is present here."""
        return all(self._fwd.get(g, {}).get(s) == t for g, s, t in other.pairs())

    def is_touched(self, a: int) -> bool:
        return a in self._touched

    def step(self, g: str, sign: int, a: int) -> int | None:
        """Image of ``a`` under one letter, or ``None`` if not yet defined."""
        if g == self.sigma:
            return a + sign
        table = self._fwd[g] if sign > 0 else self._bwd[g]
        return table.get(a)

    def insert(self, g: str, src: int, tgt: int) -> None:
        fwd, bwd = self._fwd[g], self._bwd[g]
        if src in fwd or tgt in bwd:
            if fwd.get(src) == tgt:
                return
            raise ConflictImpossible(f"{g}: cannot add {src}->{tgt}")
        fwd[src] = tgt
        bwd[tgt] = src
        self._touched.add(src)
        self._touched.add(tgt)
        self._any_dom.add(src)
        self._any_cod.add(tgt)

    def insert_letter(self, letter: Letter, a: int, b: int) -> tuple[str, int, int]:
        """Record ``a`` under ``letter`` equals ``b``; returns the stored pair."""
        g, s = letter
        pair = (g, a, b) if s > 0 else (g, b, a)
        self.insert(*pair)
        return pair

    def is_fresh(self, a: int, reserved: Iterable[int] | set[int] = ()) -> bool:
        return a not in self.protected and a not in self._touched and a not in reserved

    def iter_fresh(self, reserved: set[int] | frozenset[int] = frozenset()) -> Iterator[int]:
        """Fresh points in the deterministic order (or a seeded variant)."""
        while self._frontier_blocked():
            self._frontier += 1
        idx = self._frontier
        if self._rng is not None:
            idx += self._rng.randrange(64)
        while True:
            a = _candidate(idx)
            if self.is_fresh(a, reserved):
                yield a
            idx += 1

    def _frontier_blocked(self) -> bool:
        a = _candidate(self._frontier)
        return a in self.protected or a in self._touched

    def finalize(self) -> dict[str, FinPerm]:
        """Total permutations: each table completed canonically, the shift kept."""
        out: dict[str, FinPerm] = {self.sigma: Shift(1)}
        for g in self.generators:
            out[g] = Tabled(self.table(g))
        return out

    def to_json(self) -> dict:
        return {
            "sigma": self.sigma,
            "protected": self.protected.radius,
            "tables": {g: [[s, t] for s, t in sorted(self._fwd[g].items())] for g in self.generators},
        }

    @classmethod
    def from_json(cls, data: Mapping) -> PartialAssignment:
        tables = data["tables"]
        pa = cls(list(tables), Window(int(data.get("protected", 0))), data.get("sigma", SIGMA))
        for g, pairs in tables.items():
            for s, t in pairs:
                pa.insert(g, int(s), int(t))
        return pa


def fresh_points(assign: PartialAssignment, exclusions: Iterable[int] = (), count: int = 1) -> list[int]:
    """``count`` distinct fresh points, smallest absolute value first, positive before negative."""
    reserved = set(exclusions)
    out = []
    for a in assign.iter_fresh(reserved):
        out.append(a)
        reserved.add(a)
        if len(out) == count:
            break
    return out


WITNESS_KINDS = ("Nontrivial", "Mapping", "LongOrbit", "FiniteOrbit")


@dataclass(frozen=True)
class Witness:
    """Replayable certificate for one discharged requirement.

    ``data`` by kind:

    - Nontrivial: ``point``, ``image`` with ``point^word == image != point``
    - Mapping: ``x``, ``y``, ``r`` with ``x[j]^word == y[j]``
    - LongOrbit: ``chain``, consecutive entries related by ``word``, all distinct
    - FiniteOrbit: ``point``, ``conjugator``, ``core``, ``entry``, ``cycle``;
      ``point^conjugator == entry`` and ``cycle`` is the closed orbit of
      ``entry`` under ``core`` (so the orbit of ``point`` under ``word``
      has ``len(cycle)`` elements)
    """

    kind: str
    word: Word
    data: Mapping = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in WITNESS_KINDS:
            raise ValueError(f"unknown witness kind {self.kind!r}")

    def to_json(self) -> dict:
        return {"kind": self.kind, "word": str(self.word), **{k: _jsonable(v) for k, v in self.data.items()}}

    @classmethod
    def from_json(cls, data: Mapping) -> Witness:
        rest = {k: v for k, v in data.items() if k not in ("kind", "word")}
        return cls(data["kind"], Word.parse(data["word"]), rest)

    def replay(self, assign) -> bool:
        """Re-check the certified fact against ``assign``.

        ``assign`` may be a :class:`PartialAssignment` (only defined data is
        used) or a mapping of generators to total permutations.
        """
        d = self.data
        if self.kind == "Nontrivial":
            return _image(self.word, assign, d["point"]) == d["image"] != d["point"]
        if self.kind == "Mapping":
            if len(d["x"]) != len(d["y"]):
                return False
            return all(_image(self.word, assign, x) == y for x, y in zip(d["x"], d["y"]))
        if self.kind == "LongOrbit":
            chain = list(d["chain"])
            if len(set(chain)) != len(chain):
                return False
            return all(_image(self.word, assign, p) == q for p, q in zip(chain, chain[1:]))
        return self._replay_finite(assign)

    def _replay_finite(self, assign) -> bool:
        d = self.data
        core, conj = Word.parse(d["core"]), Word.parse(d["conjugator"])
        if conj * core * conj.inverse() != self.word:
            return False
        if _image(conj, assign, d["point"]) != d["entry"]:
            return False
        cycle = list(d["cycle"])
        if not cycle or cycle[0] != d["entry"] or len(set(cycle)) != len(cycle):
            return False
        for i, p in enumerate(cycle):
            if _image(core, assign, p) != cycle[(i + 1) % len(cycle)]:
                return False
        if isinstance(assign, PartialAssignment):
            return True
        # total assignment: the orbit of the original point has the same size
        a = b = d["point"]
        for n in range(1, len(cycle) + 1):
            b = evaluate(self.word, assign, b)
            if b == a:
                return n == len(cycle)
        return False


def _image(w: Word, assign, a: int) -> int | None:
    """``a`` under ``w``, or ``None`` where a partial assignment is undefined."""
    if not isinstance(assign, PartialAssignment):
        return evaluate(w, assign, a)
    for g, e in w.runs:
        if g == assign.sigma:
            a += e
            continue
        sign = 1 if e > 0 else -1
        for _ in range(abs(e)):
            a = assign.step(g, sign, a)
            if a is None:
                return None
    return a


def _jsonable(v):
    if isinstance(v, (tuple, list)):
        return [_jsonable(x) for x in v]
    if isinstance(v, Word):
        return str(v)
    return v


@dataclass
class Extension:
    """Outcome of one ``force_*`` call."""

    op: str
    witness: Witness
    inserted: list[tuple[str, int, int]]

    def to_json(self) -> dict:
        return {
            "op": self.op,
            "word": str(self.witness.word),
            "inserted": [list(p) for p in self.inserted],
            "witness": self.witness.to_json(),
        }


class _Walker:
    """Extends tables along a letter sequence, one fresh point per undefined step."""

    def __init__(self, assign: PartialAssignment, reserved: set[int]):
        self.assign = assign
        self.reserved = reserved
        self.inserted: list[tuple[str, int, int]] = []

    def shift_run(self, letters: Sequence[Letter], i: int) -> int:
        sigma = self.assign.sigma
        r = 0
        while i < len(letters) and letters[i][0] == sigma:
            r += letters[i][1]
            i += 1
        return r

    def fresh(self, offset: int = 0) -> int:
        """A fresh point ``c`` whose translate ``c + offset`` is fresh too."""
        for c in self.assign.iter_fresh(self.reserved):
            if offset == 0 or self.assign.is_fresh(c + offset, self.reserved):
                self.reserved.add(c)
                self.reserved.add(c + offset)
                return c
        raise AssertionError("unreachable: the integers are infinite")

    def start(self, letters: Sequence[Letter]) -> int:
        return self.fresh(self.shift_run(letters, 0))

    def define(self, letter: Letter, a: int, b: int) -> None:
        self.inserted.append(self.assign.insert_letter(letter, a, b))

    def walk(self, letters: Sequence[Letter], a: int) -> list[int]:
        """Apply ``letters`` from ``a``, creating fresh targets where undefined."""
        points = [a]
        for i, letter in enumerate(letters):
            b = self.assign.step(letter[0], letter[1], a)
            if b is None:
                b = self.fresh(self.shift_run(letters, i + 1))
                self.define(letter, a, b)
            points.append(b)
            a = b
        return points


def _require_free_letter(w: Word, sigma: str, what: str) -> None:
    core, _ = cyclic_reduce(w)
    if all(g == sigma for g, _ in core.letters):
        raise ValueError(f"{what}: {w} is conjugate to a power of {sigma}")


def force_nontrivial(assign: PartialAssignment, v: Word) -> tuple[PartialAssignment, Witness]:
    """Make ``v`` move some point, for every completion of ``assign``.

    ``v`` is read as ``sigma^r1 v1 sigma^r2 ... vk sigma^r(k+1)``; a fresh
    start ``a1`` is chosen and every ``vi`` is defined on fresh points so
    that ``a1^v`` lands on a point distinct from ``a1``.  Pure powers of the
    shift need no extension.
    """
    ext = _nontrivial(assign, v)
    return assign, ext.witness


def _nontrivial(assign: PartialAssignment, v: Word) -> Extension:
    if v.is_identity:
        raise ValueError("the empty word cannot be made nontrivial")
    sigma = assign.sigma
    if v.generators() == {sigma}:
        r = sum(s for _, s in v.letters)
        return Extension("force_nontrivial", Witness("Nontrivial", v, {"point": 0, "image": r}), [])
    walker = _Walker(assign, set())
    letters = v.letters
    a = walker.start(letters)
    points = walker.walk(letters, a)
    if points[-1] == a:
        raise ConflictImpossible(f"{v} fixed its fresh start {a}")
    return Extension("force_nontrivial", Witness("Nontrivial", v, {"point": a, "image": points[-1]}), walker.inserted)


def force_mapping(
    assign: PartialAssignment, x: Sequence[int], y: Sequence[int], gen: str | None = None
) -> tuple[PartialAssignment, Witness]:
    """Make ``sigma^r * gen * sigma^-r`` send each ``x[j]`` to ``y[j]``.

    ``r`` is the first shift (order ``0, 1, -1, 2, ...``) for which the
    translated sources avoid the protected window and all table domains, and
    the translated targets avoid the window and all table codomains.
    ``gen`` defaults to the first free generator.
    """
    ext = _mapping(assign, x, y, gen)
    return assign, ext.witness


def _mapping(assign: PartialAssignment, x: Sequence[int], y: Sequence[int], gen: str | None = None) -> Extension:
    x, y = tuple(x), tuple(y)
    if len(x) != len(y):
        raise ValueError("tuples must have the same length")
    if len(set(x)) != len(x) or len(set(y)) != len(y):
        raise ValueError("tuple entries must be distinct")
    if not assign.generators:
        raise ValueError("mapping requires at least one free generator")
    gen = gen or assign.generators[0]
    doms, cods, rad = assign._any_dom, assign._any_cod, assign.protected.radius

    def ok(r: int) -> bool:
        for xs in x:
            p = xs + r
            if -rad <= p <= rad or p in doms:
                return False
        for ys in y:
            p = ys + r
            if -rad <= p <= rad or p in cods:
                return False
        return True

    idx = 0
    while not ok(_candidate(idx)):
        idx += 1
    r = _candidate(idx)
    inserted = []
    for xs, ys in zip(x, y):
        assign.insert(gen, xs + r, ys + r)
        inserted.append((gen, xs + r, ys + r))
    sig = assign.sigma
    sign = 1 if r >= 0 else -1
    word = Word._trusted(((sig, sign),) * abs(r) + ((gen, 1),) + ((sig, -sign),) * abs(r))
    return Extension("force_mapping", Witness("Mapping", word, {"x": list(x), "y": list(y), "r": r}), inserted)


def force_long_orbit(assign: PartialAssignment, w: Word, t: int) -> tuple[PartialAssignment, Witness]:
    """Give ``<w>`` an orbit with at least ``t`` points.

    Starting from a fresh ``b``, the letters of ``w^(t-1)`` are walked,
    defining every missing step on a fresh point, so ``b, b^w, ...,
    b^(w^(t-1))`` are pairwise distinct.
    """
    ext = _long_orbit(assign, w, t)
    return assign, ext.witness


def _long_orbit(assign: PartialAssignment, w: Word, t: int) -> Extension:
    _require_free_letter(w, assign.sigma, "long orbit")
    walker = _Walker(assign, set())
    if t <= 1:
        b = walker.fresh()
        return Extension("force_long_orbit", Witness("LongOrbit", w, {"chain": [b]}), [])
    letters = w.letters * (t - 1)
    b = walker.start(letters)
    points = walker.walk(letters, b)
    k = len(w)
    chain = points[::k]
    if len(set(chain)) != len(chain):
        raise ConflictImpossible(f"chain for {w} repeats: {chain}")
    return Extension("force_long_orbit", Witness("LongOrbit", w, {"chain": chain}), walker.inserted)


def force_finite_orbit(
    assign: PartialAssignment, w: Word, a: int, min_length: int = 1
) -> tuple[PartialAssignment, Witness]:
    """Close the orbit of ``a`` under ``<w>``.

    ``w`` is replaced by its cyclically reduced core ``c`` (after walking the
    conjugator from ``a``).  The core is applied letter by letter forwards
    until the first undefined step at ``b`` and backwards until the first
    undefined step at ``c0``; a route of core letters through fresh points
    then joins ``b`` to ``c0``.  With ``min_length`` above the natural cycle
    length the route is lengthened by whole copies of the core.  An orbit
    that is already closed is left as it is.
    """
    ext = _finite_orbit(assign, w, a, min_length)
    return assign, ext.witness


def _finite_orbit(assign: PartialAssignment, w: Word, a: int, min_length: int = 1) -> Extension:
    _require_free_letter(w, assign.sigma, "finite orbit")
    core, conj = cyclic_reduce(w)
    letters = core.letters
    k = len(letters)
    walker = _Walker(assign, {a})
    entry = walker.walk(conj.letters, a)[-1]
    walker.reserved.add(entry)
    step = assign.step
    # generous bound; an injective partial map can only return to the start
    limit = k * (2 * assign.size() + 4)

    p, n = entry, 0
    forward = [entry]
    while True:
        g, s = letters[n % k]
        q = step(g, s, p)
        if q is None:
            break
        p, n = q, n + 1
        if n % k == 0:
            if p == entry:
                return _closed(w, a, conj, core, entry, forward, walker.inserted)
            forward.append(p)
        if n > limit:
            raise ConflictImpossible("forward trace did not terminate")
        walker.reserved.add(p)
    b, n_fwd, s_idx = p, n, n % k

    p, n = entry, 0
    while True:
        j = k - 1 - (n % k)
        g, s = letters[j]
        q = step(g, -s, p)
        if q is None:
            break
        p, n = q, n + 1
        if n > limit:
            raise ConflictImpossible("backward trace did not terminate")
        walker.reserved.add(p)
    c0, n_bwd, l_idx = p, n, k - 1 - (n % k)

    route_len = (l_idx - s_idx) % k + 1
    while (n_fwd + route_len + n_bwd) // k < min_length:
        route_len += k
    route = [letters[(s_idx + i) % k] for i in range(route_len)]
    first, last = route[0], route[-1]
    if route_len == 1:
        walker.define(first, b, c0)
    else:
        middle = route[1:-1]
        d1 = walker.fresh(walker.shift_run(middle, 0))
        walker.define(first, b, d1)
        d2 = walker.walk(middle, d1)[-1]
        walker.define(last, d2, c0)

    cycle = [entry]
    p = entry
    for _ in range((n_fwd + route_len + n_bwd) // k):
        p = trace(core, assign, p).end
        cycle.append(p)
    if cycle[-1] != entry or len(set(cycle[:-1])) != len(cycle) - 1:
        raise ConflictImpossible(f"route for {w} at {a} did not close")
    return Extension(
        "force_finite_orbit",
        Witness("FiniteOrbit", w, _finite_data(a, conj, core, entry, cycle[:-1])),
        walker.inserted,
    )


def _finite_data(a, conj, core, entry, cycle) -> dict:
    return {"point": a, "conjugator": str(conj), "core": str(core), "entry": entry, "cycle": list(cycle)}


def _closed(w, a, conj, core, entry, cycle, inserted) -> Extension:
    return Extension(
        "force_finite_orbit", Witness("FiniteOrbit", w, _finite_data(a, conj, core, entry, cycle)), inserted
    )
