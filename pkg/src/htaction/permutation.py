"""Permutations of the integers with finite descriptions.

Two kinds of total permutation are supported: the pure shift ``a -> a + s``
and a finite table completed to a bijection of the whole line by the
anchored order alignment (see :func:`complete`).  Everything here is
immutable.
"""
from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Mapping

DEFAULT_CAP = 10**6


class OrbitExceedsCap(RuntimeError):
    """An orbit through the window did not close within the iteration cap."""

    def __init__(self, point: int, cap: int):
        super().__init__(f"orbit of {point} did not close within {cap} steps")
        self.point = point
        self.cap = cap


@dataclass(frozen=True)
class Window:
    """The integers ``-radius .. radius``."""

    radius: int

    def __post_init__(self):
        if self.radius < 0:
            raise ValueError(f"window radius must be non-negative, got {self.radius}")

    def __contains__(self, a: object) -> bool:
        return isinstance(a, int) and -self.radius <= a <= self.radius

    def __iter__(self) -> Iterator[int]:
        return iter(range(-self.radius, self.radius + 1))

    def __len__(self) -> int:
        return 2 * self.radius + 1


class PartialInjection(Mapping[int, int]):
    """A finite injective map of integers, read-only once built."""

    __slots__ = ("_fwd", "_bwd")

    def __init__(self, pairs: Iterable[tuple[int, int]] | Mapping[int, int] = ()):
        items = pairs.items() if isinstance(pairs, Mapping) else pairs
        fwd: dict[int, int] = {}
        bwd: dict[int, int] = {}
        for src, tgt in items:
            src, tgt = int(src), int(tgt)
            if fwd.get(src, tgt) != tgt:
                raise ValueError(f"source {src} mapped twice")
            if bwd.get(tgt, src) != src:
                raise ValueError(f"target {tgt} hit twice")
            fwd[src] = tgt
            bwd[tgt] = src
        self._fwd = fwd
        self._bwd = bwd

    def __getitem__(self, src: int) -> int:
        return self._fwd[src]

    def __iter__(self) -> Iterator[int]:
        return iter(self._fwd)

    def __len__(self) -> int:
        return len(self._fwd)

    def __repr__(self) -> str:
        return f"PartialInjection({dict(self.pairs)!r})"

    def __eq__(self, other: object) -> bool:
        if isinstance(other, PartialInjection):
            return self._fwd == other._fwd
        return NotImplemented

    def __hash__(self) -> int:
        return hash(frozenset(self._fwd.items()))

    def preimage(self, tgt: int) -> int | None:
        return self._bwd.get(tgt)

    @property
    def domain(self) -> frozenset[int]:
        return frozenset(self._fwd)

    @property
    def codomain(self) -> frozenset[int]:
        return frozenset(self._bwd)

    @property
    def pairs(self) -> tuple[tuple[int, int], ...]:
        """Pairs sorted by source."""
        return tuple(sorted(self._fwd.items()))

    def inverse(self) -> PartialInjection:
        return PartialInjection((t, s) for s, t in self._fwd.items())


class FinPerm:
    """Base class of the finitely described permutations of the integers."""

    def apply(self, a: int) -> int:
        raise NotImplementedError

    def apply_inverse(self, a: int) -> int:
        raise NotImplementedError

    def apply_power(self, a: int, e: int) -> int:
        """``a`` under the ``e``-th power (negative ``e`` allowed)."""
        step = self.apply if e > 0 else self.apply_inverse
        for _ in range(abs(e)):
            a = step(a)
        return a

    def inverse(self) -> FinPerm:
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError

    def __call__(self, a: int) -> int:
        return self.apply(a)

    @staticmethod
    def from_json(data: Mapping) -> FinPerm:
        kind = data.get("kind")
        if kind == "shift":
            return Shift(int(data["s"]))
        if kind == "table":
            return Tabled(PartialInjection((int(s), int(t)) for s, t in data["pairs"]))
        raise ValueError(f"unknown permutation kind {kind!r}")


@dataclass(frozen=True)
class Shift(FinPerm):
    s: int

    def apply(self, a: int) -> int:
        return a + self.s

    def apply_inverse(self, a: int) -> int:
        return a - self.s

    def apply_power(self, a: int, e: int) -> int:
        return a + e * self.s

    def inverse(self) -> Shift:
        return Shift(-self.s)

    def to_json(self) -> dict:
        return {"kind": "shift", "s": self.s}


class _Alignment:
    """Rank/select on the complement of a finite set of integers.

    The complement is indexed ``..., d_-1, d_0, d_1, ...`` with ``d_0`` its
    least non-negative element.  Negative integers are handled by mirroring
    ``a -> -1 - a`` so both halves reduce to the non-negative case.
    """

    __slots__ = ("_pos", "_neg", "_pos_gap", "_neg_gap")

    def __init__(self, excluded: Iterable[int]):
        pts = sorted(excluded)
        split = bisect_left(pts, 0)
        self._pos = pts[split:]
        self._neg = [-1 - x for x in reversed(pts[:split])]
        # x_i - i is non-decreasing; counting entries <= k locates the k-th gap
        self._pos_gap = [x - i for i, x in enumerate(self._pos)]
        self._neg_gap = [x - i for i, x in enumerate(self._neg)]

    def rank(self, a: int) -> int:
        if a >= 0:
            return a - bisect_left(self._pos, a)
        m = -1 - a
        return -1 - (m - bisect_left(self._neg, m))

    def select(self, k: int) -> int:
        if k >= 0:
            return k + bisect_right(self._pos_gap, k)
        m = -1 - k
        return -1 - (m + bisect_right(self._neg_gap, m))


@dataclass(frozen=True)
class Tabled(FinPerm):
    """A finite table completed canonically to a bijection of the integers."""

    table: PartialInjection = field(default_factory=PartialInjection)

    @cached_property
    def _dom(self) -> _Alignment:
        return _Alignment(self.table.domain)

    @cached_property
    def _cod(self) -> _Alignment:
        return _Alignment(self.table.codomain)

    def apply(self, a: int) -> int:
        tgt = self.table.get(a)
        if tgt is not None:
            return tgt
        return self._cod.select(self._dom.rank(a))

    def apply_inverse(self, a: int) -> int:
        src = self.table.preimage(a)
        if src is not None:
            return src
        return self._dom.select(self._cod.rank(a))

    def inverse(self) -> Tabled:
        return Tabled(self.table.inverse())

    def to_json(self) -> dict:
        return {"kind": "table", "pairs": [[s, t] for s, t in self.table.pairs]}


def apply(p: FinPerm, a: int) -> int:
    return p.apply(a)


def invert(p: FinPerm) -> FinPerm:
    return p.inverse()


def complete(partial: PartialInjection | Mapping[int, int]) -> Tabled:
    """Extend a finite partial bijection to a permutation of the integers.

    Outside the table, the ``k``-th free source (counted from the least free
    non-negative source) goes to the ``k``-th free target, counted the same
    way.  The rule is symmetric under inverting the table, and the empty
    table completes to the identity.

    >>> p = complete({0: 5})
    >>> [p(a) for a in range(6)]
    [5, 0, 1, 2, 3, 4]
    """
    if not isinstance(partial, PartialInjection):
        partial = PartialInjection(partial)
    return Tabled(partial)


@dataclass(frozen=True)
class OrbitReport:
    orbit_lengths: tuple[int, ...]
    truncated: frozenset[int]
    # window points grouped by orbit, aligned with orbit_lengths
    orbits: tuple[tuple[int, ...], ...] = ()

    @property
    def all_finite(self) -> bool:
        return not self.truncated

    @property
    def max_length(self) -> int:
        return max(self.orbit_lengths, default=0)


def _orbit_step(w, assign):
    # local import keeps permutation free of a hard dependency on words
    from .words import evaluate

    return lambda a: evaluate(w, assign, a)


def orbit_structure(w, assign, win: Window, cap: int = DEFAULT_CAP) -> OrbitReport:
    """Orbits of ``<w>`` through the points of ``win``.

    Each unvisited window point is iterated until it returns or ``cap``
    steps elapse.  Points of an orbit that fails to close are all listed
    under ``truncated``.
    """
    step = _orbit_step(w, assign)
    seen: set[int] = set()
    lengths: list[int] = []
    orbits: list[tuple[int, ...]] = []
    truncated: set[int] = set()
    for a in win:
        if a in seen:
            continue
        hits = [a]
        b = step(a)
        n = 1
        while b != a and n < cap:
            if b in win:
                hits.append(b)
            b = step(b)
            n += 1
        seen.update(hits)
        if b == a:
            lengths.append(n)
            orbits.append(tuple(sorted(hits)))
        else:
            truncated.update(hits)
    return OrbitReport(tuple(lengths), frozenset(truncated), tuple(orbits))


def window_fixing_power(w, assign, win: Window, cap: int = DEFAULT_CAP) -> int:
    """Least common multiple of the orbit lengths meeting ``win``.

    ``w`` raised to the returned power fixes every point of ``win``.
    Raises :class:`OrbitExceedsCap` if some orbit through the window is
    longer than ``cap``.
    """
    report = orbit_structure(w, assign, win, cap)
    if report.truncated:
        raise OrbitExceedsCap(min(report.truncated, key=abs), cap)
    return math.lcm(*report.orbit_lengths) if report.orbit_lengths else 1
