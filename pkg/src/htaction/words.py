"""Free-group words over named generators.

A :class:`Word` is always stored freely reduced.  Letters are pairs
``(name, sign)`` with ``sign`` in ``{+1, -1}``; the empty word is the
identity.  Points of the integers are acted on from the right, so a word is
evaluated by applying its letters left to right.

Text syntax (used by the CLI)::

    s^3 * ~t * s        # ~g is g^-1
    [a1, a1'] * b1^-2   # commutator [u, v] = u v u^-1 v^-1
    (phi1 * tau)^2
    1                   # the empty word

Generator names are identifiers that may end in primes (``b1'``).
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Sequence

Generator = str
Letter = tuple[Generator, int]


def _free_reduce(letters: Iterable[Letter]) -> tuple[Letter, ...]:
    stack: list[Letter] = []
    for g, s in letters:
        if s not in (1, -1):
            raise ValueError(f"letter sign must be +1 or -1, got {s!r}")
        if stack and stack[-1][0] == g and stack[-1][1] == -s:
            stack.pop()
        else:
            stack.append((g, s))
    return tuple(stack)


class Word:
    """A freely reduced word."""

    __slots__ = ("letters", "__dict__")

    def __init__(self, letters: Iterable[Letter] = ()):
        self.letters: tuple[Letter, ...] = _free_reduce(letters)

    @classmethod
    def gen(cls, name: Generator, power: int = 1) -> Word:
        sign = 1 if power >= 0 else -1
        return cls._trusted(((name, sign),) * abs(power))

    @classmethod
    def _trusted(cls, letters: tuple[Letter, ...]) -> Word:
        # caller guarantees the letters are already reduced
        w = cls.__new__(cls)
        w.letters = letters
        return w

    @classmethod
    def parse(cls, text: str) -> Word:
        return _Parser(text).parse()

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[Letter]:
        return iter(self.letters)

    def __getitem__(self, i):
        return self.letters[i]

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Word):
            return self.letters == other.letters
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.letters)

    def __lt__(self, other: Word) -> bool:
        return (len(self), self.letters) < (len(other), other.letters)

    def __mul__(self, other: Word) -> Word:
        return Word(self.letters + other.letters)

    def __invert__(self) -> Word:
        return self.inverse()

    def __pow__(self, n: int) -> Word:
        base = self if n >= 0 else self.inverse()
        return Word(base.letters * abs(n))

    def inverse(self) -> Word:
        return Word((g, -s) for g, s in reversed(self.letters))

    @property
    def is_identity(self) -> bool:
        return not self.letters

    def generators(self) -> frozenset[Generator]:
        return frozenset(g for g, _ in self.letters)

    @cached_property
    def runs(self) -> tuple[tuple[Generator, int], ...]:
        """Maximal blocks of one generator as ``(name, exponent)``."""
        out: list[list] = []
        for g, s in self.letters:
            if out and out[-1][0] == g:
                out[-1][1] += s
            else:
                out.append([g, s])
        return tuple((g, e) for g, e in out)

    def substitute(self, images: Mapping[Generator, Word]) -> Word:
        """Replace every generator by its image; unmapped generators stay."""
        out: list[Letter] = []
        for g, s in self.letters:
            img = images.get(g)
            if img is None:
                out.append((g, s))
            else:
                out.extend(img.letters if s > 0 else img.inverse().letters)
        return Word(out)

    def __str__(self) -> str:
        if not self.letters:
            return "1"
        parts = []
        for g, e in self.runs:
            parts.append(g if e == 1 else f"{g}^{e}")
        return " * ".join(parts)

    def __repr__(self) -> str:
        return f"Word({str(self)!r})"


IDENTITY = Word()


def reduce(letters: Iterable[Letter]) -> Word:
    return Word(letters)


def commutator(u: Word, v: Word) -> Word:
    return u * v * u.inverse() * v.inverse()


def product(words: Iterable[Word]) -> Word:
    out: list[Letter] = []
    for w in words:
        out.extend(w.letters)
    return Word(out)


def cyclic_reduce(w: Word) -> tuple[Word, Word]:
    """Split ``w`` as ``conjugator * core * conjugator^-1``, core cyclically reduced."""
    letters = w.letters
    i, j = 0, len(letters) - 1
    while i < j and letters[i][0] == letters[j][0] and letters[i][1] == -letters[j][1]:
        i += 1
        j -= 1
    return Word(letters[i : j + 1]), Word(letters[:i])


def is_conjugate_power_of(w: Word, g: Generator) -> bool:
    core, _ = cyclic_reduce(w)
    return all(name == g for name, _ in core.letters)


def evaluate(w: Word, assign: Mapping[Generator, object], a: int) -> int:
    """Image of ``a`` under ``w``; ``assign`` maps generators to permutations."""
    for g, e in w.runs:
        a = assign[g].apply_power(a, e)
    return a


@dataclass(frozen=True)
class Stuck:
    """Where a partial assignment could not advance a trace.

    ``position`` is the 1-based index of the letter that is undefined at
    ``point``.
    """

    position: int
    letter: Letter
    point: int


@dataclass(frozen=True)
class Trace:
    points: tuple[int, ...]
    stuck: Stuck | None = None

    @property
    def complete(self) -> bool:
        return self.stuck is None

    @property
    def end(self) -> int:
        return self.points[-1]


def trace(w: Word | Sequence[Letter], assign, a: int) -> Trace:
    """Intermediate images of ``a`` under the successive letters of ``w``.

    ``assign`` is either a mapping of generators to total permutations or a
    partial assignment exposing ``step(name, sign, point)``; with the latter
    the trace stops at the first undefined step.
    """
    letters = w.letters if isinstance(w, Word) else tuple(w)
    step = getattr(assign, "step", None)
    points = [a]
    for pos, (g, s) in enumerate(letters, start=1):
        if step is None:
            p = assign[g]
            b = p.apply(a) if s > 0 else p.apply_inverse(a)
        else:
            b = step(g, s, a)
            if b is None:
                return Trace(tuple(points), Stuck(pos, (g, s), a))
        points.append(b)
        a = b
    return Trace(tuple(points))


def enumerate_reduced_words(alphabet: Sequence[Generator], max_len: int) -> list[Word]:
    """Nonempty reduced words of length at most ``max_len``.

    Ordered by length, then lexicographically with letters ranked
    ``g1, g1^-1, g2, g2^-1, ...`` in alphabet order.
    """
    if max_len < 1:
        return []
    letters = [(g, s) for g in alphabet for s in (1, -1)]
    layer: list[tuple[Letter, ...]] = [(x,) for x in letters]
    out = list(layer)
    for _ in range(max_len - 1):
        nxt = []
        for w in layer:
            g, s = w[-1]
            nxt.extend(w + (x,) for x in letters if x != (g, -s))
        layer = nxt
        out.extend(layer)
    return [Word(w) for w in out]


def count_reduced_words(k: int, length: int) -> int:
    """Number of reduced words of exactly ``length`` over ``k`` generators."""
    if length == 0:
        return 1
    return 2 * k * (2 * k - 1) ** (length - 1)


_TOKEN = re.compile(r"\s*(?:(?P<name>[A-Za-z_][A-Za-z0-9_]*'*)|(?P<int>-?\d+)|(?P<op>[~*^()\[\],]))")


class WordSyntaxError(ValueError):
    pass


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens: list[tuple[str, str]] = []
        pos = 0
        text = text.rstrip()
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                raise WordSyntaxError(f"unexpected character at {pos} in {self.text!r}")
            kind = m.lastgroup
            self.tokens.append((kind, m.group(kind)))
            pos = m.end()
        self.i = 0

    def peek(self) -> tuple[str, str] | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self, value: str | None = None) -> tuple[str, str]:
        tok = self.peek()
        if tok is None or (value is not None and tok[1] != value):
            raise WordSyntaxError(f"expected {value or 'token'} in {self.text!r}")
        self.i += 1
        return tok

    def parse(self) -> Word:
        if not self.tokens:
            return IDENTITY
        w = self.product()
        if self.peek() is not None:
            raise WordSyntaxError(f"trailing input in {self.text!r}")
        return w

    def product(self) -> Word:
        parts = [self.factor()]
        while True:
            tok = self.peek()
            if tok is None or tok[1] in (")", "]", ","):
                return product(parts)
            if tok[1] == "*":
                self.take()
            parts.append(self.factor())

    def factor(self) -> Word:
        if self.peek() == ("op", "~"):
            self.take()
            return self.factor().inverse()
        w = self.atom()
        while self.peek() == ("op", "^"):
            self.take()
            kind, val = self.take()
            if kind != "int":
                raise WordSyntaxError(f"exponent must be an integer in {self.text!r}")
            w = w ** int(val)
        return w

    def atom(self) -> Word:
        kind, val = self.take()
        if kind == "name":
            return Word.gen(val)
        if kind == "int":
            if val != "1":
                raise WordSyntaxError(f"bare integer {val} in {self.text!r}")
            return IDENTITY
        if val == "(":
            w = self.product()
            self.take(")")
            return w
        if val == "[":
            u = self.product()
            self.take(",")
            v = self.product()
            self.take("]")
            return commutator(u, v)
        raise WordSyntaxError(f"unexpected {val!r} in {self.text!r}")
