"""Surface-group presentations, Dehn twists and folding maps, all on words.

Naming convention for generators::

    even genus 2r:  a1, a1', ..., ar, ar', b1, b1', ..., br, br'
    odd genus 2r+1: a1, a1', ..., ar, ar', b, b', c1, c1', ..., cr, cr'
    free targets:   phi1, phi1', ..., phir, phir' (and tau for odd genus)

Commutators are ``[u, v] = u v u^-1 v^-1``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .words import IDENTITY, Word, commutator, cyclic_reduce, product


class RelatorError(ValueError):
    """A map out of a presentation does not kill its relator."""


@dataclass(frozen=True)
class Presentation:
    generators: tuple[str, ...]
    relator: Word
    genus: int = 0

    def __post_init__(self):
        if len(set(self.generators)) != len(self.generators):
            raise ValueError("generators must be distinct")
        extra = self.relator.generators() - set(self.generators)
        if extra:
            raise ValueError(f"relator uses unknown generators {sorted(extra)}")


def _g(name: str) -> Word:
    return Word.gen(name)


def _pairs(prefix: str, r: int) -> list[tuple[str, str]]:
    return [(f"{prefix}{i}", f"{prefix}{i}'") for i in range(1, r + 1)]


def _check_r(r: int) -> None:
    if r < 1:
        raise ValueError(f"r must be at least 1, got {r}")


def presentation_even(r: int) -> Presentation:
    """Genus ``2r``: ``[a1,a1']...[ar,ar'][br',br]...[b1',b1]``."""
    _check_r(r)
    a, b = _pairs("a", r), _pairs("b", r)
    gens = tuple(x for p in a for x in p) + tuple(x for p in b for x in p)
    rel = product(commutator(_g(x), _g(y)) for x, y in a) * product(
        commutator(_g(y), _g(x)) for x, y in reversed(b)
    )
    return Presentation(gens, rel, 2 * r)


def presentation_odd(r: int) -> Presentation:
    """Genus ``2r+1``: ``[a1,a1']...[ar,ar'][b',b][cr',cr]...[c1',c1]``.

    The ``c`` commutators run in descending order, mirroring the even case;
    that is the order for which the folding map kills the relator when
    ``r >= 2``.
    """
    _check_r(r)
    a, c = _pairs("a", r), _pairs("c", r)
    gens = tuple(x for p in a for x in p) + ("b", "b'") + tuple(x for p in c for x in p)
    rel = (
        product(commutator(_g(x), _g(y)) for x, y in a)
        * commutator(_g("b'"), _g("b"))
        * product(commutator(_g(y), _g(x)) for x, y in reversed(c))
    )
    return Presentation(gens, rel, 2 * r + 1)


def presentation(genus: int) -> Presentation:
    if genus < 2:
        raise ValueError(f"genus must be at least 2, got {genus}")
    r, odd = divmod(genus, 2)
    return presentation_odd(r) if odd else presentation_even(r)


def free_alphabet(genus: int) -> tuple[str, ...]:
    """Target generators of the folding map for ``genus``."""
    r, odd = divmod(genus, 2)
    out = tuple(x for p in _pairs("phi", r) for x in p)
    return out + ("tau",) if odd else out


def _is_relator_conjugate(w: Word, relator: Word) -> bool:
    core, _ = cyclic_reduce(w)
    rel_core, _ = cyclic_reduce(relator)
    if len(core) != len(rel_core):
        return False
    for target in (rel_core, rel_core.inverse()):
        doubled = target.letters * 2
        n = len(core)
        if any(doubled[i : i + n] == core.letters for i in range(n)):
            return True
    return False


@dataclass(frozen=True)
class GroupMap:
    """A homomorphism given by generator images.

    ``source`` is a :class:`Presentation` or a plain tuple of free
    generators; likewise ``target``.  Out of a presentation the relator
    image is checked at construction: it must reduce to the empty word, or
    (for a presentation target) to a conjugate of the target relator or its
    inverse.
    """

    source: Presentation | tuple[str, ...]
    target: Presentation | tuple[str, ...]
    images: Mapping[str, Word] = field(default_factory=dict)

    def __post_init__(self):
        src = self.source_generators
        missing = set(src) - set(self.images)
        if missing:
            raise ValueError(f"no image for {sorted(missing)}")
        allowed = set(self.target_generators)
        for g, img in self.images.items():
            bad = img.generators() - allowed
            if bad:
                raise ValueError(f"image of {g} uses {sorted(bad)} outside the target")
        if isinstance(self.source, Presentation):
            img = apply_map(self, self.source.relator)
            ok = img.is_identity or (
                isinstance(self.target, Presentation) and _is_relator_conjugate(img, self.target.relator)
            )
            if not ok:
                raise RelatorError(f"relator maps to {img}")

    @property
    def source_generators(self) -> tuple[str, ...]:
        s = self.source
        return s.generators if isinstance(s, Presentation) else tuple(s)

    @property
    def target_generators(self) -> tuple[str, ...]:
        t = self.target
        return t.generators if isinstance(t, Presentation) else tuple(t)

    def __call__(self, w: Word) -> Word:
        return apply_map(self, w)


def apply_map(f: GroupMap, w: Word) -> Word:
    return w.substitute(f.images)


def identity_map(p: Presentation | tuple[str, ...]) -> GroupMap:
    gens = p.generators if isinstance(p, Presentation) else tuple(p)
    return GroupMap(p, p, {g: _g(g) for g in gens})


def compose(f: GroupMap, g: GroupMap) -> GroupMap:
    """``f after g``: first ``g``, then ``f``."""
    if set(g.target_generators) - set(f.source_generators):
        raise ValueError("target of the inner map is not the source of the outer map")
    return GroupMap(g.source, f.target, {x: apply_map(f, img) for x, img in g.images.items()})


def power(f: GroupMap, n: int) -> GroupMap:
    if n < 0:
        raise ValueError("only non-negative powers are supported")
    out = identity_map(f.source)
    for _ in range(n):
        out = compose(f, out)
    return out


def twist_curve_even(r: int) -> Word:
    """``x = [a1,a1']...[ar,ar']``."""
    return product(commutator(_g(x), _g(y)) for x, y in _pairs("a", r))


def twist_curve_odd(r: int) -> Word:
    """``x = [a1,a1']...[ar,ar'] b'``."""
    return twist_curve_even(r) * _g("b'")


def dehn_twist_even(r: int) -> GroupMap:
    """Twist around ``x``: ``a`` generators fixed, ``b`` generators conjugated by ``x``."""
    p = presentation_even(r)
    x = twist_curve_even(r)
    images = {}
    for g in p.generators:
        images[g] = x * _g(g) * x.inverse() if g.startswith("b") else _g(g)
    return GroupMap(p, p, images)


def twists_odd(r: int) -> tuple[GroupMap, GroupMap]:
    """The twists around ``x`` and around ``b'`` (in that order)."""
    p = presentation_odd(r)
    x = twist_curve_odd(r)
    delta, zeta = {}, {}
    for g in p.generators:
        delta[g] = _g(g)
        zeta[g] = _g(g)
        if g.startswith("c"):
            delta[g] = x * _g(g) * x.inverse()
    delta["b"] = x * _g("b")
    zeta["b"] = _g("b") * _g("b'").inverse()
    return GroupMap(p, p, delta), GroupMap(p, p, zeta)


def folding_even(r: int) -> GroupMap:
    """``a_i, b_i -> phi_i`` and ``a_i', b_i' -> phi_i'``."""
    p = presentation_even(r)
    images = {}
    for i in range(1, r + 1):
        for src in ("a", "b"):
            images[f"{src}{i}"] = _g(f"phi{i}")
            images[f"{src}{i}'"] = _g(f"phi{i}'")
    return GroupMap(p, free_alphabet(2 * r), images)


def folding_odd(r: int) -> GroupMap:
    """``a_i, c_i -> phi_i``, primed alike, ``b -> 1`` and ``b' -> tau``."""
    p = presentation_odd(r)
    images = {"b": IDENTITY, "b'": _g("tau")}
    for i in range(1, r + 1):
        for src in ("a", "c"):
            images[f"{src}{i}"] = _g(f"phi{i}")
            images[f"{src}{i}'"] = _g(f"phi{i}'")
    return GroupMap(p, free_alphabet(2 * r + 1), images)


class EventuallyFaithfulSequence:
    """``n -> k o h^n`` (even genus) or ``n -> k o (delta o zeta)^n`` (odd genus).

    Powers are built incrementally and cached.
    """

    def __init__(self, genus: int):
        self.presentation = presentation(genus)
        self.genus = genus
        r, odd = divmod(genus, 2)
        self.r = r
        if odd:
            delta, zeta = twists_odd(r)
            self.twist = compose(delta, zeta)
            self.fold = folding_odd(r)
        else:
            self.twist = dehn_twist_even(r)
            self.fold = folding_even(r)
        self._powers = [identity_map(self.presentation)]

    def twist_power(self, n: int) -> GroupMap:
        while len(self._powers) <= n:
            self._powers.append(compose(self.twist, self._powers[-1]))
        return self._powers[n]

    def __getitem__(self, n: int) -> GroupMap:
        return compose(self.fold, self.twist_power(n))

    def image(self, g: Word, n: int) -> Word:
        return apply_map(self.fold, apply_map(self.twist_power(n), g))


def faithful_index(g: Word, genus: int, n_max: int) -> int | None:
    """Least ``n0 <= n_max`` with ``g`` surviving every map ``n0..n_max``.

    Returns ``None`` when ``g`` dies at ``n_max`` itself.  This is a finite
    spot check only.
    """
    seq = EventuallyFaithfulSequence(genus)
    n0 = None
    for n in range(n_max, -1, -1):
        if seq.image(g, n).is_identity:
            break
        n0 = n
    return n0


def relator_word(genus: int) -> Word:
    return presentation(genus).relator


def surface_generators(genus: int) -> Sequence[str]:
    return presentation(genus).generators
