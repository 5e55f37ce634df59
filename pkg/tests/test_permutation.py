from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from htaction.permutation import (
    FinPerm,
    OrbitExceedsCap,
    PartialInjection,
    Shift,
    Tabled,
    Window,
    apply,
    complete,
    invert,
    orbit_structure,
    window_fixing_power,
)
from htaction.words import IDENTITY, Word, evaluate

from oracles import cycle_map, naive_completion

SIX_CYCLE = (0, 5, 4, 3, 2, 1)


@st.composite
def tables(draw, max_pairs=50, lo=-100, hi=100):
    n = draw(st.integers(0, max_pairs))
    srcs = draw(st.lists(st.integers(lo, hi), min_size=n, max_size=n, unique=True))
    tgts = draw(st.lists(st.integers(lo, hi), min_size=n, max_size=n, unique=True))
    return PartialInjection(zip(srcs, tgts))


class TestWindow:
    def test_membership_matches_absolute_value(self):
        win = Window(3)
        assert all((a in win) == (abs(a) <= 3) for a in range(-10, 11))

    def test_iteration_and_size(self):
        assert list(Window(1)) == [-1, 0, 1]
        assert len(Window(0)) == 1

    def test_negative_radius_rejected(self):
        with pytest.raises(ValueError):
            Window(-1)


class TestPartialInjection:
    def test_rejects_repeated_source(self):
        with pytest.raises(ValueError):
            PartialInjection([(0, 1), (0, 2)])

    def test_rejects_repeated_target(self):
        with pytest.raises(ValueError):
            PartialInjection([(0, 1), (2, 1)])

    def test_domain_codomain_and_inverse(self):
        t = PartialInjection({3: 7, -1: 0})
        assert t.domain == {3, -1} and t.codomain == {7, 0}
        assert t.inverse() == PartialInjection({7: 3, 0: -1})
        assert t.pairs == ((-1, 0), (3, 7))


class TestApply:
    def test_shift(self):
        assert apply(Shift(1), 0) == 1

    def test_fixed_point_table_is_identity(self):
        assert apply(complete({0: 0}), 7) == 7

    def test_single_pair_table(self):
        # oracle: explicit complement alignment
        assert naive_completion({0: 5}, 10)[3] == 2
        assert apply(complete({0: 5}), 3) == 2


class TestInvert:
    def test_shift_inverse(self):
        assert invert(Shift(3)) == Shift(-3)

    def test_table_inverse_on_table_point(self):
        assert apply(invert(complete({0: 5})), 5) == 0

    def test_table_inverse_off_table(self):
        assert apply(invert(complete({0: 5})), 2) == 3

    def test_table_inverse_is_inverse_table(self):
        t = PartialInjection({1: 4, 2: -3})
        assert invert(Tabled(t)) == Tabled(t.inverse())


class TestComplete:
    def test_empty_is_identity(self):
        p = complete({})
        assert all(p(a) == Shift(0)(a) for a in range(-50, 51))

    def test_transposition(self):
        p = complete({0: 1, 1: 0})
        expected = naive_completion({0: 1, 1: 0}, 30)
        assert expected == {a: {0: 1, 1: 0}.get(a, a) for a in range(-30, 31)}
        assert all(p(a) == expected[a] for a in range(-30, 31))

    def test_six_cycle(self):
        p = complete({0: 5})
        cyc = cycle_map(SIX_CYCLE)
        oracle = naive_completion({0: 5}, 40)
        for a in range(-40, 41):
            assert p(a) == cyc.get(a, a) == oracle[a]

    @given(tables())
    def test_agrees_with_explicit_alignment(self, t):
        p = complete(t)
        oracle = naive_completion(t, 150)
        assert all(p(a) == oracle[a] for a in range(-150, 151))

    @given(tables())
    def test_bijective_on_window(self, t):
        p = complete(t)
        images = [p(a) for a in range(-200, 201)]
        assert len(set(images)) == len(images)
        assert all(p.apply_inverse(p(a)) == a for a in range(-200, 201))
        assert all(t[a] == p(a) for a in t)

    @given(tables())
    def test_anchor_symmetry(self, t):
        left, right = invert(complete(t)), complete(t.inverse())
        assert all(left(a) == right(a) for a in range(-150, 151))

    @given(tables())
    def test_locality(self, t):
        pts = t.domain | t.codomain
        balanced = sum(a >= 0 for a in t.domain) == sum(b >= 0 for b in t.codomain)
        if not pts or not balanced:
            return
        lo, hi = min(pts), max(pts)
        p = complete(t)
        outside = [a for a in range(-250, 251) if a < lo or a > hi]
        assert all(p(a) == a for a in outside)

    @given(st.integers(-5, 5), st.integers(-1000, 1000), st.integers(-30, 30))
    def test_shift_power(self, s, a, e):
        assert Shift(s).apply_power(a, e) == a + s * e

    @given(tables(max_pairs=10, lo=-10, hi=10), st.integers(-20, 20), st.integers(-6, 6))
    def test_table_power_matches_iteration(self, t, a, e):
        p = complete(t)
        b = a
        for _ in range(abs(e)):
            b = p.apply(b) if e > 0 else p.apply_inverse(b)
        assert p.apply_power(a, e) == b


class TestJson:
    def test_shift_schema(self):
        assert Shift(1).to_json() == {"kind": "shift", "s": 1}

    def test_table_schema_sorted_by_source(self):
        assert complete({3: 1, -2: 0}).to_json() == {"kind": "table", "pairs": [[-2, 0], [3, 1]]}

    @given(tables())
    def test_round_trip(self, t):
        p = complete(t)
        assert FinPerm.from_json(p.to_json()) == p
        assert FinPerm.from_json(Shift(-4).to_json()) == Shift(-4)


class TestOrbits:
    def test_shift_orbits_truncated(self):
        rep = orbit_structure(Word.gen("s"), {"s": Shift(1)}, Window(2), cap=100)
        assert rep.truncated == frozenset(range(-2, 3))
        assert rep.orbit_lengths == ()

    def test_identity_word(self):
        rep = orbit_structure(IDENTITY, {}, Window(2), cap=100)
        assert sorted(rep.orbit_lengths) == [1] * 5

    def test_six_cycle_orbits(self):
        rep = orbit_structure(Word.gen("t"), {"t": complete({0: 5})}, Window(5), cap=100)
        assert sorted(rep.orbit_lengths) == [1] * 5 + [6]
        assert rep.all_finite and rep.max_length == 6

    def test_fixing_power_six_cycle(self):
        assign = {"t": complete({0: 5})}
        w = Word.gen("t")
        m = window_fixing_power(w, assign, Window(5), cap=100)
        assert m == 6
        assert all(evaluate(w**m, assign, a) == a for a in Window(5))

    def test_fixing_power_identity(self):
        assert window_fixing_power(IDENTITY, {}, Window(3)) == 1

    def test_fixing_power_shift_raises(self):
        with pytest.raises(OrbitExceedsCap):
            window_fixing_power(Word.gen("s"), {"s": Shift(1)}, Window(0), cap=50)

    @given(tables(max_pairs=15, lo=-12, hi=12), st.integers(0, 8))
    def test_orbits_partition_the_window(self, t, radius):
        win = Window(radius)
        rep = orbit_structure(Word.gen("t"), {"t": complete(t)}, win, cap=10_000)
        covered = [a for orb in rep.orbits for a in orb] + list(rep.truncated)
        assert sorted(covered) == list(win)
        assert all(n >= 1 for n in rep.orbit_lengths)
