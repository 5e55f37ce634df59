from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from htaction.forcing import (
    ConflictImpossible,
    PartialAssignment,
    Witness,
    force_finite_orbit,
    force_long_orbit,
    force_mapping,
    force_nontrivial,
    fresh_points,
)
from htaction.permutation import Shift, Window, orbit_structure
from htaction.words import Word, evaluate, is_conjugate_power_of, trace

W = Word.parse


def orbit_length(w, assign, a, cap=10_000):
    b = evaluate(w, assign, a)
    n = 1
    while b != a and n < cap:
        b = evaluate(w, assign, b)
        n += 1
    return n if b == a else None


def fresh(radius=1, gens=("tau1",)):
    return PartialAssignment(list(gens), Window(radius))


class TestFreshPoints:
    def test_with_exclusions(self):
        assert fresh_points(PartialAssignment(["tau1"]), {0, 1, -1}, 2) == [2, -2]

    def test_zero_is_protected(self):
        assert fresh_points(PartialAssignment(["tau1"], Window(0)), (), 1) == [1]

    def test_wide_exclusion(self):
        assert fresh_points(PartialAssignment(["tau1"], Window(0)), range(-10, 11), 1) == [11]

    def test_skips_table_points(self):
        pa = PartialAssignment(["tau1"], Window(0))
        pa.insert("tau1", 1, -1)
        assert fresh_points(pa, (), 2) == [2, -2]

    def test_seeded_choice_is_reproducible_and_fresh(self):
        a = fresh_points(PartialAssignment(["tau1"], Window(2), seed=7), (), 5)
        b = fresh_points(PartialAssignment(["tau1"], Window(2), seed=7), (), 5)
        assert a == b and len(set(a)) == 5 and all(abs(p) > 2 for p in a)


class TestPartialAssignment:
    def test_sigma_cannot_be_tabled(self):
        with pytest.raises(ValueError):
            PartialAssignment(["sigma"])

    def test_conflicting_insert(self):
        pa = fresh()
        pa.insert("tau1", 2, 3)
        pa.insert("tau1", 2, 3)
        with pytest.raises(ConflictImpossible):
            pa.insert("tau1", 2, 4)
        with pytest.raises(ConflictImpossible):
            pa.insert("tau1", 5, 3)

    def test_finalize(self):
        pa = fresh()
        assert pa.finalize()["sigma"] == Shift(1)
        assert all(pa.finalize()["tau1"](a) == a for a in range(-5, 6))
        pa.insert("tau1", 2, 6)
        assert pa.finalize()["tau1"].table.pairs == ((2, 6),)

    def test_json_round_trip(self):
        pa = fresh(2, ("tau1", "tau2"))
        force_nontrivial(pa, W("tau1 tau2 sigma"))
        back = PartialAssignment.from_json(pa.to_json())
        assert sorted(back.pairs()) == sorted(pa.pairs())
        assert back.protected == pa.protected


class TestForceNontrivial:
    def test_single_letter(self):
        pa = fresh()
        _, wit = force_nontrivial(pa, W("tau1"))
        assert pa.size() == 1
        a = wit.data["point"]
        assert a not in Window(1) and wit.data["image"] != a
        assert wit.replay(pa) and wit.replay(pa.finalize())

    def test_shift_power(self):
        pa = fresh()
        _, wit = force_nontrivial(pa, W("sigma^5"))
        assert pa.size() == 0
        assert (wit.data["point"], wit.data["image"]) == (0, 5)

    def test_commutator(self):
        pa = fresh()
        v = W("tau1 sigma ~tau1 ~sigma")
        _, wit = force_nontrivial(pa, v)
        assert pa.size() == 2
        tr = trace(v, pa, wit.data["point"])
        assert tr.complete and tr.end == wit.data["image"] != wit.data["point"]

    def test_empty_word_rejected(self):
        with pytest.raises(ValueError):
            force_nontrivial(fresh(), Word())


class TestForceMapping:
    def test_single_point(self):
        pa = fresh()
        _, wit = force_mapping(pa, (0,), (4,))
        assert wit.data["r"] == 2
        assert sorted(pa.pairs()) == [("tau1", 2, 6)]
        assert wit.word == W("sigma^2 tau1 sigma^-2")
        assert trace(wit.word, pa, 0).points == (0, 1, 2, 6, 5, 4)

    def test_identity_target(self):
        pa = fresh()
        _, wit = force_mapping(pa, (3,), (3,))
        assert pa.size() == 1
        assert evaluate(wit.word, pa.finalize(), 3) == 3

    def test_swap(self):
        pa = fresh()
        _, wit = force_mapping(pa, (0, 1), (1, 0))
        assert pa.size() == 2
        final = pa.finalize()
        assert [evaluate(wit.word, final, a) for a in (0, 1)] == [1, 0]

    def test_mismatched_lengths(self):
        with pytest.raises(ValueError):
            force_mapping(fresh(), (0, 1), (1,))


class TestForceLongOrbit:
    def test_three_point_chain(self):
        pa = fresh()
        _, wit = force_long_orbit(pa, W("tau1"), 3)
        chain = wit.data["chain"]
        assert len(chain) == 3 == len(set(chain)) and pa.size() == 2
        assert wit.replay(pa)

    def test_trivial_length(self):
        pa = fresh()
        _, wit = force_long_orbit(pa, W("tau1"), 1)
        assert pa.size() == 0 and len(wit.data["chain"]) == 1

    def test_conjugated_letter(self):
        pa = fresh()
        _, wit = force_long_orbit(pa, W("sigma tau1 ~sigma"), 2)
        assert pa.size() == 1
        p, q = wit.data["chain"]
        assert p != q and evaluate(W("sigma tau1 ~sigma"), pa.finalize(), p) == q

    def test_shift_conjugate_rejected(self):
        with pytest.raises(ValueError):
            force_long_orbit(fresh(), W("tau1 sigma ~tau1"), 2)


class TestForceFiniteOrbit:
    def test_degenerate_single_letter(self):
        pa = PartialAssignment(["tau1"])
        _, wit = force_finite_orbit(pa, W("tau1"), 0)
        assert sorted(pa.pairs()) == [("tau1", 0, 0)]
        assert wit.data["cycle"] == [0]

    def test_already_closed(self):
        pa = PartialAssignment(["tau1"])
        force_finite_orbit(pa, W("tau1"), 0)
        before = sorted(pa.pairs())
        _, wit = force_finite_orbit(pa, W("tau1"), 0)
        assert sorted(pa.pairs()) == before and wit.data["cycle"] == [0]

    def test_mixed_word_closes(self):
        pa = PartialAssignment(["tau1"])
        w = W("tau1 sigma")
        _, wit = force_finite_orbit(pa, w, 0)
        rep = orbit_structure(w, pa.finalize(), Window(0), cap=1000)
        assert rep.all_finite and rep.orbit_lengths == (len(wit.data["cycle"]),)

    @pytest.mark.parametrize("w", ["tau1 tau2", "tau1 sigma^2 tau2^-1", "sigma tau1 sigma tau2 ~sigma"])
    @pytest.mark.parametrize("min_length", [1, 4])
    def test_padding_reaches_minimum(self, w, min_length):
        pa = PartialAssignment(["tau1", "tau2"], Window(2))
        word = W(w)
        _, wit = force_finite_orbit(pa, word, 1, min_length=min_length)
        assert len(wit.data["cycle"]) >= min_length
        assert orbit_length(word, pa.finalize(), 1) == len(wit.data["cycle"])

    def test_conjugated_word_uses_core(self):
        pa = PartialAssignment(["tau1", "tau2"], Window(1))
        w = W("tau2 tau1 sigma ~tau2")
        _, wit = force_finite_orbit(pa, w, 0)
        assert wit.data["core"] == "tau1 * sigma" and wit.data["conjugator"] == "tau2"
        final = pa.finalize()
        assert wit.replay(final)
        assert orbit_structure(w, final, Window(0), cap=1000).all_finite


class TestWitnessJson:
    def test_round_trip(self):
        pa = fresh()
        _, wit = force_mapping(pa, (0, 1), (1, 0))
        assert Witness.from_json(wit.to_json()) == wit

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            Witness("Bogus", Word())


ALPHABET = ("sigma", "tau1", "tau2")
words = st.lists(st.tuples(st.sampled_from(ALPHABET), st.sampled_from((1, -1))), min_size=1, max_size=6).map(Word)
free_words = words.filter(lambda w: not is_conjugate_power_of(w, "sigma"))
nonempty = words.filter(lambda w: not w.is_identity)
points = st.integers(-2, 2)
operations = st.one_of(
    st.tuples(st.just("nontrivial"), nonempty),
    st.tuples(st.just("mapping"), st.lists(points, min_size=1, max_size=2, unique=True), st.randoms()),
    st.tuples(st.just("long"), free_words, st.integers(1, 4)),
    st.tuples(st.just("finite"), free_words, points),
)


def run_op(pa, op):
    kind = op[0]
    if kind == "nontrivial":
        return force_nontrivial(pa, op[1])[1]
    if kind == "mapping":
        x = op[1]
        y = list(x)
        op[2].shuffle(y)
        return force_mapping(pa, x, y)[1]
    if kind == "long":
        return force_long_orbit(pa, op[1], op[2])[1]
    return force_finite_orbit(pa, op[1], op[2])[1]


class TestForcingProperties:
    @given(st.lists(operations, min_size=1, max_size=8))
    def test_monotone_and_permanent(self, ops):
        pa = PartialAssignment(["tau1", "tau2"], Window(2))
        witnesses = []
        for op in ops:
            before = set(pa.pairs())
            witnesses.append(run_op(pa, op))
            assert before <= set(pa.pairs())
        final = pa.finalize()
        for wit in witnesses:
            assert wit.replay(pa)
            assert wit.replay(final)

    @given(st.lists(st.one_of(operations.filter(lambda op: op[0] != "finite")), min_size=1, max_size=8))
    def test_window_untouched_without_orbit_closing(self, ops):
        pa = PartialAssignment(["tau1", "tau2"], Window(2))
        for op in ops:
            run_op(pa, op)
        assert all(s not in pa.protected and t not in pa.protected for _, s, t in pa.pairs())

    @given(free_words, points)
    def test_finite_orbit_postcondition(self, w, a):
        pa = PartialAssignment(["tau1", "tau2"], Window(2))
        force_long_orbit(pa, w, 3)
        force_finite_orbit(pa, w, a)
        assert orbit_length(w, pa.finalize(), a) is not None
