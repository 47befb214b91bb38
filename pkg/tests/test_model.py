import itertools

import pytest
from hypothesis import given, settings, strategies as hs

from delaygames import builtins
from delaygames.model import (
    CONTROLLER, ENVIRONMENT, Arena, DelayedControlGame, DelayGame, ModelError, absorbing, as_parity, check,
    complement, difference_witness, empty, is_empty, is_universal, make_automaton, play_of, run_automaton,
    size_of, universal, validate,
)
from corpus import random_automaton
from oracles import lasso_accepts, lassos
import random


def tiny_arena(**kw):
    parts = dict(states=[("c", CONTROLLER), ("e", ENVIRONMENT)], initial="c", calphabet=["a"], ealphabet=["x"],
                edges=[("c", "a", "e"), ("e", "x", "c")])
    parts.update(kw)
    return Arena.build(parts["states"], parts["initial"], parts["calphabet"], parts["ealphabet"], parts["edges"])


def test_valid_arena_has_no_diagnostics():
    assert validate(tiny_arena()) == []


@pytest.mark.parametrize("change, fragment", [
    (dict(initial="e"), "not controller-owned"),
    (dict(initial="zz"), "not declared"),
    (dict(edges=[("c", "a", "e")]), "missing transition"),
    (dict(edges=[("c", "a", "c"), ("e", "x", "c")]), "alternation"),
    (dict(edges=[("c", "a", "e"), ("e", "x", "c"), ("c", "x", "e")]), "illegal transition"),
    (dict(calphabet=[]), "empty"),
])
def test_arena_diagnostics(change, fragment):
    problems = validate(tiny_arena(**change))
    assert any(fragment in p for p in problems), problems


def test_check_raises_model_error():
    with pytest.raises(ModelError):
        check(tiny_arena(initial="e"))


def test_play_of_fig4():
    g = builtins.fig4_predict()
    p = play_of(g.arena, ["h", "h", "h"])
    assert p.states == ("s0", "E_h", "C_h", "match_E")
    assert p.last == "match_E"


def test_play_of_modular_loses_on_wrong_guess():
    g = builtins.modular(1, 3)
    assert play_of(g.arena, ["0", "2"]).last == "lose_0"


def test_play_of_rejects_illegal_letter():
    with pytest.raises(ModelError):
        play_of(builtins.fig4_predict().arena, ["z"])


def test_sizes():
    assert size_of(builtins.fig4_predict()) == 15
    assert size_of(builtins.modular(1, 2)) == 17


def test_builtins_validate():
    for name, args in [("fig4_predict", ()), ("fig6_mismatch", ()), ("mismatch", (3,)), ("modular", (2, 3)), ("ex26", ())]:
        assert validate(builtins.builtin(name, *args)) == []


@pytest.mark.parametrize("name, args", [("modular", (3, 2)), ("modular", (2, 2)), ("modular", (-1, 2)), ("mismatch", (0,)), ("nope", ())])
def test_builtin_parameter_errors(name, args):
    with pytest.raises((ValueError, KeyError)):
        builtins.builtin(name, *args)


def test_delay_game_alphabet_overlap_is_reported():
    aut = universal([("a", "a")])
    assert any("share letter" in p for p in validate(DelayGame(("a",), ("a",), aut)))


def test_run_automaton_kinds():
    trans = {("p", "a"): "p", ("p", "b"): "r", ("r", "a"): "r", ("r", "b"): "r"}
    safe = make_automaton(["p", "r"], "ab", "p", trans, "safety", ["r"])
    assert run_automaton(safe, "", "a")
    assert not run_automaton(safe, "ab", "a")
    reach = complement(safe)
    assert run_automaton(reach, "", "ab")
    par = make_automaton(["p", "r"], "ab", "p", {("p", "a"): "p", ("p", "b"): "r", ("r", "a"): "p", ("r", "b"): "r"},
                         "parity", coloring={"p": 1, "r": 2})
    assert run_automaton(par, "a", "b")
    assert not run_automaton(par, "b", "a")
    assert run_automaton(par, "", "ab")


def test_run_automaton_needs_nonempty_loop():
    with pytest.raises(ValueError):
        run_automaton(universal("a"), "a", "")


@settings(max_examples=60, deadline=None)
@given(hs.integers(0, 10**6))
def test_complement_partitions_lassos(seed):
    rng = random.Random(seed)
    aut = random_automaton(rng, ("a", "b"), max_states=4)
    comp = complement(aut)
    for u, v in lassos(("a", "b"), 3, 3):
        assert run_automaton(aut, u, v) != run_automaton(comp, u, v)


@settings(max_examples=60, deadline=None)
@given(hs.integers(0, 10**6))
def test_run_automaton_matches_oracle(seed):
    rng = random.Random(seed)
    aut = random_automaton(rng, ("a", "b"), max_states=4)
    for u, v in lassos(("a", "b"), 3, 3):
        assert run_automaton(aut, u, v) == lasso_accepts(aut, u, v)


@settings(max_examples=60, deadline=None)
@given(hs.integers(0, 10**6))
def test_absorbing_and_parity_preserve_language(seed):
    aut = random_automaton(random.Random(seed), ("a", "b"), max_states=4)
    for other in (absorbing(aut), as_parity(aut)):
        assert difference_witness(aut, other) is None
        for u, v in lassos(("a", "b"), 2, 3):
            assert run_automaton(aut, u, v) == run_automaton(other, u, v)


@settings(max_examples=80, deadline=None)
@given(hs.integers(0, 10**6))
def test_difference_witness_against_brute_force(seed):
    rng = random.Random(seed)
    a = random_automaton(rng, ("a", "b"), max_states=3)
    b = random_automaton(rng, ("a", "b"), max_states=3)
    w = difference_witness(a, b)
    # with at most 3 states each, short lassos reach every product cycle
    brute = any(run_automaton(a, u, v) != run_automaton(b, u, v) for u, v in lassos(("a", "b"), 4, 4))
    assert (w is not None) == brute
    if w is not None:
        assert run_automaton(a, w.stem, w.loop) != run_automaton(b, w.stem, w.loop)


def test_universal_and_empty():
    assert is_universal(universal("ab"))
    assert is_empty(empty("ab"))
    assert not is_empty(universal("ab"))
    assert difference_witness(universal("ab"), empty("ab")) is not None


def test_renamed_and_pruned():
    aut = make_automaton(["p", "q", "z"], "a", "p", {("p", "a"): "q", ("q", "a"): "p", ("z", "a"): "z"}, "safety", ["z"])
    assert set(aut.pruned().states) == {"p", "q"}
    r = aut.renamed({"a": "b"})
    assert r.alphabet == ("b",) and r.step("p", "b") == "q"
    assert run_automaton(r, "", "b") == run_automaton(aut, "", "a")
    assert difference_witness(aut, aut.pruned()) is None


def test_state_condition_shorthand():
    g = builtins.fig4_predict()
    assert g.state_condition == ("safety", ("match_E", "match_C"))
    assert g.condition.kind == "safety"
    assert not run_automaton(g.condition, ["s0", "E_h", "C_h"], ["match_E", "match_C"])
    assert run_automaton(g.condition, ["s0", "E_h", "C_h"], ["miss_E", "miss_C"])
