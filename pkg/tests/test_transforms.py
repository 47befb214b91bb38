import random

import pytest
from hypothesis import given, settings, strategies as hs

from delaygames import builtins, delay, transforms
from delaygames import strategy as st
from delaygames.model import (
    CONTROLLER, ENVIRONMENT, Arena, DelayedControlGame, complement, difference_witness, make_automaton, play_of,
    run_automaton,
)
from delaygames.transforms import DelayError
from delaygames.verify import verify_strategy
from corpus import random_dc_game, random_delay_game


@pytest.mark.parametrize("delta", [1, 3, -2])
def test_odd_or_negative_delay_rejected(delta):
    with pytest.raises(DelayError, match="delay must be even" if delta > 0 else None):
        transforms.dc_to_delay_game(builtins.fig4_predict(), delta)


def test_prime_apart():
    assert transforms.prime_apart(["1", "2"], ["1", "2"]) == {"1": "1'", "2": "2'"}
    assert transforms.prime_apart(["a"], ["b"]) == {}
    assert transforms.prime_apart(["a"], ["a", "a'"]) == {"a": "a''"}


def test_ex26_image_sizes_and_renaming():
    g, delta, receipt = transforms.dg_to_dc(builtins.ex26())
    assert delta == 2
    assert receipt.counts["arena_states"] == 9
    assert receipt.counts["condition_states"] <= receipt.counts["condition_bound"]
    g2, _, r2 = transforms.dg_to_dc(builtins.ex26(primed=False))
    assert r2.renaming == {"1": "1'", "2": "2'", "3": "3'", "4": "4'"}


def test_round_trip_ex26():
    for primed in (True, False):
        dg = builtins.ex26(primed=primed)
        image, _, receipt = transforms.dg_to_dc(dg)
        assert difference_witness(transforms.condition_of_image(image, receipt), dg.condition) is None


def test_modular_condition_accepts_by_first_pair():
    g = builtins.modular(1, 2)
    cond = transforms.dc_to_condition(g)
    for a in "01":
        for b in "01":
            expected = (int(a) + int(b)) % 2 < 1
            assert run_automaton(cond, [(a, b)], [(a, b)]) == expected
            assert run_automaton(g.condition, play_of(g.arena, [a, b]).states, ["WIN_E", "WIN_C"] if expected else ["LOSE_E", "LOSE_C"]) == expected


@settings(max_examples=80, deadline=None)
@given(hs.integers(0, 10**6))
def test_dc_condition_agrees_with_arena_plays(seed):
    rng = random.Random(seed)
    g = random_dc_game(rng)
    cond = transforms.dc_to_condition(g)
    pairs = cond.alphabet
    for _ in range(20):
        u = [rng.choice(pairs) for _ in range(rng.randint(0, 3))]
        v = [rng.choice(pairs) for _ in range(rng.randint(1, 3))]
        flat = lambda w: [x for p in w for x in p]
        # after u v^n the arena state repeats with some period p (in copies of v)
        n = len(g.arena.states)
        lead = 1 + 2 * (len(u) + len(v) * n)
        starts = [play_of(g.arena, flat(u + v * i)).last for i in range(n, 2 * n + 1)]
        period = next(p for p in range(1, n + 1) if starts[p] == starts[0])
        states = play_of(g.arena, flat(u + v * (n + period))).states
        prefix, loop = states[:lead], states[lead:]
        assert run_automaton(cond, u, v) == run_automaton(g.condition, prefix, loop)


@settings(max_examples=60, deadline=None)
@given(hs.integers(0, 10**6), hs.integers(0, 2))
def test_round_trip_random_delay_games(seed, k):
    dg = random_delay_game(random.Random(seed), lookahead=k)
    image, delta, receipt = transforms.dg_to_dc(dg)
    assert delta == 2 * k
    assert difference_witness(transforms.condition_of_image(image, receipt), dg.condition) is None


def test_marked_initial_state_is_not_lost():
    # regression: an unsafe initial condition state means every play is lost
    a = builtins.fig4_predict().arena
    states = ["bad", "ok"]
    trans = {(q, s): "ok" for q in states for s in a.states}
    g = DelayedControlGame(a, make_automaton(states, a.states, "bad", trans, "safety", ["bad"]))
    assert not delay.solve_delayed_control(g, 0).wins
    assert delay.solve_environment(g).wins


def test_strategy_lifts_round_trip():
    g = builtins.fig6_mismatch()
    r = delay.solve_delayed_control(g, 0)
    assert r.wins
    ren = transforms.output_renaming(g)
    pi = transforms.lift_controller_to_I(r.machine, 0, ren)
    assert verify_strategy(transforms.dc_to_delay_game(g, 0), pi, st.PLAYER_I)
    back = transforms.lift_I_to_controller(pi, 0, {v: k for k, v in ren.items()})
    assert st.same_semantics(back, r.machine)


def test_lift_rejects_wrong_block():
    m = st.constant(st.CONTROLLER, st.EMITTER, ("x",), ("a",), "a", block=("a",))
    with pytest.raises(st.StrategyError):
        transforms.lift_controller_to_I(m, 2)


def test_env_lift_on_modular():
    g = builtins.modular(1, 3)
    env = delay.solve_environment(g)
    assert env.wins
    for k in range(3):
        o = transforms.lift_env_to_O(env.machine, k, transforms.output_renaming(g))
        assert o.lead_in == k
        assert verify_strategy(transforms.dc_to_delay_game(g, 2 * k), o, st.PLAYER_O)


@settings(max_examples=80, deadline=None)
@given(hs.integers(0, 10**6))
def test_state_count_bounds(seed):
    rng = random.Random(seed)
    g = random_dc_game(rng)
    cond = transforms.dc_to_condition(g)
    if g.condition.kind != "parity":
        assert len(cond.states) <= len(g.arena.controller_states) * len(g.condition.states)
    dg = random_delay_game(rng, max_states=5)
    _, _, receipt = transforms.dg_to_dc(dg)
    assert receipt.counts["condition_states"] <= 2 + len(dg.condition.states) * (1 + len(dg.inputs))
