"""End-to-end acceptance checks, one test per criterion, each printing a PASS/FAIL line."""
from __future__ import annotations

import contextlib
import json
import random
import subprocess
import sys
import time
from fractions import Fraction
from pathlib import Path

import pytest

from corpus import dc_corpus, random_automaton, random_delay_game
from delaygames import builtins, delay, graph, randomized, transforms
from delaygames import strategy as st
from delaygames.delay import PLAYER_I, PLAYER_O
from delaygames.model import (
    CONTROLLER, ENVIRONMENT, Arena, DelayedControlGame, complement, difference_witness, run_automaton, size_of,
)
from delaygames.randomized import HorizonPolicy
from delaygames.verify import verify_strategy
from oracles import lassos, positional_regions

GAMES = Path(__file__).resolve().parent.parent / "games"
CORPUS_SIZE = 200


@pytest.fixture
def criterion(capsys):
    @contextlib.contextmanager
    def run(n: int, limit: float, what: str):
        t0 = time.perf_counter()
        try:
            yield
        except BaseException as exc:
            with capsys.disabled():
                print(f"\nFAIL criterion {n:2d}: {what} ({time.perf_counter() - t0:.2f}s) -- {exc!r}")
            raise
        elapsed = time.perf_counter() - t0
        ok = elapsed < limit
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {n:2d}: {what} ({elapsed:.2f}s, limit {limit:g}s)")
        assert ok, f"criterion {n} took {elapsed:.2f}s, limit {limit}s"

    return run


def test_c01_example_lookahead(criterion):
    with criterion(1, 1.0, "ex26 won by Player I at k=1, Player O at k=2, min k = 2"):
        dg = builtins.ex26()
        r1 = delay.solve_delay_game(dg.with_lookahead(1))
        r2 = delay.solve_delay_game(dg.with_lookahead(2))
        assert r1.winner == PLAYER_I and r2.winner == PLAYER_O
        assert verify_strategy(dg.with_lookahead(1), r1.machine, st.PLAYER_I)
        assert verify_strategy(dg.with_lookahead(2), r2.machine, st.PLAYER_O)
        assert delay.sweep_k(dg, 8).k == 2


def test_c02_delay_game_image(criterion):
    with criterion(2, 5.0, "image of ex26 won at delay 2, lost at 4, largest winning delay 2"):
        g, delta, _ = transforms.dg_to_dc(builtins.ex26())
        assert delta == 2
        assert delay.solve_delayed_control(g, 2).wins
        assert not delay.solve_delayed_control(g, 4).wins
        prof = delay.sweep_delta(g, 8)
        assert prof.delta_max == 2 and prof.outcome == "Max"


def test_c03_predict_game(criterion):
    with criterion(3, 5.0, "fig4: win at 0, not at 2, env not winning, undetermined, value 1/2"):
        g = builtins.fig4_predict()
        assert delay.solve_delayed_control(g, 0).wins
        assert delay.solve_delayed_control(g, 2).verdict == "ControllerDoesNotWin"
        assert delay.solve_environment(g).verdict == "EnvDoesNotWin"
        assert delay.classify_pure(g, 2).verdict == "UndeterminedPure"
        rc = randomized.classify_randomized(g, 2)
        assert rc.verdict == "Value" and rc.value == Fraction(1, 2)


def test_c04_modular_family(criterion):
    with criterion(4, 30.0, "modular(n,m): env-sure at 0, value n/m at 2, env value 1 - n/m"):
        for n, m in [(1, 2), (1, 3), (2, 3), (3, 5)]:
            g = builtins.modular(n, m)
            assert randomized.classify_randomized(g, 0).verdict == "EnvSure"
            hp = HorizonPolicy(randomized.Analysis(g).first_absorbing())
            nf = randomized.normal_form_value(g, 2, hp)
            assert nf.report.kind == "Exact"
            assert nf.report.value == Fraction(n, m), (n, m, nf.report.value)
            assert nf.env_value == 1 - Fraction(n, m)


def test_c05_mismatch_three(criterion):
    with criterion(5, 10.0, "mismatch(3): guaranteed 7/8 = best response 7/8; image won by Player O"):
        g = builtins.mismatch(3)
        hp = HorizonPolicy(randomized.Analysis(g).first_absorbing())
        lo = randomized.evaluate_guaranteed(g, 2, randomized.uniform_controller(g, 2), hp)
        hi = randomized.best_response_controller(g, 2, randomized.uniform_environment(g, 2), hp)
        assert lo.kind == hi.kind == "Exact"
        assert lo.value == hi.value == Fraction(7, 8)
        assert delay.solve_delay_game(transforms.dc_to_delay_game(g, 2)).winner == PLAYER_O


def test_c06_value_profile(criterion):
    with criterion(6, 10.0, "fig6: uniform profile 1 - 2^-T for T = 1..10; pure loss at 2"):
        g = builtins.fig6_mismatch()
        prof = randomized.value_profile(g, 2, randomized.uniform_controller(g, 2), range(1, 11))
        assert [v for _, v in prof] == [1 - Fraction(1, 2**t) for t in range(1, 11)]
        assert delay.solve_delayed_control(g, 2).verdict == "ControllerDoesNotWin"
        assert delay.solve_delay_game(transforms.dc_to_delay_game(g, 2)).winner == PLAYER_O


def test_c07_corpus_equivalence(criterion):
    with criterion(7, 300.0, f"{CORPUS_SIZE} random games: verdicts, strategies, monotonicity, k=0 oracle"):
        oracle_checked = 0
        sensitive = 0
        for g in dc_corpus(size=CORPUS_SIZE):
            wins = []
            for delta in (0, 2, 4):
                image = transforms.dc_to_delay_game(g, delta)
                dg_res = delay.solve_delay_game(image)
                r = delay.solve_delayed_control(g, delta, check=False)
                assert r.wins == (dg_res.winner == PLAYER_I)
                if r.wins:
                    assert verify_strategy(g, r.machine, st.CONTROLLER, delta)
                    player_i = transforms.lift_controller_to_I(r.machine, delta, transforms.output_renaming(g))
                    assert verify_strategy(image, player_i, st.PLAYER_I)
                else:
                    assert verify_strategy(image, r.machine, st.PLAYER_O)
                wins.append(r.wins)
                if delta == 0:
                    red = delay.reduce_lookahead(image)
                    reg = positional_regions(red)
                    if reg is not None:
                        sol = graph.solve(red)
                        assert (set(sol.regions[0]), set(sol.regions[1])) == reg
                        oracle_checked += 1
            assert wins == sorted(wins, reverse=True), "winning must be downward closed in the delay"
            sensitive += wins[0] != wins[-1]
            env = delay.solve_environment(g, check=False)
            if env.wins:
                assert verify_strategy(g, env.machine, st.ENVIRONMENT)
                assert not any(wins)
        rng = random.Random(7)
        for _ in range(CORPUS_SIZE):
            red = delay.reduce_lookahead(random_delay_game(rng))
            reg = positional_regions(red)
            assert reg is not None
            sol = graph.solve(red)
            assert (set(sol.regions[0]), set(sol.regions[1])) == reg
            oracle_checked += 1
        assert oracle_checked >= CORPUS_SIZE
        assert sensitive >= 50


def test_c08_environment_lift(criterion):
    with criterion(8, 60.0, "env-won corpus games: lifted Player O machines verify at k = 0, 1, 2"):
        lifted = 0
        for g in dc_corpus(size=CORPUS_SIZE):
            env = delay.solve_environment(g, check=False)
            if not env.wins:
                continue
            ren = transforms.output_renaming(g)
            for k in (0, 1, 2):
                o = transforms.lift_env_to_O(env.machine, k, ren)
                assert verify_strategy(transforms.dc_to_delay_game(g, 2 * k), o, st.PLAYER_O)
                lifted += 1
        assert lifted > 0


def test_c09_complement_and_round_trip(criterion):
    with criterion(9, 60.0, "100 automata partition lassos with their complements; 50 round trips"):
        rng = random.Random(99)
        all_lassos = list(lassos(("a", "b"), 5, 5))
        for i in range(100):
            aut = random_automaton(rng, ("a", "b"), max_states=5)
            comp = complement(aut)
            for u, v in all_lassos:
                assert run_automaton(aut, u, v) != run_automaton(comp, u, v)
        for i in range(50):
            dg = random_delay_game(rng, lookahead=rng.randint(0, 2), max_states=4)
            image, _, receipt = transforms.dg_to_dc(dg)
            assert difference_witness(transforms.condition_of_image(image, receipt), dg.condition) is None


def test_c10_decisive_bound(criterion):
    with criterion(10, 60.0, "single-letter safety game swept past its exact bound gives AllDelays"):
        arena = Arena.build(
            [("c", CONTROLLER), ("e", ENVIRONMENT), ("trap", ENVIRONMENT)],
            "c", ["a"], ["x"], [("c", "a", "e"), ("e", "x", "c"), ("trap", "x", "c")],
        )
        g = DelayedControlGame.from_states(arena, "safety", ["trap"], name="degenerate")
        assert size_of(g) <= 7
        bound = delay.decisive_bound(g)
        assert bound.exactness == "PaperExact" and bound.delta == 2 * 2 ** size_of(g)
        prof = delay.sweep_delta(g, bound.delta)
        assert prof.outcome == "AllDelays" and prof.delta_max == bound.delta


def test_c11_reproducible_simulation(criterion):
    with criterion(11, 60.0, "fig4 simulation byte-identical per seed; 99% interval covers 1/2 for >= 99/100 seeds"):
        g = builtins.fig4_predict()
        sc = randomized.uniform_controller(g, 2)
        se = randomized.uniform_environment(g, 2)
        hp = HorizonPolicy(randomized.Analysis(g).first_absorbing())
        a = randomized.simulate(g, 2, sc, se, hp, 10_000, 12345)
        b = randomized.simulate(g, 2, sc, se, hp, 10_000, 12345)
        assert repr(a) == repr(b)
        argv = [sys.executable, "-m", "delaygames.cli", "simulate", str(GAMES / "fig4.game"),
                "--delta", "2", "--trials", "2000", "--seed", "5", "--horizon", str(hp.horizon)]
        out1 = subprocess.run(argv, capture_output=True, check=True).stdout
        out2 = subprocess.run(argv, capture_output=True, check=True).stdout
        assert out1 == out2 and json.loads(out1)["trials"] == 2000
        covered = 0
        for seed in range(100):
            r = randomized.simulate(g, 2, sc, se, hp, 10_000, seed)
            covered += r.lo <= 0.5 <= r.hi
        assert covered >= 99, covered
