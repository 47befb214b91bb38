from fractions import Fraction

import pytest

from delaygames import strategy as st
from delaygames.strategy import Dist, StrategyError


def test_dist_requires_exact_sum():
    with pytest.raises(StrategyError):
        Dist((("a", Fraction(1, 2)),))
    with pytest.raises(StrategyError):
        Dist((("a", Fraction(3, 2)), ("b", Fraction(-1, 2))))
    d = Dist.of([("a", Fraction(1, 4)), ("b", Fraction(1, 2)), ("a", Fraction(1, 4))])
    assert d.prob("a") == Fraction(1, 2) and d.prob("z") == 0
    assert Dist.uniform("abc").prob("b") == Fraction(1, 3)
    assert Dist.point("x").is_point()


def counter():
    # emits the parity of the number of 'x' read so far
    return st.from_function(
        st.CONTROLLER, st.EMITTER, ("x", "y"), ("0", "1"), 0,
        lambda m, x: str((m + (x == "x")) % 2), lambda m, x, y: (m + (x == "x")) % 2, block=("0",),
    )


def test_from_function_run():
    m = counter()
    assert m.problems() == []
    assert m.run("xxyx") == ("0", "1", "0", "0", "1")
    assert set(m.memory) == {0, 1}


def test_responder_lead_in():
    m = st.from_function(
        st.PLAYER_O, st.RESPONDER, ("a", "b"), ("A", "B"), (),
        lambda w, x: (w + (x,))[0].upper(), lambda w, x, y: (w + (x,))[-1:] if y is not None else w + (x,),
        lead_in=1, silent=lambda w: len(w) < 1,
    )
    assert m.run("abba") == ("A", "B", "B")


def test_constant_and_uniform():
    c = st.constant(st.ENVIRONMENT, st.RESPONDER, ("a",), ("x", "y"), "y")
    assert c.run("aaa") == ("y", "y", "y")
    u = st.uniform(st.CONTROLLER, st.EMITTER, ("x",), ("a", "b"), block_length=2)
    assert not u.is_pure()
    assert u.block_length == 2
    assert u.block_dist().prob(("a", "b")) == Fraction(1, 4)
    with pytest.raises(StrategyError):
        u.run("x")


def test_problems_detect_partial_machines():
    m = st.StrategyMachine(st.CONTROLLER, st.EMITTER, ("x",), ("a",), (0,), 0, {}, {}, ("a",))
    assert any("input-total" in p for p in m.problems())
    bad = st.StrategyMachine("judge", st.EMITTER, ("x",), ("a",), (0,), 0, {(0, "x"): "a"}, {(0, "x", "a"): 0})
    assert any("role" in p for p in bad.problems())


def test_compact_and_rename_preserve_behaviour():
    m = counter()
    c = st.compact(m)
    assert st.same_semantics(m, c)
    r = st.rename_io(m, st.PLAYER_I, inputs_map={"x": "X", "y": "Y"}, outputs_map={"0": "p", "1": "q"})
    assert r.role == st.PLAYER_I
    assert r.run("XXYX") == ("p", "q", "p", "p", "q")


def test_same_semantics_detects_difference():
    a = st.constant(st.ENVIRONMENT, st.RESPONDER, ("a",), ("x", "y"), "x")
    b = st.constant(st.ENVIRONMENT, st.RESPONDER, ("a",), ("x", "y"), "y")
    assert not st.same_semantics(a, b)
