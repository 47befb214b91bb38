"""Canonical encodings of the reference games.

All sinks are two-cycles between a controller state and an environment state
that accept every letter, so alternation and totality hold everywhere.
"""
from __future__ import annotations

from .model import (
    CONTROLLER as C,
    ENVIRONMENT as E,
    REACH,
    SAFETY,
    Arena,
    DelayedControlGame,
    DelayGame,
    make_automaton,
)

HT = ("h", "t")


def _sink(prefix: str, calphabet, ealphabet):
    ce, cc = f"{prefix}_E", f"{prefix}_C"
    states = [(ce, E), (cc, C)]
    edges = [(ce, e, cc) for e in ealphabet] + [(cc, c, ce) for c in calphabet]
    return states, edges


def fig4_predict() -> DelayedControlGame:
    """Environment wins iff its first letter equals controller's second letter."""
    states = [("s0", C), ("E_h", E), ("E_t", E), ("C_h", C), ("C_t", C)]
    edges = [("s0", c, f"E_{c}") for c in HT]
    edges += [(f"E_{x}", e, f"C_{e}") for x in HT for e in HT]
    edges += [(f"C_{y}", c, "match_E" if c == y else "miss_E") for y in HT for c in HT]
    for p in ("match", "miss"):
        s, e = _sink(p, HT, HT)
        states += s
        edges += e
    arena = Arena.build(states, "s0", HT, HT, edges)
    return DelayedControlGame.from_states(arena, SAFETY, {"match_E", "match_C"}, name="fig4_predict")


def fig6_mismatch() -> DelayedControlGame:
    """Controller wins once some controller letter differs from the preceding environment letter."""
    states = [("s0", C), ("E", E), ("C_h", C), ("C_t", C)]
    edges = [("s0", c, "E") for c in HT]
    edges += [("E", e, f"C_{e}") for e in HT]
    edges += [(f"C_{y}", c, "E" if c == y else "W_E") for y in HT for c in HT]
    s, e = _sink("W", HT, HT)
    arena = Arena.build(states + s, "s0", HT, HT, edges + e)
    return DelayedControlGame.from_states(arena, REACH, {"W_E", "W_C"}, name="fig6_mismatch")


def mismatch(r: int) -> DelayedControlGame:
    """Bounded variant of :func:`fig6_mismatch`: a mismatch must happen within ``r`` rounds."""
    if r < 1:
        raise ValueError("mismatch needs r >= 1")
    states = [("s0", C)]
    edges = [("s0", c, "E_1") for c in HT]
    for i in range(1, r + 1):
        states += [(f"E_{i}", E), (f"C_{i}_h", C), (f"C_{i}_t", C)]
        edges += [(f"E_{i}", e, f"C_{i}_{e}") for e in HT]
        same = f"E_{i + 1}" if i < r else "LOSE_E"
        edges += [(f"C_{i}_{y}", c, same if c == y else "WIN_E") for y in HT for c in HT]
    for p in ("WIN", "LOSE"):
        s, e = _sink(p, HT, HT)
        states += s
        edges += e
    arena = Arena.build(states, "s0", HT, HT, edges)
    return DelayedControlGame.from_states(arena, REACH, {"WIN_E", "WIN_C"}, name=f"mismatch_{r}")


def modular(n: int, m: int) -> DelayedControlGame:
    """One-shot game: controller picks a, environment picks b, controller wins iff (a+b) mod m < n."""
    if not 0 <= n < m:
        raise ValueError("modular needs 0 <= n < m")
    letters = tuple(str(a) for a in range(m))
    states = [("s0", C)] + [(f"E_{a}", E) for a in range(m)]
    states += [(f"{w}_{a}", C) for a in range(m) for w in ("win", "lose")]
    edges = [("s0", str(a), f"E_{a}") for a in range(m)]
    for a in range(m):
        for b in range(m):
            edges.append((f"E_{a}", str(b), f"win_{a}" if (a + b) % m < n else f"lose_{a}"))
        edges += [(f"win_{a}", c, "WIN_E") for c in letters]
        edges += [(f"lose_{a}", c, "LOSE_E") for c in letters]
    for p in ("WIN", "LOSE"):
        s, e = _sink(p, letters, letters)
        states += s
        edges += e
    arena = Arena.build(states, "s0", letters, letters, edges)
    target = {f"win_{a}" for a in range(m)} | {"WIN_E", "WIN_C"}
    return DelayedControlGame.from_states(arena, REACH, target, name=f"modular_{n}_{m}")


def ex26(lookahead: int = 1, primed: bool = True) -> DelayGame:
    """Player O loses iff its first letter occurs among Player I's first three letters."""
    inputs = ("1", "2", "3", "4")
    mark = "'" if primed else ""
    outputs = tuple(a + mark for a in inputs)
    plain = lambda b: b[:-1] if primed else b
    states = ["init"] + [f"B1_{x}" for x in inputs] + [f"B2_{x}" for x in inputs] + ["acc", "rej"]
    trans = {}
    for a in inputs:
        for b in outputs:
            x = plain(b)
            trans[("init", (a, b))] = "rej" if a == x else f"B1_{x}"
            for y in inputs:
                trans[(f"B1_{y}", (a, b))] = "rej" if a == y else f"B2_{y}"
                trans[(f"B2_{y}", (a, b))] = "rej" if a == y else "acc"
            trans[("acc", (a, b))] = "acc"
            trans[("rej", (a, b))] = "rej"
    alphabet = [(a, b) for a in inputs for b in outputs]
    aut = make_automaton(states, alphabet, "init", trans, SAFETY, marked={"rej"})
    return DelayGame(inputs, outputs, aut, lookahead, name="ex26")


BUILTINS = {
    "fig4_predict": (fig4_predict, 0),
    "fig6_mismatch": (fig6_mismatch, 0),
    "mismatch": (mismatch, 1),
    "modular": (modular, 2),
    "ex26": (ex26, 0),
}


def builtin(name: str, *params: int):
    try:
        fn, arity = BUILTINS[name]
    except KeyError:
        raise ValueError(f"unknown built-in {name!r}") from None
    if name == "ex26":
        if len(params) > 1:
            raise ValueError("ex26 takes at most one parameter (lookahead)")
        if params and params[0] < 0:
            raise ValueError("lookahead must be >= 0")
        return fn(*params)
    if len(params) != arity:
        raise ValueError(f"{name} takes {arity} parameter(s)")
    return fn(*params)
