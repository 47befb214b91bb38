"""Translations between games under delayed control and delay games, plus strategy lifts."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from . import strategy as st
from .model import (
    CONTROLLER,
    ENVIRONMENT,
    PARITY,
    Arena,
    DelayedControlGame,
    DelayGame,
    ModelError,
    OmegaAutomaton,
    absorbing,
    complement,
)
from .strategy import EMITTER, RESPONDER, StrategyError, StrategyMachine


class DelayError(ValueError):
    """Odd or negative delay."""


@dataclass(frozen=True)
class TransformReceipt:
    direction: str
    renaming: dict = field(default_factory=dict)
    counts: dict = field(default_factory=dict)


def check_delay(delta: int) -> int:
    if delta < 0 or delta % 2:
        raise DelayError("delay must be even")
    return delta // 2


def prime_apart(letters, taken) -> dict:
    """Renaming that moves ``letters`` away from ``taken`` by appending primes."""
    taken = set(taken)
    out = {}
    if not any(a in taken for a in letters):
        return out
    used = set(taken) | set(letters)
    for a in letters:
        b = a + "'"
        while b in used:
            b += "'"
        used.add(b)
        out[a] = b
    return out


def _bfs_automaton(initial, letters, step, kind, mark_of, color_of=None) -> OmegaAutomaton:
    states = [initial]
    seen = {initial}
    trans = {}
    queue = deque([initial])
    while queue:
        q = queue.popleft()
        for a in letters:
            p = step(q, a)
            trans[(q, a)] = p
            if p not in seen:
                seen.add(p)
                states.append(p)
                queue.append(p)
    marked = frozenset(q for q in states if mark_of(q)) if kind != PARITY else frozenset()
    coloring = {q: color_of(q) for q in states} if kind == PARITY else None
    return OmegaAutomaton(tuple(states), tuple(letters), initial, trans, kind, marked, coloring)


def dc_to_condition(g: DelayedControlGame, renaming: dict | None = None) -> OmegaAutomaton:
    """Automaton over (controller letter, environment letter) pairs recognising L(G).

    Each pair advances the arena twice. Safety and reachability marks are made
    absorbing first so the skipped intermediate state cannot hide a visit; for
    parity the state also carries the larger color of the two states fed.
    """
    a, cond = g.arena, g.condition
    ren = renaming or {}
    letters = [(c, ren.get(e, e)) for c in a.calphabet for e in a.ealphabet]
    back = {ren.get(e, e): e for e in a.ealphabet}
    if cond.kind != PARITY:
        cond = absorbing(cond)  # also keeps a marked initial state visible
    q0 = cond.trans[(cond.initial, a.initial)]
    if cond.kind != PARITY:

        def step(v, pair):
            s, q = v
            c, e = pair
            s1 = a.step(s, c)
            s2 = a.step(s1, back[e])
            return (s2, cond.step(cond.step(q, s1), s2))

        return _bfs_automaton((a.initial, q0), letters, step, cond.kind, lambda v: v[1] in cond.marked)

    def pstep(v, pair):
        s, q, _ = v
        c, e = pair
        s1 = a.step(s, c)
        s2 = a.step(s1, back[e])
        q1 = cond.step(q, s1)
        q2 = cond.step(q1, s2)
        return (s2, q2, max(cond.color(q1), cond.color(q2)))

    return _bfs_automaton((a.initial, q0, cond.color(q0)), letters, pstep, PARITY, None, lambda v: v[2])


def output_renaming(g: DelayedControlGame) -> dict:
    return prime_apart(g.arena.ealphabet, g.arena.calphabet)


def dc_to_delay_game(g: DelayedControlGame, delta: int) -> DelayGame:
    """Delay game whose Player O wins exactly the complement of L(G), with k = delta/2."""
    k = check_delay(delta)
    ren = output_renaming(g)
    outputs = tuple(ren.get(e, e) for e in g.arena.ealphabet)
    cond = complement(dc_to_condition(g, ren))
    return DelayGame(g.arena.calphabet, outputs, cond, k, name=f"{g.name or 'game'}_dg{k}")


def dg_to_dc(dg: DelayGame) -> tuple[DelayedControlGame, int, TransformReceipt]:
    """Game under delayed control simulating ``dg``; controller wins under 2k iff Player I wins ``dg``."""
    ren = prime_apart(dg.outputs, dg.inputs)
    outputs = tuple(ren.get(b, b) for b in dg.outputs)
    s_i = "sI"
    while s_i in dg.inputs or s_i in outputs:
        s_i += "'"
    states = [(s_i, CONTROLLER)] + [(b, CONTROLLER) for b in outputs] + [(a, ENVIRONMENT) for a in dg.inputs]
    edges = [(s, a, a) for s in (s_i,) + outputs for a in dg.inputs]
    edges += [(a, b, b) for a in dg.inputs for b in outputs]
    arena = Arena.build(states, s_i, dg.inputs, outputs, edges)

    comp = complement(dg.condition)
    orig = {ren.get(b, b): b for b in dg.outputs}
    inputs = set(dg.inputs)
    start, junk = ("start",), ("junk",)

    def step(v, s):
        if v == start:
            return (comp.initial, None) if s == s_i else junk
        if v == junk:
            return junk
        q, a = v
        if a is None:
            return (q, s) if s in inputs else junk
        if s in orig:
            return (comp.step(q, (a, orig[s])), None)
        return junk

    arena_states = arena.states
    cond = _bfs_automaton(
        start, arena_states, step, comp.kind,
        lambda v: v != junk and (comp.initial if v == start else v[0]) in comp.marked,
        lambda v: 0 if v == junk else comp.color(comp.initial if v == start else v[0]),
    )
    game = DelayedControlGame(arena, cond, None, name=f"{dg.name or 'dg'}_dc")
    receipt = TransformReceipt(
        "dg->dc",
        dict(ren),
        {
            "arena_states": len(arena.states),
            "condition_states": len(cond.states),
            "condition_bound": 2 + len(dg.condition.states) * (1 + len(dg.inputs)),
        },
    )
    return game, 2 * dg.lookahead, receipt


def condition_of_image(game: DelayedControlGame, receipt: TransformReceipt) -> OmegaAutomaton:
    """Recover the delay-game language from a :func:`dg_to_dc` image (complementation undone)."""
    back = {v: k for k, v in receipt.renaming.items()}
    return complement(dc_to_condition(game, back))


# --- strategy lifts ------------------------------------------------------------


def _require(s: StrategyMachine, side: str, block: int | None = None, lead_in: int | None = None):
    if s.side != side:
        raise StrategyError(f"expected a {side} machine, got {s.side}")
    if block is not None and s.block_length != block:
        raise StrategyError(f"initial block must have length {block}, got {s.block_length}")
    if lead_in is not None and s.lead_in != lead_in:
        raise StrategyError(f"lead-in must be {lead_in}, got {s.lead_in}")


def lift_controller_to_I(s: StrategyMachine, delta: int, renaming: dict | None = None) -> StrategyMachine:
    """Controller machine under delay ``delta`` as a Player I machine at k = delta/2."""
    k = check_delay(delta)
    _require(s, EMITTER, block=k + 1)
    return st.rename_io(s, st.PLAYER_I, inputs_map=renaming)


def lift_I_to_controller(s: StrategyMachine, k: int, renaming: dict | None = None) -> StrategyMachine:
    """Player I machine at lookahead ``k`` as a controller machine under delay 2k.

    ``renaming`` maps Player O letters to environment letters.
    """
    _require(s, EMITTER, block=k + 1)
    return st.rename_io(s, st.CONTROLLER, inputs_map=renaming)


def lift_env_to_O(s: StrategyMachine, k: int, renaming: dict | None = None) -> StrategyMachine:
    """Player O machine at lookahead ``k`` that ignores the lookahead.

    Memory pairs the environment machine's memory with the last ``k`` input
    letters; the environment machine is always driven ``k`` letters late.
    ``renaming`` maps environment letters to Player O letters.
    """
    _require(s, RESPONDER, lead_in=0)
    ren = renaming or {}
    outputs = tuple(ren.get(y, y) for y in s.outputs)

    def out(m, x):
        mem, buf = m
        oldest = (buf + (x,))[0]
        d = s.dist(mem, oldest)
        if d.is_point():
            return ren.get(d.support[0], d.support[0])
        return st.Dist(tuple((ren.get(y, y), p) for y, p in d.items))

    back = {ren.get(y, y): y for y in s.outputs}

    def upd(m, x, y):
        mem, buf = m
        if y is None:
            return (mem, buf + (x,))
        window = buf + (x,)
        return (s.next(mem, window[0], back[y]), window[1:])

    return st.compact(
        st.from_function(
            st.PLAYER_O, RESPONDER, s.inputs, outputs, (s.initial, ()),
            out, upd, (), k, silent=lambda m: len(m[1]) < k,
        )
    )
