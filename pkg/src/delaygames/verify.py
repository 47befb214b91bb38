"""Independent strategy checker: product of a pure machine with the game, opponent unconstrained."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from . import paths
from . import strategy as st
from .model import CONTROLLER, PARITY, REACH, SAFETY, DelayedControlGame, DelayGame, Lasso
from .strategy import EMITTER, RESPONDER, StrategyError, StrategyMachine
from .transforms import check_delay

ROOT = ("root",)


@dataclass(frozen=True)
class VerifyResult:
    verified: bool
    counterexample: Lasso | None = None
    product_size: int = 0

    def __bool__(self) -> bool:
        return self.verified


def _explore(root, moves):
    edges: dict = {}
    order = [root]
    seen = {root}
    queue = deque([root])
    while queue:
        v = queue.popleft()
        edges[v] = list(moves(v))
        for _, w in edges[v]:
            if w not in seen:
                seen.add(w)
                order.append(w)
                queue.append(w)
    return order, edges


def _objective(aut, order, label, winning: bool):
    obj = paths.lift_objective(aut.kind, order, label, aut.marked, aut.coloring)
    return obj if winning else paths.complement_objective(obj)


def _check(order, edges, objective) -> tuple[list, list] | None:
    return paths.find_violation(order[0], lambda v: [w for _, w in edges[v]], objective)


def _labels(vertices, edges) -> list:
    out = []
    for v, w in zip(vertices, vertices[1:]):
        out.append(next(lab for lab, t in edges[v] if t == w))
    return out


def _lasso(hit, edges) -> Lasso:
    stem, loop = hit
    stem_letters = _labels(stem + [loop[0]], edges)
    loop_letters = _labels(loop + [loop[0]], edges)
    flat = lambda xs: tuple(a for lab in xs if lab is not None for a in lab)
    return Lasso(flat(stem_letters), flat(loop_letters))


def verify_strategy(game, machine: StrategyMachine, player: str, delta: int | None = None) -> VerifyResult:
    """Check that every play consistent with ``machine`` is won by ``player``.

    For a game under delayed control pass ``delta``; for a delay game the
    lookahead is taken from the game. Counterexamples are lassos over the
    letters of the game (arena letters, or (input, output) pairs).
    """
    if not machine.is_pure():
        raise StrategyError("only pure machines can be verified")
    if isinstance(game, DelayedControlGame):
        if player == st.CONTROLLER:
            if delta is None:
                raise StrategyError("delay required")
            k = check_delay(delta)
            _structure(machine, EMITTER, block=k + 1)
            return _dc_controller(game, machine)
        if player == st.ENVIRONMENT:
            _structure(machine, RESPONDER, lead_in=0)
            return _dc_environment(game, machine)
    elif isinstance(game, DelayGame):
        k = game.lookahead
        if player == st.PLAYER_I:
            _structure(machine, EMITTER, block=k + 1)
            return _dg_player_i(game, machine)
        if player == st.PLAYER_O:
            _structure(machine, RESPONDER, lead_in=k)
            return _dg_player_o(game, machine)
    raise StrategyError(f"player {player!r} does not fit {type(game).__name__}")


def _structure(m: StrategyMachine, side: str, block: int | None = None, lead_in: int | None = None):
    if m.side != side:
        raise StrategyError(f"expected a {side} machine, got {m.side}")
    if block is not None and m.block_length != block:
        raise StrategyError(f"initial block must have length {block}, got {m.block_length}")
    if lead_in is not None and m.lead_in != lead_in:
        raise StrategyError(f"lead-in must be {lead_in}, got {m.lead_in}")


def _result(order, edges, aut, label, winning) -> VerifyResult:
    hit = _check(order, edges, _objective(aut, order, label, winning))
    if hit is None:
        return VerifyResult(True, None, len(order))
    return VerifyResult(False, _lasso(hit, edges), len(order))


def _dc_controller(g: DelayedControlGame, m: StrategyMachine) -> VerifyResult:
    a, cond = g.arena, g.condition

    # vertex (s, q, memory, committed letters); the root carries q_I
    def moves(v):
        if v == ROOT:
            s = a.initial
            return [(None, (s, cond.step(cond.initial, s), m.initial, m.block()))]
        s, q, mem, queue = v
        if a.owner[s] == CONTROLLER:
            c, rest = queue[0], queue[1:]
            s2 = a.step(s, c)
            return [((c,), (s2, cond.step(q, s2), mem, rest))]
        out = []
        for e in a.ealphabet:
            y = m.choose(mem, e)
            s2 = a.step(s, e)
            out.append(((e,), (s2, cond.step(q, s2), m.next(mem, e, y), queue + (y,))))
        return out

    order, edges = _explore(ROOT, moves)
    return _result(order, edges, cond, lambda v: cond.initial if v == ROOT else v[1], True)


def _dc_environment(g: DelayedControlGame, m: StrategyMachine) -> VerifyResult:
    a, cond = g.arena, g.condition

    # controller vertices (s, q, memory); environment vertices also carry the chosen reply
    def moves(v):
        if v == ROOT:
            s = a.initial
            return [(None, (s, cond.step(cond.initial, s), m.initial, None))]
        s, q, mem, reply = v
        if a.owner[s] == CONTROLLER:
            out = []
            for c in a.calphabet:
                y = m.choose(mem, c)
                s2 = a.step(s, c)
                out.append(((c,), (s2, cond.step(q, s2), m.next(mem, c, y), y)))
            return out
        s2 = a.step(s, reply)
        return [((reply,), (s2, cond.step(q, s2), mem, None))]

    order, edges = _explore(ROOT, moves)
    return _result(order, edges, cond, lambda v: cond.initial if v == ROOT else v[1], False)


def _dg_player_i(dg: DelayGame, m: StrategyMachine) -> VerifyResult:
    cond = dg.condition

    # vertex (q, memory, unanswered input letters)
    def moves(v):
        q, mem, buf = v
        out = []
        for b in dg.outputs:
            y = m.choose(mem, b)
            out.append((((buf[0], b),), (cond.step(q, (buf[0], b)), m.next(mem, b, y), buf[1:] + (y,))))
        return out

    root = (cond.initial, m.initial, m.block())
    order, edges = _explore(root, moves)
    return _result(order, edges, cond, lambda v: v[0], False)


def _dg_player_o(dg: DelayGame, m: StrategyMachine) -> VerifyResult:
    cond = dg.condition
    k = dg.lookahead

    # vertex (q, memory, unanswered input letters); pairs are emitted once the window is full
    def moves(v):
        q, mem, buf = v
        out = []
        for x in dg.inputs:
            if len(buf) < k:
                out.append((None, (q, m.next(mem, x, None), buf + (x,))))
                continue
            y = m.choose(mem, x)
            window = buf + (x,)
            pair = (window[0], y)
            out.append(((pair,), (cond.step(q, pair), m.next(mem, x, y), window[1:])))
        return out

    root = (cond.initial, m.initial, ())
    order, edges = _explore(root, moves)
    return _result(order, edges, cond, lambda v: v[0], True)


def replay_dc(g: DelayedControlGame, lasso: Lasso, unroll: int = 3):
    """Arena play prefix for ``stem loop^unroll`` (used to sanity-check counterexamples)."""
    from .model import play_of

    return play_of(g.arena, lasso.stem + lasso.loop * unroll)
