"""Solving delay games and games under delayed control, sweeps and decisive bounds."""
from __future__ import annotations

import os
from dataclasses import dataclass, field

from . import graph
from . import strategy as st
from .graph import P0, P1, GraphGame, Solution
from .model import CONTROLLER, PARITY, REACH, SAFETY, DelayedControlGame, DelayGame, size_of
from .strategy import EMITTER, RESPONDER, StrategyMachine
from .transforms import check_delay, dc_to_delay_game, lift_I_to_controller, output_renaming
from .verify import verify_strategy

DEFAULT_BUDGET = 10**7
PLAYER_I, PLAYER_O = "PlayerI", "PlayerO"


class BudgetExceeded(RuntimeError):
    def __init__(self, estimate: int, budget: int, last_feasible=None):
        super().__init__(f"estimated {estimate} vertices exceeds the budget of {budget}")
        self.estimate = estimate
        self.budget = budget
        self.last_feasible = last_feasible


def budget() -> int:
    raw = os.environ.get("DELAYGAMES_BUDGET")
    return int(raw) if raw else DEFAULT_BUDGET


def estimate_vertices(dg: DelayGame) -> int:
    n = len(dg.inputs)
    return len(dg.condition.states) * sum(n**i for i in range(dg.lookahead + 2))


def reduce_lookahead(dg: DelayGame, limit: int | None = None) -> GraphGame:
    """Delay-free graph game on (q, buffer): Player I (P1) fills the buffer, Player O (P0) answers."""
    limit = budget() if limit is None else limit
    est = estimate_vertices(dg)
    if est > limit:
        raise BudgetExceeded(est, limit)
    cond, k = dg.condition, dg.lookahead

    def moves(v):
        q, w = v
        if len(w) <= k:
            return [(a, (q, w + (a,))) for a in dg.inputs]
        return [(b, (cond.step(q, (w[0], b)), w[1:])) for b in dg.outputs]

    g = graph.explore((cond.initial, ()), lambda v: P1 if len(v[1]) <= k else P0, moves)
    return graph.lift(g, cond, lambda v: v[0])


@dataclass
class DelayGameResult:
    winner: str
    machine: StrategyMachine
    vertices: int = 0


def _project_o(dg: DelayGame, g: GraphGame, sol: Solution) -> StrategyMachine:
    k = dg.lookahead
    strat = sol.strategies[P0]

    # memory is an I-turn vertex (q, w) with |w| <= k
    def out(m, x):
        v = (m[0], m[1] + (x,))
        return g.edges[v][strat[v]][0]

    def upd(m, x, y):
        q, w = m
        w = w + (x,)
        if y is None:
            return (q, w)
        return (dg.condition.step(q, (w[0], y)), w[1:])

    return st.compact(st.from_function(
        st.PLAYER_O, RESPONDER, dg.inputs, dg.outputs, g.initial, out, upd, (), k,
        silent=lambda m: len(m[1]) < k,
    ))


def _project_i(dg: DelayGame, g: GraphGame, sol: Solution) -> StrategyMachine:
    k = dg.lookahead
    strat = sol.strategies[P1]
    v = g.initial
    block = []
    for _ in range(k + 1):
        a, v = g.edges[v][strat[v]]
        block.append(a)

    # memory is an O-turn vertex (q, w) with |w| = k + 1
    def out(m, b):
        q, w = m
        u = (dg.condition.step(q, (w[0], b)), w[1:])
        return g.edges[u][strat[u]][0]

    def upd(m, b, a):
        q, w = m
        return (dg.condition.step(q, (w[0], b)), w[1:] + (a,))

    return st.compact(st.from_function(st.PLAYER_I, EMITTER, dg.outputs, dg.inputs, v, out, upd, tuple(block)))


def solve_delay_game(dg: DelayGame, limit: int | None = None) -> DelayGameResult:
    g = reduce_lookahead(dg, limit)
    sol = graph.solve(g)
    if g.initial in sol.regions[P0]:
        return DelayGameResult(PLAYER_O, _project_o(dg, g, sol), len(g.vertices))
    return DelayGameResult(PLAYER_I, _project_i(dg, g, sol), len(g.vertices))


@dataclass
class ControlResult:
    wins: bool
    machine: StrategyMachine  # controller machine on a win, Player O certificate otherwise
    image: DelayGame
    vertices: int = 0

    @property
    def verdict(self) -> str:
        return "ControllerWins" if self.wins else "ControllerDoesNotWin"


def solve_delayed_control(g: DelayedControlGame, delta: int, limit: int | None = None, check: bool = True) -> ControlResult:
    k = check_delay(delta)
    dg = dc_to_delay_game(g, delta)
    res = solve_delay_game(dg, limit)
    if res.winner == PLAYER_I:
        back = {v: e for e, v in output_renaming(g).items()}
        machine = lift_I_to_controller(res.machine, k, back)
        if check and not verify_strategy(g, machine, st.CONTROLLER, delta):
            raise AssertionError("lifted controller strategy failed verification")
        return ControlResult(True, machine, dg, res.vertices)
    if check and not verify_strategy(dg, res.machine, st.PLAYER_O):
        raise AssertionError("Player O certificate failed verification")
    return ControlResult(False, res.machine, dg, res.vertices)


@dataclass
class EnvResult:
    wins: bool
    machine: StrategyMachine | None = None

    @property
    def verdict(self) -> str:
        return "EnvWins" if self.wins else "EnvDoesNotWin"


def solve_environment(g: DelayedControlGame, check: bool = True) -> EnvResult:
    """Delay-free solve for the environment (its information does not depend on the delay)."""
    pg = graph.product_game(g.arena, g.condition)
    sol = graph.solve(pg)
    if pg.initial not in sol.regions[P1]:
        return EnvResult(False)
    a, cond = g.arena, g.condition
    strat = sol.strategies[P1]

    # memory is a controller-turn product vertex
    def out(m, c):
        s = a.step(m[0], c)
        v = (s, cond.step(m[1], s))
        return pg.edges[v][strat[v]][0]

    def upd(m, c, e):
        s = a.step(m[0], c)
        q = cond.step(m[1], s)
        s2 = a.step(s, e)
        return (s2, cond.step(q, s2))

    machine = st.compact(st.from_function(st.ENVIRONMENT, RESPONDER, a.calphabet, a.ealphabet, pg.initial, out, upd))
    if check and not verify_strategy(g, machine, st.ENVIRONMENT):
        raise AssertionError("environment strategy failed verification")
    return EnvResult(True, machine)


@dataclass
class PureClass:
    verdict: str  # ControllerSure | EnvSure | UndeterminedPure
    control: ControlResult
    env: EnvResult | None = None


def classify_pure(g: DelayedControlGame, delta: int, limit: int | None = None) -> PureClass:
    ctrl = solve_delayed_control(g, delta, limit)
    if ctrl.wins:
        return PureClass("ControllerSure", ctrl)
    env = solve_environment(g)
    return PureClass("EnvSure" if env.wins else "UndeterminedPure", ctrl, env)


@dataclass(frozen=True)
class Bound:
    delta: int
    exactness: str  # PaperExact | BigOHeuristic


def decisive_bound(g: DelayedControlGame) -> Bound:
    n = len(g.condition.states)
    if g.condition.kind == SAFETY:
        return Bound(2 * 2 ** size_of(g), "PaperExact")
    if g.condition.kind == REACH:
        return Bound(2 * 2 ** (n * n), "BigOHeuristic")
    return Bound(2 * 2 ** (n**3), "BigOHeuristic")


@dataclass
class DelayProfile:
    cap: int
    verdicts: dict = field(default_factory=dict)  # delta -> bool
    machines: dict = field(default_factory=dict)  # winning delta -> controller machine
    delta_max: int | None = None
    outcome: str = "NoneWinning"  # Max | AllDelays | NoneWinning
    bound: Bound | None = None

    def describe(self) -> str:
        if self.outcome == "AllDelays":
            if self.bound.exactness == "PaperExact":
                return f"wins under every delay (decisive bound {self.bound.delta})"
            return f"wins for all delays <= {self.cap}, decisive under heuristic bound {self.bound.delta}"
        if self.outcome == "NoneWinning":
            return "controller wins under no delay"
        return f"largest winning delay {self.delta_max}"


def sweep_delta(g: DelayedControlGame, cap: int, limit: int | None = None) -> DelayProfile:
    """Largest winning even delay up to ``cap`` (wins are downward closed, so search is sound).

    The first losing delay found is always solved pointwise as well.
    """
    check_delay(cap)
    prof = DelayProfile(cap, bound=decisive_bound(g))

    def test(delta):
        if delta not in prof.verdicts:
            r = solve_delayed_control(g, delta, limit)
            prof.verdicts[delta] = r.wins
            if r.wins:
                prof.machines[delta] = r.machine
        return prof.verdicts[delta]

    # galloping search in units of k = delta/2, then bisection
    ok, k_cap = 0, cap // 2
    if not test(0):
        return prof
    step, bad = 1, None
    while ok < k_cap:
        probe = min(ok + step, k_cap)
        if test(2 * probe):
            ok = probe
            step *= 2
        else:
            bad = probe
            break
    if bad is not None:
        while bad - ok > 1:
            mid = (ok + bad) // 2
            if test(2 * mid):
                ok = mid
            else:
                bad = mid
    best = ok
    prof.delta_max = 2 * best
    if prof.delta_max >= prof.bound.delta:
        prof.outcome = "AllDelays"
    else:
        prof.outcome = "Max"
    return prof


@dataclass
class KResult:
    k: int | None  # minimal lookahead won by Player O, or None
    cap: int
    verdicts: dict = field(default_factory=dict)

    @property
    def outcome(self) -> str:
        return f"min k = {self.k}" if self.k is not None else f"NoneUpTo({self.cap})"


def sweep_k(dg: DelayGame, cap: int, limit: int | None = None) -> KResult:
    """Minimal lookahead for a Player O win (O wins are upward closed)."""
    res = KResult(None, cap)
    last_ok = None

    def o_wins(k):
        nonlocal last_ok
        if k not in res.verdicts:
            try:
                res.verdicts[k] = solve_delay_game(dg.with_lookahead(k), limit).winner == PLAYER_O
            except BudgetExceeded as exc:
                exc.last_feasible = last_ok
                raise
            last_ok = k if last_ok is None else max(last_ok, k)
        return res.verdicts[k]

    if o_wins(0):
        res.k = 0
        return res
    lo, hi, step = 0, None, 1  # Player I wins at lo
    while lo < cap:
        probe = min(lo + step, cap)
        if o_wins(probe):
            hi = probe
            break
        lo = probe
        step *= 2
    if hi is None:
        return res
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if o_wins(mid):
            hi = mid
        else:
            lo = mid
    res.k = hi
    return res
