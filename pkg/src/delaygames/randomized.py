"""Mixed strategies under delayed control: guaranteed values, best responses, normal form, simulation.

Information model. Letters are indexed 0, 1, 2, ...; controller plays the even
ones and environment the odd ones. A player moving at index ``i`` with lag
``d`` has seen every opponent letter of index at most ``i - d - 1`` and all of
its own letters. The controller's lag is the delay. The environment's lag
defaults to the same delay here (both players subject to the same
informedness constraint); pass ``env_delay=0`` for a fully informed
environment.

Finite horizon. A horizon ``T`` covers the letters 0..2T (T environment
moves). Configurations whose outcome is already fixed on every continuation
are scored immediately; configurations still open after the horizon are
scored by truncation: a loss for reachability (a lower bound), a win for
safety (an upper bound). Parity conditions are only accepted when every play
is decided within the horizon.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import graph, paths
from . import strategy as st
from .delay import classify_pure
from .matrix import certify, reduce_dominated, solve_exact
from .model import PARITY, REACH, SAFETY, DelayedControlGame
from .strategy import EMITTER, RESPONDER, Dist, StrategyError, StrategyMachine
from .transforms import check_delay

Z99 = 2.5758293035489004
DEFAULT_CAP = 2**14
HISTORY_CAP = 2_000_000


class HorizonError(ValueError):
    """No sound evaluation exists for the requested horizon."""


class CapExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class HorizonPolicy:
    horizon: int
    require_absorbing: bool = False

    def __post_init__(self):
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")


@dataclass
class ValueReport:
    kind: str  # Exact | LowerBound | UpperBound | Estimate | Interval
    value: Fraction | float | None = None
    lo: Fraction | float | None = None
    hi: Fraction | float | None = None
    horizon: int | None = None
    samples: int | None = None
    seed: int | None = None
    certificates: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind == "Exact":
            self.lo = self.hi = self.value
        if self.kind == "Estimate" and (not self.samples or self.seed is None):
            raise ValueError("estimates need a sample count and a seed")


# --- decided configurations ------------------------------------------------------


class Analysis:
    """Product vertices (s, q) classified as surely won, surely lost or open for the controller."""

    def __init__(self, g: DelayedControlGame):
        self.game = g
        self.pg = graph.product_game(g.arena, g.condition)
        obj = self.pg.objective
        succ = self.pg.succ
        nodes = self.pg.vertices
        self.not_sure_win = paths.bad_vertices(nodes, succ, obj)
        self.not_sure_loss = paths.bad_vertices(nodes, succ, paths.complement_objective(obj))
        self.kind = g.condition.kind
        self.root = self.pg.initial
        self._next = {v: dict(self.pg.edges[v]) for v in nodes}

    def step(self, v, letter):
        return self._next[v][letter]

    def status(self, v):
        if v not in self.not_sure_win:
            return Fraction(1)
        if v not in self.not_sure_loss:
            return Fraction(0)
        return None

    def truncated(self) -> Fraction:
        if self.kind == REACH:
            return Fraction(0)
        if self.kind == SAFETY:
            return Fraction(1)
        raise HorizonError("parity conditions have no sound truncation")

    def absorbing_within(self, horizon: int) -> bool:
        frontier = {self.root}
        for _ in range(2 * horizon + 1):
            frontier = {w for v in frontier if self.status(v) is None for w in self.pg.succ(v)}
        return all(self.status(v) is not None for v in frontier)

    def first_absorbing(self, limit: int = 32) -> int | None:
        for t in range(1, limit + 1):
            if self.absorbing_within(t):
                return t
        return None

    def bound_kind(self, horizon: int) -> str:
        if self.absorbing_within(horizon):
            return "Exact"
        if self.kind == PARITY:
            raise HorizonError("parity conditions have no sound truncation")
        return "LowerBound" if self.kind == REACH else "UpperBound"


def _block(machine: StrategyMachine) -> int:
    if machine.side == RESPONDER:
        if machine.lead_in:
            raise StrategyError("responder machines need lead-in 0 here")
        return 0
    return machine.block_length


def _require_lag(machine: StrategyMachine, lag: int, who: str):
    want = lag // 2 + (1 if who == "controller" else 0)
    if _block(machine) != want:
        raise StrategyError(f"{who} machine must have an initial block of length {want} for this delay")


def _opp_before(i: int) -> int:
    """Number of opponent letters played before index ``i``."""
    return i // 2 if i % 2 == 0 else (i + 1) // 2


# --- belief-based optimisation against a fixed machine --------------------------------


class _Engine:
    """Exact optimisation for one player against a fixed (possibly mixed) machine.

    The optimiser's decision points are grouped by what it has observed; the
    fixed machine acts as chance. Weights are unnormalised probabilities, so
    the value of a belief is additive and scales linearly.
    """

    def __init__(self, an: Analysis, horizon: int, fixed: StrategyMachine, fixed_parity: int, opt_lag: int, maximize: bool):
        self.an = an
        self.end = 2 * horizon + 1
        self.fixed = fixed
        self.fp = fixed_parity
        self.block = _block(fixed)
        self.lag = opt_lag
        self.maximize = maximize
        arena = an.game.arena
        self.opt_letters = arena.ealphabet if fixed_parity == 0 else arena.calphabet
        self.memo: dict = {}
        self.truncated = an.truncated() if not an.absorbing_within(horizon) else None

    # config: (vertex, machine memory, machine queue, unfed optimiser letters, unrevealed (index, letter))
    def root(self) -> dict:
        belief: dict = {}
        for blk, p in self.fixed.block_dist():
            c = (self.an.root, self.fixed.initial, tuple(blk), (), ())
            belief[c] = belief.get(c, Fraction(0)) + p
        return belief

    def run(self) -> Fraction:
        banked, belief = self._bank(self.root())
        return banked + self.value(0, belief)

    def _bank(self, belief: dict):
        banked = Fraction(0)
        open_: dict = {}
        for c, w in belief.items():
            s = self.an.status(c[0])
            if s is None:
                open_[c] = w
            else:
                banked += w * s
        return banked, open_

    def value(self, i: int, belief: dict) -> Fraction:
        if not belief:
            return Fraction(0)
        total = sum(belief.values())
        if i == self.end:
            if self.truncated is None:
                raise AssertionError("open configuration past an absorbing horizon")
            return total * self.truncated
        key = (i, frozenset((c, w / total) for c, w in belief.items()))
        hit = self.memo.get(key)
        if hit is None:
            norm = {c: w / total for c, w in belief.items()}
            hit = self._fixed_move(i, norm) if i % 2 == self.fp else self._opt_move(i, norm)
            self.memo[key] = hit
        return total * hit

    def _feed(self, i, c):
        """Branches of the fixed machine's letter at index ``i``: list of (config, letter, prob)."""
        v, mem, queue, unfed, unrev = c
        n = i // 2
        need = n - self.block + 1
        fed = _opp_before(i) - len(unfed)
        branches = [((mem, queue, unfed), Fraction(1))]
        for _ in range(max(0, need - fed)):
            nxt = []
            for (m, q, u), p in branches:
                x = u[0]
                for y, py in self.fixed.dist(m, x):
                    nxt.append(((self.fixed.next(m, x, y), q + (y,), u[1:]), p * py))
            branches = nxt
        out = []
        for (m, q, u), p in branches:
            letter = q[0]
            w = self.an.step(v, letter)
            out.append(((w, m, q[1:], u, unrev + ((i, letter),)), p))
        return out

    def _fixed_move(self, i, belief) -> Fraction:
        nxt: dict = {}
        for c, w in belief.items():
            for c2, p in self._feed(i, c):
                nxt[c2] = nxt.get(c2, Fraction(0)) + w * p
        banked, open_ = self._bank(nxt)
        return banked + self.value(i + 1, open_)

    def _opt_move(self, i, belief) -> Fraction:
        horizon_seen = i - self.lag - 1
        groups: dict = {}
        for c, w in belief.items():
            v, mem, queue, unfed, unrev = c
            seen = tuple(l for j, l in unrev if j <= horizon_seen)
            rest = tuple((j, l) for j, l in unrev if j > horizon_seen)
            g = groups.setdefault(seen, {})
            c2 = (v, mem, queue, unfed, rest)
            g[c2] = g.get(c2, Fraction(0)) + w
        total = Fraction(0)
        for group in groups.values():
            best = None
            for y in self.opt_letters:
                nxt: dict = {}
                for (v, mem, queue, unfed, rest), w in group.items():
                    c2 = (self.an.step(v, y), mem, queue, unfed + (y,), rest)
                    nxt[c2] = nxt.get(c2, Fraction(0)) + w
                banked, open_ = self._bank(nxt)
                val = banked + self.value(i + 1, open_)
                if best is None or (val > best if self.maximize else val < best):
                    best = val
            total += best
        return total


def _report(an: Analysis, hp: HorizonPolicy, value: Fraction, certificates=None) -> ValueReport:
    kind = an.bound_kind(hp.horizon)
    if hp.require_absorbing and kind != "Exact":
        raise HorizonError(f"plays are not all decided within horizon {hp.horizon}")
    return ValueReport(kind, value, horizon=hp.horizon, certificates=certificates or {})


def evaluate_guaranteed(g: DelayedControlGame, delta: int, sigma_c: StrategyMachine, hp: HorizonPolicy, env_delay: int | None = None) -> ValueReport:
    """Win probability ``sigma_c`` secures against a best-responding environment."""
    check_delay(delta)
    env_delay = delta if env_delay is None else env_delay
    check_delay(env_delay)
    _require_lag(sigma_c, delta, "controller")
    an = Analysis(g)
    an.bound_kind(hp.horizon)
    eng = _Engine(an, hp.horizon, sigma_c, 0, env_delay, maximize=False)
    return _report(an, hp, eng.run())


def best_response_controller(g: DelayedControlGame, delta: int, sigma_e: StrategyMachine, hp: HorizonPolicy, env_delay: int | None = None) -> ValueReport:
    """Best win probability for a delay-constrained controller against the known ``sigma_e``."""
    check_delay(delta)
    env_delay = delta if env_delay is None else env_delay
    check_delay(env_delay)
    _require_lag(sigma_e, env_delay, "environment")
    an = Analysis(g)
    an.bound_kind(hp.horizon)
    eng = _Engine(an, hp.horizon, sigma_e, 1, delta, maximize=True)
    return _report(an, hp, eng.run())


def uniform_controller(g: DelayedControlGame, delta: int) -> StrategyMachine:
    a = g.arena
    return st.uniform(st.CONTROLLER, EMITTER, a.ealphabet, a.calphabet, block_length=delta // 2 + 1)


def uniform_environment(g: DelayedControlGame, env_delay: int) -> StrategyMachine:
    a = g.arena
    if env_delay == 0:
        return st.uniform(st.ENVIRONMENT, RESPONDER, a.calphabet, a.ealphabet)
    return st.uniform(st.ENVIRONMENT, EMITTER, a.calphabet, a.ealphabet, block_length=env_delay // 2)


def value_profile(g: DelayedControlGame, delta: int, sigma_c: StrategyMachine, horizons, env_delay: int | None = None) -> list:
    if g.condition.kind != REACH:
        raise HorizonError("value profiles need a reachability condition")
    return [(t, evaluate_guaranteed(g, delta, sigma_c, HorizonPolicy(t), env_delay).value) for t in horizons]


# --- normal form ------------------------------------------------------------------


def _infoset(i: int, history: tuple, lag: int) -> tuple:
    """Decision point key: index plus the visible opponent letters."""
    return (i, tuple(history[j] for j in range(1 - i % 2, i - lag, 2)))


class NormalForm:
    """Pure strategies as maps from active decision points to letters, and their payoff matrix."""

    def __init__(self, g: DelayedControlGame, delta: int, hp: HorizonPolicy, env_delay: int | None = None, cap: int = DEFAULT_CAP):
        check_delay(delta)
        self.delta = delta
        self.env_delay = delta if env_delay is None else env_delay
        check_delay(self.env_delay)
        self.an = Analysis(g)
        if not self.an.absorbing_within(hp.horizon):
            raise HorizonError(f"plays are not all decided within horizon {hp.horizon}; use the sandwich bounds")
        self.end = 2 * hp.horizon + 1
        a = g.arena
        self.letters = (a.calphabet, a.ealphabet)
        self.lags = (delta, self.env_delay)
        self.sets = ([], [])
        self._collect()
        counts = [math.prod(len(self.letters[p]) for _ in self.sets[p]) for p in (0, 1)]
        for p, n in enumerate(counts):
            if n > cap:
                raise CapExceeded(f"{('controller', 'environment')[p]} has {n} pure strategies (cap {cap}); use the sandwich bounds")
        self.counts = counts

    def _collect(self):
        seen = (set(), set())
        stack = [(self.an.root, ())]
        visited = 0
        while stack:
            v, hist = stack.pop()
            visited += 1
            if visited > HISTORY_CAP:
                raise CapExceeded("history tree too large")
            i = len(hist)
            if self.an.status(v) is not None or i == self.end:
                continue
            p = i % 2
            key = _infoset(i, hist, self.lags[p])
            if key not in seen[p]:
                seen[p].add(key)
                self.sets[p].append(key)
            for x in reversed(self.letters[p]):
                stack.append((self.an.step(v, x), hist + (x,)))
        for p in (0, 1):
            self.sets[p].sort()

    def strategies(self, p: int):
        for combo in itertools.product(self.letters[p], repeat=len(self.sets[p])):
            yield dict(zip(self.sets[p], combo))

    def payoff(self, sc: dict, se: dict) -> Fraction:
        v, hist = self.an.root, ()
        strat = (sc, se)
        while True:
            s = self.an.status(v)
            if s is not None:
                return s
            i = len(hist)
            p = i % 2
            x = strat[p][_infoset(i, hist, self.lags[p])]
            v = self.an.step(v, x)
            hist += (x,)

    def matrix(self):
        rows = list(self.strategies(0))
        cols = list(self.strategies(1))
        return rows, cols, [[self.payoff(r, c) for c in cols] for r in rows]


@dataclass
class NormalFormResult:
    report: ValueReport
    env_value: Fraction
    row_strategy: list  # (probability, pure controller strategy)
    col_strategy: list  # (probability, pure environment strategy)
    env_pure_sure: bool
    shape: tuple


def normal_form_value(g: DelayedControlGame, delta: int, hp: HorizonPolicy, env_delay: int | None = None, cap: int = DEFAULT_CAP) -> NormalFormResult:
    """Exact matrix-game value over pure strategies (both players have perfect recall)."""
    nf = NormalForm(g, delta, hp, env_delay, cap)
    rows, cols, M = nf.matrix()
    ri, ci = reduce_dominated(M)
    sub = [[M[i][j] for j in ci] for i in ri]
    sol = solve_exact(sub)
    # the environment's own game: it maximises the complement, rows are its strategies
    env = solve_exact([[1 - sub[i][j] for i in range(len(ri))] for j in range(len(ci))])
    if env.value != 1 - sol.value:
        raise ArithmeticError("zero-sum symmetry violated")
    full_row = [Fraction(0)] * len(rows)
    full_col = [Fraction(0)] * len(cols)
    for k, i in enumerate(ri):
        full_row[i] = sol.row[k]
    for k, j in enumerate(ci):
        full_col[j] = sol.col[k]
    certify(M, sol.value, full_row, full_col)
    sure = any(all(M[i][j] == 0 for i in range(len(rows))) for j in range(len(cols)))
    report = ValueReport("Exact", sol.value, horizon=hp.horizon, certificates={"matrix": (len(rows), len(cols)), "reduced": (len(ri), len(ci))})
    return NormalFormResult(
        report,
        env.value,
        [(p, rows[i]) for i, p in enumerate(full_row) if p],
        [(p, cols[j]) for j, p in enumerate(full_col) if p],
        sure,
        (len(rows), len(cols)),
    )


# --- classification -------------------------------------------------------------------


@dataclass
class RandomizedClass:
    verdict: str  # ControllerSure | EnvSure | Value | Bounds
    value: Fraction | None = None
    lo: Fraction | None = None
    hi: Fraction | None = None
    env_value: Fraction | None = None
    horizon: int | None = None
    evidence: dict = field(default_factory=dict)

    @property
    def almost_sure(self) -> bool:
        return self.verdict == "Value" and self.value == 1


def classify_randomized(g: DelayedControlGame, delta: int, hp: HorizonPolicy | None = None, cap: int = DEFAULT_CAP, env_delay: int | None = None, max_horizon: int = 32) -> RandomizedClass:
    check_delay(delta)
    env_delay = delta if env_delay is None else env_delay
    pure = classify_pure(g, delta)
    evidence = {
        "pure": pure.verdict,
        "image_delay_game_winner": "PlayerI" if pure.control.wins else "PlayerO",
    }
    if pure.verdict == "ControllerSure":
        return RandomizedClass("ControllerSure", Fraction(1), Fraction(1), Fraction(1), Fraction(0), None, evidence)
    an = Analysis(g)
    horizon = hp.horizon if hp else an.first_absorbing(max_horizon)
    if horizon is not None and an.absorbing_within(horizon):
        try:
            nf = normal_form_value(g, delta, HorizonPolicy(horizon), env_delay, cap)
        except CapExceeded as exc:
            evidence["normal_form"] = str(exc)
        else:
            theta = nf.report.value
            evidence["normal_form_shape"] = nf.shape
            if theta == 0 and nf.env_pure_sure:
                return RandomizedClass("EnvSure", theta, theta, theta, nf.env_value, horizon, evidence)
            return RandomizedClass("Value", theta, theta, theta, nf.env_value, horizon, evidence)
    hpol = hp or HorizonPolicy(10)
    horizon = hpol.horizon
    lo, hi = Fraction(0), Fraction(1)
    if g.condition.kind == REACH:
        lo = evaluate_guaranteed(g, delta, uniform_controller(g, delta), hpol, env_delay).value
        evidence["lower_from"] = "uniform controller"
    elif g.condition.kind == SAFETY:
        hi = best_response_controller(g, delta, uniform_environment(g, env_delay), hpol, env_delay).value
        evidence["upper_from"] = "uniform environment"
    return RandomizedClass("Bounds", None, lo, hi, None, horizon, evidence)


# --- Monte Carlo ----------------------------------------------------------------------


def _sample(d: Dist, u: float):
    acc = 0.0
    for x, p in d.items:
        acc += float(p)
        if u < acc:
            return x
    return d.items[-1][0]


def simulate(g: DelayedControlGame, delta: int, sigma_c: StrategyMachine, sigma_e: StrategyMachine, hp: HorizonPolicy, trials: int, seed: int, env_delay: int | None = None) -> ValueReport:
    """Monte Carlo estimate; trial ``t`` uses row ``t`` of a Philox(seed) uniform matrix."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    check_delay(delta)
    env_delay = delta if env_delay is None else env_delay
    _require_lag(sigma_c, delta, "controller")
    _require_lag(sigma_e, env_delay, "environment")
    an = Analysis(g)
    exact = an.absorbing_within(hp.horizon)
    trunc = None if exact else an.truncated()
    end = 2 * hp.horizon + 1
    draws = end + 2
    rng = np.random.Generator(np.random.Philox(key=seed))
    U = rng.random((trials, draws))
    machines = (sigma_c, sigma_e)
    blocks = (_block(sigma_c), _block(sigma_e))
    wins = 0
    for t in range(trials):
        row = U[t]
        col = 0
        queues = []
        for mach in machines:
            queues.append(list(_sample(mach.block_dist(), row[col])))
            col += 1
        mems = [sigma_c.initial, sigma_e.initial]
        hist = []
        v = an.root
        result = an.status(v)
        i = 0
        while result is None and i < end:
            p = i % 2
            mach = machines[p]
            need = i // 2 - blocks[p] + 1
            fed = (len(queues[p]) + i // 2) - blocks[p]  # letters produced after the block
            while fed < need:
                x = hist[2 * fed + (1 - p)]
                y = _sample(mach.dist(mems[p], x), row[col])
                col += 1
                mems[p] = mach.next(mems[p], x, y)
                queues[p].append(y)
                fed += 1
            letter = queues[p].pop(0)
            hist.append(letter)
            v = an.step(v, letter)
            result = an.status(v)
            i += 1
        if result is None:
            result = trunc
        wins += int(result)
    p_hat = wins / trials
    half = Z99 * math.sqrt(p_hat * (1 - p_hat) / trials)
    return ValueReport(
        "Estimate", p_hat, lo=max(0.0, p_hat - half), hi=min(1.0, p_hat + half),
        horizon=hp.horizon, samples=trials, seed=seed,
        certificates={"wins": wins, "exact_horizon": exact},
    )
