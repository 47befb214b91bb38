"""Turn-based graph games: product construction, attractors and Zielonka's algorithm."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Hashable, Iterable

from . import paths
from .model import CONTROLLER, PARITY, REACH, SAFETY, Arena, ModelError, OmegaAutomaton

P0, P1 = 0, 1


@dataclass
class GraphGame:
    """Vertices in insertion order; ``edges[v]`` is a list of ``(label, successor)``.

    ``objective`` is Player 0's vertex-level objective, as in :mod:`paths`.
    """

    vertices: list
    owner: dict
    edges: dict
    initial: Hashable
    objective: tuple

    def succ(self, v) -> list:
        return [w for _, w in self.edges[v]]

    def problems(self) -> list[str]:
        out = []
        known = set(self.vertices)
        for v in self.vertices:
            if not self.edges.get(v):
                out.append(f"vertex {v!r} has no outgoing edge")
            for _, w in self.edges.get(v, ()):
                if w not in known:
                    out.append(f"edge {v!r} -> {w!r} leaves the vertex set")
            if self.owner.get(v) not in (P0, P1):
                out.append(f"vertex {v!r} has no owner")
        kind, data = self.objective
        if kind == PARITY and any(v not in data for v in self.vertices):
            out.append("coloring does not cover every vertex")
        if self.initial not in known:
            out.append("initial vertex is not declared")
        return out


@dataclass
class Solution:
    regions: tuple  # (W0, W1)
    strategies: tuple  # (dict v -> edge index, dict v -> edge index)
    stats: dict = field(default_factory=dict)

    def winner(self, v) -> int:
        return P0 if v in self.regions[P0] else P1

    def move(self, player: int, v):
        return self.strategies[player][v]


def explore(initial, owner_of, moves) -> GraphGame:
    """Breadth-first construction; ``moves(v)`` yields ``(label, w)`` pairs."""
    vertices = [initial]
    seen = {initial}
    edges: dict = {}
    owner: dict = {}
    queue = deque([initial])
    while queue:
        v = queue.popleft()
        owner[v] = owner_of(v)
        edges[v] = list(moves(v))
        for _, w in edges[v]:
            if w not in seen:
                seen.add(w)
                vertices.append(w)
                queue.append(w)
    return GraphGame(vertices, owner, edges, initial, (SAFETY, set()))


def lift(g: GraphGame, aut: OmegaAutomaton, label) -> GraphGame:
    """Attach the objective of ``aut`` through ``label(v)`` = automaton state of vertex ``v``."""
    g.objective = paths.lift_objective(aut.kind, g.vertices, label, aut.marked, aut.coloring)
    return g


def product_game(arena: Arena, condition: OmegaAutomaton) -> GraphGame:
    """Product of an arena with a condition automaton reading arena states; P0 is the controller."""
    if set(condition.alphabet) != set(arena.states):
        raise ModelError("condition alphabet differs from the arena state set")
    q0 = condition.trans[(condition.initial, arena.initial)]
    g = explore(
        (arena.initial, q0),
        lambda v: P0 if arena.owner[v[0]] == CONTROLLER else P1,
        lambda v: [(a, (arena.step(v[0], a), condition.step(v[1], arena.step(v[0], a)))) for a in arena.letters(v[0])],
    )
    lift(g, condition, lambda v: v[1])
    # the initial automaton state is visited too
    qi = condition.initial
    if condition.kind == SAFETY and qi in condition.marked:
        g.objective = (SAFETY, set(g.vertices))
    elif condition.kind == REACH and qi in condition.marked:
        g.objective = (REACH, set(g.vertices))
    return g


def _preds(g: GraphGame) -> dict:
    pred: dict = {v: [] for v in g.vertices}
    for v in g.vertices:
        for i, (_, w) in enumerate(g.edges[v]):
            pred[w].append((v, i))
    return pred


def _attr(g: GraphGame, pred: dict, player: int, target: Iterable, within: set | None = None):
    """Attractor with ranks and the attracting edge index for ``player``'s vertices."""
    arena = set(g.vertices) if within is None else within
    result = {v for v in target if v in arena}
    rank = {v: 0 for v in result}
    choice: dict = {}
    count = {}
    for v in arena:
        if v not in result and g.owner[v] != player:
            count[v] = sum(1 for _, w in g.edges[v] if w in arena)
    queue = deque(sorted(result, key=_order(g)))
    while queue:
        w = queue.popleft()
        for v, i in pred[w]:
            if v not in arena or v in result:
                continue
            if g.owner[v] == player:
                choice[v] = _first_into(g, v, result, arena)
                result.add(v)
                rank[v] = rank[w] + 1
                queue.append(v)
            else:
                count[v] -= 1
                if count[v] == 0:
                    result.add(v)
                    rank[v] = rank[w] + 1
                    queue.append(v)
    return result, rank, choice


def _first_into(g, v, result, arena):
    # lowest-indexed edge into the attractor built so far, so ranks strictly decrease
    for i, (_, w) in enumerate(g.edges[v]):
        if w in result and w in arena:
            return i
    raise AssertionError("no attracting edge")


def _order(g: GraphGame):
    index = {v: i for i, v in enumerate(g.vertices)}
    return lambda v: index[v]


def attractor(g: GraphGame, player: int, target: Iterable) -> set:
    return _attr(g, _preds(g), player, target)[0]


def _stay(g: GraphGame, v, region: set) -> int:
    for i, (_, w) in enumerate(g.edges[v]):
        if w in region:
            return i
    raise AssertionError(f"vertex {v!r} cannot stay in its region")


def solve(g: GraphGame) -> Solution:
    kind, data = g.objective
    pred = _preds(g)
    V = set(g.vertices)
    if kind in (SAFETY, REACH):
        attacker = P1 if kind == SAFETY else P0
        goal = {v for v in g.vertices if v in data}
        A, rank, choice = _attr(g, pred, attacker, goal)
        rest = V - A
        regions = [None, None]
        regions[attacker] = A
        regions[1 - attacker] = rest
        strategies = ({}, {})
        for v in g.vertices:
            p = g.owner[v]
            if v in A and p == attacker:
                strategies[p][v] = choice.get(v, 0)
            elif v not in A and p != attacker:
                strategies[p][v] = _stay(g, v, rest)
        return _total(g, Solution((regions[0], regions[1]), strategies, {"attractor_size": len(A), "max_rank": max(rank.values(), default=0)}))
    colors = _compress({v: data[v] for v in g.vertices})
    stats = {"calls": 0, "max_depth": 0}
    W, S = _zielonka(g, pred, colors, V, 0, stats)
    return _total(g, Solution((W[0], W[1]), (S[0], S[1]), stats))


def _total(g: GraphGame, sol: Solution) -> Solution:
    # a play may leave the region once the objective is already settled; any move will do there
    for v in g.vertices:
        sol.strategies[g.owner[v]].setdefault(v, 0)
    return sol


def _compress(colors: dict) -> dict:
    """Map colors onto a contiguous range from 0, merging runs of equal parity."""
    distinct = sorted(set(colors.values()))
    mapping = {}
    current = -1
    for c in distinct:
        if current < 0:
            current = c % 2
        elif c % 2 != current % 2:
            current += 1
        mapping[c] = current
    return {v: mapping[c] for v, c in colors.items()}


def _zielonka(g, pred, colors, V: set, depth: int, stats: dict):
    stats["calls"] += 1
    stats["max_depth"] = max(stats["max_depth"], depth)
    acc = [set(), set()]
    strat = [{}, {}]
    V = set(V)
    while V:
        d = max(colors[v] for v in V)
        p = d % 2
        U = {v for v in V if colors[v] == d}
        A, _, choice = _attr(g, pred, p, U, V)
        sub_w, sub_s = _zielonka(g, pred, colors, V - A, depth + 1, stats)
        if not sub_w[1 - p]:
            acc[p] |= V
            strat[p].update(sub_s[p])
            for v in A:
                if g.owner[v] != p:
                    continue
                strat[p][v] = choice[v] if v in choice else _stay(g, v, V)
            return acc, strat
        B, _, bchoice = _attr(g, pred, 1 - p, sub_w[1 - p], V)
        acc[1 - p] |= B
        strat[1 - p].update(sub_s[1 - p])
        for v in B - sub_w[1 - p]:
            if g.owner[v] == 1 - p:
                strat[1 - p][v] = bchoice[v]
        V -= B
    return acc, strat


def consistent_violation(g: GraphGame, player: int, strategy: dict, region: Iterable | None = None):
    """Check a positional strategy: a violating lasso from some region vertex, or None."""
    kind, data = g.objective
    objective = g.objective if player == P0 else paths.complement_objective(g.objective)

    def succ(v):
        if g.owner[v] == player:
            return [g.edges[v][strategy[v]][1]]
        return g.succ(v)

    for root in (region if region is not None else [g.initial]):
        hit = paths.find_violation(root, succ, objective)
        if hit is not None:
            return root, hit
    return None
