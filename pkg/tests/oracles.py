"""Slow reference implementations used only by the tests."""
from __future__ import annotations

import itertools

from delaygames import paths
from delaygames.graph import P0, P1


def lasso_accepts(aut, u, v) -> bool:
    """Acceptance of u v^omega by unrolling v until a start state repeats."""
    q = aut.initial
    seen = [q]
    for a in u:
        q = aut.step(q, a)
        seen.append(q)
    starts = []
    visits = []
    while q not in starts:
        starts.append(q)
        block = []
        for a in v:
            q = aut.step(q, a)
            block.append(q)
        visits.append(block)
    loop = [p for block in visits[starts.index(q):] for p in block]
    if aut.kind == "safety":
        return not any(p in aut.marked for p in seen + [p for b in visits for p in b])
    if aut.kind == "reach":
        return any(p in aut.marked for p in seen + [p for b in visits for p in b])
    return max(aut.coloring[p] for p in loop) % 2 == 0


def lassos(alphabet, max_u=5, max_v=5):
    for i in range(max_u + 1):
        for u in itertools.product(alphabet, repeat=i):
            for j in range(1, max_v + 1):
                for v in itertools.product(alphabet, repeat=j):
                    yield u, v


def _wins_with(g, v, player, choice) -> bool:
    def succ(x):
        if g.owner[x] == player:
            return [g.edges[x][choice[x]][1]]
        return g.succ(x)

    obj = g.objective if player == P0 else paths.complement_objective(g.objective)
    return paths.find_violation(v, succ, obj) is None


def positional_winner(g, v, player=P0, limit=1 << 16) -> bool | None:
    """Does ``player`` win from ``v`` with some positional strategy?  None if the search is too big.

    Choices are only fixed at vertices the partial strategy can actually reach.
    """
    budget = [limit]

    def search(choice):
        budget[0] -= 1
        if budget[0] < 0:
            raise OverflowError
        todo = None
        seen, stack = {v}, [v]
        while stack:
            x = stack.pop()
            if g.owner[x] == player and x not in choice:
                todo = x
                break
            nxt = [g.edges[x][choice[x]][1]] if g.owner[x] == player else g.succ(x)
            for w in nxt:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if todo is None:
            return _wins_with(g, v, player, choice)
        for i in range(len(g.edges[todo])):
            choice[todo] = i
            if search(choice):
                return True
            del choice[todo]
        return False

    try:
        return search({})
    except OverflowError:
        return None


def positional_regions(g, limit=1 << 16):
    """Winning regions by brute force over positional strategies of both players, or None."""
    w0, w1 = set(), set()
    for v in g.vertices:
        a = positional_winner(g, v, P0, limit)
        b = positional_winner(g, v, P1, limit)
        if a is None or b is None:
            return None
        if a == b:
            raise AssertionError(f"positional determinacy fails at {v!r}")
        (w0 if a else w1).add(v)
    return w0, w1
