"""Path analysis on finite total graphs under safety, reachability or parity objectives.

An *objective* here is vertex-level: ``("safety", bad_vertices)``,
``("reach", goal_vertices)`` or ``("parity", {vertex: color})`` (max color seen
infinitely often must be even). Every vertex is assumed to have a successor.
"""
from __future__ import annotations

from collections import deque
from typing import Callable, Hashable, Iterable, Mapping, Sequence

Succ = Callable[[Hashable], Sequence[Hashable]]


def sccs(nodes: Iterable[Hashable], succ: Succ) -> list[list[Hashable]]:
    """Strongly connected components (iterative Tarjan), restricted to ``nodes``."""
    nodes = list(nodes)
    allowed = set(nodes)
    index: dict = {}
    low: dict = {}
    on_stack: set = set()
    stack: list = []
    out: list[list] = []
    counter = 0
    for root in nodes:
        if root in index:
            continue
        work = [(root, iter([w for w in succ(root) if w in allowed]))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter([x for x in succ(w) if x in allowed])))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                out.append(comp)
    return out


def _nontrivial(comp: list, succ: Succ) -> bool:
    if len(comp) > 1:
        return True
    v = comp[0]
    return v in succ(v)


def reachable(root: Hashable, succ: Succ, allowed: set | None = None) -> list:
    """Vertices reachable from ``root`` in BFS order (optionally inside ``allowed``)."""
    seen = {root}
    order = [root]
    queue = deque([root])
    while queue:
        v = queue.popleft()
        for w in succ(v):
            if w in seen or (allowed is not None and w not in allowed):
                continue
            seen.add(w)
            order.append(w)
            queue.append(w)
    return order


def _backward(nodes: list, succ: Succ, seeds: set, allowed: set | None = None) -> set:
    pred: dict = {v: [] for v in nodes}
    for v in nodes:
        for w in succ(v):
            if w in pred:
                pred[w].append(v)
    result = set(seeds)
    queue = deque(seeds)
    while queue:
        w = queue.popleft()
        for v in pred[w]:
            if v in result or (allowed is not None and v not in allowed):
                continue
            result.add(v)
            queue.append(v)
    return result


def _bad_cycles(nodes: list, succ: Succ, kind: str, data) -> list[tuple[Hashable, set]]:
    """(anchor vertex, component) pairs; each component holds a violating cycle through its anchor."""
    found = []
    if kind == "reach":
        free = [v for v in nodes if v not in data]
        for comp in sccs(free, succ):
            if _nontrivial(comp, succ):
                found.append((comp[-1], set(comp)))
    elif kind == "parity":
        for c in sorted({data[v] for v in nodes if data[v] % 2 == 1}):
            sub = [v for v in nodes if data[v] <= c]
            for comp in sccs(sub, succ):
                anchors = [v for v in comp if data[v] == c]
                if anchors and _nontrivial(comp, succ):
                    found.append((anchors[0], set(comp)))
    return found


def bad_vertices(nodes: Iterable[Hashable], succ: Succ, objective: tuple) -> set:
    """Vertices from which some infinite path violates ``objective``."""
    kind, data = objective
    nodes = list(nodes)
    if kind == "safety":
        return _backward(nodes, succ, {v for v in nodes if v in data})
    cycles = _bad_cycles(nodes, succ, kind, data)
    seeds = set().union(*(comp for _, comp in cycles)) if cycles else set()
    if kind == "reach":
        free = {v for v in nodes if v not in data}
        return _backward(nodes, succ, seeds, allowed=free)
    return _backward(nodes, succ, seeds)


def _path(root, target, succ, allowed=None) -> list:
    """Shortest vertex path from ``root`` to ``target`` (inclusive)."""
    parent = {root: None}
    queue = deque([root])
    while queue:
        v = queue.popleft()
        if v == target:
            break
        for w in succ(v):
            if w in parent or (allowed is not None and w not in allowed):
                continue
            parent[w] = v
            queue.append(w)
    if target not in parent:
        raise ValueError("target not reachable")
    out = [target]
    while parent[out[-1]] is not None:
        out.append(parent[out[-1]])
    return out[::-1]


def _cycle_through(anchor, comp: set, succ) -> list:
    """Vertices of a cycle anchor -> ... -> (back to anchor), anchor first, inside ``comp``."""
    best = None
    for w in succ(anchor):
        if w not in comp:
            continue
        if w == anchor:
            return [anchor]
        p = _path(w, anchor, succ, allowed=comp)
        if best is None or len(p) < len(best):
            best = p
    return [anchor] + best[:-1]


def lasso_to(root, anchor, comp, succ, allowed=None) -> tuple[list, list]:
    stem = _path(root, anchor, succ, allowed=allowed)[:-1]
    return stem, _cycle_through(anchor, comp, succ)


def find_violation(root: Hashable, succ: Succ, objective: tuple) -> tuple[list, list] | None:
    """A lasso (stem vertices, loop vertices) from ``root`` violating ``objective``, or None."""
    kind, data = objective
    nodes = reachable(root, succ)
    if kind == "safety":
        hits = [v for v in nodes if v in data]
        if not hits:
            return None
        stem = _path(root, hits[0], succ)
        # continue from the violation until a vertex repeats
        seen = {v: i for i, v in enumerate(stem)}
        walk = list(stem)
        while True:
            nxt = succ(walk[-1])[0]
            if nxt in seen:
                i = seen[nxt]
                return walk[:i], walk[i:]
            seen[nxt] = len(walk)
            walk.append(nxt)
    if kind == "reach" and root in data:
        return None
    cycles = _bad_cycles(nodes, succ, kind, data)
    if not cycles:
        return None
    if kind == "reach":
        free = {v for v in nodes if v not in data}
        for anchor, comp in cycles:
            try:
                return lasso_to(root, anchor, comp, succ, allowed=free)
            except ValueError:
                continue
        return None
    anchor, comp = cycles[0]
    return lasso_to(root, anchor, comp, succ)


def complement_objective(objective: tuple) -> tuple:
    kind, data = objective
    if kind == "safety":
        return ("reach", data)
    if kind == "reach":
        return ("safety", data)
    return ("parity", {v: c + 1 for v, c in data.items()})


def lift_objective(kind: str, vertices: Iterable, label: Callable, marked=frozenset(), coloring: Mapping | None = None) -> tuple:
    """Vertex-level objective from automaton data, ``label(v)`` giving the automaton state."""
    if kind == "parity":
        return ("parity", {v: coloring[label(v)] for v in vertices})
    return (kind, {v for v in vertices if label(v) in marked})
