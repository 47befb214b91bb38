"""Arenas, deterministic omega-automata, the two game kinds and play semantics."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping, Sequence

from . import paths

CONTROLLER = "C"
ENVIRONMENT = "E"
SAFETY = "safety"
REACH = "reach"
PARITY = "parity"
KINDS = (SAFETY, REACH, PARITY)


class ModelError(ValueError):
    """Raised for malformed models or illegal words."""


@dataclass(frozen=True)
class Arena:
    """Alternating two-player arena with a total, deterministic transition map."""

    states: tuple
    owner: Mapping[str, str]
    initial: str
    calphabet: tuple
    ealphabet: tuple
    trans: Mapping[tuple, str]

    @classmethod
    def build(cls, states, initial, calphabet, ealphabet, edges) -> "Arena":
        """``states`` is a sequence of ``(id, "C"|"E")``; ``edges`` of ``(src, letter, dst)``."""
        states = list(states)
        trans = {}
        for src, letter, dst in edges:
            trans[(src, letter)] = dst
        return cls(
            states=tuple(s for s, _ in states),
            owner={s: o for s, o in states},
            initial=initial,
            calphabet=tuple(calphabet),
            ealphabet=tuple(ealphabet),
            trans=trans,
        )

    def letters(self, state: str) -> tuple:
        return self.calphabet if self.owner[state] == CONTROLLER else self.ealphabet

    def step(self, state: str, letter: str) -> str:
        return self.trans[(state, letter)]

    @property
    def controller_states(self) -> tuple:
        return tuple(s for s in self.states if self.owner[s] == CONTROLLER)

    @property
    def environment_states(self) -> tuple:
        return tuple(s for s in self.states if self.owner[s] == ENVIRONMENT)


@dataclass(frozen=True)
class OmegaAutomaton:
    """Deterministic automaton with safety, reachability or (max-)parity acceptance.

    ``marked`` holds the unsafe states (safety) or the target states
    (reachability); ``coloring`` is only used for parity.
    """

    states: tuple
    alphabet: tuple
    initial: Hashable
    trans: Mapping[tuple, Hashable]
    kind: str
    marked: frozenset = frozenset()
    coloring: Mapping | None = None

    def step(self, q, letter):
        return self.trans[(q, letter)]

    @property
    def unsafe(self) -> frozenset:
        return self.marked if self.kind == SAFETY else frozenset()

    @property
    def target(self) -> frozenset:
        return self.marked if self.kind == REACH else frozenset()

    def color(self, q) -> int:
        return self.coloring[q]

    def accepts(self, u: Sequence, v: Sequence) -> bool:
        return run_automaton(self, u, v)

    def colors(self) -> list[int]:
        return sorted(set(self.coloring.values())) if self.kind == PARITY else []

    def objective(self) -> tuple:
        """The acceptance condition as an automaton-state objective for :mod:`paths`."""
        if self.kind == PARITY:
            return (PARITY, dict(self.coloring))
        return (self.kind, set(self.marked))

    def renamed(self, mapping: Mapping) -> "OmegaAutomaton":
        """Copy with letters renamed through ``mapping`` (missing letters kept)."""
        m = lambda a: mapping.get(a, a)
        return OmegaAutomaton(
            states=self.states,
            alphabet=tuple(m(a) for a in self.alphabet),
            initial=self.initial,
            trans={(q, m(a)): p for (q, a), p in self.trans.items()},
            kind=self.kind,
            marked=self.marked,
            coloring=self.coloring,
        )

    def pruned(self) -> "OmegaAutomaton":
        """Restriction to the states reachable from the initial state."""
        order = paths.reachable(self.initial, lambda q: [self.trans[(q, a)] for a in self.alphabet])
        keep = set(order)
        return OmegaAutomaton(
            states=tuple(q for q in self.states if q in keep) if keep <= set(self.states) else tuple(order),
            alphabet=self.alphabet,
            initial=self.initial,
            trans={(q, a): p for (q, a), p in self.trans.items() if q in keep},
            kind=self.kind,
            marked=frozenset(q for q in self.marked if q in keep),
            coloring={q: c for q, c in self.coloring.items() if q in keep} if self.coloring is not None else None,
        )


def make_automaton(states, alphabet, initial, trans, kind, marked=(), coloring=None) -> OmegaAutomaton:
    return OmegaAutomaton(
        states=tuple(states),
        alphabet=tuple(alphabet),
        initial=initial,
        trans=dict(trans),
        kind=kind,
        marked=frozenset(marked),
        coloring=dict(coloring) if coloring is not None else None,
    )


def _fresh(name: str, taken) -> str:
    while name in taken:
        name += "'"
    return name


def state_condition(arena_states: Sequence[str], kind: str, data) -> OmegaAutomaton:
    """Normalise a state-based condition on arena states into an automaton.

    Safety and reachability get a two-state automaton; parity gets an
    identity-tracking automaton (one state per arena state plus a start state).
    """
    arena_states = tuple(arena_states)
    if kind in (SAFETY, REACH):
        data = frozenset(data)
        ok, hit = ("ok", "bad") if kind == SAFETY else ("wait", "hit")
        trans = {}
        for s in arena_states:
            trans[(ok, s)] = hit if s in data else ok
            trans[(hit, s)] = hit
        return make_automaton((ok, hit), arena_states, ok, trans, kind, marked={hit})
    if kind == PARITY:
        start = _fresh("start", set(arena_states))
        trans = {(q, s): s for q in (start,) + arena_states for s in arena_states}
        coloring = {start: 0, **{s: int(data[s]) for s in arena_states}}
        return make_automaton((start,) + arena_states, arena_states, start, trans, PARITY, coloring=coloring)
    raise ModelError(f"unknown acceptance kind {kind!r}")


@dataclass(frozen=True)
class DelayedControlGame:
    """Arena plus a winning condition (automaton over arena states) for the controller.

    ``state_condition`` remembers a state-based shorthand ``(kind, data)`` when
    the condition was given that way; it only affects printing.
    """

    arena: Arena
    condition: OmegaAutomaton
    state_condition: tuple | None = None
    name: str | None = None

    @classmethod
    def from_states(cls, arena: Arena, kind: str, data, name=None) -> "DelayedControlGame":
        if kind == PARITY:
            data = {s: int(c) for s, c in dict(data).items()}
            key = tuple((s, data[s]) for s in arena.states)
        else:
            key = tuple(s for s in arena.states if s in set(data))
        return cls(arena, state_condition(arena.states, kind, data), (kind, key), name)


@dataclass(frozen=True)
class DelayGame:
    """Delay game with lookahead ``k`` over ``inputs`` (Player I) x ``outputs`` (Player O).

    ``condition`` recognises Player O's winning outcomes.
    """

    inputs: tuple
    outputs: tuple
    condition: OmegaAutomaton
    lookahead: int = 0
    name: str | None = None

    def with_lookahead(self, k: int) -> "DelayGame":
        return DelayGame(self.inputs, self.outputs, self.condition, k, self.name)


@dataclass(frozen=True)
class PlayPrefix:
    states: tuple
    letters: tuple

    def __len__(self) -> int:
        return len(self.letters)

    @property
    def last(self) -> str:
        return self.states[-1]


# --- validation ---------------------------------------------------------------


def _validate_arena(a: Arena) -> list[str]:
    out = []
    seen = set()
    for s in a.states:
        if s in seen:
            out.append(f"duplicate state {s!r}")
        seen.add(s)
        if a.owner.get(s) not in (CONTROLLER, ENVIRONMENT):
            out.append(f"state {s!r} has no owner")
    if a.initial not in seen:
        out.append(f"initial state {a.initial!r} is not declared")
    elif a.owner.get(a.initial) != CONTROLLER:
        out.append(f"initial state {a.initial!r} is not controller-owned")
    if not a.calphabet:
        out.append("controller alphabet is empty")
    if not a.ealphabet:
        out.append("environment alphabet is empty")
    for s in a.states:
        if a.owner.get(s) not in (CONTROLLER, ENVIRONMENT):
            continue
        for letter in a.letters(s):
            dst = a.trans.get((s, letter))
            if dst is None:
                out.append(f"missing transition ({s!r}, {letter!r})")
            elif dst not in seen:
                out.append(f"transition ({s!r}, {letter!r}) leads to undeclared state {dst!r}")
            elif a.owner[dst] == a.owner[s]:
                out.append(f"alternation violated by edge {s!r} -{letter}-> {dst!r}")
    for (s, letter) in a.trans:
        if s not in seen or letter not in a.letters(s):
            out.append(f"illegal transition ({s!r}, {letter!r})")
    return out


def _validate_automaton(aut: OmegaAutomaton) -> list[str]:
    out = []
    states = set(aut.states)
    if aut.initial not in states:
        out.append(f"initial state {aut.initial!r} is not declared")
    if aut.kind not in KINDS:
        out.append(f"unknown acceptance kind {aut.kind!r}")
    for q in aut.states:
        for letter in aut.alphabet:
            p = aut.trans.get((q, letter))
            if p is None:
                out.append(f"missing transition ({q!r}, {letter!r})")
            elif p not in states:
                out.append(f"transition ({q!r}, {letter!r}) leads to undeclared state {p!r}")
    for q in aut.marked:
        if q not in states:
            out.append(f"marked state {q!r} is not declared")
    if aut.kind == PARITY:
        if aut.coloring is None:
            out.append("parity automaton without coloring")
        else:
            for q in aut.states:
                c = aut.coloring.get(q)
                if not isinstance(c, int) or c < 0:
                    out.append(f"state {q!r} has no natural color")
    return out


def validate(model) -> list[str]:
    """Diagnostics for every violated invariant; empty iff the model is well formed."""
    if isinstance(model, Arena):
        return _validate_arena(model)
    if isinstance(model, OmegaAutomaton):
        return _validate_automaton(model)
    if isinstance(model, DelayedControlGame):
        out = _validate_arena(model.arena) + _validate_automaton(model.condition)
        if set(model.condition.alphabet) != set(model.arena.states):
            out.append("condition alphabet differs from the arena state set")
        return out
    if isinstance(model, DelayGame):
        out = _validate_automaton(model.condition)
        for letter in model.inputs:
            if letter in model.outputs:
                out.append(f"input and output alphabets share letter {letter!r}")
        if model.lookahead < 0:
            out.append("negative lookahead")
        if not model.inputs or not model.outputs:
            out.append("empty alphabet")
        pairs = {(a, b) for a in model.inputs for b in model.outputs}
        if set(model.condition.alphabet) != pairs:
            out.append("condition alphabet is not inputs x outputs")
        return out
    raise TypeError(f"cannot validate {type(model).__name__}")


def check(model) -> None:
    problems = validate(model)
    if problems:
        raise ModelError("; ".join(problems))


# --- play semantics -------------------------------------------------------------


def play_of(arena: Arena, word: Sequence[str]) -> PlayPrefix:
    """The unique play prefix induced by an alternating letter sequence."""
    states = [arena.initial]
    for i, letter in enumerate(word):
        s = states[-1]
        if letter not in arena.letters(s):
            mover = "controller" if arena.owner[s] == CONTROLLER else "environment"
            raise ModelError(f"letter {letter!r} at position {i} is not a {mover} action")
        states.append(arena.step(s, letter))
    return PlayPrefix(tuple(states), tuple(word))


def run_automaton(aut: OmegaAutomaton, u: Sequence, v: Sequence) -> bool:
    """Whether ``aut`` accepts the ultimately periodic word ``u v^omega``."""
    if len(v) == 0:
        raise ModelError("loop word must be nonempty")
    q = aut.initial
    visited = [q]
    for a in u:
        q = aut.trans[(q, a)]
        visited.append(q)
    seen: dict = {}
    seq = []
    i = 0
    while (q, i) not in seen:
        seen[(q, i)] = len(seq)
        q = aut.trans[(q, v[i])]
        seq.append(q)
        i = (i + 1) % len(v)
    loop = seq[seen[(q, i)]:]
    everything = visited + seq
    if aut.kind == SAFETY:
        return not any(p in aut.marked for p in everything)
    if aut.kind == REACH:
        return any(p in aut.marked for p in everything)
    return max(aut.coloring[p] for p in loop) % 2 == 0


def complement(aut: OmegaAutomaton) -> OmegaAutomaton:
    """Automaton over the same transition structure recognising the complement language."""
    if aut.kind == SAFETY:
        kind, coloring = REACH, None
    elif aut.kind == REACH:
        kind, coloring = SAFETY, None
    else:
        kind, coloring = PARITY, {q: c + 1 for q, c in aut.coloring.items()}
    return OmegaAutomaton(aut.states, aut.alphabet, aut.initial, aut.trans, kind, aut.marked, coloring)


def absorbing(aut: OmegaAutomaton) -> OmegaAutomaton:
    """Same language, with unsafe/target states turned into self-loops (no-op for parity)."""
    if aut.kind == PARITY:
        return aut
    trans = {(q, a): (q if q in aut.marked else p) for (q, a), p in aut.trans.items()}
    return OmegaAutomaton(aut.states, aut.alphabet, aut.initial, trans, aut.kind, aut.marked, aut.coloring)


def as_parity(aut: OmegaAutomaton) -> OmegaAutomaton:
    """Equivalent parity automaton on the same states."""
    if aut.kind == PARITY:
        return aut
    ab = absorbing(aut)
    if aut.kind == SAFETY:
        coloring = {q: 1 if q in aut.marked else 0 for q in aut.states}
    else:
        coloring = {q: 2 if q in aut.marked else 1 for q in aut.states}
    return OmegaAutomaton(ab.states, ab.alphabet, ab.initial, ab.trans, PARITY, frozenset(), coloring)


@dataclass(frozen=True)
class Lasso:
    """Ultimately periodic word ``stem loop^omega``."""

    stem: tuple
    loop: tuple

    def __len__(self) -> int:
        return len(self.stem) + len(self.loop)


def difference_witness(a: OmegaAutomaton, b: OmegaAutomaton) -> Lasso | None:
    """A lasso accepted by exactly one of ``a`` and ``b``, or None if the languages agree."""
    if set(a.alphabet) != set(b.alphabet):
        raise ModelError("alphabet mismatch")
    pa, pb = as_parity(a), as_parity(b)
    letters = a.alphabet
    root = (pa.initial, pb.initial)
    edges: dict = {}

    def succ(v):
        if v not in edges:
            edges[v] = [(x, (pa.trans[(v[0], x)], pb.trans[(v[1], x)])) for x in letters]
        return [w for _, w in edges[v]]

    nodes = paths.reachable(root, succ)
    ca = sorted({pa.coloring[v[0]] for v in nodes})
    cb = sorted({pb.coloring[v[1]] for v in nodes})
    for i in ca:
        for j in cb:
            if i % 2 == j % 2:
                continue
            sub = [v for v in nodes if pa.coloring[v[0]] <= i and pb.coloring[v[1]] <= j]
            for comp in paths.sccs(sub, succ):
                if not (len(comp) > 1 or comp[0] in succ(comp[0])):
                    continue
                xs = [v for v in comp if pa.coloring[v[0]] == i]
                ys = [v for v in comp if pb.coloring[v[1]] == j]
                if not xs or not ys:
                    continue
                comp_set = set(comp)
                stem = paths._path(root, xs[0], succ)
                if xs[0] == ys[0]:
                    cyc = paths._cycle_through(xs[0], comp_set, succ) + [xs[0]]
                else:
                    there = paths._path(xs[0], ys[0], succ, allowed=comp_set)
                    back = paths._path(ys[0], xs[0], succ, allowed=comp_set)
                    cyc = there + back[1:]
                return Lasso(_letters_along(stem, edges), _letters_along(cyc, edges))
    return None


def _letters_along(vertices: list, edges: dict) -> tuple:
    out = []
    for v, w in zip(vertices, vertices[1:]):
        out.append(next(x for x, t in edges[v] if t == w))
    return tuple(out)


def size_of(game: DelayedControlGame) -> int:
    a = game.arena
    return len(a.states) + len(a.calphabet) + len(a.ealphabet) + len(game.condition.states)


def universal(alphabet: Iterable) -> OmegaAutomaton:
    alphabet = tuple(alphabet)
    return make_automaton(("all",), alphabet, "all", {("all", x): "all" for x in alphabet}, SAFETY)


def empty(alphabet: Iterable) -> OmegaAutomaton:
    alphabet = tuple(alphabet)
    return make_automaton(("none",), alphabet, "none", {("none", x): "none" for x in alphabet}, REACH)


def is_empty(aut: OmegaAutomaton) -> bool:
    return difference_witness(aut, empty(aut.alphabet)) is None


def is_universal(aut: OmegaAutomaton) -> bool:
    return difference_witness(aut, universal(aut.alphabet)) is None
