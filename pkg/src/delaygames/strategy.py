"""Finite-state strategy machines (pure and mixed) and exact distributions."""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Mapping, Sequence

CONTROLLER = "controller"
ENVIRONMENT = "environment"
PLAYER_I = "player_i"
PLAYER_O = "player_o"
ROLES = (CONTROLLER, ENVIRONMENT, PLAYER_I, PLAYER_O)
EMITTER = "emitter"
RESPONDER = "responder"


class StrategyError(ValueError):
    pass


@dataclass(frozen=True)
class Dist:
    """Finite distribution with exact rational weights, in declaration order."""

    items: tuple

    def __post_init__(self):
        total = sum((p for _, p in self.items), Fraction(0))
        if total != 1:
            raise StrategyError(f"probabilities sum to {total}, not 1")
        if any(p < 0 for _, p in self.items):
            raise StrategyError("negative probability")

    @classmethod
    def of(cls, pairs: Iterable) -> "Dist":
        merged: dict = {}
        for x, p in pairs:
            p = Fraction(p)
            if p:
                merged[x] = merged.get(x, Fraction(0)) + p
        return cls(tuple(merged.items()))

    @classmethod
    def uniform(cls, outcomes: Sequence) -> "Dist":
        outcomes = list(outcomes)
        return cls.of((x, Fraction(1, len(outcomes))) for x in outcomes)

    @classmethod
    def point(cls, x) -> "Dist":
        return cls(((x, Fraction(1)),))

    @property
    def support(self) -> tuple:
        return tuple(x for x, _ in self.items)

    def prob(self, x) -> Fraction:
        for y, p in self.items:
            if y == x:
                return p
        return Fraction(0)

    def is_point(self) -> bool:
        return len(self.items) == 1

    def __iter__(self):
        return iter(self.items)


def as_dist(x) -> Dist:
    return x if isinstance(x, Dist) else Dist.point(x)


@dataclass(frozen=True)
class StrategyMachine:
    """Transducer reading opponent letters and producing own letters.

    An *emitter* outputs ``initial_block`` before reading anything and then one
    letter per input letter. A *responder* reads ``lead_in`` letters silently
    and then answers every further input letter. ``update`` is keyed by
    ``(memory, input, emitted)``, with ``emitted`` = None for silent reads.
    """

    role: str
    side: str
    inputs: tuple
    outputs: tuple
    memory: tuple
    initial: Hashable
    output: Mapping
    update: Mapping
    initial_block: tuple | Dist = ()
    lead_in: int = 0

    @property
    def block_length(self) -> int:
        if isinstance(self.initial_block, Dist):
            lengths = {len(b) for b in self.initial_block.support}
            return lengths.pop() if len(lengths) == 1 else -1
        return len(self.initial_block)

    def is_pure(self) -> bool:
        if isinstance(self.initial_block, Dist) and not self.initial_block.is_point():
            return False
        return all(not isinstance(v, Dist) or v.is_point() for v in self.output.values())

    def block(self) -> tuple:
        """The initial block of a pure machine."""
        b = self.initial_block
        if isinstance(b, Dist):
            if not b.is_point():
                raise StrategyError("machine is mixed")
            return b.support[0]
        return tuple(b)

    def block_dist(self) -> Dist:
        return as_dist(tuple(self.initial_block) if not isinstance(self.initial_block, Dist) else self.initial_block)

    def dist(self, m, x) -> Dist:
        try:
            return as_dist(self.output[(m, x)])
        except KeyError:
            raise StrategyError(f"machine has no output for memory {m!r} on input {x!r}") from None

    def choose(self, m, x):
        d = self.dist(m, x)
        if not d.is_point():
            raise StrategyError("machine is mixed")
        return d.support[0]

    def next(self, m, x, y):
        try:
            return self.update[(m, x, y)]
        except KeyError:
            raise StrategyError(f"machine has no update for ({m!r}, {x!r}, {y!r})") from None

    def run(self, word: Sequence) -> tuple:
        """Own letters produced by a pure machine while it reads ``word``."""
        out = list(self.block()) if self.side == EMITTER else []
        m = self.initial
        for i, x in enumerate(word):
            if self.side == RESPONDER and i < self.lead_in:
                m = self.next(m, x, None)
                continue
            y = self.choose(m, x)
            out.append(y)
            m = self.next(m, x, y)
        return tuple(out)

    def problems(self) -> list[str]:
        out = []
        if self.role not in ROLES:
            out.append(f"unknown role {self.role!r}")
        if self.side not in (EMITTER, RESPONDER):
            out.append(f"unknown side {self.side!r}")
        if self.side == EMITTER and self.lead_in:
            out.append("emitter with nonzero lead-in")
        if self.side == RESPONDER and self.block_length:
            out.append("responder with an initial block")
        blocks = self.block_dist().support
        for b in blocks:
            for y in b:
                if y not in self.outputs:
                    out.append(f"block letter {y!r} is not an output")
        for m in self.memory:
            for x in self.inputs:
                if (m, x) in self.output:
                    for y in self.dist(m, x).support:
                        if y not in self.outputs:
                            out.append(f"output {y!r} at ({m!r}, {x!r}) is not an output letter")
                        if (m, x, y) not in self.update:
                            out.append(f"missing update ({m!r}, {x!r}, {y!r})")
                elif (m, x, None) not in self.update:
                    out.append(f"machine is not input-total at ({m!r}, {x!r})")
        return out


def from_function(
    role: str,
    side: str,
    inputs: Sequence,
    outputs: Sequence,
    initial,
    out_fn: Callable,
    upd_fn: Callable,
    block=(),
    lead_in: int = 0,
    silent: Callable | None = None,
) -> StrategyMachine:
    """Tabulate a machine from Python callables, exploring memory reachable from ``initial``.

    ``silent(m)`` tells whether memory ``m`` is still in the lead-in phase
    (default: never). ``out_fn`` may return a letter or a :class:`Dist`.
    """
    silent = silent or (lambda m: False)
    memory = [initial]
    seen = {initial}
    output: dict = {}
    update: dict = {}
    queue = deque([initial])
    while queue:
        m = queue.popleft()
        for x in inputs:
            if silent(m):
                targets = [((m, x, None), upd_fn(m, x, None))]
            else:
                o = out_fn(m, x)
                output[(m, x)] = o
                targets = [((m, x, y), upd_fn(m, x, y)) for y in as_dist(o).support]
            for key, m2 in targets:
                update[key] = m2
                if m2 not in seen:
                    seen.add(m2)
                    memory.append(m2)
                    queue.append(m2)
    return StrategyMachine(role, side, tuple(inputs), tuple(outputs), tuple(memory), initial, output, update, block, lead_in)


def constant(role: str, side: str, inputs, outputs, letter, block=(), lead_in: int = 0) -> StrategyMachine:
    return from_function(
        role, side, inputs, outputs, 0,
        lambda m, x: letter,
        lambda m, x, y: min(m + 1, lead_in),
        tuple(block), lead_in, silent=lambda m: m < lead_in,
    )


def uniform(role: str, side: str, inputs, outputs, block_length: int = 0, lead_in: int = 0) -> StrategyMachine:
    """Memoryless coin-tossing machine: every letter (and block letter) drawn uniformly."""
    d = Dist.uniform(outputs)
    block = Dist.uniform(list(itertools.product(outputs, repeat=block_length))) if block_length else ()
    return from_function(
        role, side, inputs, outputs, 0,
        lambda m, x: d,
        lambda m, x, y: min(m + 1, lead_in),
        block, lead_in, silent=lambda m: m < lead_in,
    )


def rename_io(s: StrategyMachine, role: str, inputs_map: Mapping | None = None, outputs_map: Mapping | None = None) -> StrategyMachine:
    """Same machine with input/output letters renamed (missing letters kept)."""
    im = (lambda x: inputs_map.get(x, x)) if inputs_map else (lambda x: x)
    om = (lambda y: outputs_map.get(y, y)) if outputs_map else (lambda y: y)

    def od(v):
        if isinstance(v, Dist):
            return Dist(tuple((om(y), p) for y, p in v.items))
        return om(v)

    block = s.initial_block
    if isinstance(block, Dist):
        block = Dist(tuple((tuple(om(y) for y in b), p) for b, p in block.items))
    else:
        block = tuple(om(y) for y in block)
    return StrategyMachine(
        role=role,
        side=s.side,
        inputs=tuple(im(x) for x in s.inputs),
        outputs=tuple(om(y) for y in s.outputs),
        memory=s.memory,
        initial=s.initial,
        output={(m, im(x)): od(v) for (m, x), v in s.output.items()},
        update={(m, im(x), None if y is None else om(y)): m2 for (m, x, y), m2 in s.update.items()},
        initial_block=block,
        lead_in=s.lead_in,
    )


def compact(s: StrategyMachine) -> StrategyMachine:
    """Relabel memory as 0, 1, ... in first-declaration order (keeps machines printable)."""
    index = {m: i for i, m in enumerate(s.memory)}
    return StrategyMachine(
        s.role, s.side, s.inputs, s.outputs, tuple(range(len(s.memory))), index[s.initial],
        {(index[m], x): v for (m, x), v in s.output.items()},
        {(index[m], x, y): index[m2] for (m, x, y), m2 in s.update.items()},
        s.initial_block, s.lead_in,
    )


def same_semantics(a: StrategyMachine, b: StrategyMachine, depth: int = 8) -> bool:
    """Pure machines produce equal output streams on every input word up to ``depth``."""
    if a.inputs != b.inputs and set(a.inputs) != set(b.inputs):
        return False
    # breadth-first over joint memories keeps this linear in reachable pairs per level
    frontier = {(a.initial, b.initial, 0)}
    if a.side == EMITTER or b.side == EMITTER:
        if (a.block() if a.side == EMITTER else ()) != (b.block() if b.side == EMITTER else ()):
            return False
    for _ in range(depth):
        nxt = set()
        for ma, mb, i in frontier:
            for x in a.inputs:
                ya = None if (a.side == RESPONDER and i < a.lead_in) else a.choose(ma, x)
                yb = None if (b.side == RESPONDER and i < b.lead_in) else b.choose(mb, x)
                if ya != yb:
                    return False
                nxt.add((a.next(ma, x, ya), b.next(mb, x, yb), min(i + 1, max(a.lead_in, b.lead_in))))
        frontier = nxt
    return True
