"""Line-oriented text formats for games, automata and strategy machines.

Games::

    kind delayed-control            # or: kind delay-game
    calphabet h t                   # delay games: ialphabet / oalphabet / lookahead
    state s0 C init
    edge s0 h E_h
    condition safety                # safety | reach | parity | automaton <file>
    unsafe bad_E bad_C              # target ... / color <id> <n>

A condition may also be given inline between ``begin automaton`` and
``end automaton``, using the automaton grammar::

    condition safety
    alphabet (1,1') (1,2') ...
    state init init
    trans init (1,1') rej
    unsafe rej

Machines use ``role``, ``side``, ``inputs``, ``outputs``, ``init``,
``memory``, ``init-block`` (or several ``init-block-choice <p> <letters>``), ``lead-in``,
``out <m> <x> <y | y:p ...>`` and ``next <m> <x> <y | -> <m'>``.
"""
from __future__ import annotations

import os
import re
from fractions import Fraction

from .model import (
    CONTROLLER,
    ENVIRONMENT,
    KINDS,
    PARITY,
    Arena,
    DelayedControlGame,
    DelayGame,
    ModelError,
    OmegaAutomaton,
    make_automaton,
    state_condition,
    validate,
)
from .strategy import Dist, StrategyMachine, compact

TOKEN = re.compile(r"^[^\s(),#]+$")


class ParseError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


# --- letters and tokens --------------------------------------------------------------


def _letter_text(x) -> str:
    if isinstance(x, tuple):
        return "(" + ",".join(_letter_text(y) for y in x) + ")"
    return str(x)


def _parse_letter(tok: str, line: int):
    if tok.startswith("("):
        if not tok.endswith(")"):
            raise ParseError(line, f"malformed pair {tok!r}")
        parts = tok[1:-1].split(",")
        if len(parts) != 2 or not all(TOKEN.match(p) for p in parts):
            raise ParseError(line, f"malformed pair {tok!r}")
        return tuple(parts)
    if not TOKEN.match(tok):
        raise ParseError(line, f"bad token {tok!r}")
    return tok


def _names(states) -> dict:
    """Printable identifiers for automaton states (strings kept, others numbered)."""
    if all(isinstance(q, str) and TOKEN.match(q) for q in states):
        return {q: q for q in states}
    return {q: f"q{i}" for i, q in enumerate(states)}


def _lines(text: str):
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line.split()


# --- automata -----------------------------------------------------------------------


def print_automaton(aut: OmegaAutomaton, header: bool = True) -> str:
    names = _names(aut.states)
    out = ["kind automaton"] if header else []
    out.append(f"condition {aut.kind}")
    out.append("alphabet " + " ".join(_letter_text(a) for a in aut.alphabet))
    for q in aut.states:
        out.append(f"state {names[q]}" + (" init" if q == aut.initial else ""))
    for q in aut.states:
        for a in aut.alphabet:
            out.append(f"trans {names[q]} {_letter_text(a)} {names[aut.trans[(q, a)]]}")
    if aut.kind == PARITY:
        for q in aut.states:
            out.append(f"color {names[q]} {aut.coloring[q]}")
    elif aut.marked:
        word = "unsafe" if aut.kind == "safety" else "target"
        out.append(f"{word} " + " ".join(names[q] for q in aut.states if q in aut.marked))
    return "\n".join(out) + "\n"


def _automaton_from(rows, first_line: int = 1) -> OmegaAutomaton:
    kind = None
    alphabet = None
    states: list = []
    initial = None
    trans = {}
    marked: list = []
    coloring: dict = {}
    declared: dict = {}
    for no, tok in rows:
        head = tok[0]
        if head == "kind":
            if tok[1:] != ["automaton"]:
                raise ParseError(no, "expected 'kind automaton'")
        elif head == "condition":
            if len(tok) != 2 or tok[1] not in KINDS:
                raise ParseError(no, "condition must be safety, reach or parity")
            kind = tok[1]
        elif head == "alphabet":
            alphabet = [_parse_letter(t, no) for t in tok[1:]]
        elif head == "state":
            if len(tok) not in (2, 3) or (len(tok) == 3 and tok[2] != "init"):
                raise ParseError(no, "usage: state <id> [init]")
            q = _parse_letter(tok[1], no)
            if q in declared:
                raise ParseError(no, f"duplicate state {q!r} (first declared on line {declared[q]})")
            declared[q] = no
            states.append(q)
            if len(tok) == 3:
                if initial is not None:
                    raise ParseError(no, "second initial state")
                initial = q
        elif head == "trans":
            if len(tok) != 4:
                raise ParseError(no, "usage: trans <q> <letter> <q'>")
            key = (tok[1], _parse_letter(tok[2], no))
            if key in trans:
                raise ParseError(no, f"duplicate transition {tok[1]} {tok[2]}")
            trans[key] = tok[3]
        elif head in ("unsafe", "target"):
            want = "unsafe" if kind == "safety" else "target" if kind == "reach" else None
            if head != want:
                raise ParseError(no, f"'{head}' does not match condition {kind}")
            marked += tok[1:]
        elif head == "color":
            if len(tok) != 3 or not tok[2].isdigit():
                raise ParseError(no, "usage: color <id> <natural>")
            coloring[tok[1]] = int(tok[2])
        else:
            raise ParseError(no, f"unknown directive {head!r}")
    if kind is None:
        raise ParseError(first_line, "automaton without condition")
    if alphabet is None:
        raise ParseError(first_line, "automaton without alphabet")
    if initial is None:
        raise ParseError(first_line, "automaton without initial state")
    aut = make_automaton(states, alphabet, initial, trans, kind, marked, coloring if kind == PARITY else None)
    problems = validate(aut)
    if problems:
        raise ModelError("; ".join(problems))
    return aut


def parse_automaton(text: str) -> OmegaAutomaton:
    return _automaton_from(list(_lines(text)))


# --- games ----------------------------------------------------------------------------


def print_game(game) -> str:
    if isinstance(game, DelayGame):
        out = ["kind delay-game"]
        if game.name:
            out.append(f"name {game.name}")
        out.append("ialphabet " + " ".join(game.inputs))
        out.append("oalphabet " + " ".join(game.outputs))
        out.append(f"lookahead {game.lookahead}")
        out += ["begin automaton", print_automaton(game.condition, header=False).rstrip("\n"), "end automaton"]
        return "\n".join(out) + "\n"
    a = game.arena
    out = ["kind delayed-control"]
    if game.name:
        out.append(f"name {game.name}")
    out.append("calphabet " + " ".join(a.calphabet))
    out.append("ealphabet " + " ".join(a.ealphabet))
    for s in a.states:
        out.append(f"state {s} {a.owner[s]}" + (" init" if s == a.initial else ""))
    for s in a.states:
        for x in a.letters(s):
            out.append(f"edge {s} {x} {a.trans[(s, x)]}")
    if game.state_condition is not None:
        kind, data = game.state_condition
        out.append(f"condition {kind}")
        if kind == PARITY:
            out += [f"color {s} {c}" for s, c in data]
        elif data:
            out.append(("unsafe " if kind == "safety" else "target ") + " ".join(data))
    else:
        out += ["begin automaton", print_automaton(game.condition, header=False).rstrip("\n"), "end automaton"]
    return "\n".join(out) + "\n"


def parse_game(text: str, base_dir: str | None = None):
    rows = list(_lines(text))
    if not rows or rows[0][1][0] != "kind":
        raise ParseError(rows[0][0] if rows else 1, "game must start with 'kind'")
    kind = rows[0][1][1:]
    if kind not in (["delayed-control"], ["delay-game"]):
        raise ParseError(rows[0][0], "kind must be delayed-control or delay-game")
    dc = kind == ["delayed-control"]
    name = None
    alph: dict = {}
    lookahead = 0
    states: list = []
    declared: dict = {}
    initial = None
    edges: list = []
    cond_kind = None
    cond_rows: list = []
    shorthand: dict = {"unsafe": [], "target": [], "color": {}}
    automaton = None
    i = 1
    while i < len(rows):
        no, tok = rows[i]
        head = tok[0]
        if head == "name":
            name = tok[1] if len(tok) == 2 else None
        elif head in ("calphabet", "ealphabet", "ialphabet", "oalphabet"):
            if (head[0] in "ce") != dc:
                raise ParseError(no, f"'{head}' does not belong to this kind of game")
            for t in tok[1:]:
                if not TOKEN.match(t):
                    raise ParseError(no, f"bad letter {t!r}")
            alph[head] = tok[1:]
        elif head == "lookahead":
            if dc or len(tok) != 2 or not tok[1].isdigit():
                raise ParseError(no, "usage: lookahead <natural> (delay games only)")
            lookahead = int(tok[1])
        elif head == "state" and automaton is None and dc:
            if len(tok) not in (3, 4) or tok[2] not in "CE" or len(tok[2]) != 1 or (len(tok) == 4 and tok[3] != "init"):
                raise ParseError(no, "usage: state <id> C|E [init]")
            if tok[1] in declared:
                raise ParseError(no, f"duplicate state {tok[1]!r} (first declared on line {declared[tok[1]]})")
            declared[tok[1]] = no
            states.append((tok[1], CONTROLLER if tok[2] == "C" else ENVIRONMENT))
            if len(tok) == 4:
                if initial is not None:
                    raise ParseError(no, "second initial state")
                initial = tok[1]
        elif head == "edge" and dc:
            if len(tok) != 4:
                raise ParseError(no, "usage: edge <src> <letter> <dst>")
            edges.append((tok[1], tok[2], tok[3], no))
        elif head == "condition":
            if len(tok) == 3 and tok[1] == "automaton":
                path = tok[2] if base_dir is None else os.path.join(base_dir, tok[2])
                try:
                    with open(path) as fh:
                        automaton = parse_automaton(fh.read())
                except OSError as exc:
                    raise ParseError(no, f"cannot read automaton file: {exc}") from None
            elif len(tok) == 2 and tok[1] in KINDS and dc:
                cond_kind = tok[1]
            else:
                raise ParseError(no, "usage: condition safety|reach|parity or condition automaton <file>")
        elif head in ("unsafe", "target") and dc:
            want = {"safety": "unsafe", "reach": "target"}.get(cond_kind)
            if head != want:
                raise ParseError(no, f"'{head}' does not match condition {cond_kind}")
            shorthand[head] += tok[1:]
        elif head == "color" and dc:
            if cond_kind != PARITY or len(tok) != 3 or not tok[2].isdigit():
                raise ParseError(no, "usage: color <state> <natural> after 'condition parity'")
            shorthand["color"][tok[1]] = int(tok[2])
        elif head == "begin":
            if tok[1:] != ["automaton"]:
                raise ParseError(no, "expected 'begin automaton'")
            j = i + 1
            while j < len(rows) and rows[j][1] != ["end", "automaton"]:
                j += 1
            if j == len(rows):
                raise ParseError(no, "unterminated automaton block")
            automaton = _automaton_from(rows[i + 1:j], no)
            i = j
        else:
            raise ParseError(no, f"unknown directive {head!r}")
        i += 1

    if not dc:
        for key in ("ialphabet", "oalphabet"):
            if key not in alph:
                raise ParseError(1, f"missing {key}")
        if automaton is None:
            raise ParseError(1, "delay game needs an automaton condition")
        game = DelayGame(tuple(alph["ialphabet"]), tuple(alph["oalphabet"]), automaton, lookahead, name)
        problems = validate(game)
        if problems:
            raise ModelError("; ".join(problems))
        return game

    for key in ("calphabet", "ealphabet"):
        if key not in alph:
            raise ParseError(1, f"missing {key}")
    if initial is None:
        raise ParseError(1, "no initial state")
    for src, x, dst, no in edges:
        if src not in declared:
            raise ParseError(no, f"edge from undeclared state {src!r}")
        if dst not in declared:
            raise ParseError(no, f"edge to undeclared state {dst!r}")
    seen_edges = {}
    for src, x, dst, no in edges:
        if (src, x) in seen_edges:
            raise ParseError(no, f"second edge for ({src}, {x}), first on line {seen_edges[(src, x)]}")
        seen_edges[(src, x)] = no
    arena = Arena.build(states, initial, alph["calphabet"], alph["ealphabet"], [(s, x, d) for s, x, d, _ in edges])
    if automaton is not None:
        game = DelayedControlGame(arena, automaton, None, name)
    elif cond_kind is not None:
        for s in shorthand["unsafe"] + shorthand["target"] + list(shorthand["color"]):
            if s not in declared:
                raise ModelError(f"condition names undeclared state {s!r}")
        if cond_kind == PARITY:
            missing = [s for s, _ in states if s not in shorthand["color"]]
            if missing:
                raise ModelError(f"no color for state {missing[0]!r}")
            data = shorthand["color"]
        else:
            data = shorthand["unsafe"] if cond_kind == "safety" else shorthand["target"]
        game = DelayedControlGame.from_states(arena, cond_kind, data, name)
    else:
        raise ParseError(1, "missing condition")
    problems = validate(game)
    if problems:
        raise ModelError("; ".join(problems))
    return game


def load_game(path: str):
    with open(path) as fh:
        return parse_game(fh.read(), os.path.dirname(os.path.abspath(path)))


# --- machines ------------------------------------------------------------------------


def _frac(p: Fraction) -> str:
    return str(Fraction(p))


def _out_text(v) -> str:
    if isinstance(v, Dist):
        if v.is_point():
            return str(v.support[0])
        return " ".join(f"{y}:{_frac(p)}" for y, p in v.items)
    return str(v)


def print_machine(m: StrategyMachine) -> str:
    if not all(isinstance(x, (str, int)) and TOKEN.match(str(x)) for x in m.memory):
        m = compact(m)
    out = ["kind machine", f"role {m.role}", f"side {m.side}"]
    out.append("inputs " + " ".join(m.inputs))
    out.append("outputs " + " ".join(m.outputs))
    out.append("memory " + " ".join(str(x) for x in m.memory))
    out.append(f"init {m.initial}")
    if isinstance(m.initial_block, Dist) and not m.initial_block.is_point():
        for b, p in m.initial_block.items:
            out.append(f"init-block-choice {_frac(p)} " + " ".join(b))
    else:
        block = m.block()
        if block or m.side == "emitter":
            out.append("init-block " + " ".join(block) if block else "init-block")
    out.append(f"lead-in {m.lead_in}")
    for mem in m.memory:
        for x in m.inputs:
            if (mem, x) in m.output:
                out.append(f"out {mem} {x} {_out_text(m.output[(mem, x)])}")
    for mem in m.memory:
        for x in m.inputs:
            if (mem, x, None) in m.update:
                out.append(f"next {mem} {x} - {m.update[(mem, x, None)]}")
            if (mem, x) in m.output:
                o = m.output[(mem, x)]
                for y in (o.support if isinstance(o, Dist) else (o,)):
                    out.append(f"next {mem} {x} {y} {m.update[(mem, x, y)]}")
    return "\n".join(out) + "\n"


def parse_machine(text: str) -> StrategyMachine:
    fields: dict = {"lead-in": 0}
    blocks: list = []
    output: dict = {}
    update: dict = {}
    memory: list = []

    def remember(mem):
        if mem not in memory:
            memory.append(mem)

    for no, tok in _lines(text):
        head = tok[0]
        if head == "kind":
            if tok[1:] != ["machine"]:
                raise ParseError(no, "expected 'kind machine'")
        elif head in ("role", "side", "init"):
            if len(tok) != 2:
                raise ParseError(no, f"usage: {head} <value>")
            fields[head] = tok[1]
            if head == "init":
                remember(tok[1])
        elif head in ("inputs", "outputs"):
            fields[head] = tuple(tok[1:])
        elif head == "memory":
            for mem in tok[1:]:
                remember(mem)
        elif head == "init-block":
            blocks = [(Fraction(1), tuple(tok[1:]))]
        elif head == "init-block-choice":
            try:
                p = Fraction(tok[1])
            except (ValueError, IndexError, ZeroDivisionError):
                raise ParseError(no, "usage: init-block-choice <p> <letters>") from None
            blocks.append((p, tuple(tok[2:])))
        elif head == "lead-in":
            if len(tok) != 2 or not tok[1].isdigit():
                raise ParseError(no, "usage: lead-in <natural>")
            fields["lead-in"] = int(tok[1])
        elif head == "out":
            if len(tok) < 4:
                raise ParseError(no, "usage: out <m> <x> <y | y:p ...>")
            mem, x = tok[1], tok[2]
            remember(mem)
            if len(tok) == 4 and ":" not in tok[3]:
                output[(mem, x)] = tok[3]
            else:
                pairs = []
                for t in tok[3:]:
                    y, _, p = t.partition(":")
                    try:
                        pairs.append((y, Fraction(p)))
                    except (ValueError, ZeroDivisionError):
                        raise ParseError(no, f"bad probability in {t!r}") from None
                try:
                    output[(mem, x)] = Dist(tuple(pairs))
                except ValueError as exc:
                    raise ParseError(no, str(exc)) from None
        elif head == "next":
            if len(tok) != 5:
                raise ParseError(no, "usage: next <m> <x> <y|-> <m'>")
            remember(tok[1])
            remember(tok[4])
            update[(tok[1], tok[2], None if tok[3] == "-" else tok[3])] = tok[4]
        else:
            raise ParseError(no, f"unknown directive {head!r}")
    for key in ("role", "side", "inputs", "outputs", "init"):
        if key not in fields:
            raise ParseError(1, f"missing {key}")
    if not blocks:
        block = ()
    elif len(blocks) == 1 and blocks[0][0] == 1:
        block = blocks[0][1]
    else:
        try:
            block = Dist(tuple((b, p) for p, b in blocks))
        except ValueError as exc:
            raise ParseError(1, str(exc)) from None
    initial = fields["init"]
    m = StrategyMachine(
        fields["role"], fields["side"], fields["inputs"], fields["outputs"], tuple(memory), initial,
        output, update, block, fields["lead-in"],
    )
    problems = m.problems()
    if problems:
        raise ModelError("; ".join(problems))
    return m


def load_machine(path: str) -> StrategyMachine:
    with open(path) as fh:
        return parse_machine(fh.read())
