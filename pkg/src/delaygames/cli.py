"""Command-line front end; every command prints one JSON report."""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from fractions import Fraction
from importlib import metadata

from . import builtins, delay, randomized, textio, transforms
from . import strategy as st
from .model import DelayedControlGame, DelayGame, ModelError
from .strategy import StrategyError
from .transforms import DelayError
from .verify import verify_strategy

OK, USAGE, BUDGET, INVALID = 0, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0+unknown"


def jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    return x


class Session:
    """Collects input files (for the digest) and loads them."""

    def __init__(self):
        self.blobs: list[bytes] = []

    def read(self, path: str) -> str:
        with open(path, "rb") as fh:
            data = fh.read()
        self.blobs.append(data)
        return data.decode()

    def game(self, path: str, want=None):
        g = textio.parse_game(self.read(path), os.path.dirname(os.path.abspath(path)))
        if want is not None and not isinstance(g, want):
            kind = "delayed-control" if want is DelayedControlGame else "delay-game"
            raise ModelError(f"{path}: expected a {kind} game")
        return g

    def machine(self, path: str):
        return textio.parse_machine(self.read(path))

    def digest(self) -> str:
        h = hashlib.sha256()
        for b in self.blobs:
            h.update(hashlib.sha256(b).digest())
        return "sha256:" + h.hexdigest()


def _value_fields(r: randomized.ValueReport) -> dict:
    out = {"kind": r.kind, "value": r.value}
    if r.kind != "Exact":
        out["lo"], out["hi"] = r.lo, r.hi
    out["horizon"] = r.horizon
    if r.samples is not None:
        out["samples"] = r.samples
    return out


# --- commands -----------------------------------------------------------------------


def cmd_solve_dc(a, s: Session):
    g = s.game(a.game, DelayedControlGame)
    r = delay.solve_delayed_control(g, a.delta)
    return {
        "delta": a.delta,
        "verdict": r.verdict,
        "image_winner": "PlayerI" if r.wins else "PlayerO",
        "vertices": r.vertices,
        "strategy_player": st.CONTROLLER if r.wins else st.PLAYER_O,
        "strategy": textio.print_machine(r.machine),
    }


def cmd_solve_dg(a, s: Session):
    g = s.game(a.game, DelayGame)
    if a.k is not None:
        g = g.with_lookahead(a.k)
    r = delay.solve_delay_game(g)
    return {
        "k": g.lookahead,
        "winner": r.winner,
        "vertices": r.vertices,
        "strategy": textio.print_machine(r.machine),
    }


def cmd_solve_env(a, s: Session):
    g = s.game(a.game, DelayedControlGame)
    r = delay.solve_environment(g)
    out = {"verdict": r.verdict}
    if r.machine is not None:
        out["strategy"] = textio.print_machine(r.machine)
    return out


def cmd_transform(a, s: Session):
    if a.direction == "dc-to-dg":
        if a.delta is None:
            raise UsageError("dc-to-dg needs --delta")
        g = s.game(a.game, DelayedControlGame)
        dg = transforms.dc_to_delay_game(g, a.delta)
        return {
            "direction": a.direction,
            "delta": a.delta,
            "lookahead": dg.lookahead,
            "renaming": transforms.output_renaming(g),
            "game": textio.print_game(dg),
        }
    g = s.game(a.game, DelayGame)
    dc, delta, receipt = transforms.dg_to_dc(g)
    return {
        "direction": a.direction,
        "delta": delta,
        "renaming": receipt.renaming,
        "counts": receipt.counts,
        "game": textio.print_game(dc),
    }


def cmd_sweep_delta(a, s: Session):
    g = s.game(a.game, DelayedControlGame)
    p = delay.sweep_delta(g, a.cap)
    return {
        "cap": a.cap,
        "outcome": p.outcome,
        "delta_max": p.delta_max,
        "bound": p.bound.delta if p.bound.delta < 2**64 else f"2^{p.bound.delta.bit_length() - 1}",
        "bound_exactness": p.bound.exactness,
        "summary": p.describe(),
        "verdicts": {str(d): p.verdicts[d] for d in sorted(p.verdicts)},
    }


def cmd_sweep_k(a, s: Session):
    g = s.game(a.game, DelayGame)
    try:
        r = delay.sweep_k(g, a.cap)
    except delay.BudgetExceeded as exc:
        exc.args = (f"{exc} (last feasible k: {exc.last_feasible})",)
        raise
    return {
        "cap": a.cap,
        "outcome": r.outcome,
        "k": r.k,
        "verdicts": {str(k): ("PlayerO" if r.verdicts[k] else "PlayerI") for k in sorted(r.verdicts)},
    }


def cmd_bound(a, s: Session):
    g = s.game(a.game, DelayedControlGame)
    b = delay.decisive_bound(g)
    d = b.delta
    return {
        "bound": d if d < 2**64 else f"2^{d.bit_length() - 1}",
        "exactness": b.exactness,
        "condition": g.condition.kind,
    }


def _horizon(g, a) -> randomized.HorizonPolicy:
    if a.horizon is not None:
        return randomized.HorizonPolicy(a.horizon)
    t = randomized.Analysis(g).first_absorbing()
    return randomized.HorizonPolicy(t or 10)


def cmd_value(a, s: Session):
    g = s.game(a.game, DelayedControlGame)
    hp = _horizon(g, a)
    env_delay = a.env_delay
    mode = "exact" if a.exact else "sandwich" if a.sandwich else None
    if mode is None:
        mode = "exact" if randomized.Analysis(g).absorbing_within(hp.horizon) else "sandwich"
    if mode == "exact":
        hp = randomized.HorizonPolicy(hp.horizon, require_absorbing=True)
        nf = randomized.normal_form_value(g, a.delta, hp, env_delay)
        return {
            "delta": a.delta,
            "mode": mode,
            **_value_fields(nf.report),
            "env_value": nf.env_value,
            "matrix_shape": list(nf.shape),
        }
    ed = a.delta if env_delay is None else env_delay
    lo = randomized.evaluate_guaranteed(g, a.delta, randomized.uniform_controller(g, a.delta), hp, env_delay)
    hi = randomized.best_response_controller(g, a.delta, randomized.uniform_environment(g, ed), hp, env_delay)
    low = lo.value if lo.kind in ("Exact", "LowerBound") else Fraction(0)
    high = hi.value if hi.kind in ("Exact", "UpperBound") else Fraction(1)
    return {
        "delta": a.delta,
        "mode": mode,
        "kind": "Interval",
        "lo": low,
        "hi": high,
        "horizon": hp.horizon,
        "lo_from": "uniform controller",
        "hi_from": "best response to uniform environment",
    }


def cmd_simulate(a, s: Session):
    g = s.game(a.game, DelayedControlGame)
    ed = a.delta if a.env_delay is None else a.env_delay
    sc = s.machine(a.controller) if a.controller else randomized.uniform_controller(g, a.delta)
    se = s.machine(a.environment) if a.environment else randomized.uniform_environment(g, ed)
    r = randomized.simulate(g, a.delta, sc, se, randomized.HorizonPolicy(a.horizon), a.trials, a.seed, a.env_delay)
    return {
        "delta": a.delta,
        "kind": r.kind,
        "estimate": r.value,
        "ci99": [r.lo, r.hi],
        "wins": r.certificates["wins"],
        "trials": r.samples,
        "horizon": r.horizon,
    }


def cmd_classify(a, s: Session):
    g = s.game(a.game, DelayedControlGame)
    if not a.randomized:
        r = delay.classify_pure(g, a.delta)
        return {
            "delta": a.delta,
            "verdict": r.verdict,
            "image_winner": "PlayerI" if r.control.wins else "PlayerO",
        }
    hp = randomized.HorizonPolicy(a.horizon) if a.horizon else None
    r = randomized.classify_randomized(g, a.delta, hp, env_delay=a.env_delay)
    return {
        "delta": a.delta,
        "verdict": r.verdict,
        "value": r.value,
        "lo": r.lo,
        "hi": r.hi,
        "env_value": r.env_value,
        "horizon": r.horizon,
        "evidence": r.evidence,
    }


def cmd_verify(a, s: Session):
    g = s.game(a.game)
    m = s.machine(a.strategy)
    r = verify_strategy(g, m, a.player, a.delta)
    out = {"player": a.player, "verified": r.verified, "product_size": r.product_size}
    if r.counterexample is not None:
        out["counterexample"] = {
            "stem": [textio._letter_text(x) for x in r.counterexample.stem],
            "loop": [textio._letter_text(x) for x in r.counterexample.loop],
        }
    return out


def cmd_example(a, s: Session):
    g = builtins.builtin(a.name, *a.params)
    text = textio.print_game(g)
    s.blobs.append(text.encode())
    if a.raw:
        return text
    return {"name": a.name, "params": a.params, "game": text}


def _natural(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be a natural number")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="delaygames", description="Games under delayed control and delay games.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, game=True):
        q = sub.add_parser(name)
        if game:
            q.add_argument("game")
        q.set_defaults(fn=fn)
        return q

    add("solve-dc", cmd_solve_dc).add_argument("--delta", type=_natural, required=True)
    add("solve-dg", cmd_solve_dg).add_argument("--k", type=_natural)
    add("solve-env", cmd_solve_env)
    q = sub.add_parser("transform")
    q.add_argument("direction", choices=["dc-to-dg", "dg-to-dc"])
    q.add_argument("game")
    q.add_argument("--delta", type=_natural)
    q.set_defaults(fn=cmd_transform)
    add("sweep-delta", cmd_sweep_delta).add_argument("--cap", type=_natural, required=True)
    add("sweep-k", cmd_sweep_k).add_argument("--cap", type=_natural, required=True)
    add("bound", cmd_bound)
    q = add("value", cmd_value)
    q.add_argument("--delta", type=_natural, required=True)
    q.add_argument("--horizon", type=int)
    q.add_argument("--env-delay", type=_natural)
    mode = q.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true")
    mode.add_argument("--sandwich", action="store_true")
    q = add("simulate", cmd_simulate)
    q.add_argument("--delta", type=_natural, required=True)
    q.add_argument("--trials", type=int, required=True)
    q.add_argument("--seed", type=int, required=True)
    q.add_argument("--horizon", type=int, required=True)
    q.add_argument("--env-delay", type=_natural)
    q.add_argument("--controller")
    q.add_argument("--environment")
    q = add("classify", cmd_classify)
    q.add_argument("--delta", type=_natural, required=True)
    q.add_argument("--randomized", action="store_true")
    q.add_argument("--horizon", type=int)
    q.add_argument("--env-delay", type=_natural)
    q = add("verify", cmd_verify)
    q.add_argument("--strategy", required=True)
    q.add_argument("--player", required=True, choices=[st.CONTROLLER, st.ENVIRONMENT, st.PLAYER_I, st.PLAYER_O])
    q.add_argument("--delta", type=_natural)
    q = add("example", cmd_example, game=False)
    q.add_argument("name", choices=sorted(builtins.BUILTINS))
    q.add_argument("params", nargs="*", type=int)
    q.add_argument("--raw", action="store_true", help="print the game text instead of a report")
    return p


def run_command(argv: list[str]) -> tuple[int, str]:
    """Exit code and output text; on a nonzero code the text is an error message, never a report."""
    session = Session()
    try:
        args = build_parser().parse_args(argv)
        body = args.fn(args, session)
    except (UsageError, DelayError) as exc:
        return USAGE, f"usage error: {exc}"
    except delay.BudgetExceeded as exc:
        return BUDGET, f"budget exceeded: {exc}"
    except (textio.ParseError, ModelError, StrategyError, randomized.HorizonError,
            randomized.CapExceeded, OSError, ValueError) as exc:
        return INVALID, f"invalid input: {exc}"
    if isinstance(body, str):
        return OK, body
    opts = {k: v for k, v in sorted(vars(args).items()) if k not in ("fn", "command")}
    report = {
        "command": args.command,
        "arguments": opts,
        "inputs_digest": session.digest(),
        "version": version(),
        "seed": getattr(args, "seed", None),
        **body,
    }
    return OK, json.dumps(jsonable(report), indent=2) + "\n"


def main(argv: list[str] | None = None) -> int:
    code, text = run_command(sys.argv[1:] if argv is None else argv)
    (sys.stdout if code == OK else sys.stderr).write(text if text.endswith("\n") else text + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
