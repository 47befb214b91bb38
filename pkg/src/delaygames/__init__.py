"""Games under delayed control, delay games with lookahead, and their randomized analysis."""
from .builtins import BUILTINS, builtin
from .delay import (
    BudgetExceeded,
    classify_pure,
    decisive_bound,
    solve_delay_game,
    solve_delayed_control,
    solve_environment,
    sweep_delta,
    sweep_k,
)
from .graph import GraphGame, attractor, product_game, solve
from .matrix import fictitious_play, matrix_value, reduce_dominated, solve_exact
from .model import (
    Arena,
    DelayedControlGame,
    DelayGame,
    Lasso,
    ModelError,
    OmegaAutomaton,
    complement,
    difference_witness,
    make_automaton,
    play_of,
    run_automaton,
    validate,
)
from .randomized import (
    HorizonPolicy,
    ValueReport,
    best_response_controller,
    classify_randomized,
    evaluate_guaranteed,
    normal_form_value,
    simulate,
    value_profile,
)
from .strategy import Dist, StrategyMachine
from .textio import ParseError, load_game, load_machine, parse_game, parse_machine, print_game, print_machine
from .transforms import DelayError, dc_to_condition, dc_to_delay_game, dg_to_dc
from .verify import verify_strategy
