"""Value and equilibrium stopping sets for zero-sum stopping games on
finite continuous-time Markov chains."""
from .ctmc import (
    ClassDecomposition,
    GeneratorMatrix,
    StateSpace,
    UniformizedChain,
    apply_generator,
    recurrent_classes,
    uniformize,
    validate_generator,
)
from .errors import *  # noqa: F401,F403
from .game import (
    GameTrace,
    InitMode,
    ModeComparison,
    NEReport,
    OuterRecord,
    Solution,
    classify_sets,
    compare_modes,
    solve_game,
    verify_equilibrium,
)
from .oracle import (
    PayoffEstimate,
    SimulationConfig,
    construct_phi_c,
    enumerate_equilibria,
    simulate_hitting_payoff,
    value_iteration,
)
from .recipes import gen_birth_death, gen_four_state, gen_lattice, example_spec
from .resolvent import GameSpec, defect, hitting_payoff, masked_resolvent_solve, stopping_set
from .serialize import parse_spec_file, parse_spec_text
from .stopping import OnePlayerResult, forward_optimal_stopping, solve_one_player

__version__ = "0.1.0"
