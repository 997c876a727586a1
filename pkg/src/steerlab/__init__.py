"""steerlab: repeated bimatrix games where an optimizer steers a no-regret
learner toward its commitment optimum."""

from .game import (GameInstance, Trace, EquivClassRep, payoff,
                   best_response_set, best_response_optimistic,
                   trajectory_regret, stackelberg_regret, equiv_class,
                   class_difference, load_game_json)
from .linprog import LPProblem, LPSolution, solve_lp, feasible, minimax_gap
from .facets import (facet_constraints, margin_facet, inducibility_gap,
                     identify_facets, sensitivity_constant, facet_system)
from .stackelberg import (StackelbergSolution, solve_exact, solve_margin,
                          solve_extra_pessimistic, brute_force_oracle)
from .learners import (project_on_simplex, oga_step, kl_mirror_step,
                       budget_learner_plan, OgaLearner, KlMirrorLearner,
                       SwitcherLearner, BudgetLearner, FixedActionLearner,
                       make_learner)
from .steering import (FixedCommitOptimizer, OgaOptimizer, PaalOptimizer,
                       PamdOptimizer, make_optimizer)
from .harness import run_simulation, run_from_specs, write_metrics_csv
from .experiments import GAMES, run_experiment

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
