"""Probabilistic LTL control synthesis for robots on graph environments.

The pipeline builds a labeled MDP from an environment with noisy motion and
observations, translates an LTL mission into a deterministic Rabin
automaton, forms the product, and computes a strategy maximizing the
probability of satisfying the mission.
"""
from importlib import resources

from .env import (Environment, Model, MotionModel, ObservationModel, ObservationSet,
                  dump_environment, enumerate_observations, load_environment,
                  load_environment_file, realizable_symbols, validate)
from .ltl import Formula, LassoWord, eval_lasso, parse_ltl, to_nnf, to_string
from .mdp import FinitePath, LabeledMDP, build_mdp, dump_mdp, path_probability
from .product import ProductMDP, build_product
from .synthesis import (ControlStrategy, EndComponent, ProductPolicy, ReachabilitySolution,
                        accepting_mecs, build_product_policy, dead_states, find_mecs,
                        induce_and_project, max_reachability, max_satisfaction_probability,
                        synthesize)

__version__ = "0.1.0"

CASE_STUDY_FORMULA = (
    "G F pickup && G(pickup && !observe9 -> X(!pickup U event7))"
    " && G(pickup && observe9 -> X(!pickup U event9))"
)


def case_study_path():
    """Path of the bundled 13-vertex surveillance model."""
    return str(resources.files(__name__) / "data" / "casestudy.json")


def load_case_study():
    model, _ = load_environment_file(case_study_path())
    return model
