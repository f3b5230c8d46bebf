"""Modulated time evolution for long-range transverse-field Ising chains."""
from .spinmodel import IsingModel, build_model, ground_state
from .propagator import Schedule, evolve_mte, evolve_qaoa, initial_state
from .optimizer import Objective, optimize_adam, optimize_bfgs
from .qaoa_bridge import QAOASchedule, translate_schedule

__all__ = [
    "IsingModel", "build_model", "ground_state",
    "Schedule", "evolve_mte", "evolve_qaoa", "initial_state",
    "Objective", "optimize_adam", "optimize_bfgs",
    "QAOASchedule", "translate_schedule",
]
