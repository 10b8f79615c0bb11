"""Tracking an unknown input force with an unbiased minimum-variance filter."""
from .discretize import DiscreteModel, discretize, van_loan_blocks
from .errors import (ConfigError, DefinitenessError, DimensionError, ForceTrackError,
                     InfeasibleError, ModelError, RankError, SequencingError)
from .experiment import FilterInit, monte_carlo, run_single, time_average_bias
from .model import ContinuousModel, OptoParams, build_optomechanical, validate
from .scenario import Scenario

__version__ = "0.1.0"
