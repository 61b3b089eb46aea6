"""SWIPT receivers with successive interference cancellation in bipolar ad hoc networks."""

from .analytic import (CoverageBreakdown, avg_harvested_energy, coverage_after_cancel,
                       coverage_decode_nth, coverage_no_sic, coverage_sic,
                       harvested_energy_upper_bound, laplace_interference_full,
                       laplace_interference_outside, mean_interference)
from .model import ConfigError, NetworkParams, Ordering, SicConfig, from_decibels, tau, to_decibels
from .optimizer import Infeasible, SplitSolution, energy_gain, optimal_split
from .simulator import (Realization, SimConfig, SimEstimate, TerminalState, TrialOutcome,
                        estimate_coverage, estimate_energy, run_sic_protocol, sample_realization)
from .specfun import (QuadratureError, QuadratureSpec, gauss_2f1_neg, integrate_semi_infinite,
                      nn_distance_pdf)
from .sweep import SweepSpec, SweepTable, emit_csv, read_csv, run_sweep

__version__ = "0.1.0"
