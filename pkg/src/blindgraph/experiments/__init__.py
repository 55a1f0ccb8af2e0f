"""Desk-scale experiment harness: sweeps, epidemic model and outputs."""

from .epidemic import EpidemicModel, draw_model, draw_prior, localize_sources, score_support, sis_simulate
from .graphs import GraphSpec, gen_graph, matched_params
from .outputs import ExperimentResult, emit_outputs, read_records, records_csv
from .protocol import ExperimentSpec, TrialRecord, draw_instance, trial_seed
from .runners import (PhaseDiagram, canonical_solver, run_epidemic, run_experiment, run_phase_diagram,
                      run_rho_correlation, run_sampling_sweep)
