"""Graphon-based stability and noise-sensitivity analysis of SIS epidemics."""

__version__ = "0.1.0"

from .graphon import (CapacityError, LipschitzGraphon, Partition, SpectrumReport, StepKernel,
                      cut_norm, degree_function, evaluate, hs_norm, kernel_difference,
                      list_presets, load_graphon, load_preset, lp_norm, operator_norm,
                      operator_spectrum, resolve_graphon)
from .sampling import SampledGraph, empirical_graphon, read_edge_list, sample_graph, write_edge_list
from .spectral import AdjacencySpectrum, adjacency_eigenvalues, normalized_spectrum
from .indices import (BoundInapplicableError, EpidemicParams, LargeEnoughReport, NoiseIndexReport,
                      StabilityError, l2_sampling_bound, large_enough, noise_index_graph,
                      noise_index_graphon, noise_report, phi, positive_noise_upper_bound,
                      stability_threshold_graph, stability_threshold_graphon, theorem_bound)
from .dynamics import (SimulationConfig, Trajectory, monte_carlo_noise_index, simulate_linear,
                       simulate_linear_noisy, simulate_sis_nonlinear)
from .experiments import ExperimentConfig, Fig3Row, threshold_params, run_fig3
