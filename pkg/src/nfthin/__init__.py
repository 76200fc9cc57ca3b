"""Thinned-array design and evaluation for near-field multi-user MIMO.

A library plus `nf-thin` CLI covering: near-field channels and regularized
zero-forcing sum rates, angle/range beam patterns with closed-form grating
lobe predictions, swarm-optimized thinning masks (sidelobe- and rate-driven),
and a reproducible Monte Carlo benchmark harness.
"""

from .arrays import (SPEED_OF_LIGHT, ArrayGeometry, FocusPoint, ThinningVector,
                     apply_thinning, steering_vector, wavelength_from_carrier)
from .beams import (BeamPattern, GratingLobePrediction, PsllResult, angle_grid,
                    angle_pattern, grating_lobe_angles, pattern_2d, psll,
                    range_grid, range_lobe_candidates, range_pattern, to_db)
from .channel import (ChannelMatrix, Scenario, UserLocation, channel_matrix,
                      channel_vector, default_range_interval, make_rng, pathloss,
                      sample_scenario, scenario_from_csv, scenario_to_csv,
                      trial_seed)
from .experiments import (AggregateResult, BenchmarkConfig, PatternStudyConfig,
                          run_fig1, run_fig2, run_fig3, run_fig4, run_oracle_suite)
from .precoding import (PowerConfig, PrecodingMatrix, RateReport, batched_sum_rates,
                        evaluate_rates, masked_sum_rates, rzf_precoder, sinr,
                        sum_rate)
from .pso import (SwarmConfig, SwarmResult, minimize_swarm, optimize_gta,
                  optimize_positions_mula, optimize_sta, optimize_sta_ensemble,
                  project_min_spacing, top_k_binarize)
from .schemes import (SCHEME_NAMES, ArraySetup, make_fula, make_gta_scheme,
                      make_hula, make_mula_scheme, make_pta, make_pta_scheme,
                      make_sta_scheme, make_sula)

__version__ = "0.1.0"
