"""Monte Carlo simulator for QKD over fiber network topologies.

Builds direct/line/star/ring/grid/torus networks, runs decoy-state, 3-stage
and E91 protocol rounds over routed paths, manages key pools with
error-correction and trusted-node XOR relay, sweeps key rate against
distance and burst size, and fits the resulting curves.
"""

from .analysis import (FitDiagnostics, PolyFit, SigmoidFit, fit_diagnostics,
                       fit_log_cubic, fit_polynomial, fit_sigmoid,
                       format_fit_report, format_residuals_csv, plateau_end,
                       savgol_smooth, sigmoid_model, turning_point)
from .channel import (ALPHA_FIBER, ALPHA_SWITCH, ChannelParams, burst_survival,
                      path_transmission, redundant_bsm_success,
                      sample_bernoulli, transmission_probability)
from .experiments import (BurstSweepResult, SweepConfig, SweepPoint,
                          SweepResult, relay_sections, run_burst_sweep,
                          run_distance_sweep)
from .keymgmt import (KeyPool, QberEstimate, binary_entropy,
                      corrected_key_rate, estimate_qber, key_rate, xor_relay)
from .photonstats import (multi_photon_prob, pns_mutual_information,
                          poisson_pmf, poisson_second_order)
from .protocols import (DECOY, E91, THREE_STAGE, IntensityLevel, ProtocolSpec,
                        RoundOutcome, delivery_probability, intensity_yields,
                        run_decoy_round, run_e91_round, run_round,
                        run_three_stage_round)
from .streams import RandomStream, derive_stream
from .topology import (ALICE, BOB, REPEATER, SWITCH, TRUSTED, Link, RoutePath,
                       Topology, build_topology, disjoint_paths,
                       format_topology, shortest_path)

__version__ = "0.1.0"

__all__ = [
    "ALICE", "ALPHA_FIBER", "ALPHA_SWITCH", "BOB", "BurstSweepResult",
    "ChannelParams", "DECOY", "E91", "FitDiagnostics", "IntensityLevel",
    "KeyPool", "Link", "PolyFit", "ProtocolSpec", "QberEstimate",
    "REPEATER", "RandomStream", "RoundOutcome", "RoutePath", "SWITCH",
    "SigmoidFit", "SweepConfig", "SweepPoint", "SweepResult", "THREE_STAGE",
    "TRUSTED", "Topology", "binary_entropy", "build_topology",
    "burst_survival", "corrected_key_rate", "delivery_probability",
    "derive_stream", "disjoint_paths", "estimate_qber", "fit_diagnostics",
    "fit_log_cubic", "fit_polynomial", "fit_sigmoid", "format_fit_report",
    "format_residuals_csv", "format_topology",
    "intensity_yields", "key_rate", "multi_photon_prob", "path_transmission",
    "plateau_end", "pns_mutual_information", "poisson_pmf",
    "poisson_second_order", "redundant_bsm_success", "relay_sections",
    "run_burst_sweep", "run_decoy_round", "run_distance_sweep", "run_e91_round",
    "run_round", "run_three_stage_round", "sample_bernoulli", "savgol_smooth",
    "shortest_path", "sigmoid_model", "transmission_probability",
    "turning_point", "xor_relay",
]
