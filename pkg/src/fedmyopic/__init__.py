"""Federated myopic community detection on signed weighted consensus graphs."""

from .consensus import (
    ConsensusGraph,
    aggregate,
    expected_consensus,
    noise_proxy,
    signal_coefficients,
    signed_consensus,
)
from .errors import CapacityError, FedMyopicError, InputError
from .federation import (
    ClientSpec,
    EvidenceGraph,
    LocalSubgraph,
    ModelSpec,
    censor,
    fov_complete_sample,
    generate_evidence,
    sample_subgraph,
)
from .pipeline import run_pipeline
from .recovery import (
    RecoveryResult,
    SdpSolution,
    brute_force_opt,
    dual_certificate,
    exact_recovery_check,
    greedy_recover,
    recover,
    round_solution,
    solve_sdp,
)
from .signed_graph import (
    ExpansionReport,
    SignedWeightedGraph,
    boundary_weight,
    cheeger_gap,
    classical_cheeger,
    degrees,
    indicator_graph,
    set_expansion,
    signed_edge_expansion,
    signed_parts,
)
from .spectral import eig_sym, lambda2, lambda_one_perp, laplacian, rayleigh, signed_rayleigh
from .theory import client_signal_coeffs, impossibility_condition, recovery_condition

__version__ = "0.1.0"
