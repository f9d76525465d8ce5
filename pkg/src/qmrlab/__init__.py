"""Quantum majority rule simulation toolkit."""

__version__ = "0.1.0"

from .classical import PairwiseTally, classical_winner, condorcet_winner, pairwise_expectations
from .constitution import (
    QmrParams,
    QmrTable,
    build_majority_digraph,
    chi1,
    eu_step,
    gms_step,
    linear_extensions,
    qmr_aggregate,
    tarjan_scc,
    winner_from_distribution,
)
from .distributions import deterministic_profile, pair_matrix, pair_probability, point_mass, uniform
from .exceptions import (
    BoundError,
    ConfigError,
    DegeneracyError,
    EmptySampleError,
    InvalidLabelError,
    InvalidRankingError,
    ParameterError,
    QmrError,
)
from .metrics import MetricsSummary, flip_rate_normalized, js_batch_mean, js_divergence, winner_agreement
from .noise import NoiseConfig, RunRecord, SamplingMode, run_batch, sample_profile, sample_societal
from .preferences import enumerate_rankings, lehmer_decode, lehmer_encode, parse_ranking, ranking_str
from .qmr2 import (
    DRAW,
    Qmr2Config,
    VoterBlockSpec,
    mini_round_majority,
    qmr2_constitution_analytic,
    run_qmr2,
    sample_block,
)
from .quantum import check_qiia, check_quantum_unanimity, partial_trace_voter
from .readout import InvalidPolicy, apply_bitflip, decode_with_policy
