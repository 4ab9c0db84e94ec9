"""Distribution estimation for alternating Markov chains from repetition channels."""
from .combinatorics import (
    GuardError,
    Profile,
    alternating_of,
    class_count_Z,
    class_size_L,
    enumerate_alternating_patterns,
    enumerate_alternating_profiles,
    is_alternating,
    is_alternating_profile,
    partition_count,
    partition_count_bounded,
    pattern_of,
    profile_of,
    runs,
)
from .estimators import (
    block_q,
    horizon_free_conditional,
    horizon_free_prob,
    marginal_q,
    measured_redundancy,
    seq_conditional,
)
from .prob import (
    DegenerateError,
    IidDistribution,
    alt_pattern_prob,
    alt_seq_prob,
    iid_pattern_prob,
    lb_construction_prob,
    seq_prob,
    sup_alt_pattern_prob,
)

__version__ = "0.1.0"
