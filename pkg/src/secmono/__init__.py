"""Multipartite secrecy monotones for classical distributions and quantum states."""

from .probdist import (
    ClassicalEnsemble,
    DistributionError,
    JointDistribution,
    PartySet,
    StochasticChannel,
    announce,
    apply_channel,
    forget,
    group,
    marginalize,
    tensor,
)
from .entropy import (
    conditional_entropy,
    conditional_mutual_information,
    mutual_information,
    relative_entropy,
    shannon_entropy,
)
from .monotones import (
    canonical_decomposition,
    eve_average,
    eve_min,
    five_vector,
    grouped_s2,
    m_lambda,
    s_n,
    t_n,
    venn,
    yield_bound,
)
from .locc import Protocol, ProtocolStep, builtin_protocols, ensemble_monotone, run_protocol

__version__ = "0.1.0"
