"""Max-plus models of acyclic fork-join queueing networks.

Service cycles evolve as ``x(k) = A(k) ⊗ x(k-1)`` over the (max, +) semiring.
For i.i.d. service times the mean cycle time γ = lim ‖x(k)‖/k is bracketed by
the largest mean service time and the mean of the per-cycle maximum.
"""
from .maxplus import (
    EPS,
    MaxPlusMatrix,
    diag,
    identity,
    mat_oplus,
    mat_otimes,
    mat_power,
    norm,
    null,
    oplus,
    otimes,
)
from .network import Topology, fig1, longest_path_length, standard_adjacency, tandem
from .dynamics import direct_recursion, lemma5_bounds, mean_cycle_estimate, run, step, transition_matrix
from .stochastic import (
    DEFAULT_SEED,
    BoundsReport,
    Deterministic,
    IndependentExponential,
    LinearMixture,
    ScaledErlang,
    estimate_gamma,
    gumbel_hartley_bound,
    lower_bound,
    upper_bound,
)

__version__ = "0.1.0"
