"""Network dynamics ``x(k) = A(k) ⊗ x(k-1)`` with ``A(k) = (E ⊕ T_k ⊗ Gᵀ)^{⊗p} ⊗ T_k``.

``T_k = diag(τ_1k, ..., τ_nk)`` holds the k-th service times and ``x_i(k)``
is the k-th departure epoch from node i, starting from ``x(0) = 0``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .maxplus import EPS, MaxPlusMatrix, diag, identity, mat_otimes, mat_power, mp_matmul, mp_matvec
from .network import Topology, longest_path_length, standard_adjacency

__all__ = [
    "check_service",
    "transition_matrix",
    "transition_matrices",
    "step",
    "direct_recursion",
    "Trajectory",
    "run",
    "lemma5_bounds",
    "mean_cycle_estimate",
]


def check_service(tau, n: int | None = None) -> np.ndarray:
    """Validate one cycle of service times and return it as a float array."""
    tau = np.asarray(tau, dtype=float)
    if tau.ndim != 1:
        raise ValueError("service sample must be a 1-d sequence")
    if n is not None and tau.size != n:
        raise ValueError(f"service sample has {tau.size} entries, network has {n} nodes")
    if not np.all(np.isfinite(tau)):
        raise ValueError("service times must be finite")
    if np.any(tau < 0):
        raise ValueError("service times must be nonnegative")
    return tau


def _check_samples(samples, n: int) -> np.ndarray:
    s = np.asarray(samples, dtype=float)
    if s.ndim != 2 or s.shape[1] != n:
        raise ValueError(f"samples must have shape (k, {n}), got {s.shape}")
    if not np.all(np.isfinite(s)) or np.any(s < 0):
        raise ValueError("service times must be finite and nonnegative")
    return s


def transition_matrix(tau: Sequence[float], g: MaxPlusMatrix, p: int) -> MaxPlusMatrix:
    """Build ``A = (E ⊕ T ⊗ Gᵀ)^{⊗p} ⊗ T`` for one cycle of service times."""
    if g.rows != g.cols:
        raise ValueError("adjacency matrix must be square")
    tau = check_service(tau, g.rows)
    t = diag(tau)
    m = identity(g.rows) | mat_otimes(t, g.T)
    return mat_otimes(mat_power(m, p), t)


def transition_matrices(samples: np.ndarray, g: MaxPlusMatrix, p: int) -> np.ndarray:
    """Batched ``A(k)`` for every row of ``samples``; returns shape ``(k, n, n)``.

    ``T ⊗ Gᵀ`` has the graph of Gᵀ, so its powers beyond p vanish and
    ``(E ⊕ T ⊗ Gᵀ)^{⊗q}`` is constant for ``q >= p``. Squaring until the
    exponent reaches p therefore gives the p-th power.
    """
    n = g.rows
    s = _check_samples(samples, n)
    gt = g.entries.T
    m = s[:, :, None] + gt[None, :, :]
    idx = np.arange(n)
    m[:, idx, idx] = np.maximum(m[:, idx, idx], 0.0)
    reach = 1
    while reach < p:
        m = mp_matmul(m, m)
        reach *= 2
    if p == 0:
        m = np.broadcast_to(identity(n).entries, m.shape)
    return m + s[:, None, :]


def step(x_prev, a) -> np.ndarray:
    """One application of the state equation: ``a ⊗ x_prev``."""
    a = a.entries if isinstance(a, MaxPlusMatrix) else np.asarray(a, dtype=float)
    x_prev = np.asarray(x_prev, dtype=float)
    if a.ndim != 2 or x_prev.ndim != 1 or a.shape[1] != x_prev.size:
        raise ValueError(f"dimension mismatch: {a.shape} ⊗ {x_prev.shape}")
    return mp_matvec(a, x_prev)


def direct_recursion(x_prev, tau, t: Topology) -> np.ndarray:
    """Event-level recursion, node by node in topological order.

    Node i starts its k-th service once its (k-1)-th is done and one
    customer has arrived from each predecessor, so
    ``x_i(k) = τ_ik + max(x_i(k-1), max_{j -> i} x_j(k))``.
    """
    x_prev = np.asarray(x_prev, dtype=float)
    tau = check_service(tau, t.n)
    if x_prev.shape != (t.n,):
        raise ValueError(f"state has shape {x_prev.shape}, network has {t.n} nodes")
    preds = {v: t.predecessors(v) for v in range(1, t.n + 1)}
    x = np.full(t.n, EPS)
    for v in t.topological_order():
        start = x_prev[v - 1]
        for j in preds[v]:
            start = max(start, x[j - 1])
        x[v - 1] = tau[v - 1] + start
    return x


@dataclass
class Trajectory:
    """Result of simulating k service cycles.

    ``norms[c]`` is ``‖x(c+1)‖`` and ``lower_env``/``upper_env`` are the
    per-cycle algebraic bounds on it. ``states`` holds ``x(0..k)`` when the
    run was asked to keep them, else None.
    """

    norms: np.ndarray
    lower_env: np.ndarray
    upper_env: np.ndarray
    x_final: np.ndarray
    p: int
    states: np.ndarray | None = None

    @property
    def k(self) -> int:
        return len(self.norms)

    def brackets(self) -> bool:
        return bool(np.all(self.lower_env <= self.norms) and np.all(self.norms <= self.upper_env))


def _chunk_size(n: int) -> int:
    return max(1, min(8192, 2**22 // n**3))


def run(t: Topology, samples, k: int | None = None, record_states: bool = False) -> Trajectory:
    """Iterate the state equation from ``x(0) = 0`` for k cycles.

    ``samples`` is an array-like of shape ``(>= k, n)`` whose row c holds the
    service times of cycle c+1. Only norms and envelopes are kept unless
    ``record_states`` is set.
    """
    s = _check_samples(samples, t.n)
    if k is None:
        k = s.shape[0]
    if k < 1:
        raise ValueError("need at least one cycle")
    if s.shape[0] < k:
        raise ValueError(f"sample underrun: {s.shape[0]} cycles supplied, {k} requested")
    s = s[:k]
    g = standard_adjacency(t)
    p = longest_path_length(t)

    norms = np.empty(k)
    states = np.empty((k + 1, t.n)) if record_states else None
    x = np.zeros(t.n)
    if states is not None:
        states[0] = x
    chunk = _chunk_size(t.n)
    for lo in range(0, k, chunk):
        mats = transition_matrices(s[lo:lo + chunk], g, p)
        for c, a in enumerate(mats, start=lo):
            x = (a + x).max(axis=1)
            norms[c] = x.max()
            if states is not None:
                states[c + 1] = x

    lower, upper = _envelopes(s, p)
    return Trajectory(norms, lower, upper, x, p, states)


def _envelopes(s: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    # sequential cumsum adds in the same order as the recursion, so the lower
    # envelope never exceeds the simulated norm by a rounding error
    lower = np.cumsum(s, axis=0).max(axis=1)
    tmax = s.max(axis=1)
    upper = np.cumsum(tmax) + p * np.maximum.accumulate(tmax)
    return lower, upper


def lemma5_bounds(samples, p: int, k: int | None = None) -> tuple[float, float]:
    """Algebraic bounds on ``‖A(k) ⊗ ... ⊗ A(1)‖`` from the first k cycles.

    lower is ``max_i Σ_c τ_ic``; upper is ``Σ_c max_i τ_ic + p · max_c max_i τ_ic``.
    """
    s = np.asarray(samples, dtype=float)
    if s.ndim != 2:
        raise ValueError("samples must be 2-d (cycles x nodes)")
    if k is None:
        k = s.shape[0]
    if k < 1 or k > s.shape[0]:
        raise ValueError(f"k={k} outside 1..{s.shape[0]}")
    lower, upper = _envelopes(s[:k], p)
    return float(lower[-1]), float(upper[-1])


def mean_cycle_estimate(traj: Trajectory) -> float:
    """``‖x(k)‖ / k`` at the last recorded cycle."""
    if traj.k < 1:
        raise ValueError("empty trajectory")
    return float(traj.norms[-1] / traj.k)
