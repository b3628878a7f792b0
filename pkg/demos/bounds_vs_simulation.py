"""
Bounds on the mean cycle time
=============================

For a service model, the mean cycle time γ sits between the largest mean
service time and the mean of the largest service time in a cycle. Here we
compute both for the fork-join network, then simulate to see where γ falls.
"""

from forkjoin_bounds import (
    IndependentExponential,
    LinearMixture,
    estimate_gamma,
    gumbel_hartley_bound,
    lower_bound,
    upper_bound,
)
from forkjoin_bounds.dynamics import run
from forkjoin_bounds.network import fig1
from forkjoin_bounds.stochastic import draw, make_streams

t = fig1()

# Independent unit exponentials: the upper bound is the harmonic number H_5.
model = IndependentExponential((1, 1, 1, 1, 1))
ub = upper_bound(model)
print(f"lower {lower_bound(model):.6f}  upper {ub.value:.6f} ({ub.method})")
print(f"Gumbel-Hartley, moments only: {gumbel_hartley_bound(1, 1, 5):.6f}")

# The simulated estimate lands much closer to the lower bound.
rep = estimate_gamma(model, t, k=20_000, seed=1)
print(f"gamma_hat {rep.gamma_hat:.4f} +/- {rep.stderr:.4f}")

# Per-cycle envelopes bracket the completion time of every cycle.
samples = draw(model, make_streams(1, t.n), 1000)
traj = run(t, samples)
for c in (1, 10, 100, 1000):
    print(f"cycle {c:5d}: {traj.lower_env[c - 1]:9.3f} <= {traj.norms[c - 1]:9.3f} <= {traj.upper_env[c - 1]:9.3f}")

# Mixing the service times (a smaller) makes them more alike, and the two
# bounds close in until they coincide at a = 1/5.
for a in ("1", "1/2", "1/3", "1/4", "1/5"):
    m = LinearMixture.symmetric(a)
    print(f"a = {a:>3}: [{lower_bound(m):.6f}, {upper_bound(m).value:.6f}]")
