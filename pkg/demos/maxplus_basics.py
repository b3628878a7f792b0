"""
Max-plus matrices and the fork-join state equation
==================================================

A walk through the algebra on the five-node fork-join network: adjacency,
nilpotency, and one step of the state equation checked against the plain
event recursion.
"""

import numpy as np

from forkjoin_bounds import maxplus as mp
from forkjoin_bounds.dynamics import direct_recursion, step, transition_matrix
from forkjoin_bounds.network import fig1, longest_path_length, standard_adjacency

# Nodes 1 and 2 feed the network. Node 1 forks into 3 and 4, node 4 joins
# the output of 1 and 2, and node 5 joins 3 and 4.
t = fig1()
g = standard_adjacency(t)
print("edges:", t.edges)
print(g)

# Powers of G count paths: entry (i, j) of G^q is 0 when a q-edge path
# i -> j exists. The longest path has p = 2 edges, so G^3 is all ε.
p = longest_path_length(t)
for q in range(1, p + 2):
    print(f"G^{q} null? {mp.mat_power(g, q).is_null()}")

# Transition matrix for one cycle of service times.
tau = np.array([1.0, 2.0, 0.5, 1.5, 1.0])
a = transition_matrix(tau, g, p)
print("A(1) =")
print(a)

# Starting from x(0) = 0, the state equation and the event-by-event
# recursion agree.
x0 = np.zeros(t.n)
print("state equation :", step(x0, a))
print("event recursion:", direct_recursion(x0, tau, t))
