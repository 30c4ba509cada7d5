"""Truncated Fock backend and its agreement with the exact branches.

The Fock backend represents the qubit-qumode state as a pair of
coefficient arrays over number states up to a cutoff. Displacements are
applied as dense truncated matrices built from the tridiagonal
eigendecomposition of the generator, which stays accurate far past the
point where the textbook column recurrence blows up. The backend keeps
a running account of the probability that leaks past the cutoff.
"""

import numpy as np

import ecdsim as ec
from ecdsim import EnsembleSpec, substream

### The displacement matrix is a truncated unitary: columns lose norm
# only through genuine truncation, never through roundoff.

D = ec.displacement_matrix(1.5 - 0.5j, 120).entries
col_norms = np.linalg.norm(D, axis=0)
print("column norms (first 5):", np.round(col_norms[:5], 12))
print("worst column norm overflow:", float(col_norms.max() - 1.0))

### Vacuum column equals the coherent state expansion.

alpha = 1.5 - 0.5j
n = np.arange(121)
coherent = np.exp(-abs(alpha) ** 2 / 2) * alpha ** n / np.sqrt(
    np.cumprod(np.concatenate(([1.0], n[1:]))))
print("coherent column deviation:", np.abs(D[:, 0] - coherent).max())

### Run the same circuit on both backends.

rng = substream(7)
spec = EnsembleSpec(M=1, L=4, E=2.0)
params = ec.sample_circuit(spec, rng)
target = ec.fock_expand(ec.coherent_target(0.5), 80)

exact = ec.cost_branch(ec.run_circuit(params), target)
state = ec.run_circuit_fock(params, 80)
print("truncation leak:", state.leak)
print("|cost_branch - cost_fock|:", abs(exact - ec.cost_fock(state, target)))

### The default cutoff heuristic grows with the circuit energy; the
# backend raises AccuracyError if the leak exceeds the requested bound
# and CapacityError if the arrays would not fit the memory budget.

for E in (1.0, 5.0, 25.0):
    print("E =", E, "-> default cutoff", ec.default_cutoff(E))
