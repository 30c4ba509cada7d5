"""Random target states and the universality of the variance decay.

Targets drawn as random superpositions of number states (Haar column,
rejection-sampled so the per-mode energy lands within a window around
E_t) show the same polynomial variance decay as the structured Gaussian
and Fock targets, with the tail setting in once E exceeds a few E_t.
"""

import numpy as np

import ecdsim as ec
from ecdsim import EnsembleSpec, sample_random_target, substream

### Draw a random one-mode target with energy close to E_t = 2.

rng = substream(11)
target = sample_random_target(M=1, E_t=2.0, epsilon=0.1, rng=rng)
print("cutoff:", target.cutoff)
print("energy per mode:", ec.target_energy_per_mode(target))
print("|coeffs|^2:", np.round(np.abs(target.coeffs) ** 2, 4))

### Variance curve at L=4 over a grid up to 20 E_t: tail slope near -1.

Es = np.logspace(np.log10(4.0), np.log10(40.0), 6)
vs = []
for e in Es:
    est = ec.mc_gradient_variance(EnsembleSpec(1, 4, float(e)), target,
                                  N=2000, seed=5)
    vs.append(est.variance)
    print(f"  E={e:5.1f}: var {est.variance:.3e} +/- {est.se_variance:.1e}")
slope = np.polyfit(np.log(Es[2:]), np.log(vs[2:]), 1)[0]
print("tail slope:", slope)

### A target's Fock expansion serializes to JSON, so a sampled target
# can be pinned in an experiment config and reloaded exactly.

exp = ec.fock_expand(target, target.cutoff)
back = ec.FockExpansion.from_json(exp.to_json())
print("round trip exact:", np.array_equal(back.coeffs, exp.coeffs))
