"""Gradient variance over the energy-regularized ensemble.

The variance of the cost gradient (parameter-shift derivative in a
middle rotation angle) decays polynomially in the circuit energy E:
like 1/E in shallow circuits and like 1/E^2 deep in the circuit, until
the crossover energy E_c(L) beyond which the deep advantage saturates.
Closed-form upper and lower bounds sandwich the Monte Carlo estimate.
"""

import numpy as np

import ecdsim as ec
from ecdsim import EnsembleSpec, OneModeGaussianParams, OneModeGaussianTarget

target = OneModeGaussianTarget(OneModeGaussianParams(2.0, 0.0, np.arcsinh(2.0)))

### Shallow circuits (L=4): Monte Carlo variance vs the closed-form
# prediction (1/6)(3/4)^{ML} C1 and the bound sandwich.

print("L=4 shallow regime")
for E in (50.0, 200.0, 800.0):
    spec = EnsembleSpec(1, 4, E)
    est = ec.mc_gradient_variance(spec, target, N=4000, seed=0)
    b = ec.variance_bounds(1, 4, target, E)
    ref = ec.shallow_variance(1, 4, target, E)
    print(f"  E={E:6.0f}: mc {est.variance:.3e} +/- {est.se_variance:.1e}"
          f"  shallow {ref:.3e}  bounds [{b.lower:.3e}, {b.upper:.3e}]")

### The slope of variance vs E on a log-log grid is -1 in this regime.

Es = np.logspace(np.log10(50.0), np.log10(800.0), 6)
vs = [ec.shallow_variance(1, 4, target, float(e)) for e in Es]
print("closed-form shallow slope:", np.polyfit(np.log(Es), np.log(vs), 1)[0])

### Depth 1 with a vacuum target is exactly solvable:
# Var = 1/(8(1+2E)).

est = ec.mc_gradient_variance(EnsembleSpec(1, 1, 5.0), ec.vacuum_target(),
                              N=20_000, seed=3)
print("L=1 mc:", est.variance, "exact:", 1.0 / (8.0 * (1.0 + 2.0 * 5.0)))

### The crossover energy E_c(L) grows like (4/3)^L; below it, deeper
# circuits buy a steeper 1/E^2 decay. critical_depth inverts it.

for L in (4, 12, 20, 30):
    print(f"E_c({L}) =", ec.critical_energy(L, target))
print("depth needed for E_c = 1e4:", ec.critical_depth(1e4, target))

### Every Monte Carlo estimate also reports the gradient mean, which is
# zero over the ensemble; the bootstrap SE quantifies both.

print("gradient mean:", est.mean, "+/-", est.se_mean)
