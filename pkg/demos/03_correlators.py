"""Ensemble correlators: closed forms against Monte Carlo.

Three ensemble averages control the gradient variance: C1, the mean
squared overlap with the target under a random displacement of energy
E; C2, the same with the energy split between two displacement stages;
and C3, a three-stage version. For Gaussian targets all three have
closed forms; for Fock targets C1 is exact and C2 is sandwiched between
two closed forms. Monte Carlo estimates (with bootstrap standard
errors) work for any target.
"""

import numpy as np

import ecdsim as ec
from ecdsim import (FockTarget, MultiModeGaussianTarget, OneModeGaussianParams,
                    OneModeGaussianTarget, TmsvTarget, coherent_target,
                    vacuum_target)

### Vacuum target: C1 = 1/(1+2E) exactly.

for E in (1.0, 10.0, 100.0):
    print("vacuum C1 at E =", E, ":", ec.c1_closed(vacuum_target(), E))

### A displaced squeezed target, closed form vs Monte Carlo.

dsv = OneModeGaussianTarget(OneModeGaussianParams(2.0, 0.0, np.arcsinh(2.0)))
for E in (5.0, 50.0):
    closed = ec.c1_closed(dsv, E)
    est = ec.mc_correlator("c1", dsv, E, N=50_000, seed=1)
    print(f"DSV C1 at E={E}: closed {closed:.5e} "
          f"mc {est.value:.5e} +/- {est.std_error:.1e}")

### C2 with an energy split z: for the vacuum it factorizes into
# 1/((1+2zE)(1+2(1-z)E)).

print("vacuum C2(z=0.3, E=7):", ec.c2_closed(vacuum_target(), 7.0, 0.3))

### Fock targets: C1 uses a terminating hypergeometric factor eta(n);
# C2 lies between an eta-lower and eta-upper closed form.

n = 3
lo = ec.c2_fock_full(n, 20.0, 0.5, "lower")
hi = ec.c2_fock_full(n, 20.0, 0.5, "upper")
est = ec.mc_correlator("c2", FockTarget(n), 20.0, z=0.5, N=200_000, seed=2)
print(f"Fock n={n} C2 sandwich: {lo:.4e} <= {est.value:.4e} <= {hi:.4e}")
print("eta(0..3):", [ec.hyp2f1_eta(k) for k in range(4)])

### Two-mode squeezed vacuum: the specialized closed forms agree with
# the generic multi-mode Gaussian path to near machine precision.

zeta = 0.8
special = TmsvTarget(zeta)
generic = MultiModeGaussianTarget(ec.tmsv(zeta))
print("TMSV C1 special:", ec.c1_closed(special, 10.0))
print("TMSV C1 generic:", ec.c1_closed(generic, 10.0))

### C3 decays like 1/E^3 at large E for any fixed splits.

Es = np.logspace(2, 3, 5)
c3 = [ec.c3_closed_gaussian(coherent_target(1.0), float(e), 1 / 3, 1 / 3)
      for e in Es]
slope = np.polyfit(np.log(Es), np.log(c3), 1)[0]
print("coherent C3 log-log slope over [1e2, 1e3]:", slope)
