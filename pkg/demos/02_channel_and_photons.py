"""Physical-layer building blocks: fiber loss, redundancy and photon counts.

Walks the closed forms the protocol engines are built from: the attenuation
power law, burst/redundancy survival boosts, Poisson pulse statistics and
the beamsplitter-leakage analysis for multi-photon pulses.
"""

import numpy as np

from qkdsim import (burst_survival, multi_photon_prob, pns_mutual_information,
                    poisson_pmf, poisson_second_order, redundant_bsm_success,
                    transmission_probability)

print("fiber survival 10^(-alpha L / 10):")
for L in (0, 10, 25, 50, 100):
    p_fiber = transmission_probability(L, 0.15)
    p_switch = transmission_probability(L, 0.4)
    print(f"  L={L:3d} km   fiber {p_fiber:.4f}   switch-grade {p_switch:.6f}")

print("\nsurvival of at least one of b photons at p=0.355 per photon:")
for b in (1, 10, 100, 10_000, 1_000_000):
    print(f"  b={b:<8d} -> {burst_survival(0.355, b):.6f}")

print("\nredundant Bell-state attempts, raw B=0.85:")
for r in (1, 2, 5):
    print(f"  r={r} -> {redundant_bsm_success(0.85, r):.7f}")

print("\nPoisson pulse statistics at mu=0.65 (signal intensity):")
for n in range(4):
    print(f"  P(n={n}) = {poisson_pmf(n, 0.65):.5f}")

print("\nsecond-order expansions vs exact pmf at mu=0.2:")
for n in (0, 1, 2):
    print(f"  n={n}: expansion {poisson_second_order(n, 0.2):.4f}"
          f"  exact {poisson_pmf(n, 0.2):.4f}")

print("\nmulti-photon tail P(n>=2) at mu=0.2:")
print(f"  quadratic form {multi_photon_prob(0.2):.5f}"
      f"  exact {multi_photon_prob(0.2, exact=True):.5f}")

print("\nbeamsplitter leakage I(A,E) = mu*lam*(1-lam)/2, mu=0.65:")
for lam in np.linspace(0.0, 1.0, 5):
    print(f"  lam={lam:.2f} -> {pns_mutual_information(0.65, lam):.5f}")
print(f"  peak mu/8 = {0.65 / 8:.5f} at an even split")
