"""
Beamforming gain statistics under phase error
=============================================

How the mean and variance of the coherent power gain respond to the
per-agent phase-error spreads gamma_i, and what the wrapped normal
phase-error density looks like as the spread grows.
"""

import numpy as np

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from beamselect import (
    AgentGeometry,
    Scenario,
    effective_error,
    expected_gain,
    gain_variance,
    wrapped_normal_pdf,
)

# Six agents, error spreads from near-perfect to badly localized.
gammas = np.array([0.02, 0.1, 0.4, 1.0, 3.0, 8.0])

print("prefix  E[G]      Var[G]")
for k in range(1, len(gammas) + 1):
    prefix = tuple(range(1, k + 1))
    print(f"{k:6d}  {expected_gain(gammas, prefix):8.4f}"
          f"  {gain_variance(gammas, prefix):10.4f}")

# A perfectly phased K-agent array would reach E = K^2; phase error pulls the
# mean towards K (incoherent power) and opens up variance as gamma grows.
perfect = len(gammas) ** 2
actual = expected_gain(gammas, range(1, len(gammas) + 1))
print(f"\nperfect coherence would give {perfect}, phase error leaves {actual:.4f}")

# The same gammas arise from localization geometry: an agent whose position
# is known up to a Gaussian with covariance sigma produces a wrapped normal
# phase error whose spread is the radial component of sigma.
scenario = Scenario(
    client=(100.0, 0.0, 0.0),
    wavelength=1.0,
    agents=[AgentGeometry(mu=(0.0, 0.0, 0.0), sigma=0.01 * np.eye(3))],
)
stats = effective_error(scenario, 1)
print(f"10 cm isotropic position error at 100 m: gamma = {stats.gamma:.6f}")

# Wrapped normal densities over one period for growing spread: the density
# starts as a sharp spike at zero and flattens towards uniform 1/(2 pi).
ys = np.linspace(0.0, 2.0 * np.pi, 512, endpoint=False)
fig, ax = plt.subplots(figsize=(6.0, 3.6))
for gamma in (0.05, 0.5, 2.0, 8.0):
    pdf = [wrapped_normal_pdf(y, gamma) for y in ys]
    ax.plot(ys, pdf, label=f"gamma = {gamma:g}")
ax.axhline(1.0 / (2.0 * np.pi), color="0.6", ls=":", label="uniform limit")
ax.set_xlabel("phase error (rad)")
ax.set_ylabel("density")
ax.set_xlim(0.0, 2.0 * np.pi)
ax.legend(frameon=False)
fig.tight_layout()
fig.savefig("wrapped_normal_densities.svg")
print("wrote wrapped_normal_densities.svg")
