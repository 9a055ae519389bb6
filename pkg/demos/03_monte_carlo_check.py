"""
Monte Carlo agreement with the closed forms
===========================================

Simulate the beamforming gain directly -- draw wrapped normal phase errors,
sum the phasors, square the magnitude -- and compare the sample moments
against the closed-form mean and variance, including a deliberately broken
control that must fail the check.
"""

from beamselect import (
    expected_gain,
    gain_variance,
    simulate_gain,
    validate_closed_forms,
)

gammas = (0.4, 0.6, 3.0, 5.0)
samples = 500_000

for subset in [(1, 2), (1, 2, 3), (2, 3, 4), (1, 2, 3, 4)]:
    passed, report = validate_closed_forms(gammas, subset, samples, seed=42)
    e = expected_gain(gammas, subset)
    v = gain_variance(gammas, subset)
    z_mean = abs(report.sample_mean - e) / report.mean_stderr
    z_var = abs(report.sample_variance - v) / report.variance_stderr
    print(f"{str(subset):12s}  mean {report.sample_mean:8.4f} vs {e:8.4f}"
          f" (z = {z_mean:4.2f})   var {report.sample_variance:8.4f}"
          f" vs {v:8.4f} (z = {z_var:4.2f})   {'PASS' if passed else 'FAIL'}")

# Negative control: compare the same samples against a closed form whose
# gammas are all shifted by +0.05.  The mean moves by more than four
# standard errors at this sample size, so the check must reject it.
subset = (2, 3, 4)
report = simulate_gain(gammas, subset, samples, seed=42)
shifted = tuple(g + 0.05 for g in gammas)
z = abs(report.sample_mean - expected_gain(shifted, subset)) / report.mean_stderr
print(f"\nshifted-gamma control: z = {z:.1f} ({'rejected' if z > 4 else 'MISSED'})")

# Determinism: the generator is counter-based and keyed per (seed, sample,
# agent), so the same seed reproduces the same moments bit for bit.
again = simulate_gain(gammas, subset, samples, seed=42)
print(f"same seed, same mean: {report.sample_mean == again.sample_mean}")
