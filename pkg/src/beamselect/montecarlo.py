"""Monte Carlo estimation of beamforming-gain statistics.

Validates the closed-form mean and variance by direct simulation: draw each
agent's total phase Phi_i ~ N(0, gamma_i) and evaluate the gain per sample as

    G = (sum_i cos Phi_i)^2 + (sum_i sin Phi_i)^2,

the O(|S|) expansion of the double cosine sum.  Phases are used unwrapped:
the gain depends on them only through cosines of differences, which are
2 pi-periodic, so wrapping changes nothing about the distribution of G.

Sampling is chunked, one substream per (seed, chunk, agent) keyed through
SeedSequence on top of the counter-based Philox generator, so results are a
pure function of (seed, agent, sample index) and independent of how chunks
would be scheduled across workers.  Chunk statistics are combined with
pairwise central-moment merging (Pebay 2008) up to the fourth moment, which
yields a standard error for the sample variance as well as for the mean.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .gain_model import as_gamma_vector, as_index_set, expected_gain, gain_variance

CHUNK = 1 << 16


@dataclass(frozen=True)
class McReport:
    sample_mean: float
    sample_variance: float
    samples: int
    mean_stderr: float
    variance_stderr: float


def _check_seed(seed) -> int:
    if not isinstance(seed, (int, np.integer)) or isinstance(seed, bool) or seed < 0:
        raise InputError(f"seed must be a nonnegative integer, got {seed!r}")
    return int(seed)


def _substream(seed: int, chunk_index: int, agent_index: int) -> np.random.Generator:
    seq = np.random.SeedSequence((seed, chunk_index, agent_index))
    return np.random.Generator(np.random.Philox(seq))


def sample_total_phase(gamma: float, rng: np.random.Generator) -> float:
    """One draw of an agent's total phase, N(0, gamma); exactly 0 at gamma = 0."""
    gamma = float(gamma)
    if not (math.isfinite(gamma) and gamma >= 0.0):
        raise InputError(f"gamma must be finite and nonnegative, got {gamma!r}")
    return float(rng.normal(0.0, math.sqrt(gamma)))


def gain_from_phases(phases: np.ndarray) -> np.ndarray:
    """Per-sample gain from a (n_agents, n_samples) array of total phases."""
    c = np.sum(np.cos(phases), axis=0)
    s = np.sum(np.sin(phases), axis=0)
    return c * c + s * s


def _merge_moments(a, b):
    # Pebay's pairwise update for (count, mean, M2, M3, M4)
    na, mua, m2a, m3a, m4a = a
    nb, mub, m2b, m3b, m4b = b
    if na == 0:
        return b
    n = na + nb
    d = mub - mua
    mu = mua + d * nb / n
    m2 = m2a + m2b + d ** 2 * na * nb / n
    m3 = (m3a + m3b + d ** 3 * na * nb * (na - nb) / n ** 2
          + 3.0 * d * (na * m2b - nb * m2a) / n)
    m4 = (m4a + m4b + d ** 4 * na * nb * (na * na - na * nb + nb * nb) / n ** 3
          + 6.0 * d ** 2 * (na * na * m2b + nb * nb * m2a) / n ** 2
          + 4.0 * d * (na * m3b - nb * m3a) / n)
    return (n, mu, m2, m3, m4)


def _chunk_moments(values: np.ndarray):
    n = values.size
    mu = float(np.mean(values))
    d = values - mu
    d2 = d * d
    return (n, mu, float(np.sum(d2)), float(np.sum(d2 * d)), float(np.sum(d2 * d2)))


def simulate_gain(gammas, s, samples: int, seed) -> McReport:
    """Sample the gain of subset s and report mean/variance with standard errors.

    The variance standard error comes from the asymptotic variance of the
    sample variance, (m4 - m2^2 (n-3)/(n-1)) / n with central moments m2, m4.
    Requires at least 100 samples and a nonempty subset.
    """
    g = as_gamma_vector(gammas)
    idx = as_index_set(s, g.size)
    if len(idx) < 1:
        raise InputError("subset must contain at least one agent")
    samples = int(samples)
    if samples < 100:
        raise InputError(f"need at least 100 samples, got {samples}")
    seed = _check_seed(seed)
    sigmas = np.sqrt(g[np.asarray(idx) - 1])
    state = (0, 0.0, 0.0, 0.0, 0.0)
    for chunk_index, start in enumerate(range(0, samples, CHUNK)):
        m = min(CHUNK, samples - start)
        phases = np.empty((len(idx), m))
        for row, agent in enumerate(idx):
            rng = _substream(seed, chunk_index, agent)
            phases[row] = rng.normal(0.0, sigmas[row], size=m)
        state = _merge_moments(state, _chunk_moments(gain_from_phases(phases)))
    n, mu, m2, _, m4 = state
    sample_variance = m2 / (n - 1)
    mean_stderr = math.sqrt(sample_variance / n)
    m2c = m2 / n
    m4c = m4 / n
    var_of_var = max(m4c - m2c * m2c * (n - 3) / (n - 1), 0.0) / n
    return McReport(
        sample_mean=mu,
        sample_variance=sample_variance,
        samples=n,
        mean_stderr=mean_stderr,
        variance_stderr=math.sqrt(var_of_var),
    )


def validate_closed_forms(gammas, s, samples: int, seed, z: float = 4.0):
    """Check the closed forms against simulation at z standard errors.

    Returns (passed, report): passed is True iff both the sample mean and the
    Bessel-corrected sample variance fall within z standard errors of
    expected_gain and gain_variance.  Zero-variance cases (all gammas zero)
    pass trivially since every sample hits the closed form exactly.
    """
    z = float(z)
    if not (math.isfinite(z) and z > 0.0):
        raise InputError(f"z must be positive and finite, got {z!r}")
    report = simulate_gain(gammas, s, samples, seed)
    mean_ok = abs(report.sample_mean - expected_gain(gammas, s)) <= z * report.mean_stderr
    var_ok = abs(report.sample_variance - gain_variance(gammas, s)) <= z * report.variance_stderr
    return mean_ok and var_ok, report
