"""Statistical model of distributed beamforming gain under Gaussian position error.

N single-antenna agents cooperatively beamform towards a client at a known
position.  Agent i's own position estimate is Gaussian, r_i ~ N(mu_i, Sigma_i),
which makes its carrier phase at the client uncertain.  After each agent applies
the mean-cancelling phase correction, its residual total phase Phi_i is a
zero-mean wrapped normal variable whose unwrapped variance

    gamma_i = (4 pi^2 / (||r_c||^2 lambda^2)) <r_c, Sigma_i r_c>

is the *effective error*: the position covariance projected on the client
direction, in squared radians.  The received beamforming gain of a subset S is

    G(S) = sum_{i in S} sum_{j in S} cos(Phi_i - Phi_j),

and because the trigonometric moments of a wrapped normal equal those of the
underlying Gaussian (E[cos p Phi] = exp(-p^2 gamma / 2)), the mean and variance
of G have closed forms in v_i = exp(-gamma_i):

    E[G(S)]   = |S| + sum_{i != j} sqrt(v_i v_j)
    Var[G(S)] = sum_{i != j} (1 - v_i v_j)^2
                + 2 sum_{i != j != k} (1 - v_i)^2 sqrt(v_j v_k)

This module houses the geometry-to-gamma reduction, the wrapped normal pdf, and
the two closed forms, which everything else in the package builds on.  All
functions are pure; agent indices are 1-based throughout the public API.

References
----------
Mardia, K. V. and Jupp, P. E., Directional Statistics, Wiley, 2000 (wrapped
normal distribution and its trigonometric moments).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import (
    DegenerateDistributionError,
    GeometryError,
    InputError,
    ModelError,
    SizeError,
    ValidationError,
)

# Subsets are representable as 64-bit masks; everything downstream relies on it.
MAX_AGENTS = 64

_TWO_PI = 2.0 * math.pi


class PhaseStats(NamedTuple):
    """Per-agent phase statistics: unwrapped mean rho and effective error gamma."""

    rho: float
    gamma: float


class GainStats(NamedTuple):
    """Closed-form mean and variance of the beamforming gain of one subset."""

    mean: float
    variance: float


def _as_vec3(x, name: str) -> np.ndarray:
    arr = np.array(x, dtype=float).reshape(-1)
    if arr.size != 3 or not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} must be a finite 3-vector, got {x!r}")
    arr.flags.writeable = False
    return arr


def _as_cov3(x, name: str) -> np.ndarray:
    arr = np.array(x, dtype=float)
    if arr.shape != (3, 3) or not np.all(np.isfinite(arr)):
        raise ModelError(f"{name} must be a finite 3x3 matrix")
    scale = float(np.max(np.abs(arr)))
    asym = float(np.max(np.abs(arr - arr.T)))
    if asym > 1e-9 * max(scale, 1e-300):
        raise ModelError(f"{name} is not symmetric (relative asymmetry {asym / scale:.3e})")
    sym = 0.5 * (arr + arr.T)
    eigmin = float(np.linalg.eigvalsh(sym).min())
    if eigmin < -1e-12 * max(float(np.trace(sym)), 0.0):
        raise ModelError(f"{name} is not positive semidefinite (min eigenvalue {eigmin:.3e})")
    sym.flags.writeable = False
    return sym


@dataclass(frozen=True, eq=False)
class AgentGeometry:
    """One agent: mean position mu [m], position covariance sigma [m^2], and an
    optional known channel phase eta [rad] (normalized into [0, 2 pi)).

    eta cancels exactly in the mean-correcting phase adjustment, so it never
    enters the reduced (gamma, Gamma) problem; it is carried for completeness
    rather than silently dropped.
    """

    mu: np.ndarray
    sigma: np.ndarray
    eta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "mu", _as_vec3(self.mu, "mu"))
        object.__setattr__(self, "sigma", _as_cov3(self.sigma, "sigma"))
        eta = float(self.eta)
        if not math.isfinite(eta):
            raise ValidationError("eta must be finite")
        object.__setattr__(self, "eta", eta % _TWO_PI)


@dataclass(frozen=True, eq=False)
class Scenario:
    """Geometric problem description: client position, carrier wavelength [m],
    and an ordered sequence of agents (1-based indexing in the API)."""

    client: np.ndarray
    wavelength: float
    agents: tuple

    def __post_init__(self):
        object.__setattr__(self, "client", _as_vec3(self.client, "client"))
        if float(np.linalg.norm(self.client)) == 0.0:
            raise GeometryError("client position must have nonzero norm")
        wl = float(self.wavelength)
        if not (math.isfinite(wl) and wl > 0.0):
            raise ValidationError(f"wavelength must be positive and finite, got {self.wavelength!r}")
        object.__setattr__(self, "wavelength", wl)
        agents = tuple(self.agents)
        if len(agents) == 0:
            raise ValidationError("scenario needs at least one agent")
        if len(agents) > MAX_AGENTS:
            raise SizeError(f"{len(agents)} agents exceeds the cap of {MAX_AGENTS}")
        if not all(isinstance(a, AgentGeometry) for a in agents):
            raise ValidationError("agents must be AgentGeometry values")
        object.__setattr__(self, "agents", agents)

    @property
    def n(self) -> int:
        return len(self.agents)


def as_gamma_vector(gammas) -> np.ndarray:
    """Validate and return a read-only float64 vector of effective errors.

    Raises ValidationError for non-finite or negative entries, SizeError for
    more than 64 agents.
    """
    arr = np.array(gammas, dtype=float).reshape(-1)
    if arr.size == 0:
        raise ValidationError("gamma vector must not be empty")
    if arr.size > MAX_AGENTS:
        raise SizeError(f"{arr.size} agents exceeds the cap of {MAX_AGENTS}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("gamma entries must be finite")
    if np.any(arr < 0.0):
        raise ValidationError("gamma entries must be nonnegative")
    arr.flags.writeable = False
    return arr


def as_index_set(s: Iterable[int], n: int) -> tuple:
    """Validate a subset of 1-based agent indices; returns it sorted ascending."""
    idx = list(s)
    out = []
    for i in idx:
        ii = int(i)
        if ii != i:
            raise InputError(f"agent index {i!r} is not an integer")
        if not 1 <= ii <= n:
            raise InputError(f"agent index {ii} outside [1, {n}]")
        out.append(ii)
    if len(set(out)) != len(out):
        raise InputError(f"duplicate agent indices in {idx!r}")
    return tuple(sorted(out))


def effective_error(scenario: Scenario, agent_index: int) -> PhaseStats:
    """Reduce one agent's geometry to its phase statistics (rho, gamma).

    Parameters
    ----------
    scenario : Scenario
        Validated scene.
    agent_index : int
        1-based agent index.

    Returns
    -------
    PhaseStats
        rho = -(2 pi / lambda) <mu, rhat_c>, the mean unwrapped phase offset,
        and gamma = (4 pi^2 / (||r_c||^2 lambda^2)) <r_c, Sigma r_c>, the
        effective error in squared radians (nonnegative by PSD of Sigma).
    """
    if not 1 <= int(agent_index) <= scenario.n:
        raise InputError(f"agent index {agent_index} outside [1, {scenario.n}]")
    agent = scenario.agents[int(agent_index) - 1]
    rc = scenario.client
    norm = float(np.linalg.norm(rc))
    lam = scenario.wavelength
    rho = -(_TWO_PI / lam) * float(np.dot(agent.mu, rc)) / norm
    quad = float(rc @ agent.sigma @ rc)
    gamma = 4.0 * math.pi ** 2 / (norm ** 2 * lam ** 2) * quad
    # PSD guarantees quad >= 0 mathematically; clamp rounding dust.
    return PhaseStats(rho=rho, gamma=max(gamma, 0.0))


def wrapped_normal_pdf(y: float, gamma: float, tail_tol: float = 1e-6) -> float:
    """Density at y of a zero-mean wrapped normal with unwrapped variance gamma.

    The wrapped density is the lattice sum

        f(y) = (2 pi gamma)^(-1/2) sum_m exp(-(y + 2 pi m)^2 / (2 gamma)),

    truncated to |m| <= M with M chosen from the Gaussian tail bound so the
    omitted mass is below tail_tol.

    Parameters
    ----------
    y : float
        Evaluation point in [0, 2 pi).
    gamma : float
        Unwrapped variance, > 0.  gamma = 0 is a point mass and has no density.
    tail_tol : float, optional
        Truncation tolerance, 0 < tail_tol <= 1e-6.

    Returns
    -------
    float
        The truncated density value.
    """
    y = float(y)
    if not (math.isfinite(y) and 0.0 <= y < _TWO_PI):
        raise InputError(f"y must lie in [0, 2 pi), got {y!r}")
    gamma = float(gamma)
    if not math.isfinite(gamma) or gamma < 0.0:
        raise InputError(f"gamma must be finite and nonnegative, got {gamma!r}")
    if gamma == 0.0:
        raise DegenerateDistributionError("gamma = 0 is a point mass; pdf undefined")
    if not (0.0 < float(tail_tol) <= 1e-6):
        raise InputError(f"tail_tol must lie in (0, 1e-6], got {tail_tol!r}")
    root = math.sqrt(_TWO_PI * gamma)
    # exp(-x^2 / (2 gamma)) <= tail_tol * root / 2 at the cut, so the tail of
    # the lattice sum stays below tail_tol; the log argument dips under 1 only
    # for huge gamma where a single extra term is already negligible.
    inner = max(math.log(2.0 / (tail_tol * root)), 0.0)
    m_max = math.ceil(math.sqrt(2.0 * gamma * inner) / _TWO_PI) + 1
    offsets = y + _TWO_PI * np.arange(-m_max, m_max + 1)
    return float(np.sum(np.exp(-(offsets ** 2) / (2.0 * gamma))) / root)


def expected_gain(gammas, s) -> float:
    """Closed-form expected beamforming gain of subset s.

    With v_i = exp(-gamma_i), E[G(S)] = |S| + sum_{i != j in S} sqrt(v_i v_j),
    evaluated in O(|S|) as |S| + (sum sqrt(v_i))^2 - sum v_i.  The empty set
    has expected gain 0 by convention (the selection loops start from it).
    """
    g = as_gamma_vector(gammas)
    idx = as_index_set(s, g.size)
    if not idx:
        return 0.0
    a = np.exp(-0.5 * g[np.asarray(idx) - 1])
    # evaluate the cross term first so singletons come out exactly 1.0
    cross = np.sum(a) ** 2 - np.sum(a * a)
    return float(len(idx) + cross)


def gain_variance(gammas, s) -> float:
    """Closed-form variance of the beamforming gain of subset s.

    Var[G(S)] = sum_{i != j} (1 - v_i v_j)^2
                + 2 sum_{i != j != k} (1 - v_i)^2 sqrt(v_j v_k)

    with v_i = exp(-gamma_i).  The pair term is evaluated directly in O(|S|^2);
    the triple term collapses to O(|S|) via the partial sums over S \\ {i} of
    sqrt(v_j) and v_j.  Subsets with at most one agent have zero variance.
    """
    g = as_gamma_vector(gammas)
    idx = as_index_set(s, g.size)
    k = len(idx)
    if k <= 1:
        return 0.0
    a = np.exp(-0.5 * g[np.asarray(idx) - 1])
    v = a * a
    pair = float(np.sum((1.0 - np.outer(v, v)) ** 2) - np.sum((1.0 - v * v) ** 2))
    sa = float(np.sum(a))
    sv = float(np.sum(v))
    # cross_i = sum over ordered pairs j != k drawn from S \ {i}; nonnegative
    # by Cauchy-Schwarz, so clamp the rounding dust.
    cross = np.maximum((sa - a) ** 2 - (sv - v), 0.0)
    triple = float(np.sum((1.0 - v) ** 2 * cross))
    return pair + 2.0 * triple


def gain_stats(gammas, s) -> GainStats:
    """Bundle (expected_gain, gain_variance) for one subset."""
    return GainStats(mean=expected_gain(gammas, s), variance=gain_variance(gammas, s))


def max_expected_gain(gammas) -> float:
    """Largest achievable expected gain: the full set's, by superset monotonicity."""
    g = as_gamma_vector(gammas)
    return expected_gain(g, range(1, g.size + 1))


def summation_identity_residual(x: Sequence[float]) -> float:
    """Residual |LHS - RHS| of the fourth-moment summation identity.

    For any reals x_1..x_n,

        (sum_{i != j} x_i x_j)^2 = 2 sum_{i != j} x_i^2 x_j^2
                                   + 4 sum_{i != j != k} x_i^2 x_j x_k
                                   + sum_{i,j,k,l distinct} x_i x_j x_k x_l,

    the expansion behind the variance closed form's triple and quadruple terms.
    Both sides are evaluated by naive nested loops (hence the length cap); this
    exists purely as a numeric oracle for tests.
    """
    arr = np.array(x, dtype=float).reshape(-1)
    if not 1 <= arr.size <= 8:
        raise InputError(f"length must lie in [1, 8], got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise InputError("entries must be finite")
    vals = arr.tolist()
    n = len(vals)
    rng = range(n)
    lhs = sum(vals[i] * vals[j] for i in rng for j in rng if i != j) ** 2
    pair = 2.0 * sum(vals[i] ** 2 * vals[j] ** 2 for i in rng for j in rng if i != j)
    triple = 4.0 * sum(
        vals[i] ** 2 * vals[j] * vals[k]
        for i in rng for j in rng for k in rng
        if i != j and j != k and i != k
    )
    quad = sum(
        vals[i] * vals[j] * vals[k] * vals[l]
        for i in rng for j in rng for k in rng for l in rng
        if len({i, j, k, l}) == 4
    )
    return abs(lhs - (pair + triple + quad))
