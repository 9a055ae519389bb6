"""Subset selection: feasibility, two greedy algorithms, exhaustive oracle, SR.

The reduced problem is: given effective errors gamma_1..gamma_N and a threshold
Gamma, pick S minimizing Var[G(S)] subject to E[G(S)] >= Gamma.  Expected gain
is monotone in the subset, so feasibility of the full set settles feasibility
outright.  The algorithms:

* greedy        - add agents in ascending-gamma order until E >= Gamma.
* double-loop   - run the ascending pass and a descending pass, keep the
                  lower-variance of the two stopping sets.
* brute force   - enumerate all 2^N subsets (N <= 20) as the exact baseline.

The suboptimality ratio SR = Var(algorithm) / Var(oracle) is the quality
metric; feasible outputs always have SR >= 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import InfeasibleError, InputError, SizeError, ValidationError
from .gain_model import (
    GainStats,
    as_gamma_vector,
    as_index_set,
    expected_gain,
    gain_stats,
    max_expected_gain,
)

# Exhaustive enumeration allocates 2^N-entry tables.
MAX_ORACLE_AGENTS = 20

# Largest effective error for which the ascending greedy pass is provably
# variance-optimal (small-error regime); used by tests and demos.
SMALL_ERROR_GAMMA_MAX = 0.83

# Subsets whose tabulated expected gain sits within this relative slack of the
# threshold count as feasible for the oracle.  The tables and the scalar
# expected_gain path round differently by ~1 ulp; without slack a beta = 1
# instance (Gamma equal to the full set's gain) can flip infeasible on dust.
_FEASIBILITY_SLACK = 1e-9

_ZERO_VAR = 1e-15  # variances at or below this count as exactly zero for SR


@dataclass(frozen=True, eq=False)
class Instance:
    """A reduced problem: effective errors plus the expected-gain threshold."""

    gammas: np.ndarray
    threshold: float

    def __post_init__(self):
        object.__setattr__(self, "gammas", as_gamma_vector(self.gammas))
        thr = float(self.threshold)
        if not math.isfinite(thr):
            raise ValidationError(f"threshold must be finite, got {self.threshold!r}")
        object.__setattr__(self, "threshold", thr)

    @property
    def n(self) -> int:
        return int(self.gammas.size)


@dataclass(frozen=True)
class Diagnostics:
    """Algorithm-specific run facts.

    iterations counts greedy insertions, double-loop insertions over both
    passes, enumerated subsets for the oracle, or outer relaxation rounds for
    the difference-of-submodular solver.  final_lambda is the last relaxation
    weight (difference-of-submodular only); branch records which pass the
    double-loop algorithm returned ("s1" or "s2").
    """

    iterations: int = 0
    final_lambda: float | None = None
    branch: str | None = None


@dataclass(frozen=True, eq=False)
class SelectionResult:
    subset: tuple
    stats: GainStats
    algorithm: str
    diagnostics: Diagnostics = field(default_factory=Diagnostics)
    instance: Instance | None = None


class GainTables(NamedTuple):
    """Per-mask closed-form tables over all 2^N subsets (bit i = agent i+1)."""

    expected: np.ndarray
    variance: np.ndarray
    sizes: np.ndarray


def _subset_sums(values: np.ndarray) -> np.ndarray:
    """out[mask] = sum of values[i] over the set bits of mask, by doubling."""
    out = np.zeros(1)
    for x in values:
        out = np.concatenate([out, out + x])
    return out


def gain_tables(gammas) -> GainTables:
    """Tabulate expected gain and gain variance for every subset at once.

    Both closed forms reduce to power sums of a_i = exp(-gamma_i / 2) and of
    the weights w_i = (1 - a_i^2)^2, and subset sums of per-agent values for
    all 2^N masks come out of a doubling recurrence in O(N 2^N).  With
    A_p[m] = sum of a_i^p and W_p[m] = sum of w_i a_i^p over the mask:

        E[m]    = K + A1^2 - A2
        pair[m] = K (K - 1) - 2 (A2^2 - A4) + (A4^2 - A8)
        trip[m] = 2 [ (A1^2 - A2) W0 - 2 A1 W1 + 2 W2 ]

    where K is the mask's popcount.  Variance entries for masks with K <= 1
    are pinned to exactly 0 and rounding dust is clamped at 0, matching the
    scalar path's conventions.
    """
    g = as_gamma_vector(gammas)
    if g.size > MAX_ORACLE_AGENTS:
        raise SizeError(f"{g.size} agents exceeds the enumeration cap of {MAX_ORACLE_AGENTS}")
    a = np.exp(-0.5 * g)
    v = a * a
    w = (1.0 - v) ** 2
    a1 = _subset_sums(a)
    a2 = _subset_sums(v)
    a4 = _subset_sums(v * v)
    a8 = _subset_sums(v * v * v * v)
    w0 = _subset_sums(w)
    w1 = _subset_sums(w * a)
    w2 = _subset_sums(w * v)
    sizes = _subset_sums(np.ones(g.size))
    cross = a1 * a1 - a2
    exp_table = sizes + cross
    pair = sizes * (sizes - 1.0) - 2.0 * (a2 * a2 - a4) + (a4 * a4 - a8)
    trip = 2.0 * (cross * w0 - 2.0 * a1 * w1 + 2.0 * w2)
    var_table = np.maximum(pair + trip, 0.0)
    var_table[sizes <= 1.0] = 0.0
    return GainTables(expected=exp_table, variance=var_table, sizes=sizes.astype(np.int64))


def _mask_indices(mask: int, n: int) -> tuple:
    return tuple(i + 1 for i in range(n) if (mask >> i) & 1)


def _ascending_order(g: np.ndarray) -> list:
    # ties on gamma break by ascending agent index for determinism
    return sorted(range(1, g.size + 1), key=lambda i: (g[i - 1], i))


def check_feasible(instance: Instance) -> bool:
    """True iff some subset reaches the threshold, i.e. the full set does."""
    return max_expected_gain(instance.gammas) >= instance.threshold


def _require_feasible(instance: Instance):
    if not check_feasible(instance):
        raise InfeasibleError(
            f"threshold {instance.threshold:.6g} exceeds the maximum expected "
            f"gain {max_expected_gain(instance.gammas):.6g}"
        )


def greedy(instance: Instance) -> SelectionResult:
    """Ascending-gamma insertion until the expected gain reaches the threshold.

    Returns the empty set when Gamma <= 0.  In the small-error regime (all
    gamma_i <= SMALL_ERROR_GAMMA_MAX) and whenever the two lowest-error agents
    already satisfy the threshold, the result is variance-optimal.
    """
    _require_feasible(instance)
    g = instance.gammas
    order = _ascending_order(g)
    chosen: list = []
    while expected_gain(g, chosen) < instance.threshold:
        chosen.append(order[len(chosen)])
    subset = tuple(sorted(chosen))
    return SelectionResult(
        subset=subset,
        stats=gain_stats(g, subset),
        algorithm="greedy",
        diagnostics=Diagnostics(iterations=len(chosen)),
        instance=instance,
    )


def double_loop_greedy(instance: Instance) -> SelectionResult:
    """Ascending and descending insertion passes; keep the lower-variance set.

    The descending pass counters the failure mode of pure ascending greedy:
    mixing one low-error agent with high-error ones inflates the variance via
    the (1 - v_i v_j)^2 pair terms.  S1 is returned only on strictly smaller
    variance, so ties go to the descending set S2.  The result's variance
    never exceeds plain greedy's (S1 is exactly greedy's set).
    """
    _require_feasible(instance)
    g = instance.gammas
    order = _ascending_order(g)
    s1: list = []
    while expected_gain(g, s1) < instance.threshold:
        s1.append(order[len(s1)])
    rev = order[::-1]
    s2: list = []
    while expected_gain(g, s2) < instance.threshold:
        s2.append(rev[len(s2)])
    var1 = gain_stats(g, s1).variance
    var2 = gain_stats(g, s2).variance
    branch = "s1" if var1 < var2 else "s2"
    subset = tuple(sorted(s1 if branch == "s1" else s2))
    return SelectionResult(
        subset=subset,
        stats=gain_stats(g, subset),
        algorithm="dlg",
        diagnostics=Diagnostics(iterations=len(s1) + len(s2), branch=branch),
        instance=instance,
    )


def brute_force_oracle(instance: Instance) -> SelectionResult:
    """Exact minimizer over all 2^N subsets meeting the threshold.

    Ties on variance break towards smaller cardinality, then the
    lexicographically smallest index tuple.  N is capped at 20.
    """
    n = instance.n
    if n > MAX_ORACLE_AGENTS:
        raise SizeError(f"{n} agents exceeds the enumeration cap of {MAX_ORACLE_AGENTS}")
    _require_feasible(instance)
    tables = gain_tables(instance.gammas)
    thr = instance.threshold
    feasible = tables.expected >= thr - _FEASIBILITY_SLACK * max(1.0, abs(thr))
    vmin = float(tables.variance[feasible].min())
    cand = np.flatnonzero(feasible & (tables.variance == vmin))
    kmin = int(tables.sizes[cand].min())
    cand = cand[tables.sizes[cand] == kmin]
    subset = min(_mask_indices(int(m), n) for m in cand)
    return SelectionResult(
        subset=subset,
        stats=gain_stats(instance.gammas, subset),
        algorithm="oracle",
        diagnostics=Diagnostics(iterations=1 << n),
        instance=instance,
    )


def suboptimality_ratio(candidate: SelectionResult, oracle: SelectionResult) -> float:
    """Var(candidate) / Var(oracle); 1.0 when both are (numerically) zero.

    Returns math.inf when the oracle variance is zero but the candidate's is
    not, the only way the ratio is undefined.  Both results must describe the
    same instance.
    """
    if candidate.instance is None or oracle.instance is None:
        raise InputError("results must carry their instance to be compared")
    same = (
        np.array_equal(candidate.instance.gammas, oracle.instance.gammas)
        and candidate.instance.threshold == oracle.instance.threshold
    )
    if not same:
        raise InputError("results come from different instances")
    vc = candidate.stats.variance
    vo = oracle.stats.variance
    if vo <= _ZERO_VAR:
        return 1.0 if vc <= _ZERO_VAR else math.inf
    return vc / vo
