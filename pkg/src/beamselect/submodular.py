"""Difference-of-submodular selection via the submodular-supermodular procedure.

Both closed-form gain statistics are supermodular in the subset, so their
negations -E and -Var are submodular and the constrained selection problem
relaxes to a sequence of unconstrained differences

    minimize over S:  Var(S) - lambda_k E(S)  =  f_k(S) - g(S)

with f_k = -lambda_k E and g = -Var, lambda escalating geometrically until the
local minimizer meets the threshold.  Each difference is attacked with the
submodular-supermodular procedure (SSP) of Narasimhan and Bilmes (UAI 2005):
replace g by a permutation-chain modular lower bound that is tight on the
current iterate, minimize the resulting difference exactly, and repeat; the
true objective never increases.  The inner minimization here is exhaustive
(ground sets of at most 20 elements), which makes every SSP step exact rather
than approximate.

Set functions are plain callables frozenset[int] -> float over the 1-based
ground set [N]; they must be pure and deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from .errors import ConvergenceError, InfeasibleError, InputError, SizeError, ValidationError
from .gain_model import expected_gain, gain_stats
from .selection import (
    MAX_ORACLE_AGENTS,
    Diagnostics,
    Instance,
    SelectionResult,
    check_feasible,
    gain_tables,
)

SetFunction = Callable[[frozenset], float]


@dataclass(frozen=True)
class ModularFunction:
    """value(W) = offset + sum of per-element weights; weights[i-1] belongs to
    element i of the ground set [n].  Callable, so it is itself a SetFunction."""

    offset: float
    weights: tuple

    def __call__(self, subset: Iterable[int]) -> float:
        return self.offset + sum(self.weights[i - 1] for i in subset)

    @property
    def n(self) -> int:
        return len(self.weights)


@dataclass(frozen=True)
class SSPConfig:
    max_iterations: int = 100
    improvement_tol: float = 1e-10
    permutation_seed: int = 0
    restarts: int = 1

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValidationError("max_iterations must be >= 1")
        if not self.improvement_tol > 0.0:
            raise ValidationError("improvement_tol must be > 0")
        if self.restarts < 1:
            raise ValidationError("restarts must be >= 1")


@dataclass(frozen=True)
class DSConfig:
    lambda0: float = 1.0
    alpha: float = 2.0
    max_outer: int = 64
    ssp: SSPConfig = field(default_factory=SSPConfig)
    warm_start: bool = True

    def __post_init__(self):
        if not self.lambda0 > 0.0:
            raise ValidationError("lambda0 must be > 0")
        if not self.alpha > 1.0:
            raise ValidationError("alpha must be > 1")
        if self.max_outer < 1:
            raise ValidationError("max_outer must be >= 1")


@dataclass(frozen=True)
class SSPTrace:
    """One SSP iteration, for inspection in tests and diagnostics.

    objective is the true objective of the iterate held after the acceptance
    decision, so within one restart the recorded objectives are nonincreasing.
    """

    restart: int
    iteration: int
    anchor: frozenset
    bound: ModularFunction
    candidate: frozenset
    objective: float
    accepted: bool


def modular_lower_bound(g: SetFunction, anchor, permutation) -> ModularFunction:
    """Permutation-chain modular lower bound of a submodular g, tight on anchor.

    With chain prefixes P_0 = {} and P_k = first k elements of the
    permutation, the element at position k gets weight g(P_k) - g(P_{k-1})
    and the offset is g({}).  Telescoping makes the bound exact on every
    prefix, in particular on the anchor, and submodularity of g makes it a
    global lower bound.  The permutation must cover the ground set and place
    every anchor element before every non-anchor element.
    """
    perm = [int(e) for e in permutation]
    n = len(perm)
    if sorted(perm) != list(range(1, n + 1)):
        raise InputError(f"permutation must order the ground set [1..n], got {perm!r}")
    anchor_set = frozenset(int(e) for e in anchor)
    if not anchor_set <= set(perm):
        raise InputError("anchor contains elements outside the ground set")
    if set(perm[: len(anchor_set)]) != anchor_set:
        raise InputError("permutation must place all anchor elements first")
    offset = float(g(frozenset()))
    weights = [0.0] * n
    prev = offset
    prefix: list = []
    for element in perm:
        prefix.append(element)
        cur = float(g(frozenset(prefix)))
        weights[element - 1] = cur - prev
        prev = cur
    return ModularFunction(offset=offset, weights=tuple(weights))


def _tie_key(mask: int, n: int):
    return (int(mask).bit_count(), tuple(i + 1 for i in range(n) if (mask >> i) & 1))


def minimize_submodular_exact(func: SetFunction, n: int) -> frozenset:
    """Exact argmin of a set function over all 2^n subsets of [1..n].

    Ties break towards smaller cardinality, then the lexicographically
    smallest index tuple.  Exhaustive by design (the SSP inner step must be
    exact); n is capped at 20.
    """
    if n > MAX_ORACLE_AGENTS:
        raise SizeError(f"n = {n} exceeds the enumeration cap of {MAX_ORACLE_AGENTS}")
    if n < 0:
        raise InputError("n must be nonnegative")
    best_mask = 0
    best_val = float(func(frozenset()))
    for mask in range(1, 1 << n):
        val = float(func(frozenset(i + 1 for i in range(n) if (mask >> i) & 1)))
        if val < best_val:
            best_val, best_mask = val, mask
        elif val == best_val and _tie_key(mask, n) < _tie_key(best_mask, n):
            best_mask = mask
    return frozenset(i + 1 for i in range(n) if (best_mask >> i) & 1)


def _ssp_permutation(current: frozenset, n: int, order_key, rng) -> list:
    inside = sorted(current)
    outside = [i for i in range(1, n + 1) if i not in current]
    if order_key is not None:
        outside.sort(key=lambda i: (order_key(i), i))
    if rng is not None:
        # random restarts reshuffle within each block; the anchor stays first
        inside = [inside[j] for j in rng.permutation(len(inside))]
        outside = [outside[j] for j in rng.permutation(len(outside))]
    return inside + outside


def ssp(
    f: SetFunction,
    g: SetFunction,
    n: int,
    config: SSPConfig | None = None,
    *,
    start: Iterable[int] = (),
    order_key=None,
    trace: list | None = None,
) -> frozenset:
    """Locally minimize f(S) - g(S) for submodular f and g.

    Each iteration anchors a modular lower bound h of g at the current set and
    minimizes f - h exactly; since h <= g with equality at the anchor, the true
    objective is nonincreasing.  Iteration stops when the improvement drops
    below config.improvement_tol or max_iterations is hit.  The first restart
    orders non-anchor elements by order_key (ascending index when None);
    further restarts reshuffle permutations from permutation_seed.  Returns the
    best set over restarts (lowest objective, then smallest cardinality, then
    lexicographic).  Appends an SSPTrace per accepted iteration to trace.
    """
    config = config or SSPConfig()
    best = None
    for restart in range(config.restarts):
        rng = None
        if restart > 0:
            rng = np.random.default_rng(
                np.random.SeedSequence((config.permutation_seed, restart))
            )
        current = frozenset(int(e) for e in start)
        objective = float(f(current)) - float(g(current))
        for iteration in range(config.max_iterations):
            anchor = current
            perm = _ssp_permutation(anchor, n, order_key, rng)
            bound = modular_lower_bound(g, anchor, perm)
            candidate = minimize_submodular_exact(lambda w: float(f(w)) - bound(w), n)
            cand_objective = float(f(candidate)) - float(g(candidate))
            improvement = objective - cand_objective
            # the bound's tightness at the anchor guarantees cand_objective <=
            # objective up to rounding; never accept a (dust-)worse iterate
            accepted = cand_objective <= objective
            if accepted:
                current, objective = candidate, cand_objective
            if trace is not None:
                trace.append(SSPTrace(restart, iteration, anchor, bound,
                                      candidate, objective, accepted))
            if improvement < config.improvement_tol:
                break
        key = (objective, len(current), tuple(sorted(current)))
        if best is None or key < best:
            best = key
    return frozenset(best[2])


def difference_of_submodular(
    instance: Instance,
    config: DSConfig | None = None,
    *,
    trace: list | None = None,
) -> SelectionResult:
    """Threshold selection by escalating difference-of-submodular relaxations.

    Starting from S = {} and lambda = lambda0, repeatedly solve the SSP
    relaxation min Var(S) - lambda E(S) and multiply lambda by alpha, until
    the iterate meets the threshold.  Expected gain strictly grows with
    lambda's pull towards larger sets, so feasible instances terminate; the
    max_outer cap turns a non-terminating configuration into an explicit
    error.  When trace is a list, the per-call SSP traces are appended to it
    (one list per outer round).
    """
    config = config or DSConfig()
    n = instance.n
    if n > MAX_ORACLE_AGENTS:
        raise SizeError(f"{n} agents exceeds the enumeration cap of {MAX_ORACLE_AGENTS}")
    if not check_feasible(instance):
        raise InfeasibleError(
            f"threshold {instance.threshold:.6g} exceeds the maximum expected gain"
        )
    g_vec = instance.gammas
    tables = gain_tables(g_vec)

    def mask_of(subset: frozenset) -> int:
        m = 0
        for i in subset:
            m |= 1 << (i - 1)
        return m

    def neg_expected(subset: frozenset) -> float:
        return -float(tables.expected[mask_of(subset)])

    def neg_variance(subset: frozenset) -> float:
        return -float(tables.variance[mask_of(subset)])

    def order_key(i: int) -> float:
        return float(g_vec[i - 1])

    current: frozenset = frozenset()
    lam = config.lambda0
    final_lambda = None
    outer = 0
    while expected_gain(g_vec, current) < instance.threshold:
        if outer >= config.max_outer:
            raise ConvergenceError(
                f"no feasible iterate after {config.max_outer} relaxation rounds "
                f"(lambda reached {lam:.3g})"
            )

        def f_k(subset: frozenset, lam_k=lam) -> float:
            return lam_k * neg_expected(subset)

        call_trace: list | None = None
        if trace is not None:
            call_trace = []
            trace.append(call_trace)
        current = ssp(
            f_k,
            neg_variance,
            n,
            config.ssp,
            start=current if config.warm_start else frozenset(),
            order_key=order_key,
            trace=call_trace,
        )
        final_lambda = lam
        lam *= config.alpha
        outer += 1
    subset = tuple(sorted(current))
    return SelectionResult(
        subset=subset,
        stats=gain_stats(g_vec, subset),
        algorithm="ds",
        diagnostics=Diagnostics(iterations=outer, final_lambda=final_lambda),
        instance=instance,
    )
