"""Tests for the modular bound, exact minimizer, SSP, and the DS selector."""

import itertools

import numpy as np
import pytest

from beamselect import (
    ConvergenceError,
    DSConfig,
    InfeasibleError,
    InputError,
    Instance,
    ModularFunction,
    SSPConfig,
    SizeError,
    ValidationError,
    brute_force_oracle,
    difference_of_submodular,
    gain_variance,
    expected_gain,
    generate_instance,
    minimize_submodular_exact,
    modular_lower_bound,
    ssp,
)

FOUR_AGENTS = (0.4, 0.6, 3.0, 5.0)


def _neg_variance(gammas):
    def g(subset):
        return -gain_variance(gammas, tuple(sorted(subset)))

    return g


def _neg_expected(gammas):
    def f(subset):
        return -expected_gain(gammas, tuple(sorted(subset)))

    return f


def _subsets(n):
    for size in range(n + 1):
        for combo in itertools.combinations(range(1, n + 1), size):
            yield frozenset(combo)


class TestModularFunction:
    def test_evaluates_offset_plus_weights(self):
        h = ModularFunction(offset=1.5, weights=(1.0, -2.0, 0.5))
        assert h(frozenset()) == 1.5
        assert h(frozenset({1, 3})) == pytest.approx(3.0)
        assert h(frozenset({2})) == pytest.approx(-0.5)
        assert h.n == 3


class TestModularLowerBound:
    def test_exact_for_modular_functions(self):
        weights = (0.7, -1.2, 2.0)
        g = ModularFunction(offset=0.3, weights=weights)
        bound = modular_lower_bound(g, frozenset({2}), [2, 1, 3])
        for subset in _subsets(3):
            assert bound(subset) == pytest.approx(g(subset), rel=1e-12, abs=1e-12)

    def test_tight_on_every_chain_prefix(self):
        g = _neg_variance(FOUR_AGENTS)
        perm = [2, 3, 1, 4]
        bound = modular_lower_bound(g, frozenset({2, 3}), perm)
        for k in range(len(perm) + 1):
            prefix = frozenset(perm[:k])
            assert bound(prefix) == pytest.approx(g(prefix), rel=1e-12, abs=1e-12)

    def test_lower_bounds_negative_variance_everywhere(self):
        g = _neg_variance((0.4, 0.6, 3.0))
        bound = modular_lower_bound(g, frozenset({1}), [1, 2, 3])
        for subset in _subsets(3):
            assert bound(subset) <= g(subset) + 1e-12

    def test_permutation_must_cover_ground_set(self):
        g = _neg_variance(FOUR_AGENTS)
        with pytest.raises(InputError):
            modular_lower_bound(g, frozenset(), [1, 2, 2, 4])

    def test_anchor_must_come_first(self):
        g = _neg_variance(FOUR_AGENTS)
        with pytest.raises(InputError):
            modular_lower_bound(g, frozenset({3}), [1, 2, 3, 4])

    def test_anchor_must_be_inside_ground_set(self):
        g = _neg_variance(FOUR_AGENTS)
        with pytest.raises(InputError):
            modular_lower_bound(g, frozenset({9}), [1, 2, 3, 4])


class TestExactMinimizer:
    def test_modular_argmin(self):
        h = ModularFunction(offset=0.0, weights=(-1.0, 2.0, -3.0))
        assert minimize_submodular_exact(h, 3) == frozenset({1, 3})

    def test_cardinality_tie_breaks_small(self):
        def f(subset):
            k = len(subset)
            return float(k * k - 3 * k)  # -2 at both k = 1 and k = 2

        assert minimize_submodular_exact(f, 4) == frozenset({1})

    def test_constant_function_returns_empty_set(self):
        assert minimize_submodular_exact(lambda s: 7.0, 5) == frozenset()

    def test_lexicographic_tie_break(self):
        def f(subset):
            return 0.0 if len(subset) == 2 else 1.0

        assert minimize_submodular_exact(f, 4) == frozenset({1, 2})

    def test_size_cap(self):
        with pytest.raises(SizeError):
            minimize_submodular_exact(lambda s: 0.0, 21)


class TestSSP:
    def test_modular_g_solves_globally(self):
        # h reproduces a modular g exactly, so one SSP step is the global min
        gammas = (0.5, 1.0, 2.0, 4.0)
        f = _neg_expected(gammas)
        g = ModularFunction(offset=0.0, weights=(0.2, -0.4, 1.0, -0.3))
        result = ssp(f, g, 4)
        expected = minimize_submodular_exact(
            lambda s: f(s) - g(s), 4
        )
        assert result == expected

    def test_objective_never_increases(self):
        gammas = (0.4, 0.6, 3.0, 5.0, 1.5)
        trace = []
        ssp(
            lambda s: 3.0 * _neg_expected(gammas)(s),
            _neg_variance(gammas),
            5,
            SSPConfig(restarts=3),
            trace=trace,
        )
        by_restart = {}
        for entry in trace:
            by_restart.setdefault(entry.restart, []).append(entry.objective)
        assert by_restart
        for objectives in by_restart.values():
            for earlier, later in zip(objectives, objectives[1:]):
                assert later <= earlier + 1e-12

    def test_heavy_pull_selects_everything(self):
        gammas = (0.4, 0.6, 3.0, 5.0)
        result = ssp(
            lambda s: 1e6 * _neg_expected(gammas)(s),
            _neg_variance(gammas),
            4,
        )
        assert result == frozenset({1, 2, 3, 4})

    def test_deterministic_across_runs(self):
        gammas = (2.0, 0.3, 5.0, 1.0, 0.8)
        config = SSPConfig(restarts=4, permutation_seed=7)
        args = (
            lambda s: 2.0 * _neg_expected(gammas)(s),
            _neg_variance(gammas),
            5,
        )
        assert ssp(*args, config) == ssp(*args, config)

    def test_trace_entries_are_selfconsistent(self):
        gammas = (0.4, 0.6, 3.0, 5.0)
        f = lambda s: 2.0 * _neg_expected(gammas)(s)
        g = _neg_variance(gammas)
        trace = []
        ssp(f, g, 4, trace=trace)
        assert trace
        for entry in trace:
            # each bound is tight at its anchor, and the recorded candidate is
            # reproducibly the exact minimizer of the relaxed objective
            assert entry.bound(entry.anchor) == pytest.approx(
                g(entry.anchor), rel=1e-12, abs=1e-12
            )
            assert entry.candidate == minimize_submodular_exact(
                lambda w: f(w) - entry.bound(w), 4
            )

    def test_config_validation(self):
        with pytest.raises(ValidationError):
            SSPConfig(max_iterations=0)
        with pytest.raises(ValidationError):
            SSPConfig(improvement_tol=0.0)
        with pytest.raises(ValidationError):
            SSPConfig(restarts=0)


class TestDifferenceOfSubmodular:
    def test_worked_instance(self):
        instance = Instance(gammas=FOUR_AGENTS, threshold=3.3)
        result = difference_of_submodular(instance)
        assert result.subset == (1, 2, 3)
        assert result.stats.mean >= 3.3
        assert result.algorithm == "ds"
        assert result.diagnostics.iterations == 3
        assert result.diagnostics.final_lambda == pytest.approx(4.0)
        oracle = brute_force_oracle(instance)
        assert result.stats.variance >= oracle.stats.variance - 1e-9

    def test_nonpositive_threshold_needs_no_relaxation(self):
        result = difference_of_submodular(Instance(gammas=FOUR_AGENTS, threshold=0.0))
        assert result.subset == ()
        assert result.diagnostics.iterations == 0
        assert result.diagnostics.final_lambda is None

    def test_zero_error_full_demand(self):
        instance = Instance(gammas=(0.0, 0.0, 0.0), threshold=9.0)
        result = difference_of_submodular(instance)
        assert result.subset == (1, 2, 3)

    def test_infeasible_raises(self):
        with pytest.raises(InfeasibleError):
            difference_of_submodular(Instance(gammas=FOUR_AGENTS, threshold=7.0))

    def test_size_cap(self):
        with pytest.raises(SizeError):
            difference_of_submodular(Instance(gammas=np.ones(21), threshold=1.0))

    def test_max_outer_cap_raises(self):
        instance = Instance(gammas=FOUR_AGENTS, threshold=6.0)
        config = DSConfig(lambda0=1e-9, alpha=1.0000001, max_outer=3)
        with pytest.raises(ConvergenceError):
            difference_of_submodular(instance, config)

    def test_warm_and_cold_starts_both_feasible(self):
        rng = np.random.default_rng(31)
        for _ in range(20):
            n = int(rng.integers(2, 9))
            instance = generate_instance(
                n, 20.0, float(rng.uniform(0.3, 1.0)), int(rng.integers(1 << 31))
            )
            for warm in (True, False):
                result = difference_of_submodular(
                    instance, DSConfig(warm_start=warm)
                )
                assert result.stats.mean >= instance.threshold

    def test_trace_collects_one_list_per_round(self):
        instance = Instance(gammas=FOUR_AGENTS, threshold=3.3)
        trace = []
        result = difference_of_submodular(instance, trace=trace)
        assert len(trace) == result.diagnostics.iterations
        for call in trace:
            assert call, "every relaxation round runs at least one SSP iteration"
            for earlier, later in zip(call, call[1:]):
                assert later.objective <= earlier.objective + 1e-12

    def test_deterministic(self):
        instance = Instance(gammas=(3.0, 0.2, 8.0, 1.1, 0.6), threshold=3.1)
        first = difference_of_submodular(instance)
        second = difference_of_submodular(instance)
        assert first.subset == second.subset
        assert first.diagnostics == second.diagnostics

    def test_config_validation(self):
        with pytest.raises(ValidationError):
            DSConfig(lambda0=0.0)
        with pytest.raises(ValidationError):
            DSConfig(alpha=1.0)
        with pytest.raises(ValidationError):
            DSConfig(max_outer=0)
