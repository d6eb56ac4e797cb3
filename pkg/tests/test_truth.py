import random

import numpy as np
import pytest

from credsense.core import InvalidInputError, InvalidValueError
from credsense.truth import (
    Observation,
    TruthNotConverged,
    discover,
    kernel_backend,
    population_std,
)
from td_oracle import reference_discover


def make_instance(rng, n=None):
    n = n or rng.randint(2, 6)
    obs = [Observation(u, rng.uniform(0.0, 30.0)) for u in range(n)]
    reps = {u: rng.uniform(0.05, 0.95) for u in range(n)}
    return obs, reps


class TestPopulationStd:
    def test_two_points(self):
        assert population_std([10.0, 20.0]) == 5.0

    def test_constant(self):
        assert population_std([12.0, 12.0, 12.0]) == 0.0

    def test_wide_pair(self):
        assert population_std([2.0, 24.0]) == 11.0

    def test_too_short(self):
        with pytest.raises(InvalidInputError):
            population_std([1.0])


class TestDiscover:
    def test_symmetric_pair(self):
        result = discover(
            [Observation(0, 10.0), Observation(1, 20.0)], {0: 0.5, 1: 0.5}
        )
        assert result.truth == pytest.approx(15.0)
        assert result.contributions[0] == pytest.approx(0.5)
        assert result.contributions[1] == pytest.approx(0.5)
        assert result.converged

    def test_degenerate_all_equal(self):
        result = discover(
            [Observation(u, 12.0) for u in range(3)], {0: 0.9, 1: 0.2, 2: 0.5}
        )
        assert result.truth == 12.0
        assert result.iterations == 0
        assert result.converged
        for u in range(3):
            assert result.contributions[u] == pytest.approx(1 / 3)

    def test_outlier_downweighted(self):
        obs = [Observation(0, 10.0), Observation(1, 10.0), Observation(2, 22.0)]
        reps = {0: 0.9, 1: 0.9, 2: 0.3}
        # oracle run at tight tolerance pins the expected interval
        truth, contribs, _, conv = reference_discover(
            [o.value for o in obs], [reps[o.user] for o in obs], 1e-9, 1000
        )
        assert conv and 10.0 <= truth <= 11.0
        result = discover(obs, reps, epsilon=0.1)
        assert 10.0 <= result.truth <= 11.0
        assert result.contributions[2] == min(result.contributions.values())
        assert result.contributions[2] < result.contributions[0]

    def test_truth_within_observation_hull(self):
        rng = random.Random(0)
        for _ in range(200):
            obs, reps = make_instance(rng)
            result = discover(obs, reps, epsilon=1e-6, max_iterations=500)
            values = [o.value for o in obs]
            assert min(values) <= result.truth <= max(values)
            assert all(c >= 0.0 for c in result.contributions.values())
            assert sum(result.contributions.values()) == pytest.approx(1.0, abs=1e-9)

    def test_permutation_invariance(self):
        rng = random.Random(1)
        obs, reps = make_instance(rng, n=6)
        result = discover(obs, reps, epsilon=1e-9, max_iterations=1000)
        shuffled = obs[:]
        random.Random(2).shuffle(shuffled)
        result2 = discover(shuffled, reps, epsilon=1e-9, max_iterations=1000)
        assert result2.truth == pytest.approx(result.truth, abs=1e-12)
        for u in reps:
            assert result2.contributions[u] == pytest.approx(
                result.contributions[u], abs=1e-12
            )

    def test_equal_observations_ranked_by_reputation(self):
        obs = [Observation(0, 10.0), Observation(1, 10.0), Observation(2, 20.0)]
        reps = {0: 0.9, 1: 0.3, 2: 0.5}
        result = discover(obs, reps, epsilon=1e-9, max_iterations=1000)
        assert result.contributions[0] >= result.contributions[1]

    def test_closer_observation_contributes_more(self):
        obs = [Observation(0, 10.0), Observation(1, 11.0), Observation(2, 30.0)]
        reps = {0: 0.7, 1: 0.7, 2: 0.7}
        result = discover(obs, reps, epsilon=1e-9, max_iterations=1000)
        truth = result.truth
        d = {u: abs(o.value - truth) for u, o in zip((0, 1, 2), obs)}
        ranked = sorted((0, 1, 2), key=lambda u: d[u])
        assert result.contributions[ranked[0]] >= result.contributions[ranked[1]]
        assert result.contributions[ranked[1]] >= result.contributions[ranked[2]]

    def test_log_base_invariance(self):
        rng = random.Random(3)
        for _ in range(50):
            obs, reps = make_instance(rng)
            natural = discover(obs, reps, epsilon=1e-7, max_iterations=500)
            base10 = discover(obs, reps, epsilon=1e-7, max_iterations=500, log_base=10.0)
            assert base10.truth == pytest.approx(natural.truth, abs=1e-9)
            for u in reps:
                assert base10.contributions[u] == pytest.approx(
                    natural.contributions[u], abs=1e-9
                )

    def test_non_convergence_carries_last_iterate(self):
        obs = [Observation(0, 0.0), Observation(1, 7.0), Observation(2, 30.0)]
        reps = {0: 0.9, 1: 0.5, 2: 0.1}
        with pytest.raises(TruthNotConverged) as excinfo:
            discover(obs, reps, epsilon=1e-12, max_iterations=1)
        last = excinfo.value.result
        assert not last.converged
        assert last.iterations == 1
        assert 0.0 <= last.truth <= 30.0

    def test_input_validation(self):
        ob = [Observation(0, 1.0), Observation(1, 2.0)]
        with pytest.raises(InvalidInputError):
            discover([Observation(0, 1.0)], {0: 0.5})
        with pytest.raises(InvalidValueError):
            discover(ob, {0: 0.5, 1: 0.5}, epsilon=0.0)
        with pytest.raises(InvalidInputError):
            discover(ob, {0: 0.5})  # missing reputation
        with pytest.raises(InvalidInputError):
            discover([Observation(0, 1.0), Observation(0, 2.0)], {0: 0.5})
        with pytest.raises(InvalidValueError):
            discover([Observation(0, float("nan")), Observation(1, 2.0)], {0: 0.5, 1: 0.5})

    def test_uniform_init_policy(self):
        obs = [Observation(0, 10.0), Observation(1, 10.5), Observation(2, 11.0)]
        reps = {0: 0.8, 1: 0.8, 2: 0.8}
        mean_init = discover(obs, reps, epsilon=1e-9, max_iterations=1000)
        for seed in range(5):
            uniform_init = discover(
                obs, reps, epsilon=1e-9, max_iterations=1000,
                init="uniform", init_seed=seed,
            )
            assert uniform_init.truth == pytest.approx(mean_init.truth, abs=1e-6)
        with pytest.raises(InvalidInputError):
            discover(obs, reps, init="uniform")  # seed required
        with pytest.raises(InvalidInputError):
            discover(obs, reps, init="nope")


class TestOracleEquivalence:
    def test_matches_reference_iteration(self):
        rng = random.Random(7)
        checked = 0
        for _ in range(300):
            obs, reps = make_instance(rng)
            values = [o.value for o in obs]
            rlist = [reps[o.user] for o in obs]
            try:
                mine = discover(obs, reps, epsilon=1e-9, max_iterations=2000)
            except TruthNotConverged as exc:
                ref = reference_discover(values, rlist, 1e-9, 2000)
                assert not ref[3]
                continue
            truth, contribs, _, conv = reference_discover(values, rlist, 1e-9, 2000)
            assert conv
            assert mine.truth == pytest.approx(truth, abs=1e-6)
            for u, c in zip([o.user for o in obs], contribs):
                assert mine.contributions[u] == pytest.approx(c, abs=1e-6)
            checked += 1
        assert checked > 250


class TestKernelParity:
    def test_compiled_and_python_loops_agree(self):
        if kernel_backend() != "compiled":
            pytest.skip("compiled kernel not built; only one backend present")
        from credsense import _truth_kernel, _truth_loop

        rng = np.random.default_rng(23)
        for _ in range(200):
            n = int(rng.integers(2, 9))
            obs = rng.uniform(0.0, 30.0, n)
            reps = rng.uniform(0.05, 0.95, n)
            std = float(np.sqrt(((obs - obs.mean()) ** 2).mean()))
            if std == 0.0:
                continue
            args = (obs, reps, float(obs.mean()), std, 1e-9, 500, 1e-9 * std * std, 1.0)
            t_c, w_c, it_c, conv_c = _truth_kernel.run_fixed_point(*args)
            t_p, w_p, it_p, conv_p = _truth_loop.run_fixed_point(*args)
            assert t_c == t_p
            assert it_c == it_p
            assert conv_c == conv_p
            assert np.array_equal(np.asarray(w_c), np.asarray(w_p))
