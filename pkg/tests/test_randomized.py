"""Random-model bounds and samplers.

Frozen reference values were computed beforehand with mpmath at 40 digits
directly from the closed forms, independently of this package.
"""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subsparse.errors import DomainError
from subsparse.randomized import (
    RandomModelParams,
    c_constant,
    cap_area_fraction_bounds,
    cap_area_fraction_numeric,
    covering_number_bound,
    covering_radius_tail_bound,
    drc_probability_bound,
    monte_carlo_drc,
    random_subspace,
    sample_instance,
    trial_seeds,
    unit_ball_volume,
)

REL = 1e-12


class TestVolumes:
    def test_examples(self):
        assert unit_ball_volume(1) == pytest.approx(2.0, rel=REL)
        assert unit_ball_volume(2) == pytest.approx(math.pi, rel=REL)
        assert unit_ball_volume(3) == pytest.approx(4 * math.pi / 3, rel=REL)

    @pytest.mark.parametrize("p", range(2, 60))
    def test_recursion(self, p):
        ratio = math.sqrt(math.pi) * math.gamma((p + 1) / 2) / math.gamma(p / 2 + 1)
        assert unit_ball_volume(p) == pytest.approx(unit_ball_volume(p - 1) * ratio, rel=1e-10)


class TestCaps:
    def test_examples(self):
        assert cap_area_fraction_bounds(4, 0.0) == (0.0, 0.0)
        assert cap_area_fraction_bounds(3, math.pi / 2) == pytest.approx((0.25, 0.75), rel=REL)
        lo, hi = cap_area_fraction_bounds(2, 0.5)
        assert lo == pytest.approx(math.sin(0.5) / math.pi, rel=REL)
        assert hi == pytest.approx(2 * math.sin(0.5) / math.pi, rel=REL)
        assert cap_area_fraction_numeric(2, math.pi / 4) == pytest.approx(0.25, abs=1e-12)
        assert cap_area_fraction_numeric(3, math.pi / 3) == pytest.approx(0.25, abs=1e-12)

    def test_p5(self):
        f = cap_area_fraction_numeric(5, 0.8)
        lo, hi = cap_area_fraction_bounds(5, 0.8)
        assert lo < f < hi
        assert f == pytest.approx(0.062015368770891619, abs=1e-12)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(2, 12), st.floats(1e-3, math.pi / 2))
    def test_sandwich(self, p, theta):
        lo, hi = cap_area_fraction_bounds(p, theta)
        assert lo <= cap_area_fraction_numeric(p, theta) <= hi

    def test_domain(self):
        with pytest.raises(DomainError):
            cap_area_fraction_bounds(1, 0.3)
        with pytest.raises(DomainError):
            cap_area_fraction_bounds(3, 2.0)

    def test_cap_hit_rate(self):
        # a uniform point lands in a fixed cap at the cap-fraction rate
        rng = np.random.default_rng(4)
        X = rng.standard_normal((200_000, 4))
        X /= np.linalg.norm(X, axis=1, keepdims=True)
        theta = 0.9
        freq = np.mean(X[:, 0] >= math.cos(theta))
        f = cap_area_fraction_numeric(4, theta)
        assert abs(freq - f) <= 4 * math.sqrt(f * (1 - f) / len(X))


class TestCoveringBounds:
    def test_covering_number(self):
        assert covering_number_bound(2, math.pi / 4) == pytest.approx(8.2093772238162471, rel=REL)
        assert covering_number_bound(3, math.pi / 4) == pytest.approx(27.313708498984760, rel=REL)

    def test_tail_values(self):
        assert covering_radius_tail_bound(2, 50, math.pi / 4) == pytest.approx(
            0.99991745520616332, rel=REL)
        # exact value is 1 - 1.1e-20, which rounds to 1.0 in double precision
        assert covering_radius_tail_bound(2, 200, math.pi / 4) == 1.0

    def test_tail_increasing_in_K(self):
        vals = [covering_radius_tail_bound(3, K, 0.6) for K in range(1, 400, 7)]
        assert all(b > a for a, b in zip(vals, vals[1:]))
        assert vals[0] < 0

    def test_tail_empirical_p3(self):
        # exact covering radius of random points on S^2 via dual points
        from subsparse.geometry import covering_radius
        rng = np.random.default_rng(9)
        K, trials, gstar = 60, 60, math.pi / 4
        hits = sum(covering_radius(_sphere(3, K, rng), method="auto") < gstar
                   for _ in range(trials))
        bound = covering_radius_tail_bound(3, K, gstar)
        freq = hits / trials
        assert freq >= bound - 3 * math.sqrt(max(freq * (1 - freq), 1 / trials) / trials)


def _sphere(p, n, rng):
    X = rng.standard_normal((p, n))
    return X / np.linalg.norm(X, axis=0)


class TestEq14:
    def test_c_constant(self):
        assert c_constant(50, 2) == pytest.approx(0.62322386318339753, rel=REL)

    def test_frozen_values(self):
        cases = {
            (50, 2, 200, 1.0): 0.74775703354648909,
            (100, 2, 200, 1.0): 0.76070826689156556,
            (100, 3, 300, 1.0): -16.167628630645129,
            (50, 2, 200, 2.0): 0.74775703354648909,
        }
        for args, expected in cases.items():
            got = drc_probability_bound(RandomModelParams(*args))
            assert got == pytest.approx(expected, rel=1e-12, abs=1e-14), args

    def test_density_constructor(self):
        p = RandomModelParams.from_density(50, 2, 100, 1.0)
        assert p.s0 == 200 and p.rho0 == 100 and p.k0 == pytest.approx(10.5)
        assert RandomModelParams.from_density(50, 2, 2.25).s0 == 4.5

    def test_monotone(self):
        lam = [drc_probability_bound(RandomModelParams.from_density(60, 3, 50, l))
               for l in (0, 1, 2, 4)]
        assert all(b < a for a, b in zip(lam, lam[1:]))
        rho = [drc_probability_bound(RandomModelParams.from_density(60, 3, r, 1))
               for r in (50, 100, 1000, 1e6)]
        assert all(b > a for a, b in zip(rho, rho[1:]))

    @pytest.mark.parametrize("args, word", [
        ((50, 5, 100, 1.0), "sqrt"),
        ((50, 2, 1, 1.0), "rho0"),
        ((50, 2, 100, -1.0), "lambda"),
    ])
    def test_domain_errors(self, args, word):
        with pytest.raises(DomainError, match=word):
            drc_probability_bound(RandomModelParams(*args))

    def test_one_dimensional(self):
        assert drc_probability_bound(RandomModelParams(10, 1, 5, 1.0)) == 1.0


class TestSampling:
    def test_instance(self):
        params = RandomModelParams(20, 3, 15, 0.5)
        dic = sample_instance(params, 0)
        assert dic.J == 15 + 8 and dic.J0 == tuple(range(15))
        assert np.allclose(np.linalg.norm(dic.atoms, axis=0), 1.0, atol=1e-10)
        from subsparse.geometry import subspace_basis
        assert subspace_basis(dic.inliers).rank == 3
        again = sample_instance(params, 0)
        assert np.array_equal(dic.atoms, again.atoms)

    def test_subspace_frame(self):
        Q = random_subspace(7, 3, np.random.default_rng(0))
        assert np.allclose(Q.T @ Q, np.eye(3), atol=1e-12)

    def test_coordinate_means(self):
        rng = np.random.default_rng(2)
        for n in (1000, 100_000):
            X = _sphere(5, n, rng)
            # each coordinate has variance 1/p
            assert np.all(np.abs(X.mean(axis=1)) <= 4 * math.sqrt(1 / 5 / n))

    def test_fractional_s0_rejected(self):
        with pytest.raises(DomainError):
            sample_instance(RandomModelParams(10, 2, 4.5), 0)


class TestMonteCarlo:
    def test_seeds_stable(self):
        assert trial_seeds(7, 5) == trial_seeds(7, 10)[:5]

    def test_single_trial(self):
        rep = monte_carlo_drc(RandomModelParams(20, 2, 10, 1.0), 1, seed=3)
        assert rep.empirical_frequency in (0.0, 1.0) and len(rep.per_trial) == 1

    def test_one_dimensional(self):
        rep = monte_carlo_drc(RandomModelParams(10, 1, 5, 1.0), 20, seed=1)
        assert rep.empirical_frequency == 1.0 and rep.theoretical_lower_bound == 1.0

    def test_deterministic_and_order_free(self, monkeypatch):
        params = RandomModelParams(20, 2, 20, 1.0)
        a = monte_carlo_drc(params, 8, seed=5)
        monkeypatch.setenv("SUBSPARSE_THREADS", "2")
        b = monte_carlo_drc(params, 8, seed=5, parallel=True)
        assert a == b

    def test_resource_failures_counted(self):
        rep = monte_carlo_drc(RandomModelParams(20, 3, 30, 1.0), 2, seed=0, budget=10)
        assert rep.resource_failures == 2 and rep.drc_success_count == 0

    def test_guard(self):
        with pytest.raises(DomainError):
            monte_carlo_drc(RandomModelParams(20, 2, 10), 0)
