import json

import numpy as np
import pytest
from scipy.integrate import quad

from wmcs import (
    Dataset,
    DegenerateMixtureError,
    DensityHandle,
    Gamma,
    Laplace,
    LaplaceLogisticMixture,
    Logistic,
    Region,
    RegionDensity,
    beta_budget,
    build_mixture_set,
    optimal_alpha,
    psi_hat,
)
from wmcs.harness import (
    example2_left_candidates,
    example2_right_candidates,
    example2_truth,
)


class TestBetaBudget:
    def test_reference_value(self):
        b = beta_budget(0.05, 2)
        assert b == pytest.approx(0.025320565519103666, abs=1e-12)
        assert (1.0 - b) ** 2 == pytest.approx(0.95, abs=1e-12)
        # the level used throughout the second study fits the budget
        assert 0.025 <= b

    def test_single_partition_reduces_to_alpha(self):
        assert beta_budget(0.05, 1) == pytest.approx(0.05, abs=1e-15)

    def test_vanishing_alpha(self):
        assert beta_budget(1e-9, 2) == pytest.approx(0.0, abs=1e-8)

    def test_domain(self):
        with pytest.raises(ValueError):
            beta_budget(0.0, 2)
        with pytest.raises(ValueError):
            beta_budget(1.0, 2)
        with pytest.raises(ValueError):
            beta_budget(0.05, 0)


class TestPsiHat:
    def test_equal_components_constant(self, rng):
        f = rng.uniform(0.1, 2.0, size=40)
        vals = [psi_hat(a, f, f) for a in np.linspace(0, 1, 11)]
        assert np.ptp(vals) < 1e-14

    def test_endpoints(self, rng):
        f = rng.uniform(0.1, 2.0, size=25)
        g = rng.uniform(0.1, 2.0, size=25)
        assert psi_hat(1.0, f, g) == pytest.approx(np.mean(np.log(f)), rel=1e-12)
        assert psi_hat(0.0, f, g) == pytest.approx(np.mean(np.log(g)), rel=1e-12)

    def test_hand_instance(self):
        f = np.array([0.5, 1.0, 2.0, 0.25, 1.5])
        g = np.array([1.0, 0.5, 1.0, 1.0, 0.5])
        alpha = 0.3
        want = float(np.mean(np.log(alpha * f + 0.7 * g)))
        assert psi_hat(alpha, f, g) == pytest.approx(want, rel=1e-12)

    def test_zero_density_gives_minus_inf(self):
        assert psi_hat(1.0, [0.0, 1.0], [1.0, 1.0]) == -np.inf

    def test_validation(self):
        with pytest.raises(ValueError):
            psi_hat(1.5, [1.0], [1.0])
        with pytest.raises(ValueError):
            psi_hat(0.5, [1.0, 2.0], [1.0])


class TestOptimalAlpha:
    def test_one_component_dead(self, rng):
        f = rng.uniform(0.1, 2.0, size=30)
        zeros = np.zeros(30)
        assert optimal_alpha(f, zeros) == 1.0
        assert optimal_alpha(zeros, f) == 0.0

    def test_flat_tie_break(self, rng):
        f = rng.uniform(0.1, 2.0, size=30)
        assert optimal_alpha(f, f.copy()) == 0.5

    def test_brute_force_grid_oracle(self, rng):
        for _ in range(50):
            n = int(rng.integers(10, 60))
            f = rng.uniform(0.01, 3.0, size=n)
            g = rng.uniform(0.01, 3.0, size=n)
            ours = optimal_alpha(f, g)
            grid = np.linspace(0.0, 1.0, 100_001)
            vals = np.log(np.outer(grid, f) + np.outer(1.0 - grid, g)).mean(axis=1)
            oracle = grid[int(np.argmax(vals))]
            assert ours == pytest.approx(oracle, abs=1e-4)

    def test_concavity_on_grid(self, rng):
        f = rng.uniform(0.01, 3.0, size=50)
        g = rng.uniform(0.01, 3.0, size=50)
        grid = np.linspace(0.0, 1.0, 101)
        vals = np.array([psi_hat(a, f, g) for a in grid])
        second = vals[2:] - 2.0 * vals[1:-1] + vals[:-2]
        assert np.all(second <= 1e-9)

    def test_optimum_dominates_endpoints(self, rng):
        for _ in range(20):
            f = rng.uniform(0.01, 3.0, size=35)
            g = rng.uniform(0.01, 3.0, size=35)
            a = optimal_alpha(f, g)
            best = psi_hat(a, f, g)
            assert best >= max(psi_hat(0.0, f, g), psi_hat(1.0, f, g)) - 1e-12

    def test_swap_symmetry(self, rng):
        for _ in range(20):
            f = rng.uniform(0.05, 2.0, size=40)
            g = rng.uniform(0.05, 2.0, size=40)
            a = optimal_alpha(f, g)
            b = optimal_alpha(g, f)
            if 0.0 < a < 1.0:
                assert a + b == pytest.approx(1.0, abs=2e-6)

    def test_degenerate(self):
        with pytest.raises(DegenerateMixtureError):
            optimal_alpha([0.0, 1.0], [1.0, 0.0][::-1])  # both zero at index 0


@pytest.fixture(scope="module")
def example_set():
    rng = np.random.default_rng(0)
    data = Dataset(example2_truth().sample(1000, rng))
    ref = DensityHandle.from_family(example2_truth())
    return build_mixture_set(
        example2_left_candidates(),
        example2_right_candidates(),
        data,
        split=0.0,
        alpha=0.05,
        beta=0.025,
        reference=ref,
    ), data


class TestBuildMixtureSet:
    def test_cartesian_product_size(self, example_set):
        ms, _ = example_set
        assert len(ms.candidates) == len(ms.left.members) * len(ms.right.members)
        assert len(ms.candidates) == 4

    def test_alpha_opts_near_partition_mass(self, example_set):
        ms, data = example_set
        mass = data.region_mass(Region(-np.inf, 0.0))
        for cand in ms.candidates:
            assert cand.alpha_opt == pytest.approx(mass, abs=1e-4)
            assert 0.0 <= cand.alpha_opt <= 1.0

    def test_true_component_families_give_one_third(self):
        rng = np.random.default_rng(3)
        data = Dataset(example2_truth().sample(2000, rng))
        ms = build_mixture_set(
            [Laplace.default()], [Logistic.default()], data, split=0.0, alpha=0.05, beta=0.025
        )
        expected = (1.0 - 0.5 * np.exp(-8.0)) / 3.0 + (2.0 / 3.0) / (1.0 + np.exp(6.0))
        assert len(ms.candidates) == 1
        assert ms.candidates[0].alpha_opt == pytest.approx(expected, abs=0.035)

    def test_mixture_density_integrates_to_one(self, example_set):
        ms, _ = example_set
        for cand in ms.candidates:
            total = quad(
                lambda t: float(cand.pdf(np.asarray(t))), -12.0, 40.0,
                points=[-4.0, 0.0, 6.0], limit=400,
            )[0]
            assert total == pytest.approx(1.0, abs=1e-5)

    def test_distance_diagnostics_populated(self, example_set):
        ms, _ = example_set
        for cand in ms.candidates:
            assert 0.0 <= cand.hellinger_sq <= 1.0
            assert cand.l2_sq >= 0.0

    def test_degenerate_partition(self, rng):
        data = Dataset(rng.normal(6.0, 1.0, size=200))
        with pytest.raises(Exception) as err:
            build_mixture_set(
                [Laplace.default()], [Gamma.default()], data,
                split=float(data.values.min()) - 1.0, alpha=0.05,
            )
        assert "region" in str(err.value) or "observations" in str(err.value)

    def test_beta_validation(self, rng):
        data = Dataset(np.concatenate([rng.normal(-4, 0.5, 150), rng.normal(6, 1, 300)]))
        args = ([Laplace.default()], [Gamma.default()], data)
        with pytest.raises(ValueError):
            build_mixture_set(*args, split=0.0, alpha=0.05, beta=0.05)
        with pytest.raises(ValueError):
            build_mixture_set(*args, split=0.0, alpha=0.05, beta=-0.01)
        with pytest.warns(UserWarning, match="budget boundary"):
            build_mixture_set(*args, split=0.0, alpha=0.05, beta=beta_budget(0.05, 2))

    def test_default_beta_respects_joint_level(self, rng):
        data = Dataset(np.concatenate([rng.normal(-4, 0.5, 150), rng.normal(6, 1, 300)]))
        ms = build_mixture_set(
            [Laplace.default()], [Gamma.default()], data, split=0.0, alpha=0.05
        )
        assert (1.0 - ms.beta) ** 2 >= 0.95 - 1e-12

    def test_to_dict_round_trip(self, example_set):
        ms, _ = example_set
        payload = json.loads(json.dumps(ms.to_dict()))
        assert payload["partition"] == 0.0
        assert len(payload["candidates"]) == 4
        for cand in payload["candidates"]:
            assert {"f", "g", "alpha_opt", "hellinger_sq", "l2_sq"} <= set(cand)


def test_region_density_normalizes(rng):
    fam = Logistic(-4.0, 0.4)
    rd = RegionDensity.build(fam, Region(-np.inf, 0.0))
    total = quad(lambda t: float(rd.pdf(np.asarray(t))), -30.0, 0.0, limit=200)[0]
    assert total == pytest.approx(1.0, abs=1e-6)
    assert rd.pdf(1.0) == 0.0
    with pytest.raises(DegenerateMixtureError):
        RegionDensity.build(Gamma(2.0, 1.0), Region(-np.inf, -1.0))
