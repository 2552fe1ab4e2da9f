import math

import numpy as np
import pytest

from qhd_system.core.classical import BimatrixGame2x2
from qhd_system.core.errors import DomainError, NormalizationError, ValidationError
from qhd_system.core.quantum import (
    InitialState, NormalizationPolicy, PayoffSurface, TacticProfile, expected_payoffs_trace,
    final_density_matrix, is_symmetric, make_initial_state, payoff_operators, payoff_surface,
    random_game, random_state, state_from_moduli, surface_coefficient_map,
)

HH = InitialState(1, 0, 0, 0)


def _projector(k: int) -> np.ndarray:
    m = np.zeros((4, 4), dtype=complex)
    m[k, k] = 1
    return m


class TestInitialState:

    def test_basis_state(self):
        state = make_initial_state([1, 0, 0, 0])
        assert state.squared_moduli() == (1.0, 0.0, 0.0, 0.0)

    def test_worked_state(self):
        state = make_initial_state([math.sqrt(1 / 2), math.sqrt(1 / 6), math.sqrt(1 / 6), math.sqrt(1 / 6)])
        assert state.squared_moduli() == pytest.approx((1 / 2, 1 / 6, 1 / 6, 1 / 6), abs=1e-15)

    def test_reject_reports_norm(self):
        with pytest.raises(NormalizationError) as excinfo:
            make_initial_state([2, 0, 0, 0])
        assert excinfo.value.norm_squared == 4.0

    def test_all_zero_rejected(self):
        with pytest.raises(NormalizationError):
            make_initial_state([0, 0, 0, 0], NormalizationPolicy.RENORMALIZE)

    def test_renormalize_small_deviation(self, caplog):
        amps = [1 + 1e-8, 0, 0, 0]
        with pytest.raises(NormalizationError):
            make_initial_state(amps)
        state = make_initial_state(amps, NormalizationPolicy.RENORMALIZE)
        assert abs(sum(state.squared_moduli()) - 1) < 1e-12
        assert "renormalizing" in caplog.text

    def test_renormalize_refuses_large_deviation(self):
        with pytest.raises(NormalizationError):
            make_initial_state([math.sqrt(0.9), 0, 0, 0], NormalizationPolicy.RENORMALIZE)

    def test_wrong_arity(self):
        with pytest.raises(ValidationError):
            make_initial_state([1, 0, 0])

    def test_state_from_moduli(self):
        state = state_from_moduli([1 / 16, 1 / 4, 11 / 32, 11 / 32])
        assert state.amp_hh == pytest.approx(0.25)
        with pytest.raises(DomainError):
            state_from_moduli([-0.1, 0.5, 0.3, 0.3])

    def test_basis_order(self):
        state = InitialState(0.5, 0.5, 0.5, 0.5j)
        assert state.vector().tolist() == [0.5, 0.5, 0.5j, 0.5]
        assert state.swapped().amp_hd == 0.5j

    def test_tactics_domain(self):
        with pytest.raises(DomainError):
            TacticProfile(1.5, 0)


class TestDensityMatrix:

    def test_identity_tactics_preserve_state(self):
        rho = final_density_matrix(HH, TacticProfile(1, 1))
        np.testing.assert_allclose(rho.matrix, _projector(0), atol=1e-15)

    def test_double_flip(self):
        rho = final_density_matrix(HH, TacticProfile(0, 0))
        np.testing.assert_allclose(rho.matrix, _projector(3), atol=1e-15)

    def test_half_mixture(self):
        rho = final_density_matrix(HH, TacticProfile(0.5, 0.5))
        np.testing.assert_allclose(rho.matrix, np.eye(4) / 4, atol=1e-15)
        assert rho.populations() == {"HH": 0.25, "HD": 0.25, "DH": 0.25, "DD": 0.25}

    def test_valid_for_entangled_state(self, worked_state):
        rho = final_density_matrix(worked_state("asymmetric-case-2"), TacticProfile(0.3, 0.8))
        assert rho.is_valid()


class TestPayoffs:

    def test_payoff_operators(self, example_game):
        operators = payoff_operators(example_game)
        assert operators.diag_a == (-25, 50, 0, 15)
        assert operators.diag_b == (-25, 0, 50, 15)

    def test_payoff_operators_general_game(self):
        game = BimatrixGame2x2.from_rows([[(1, 2), (3, 4)], [(5, 6), (7, 8)]])
        operators = payoff_operators(game)
        assert operators.diag_a == (1, 3, 5, 7)
        assert operators.diag_b == (2, 4, 6, 8)
        np.testing.assert_array_equal(operators.matrix_a(), np.diag([1, 3, 5, 7]))

    @pytest.mark.parametrize("tactics, expected", [
        ((1, 1), (-25, -25)),
        ((1, 0), (50, 0)),
        ((0, 0), (15, 15)),
    ])
    def test_trace_at_basis_state(self, example_game, tactics, expected):
        assert expected_payoffs_trace(HH, example_game, TacticProfile(*tactics)) == pytest.approx(expected, abs=1e-12)

    def test_trace_at_mixed_equilibrium(self, example_game, worked_state):
        payoffs = expected_payoffs_trace(worked_state("symmetric-case-3"), example_game, TacticProfile(7 / 12, 7 / 12))
        assert payoffs == pytest.approx((8.75, 8.75), abs=1e-12)

    def test_surface_at_basis_state(self, example_game):
        surf_a, surf_b = payoff_surface(HH, example_game)
        assert surf_a.coefficients() == pytest.approx((-60, 35, -15, 15))
        assert surf_b.coefficients() == pytest.approx((-60, -15, 35, 15))

    def test_surface_of_mixed_state(self, worked_surfaces):
        surf_a, surf_b = worked_surfaces("symmetric-case-3")
        assert surf_a.coefficients() == pytest.approx((-20, 35 / 3, -5, 35 / 3), abs=1e-12)
        assert surf_a.diagonal() == pytest.approx((-20, 20 / 3, 35 / 3), abs=1e-12)
        assert surf_b.coefficients() == pytest.approx(surf_a.transposed().coefficients(), abs=1e-12)

    def test_zero_game(self, worked_state):
        zero = BimatrixGame2x2.from_rows([[(0, 0), (0, 0)], [(0, 0), (0, 0)]])
        surf_a, surf_b = payoff_surface(worked_state("asymmetric-case-1"), zero)
        assert surf_a.coefficients() == (0, 0, 0, 0)
        assert surf_b.coefficients() == (0, 0, 0, 0)

    def test_closed_form_coefficients(self, example_game):
        # k_pq = 60(-a2 - b2 + c2 + d2), k_p = 35a2 + 25b2 - 25c2 - 35d2,
        # k_q = -15a2 + 75b2 + 15c2 - 75d2, k_0 = 15a2 - 25b2 + 50d2
        expected_a = np.array([[-60, -60, 60, 60],
                               [35, 25, -25, -35],
                               [-15, 75, 15, -75],
                               [15, -25, 0, 50]])
        map_a, map_b = surface_coefficient_map(example_game)
        np.testing.assert_allclose(map_a, expected_a, atol=1e-12)
        # Bob: c and d exchanged, p and q exchanged
        expected_b = expected_a[[0, 2, 1, 3]][:, [0, 1, 3, 2]]
        np.testing.assert_allclose(map_b, expected_b, atol=1e-12)

    def test_closed_form_matches_trace_on_grid(self, example_game):
        rng = np.random.default_rng(7)
        grid = np.linspace(0, 1, 5)
        for _ in range(100):
            state = random_state(rng)
            surf_a, surf_b = payoff_surface(state, example_game)
            for p in grid:
                for q in grid:
                    traced = expected_payoffs_trace(state, example_game, TacticProfile(p, q))
                    assert abs(traced[0] - surf_a(p, q)) < 1e-12 * 50
                    assert abs(traced[1] - surf_b(p, q)) < 1e-12 * 50

    def test_random_game_range(self):
        game = random_game(np.random.default_rng(0), low=-1, high=1)
        assert game.scale() <= 1


class TestSurface:

    def test_slices(self):
        surf = PayoffSurface(2, 3, 5, 7)
        assert surf.along_p(0.5) == (4, 9.5)
        assert surf.along_q(0.5) == (6, 8.5)
        assert surf.corners() == (7, 12, 10, 17)
        assert surf.transposed() == PayoffSurface(2, 5, 3, 7)

    def test_scale_of_zero_surface(self):
        assert PayoffSurface(0, 0, 0, 0).scale() == 1.0


class TestSymmetry:

    def test_worked_state_is_symmetric(self, worked_state):
        assert is_symmetric(worked_state("symmetric-case-3"))
        assert is_symmetric(HH)

    def test_asymmetric_state(self, worked_state):
        assert not is_symmetric(worked_state("asymmetric-case-1"))

    def test_strict_mode_compares_amplitudes(self):
        state = InitialState(0, 0, math.sqrt(0.5), 1j * math.sqrt(0.5))
        assert is_symmetric(state)
        assert not is_symmetric(state, strict=True)
