"""
Property-based tests for the classical and quantized games.

Invariants checked over randomly generated parameters, states, games and
payoff surfaces: Dove is never a pure ESS and Hawk is one exactly when
v + i >= 0, the mixed point equalizes fitness, the final density matrix is a
valid state, payoffs depend only on squared moduli, the analysis never
reports an ESS that is not a Nash equilibrium, and malformed configuration
text always fails with a ConfigError.
"""

import cmath

from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from qhd_system.cli.config import parse_config
from qhd_system.core.classical import (
    RELATIVE_TOLERANCE, PureESSStatus, build_hawk_dove, classical_mixed_ess, classical_pure_ess, fitness,
)
from qhd_system.core.equilibria import (
    CandidateKind, GameKind, NashStatus, find_nash, invasion_barrier, surfaces_symmetric,
)
from qhd_system.core.errors import ConfigError, ConfigSyntaxError, DegenerateGameError, UnknownKeyError
from qhd_system.core.quantum import InitialState, TacticProfile, final_density_matrix, payoff_surface
from tests.strategies import (
    games, hawk_dove_games, phase, signed_hawk_dove_params, states, surfaces, symmetric_states, unit,
)

PROPERTY_SETTINGS = settings(max_examples=500, deadline=None, suppress_health_check=[HealthCheck.too_slow])


def _close(x, y, scale, rel=1e-9):
    return abs(x - y) <= rel * max(1.0, scale)


def _same_surface(s, t, scale):
    return all(_close(x, y, scale) for x, y in zip(s.coefficients(), t.coefficients()))


@PROPERTY_SETTINGS
@given(state=states(), p=unit, q=unit)
def test_final_density_matrix_is_a_state(state, p, q):
    assert final_density_matrix(state, TacticProfile(p, q)).is_valid()


@PROPERTY_SETTINGS
@given(state=states(), game=games(), phases=st.tuples(phase, phase, phase, phase))
def test_payoffs_ignore_phases(state, game, phases):
    amps = (state.amp_hh, state.amp_dd, state.amp_hd, state.amp_dh)
    rotated = InitialState(*(a * cmath.exp(1j * t) for a, t in zip(amps, phases)))
    for s, t in zip(payoff_surface(state, game), payoff_surface(rotated, game)):
        assert _same_surface(s, t, game.scale())


@PROPERTY_SETTINGS
@given(state=states(), game=hawk_dove_games())
def test_swapping_players_transposes_the_surface(state, game):
    _, surf_b = payoff_surface(state, game)
    mirrored, _ = payoff_surface(state.swapped(), game)
    assert _same_surface(surf_b, mirrored.transposed(), game.scale())


@PROPERTY_SETTINGS
@given(state=symmetric_states(), game=hawk_dove_games())
def test_symmetric_state_gives_symmetric_game(state, game):
    surf_a, surf_b = payoff_surface(state, game)
    assert surfaces_symmetric(surf_a, surf_b)
    assert find_nash(surf_a, surf_b).game_kind is GameKind.SYMMETRIC


@PROPERTY_SETTINGS
@given(game=games(), p=unit, q=unit)
def test_basis_state_reproduces_classical_mixed_payoff(game, p, q):
    surf_a, surf_b = payoff_surface(InitialState(1, 0, 0, 0), game)
    weights = ((p * q, p * (1 - q)), ((1 - p) * q, (1 - p) * (1 - q)))
    expected_a = sum(weights[r][c] * game.row(r, c) for r in range(2) for c in range(2))
    expected_b = sum(weights[r][c] * game.col(r, c) for r in range(2) for c in range(2))
    assert _close(surf_a(p, q), expected_a, game.scale())
    assert _close(surf_b(p, q), expected_b, game.scale())


@PROPERTY_SETTINGS
@given(surf=surfaces(), p=unit, q=unit)
def test_payoff_bounded_by_corners(surf, p, q):
    corners = surf.corners()
    slack = 1e-12 * surf.scale()
    assert min(corners) - slack <= surf(p, q) <= max(corners) + slack


@PROPERTY_SETTINGS
@given(surf_a=surfaces(), surf_b=surfaces())
def test_every_ess_is_nash(surf_a, surf_b):
    report = find_nash(surf_a, surf_b)
    for candidate in report.ess():
        assert candidate.is_nash
        assert candidate.ne_status is not NashStatus.NE_CONTINUUM
        if report.game_kind is GameKind.ASYMMETRIC:
            assert candidate.ne_status is NashStatus.STRICT_NE


@PROPERTY_SETTINGS
@given(surf_a=surfaces(), surf_b=surfaces(), x=unit)
def test_no_profitable_deviation_from_reported_nash(surf_a, surf_b, x):
    report = find_nash(surf_a, surf_b)
    slack = 4 * report.tolerance
    for c in report.nash():
        if c.ne_status is NashStatus.NE_CONTINUUM:
            continue
        assert surf_a(x, c.q_star) <= surf_a(c.p_star, c.q_star) + slack
        assert surf_b(c.p_star, x) <= surf_b(c.p_star, c.q_star) + slack


@PROPERTY_SETTINGS
@given(surf_a=surfaces(), surf_b=surfaces(), x=unit)
def test_strict_corner_beats_every_mixed_deviation(surf_a, surf_b, x):
    report = find_nash(surf_a, surf_b)
    for c in report.candidates:
        if c.kind is not CandidateKind.CORNER or c.ne_status is not NashStatus.STRICT_NE:
            continue
        # Pure-tactic margins bound every mixed deviation by linearity
        assert surf_a(x, c.q_star) <= surf_a(c.p_star, c.q_star) + 1e-12 * surf_a.scale()
        assert surf_b(c.p_star, x) <= surf_b(c.p_star, c.q_star) + 1e-12 * surf_b.scale()


@PROPERTY_SETTINGS
@given(surf_a=surfaces(), surf_b=surfaces())
def test_interior_point_makes_both_players_indifferent(surf_a, surf_b):
    report = find_nash(surf_a, surf_b)
    slack = 4 * report.tolerance
    for c in report.candidates:
        if c.kind is not CandidateKind.INTERIOR or c.ne_status is NashStatus.NE_CONTINUUM:
            continue
        assert abs(surf_a(1, c.q_star) - surf_a(0, c.q_star)) <= slack
        assert abs(surf_b(c.p_star, 1) - surf_b(c.p_star, 0)) <= slack


@PROPERTY_SETTINGS
@given(surf=surfaces(), mutant=unit)
def test_ess_resists_mutants_below_the_barrier(surf, mutant):
    report = find_nash(surf, surf.transposed())
    tol = 1e-9 * surf.scale()
    for c in report.ess():
        assume(abs(mutant - c.p_star) > 0.01)
        barrier = invasion_barrier(surf, c.p_star, mutant)
        assert barrier is not None
        share = barrier / 2
        mix = (1 - share) * c.p_star + share * mutant
        assert surf(c.p_star, mix) - surf(mutant, mix) >= -2 * tol


@PROPERTY_SETTINGS
@given(params=signed_hawk_dove_params())
def test_dove_is_never_stable(params):
    report = classical_pure_ess(build_hawk_dove(params, strict_signs=True))
    assert report.dove_pure is PureESSStatus.NOT_ESS


@settings(max_examples=1000, deadline=None,
          suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much])
@given(params=signed_hawk_dove_params())
def test_hawk_stability_follows_injury_balance(params):
    game = build_hawk_dove(params, strict_signs=True)
    margin = params.resource_value + params.injury_cost
    # Margins inside the tolerance band are ties by construction
    assume(margin == 0 or abs(margin) / 2 > RELATIVE_TOLERANCE * game.scale())
    report = classical_pure_ess(game)
    assert (report.hawk_pure is not PureESSStatus.NOT_ESS) == (margin >= 0)


@PROPERTY_SETTINGS
@given(game=hawk_dove_games())
def test_mixed_point_equalizes_fitness(game):
    try:
        mixed = classical_mixed_ess(game)
    except DegenerateGameError:
        return
    assume(mixed is not None)
    w = fitness(game, mixed.hawk_fraction)
    assert abs(w.fitness_hawk - w.fitness_dove) < 1e-9 * game.scale()


CONFIG_LINES = st.sampled_from([
    "[game]", "[state]", "[sweep]", "[tactics]", "[simulation]", "[output]", "[bogus]", "[game",
    "resource_value = 50", "injury_cost = -100", "display_cost = -10", "losing_cost = 1e999",
    "strict_signs = true", "squared_moduli = [0.25, 0.25, 0.25, 0.25]", "hh = [1, 0]",
    "hd = 0.7", 'policy = "renormalize"', 'policy = "sometimes"', "p = 1.5", "q = 0.5",
    "incumbent = [1, 1]", "mutant = 1", "generations = 0", "axes = [\"a2\", \"a2\"]",
    "resolution = 3", "workers = 2", 'format = "json"', 'path = "out.csv', "= 3", "key", "# comment",
    "hh = [[1]]", "epsilon = 99999999999999999999", "",
])
CONFIG_NOISE = st.text(alphabet='[]=#",.-+e0123456789 abdfghilmnoprstuvy_', max_size=24)


@PROPERTY_SETTINGS
@given(lines=st.lists(st.one_of(CONFIG_LINES, CONFIG_NOISE), max_size=12))
def test_config_failures_are_config_errors(lines):
    text = "\n".join(lines)
    try:
        parse_config(text)
    except (ConfigSyntaxError, UnknownKeyError) as e:
        assert e.line is not None and 1 <= e.line <= len(text.splitlines())
    except ConfigError:
        pass
