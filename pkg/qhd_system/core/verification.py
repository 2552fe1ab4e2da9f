"""
Self-Verification Module.

Two suites back the ``verify`` command:

* an oracle run comparing the explicit density-matrix payoffs with the
  closed-form surfaces over seeded random draws, and
* the golden cases: the classical example game and the worked quantum
  states whose payoffs and ESS verdicts are known exactly.

Random draws come from ``numpy.random.default_rng(seed)``, i.e. the PCG64
bit generator, so a failing seed can be replayed.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from qhd_system.core.classical import (
    HawkDoveParams, PureESSStatus, Strategy, build_hawk_dove, classical_mixed_ess, classical_pure_ess, fitness,
)
from qhd_system.core.equilibria import CandidateKind, EquilibriumCandidate, GameKind, find_nash
from qhd_system.core.errors import DomainError
from qhd_system.core.quantum import (
    InitialState, TacticProfile, expected_payoffs_trace, final_density_matrix, payoff_surface,
    random_game, random_state,
)

logger = logging.getLogger(__name__)

DEFAULT_TRIALS = 1000
DEFAULT_SEED = 42
DEFAULT_TOLERANCE = 1e-12

# Absolute tolerance for the exact closed-form golden values
GOLDEN_TOLERANCE = 1e-12

EXAMPLE_PARAMS = HawkDoveParams(resource_value=50.0, injury_cost=-100.0, display_cost=-10.0)
EXAMPLE_MATRIX = (((-25.0, -25.0), (50.0, 0.0)),
                  ((0.0, 50.0), (15.0, 15.0)))

# Squared moduli (|a|^2, |b|^2, |c|^2, |d|^2) of the worked states
WORKED_STATES: Dict[str, Tuple[float, float, float, float]] = {
    "symmetric-case-1": (1 / 16, 1 / 4, 11 / 32, 11 / 32),
    "symmetric-case-2": (1 / 16, 1 / 8, 13 / 32, 13 / 32),
    "symmetric-case-3": (1 / 2, 1 / 6, 1 / 6, 1 / 6),
    "asymmetric-case-1": (1 / 16, 1 / 4, 9 / 16, 1 / 8),
    "asymmetric-case-2": (1 / 16, 1 / 8, 9 / 16, 1 / 4),
}


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class VerificationReport:
    checks: List[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def failures(self) -> List[CheckResult]:
        return [check for check in self.checks if not check.passed]


def _close(actual: Sequence[float], expected: Sequence[float], tol: float = GOLDEN_TOLERANCE) -> bool:
    return len(actual) == len(expected) and all(abs(x - y) <= tol for x, y in zip(actual, expected))


def _check(name: str, actual: Sequence[float], expected: Sequence[float], tol: float = GOLDEN_TOLERANCE) -> CheckResult:
    passed = _close(actual, expected, tol)
    detail = "" if passed else f"got {list(actual)}, expected {list(expected)}"
    return CheckResult(name, passed, detail)


def _worked_state(name: str) -> InitialState:
    return InitialState.from_squared_moduli(*WORKED_STATES[name])


def _candidate_at(candidates: List[EquilibriumCandidate], p: float, q: float) -> Optional[EquilibriumCandidate]:
    for candidate in candidates:
        if abs(candidate.p_star - p) <= GOLDEN_TOLERANCE and abs(candidate.q_star - q) <= GOLDEN_TOLERANCE:
            return candidate
    return None


def _ess_check(name: str, state: InitialState, p: float, q: float, expect_ess: bool = True) -> CheckResult:
    report = find_nash(*payoff_surface(state, build_hawk_dove(EXAMPLE_PARAMS)))
    candidate = _candidate_at(report.candidates, p, q)
    if candidate is None:
        return CheckResult(name, False, f"no candidate at ({p}, {q})")
    passed = candidate.is_nash and candidate.is_ess == expect_ess
    return CheckResult(name, passed, "" if passed else
                       f"({p}, {q}): {candidate.ne_status.value} / {candidate.ess_status.value}")


def run_oracle(trials: int = DEFAULT_TRIALS, seed: int = DEFAULT_SEED,
               tol: float = DEFAULT_TOLERANCE) -> List[CheckResult]:
    """Compare trace and closed-form payoffs over random draws.

    Each draw takes a random state, a random game with payoffs in
    [-100, 100) and a random tactic profile. A draw fails when either
    player's payoffs differ by more than ``tol`` times the game's payoff
    scale, or when the final density matrix is not a valid state.

    Args:
        trials: Number of draws
        seed: Seed for ``numpy.random.default_rng``
        tol: Relative tolerance

    Returns:
        Two check results, payoff agreement and density-matrix validity

    Raises:
        DomainError: If ``tol`` is not a finite positive number
    """
    if not (math.isfinite(tol) and tol > 0):
        raise DomainError(f"oracle tolerance must be a finite positive number, got {tol}", field="tol")
    rng = np.random.default_rng(seed)
    worst = 0.0
    mismatches = []
    invalid = []

    for trial in range(trials):
        state = random_state(rng)
        game = random_game(rng)
        tactics = TacticProfile(*rng.uniform(0.0, 1.0, size=2))

        traced = expected_payoffs_trace(state, game, tactics)
        surf_a, surf_b = payoff_surface(state, game)
        closed = (surf_a(tactics.p, tactics.q), surf_b(tactics.p, tactics.q))
        error = max(abs(x - y) for x, y in zip(traced, closed)) / game.scale()
        worst = max(worst, error)
        if error >= tol:
            mismatches.append(trial)
        if not final_density_matrix(state, tactics).is_valid():
            invalid.append(trial)

    logger.debug("oracle: %d draws, worst relative deviation %.3g", trials, worst)
    return [
        CheckResult("oracle: trace vs closed form", not mismatches,
                    f"worst relative deviation {worst:.3g} over {trials} draws"
                    + (f"; failing draws {mismatches[:10]}" if mismatches else "")),
        CheckResult("oracle: density matrix contract", not invalid,
                    f"failing draws {invalid[:10]}" if invalid else f"{trials} valid density matrices"),
    ]


def _classical_checks() -> List[CheckResult]:
    game = build_hawk_dove(EXAMPLE_PARAMS)
    checks = [CheckResult("classical: example matrix", game.payoff == EXAMPLE_MATRIX,
                          "" if game.payoff == EXAMPLE_MATRIX else f"got {game.as_lists()}")]

    pure = classical_pure_ess(game)
    no_pure = pure.hawk_pure is PureESSStatus.NOT_ESS and pure.dove_pure is PureESSStatus.NOT_ESS
    checks.append(CheckResult("classical: no pure ESS", no_pure,
                              "" if no_pure else f"{pure.hawk_pure.value} / {pure.dove_pure.value}"))

    mixed = classical_mixed_ess(game)
    if mixed is None:
        checks.append(CheckResult("classical: mixed ESS", False, "no interior point"))
        return checks
    checks.append(_check("classical: mixed ESS h = 7/12", [mixed.hawk_fraction], [7 / 12]))
    checks.append(CheckResult("classical: mixed point stable", mixed.stable))
    w = fitness(game, mixed.hawk_fraction)
    checks.append(_check("classical: equal fitness at h", [w.fitness_hawk], [w.fitness_dove], 1e-9))
    return checks


def _quantum_checks() -> List[CheckResult]:
    game = build_hawk_dove(EXAMPLE_PARAMS)
    checks = []

    surf_a, surf_b = payoff_surface(InitialState(1, 0, 0, 0), game)
    checks.append(_check("|HH>: surface A", surf_a.coefficients(), (-60, 35, -15, 15)))
    checks.append(_check("|HH>: surface B", surf_b.coefficients(), (-60, -15, 35, 15)))
    checks.append(_check("|HH>: trace at (1, 1)",
                         expected_payoffs_trace(InitialState(1, 0, 0, 0), game, TacticProfile(1, 1)),
                         (game.row(Strategy.HAWK, Strategy.HAWK), game.col(Strategy.HAWK, Strategy.HAWK))))

    state = _worked_state("symmetric-case-1")
    surf, _ = payoff_surface(state, game)
    checks.append(_check("symmetric case 1: $(0,0)", [surf(0, 0)], [95 / 8]))
    checks.append(_check("symmetric case 1: $(p,0)", surf.along_p(0), (-195 / 16, 95 / 8)))
    checks.append(_ess_check("symmetric case 1: (0,0) ESS", state, 0.0, 0.0))

    state = _worked_state("symmetric-case-2")
    surf, _ = payoff_surface(state, game)
    checks.append(_check("symmetric case 2: $(1,1)", [surf(1, 1)], [165 / 8]))
    checks.append(_check("symmetric case 2: $(p,1)", surf.along_p(1), (295 / 16, 35 / 16)))
    checks.append(_ess_check("symmetric case 2: (1,1) ESS", state, 1.0, 1.0))

    state = _worked_state("symmetric-case-3")
    surf, _ = payoff_surface(state, game)
    s = 7 / 12
    checks.append(_check("symmetric case 3: $(p*,q*)", [surf(s, s)], [8.75]))
    checks.append(_check("symmetric case 3: $(q,q)", surf.diagonal(), (-20, 20 / 3, 35 / 3)))
    checks.append(_check("symmetric case 3: $(p*,q)", surf.along_q(s), (-600 / 36, 665 / 36)))
    grid = np.linspace(0.0, 1.0, 101)
    gap = [surf(s, q) - surf(q, q) - 20 * (q - s) ** 2 for q in grid]
    checks.append(_check("symmetric case 3: $(p*,q) - $(q,q) = 20(q - 7/12)^2", gap, [0.0] * len(gap), 1e-10))
    report = find_nash(*payoff_surface(state, game))
    interior = [c for c in report.candidates if c.kind is CandidateKind.INTERIOR]
    if interior:
        checks.append(_check("symmetric case 3: interior NE", (interior[0].p_star, interior[0].q_star), (s, s)))
        checks.append(CheckResult("symmetric case 3: mixed ESS", interior[0].is_ess, interior[0].ess_status.value))
    else:
        checks.append(CheckResult("symmetric case 3: interior NE", False, "no interior candidate"))

    state = _worked_state("asymmetric-case-1")
    surf_a, surf_b = payoff_surface(state, game)
    checks.append(_check("asymmetric case 1: $_A(p,0)", surf_a.along_p(0), (-10, 15 / 16)))
    checks.append(_check("asymmetric case 1: $_B(0,q)", surf_b.along_q(0), (-230 / 16, 365 / 16)))
    checks.append(_ess_check("asymmetric case 1: (0,0) ESS", state, 0.0, 0.0))

    state = _worked_state("asymmetric-case-2")
    surf_a, surf_b = payoff_surface(state, game)
    checks.append(_check("asymmetric case 2: $(1,1)", (surf_a(1, 1), surf_b(1, 1)), (455 / 16, 205 / 16)))
    checks.append(_check("asymmetric case 2: $_A(p,1)", surf_a.along_p(1), (20, 135 / 16)))
    checks.append(_check("asymmetric case 2: $_B(1,q)", surf_b.along_q(1), (270 / 16, -65 / 16)))
    checks.append(_ess_check("asymmetric case 2: (1,1) ESS", state, 1.0, 1.0))

    # Interior point of the asymmetric game: NE, never strict
    a2, b2, c2, d2 = WORKED_STATES["asymmetric-case-2"]
    denominator = 12 * (-a2 - b2 + c2 + d2)
    p_star = (-7 * a2 - 5 * b2 + 7 * c2 + 5 * d2) / denominator
    q_star = (-7 * a2 - 5 * b2 + 5 * c2 + 7 * d2) / denominator
    report = find_nash(surf_a, surf_b)
    checks.append(CheckResult("asymmetric: game kind", report.game_kind is GameKind.ASYMMETRIC))
    checks.append(_ess_check("asymmetric case 3: interior NE is not an ESS", state, p_star, q_star, expect_ess=False))
    return checks


GOLDEN_SUITES: Tuple[Callable[[], List[CheckResult]], ...] = (_classical_checks, _quantum_checks)


def run_golden_suite() -> List[CheckResult]:
    """Evaluate every golden case."""
    checks = []
    for suite in GOLDEN_SUITES:
        checks.extend(suite())
    return checks


def run_verification(trials: int = DEFAULT_TRIALS, seed: int = DEFAULT_SEED,
                     tol: float = DEFAULT_TOLERANCE) -> VerificationReport:
    """Oracle run followed by the golden suite."""
    report = VerificationReport(run_oracle(trials, seed, tol) + run_golden_suite())
    for failure in report.failures():
        logger.debug("verification failure: %s (%s)", failure.name, failure.detail)
    return report
