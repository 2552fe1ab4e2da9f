"""
Replicator Dynamics Module.

Discrete-time replicator dynamics for an incumbent population invaded by a
small share of mutants, under a bilinear payoff surface. Used to check the
static ESS verdicts against population behaviour.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Tuple

from qhd_system.core.errors import DomainError, SimulationError
from qhd_system.core.quantum import PayoffSurface

logger = logging.getLogger(__name__)

DEFAULT_EPSILON = 0.01
DEFAULT_GENERATIONS = 100_000
DEFAULT_STEP_SIZE = 0.1
DEFAULT_EXTINCTION_THRESHOLD = 1e-6

# Relative fitness gap treated as exact balance
COEXISTENCE_TOLERANCE = 1e-12
# Consecutive generations of decline required before extinction may be certified
CERTIFY_WINDOW = 100


class InvasionVerdict(Enum):
    MUTANT_EXTINCT = "mutant-extinct"
    MUTANT_FIXATES = "mutant-fixates"
    COEXISTENCE = "coexistence"
    MAX_GENERATIONS = "max-generations-reached"


def _check_unit(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise DomainError(f"{name} must lie in [0, 1], got {value}", field=name)


def _check_run_settings(epsilon: float, generations: int, step_size: float, extinction_threshold: float) -> None:
    if not 0.0 < epsilon < 1.0:
        raise DomainError(f"epsilon must lie in (0, 1), got {epsilon}", field="epsilon")
    if generations < 1:
        raise DomainError(f"generations must be positive, got {generations}", field="generations")
    if not 0.0 < step_size <= 1.0:
        raise DomainError(f"step_size must lie in (0, 1], got {step_size}", field="step_size")
    if not 0.0 < extinction_threshold < 0.5:
        raise DomainError(f"extinction_threshold must lie in (0, 0.5), got {extinction_threshold}",
                          field="extinction_threshold")


@dataclass(frozen=True)
class InvasionScenario:
    """Incumbent/mutant pair playing a symmetric game.

    Attributes:
        surface: Payoff $(own, opponent)
        incumbent: Strategy of the resident population
        mutant: Strategy of the invaders
        epsilon: Initial mutant share
        generations: Generation budget
        step_size: Replicator step
        extinction_threshold: Share below which the mutant counts as extinct
        certify: Allow early extinction once the decline is provably permanent
    """
    surface: PayoffSurface
    incumbent: float
    mutant: float
    epsilon: float = DEFAULT_EPSILON
    generations: int = DEFAULT_GENERATIONS
    step_size: float = DEFAULT_STEP_SIZE
    extinction_threshold: float = DEFAULT_EXTINCTION_THRESHOLD
    certify: bool = True

    def __post_init__(self):
        _check_unit("incumbent", self.incumbent)
        _check_unit("mutant", self.mutant)
        if self.incumbent == self.mutant:
            raise DomainError("incumbent and mutant strategies must differ", field="mutant")
        _check_run_settings(self.epsilon, self.generations, self.step_size, self.extinction_threshold)


@dataclass
class InvasionTrajectory:
    shares: List[float]
    verdict: InvasionVerdict
    extinction_threshold: float
    certified: bool = False

    @property
    def generations(self) -> int:
        return len(self.shares) - 1

    @property
    def final_share(self) -> float:
        return self.shares[-1]


@dataclass(frozen=True)
class RoleInvasionScenario:
    """Mutants entering both role populations of an asymmetric game.

    ``incumbent`` and ``mutant`` are (p, q) pairs: the row population plays
    p against the column population playing q.
    """
    surf_a: PayoffSurface
    surf_b: PayoffSurface
    incumbent: Tuple[float, float]
    mutant: Tuple[float, float]
    epsilon: float = DEFAULT_EPSILON
    generations: int = DEFAULT_GENERATIONS
    step_size: float = DEFAULT_STEP_SIZE
    extinction_threshold: float = DEFAULT_EXTINCTION_THRESHOLD

    def __post_init__(self):
        for role, index in (("row", 0), ("column", 1)):
            _check_unit(f"{role} incumbent", self.incumbent[index])
            _check_unit(f"{role} mutant", self.mutant[index])
            if self.incumbent[index] == self.mutant[index]:
                raise DomainError(f"{role} incumbent and mutant strategies must differ", field="mutant")
        _check_run_settings(self.epsilon, self.generations, self.step_size, self.extinction_threshold)


@dataclass
class RoleInvasionTrajectory:
    row_shares: List[float] = field(default_factory=list)
    col_shares: List[float] = field(default_factory=list)
    verdict: InvasionVerdict = InvasionVerdict.MAX_GENERATIONS
    extinction_threshold: float = DEFAULT_EXTINCTION_THRESHOLD


def population_fitness(surface: PayoffSurface, strategy: float, mutant_share: float,
                       incumbent: float, mutant: float) -> float:
    """Payoff of ``strategy`` against the population-average opponent.

    The opponent plays (1 - x)*s* + x*s_m; because the payoff is linear in
    the opponent's strategy this equals the average over random pairings.
    """
    for name, value in (("strategy", strategy), ("mutant_share", mutant_share),
                        ("incumbent", incumbent), ("mutant", mutant)):
        _check_unit(name, value)
    opponent = (1 - mutant_share) * incumbent + mutant_share * mutant
    return surface(strategy, opponent)


def payoff_scale(*surfaces: PayoffSurface) -> float:
    """max(1, largest absolute corner value) over the surfaces."""
    return max([1.0] + [abs(v) for s in surfaces for v in s.corners()])


def _replicator_step(share: float, advantage: float, step_size: float, scale: float) -> float:
    updated = share + step_size * share * (1 - share) * advantage / scale
    return min(1.0, max(0.0, updated))


def simulate_invasion(scenario: InvasionScenario) -> InvasionTrajectory:
    """Iterate the mutant share until it dies out, takes over, balances or the budget ends.

    Each generation the share x moves by step * x(1-x)(W_mut - W_inc)/scale.
    With ``certify`` on, a run whose share has fallen for CERTIFY_WINDOW
    generations is declared extinct early when the incumbent's advantage is
    non-negative at vanishing share and positive at the current share; the
    advantage is linear in the share, so it stays positive below it and the
    share keeps falling to zero.

    Raises:
        SimulationError: If a fitness value is not finite
    """
    surface = scenario.surface
    inc, mut = scenario.incumbent, scenario.mutant
    scale = payoff_scale(surface)
    balance = COEXISTENCE_TOLERANCE * scale
    head_start = surface(inc, inc) - surface(mut, inc)

    share = scenario.epsilon
    shares = [share]
    declining = 0

    for generation in range(scenario.generations):
        w_inc = population_fitness(surface, inc, share, inc, mut)
        w_mut = population_fitness(surface, mut, share, inc, mut)
        if not (math.isfinite(w_inc) and math.isfinite(w_mut)):
            raise SimulationError(f"non-finite fitness at generation {generation}", generation)
        advantage = w_mut - w_inc

        if abs(advantage) < balance:
            return InvasionTrajectory(shares, InvasionVerdict.COEXISTENCE, scenario.extinction_threshold)
        if (scenario.certify and declining >= CERTIFY_WINDOW
                and advantage < 0 and head_start >= -balance):
            logger.debug("extinction certified at generation %d, share %.3g", generation, share)
            return InvasionTrajectory(shares, InvasionVerdict.MUTANT_EXTINCT,
                                      scenario.extinction_threshold, certified=True)

        updated = _replicator_step(share, advantage, scenario.step_size, scale)
        declining = declining + 1 if updated < share else 0
        share = updated
        shares.append(share)

        if share < scenario.extinction_threshold:
            return InvasionTrajectory(shares, InvasionVerdict.MUTANT_EXTINCT, scenario.extinction_threshold)
        if share > 1 - scenario.extinction_threshold:
            return InvasionTrajectory(shares, InvasionVerdict.MUTANT_FIXATES, scenario.extinction_threshold)

    logger.warning("invasion run hit the generation budget (%d) at share %.6g", scenario.generations, share)
    return InvasionTrajectory(shares, InvasionVerdict.MAX_GENERATIONS, scenario.extinction_threshold)


def simulate_role_invasion(scenario: RoleInvasionScenario) -> RoleInvasionTrajectory:
    """Two-population replicator dynamics, one population per player role.

    The row population faces the column population's average strategy and
    vice versa; both mutant shares are updated simultaneously.

    Raises:
        SimulationError: If a fitness value is not finite
    """
    surf_a, surf_b = scenario.surf_a, scenario.surf_b
    (p_inc, q_inc), (p_mut, q_mut) = scenario.incumbent, scenario.mutant
    scale = payoff_scale(surf_a, surf_b)
    balance = COEXISTENCE_TOLERANCE * scale
    threshold = scenario.extinction_threshold

    x = y = scenario.epsilon
    trajectory = RoleInvasionTrajectory([x], [y], extinction_threshold=threshold)

    for generation in range(scenario.generations):
        p_avg = (1 - x) * p_inc + x * p_mut
        q_avg = (1 - y) * q_inc + y * q_mut
        row_advantage = surf_a(p_mut, q_avg) - surf_a(p_inc, q_avg)
        col_advantage = surf_b(p_avg, q_mut) - surf_b(p_avg, q_inc)
        if not (math.isfinite(row_advantage) and math.isfinite(col_advantage)):
            raise SimulationError(f"non-finite fitness at generation {generation}", generation)

        if abs(row_advantage) < balance and abs(col_advantage) < balance:
            trajectory.verdict = InvasionVerdict.COEXISTENCE
            return trajectory

        x = _replicator_step(x, row_advantage, scenario.step_size, scale)
        y = _replicator_step(y, col_advantage, scenario.step_size, scale)
        trajectory.row_shares.append(x)
        trajectory.col_shares.append(y)

        if x < threshold and y < threshold:
            trajectory.verdict = InvasionVerdict.MUTANT_EXTINCT
            return trajectory
        if x > 1 - threshold or y > 1 - threshold:
            trajectory.verdict = InvasionVerdict.MUTANT_FIXATES
            return trajectory

    logger.warning("role invasion run hit the generation budget (%d)", scenario.generations)
    trajectory.verdict = InvasionVerdict.MAX_GENERATIONS
    return trajectory
