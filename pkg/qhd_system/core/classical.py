"""
Classical Hawk-Dove Module.

Builds the classical two-strategy Hawk-Dove game and analyses its pure and
mixed evolutionarily stable strategies.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum, IntEnum
from typing import List, Optional, Sequence, Tuple

from qhd_system.core.errors import DegenerateGameError, DomainError, ValidationError

logger = logging.getLogger(__name__)

# Relative tolerance used for payoff equalities; multiplied by the payoff scale
RELATIVE_TOLERANCE = 1e-9

Payoff = Tuple[float, float]


class Strategy(IntEnum):
    """Row/column index of a pure strategy."""
    HAWK = 0
    DOVE = 1


class PureESSStatus(Enum):
    ESS_STRICT = "ESS-strict"
    ESS_SECOND_CONDITION = "ESS-by-second-condition"
    NOT_ESS = "not-ESS"


@dataclass(frozen=True)
class HawkDoveParams:
    """Parameters of the Hawk-Dove contest.

    Attributes:
        resource_value: Value of the contested resource
        injury_cost: Payoff change from sustaining an injury (negative)
        display_cost: Payoff change from a display contest (negative)
        losing_cost: Payoff of the loser of a Hawk-Dove encounter
    """
    resource_value: float
    injury_cost: float
    display_cost: float
    losing_cost: float = 0.0

    def validate(self, strict_signs: bool = False) -> None:
        """Check the parameters.

        Args:
            strict_signs: Also require resource_value > 0 and negative costs

        Raises:
            ValidationError: Naming the first offending field
        """
        for name in ("resource_value", "injury_cost", "display_cost", "losing_cost"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValidationError(f"{name} must be finite, got {value}", field=name)

        if not strict_signs:
            return
        if self.resource_value <= 0:
            raise ValidationError(
                f"resource_value must be positive, got {self.resource_value}", field="resource_value")
        if self.injury_cost >= 0:
            raise ValidationError(
                f"injury_cost must be negative, got {self.injury_cost}", field="injury_cost")
        if self.display_cost >= 0:
            raise ValidationError(
                f"display_cost must be negative, got {self.display_cost}", field="display_cost")


@dataclass(frozen=True)
class BimatrixGame2x2:
    """Two-player, two-strategy game.

    ``payoff[r][c]`` is the pair (row payoff, column payoff) when the row
    player uses strategy r and the column player strategy c, with
    strategies indexed by :class:`Strategy`.
    """
    payoff: Tuple[Tuple[Payoff, Payoff], Tuple[Payoff, Payoff]]

    def __post_init__(self):
        for r in range(2):
            for c in range(2):
                for value in self.payoff[r][c]:
                    if not math.isfinite(value):
                        raise ValidationError(f"payoff entry ({r}, {c}) is not finite: {value}",
                                              field="payoff")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Sequence[float]]]) -> "BimatrixGame2x2":
        """Build a game from nested lists ``[[(a, b), (a, b)], [(a, b), (a, b)]]``."""
        return cls(tuple(
            tuple((float(rows[r][c][0]), float(rows[r][c][1])) for c in range(2))
            for r in range(2)
        ))

    def row(self, r: int, c: int) -> float:
        """Row player's payoff for the profile (r, c)."""
        return self.payoff[r][c][0]

    def col(self, r: int, c: int) -> float:
        """Column player's payoff for the profile (r, c)."""
        return self.payoff[r][c][1]

    def scale(self) -> float:
        """Largest absolute payoff entry, or 1 for the zero game."""
        largest = max(abs(v) for r in range(2) for c in range(2) for v in self.payoff[r][c])
        return largest if largest > 0 else 1.0

    def is_symmetric(self, tol: Optional[float] = None) -> bool:
        """True when the column payoffs are the transpose of the row payoffs."""
        tol = RELATIVE_TOLERANCE * self.scale() if tol is None else tol
        return all(abs(self.col(r, c) - self.row(c, r)) <= tol for r in range(2) for c in range(2))

    def as_lists(self) -> List[List[List[float]]]:
        return [[list(self.payoff[r][c]) for c in range(2)] for r in range(2)]


@dataclass(frozen=True)
class MixedESS:
    """Interior population state where Hawk and Dove earn equal fitness."""
    hawk_fraction: float
    stable: bool


@dataclass
class ClassicalESSReport:
    hawk_pure: PureESSStatus
    dove_pure: PureESSStatus
    mixed: Optional[MixedESS] = None
    reasons: List[str] = field(default_factory=list)


@dataclass(frozen=True)
class FitnessPair:
    fitness_hawk: float
    fitness_dove: float


def build_hawk_dove(params: HawkDoveParams, strict_signs: bool = False) -> BimatrixGame2x2:
    """Build the Hawk-Dove payoff matrix.

    The loser of a Hawk-Dove encounter receives ``losing_cost``; with the
    default of 0 the matrix is the textbook one.

    Args:
        params: Game parameters
        strict_signs: Enforce the sign conventions of the parameters

    Returns:
        The bimatrix game
    """
    params.validate(strict_signs)
    v = params.resource_value
    hawk_hawk = v / 2 + params.injury_cost / 2
    dove_dove = v / 2 + params.display_cost
    loss = params.losing_cost
    return BimatrixGame2x2((
        ((hawk_hawk, hawk_hawk), (v, loss)),
        ((loss, v), (dove_dove, dove_dove)),
    ))


def _pure_status(game: BimatrixGame2x2, own: Strategy, tol: float) -> Tuple[PureESSStatus, str]:
    other = Strategy(1 - own)
    against_self = game.row(own, own) - game.row(other, own)
    against_other = game.row(own, other) - game.row(other, other)
    name = own.name.capitalize()

    if against_self > tol:
        return (PureESSStatus.ESS_STRICT,
                f"{name}: $({name},{name}) exceeds the invader's payoff by {against_self:g}")
    if abs(against_self) <= tol and against_other > tol:
        return (PureESSStatus.ESS_SECOND_CONDITION,
                f"{name}: tie against {name} ({against_self:g}); wins against the invader by {against_other:g}")
    if abs(against_self) <= tol:
        return (PureESSStatus.NOT_ESS,
                f"{name}: tie against {name} and no advantage against the invader ({against_other:g})")
    return (PureESSStatus.NOT_ESS,
            f"{name}: invader does better against {name} by {-against_self:g}")


def classical_pure_ess(game: BimatrixGame2x2, tol: Optional[float] = None) -> ClassicalESSReport:
    """Classify Hawk and Dove as pure evolutionarily stable strategies.

    A pure strategy S is strictly stable when $(S,S) > $(T,S), and stable by
    the second condition when $(S,S) = $(T,S) and $(S,T) > $(T,T), where T
    is the other strategy. Payoffs are the row player's.

    Args:
        game: Classical game
        tol: Absolute tolerance for the equality test, default 1e-9 x payoff scale

    Returns:
        Report with the pure fields filled in
    """
    tol = RELATIVE_TOLERANCE * game.scale() if tol is None else tol
    hawk, hawk_reason = _pure_status(game, Strategy.HAWK, tol)
    dove, dove_reason = _pure_status(game, Strategy.DOVE, tol)
    return ClassicalESSReport(hawk_pure=hawk, dove_pure=dove, reasons=[hawk_reason, dove_reason])


def classical_mixed_ess(game: BimatrixGame2x2, tol: Optional[float] = None) -> Optional[MixedESS]:
    """Find the interior Hawk fraction with equal Hawk and Dove fitness.

    For the Hawk-Dove matrix this is h = (2d - v) / (2d + i). The point is
    stable when K = ($(H,H) - $(D,H)) - ($(H,D) - $(D,D)) is negative,
    since $(h*, s) - $(s, s) = -K (s - h*)^2.

    Args:
        game: Classical game
        tol: Absolute tolerance for the denominator, default 1e-9 x payoff scale

    Returns:
        The mixed point, or None when it is not strictly inside (0, 1)

    Raises:
        DegenerateGameError: If the denominator vanishes
    """
    tol = RELATIVE_TOLERANCE * game.scale() if tol is None else tol
    gain_vs_dove = game.row(Strategy.HAWK, Strategy.DOVE) - game.row(Strategy.DOVE, Strategy.DOVE)
    gain_vs_hawk = game.row(Strategy.HAWK, Strategy.HAWK) - game.row(Strategy.DOVE, Strategy.HAWK)
    curvature = gain_vs_hawk - gain_vs_dove

    if abs(curvature) <= tol:
        raise DegenerateGameError("mixed-strategy denominator vanishes: fitness difference is constant in h")

    h = -gain_vs_dove / curvature
    if not 0.0 < h < 1.0:
        logger.debug("indifference point h=%g lies outside (0, 1)", h)
        return None
    return MixedESS(hawk_fraction=h, stable=curvature < -tol)


def fitness(game: BimatrixGame2x2, h: float) -> FitnessPair:
    """Fitness of Hawk and Dove in a population with Hawk fraction h.

    Raises:
        DomainError: If h is outside [0, 1]
    """
    if not 0.0 <= h <= 1.0:
        raise DomainError(f"hawk fraction must lie in [0, 1], got {h}", field="h")
    w_hawk = game.row(Strategy.HAWK, Strategy.HAWK) * h + game.row(Strategy.HAWK, Strategy.DOVE) * (1 - h)
    w_dove = game.row(Strategy.DOVE, Strategy.HAWK) * h + game.row(Strategy.DOVE, Strategy.DOVE) * (1 - h)
    return FitnessPair(fitness_hawk=w_hawk, fitness_dove=w_dove)


def analyze_classical(game: BimatrixGame2x2, params: Optional[HawkDoveParams] = None) -> ClassicalESSReport:
    """Full classical report: pure verdicts, mixed point and, when the game
    was built from ``params``, the closed-form Hawk-Dove conditions.
    """
    report = classical_pure_ess(game)
    try:
        report.mixed = classical_mixed_ess(game)
    except DegenerateGameError as e:
        report.reasons.append(f"mixed: {e}")
    else:
        if report.mixed is None:
            report.reasons.append("mixed: no interior point with equal fitness")
        else:
            verdict = "stable" if report.mixed.stable else "not stable"
            report.reasons.append(f"mixed: h = {report.mixed.hawk_fraction:.17g} ({verdict})")

    if params is not None:
        v, i, d, loss = params.resource_value, params.injury_cost, params.display_cost, params.losing_cost
        # Hawk beats an invading Dove when (v + i)/2 > loss; Dove's own test does not involve loss
        label = "v + i" if loss == 0 else "v + i - 2L"
        margin = v + i - 2 * loss
        report.reasons.append(f"{label} = {margin:g} ({'>= 0' if margin >= 0 else '< 0'}: "
                              f"Hawk {'is' if margin >= 0 else 'is not'} an ESS by the closed form)")
        report.reasons.append(f"v/2 - d = {v / 2 - d:g} ({'Dove can never be an ESS' if v / 2 > d else 'Dove may be an ESS'})")
    return report
