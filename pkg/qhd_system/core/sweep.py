"""
State Sweep Module.

Evaluates the equilibrium analysis over a two-dimensional slice of the
initial-state simplex. Two squared moduli are gridded on [0, 1]; the
remaining probability mass is split between the other two components by a
fixed ratio.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
from typing import List, Tuple

from qhd_system.core.classical import BimatrixGame2x2
from qhd_system.core.equilibria import find_nash
from qhd_system.core.errors import DomainError
from qhd_system.core.quantum import MODULI_NAMES, InitialState, PayoffSurface, is_symmetric, payoff_surface

logger = logging.getLogger(__name__)

Moduli = Tuple[float, float, float, float]


@dataclass(frozen=True)
class SweepSettings:
    """Grid definition.

    Attributes:
        axes: The two gridded squared moduli, from a2, b2, c2, d2
        resolution: Grid points per axis, endpoints included
        split: Share of the remaining mass given to the first non-gridded modulus
        workers: Worker processes; 1 evaluates in-process
    """
    axes: Tuple[str, str] = ("a2", "c2")
    resolution: int = 11
    split: float = 0.5
    workers: int = 1

    def __post_init__(self):
        if len(self.axes) != 2 or self.axes[0] == self.axes[1] or any(a not in MODULI_NAMES for a in self.axes):
            raise DomainError(f"axes must be two distinct names from {MODULI_NAMES}, got {self.axes}", field="axes")
        if self.resolution < 2:
            raise DomainError(f"resolution must be at least 2, got {self.resolution}", field="resolution")
        if not 0.0 <= self.split <= 1.0:
            raise DomainError(f"split must lie in [0, 1], got {self.split}", field="split")
        if self.workers < 1:
            raise DomainError(f"workers must be at least 1, got {self.workers}", field="workers")


@dataclass(frozen=True)
class SweepCell:
    index: Tuple[int, int]
    moduli: Moduli
    surface_a: PayoffSurface
    surface_b: PayoffSurface
    symmetric: bool
    ne_kinds: str
    p_star: str
    q_star: str
    ess_found: bool


SWEEP_COLUMNS = ("a2", "b2", "c2", "d2",
                 "kpq_A", "kp_A", "kq_A", "k0_A",
                 "kpq_B", "kp_B", "kq_B", "k0_B",
                 "symmetric", "ne_kinds", "p_star", "q_star", "ess_found")


def grid_points(settings: SweepSettings) -> List[Tuple[Tuple[int, int], Moduli]]:
    """Grid cells inside the simplex, ordered by (i, j)."""
    first, second = (MODULI_NAMES.index(a) for a in settings.axes)
    rest = [k for k in range(4) if k not in (first, second)]
    steps = settings.resolution - 1

    points = []
    for i in range(settings.resolution):
        for j in range(settings.resolution):
            x, y = i / steps, j / steps
            if x + y > 1.0 + 1e-12:
                continue
            remaining = max(0.0, 1.0 - x - y)
            moduli = [0.0] * 4
            moduli[first], moduli[second] = x, y
            moduli[rest[0]] = settings.split * remaining
            moduli[rest[1]] = remaining - moduli[rest[0]]
            points.append(((i, j), tuple(moduli)))
    return points


def _format_coordinate(x: float) -> str:
    return f"{x:.17g}"


def evaluate_cell(game: BimatrixGame2x2, point: Tuple[Tuple[int, int], Moduli]) -> SweepCell:
    """Analyse one grid cell."""
    index, moduli = point
    state = InitialState.from_squared_moduli(*moduli)
    surf_a, surf_b = payoff_surface(state, game)
    report = find_nash(surf_a, surf_b)
    stable = report.ess()
    return SweepCell(
        index=index,
        moduli=moduli,
        surface_a=surf_a,
        surface_b=surf_b,
        symmetric=is_symmetric(state),
        ne_kinds=";".join(f"{c.kind.value}:{c.ne_status.value}" for c in report.nash()),
        p_star=";".join(_format_coordinate(c.p_star) for c in stable),
        q_star=";".join(_format_coordinate(c.q_star) for c in stable),
        ess_found=bool(stable),
    )


def run_sweep(game: BimatrixGame2x2, settings: SweepSettings) -> List[SweepCell]:
    """Evaluate every grid cell; rows come back in grid order regardless of workers."""
    points = grid_points(settings)
    logger.debug("sweeping %d cells over %s with %d worker(s)", len(points), settings.axes, settings.workers)
    evaluate = partial(evaluate_cell, game)
    if settings.workers == 1:
        return [evaluate(point) for point in points]
    chunksize = max(1, len(points) // (4 * settings.workers))
    with ProcessPoolExecutor(max_workers=settings.workers) as executor:
        return list(executor.map(evaluate, points, chunksize=chunksize))
