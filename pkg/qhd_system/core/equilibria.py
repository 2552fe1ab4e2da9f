"""
Equilibrium Analysis Module.

Enumerates Nash equilibria of a pair of bilinear payoff surfaces on the unit
square and classifies them as evolutionarily stable strategies, using the
symmetric (two-condition) rule or the asymmetric (strict Nash) rule.

Alice chooses p and Bob chooses q. Alice's payoff rises with p at rate
``k_pq*q + k_p`` and Bob's rises with q at rate ``k'_pq*p + k'_q``; every
check below is phrased through these two linear gains.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import List, Optional, Tuple

from qhd_system.core.classical import BimatrixGame2x2, RELATIVE_TOLERANCE
from qhd_system.core.errors import DomainError, SymmetryError
from qhd_system.core.quantum import InitialState, PayoffSurface, surface_coefficient_map

logger = logging.getLogger(__name__)

# Distance below which two strategies are treated as the same point
POINT_TOLERANCE = 1e-12


class CandidateKind(Enum):
    CORNER = "corner"
    EDGE = "edge"
    INTERIOR = "interior"


class NashStatus(Enum):
    NOT_NE = "not-NE"
    NE = "NE"
    STRICT_NE = "strict-NE"
    NE_CONTINUUM = "NE-continuum"


class ESSStatus(Enum):
    ESS = "ESS"
    NOT_ESS = "not-ESS"
    UNDETERMINED = "undetermined-at-tolerance"
    NOT_APPLICABLE = "not-applicable"


class GameKind(Enum):
    SYMMETRIC = "symmetric"
    ASYMMETRIC = "asymmetric"


@dataclass(frozen=True)
class Margin:
    """One inequality that was checked: ``condition`` must be positive."""
    condition: str
    value: float


@dataclass(frozen=True)
class EquilibriumCandidate:
    """A strategy profile examined by the analysis.

    For continua, ``p_range``/``q_range`` give the extent of the set and
    (p_star, q_star) is its midpoint.
    """
    p_star: float
    q_star: float
    kind: CandidateKind
    ne_status: NashStatus
    ess_status: ESSStatus = ESSStatus.NOT_APPLICABLE
    justification: Tuple[Margin, ...] = ()
    p_range: Optional[Tuple[float, float]] = None
    q_range: Optional[Tuple[float, float]] = None

    @property
    def is_nash(self) -> bool:
        return self.ne_status in (NashStatus.NE, NashStatus.STRICT_NE, NashStatus.NE_CONTINUUM)

    @property
    def is_ess(self) -> bool:
        return self.ess_status is ESSStatus.ESS


@dataclass
class EquilibriumReport:
    game_kind: GameKind
    candidates: List[EquilibriumCandidate]
    surfaces: Tuple[PayoffSurface, PayoffSurface]
    tolerance: float

    def nash(self) -> List[EquilibriumCandidate]:
        return [c for c in self.candidates if c.is_nash]

    def ess(self) -> List[EquilibriumCandidate]:
        return [c for c in self.candidates if c.is_ess]


@dataclass(frozen=True)
class NashCondition:
    """Linear inequality on (|a|^2, |b|^2, |c|^2, |d|^2) for a corner to be a strict NE."""
    player: str
    coefficients: Tuple[float, float, float, float]
    relation: str

    def evaluate(self, state: InitialState) -> float:
        return sum(k * m for k, m in zip(self.coefficients, state.squared_moduli()))

    def holds(self, state: InitialState) -> bool:
        value = self.evaluate(state)
        return value > 0 if self.relation == ">" else value < 0

    def describe(self) -> str:
        terms = " ".join(f"{k:+g}*{name}" for k, name in zip(self.coefficients, ("|a|^2", "|b|^2", "|c|^2", "|d|^2")))
        return f"{self.player}: {terms} {self.relation} 0"


def default_tolerance(surf_a: PayoffSurface, surf_b: PayoffSurface) -> float:
    """1e-9 times the payoff scale of the pair."""
    return RELATIVE_TOLERANCE * max(surf_a.scale(), surf_b.scale())


def surfaces_symmetric(surf_a: PayoffSurface, surf_b: PayoffSurface, tol: Optional[float] = None) -> bool:
    """True when $_B(p, q) == $_A(q, p) coefficient-wise."""
    tol = default_tolerance(surf_a, surf_b) if tol is None else tol
    return all(abs(x - y) <= tol for x, y in zip(surf_b.transposed().coefficients(), surf_a.coefficients()))


def _gain_a(surf_a: PayoffSurface, q: float) -> float:
    return surf_a.k_pq * q + surf_a.k_p


def _gain_b(surf_b: PayoffSurface, p: float) -> float:
    return surf_b.k_pq * p + surf_b.k_q


def _nash_status(margins: List[float], tol: float) -> NashStatus:
    if any(m < -tol for m in margins):
        return NashStatus.NOT_NE
    if all(m > tol for m in margins):
        return NashStatus.STRICT_NE
    return NashStatus.NE


def _feasible_interval(slope: float, intercept: float, tol: float) -> Optional[Tuple[float, float]]:
    """Sub-interval of [0, 1] where slope*x + intercept >= -tol."""
    if abs(slope) <= POINT_TOLERANCE:
        return (0.0, 1.0) if intercept >= -tol else None
    root = (-tol - intercept) / slope
    if slope > 0:
        lo, hi = max(0.0, root), 1.0
    else:
        lo, hi = 0.0, min(1.0, root)
    return (lo, hi) if lo <= hi else None


def _is_interior(x: float) -> bool:
    return POINT_TOLERANCE < x < 1.0 - POINT_TOLERANCE


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def _corner_candidates(surf_a: PayoffSurface, surf_b: PayoffSurface, tol: float) -> List[EquilibriumCandidate]:
    candidates = []
    for p_star in (0.0, 1.0):
        for q_star in (0.0, 1.0):
            # Payoff at the corner minus payoff after switching to the opposite pure tactic
            margin_a = (2 * p_star - 1) * _gain_a(surf_a, q_star)
            margin_b = (2 * q_star - 1) * _gain_b(surf_b, p_star)
            justification = (
                Margin(f"$_A({_fmt(p_star)},{_fmt(q_star)}) - $_A({_fmt(1 - p_star)},{_fmt(q_star)})", margin_a),
                Margin(f"$_B({_fmt(p_star)},{_fmt(q_star)}) - $_B({_fmt(p_star)},{_fmt(1 - q_star)})", margin_b),
            )
            candidates.append(EquilibriumCandidate(
                p_star=p_star, q_star=q_star, kind=CandidateKind.CORNER,
                ne_status=_nash_status([margin_a, margin_b], tol),
                justification=justification,
            ))
    return candidates


def _edge_candidates(surf_a: PayoffSurface, surf_b: PayoffSurface, tol: float) -> List[EquilibriumCandidate]:
    candidates = []
    for q_edge in (0.0, 1.0):
        # Alice indifferent along q = q_edge; Bob must still prefer q_edge
        if abs(_gain_a(surf_a, q_edge)) > tol:
            continue
        sign = 2 * q_edge - 1
        interval = _feasible_interval(sign * surf_b.k_pq, sign * surf_b.k_q, tol)
        if interval is None or interval[1] - interval[0] <= RELATIVE_TOLERANCE:
            continue
        candidates.append(EquilibriumCandidate(
            p_star=(interval[0] + interval[1]) / 2, q_star=q_edge, kind=CandidateKind.EDGE,
            ne_status=NashStatus.NE_CONTINUUM,
            justification=(Margin(f"gain of Alice along q={_fmt(q_edge)} (indifferent)", _gain_a(surf_a, q_edge)),),
            p_range=interval, q_range=(q_edge, q_edge),
        ))
    for p_edge in (0.0, 1.0):
        if abs(_gain_b(surf_b, p_edge)) > tol:
            continue
        sign = 2 * p_edge - 1
        interval = _feasible_interval(sign * surf_a.k_pq, sign * surf_a.k_p, tol)
        if interval is None or interval[1] - interval[0] <= RELATIVE_TOLERANCE:
            continue
        candidates.append(EquilibriumCandidate(
            p_star=p_edge, q_star=(interval[0] + interval[1]) / 2, kind=CandidateKind.EDGE,
            ne_status=NashStatus.NE_CONTINUUM,
            justification=(Margin(f"gain of Bob along p={_fmt(p_edge)} (indifferent)", _gain_b(surf_b, p_edge)),),
            p_range=(p_edge, p_edge), q_range=interval,
        ))
    return candidates


def _interior_candidates(surf_a: PayoffSurface, surf_b: PayoffSurface, tol: float) -> List[EquilibriumCandidate]:
    alice_flat = abs(surf_a.k_pq) <= tol and abs(surf_a.k_p) <= tol
    bob_flat = abs(surf_b.k_pq) <= tol and abs(surf_b.k_q) <= tol

    if alice_flat and bob_flat:
        return [EquilibriumCandidate(
            p_star=0.5, q_star=0.5, kind=CandidateKind.INTERIOR, ne_status=NashStatus.NE_CONTINUUM,
            justification=(Margin("both players indifferent everywhere", 0.0),),
            p_range=(0.0, 1.0), q_range=(0.0, 1.0),
        )]
    if alice_flat:
        if abs(surf_b.k_pq) <= tol:
            return []
        p_line = -surf_b.k_q / surf_b.k_pq
        if not _is_interior(p_line):
            return []
        return [EquilibriumCandidate(
            p_star=p_line, q_star=0.5, kind=CandidateKind.INTERIOR, ne_status=NashStatus.NE_CONTINUUM,
            justification=(Margin("Alice indifferent everywhere; Bob indifferent at this p", 0.0),),
            p_range=(p_line, p_line), q_range=(0.0, 1.0),
        )]
    if bob_flat:
        if abs(surf_a.k_pq) <= tol:
            return []
        q_line = -surf_a.k_p / surf_a.k_pq
        if not _is_interior(q_line):
            return []
        return [EquilibriumCandidate(
            p_star=0.5, q_star=q_line, kind=CandidateKind.INTERIOR, ne_status=NashStatus.NE_CONTINUUM,
            justification=(Margin("Bob indifferent everywhere; Alice indifferent at this q", 0.0),),
            p_range=(0.0, 1.0), q_range=(q_line, q_line),
        )]

    if abs(surf_a.k_pq) <= tol or abs(surf_b.k_pq) <= tol:
        return []
    # Each player's mix makes the opponent indifferent
    q_star = -surf_a.k_p / surf_a.k_pq
    p_star = -surf_b.k_q / surf_b.k_pq
    if not (_is_interior(p_star) and _is_interior(q_star)):
        return []
    return [EquilibriumCandidate(
        p_star=p_star, q_star=q_star, kind=CandidateKind.INTERIOR, ne_status=NashStatus.NE,
        justification=(
            Margin("k_pq*q* + k_p (Alice indifferent)", _gain_a(surf_a, q_star)),
            Margin("k'_pq*p* + k'_q (Bob indifferent)", _gain_b(surf_b, p_star)),
        ),
    )]


def find_nash(surf_a: PayoffSurface, surf_b: PayoffSurface, tol: Optional[float] = None) -> EquilibriumReport:
    """Enumerate and classify the Nash equilibria of a bilinear game.

    The report lists the four corners (each marked NE, strict-NE or not-NE
    from its deviation margins), every edge along which one player is
    indifferent while the other keeps its pure choice (NE-continuum), and
    the interior mixed equilibrium when it exists. Every candidate is then
    classified for evolutionary stability with the rule matching the game
    kind.

    Args:
        surf_a: Alice's payoff surface
        surf_b: Bob's payoff surface
        tol: Absolute tolerance, default 1e-9 x payoff scale

    Returns:
        EquilibriumReport

    Raises:
        DomainError: If ``tol`` is given and is not a finite positive number
    """
    if tol is not None and not (math.isfinite(tol) and tol > 0):
        raise DomainError(f"tolerance must be a finite positive number, got {tol}", field="tol")
    tol = default_tolerance(surf_a, surf_b) if tol is None else tol
    kind = GameKind.SYMMETRIC if surfaces_symmetric(surf_a, surf_b, tol) else GameKind.ASYMMETRIC
    # Mirror Alice's surface so diagonal candidates come out exactly diagonal
    bob = surf_a.transposed() if kind is GameKind.SYMMETRIC else surf_b

    candidates = (_corner_candidates(surf_a, bob, tol)
                  + _edge_candidates(surf_a, bob, tol)
                  + _interior_candidates(surf_a, bob, tol))

    whole_square = any(c.p_range == (0.0, 1.0) and c.q_range == (0.0, 1.0) for c in candidates)
    if whole_square:
        candidates = [c for c in candidates if c.kind is not CandidateKind.EDGE]

    classified = []
    for candidate in candidates:
        if kind is GameKind.SYMMETRIC:
            candidate = classify_symmetric_ess(surf_a, candidate, tol)
        else:
            candidate = classify_asymmetric_ess(surf_a, bob, candidate, tol)
        logger.debug("candidate (%s, %s) %s: %s / %s", candidate.p_star, candidate.q_star,
                     candidate.kind.value, candidate.ne_status.value, candidate.ess_status.value)
        classified.append(candidate)

    return EquilibriumReport(game_kind=kind, candidates=classified, surfaces=(surf_a, surf_b), tolerance=tol)


def _verdict(margins: List[Margin], tol: float) -> ESSStatus:
    if any(m.value < -tol for m in margins):
        return ESSStatus.NOT_ESS
    if all(m.value > tol for m in margins):
        return ESSStatus.ESS
    return ESSStatus.UNDETERMINED


def classify_symmetric_ess(surf: PayoffSurface, candidate: EquilibriumCandidate,
                           tol: Optional[float] = None,
                           surf_b: Optional[PayoffSurface] = None) -> EquilibriumCandidate:
    """Apply the two-condition ESS test of a symmetric game to a diagonal candidate.

    With s* = p_star, the first condition $(s*,s*) > $(s,s*) is linear in s
    and is checked at s in {0, 1}. When it ties, the second condition
    $(s*,s) > $(s,s) is checked at the same endpoints and, for an interior
    s*, through the curvature: $(s*,s) - $(s,s) = -k_pq (s - s*)^2.

    Args:
        surf: The shared payoff surface $(own, opponent)
        candidate: Candidate from find_nash
        tol: Absolute tolerance, default 1e-9 x payoff scale
        surf_b: Bob's surface, when given it must mirror ``surf``

    Returns:
        The candidate with ess_status and justification filled in

    Raises:
        SymmetryError: If ``surf_b`` is given and the game is not symmetric
    """
    tol = RELATIVE_TOLERANCE * surf.scale() if tol is None else tol
    if surf_b is not None and not surfaces_symmetric(surf, surf_b, tol):
        raise SymmetryError("symmetric ESS test requires $_B(p, q) == $_A(q, p)")

    if abs(candidate.p_star - candidate.q_star) > POINT_TOLERANCE:
        return replace(candidate, ess_status=ESSStatus.NOT_APPLICABLE)
    if not candidate.is_nash:
        return replace(candidate, ess_status=ESSStatus.NOT_ESS)
    if candidate.ne_status is NashStatus.NE_CONTINUUM:
        return replace(candidate, ess_status=ESSStatus.NOT_ESS,
                       justification=candidate.justification + (Margin("continuum: neighbours match the payoff", 0.0),))

    s = candidate.p_star
    deviations = [x for x in (0.0, 1.0) if abs(x - s) > POINT_TOLERANCE]

    def gain(x: float) -> float:
        return surf.k_pq * x + surf.k_p

    first = [Margin(f"$({_fmt(s)},{_fmt(s)}) - $({_fmt(x)},{_fmt(s)})", (s - x) * gain(s)) for x in deviations]
    status = _verdict(first, tol)
    if status is not ESSStatus.UNDETERMINED:
        return replace(candidate, ess_status=status, justification=candidate.justification + tuple(first))

    second = [Margin(f"$({_fmt(s)},{_fmt(x)}) - $({_fmt(x)},{_fmt(x)})", (s - x) * gain(x)) for x in deviations]
    if _is_interior(s):
        second.append(Margin("-k_pq (curvature of $(s*,s) - $(s,s))", -surf.k_pq))
    return replace(candidate, ess_status=_verdict(second, tol),
                   justification=candidate.justification + tuple(first) + tuple(second))


def classify_asymmetric_ess(surf_a: PayoffSurface, surf_b: PayoffSurface, candidate: EquilibriumCandidate,
                            tol: Optional[float] = None) -> EquilibriumCandidate:
    """Apply the strict-Nash ESS test of an asymmetric game.

    A profile is an ESS when every unilateral deviation is strictly worse
    for the deviating player. By linearity the pure endpoint deviations
    suffice; an interior coordinate means that player is indifferent, so
    such candidates are never strict.

    Returns:
        The candidate with ess_status and justification filled in
    """
    tol = default_tolerance(surf_a, surf_b) if tol is None else tol
    if not candidate.is_nash:
        return replace(candidate, ess_status=ESSStatus.NOT_ESS)
    if candidate.ne_status is NashStatus.NE_CONTINUUM:
        return replace(candidate, ess_status=ESSStatus.NOT_ESS,
                       justification=candidate.justification + (Margin("continuum: neighbours match the payoff", 0.0),))

    p, q = candidate.p_star, candidate.q_star
    if _is_interior(p) or _is_interior(q):
        return replace(candidate, ess_status=ESSStatus.NOT_ESS, justification=candidate.justification + (
            Margin("strict inequality fails: an interior player is indifferent", 0.0),))

    margins = []
    for x in (0.0, 1.0):
        if abs(x - p) > POINT_TOLERANCE:
            margins.append(Margin(f"$_A({_fmt(p)},{_fmt(q)}) - $_A({_fmt(x)},{_fmt(q)})", (p - x) * _gain_a(surf_a, q)))
    for y in (0.0, 1.0):
        if abs(y - q) > POINT_TOLERANCE:
            margins.append(Margin(f"$_B({_fmt(p)},{_fmt(q)}) - $_B({_fmt(p)},{_fmt(y)})", (q - y) * _gain_b(surf_b, p)))
    return replace(candidate, ess_status=_verdict(margins, tol), justification=candidate.justification + tuple(margins))


def invasion_barrier(surf: PayoffSurface, incumbent: float, mutant: float,
                     tol: Optional[float] = None) -> Optional[float]:
    """Largest mutant share below which the incumbent strictly outperforms.

    With the population playing (1-e)*s* + e*s_m, the incumbent's advantage
    is f(e) = (1-e)*D1 + e*D2, where D1 = $(s*,s*) - $(s_m,s*) and
    D2 = $(s*,s_m) - $(s_m,s_m).

    Args:
        surf: Symmetric payoff surface $(own, opponent)
        incumbent: Incumbent strategy s*
        mutant: Mutant strategy s_m

    Returns:
        1.0 if the incumbent wins at every share, the root of f otherwise,
        0.0 when the two tie at vanishing share without a later advantage,
        or None when the mutant invades immediately

    Raises:
        DomainError: If a strategy is outside [0, 1] or s* == s_m
    """
    for name, value in (("incumbent", incumbent), ("mutant", mutant)):
        if not 0.0 <= value <= 1.0:
            raise DomainError(f"{name} must lie in [0, 1], got {value}", field=name)
    if incumbent == mutant:
        raise DomainError("incumbent and mutant strategies must differ", field="mutant")
    tol = RELATIVE_TOLERANCE * surf.scale() if tol is None else tol

    delta_1 = surf(incumbent, incumbent) - surf(mutant, incumbent)
    delta_2 = surf(incumbent, mutant) - surf(mutant, mutant)
    if delta_1 < -tol:
        return None
    if delta_2 > 0:
        return 1.0
    if delta_1 <= tol:
        return 0.0
    return delta_1 / (delta_1 - delta_2)


def corner_nash_conditions(game: BimatrixGame2x2, p_star: float, q_star: float) -> List[NashCondition]:
    """State conditions under which a corner is a strict NE of the quantized game.

    Every surface coefficient is linear in the squared moduli, so each
    player's no-deviation requirement at a corner is a linear inequality
    over (|a|^2, |b|^2, |c|^2, |d|^2).

    Raises:
        DomainError: If (p_star, q_star) is not a corner of the unit square
    """
    if p_star not in (0.0, 1.0) or q_star not in (0.0, 1.0):
        raise DomainError(f"({p_star}, {q_star}) is not a corner", field="candidate")
    map_a, map_b = surface_coefficient_map(game)
    # Rows of the maps: k_pq, k_p, k_q, k_0
    alice = map_a[0] * q_star + map_a[1]
    bob = map_b[0] * p_star + map_b[2]
    return [
        NashCondition("A", tuple(float(x) for x in alice), ">" if p_star == 1.0 else "<"),
        NashCondition("B", tuple(float(x) for x in bob), ">" if q_star == 1.0 else "<"),
    ]
