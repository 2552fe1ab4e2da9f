"""
Quantum Game Module.

Quantization of a 2x2 bimatrix game in which both players share a two-qubit
pure state and each applies either the identity or the flip operator with
some probability. Provides the density-matrix (trace) evaluation of the
expected payoffs and their closed-form bilinear coefficients.

All matrices use the basis order (|HH>, |HD>, |DH>, |DD>); the first slot
belongs to Alice (row player), the second to Bob (column player).
"""

import cmath
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Sequence, Tuple

import numpy as np

from qhd_system.core.classical import BimatrixGame2x2, RELATIVE_TOLERANCE
from qhd_system.core.errors import DomainError, NormalizationError, ValidationError

logger = logging.getLogger(__name__)

BASIS_LABELS = ("HH", "HD", "DH", "DD")

IDENTITY = np.eye(2, dtype=complex)
FLIP = np.array([[0, 1], [1, 0]], dtype=complex)

# Norm deviations up to this are float noise and accepted as they are
ACCEPT_TOLERANCE = 1e-9
# Largest deviation the renormalize policy will repair
RENORMALIZE_TOLERANCE = 1e-6

MODULI_NAMES = ("a2", "b2", "c2", "d2")


class NormalizationPolicy(Enum):
    REJECT = "reject"
    RENORMALIZE = "renormalize"


@dataclass(frozen=True)
class InitialState:
    """Shared state a|HH> + b|DD> + c|HD> + d|DH>.

    Attributes:
        amp_hh: a
        amp_dd: b
        amp_hd: c
        amp_dh: d
    """
    amp_hh: complex
    amp_dd: complex
    amp_hd: complex
    amp_dh: complex

    def __post_init__(self):
        for name in ("amp_hh", "amp_dd", "amp_hd", "amp_dh"):
            value = complex(getattr(self, name))
            if not cmath.isfinite(value):
                raise ValidationError(f"{name} is not finite: {value}", field=name)
            object.__setattr__(self, name, value)
        norm_squared = sum(self.squared_moduli())
        if abs(norm_squared - 1.0) > ACCEPT_TOLERANCE:
            raise NormalizationError(
                f"squared amplitudes sum to {norm_squared!r}, expected 1", norm_squared)

    @classmethod
    def from_squared_moduli(cls, a2: float, b2: float, c2: float, d2: float) -> "InitialState":
        """State with real non-negative amplitudes of the given squared moduli."""
        values = (a2, b2, c2, d2)
        for name, value in zip(MODULI_NAMES, values):
            if not math.isfinite(value) or value < 0:
                raise DomainError(f"{name} must be a non-negative real, got {value}", field=name)
        return cls(*(math.sqrt(v) for v in values))

    def squared_moduli(self) -> Tuple[float, float, float, float]:
        """(|a|^2, |b|^2, |c|^2, |d|^2) in the a, b, c, d order."""
        return (abs(self.amp_hh) ** 2, abs(self.amp_dd) ** 2,
                abs(self.amp_hd) ** 2, abs(self.amp_dh) ** 2)

    def basis_weights(self) -> np.ndarray:
        """Squared moduli in basis order (HH, HD, DH, DD)."""
        a2, b2, c2, d2 = self.squared_moduli()
        return np.array([a2, c2, d2, b2])

    def vector(self) -> np.ndarray:
        """State vector in basis order (HH, HD, DH, DD)."""
        return np.array([self.amp_hh, self.amp_hd, self.amp_dh, self.amp_dd], dtype=complex)

    def swapped(self) -> "InitialState":
        """The state with the |HD> and |DH> amplitudes exchanged."""
        return InitialState(self.amp_hh, self.amp_dd, self.amp_dh, self.amp_hd)


@dataclass(frozen=True)
class TacticProfile:
    """Probabilities p (Alice) and q (Bob) of applying the identity."""
    p: float
    q: float

    def __post_init__(self):
        for name in ("p", "q"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise DomainError(f"{name} must lie in [0, 1], got {value}", field=name)


@dataclass(frozen=True)
class DensityMatrix4:
    """Two-qubit density matrix over the basis (HH, HD, DH, DD)."""
    matrix: np.ndarray

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return bool(np.allclose(self.matrix, self.matrix.conj().T, rtol=0.0, atol=tol))

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def is_valid(self, tol: float = 1e-12, psd_tol: float = 1e-10) -> bool:
        """Hermitian, unit trace and positive semidefinite within tolerance."""
        return (self.is_hermitian(tol)
                and abs(self.trace() - 1.0) <= tol
                and bool(self.eigenvalues().min() >= -psd_tol))

    def populations(self) -> Dict[str, float]:
        """Diagonal entries keyed by basis label."""
        return {label: float(np.real(self.matrix[k, k])) for k, label in enumerate(BASIS_LABELS)}


@dataclass(frozen=True)
class PayoffOperatorPair:
    """Diagonal payoff operators of Alice (diag_a) and Bob (diag_b)."""
    diag_a: Tuple[float, float, float, float]
    diag_b: Tuple[float, float, float, float]

    def matrix_a(self) -> np.ndarray:
        return np.diag(np.array(self.diag_a, dtype=complex))

    def matrix_b(self) -> np.ndarray:
        return np.diag(np.array(self.diag_b, dtype=complex))


@dataclass(frozen=True)
class PayoffSurface:
    """Bilinear payoff k_pq*p*q + k_p*p + k_q*q + k_0 of one player."""
    k_pq: float
    k_p: float
    k_q: float
    k_0: float

    def __call__(self, p: float, q: float) -> float:
        return self.k_pq * p * q + self.k_p * p + self.k_q * q + self.k_0

    def coefficients(self) -> Tuple[float, float, float, float]:
        return (self.k_pq, self.k_p, self.k_q, self.k_0)

    def corners(self) -> Tuple[float, float, float, float]:
        """Values at (0,0), (0,1), (1,0), (1,1)."""
        return (self(0, 0), self(0, 1), self(1, 0), self(1, 1))

    def scale(self) -> float:
        """Largest absolute corner value, or 1 for the zero surface."""
        largest = max(abs(v) for v in self.corners())
        return largest if largest > 0 else 1.0

    def along_p(self, q: float) -> Tuple[float, float]:
        """(slope, intercept) of p -> payoff(p, q)."""
        return (self.k_pq * q + self.k_p, self.k_q * q + self.k_0)

    def along_q(self, p: float) -> Tuple[float, float]:
        """(slope, intercept) of q -> payoff(p, q)."""
        return (self.k_pq * p + self.k_q, self.k_p * p + self.k_0)

    def diagonal(self) -> Tuple[float, float, float]:
        """(quadratic, linear, constant) coefficients of s -> payoff(s, s)."""
        return (self.k_pq, self.k_p + self.k_q, self.k_0)

    def transposed(self) -> "PayoffSurface":
        """The surface with the roles of p and q exchanged."""
        return PayoffSurface(self.k_pq, self.k_q, self.k_p, self.k_0)


def make_initial_state(amps: Sequence[complex],
                       policy: NormalizationPolicy = NormalizationPolicy.REJECT) -> InitialState:
    """Build a normalized initial state from the amplitudes (a, b, c, d).

    Args:
        amps: Amplitudes of |HH>, |DD>, |HD>, |DH>
        policy: What to do with a norm that is slightly off

    Returns:
        The initial state

    Raises:
        NormalizationError: For an all-zero input or a norm outside the policy tolerance
    """
    if len(amps) != 4:
        raise ValidationError(f"expected four amplitudes, got {len(amps)}", field="state")
    values = [complex(a) for a in amps]
    norm_squared = sum(abs(a) * abs(a) for a in values)

    if norm_squared == 0.0:
        raise NormalizationError("all amplitudes are zero", norm_squared)
    deviation = abs(norm_squared - 1.0)
    if deviation <= ACCEPT_TOLERANCE:
        return InitialState(*values)
    if policy is NormalizationPolicy.RENORMALIZE and deviation < RENORMALIZE_TOLERANCE:
        logger.warning("renormalizing state with squared norm %.17g", norm_squared)
        factor = 1.0 / math.sqrt(norm_squared)
        return InitialState(*(a * factor for a in values))
    raise NormalizationError(
        f"squared amplitudes sum to {norm_squared!r}; policy '{policy.value}' does not accept it",
        norm_squared)


def state_from_moduli(moduli: Sequence[float],
                      policy: NormalizationPolicy = NormalizationPolicy.REJECT) -> InitialState:
    """State with real non-negative amplitudes of the given squared moduli (a2, b2, c2, d2).

    Raises:
        DomainError: If a modulus is negative or not finite
        NormalizationError: If the moduli do not sum to 1 under ``policy``
    """
    if len(moduli) != 4:
        raise ValidationError(f"expected four squared moduli, got {len(moduli)}", field="state")
    for name, value in zip(MODULI_NAMES, moduli):
        if not math.isfinite(value) or value < 0:
            raise DomainError(f"{name} must be a non-negative real, got {value}", field=name)
    return make_initial_state([math.sqrt(v) for v in moduli], policy)


def _conjugated(rho: np.ndarray, alice_op: np.ndarray, bob_op: np.ndarray) -> np.ndarray:
    operator = np.kron(alice_op, bob_op)
    return operator @ rho @ operator.conj().T


def final_density_matrix(state: InitialState, tactics: TacticProfile) -> DensityMatrix4:
    """Mix the four tactic combinations applied to the initial density matrix.

    Returns:
        pq (I@I)rho(I@I)+ + p(1-q) (I@C)rho(I@C)+ + (1-p)q (C@I)rho(C@I)+ + (1-p)(1-q) (C@C)rho(C@C)+
    """
    psi = state.vector()
    rho = np.outer(psi, psi.conj())
    p, q = tactics.p, tactics.q
    rho_f = (p * q * _conjugated(rho, IDENTITY, IDENTITY)
             + p * (1 - q) * _conjugated(rho, IDENTITY, FLIP)
             + (1 - p) * q * _conjugated(rho, FLIP, IDENTITY)
             + (1 - p) * (1 - q) * _conjugated(rho, FLIP, FLIP))
    return DensityMatrix4(rho_f)


def payoff_operators(game: BimatrixGame2x2) -> PayoffOperatorPair:
    """Diagonal payoff operators read off the bimatrix in basis order."""
    profiles = [(0, 0), (0, 1), (1, 0), (1, 1)]
    return PayoffOperatorPair(
        diag_a=tuple(game.row(r, c) for r, c in profiles),
        diag_b=tuple(game.col(r, c) for r, c in profiles),
    )


def expected_payoffs_trace(state: InitialState, game: BimatrixGame2x2,
                           tactics: TacticProfile) -> Tuple[float, float]:
    """Expected payoffs Tr(P_A rho_f) and Tr(P_B rho_f) by explicit matrices."""
    rho_f = final_density_matrix(state, tactics).matrix
    operators = payoff_operators(game)
    payoff_a = np.trace(operators.matrix_a() @ rho_f)
    payoff_b = np.trace(operators.matrix_b() @ rho_f)
    return float(np.real(payoff_a)), float(np.real(payoff_b))


def _tactic_weights(diag: np.ndarray, weights: np.ndarray) -> np.ndarray:
    # Flipping Bob's qubit maps basis index k to k ^ 1, Alice's to k ^ 2.
    index = np.arange(4)
    return np.array([diag @ weights[index ^ flip] for flip in (0, 1, 2, 3)])


def _surface_from_weights(diag: Sequence[float], weights: np.ndarray) -> PayoffSurface:
    # Expected payoff under the tactic pairs (I,I), (I,C), (C,I), (C,C)
    both_id, bob_flips, alice_flips, both_flip = _tactic_weights(np.asarray(diag, dtype=float), weights)
    return PayoffSurface(
        k_pq=float(both_id - bob_flips - alice_flips + both_flip),
        k_p=float(bob_flips - both_flip),
        k_q=float(alice_flips - both_flip),
        k_0=float(both_flip),
    )


def payoff_surface(state: InitialState, game: BimatrixGame2x2) -> Tuple[PayoffSurface, PayoffSurface]:
    """Closed-form bilinear payoff surfaces of Alice and Bob.

    Only the squared moduli of the amplitudes enter the result.
    """
    operators = payoff_operators(game)
    weights = state.basis_weights()
    return (_surface_from_weights(operators.diag_a, weights),
            _surface_from_weights(operators.diag_b, weights))


def surface_coefficient_map(game: BimatrixGame2x2) -> Tuple[np.ndarray, np.ndarray]:
    """Linear maps from (|a|^2, |b|^2, |c|^2, |d|^2) to (k_pq, k_p, k_q, k_0).

    Returns:
        Two 4x4 arrays (Alice, Bob); row i holds coefficient i as a linear
        form in the squared moduli
    """
    operators = payoff_operators(game)
    maps = []
    for diag in (operators.diag_a, operators.diag_b):
        columns = []
        for a2, b2, c2, d2 in np.eye(4):
            weights = np.array([a2, c2, d2, b2])
            columns.append(_surface_from_weights(diag, weights).coefficients())
        maps.append(np.array(columns).T)
    return maps[0], maps[1]


def is_symmetric(state: InitialState, tol: float = RELATIVE_TOLERANCE, strict: bool = False) -> bool:
    """Whether the quantized game is symmetric for this state.

    Args:
        state: Initial state
        tol: Absolute tolerance
        strict: Compare the amplitudes c and d themselves instead of their moduli

    Returns:
        True if |c|^2 == |d|^2 (or c == d in strict mode) within tol
    """
    if strict:
        return abs(state.amp_hd - state.amp_dh) < tol
    return abs(abs(state.amp_hd) ** 2 - abs(state.amp_dh) ** 2) < tol


def random_state(rng: np.random.Generator) -> InitialState:
    """Draw a state with independent complex Gaussian amplitudes, normalized."""
    raw = rng.normal(size=4) + 1j * rng.normal(size=4)
    raw = raw / np.linalg.norm(raw)
    return InitialState(*raw)


def random_game(rng: np.random.Generator, low: float = -100.0, high: float = 100.0) -> BimatrixGame2x2:
    """Draw a game with payoffs uniform in [low, high)."""
    entries = rng.uniform(low, high, size=(2, 2, 2))
    return BimatrixGame2x2.from_rows(entries.tolist())
