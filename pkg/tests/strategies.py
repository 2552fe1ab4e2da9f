"""Hypothesis strategies for states, games and payoff surfaces."""

import math

from hypothesis import assume
from hypothesis import strategies as st

from qhd_system.core.classical import BimatrixGame2x2, HawkDoveParams, build_hawk_dove
from qhd_system.core.quantum import InitialState, PayoffSurface

unit = st.floats(min_value=0.0, max_value=1.0, allow_nan=False, allow_infinity=False)
component = st.floats(min_value=-1.0, max_value=1.0, allow_nan=False, allow_infinity=False)
payoff = st.floats(min_value=-100.0, max_value=100.0, allow_nan=False, allow_infinity=False, allow_subnormal=False)
phase = st.floats(min_value=0.0, max_value=2 * math.pi, allow_nan=False, allow_infinity=False)


@st.composite
def states(draw):
    """Normalized states with arbitrary complex amplitudes."""
    parts = draw(st.lists(component, min_size=8, max_size=8))
    amps = [complex(parts[2 * k], parts[2 * k + 1]) for k in range(4)]
    norm = math.sqrt(sum(abs(a) ** 2 for a in amps))
    assume(norm > 1e-3)
    return InitialState(*(a / norm for a in amps))


@st.composite
def symmetric_states(draw):
    """States with |c|^2 == |d|^2."""
    a2, b2, c2 = draw(st.tuples(unit, unit, unit))
    total = a2 + b2 + 2 * c2
    assume(total > 1e-3)
    return InitialState.from_squared_moduli(a2 / total, b2 / total, c2 / total, c2 / total)


@st.composite
def games(draw):
    values = draw(st.lists(payoff, min_size=8, max_size=8))
    return BimatrixGame2x2.from_rows([[(values[0], values[1]), (values[2], values[3])],
                                      [(values[4], values[5]), (values[6], values[7])]])


@st.composite
def hawk_dove_games(draw):
    v, i, d = draw(st.tuples(payoff, payoff, payoff))
    return build_hawk_dove(HawkDoveParams(v, i, d))


@st.composite
def surfaces(draw):
    return PayoffSurface(*draw(st.tuples(payoff, payoff, payoff, payoff)))


positive_payoff = st.floats(min_value=1e-3, max_value=100.0, allow_nan=False, allow_infinity=False)
negative_payoff = st.floats(min_value=-100.0, max_value=-1e-3, allow_nan=False, allow_infinity=False)


@st.composite
def signed_hawk_dove_params(draw):
    """Parameters with v > 0 and negative injury and display costs."""
    return HawkDoveParams(draw(positive_payoff), draw(negative_payoff), draw(negative_payoff))
