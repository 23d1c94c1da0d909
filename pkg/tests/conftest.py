import math

import hypothesis.strategies as st
import numpy as np
import pytest
from hypothesis import assume, settings

from qwalk3 import coins

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

angles = st.floats(min_value=-math.pi, max_value=math.pi, allow_nan=False, allow_infinity=False)

@st.composite
def c1_params(draw):
    return coins.C1Params(*[draw(angles) for _ in range(5)])

@st.composite
def c2_params(draw, margin=0.05):
    """Second-family parameters kept ``margin`` inside the admissible region."""
    g1, g4, g5, t23 = (draw(angles) for _ in range(4))
    kappa = draw(angles)
    delta = draw(angles)
    p = coins.C2Params.from_kappa(kappa, delta, t23, gamma1=g1, gamma4=g4, gamma5=g5)

    assume(abs(math.sin(p.delta + p.kappa)) - abs(math.sin(p.kappa)) > margin)
    assume(abs(math.sin(p.delta)) > margin)
    return p

@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
