import numpy as np
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from semimarkov.kernel import SemiMarkovKernel, SojournLaw

settings.register_profile(
    "lab",
    deadline=None,
    max_examples=50,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("lab")


@st.composite
def sojourn_laws(draw):
    family = draw(st.sampled_from(["exponential", "gamma", "uniform", "deterministic"]))
    pos = st.floats(0.1, 5.0, allow_nan=False)
    if family == "exponential":
        return SojournLaw.exponential(draw(pos))
    if family == "gamma":
        # shape >= 0.5 keeps draws clear of the subnormal range, where prefix
        # sums could not resolve a strictly increasing arrival sequence
        return SojournLaw.gamma(draw(st.floats(0.5, 5.0)), draw(pos))
    if family == "uniform":
        a = draw(st.floats(0.0, 2.0))
        width = draw(st.floats(0.1, 3.0))
        return SojournLaw.uniform(a, a + width)
    return SojournLaw.deterministic(draw(pos))


@st.composite
def kernels(draw, max_states: int = 4):
    """Strictly positive transition rows: irreducible and aperiodic by construction."""
    m = draw(st.integers(2, max_states))
    states = draw(
        st.lists(
            st.floats(-3.0, 3.0, allow_nan=False).map(lambda x: round(x, 3)),
            min_size=m,
            max_size=m,
            unique=True,
        )
    )
    weights = np.array(
        draw(
            st.lists(
                st.lists(st.integers(1, 9), min_size=m, max_size=m),
                min_size=m,
                max_size=m,
            )
        ),
        dtype=float,
    )
    P = weights / weights.sum(axis=1, keepdims=True)
    laws = tuple(tuple(draw(sojourn_laws()) for _ in range(m)) for _ in range(m))
    return SemiMarkovKernel(states=np.asarray(states, dtype=float), P=P, laws=laws)
