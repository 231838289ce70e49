"""Hypothesis strategies shared by the codec tests."""

from hypothesis import strategies as st

from dkcodes.analysis import INFINITY, Constraint, SlidingConfig

bit_lists = st.lists(st.integers(0, 1), max_size=400)


@st.composite
def sliding_configs(draw, allow_infinite=True):
    d = draw(st.integers(0, 5))
    if allow_infinite and draw(st.integers(0, 7)) == 0:
        return SlidingConfig(Constraint(d, INFINITY), 0, draw(st.floats(0.05, 0.95)))
    span = draw(st.integers(1, 9))
    j = draw(st.integers(0, span))
    return SlidingConfig(Constraint(d, d + span), j, draw(st.floats(0.05, 0.95)))


# k-d+1 composite, small enough for fast tests
COMPOSITE = [
    (0, 3), (1, 4), (2, 5), (0, 5), (1, 6), (3, 6), (1, 8), (2, 9), (0, 8),
    (0, 11), (1, 9), (2, 11), (4, 11), (0, 14), (1, 15), (0, 17), (3, 20),
]


@st.composite
def interleaved_constraints(draw):
    d, k = draw(st.sampled_from(COMPOSITE))
    return Constraint(d, k)
