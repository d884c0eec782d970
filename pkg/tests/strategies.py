"""Hypothesis strategies shared by the test modules."""

from fractions import Fraction

from hypothesis import strategies as st

from toricforms.field import CycNum, euler_phi

small_fractions = st.builds(
    Fraction,
    st.integers(min_value=-9, max_value=9),
    st.integers(min_value=1, max_value=5),
)


def cyc_numbers(level: int):
    return st.lists(small_fractions, min_size=euler_phi(level), max_size=euler_phi(level)).map(
        lambda c: CycNum(level, c)
    )


def rational_matrices(rows, cols):
    return st.lists(
        st.lists(st.integers(min_value=-4, max_value=4).map(Fraction), min_size=cols, max_size=cols),
        min_size=rows,
        max_size=rows,
    )
