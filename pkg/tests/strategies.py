"""Hypothesis strategies for pure terms over a small alphabet."""

from hypothesis import strategies as st

from cedille_kernel.pure import PApp, PLam, PVar

NAMES = ["x", "y", "z", "w"]

names = st.sampled_from(NAMES)


def pure_terms(max_leaves: int = 12):
    return st.recursive(
        names.map(PVar),
        lambda sub: st.one_of(
            st.builds(PLam, names, sub),
            st.builds(PApp, sub, sub),
        ),
        max_leaves=max_leaves,
    )


def closed(t):
    for v in sorted(t.fv):
        t = PLam(v, t)
    return t
