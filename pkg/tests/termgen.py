"""Hypothesis strategies shared by the test modules.

These generate arbitrary raw ASTs (frequently ill-typed, frequently
non-canonical); the seeded generator of well-typed Safe terms lives in
safelc.corpus and is exercised separately.
"""

import hypothesis.strategies as st

from safelc.syntax import GROUND, Abs, App, SimpleType, Term, Var

names = st.sampled_from("a b c d f g h x y z".split())

types = st.recursive(
    st.just(GROUND),
    lambda t: st.builds(lambda args: SimpleType(tuple(args)), st.lists(t, min_size=1, max_size=2)),
    max_leaves=4,
)


def _abs(binders, body):
    return Abs(tuple(binders), body)


def _app(head, args):
    return App(head, tuple(args))


terms = st.recursive(
    st.builds(Var, names),
    lambda sub: st.one_of(
        st.builds(
            _abs,
            st.lists(st.tuples(names, types), min_size=1, max_size=2, unique_by=lambda b: b[0]),
            sub,
        ),
        st.builds(_app, sub, st.lists(sub, min_size=1, max_size=2)),
    ),
    max_leaves=10,
)
