"""Hypothesis strategies for descriptor trees."""

from hypothesis import strategies as st

from xdgdl import BlockDecl, ByteBlock, ViewDecl

PMAX = 16


def block_decls(child_strategy):
    return st.builds(
        BlockDecl,
        offset=st.integers(0, PMAX),
        repeat=st.integers(1, 4),
        count=st.integers(1, PMAX),
        stride=st.integers(0, PMAX),
        child=child_strategy,
    )


def view_decls(max_depth: int = 3):
    leaf = st.builds(ByteBlock)
    views = st.recursive(
        st.builds(
            ViewDecl,
            skip_header=st.integers(0, PMAX),
            skip=st.integers(0, PMAX),
            blocks=st.lists(block_decls(leaf), min_size=1, max_size=3).map(tuple),
        ),
        lambda inner: st.builds(
            ViewDecl,
            skip_header=st.integers(0, PMAX),
            skip=st.integers(0, PMAX),
            blocks=st.lists(block_decls(st.one_of(leaf, inner)), min_size=1, max_size=3).map(tuple),
        ),
        max_leaves=max_depth,
    )
    return views
