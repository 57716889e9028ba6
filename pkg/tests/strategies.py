"""Hypothesis strategies shared across test modules."""
from hypothesis import strategies as st

from cosetwalk.groups import FreeAbelian, FreeGroup


def free_words(rank, max_len=10):
    letters = [c for i in range(rank) for c in (i + 1, 256 - (i + 1))]
    model = FreeGroup(rank)

    def build(seq):
        g = b""
        for c in seq:
            g = model.mul(g, bytes([c]))
        return g
    return st.lists(st.sampled_from(letters), max_size=max_len).map(build)


def abelian_elements(dim, bound=20):
    return st.tuples(*[st.integers(-bound, bound) for _ in range(dim)])


def matrix_words(model, max_len=6):
    return st.lists(st.integers(0, len(model.gens) - 1), max_size=max_len).map(model.word)


__all__ = ["free_words", "abelian_elements", "matrix_words", "FreeAbelian", "FreeGroup"]
