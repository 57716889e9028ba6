import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cosetwalk import intmat
from cosetwalk.errors import FixedSpaceTrivial, NotPrimitive, NotUnipotent
from cosetwalk.lattice import (IntLattice, hnf, hnf_rank_index, is_upper_unitriangular,
                               kolchin_triangularize, primitive_completion, reduce_mod)

from oracles import int_det, lattice_index_by_counting


def random_lattice(rng, d, small=True):
    k = rng.randint(1, d + 1)
    bound = 3 if small else 6
    return [tuple(rng.randint(-bound, bound) for _ in range(d)) for _ in range(k)]


@pytest.mark.parametrize("seed", range(20))
def test_hnf_index_matches_box_count(seed):
    rng = random.Random(seed)
    for _ in range(10):
        d = rng.randint(1, 3)
        gens = random_lattice(rng, d)
        rep = hnf_rank_index(IntLattice(gens, d))
        assert rep.index == lattice_index_by_counting(gens, d)
        if rep.index != math.inf:
            assert rep.scaled_inclusion_ok


@given(st.lists(st.tuples(*[st.integers(-5, 5)] * 3), min_size=1, max_size=4))
def test_hnf_shape(gens):
    basis = hnf(gens, 3)
    pivots = []
    for row in basis:
        p = next(j for j, x in enumerate(row) if x)
        assert row[p] > 0
        pivots.append(p)
    assert pivots == sorted(set(pivots))
    for i, p in enumerate(pivots):
        for k in range(i):
            assert 0 <= basis[k][p] < basis[i][p]
    # same lattice: every generator reduces to zero, every basis row is in span
    for g in gens:
        assert not any(reduce_mod(g, basis))


@given(st.lists(st.integers(-30, 30), min_size=2, max_size=5)
       .filter(lambda v: math.gcd(*v) == 1))
def test_primitive_completion_det_one(v):
    m = primitive_completion(v)
    assert intmat.det(m) == 1
    assert int_det(m) == 1
    assert tuple(row[0] for row in m) == tuple(v)


def test_primitive_completion_500_random():
    rng = random.Random(7)
    done = 0
    while done < 500:
        n = rng.randint(2, 5)
        v = [rng.randint(-50, 50) for _ in range(n)]
        if math.gcd(*v) != 1:
            continue
        m = primitive_completion(v)
        assert int_det(m) == 1 and [r[0] for r in m] == v
        done += 1


def test_primitive_completion_rejects():
    with pytest.raises(NotPrimitive):
        primitive_completion((2, 4))


def _random_sl3(rng, steps=6):
    g = intmat.identity(3)
    for _ in range(steps):
        i, j = rng.sample(range(3), 2)
        g = intmat.matmul(g, intmat.elementary(3, i, j, rng.choice([-2, -1, 1, 2])))
    return g


def _random_ut(rng):
    return ((1, rng.randint(-4, 4), rng.randint(-4, 4)), (0, 1, rng.randint(-4, 4)), (0, 0, 1))


def test_kolchin_on_random_conjugates():
    rng = random.Random(3)
    for _ in range(100):
        gens = [_random_ut(rng) for _ in range(rng.randint(1, 3))]
        c = _random_sl3(rng)
        ci = intmat.inverse(c)
        conj = [intmat.matmul(intmat.matmul(c, g), ci) for g in gens]
        tri = kolchin_triangularize(conj)
        assert intmat.det(tri.conjugator) == 1
        gi = intmat.inverse(tri.conjugator)
        for x, y in zip(conj, tri.conjugated):
            assert intmat.matmul(intmat.matmul(tri.conjugator, x), gi) == y
            assert is_upper_unitriangular(y)


def test_kolchin_rejects_non_unipotent():
    rng = random.Random(4)
    rejected = 0
    for _ in range(20):
        g = _random_sl3(rng, steps=8)
        while intmat.is_zero(intmat.matmul(intmat.sub_identity(g),
                                           intmat.matmul(intmat.sub_identity(g),
                                                         intmat.sub_identity(g)))):
            g = _random_sl3(rng, steps=8)
        with pytest.raises((NotUnipotent, FixedSpaceTrivial)):
            kolchin_triangularize([g])
        rejected += 1
    assert rejected == 20
