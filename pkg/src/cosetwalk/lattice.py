"""Integer lattices and the unipotent / triangularization algorithms.

Hermite normal form here is the row-echelon form of a generating set: rows
form a basis, each row's leading entry (pivot) is positive and strictly to the
right of the previous row's pivot, and entries above each pivot lie in
``[0, pivot)``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

from . import intmat
from .errors import FixedSpaceTrivial, NotPrimitive, NotUnipotent

INFINITE = math.inf


def hnf(vectors, dim=None):
    """Row Hermite normal form of the lattice spanned by ``vectors``."""
    rows = [list(v) for v in vectors if any(v)]
    if dim is None:
        dim = len(vectors[0]) if vectors else 0
    basis = []
    r = 0
    for c in range(dim):
        active = [row for row in rows[r:] if row[c] != 0]
        if not active:
            continue
        rest = [row for row in rows[r:] if row[c] == 0]
        # gcd-combine everything with a nonzero entry in column c into one row
        pivot = active[0]
        others = []
        for row in active[1:]:
            a, b = pivot[c], row[c]
            g, x, y = intmat.xgcd(a, b)
            new_pivot = [x * p + y * q for p, q in zip(pivot, row)]
            killed = [(b // g) * p - (a // g) * q for p, q in zip(pivot, row)]
            pivot = new_pivot
            if any(killed):
                others.append(killed)
        if pivot[c] < 0:
            pivot = [-x for x in pivot]
        rows = rows[:r] + [pivot] + others + rest
        rows = rows[:r + 1] + [row for row in rows[r + 1:] if any(row)]
        r += 1
        if r >= len(rows):
            break
    basis = rows[:r]
    # reduce entries above pivots
    pivots = [next(j for j, x in enumerate(row) if x != 0) for row in basis]
    for i in range(len(basis)):
        pc = pivots[i]
        p = basis[i][pc]
        for k in range(i):
            q = basis[k][pc] // p
            if q:
                basis[k] = [x - q * y for x, y in zip(basis[k], basis[i])]
    return tuple(tuple(row) for row in basis)


def pivots_of(basis):
    return [next(j for j, x in enumerate(row) if x != 0) for row in basis]


def reduce_mod(v, basis):
    """Canonical representative of ``v`` modulo the lattice with HNF ``basis``."""
    v = list(v)
    for row in basis:
        pc = next(j for j, x in enumerate(row) if x != 0)
        q = v[pc] // row[pc]
        if q:
            v = [x - q * y for x, y in zip(v, row)]
    return tuple(v)


@dataclass
class IntLattice:
    generators: list
    dim: int
    _hnf: tuple | None = field(default=None, repr=False)

    @property
    def basis(self):
        if self._hnf is None:
            self._hnf = hnf(self.generators, self.dim)
        return self._hnf

    @property
    def rank(self):
        return len(self.basis)

    @property
    def index(self):
        if self.rank < self.dim:
            return INFINITE
        return math.prod(row[p] for row, p in zip(self.basis, pivots_of(self.basis)))

    def __contains__(self, v):
        return not any(reduce_mod(v, self.basis))


@dataclass
class LatticeReport:
    rank: int
    index: float | int
    scaled_inclusion_ok: bool | None
    basis: tuple


def hnf_rank_index(lattice: IntLattice, d=None) -> LatticeReport:
    """Rank and index of L <= Z^d; when the index m is finite, also checks
    that m Z^d is contained in L."""
    if d is not None and d != lattice.dim:
        lattice = IntLattice(lattice.generators, d)
    if lattice.dim < 1:
        raise ValueError("d must be >= 1")
    idx = lattice.index
    ok = None
    if idx is not INFINITE:
        ok = all(tuple(idx if j == i else 0 for j in range(lattice.dim)) in lattice
                 for i in range(lattice.dim))
    return LatticeReport(lattice.rank, idx, ok, lattice.basis)


def primitive_completion(v):
    """A matrix in SL_n(Z) whose first column is the primitive vector ``v``.

    Columns 2..n are normalized by adding multiples of ``v`` so that their
    entry at the first nonzero index of ``v`` lies in ``[0, |v_k|)``.
    """
    v = tuple(int(x) for x in v)
    n = len(v)
    if intmat.vec_gcd(v) != 1:
        raise NotPrimitive(f"{v} is not primitive")
    if n == 1:
        if v[0] != 1:
            raise NotPrimitive("only (1,) completes to SL_1(Z)")
        return ((1,),)
    # Row operations U with U v = e_1; track M = U^{-1} through column ops.
    w = list(v)
    m = [list(row) for row in intmat.identity(n)]

    def add_row(dst, src, k):
        # w[dst] += k w[src]; M <- M E^{-1}: col src -= k col dst
        w[dst] += k * w[src]
        for row in m:
            row[src] -= k * row[dst]

    def signed_swap(i, j):
        # (w_i, w_j) <- (w_j, -w_i); inverse op on M's columns
        w[i], w[j] = w[j], -w[i]
        for row in m:
            row[i], row[j] = row[j], -row[i]

    while sum(1 for x in w if x) > 1:
        nz = [i for i, x in enumerate(w) if x]
        piv = min(nz, key=lambda i: (abs(w[i]), i))
        for i in nz:
            if i != piv:
                add_row(i, piv, -(w[i] // w[piv]))
    piv = next(i for i, x in enumerate(w) if x)
    if piv != 0:
        signed_swap(0, piv)
    if w[0] == -1:
        # negate rows 0 and 1 (det +1)
        w[0], w[1] = -w[0], -w[1]
        for row in m:
            row[0], row[1] = -row[0], -row[1]
    g = [list(r) for r in m]
    assert tuple(g[i][0] for i in range(n)) == v
    k0 = next(i for i, x in enumerate(v) if x)
    pv = abs(v[k0])
    sgn = 1 if v[k0] > 0 else -1
    for j in range(1, n):
        q = (g[k0][j] // pv) * sgn
        if q:
            for i in range(n):
                g[i][j] -= q * v[i]
    out = tuple(tuple(r) for r in g)
    if intmat.det(out) != 1:
        raise AssertionError("completion lost determinant 1")
    return out


def unipotent_row(n, i, x):
    """u_i(x) = I + sum_{j != i} x_j E_ij, with x indexed over j != i."""
    rows = [list(r) for r in intmat.identity(n)]
    cols = [j for j in range(n) if j != i]
    for j, val in zip(cols, x):
        rows[i][j] += val
    return tuple(map(tuple, rows))


@dataclass
class RankProbe:
    line: int
    rank: int
    basis: tuple
    exact: bool
    box: int

    @property
    def full_rank(self):
        return len(self.basis[0]) == self.rank if self.basis else False

    @property
    def label(self):
        return "exact" if self.exact else "rank within box"


def unipotent_rank_probe(oracle, n, i, bound=4, conjugator=None) -> RankProbe:
    """Rank of {x in Z^(n-1) : u_i(x) in H} (the intersection of H with the
    unipotent radical of the i-th line stabilizer), optionally conjugated.

    Congruence oracles are answered exactly (the lattice N Z^(n-1)); all other
    oracles are scanned over the box [-bound, bound]^(n-1), which gives a
    lower bound for the true rank.
    """
    if bound < 1:
        raise ValueError("bound must be >= 1")
    level = getattr(oracle, "congruence_level", None)
    if level is not None and conjugator is None:
        basis = tuple(tuple(level if j == k else 0 for j in range(n - 1)) for k in range(n - 1))
        return RankProbe(i, n - 1, basis, True, bound)
    if conjugator is not None:
        ginv = intmat.inverse(conjugator)
    pts = []
    for x in itertools.product(range(-bound, bound + 1), repeat=n - 1):
        if not any(x):
            continue
        u = unipotent_row(n, i, x)
        if conjugator is not None:
            u = intmat.matmul(intmat.matmul(conjugator, u), ginv)
        if oracle.membership(u):
            pts.append(x)
    basis = hnf(pts, n - 1) if pts else ()
    return RankProbe(i, len(basis), basis, False, bound)


# --- Kolchin triangularization in SL_3(Z) --------------------------------------

def _is_unipotent(g):
    n = len(g)
    d = intmat.sub_identity(g)
    p = d
    for _ in range(n - 1):
        p = intmat.matmul(p, d)
    return intmat.is_zero(p)


def _sl2_triangularizer(mats):
    """h in SL_2(Z) with h M h^-1 upper unitriangular for all M (unipotent)."""
    nontrivial = [m for m in mats if not intmat.is_identity(m)]
    if not nontrivial:
        return intmat.identity(2)
    z = nontrivial[0]
    ker = intmat.rational_nullspace(intmat.sub_identity(z), 2)
    if len(ker) != 1:
        raise NotUnipotent("2x2 block is not a nontrivial unipotent")
    w = intmat.integer_vector(ker[0])
    c = primitive_completion(w)
    return intmat.inverse(c)


@dataclass
class Triangularization:
    conjugator: tuple
    conjugated: list


def kolchin_triangularize(gens) -> Triangularization:
    """g in SL_3(Z) with g N g^-1 inside UT_3(Z), N generated by ``gens``.

    Fix a primitive common fixed vector, complete it to a basis, then
    triangularize the induced 2x2 action. The result is verified by
    conjugating every generator.
    """
    gens = [intmat.as_matrix(g) for g in gens]
    for g in gens:
        if len(g) != 3 or not _is_unipotent(g):
            raise NotUnipotent(f"{g} does not satisfy (g - I)^3 = 0")
    rows = [row for g in gens for row in intmat.sub_identity(g)]
    if not rows:
        rows = [(0, 0, 0)]
    fixed = intmat.rational_nullspace(rows, 3)
    if not fixed:
        raise FixedSpaceTrivial("generators have no common fixed vector")
    v1 = intmat.integer_vector(fixed[0])
    p = primitive_completion(v1)
    pinv = intmat.inverse(p)
    blocks = []
    for g in gens:
        c = intmat.matmul(intmat.matmul(pinv, g), p)
        if c[1][0] != 0 or c[2][0] != 0 or c[0][0] != 1:
            raise AssertionError("completion does not fix the first basis vector")
        blocks.append(((c[1][1], c[1][2]), (c[2][1], c[2][2])))
    for b in blocks:
        if not _is_unipotent(b):
            raise NotUnipotent("induced quotient action is not unipotent")
    h = _sl2_triangularizer(blocks)
    dmat = ((1, 0, 0), (0, h[0][0], h[0][1]), (0, h[1][0], h[1][1]))
    g_total = intmat.matmul(dmat, pinv)
    ginv = intmat.inverse(g_total)
    conj = [intmat.matmul(intmat.matmul(g_total, g), ginv) for g in gens]
    for c in conj:
        if not is_upper_unitriangular(c):
            raise NotUnipotent("generators do not span a unipotent group")
    return Triangularization(g_total, conj)


def is_upper_unitriangular(g):
    n = len(g)
    return all(g[i][i] == 1 for i in range(n)) and all(
        g[i][j] == 0 for i in range(n) for j in range(i))
