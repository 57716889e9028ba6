"""Registry of exact verifiers for the explicit matrix and free-group constructions."""
from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field

from . import intmat
from .cosets import CosetSpace, Homomorphism, cyclic_powers, free_subgroup, pullback, schreier_ball
from .errors import UnknownExample
from .groups import (HYPERBOLIC_A, FreeGroup, MatrixGroupZ, heisenberg, lower_u,
                     solvable_k0, t_matrix)
from .growth import EXPONENTIAL, POLYNOMIAL, GrowthSeries, conj_intersection_growth, growth_fit
from .lattice import primitive_completion

PASS, FAIL = "pass", "fail"


@dataclass
class Check:
    name: str
    status: str
    details: dict = field(default_factory=dict)

    def as_dict(self):
        return {"name": self.name, "status": self.status, "details": self.details}


@dataclass
class VerifierReport:
    example_id: str
    checks: list
    elapsed_ms: int

    @property
    def passed(self):
        return all(c.status == PASS for c in self.checks)

    def as_dict(self, timing=True):
        out = {"example_id": self.example_id, "checks": [c.as_dict() for c in self.checks]}
        if timing:
            out["elapsed_ms"] = self.elapsed_ms
        return out


def _check(name, ok, **details):
    return Check(name, PASS if ok else FAIL, details)


# --- SL_3(Z) / UT_3(Z) -------------------------------------------------------------------

def _u(v):
    return lower_u(v[0], v[1])


def _is_ut(g):
    return all(g[i][i] == 1 for i in range(3)) and all(g[i][j] == 0 for i in range(3) for j in range(i))


def verify_sl3_ut3_transversal(max_n=8, samples=200, box=8, seed=0):
    rng = random.Random(seed)
    a = HYPERBOLIC_A
    t = t_matrix()
    pairs = [((0, 0), n) for n in range(-max_n, max_n + 1)]
    pairs += [((rng.randint(-box, box), rng.randint(-box, box)), rng.randint(-max_n, max_n))
              for _ in range(samples)]
    bad_poly, bad_ut = [], []
    for v, n in pairs:
        g = intmat.matmul(_u(v), intmat.mat_power(t, n))
        expected = intmat.poly_mul([1, -1], intmat.charpoly(intmat.mat_power(a, n)))
        if intmat.charpoly(g) != expected:
            bad_poly.append([list(v), n])
        if _is_ut(g) and (v, n) != ((0, 0), 0):
            bad_ut.append([list(v), n])
    n1 = intmat.charpoly(intmat.matmul(_u((0, 0)), t))
    return [
        _check("charpoly_factorization", not bad_poly, tested=len(pairs), failures=bad_poly[:5]),
        _check("ut3_meets_K_trivially", not bad_ut, tested=len(pairs), failures=bad_ut[:5]),
        _check("n1_charpoly", n1 == intmat.poly_mul([1, -1], [1, -3, 1]), charpoly=n1),
    ]


def verify_sl3_ut3_k_growth(radius=10):
    from .growth import group_growth
    series = group_growth(solvable_k0(), radius)
    cls = growth_fit(series)
    return [_check("K_growth_exponential", cls.label == EXPONENTIAL,
                   counts=series.counts, fit=cls.as_dict())]


# --- parabolic expansion -------------------------------------------------------------------

G_CONJ = ((1, 1, 0), (0, 1, 0), (0, 0, 1))


def _conj(x):
    return intmat.matmul(intmat.matmul(G_CONJ, x), intmat.inverse(G_CONJ))


def _row1_checks(box):
    t = t_matrix()
    bad_row, bad_member = [], []
    for n in range(-box, box + 1):
        an = intmat.mat_power(HYPERBOLIC_A, n)
        p_n, q_n = an[0][0], an[0][1]
        tn = intmat.mat_power(t, n)
        for a in range(-box, box + 1):
            for b in range(-box, box + 1):
                k = _conj(intmat.matmul(lower_u(a, b), tn))
                if k[0] != (1 + a, p_n - 1 - a, q_n):
                    bad_row.append([a, b, n])
                in_h = k[0][1] == 0 and k[0][2] == 0
                if in_h != (n == 0 and a == 0):
                    bad_member.append([a, b, n])
    return bad_row, bad_member


def verify_parabolic_2m_expansion(m=12, box=4):
    checks = []
    bad_row, bad_member = _row1_checks(box)
    checks.append(_check("row1_formula", not bad_row, box=box, failures=bad_row[:5]))
    checks.append(_check("L_is_conjugate_of_u01", not bad_member, box=box, failures=bad_member[:5]))
    t = t_matrix()
    gens = [_conj(lower_u(1, 0)), _conj(lower_u(0, 1)), _conj(t)]
    model = MatrixGroupZ(3, gens, ["gu10g", "gu01g", "gtg"], name="K")
    oracle = cyclic_powers(model, _conj(lower_u(0, 1)))
    a_pows = [intmat.mat_power(HYPERBOLIC_A, i) for i in range(m + 1)]
    u_m = (a_pows[m][0][1], a_pows[m][1][1])
    dets, keys, length_ok = set(), set(), True
    s_u, s_t = gens[0], gens[2]
    tm = intmat.mat_power(t, m)
    for eps in itertools.product((0, 1), repeat=m):
        v = [0, 0]
        for i, e in enumerate(eps):
            if e:
                v[0] += a_pows[i][0][0]
                v[1] += a_pows[i][1][0]
        dets.add(u_m[0] * v[1] - u_m[1] * v[0])
        x = _conj(intmat.matmul(lower_u(*v), tm))
        # the word prod_i (s_u^{eps_i} s_t) has length m + |eps| <= 2m
        w = intmat.identity(3)
        for e in eps:
            if e:
                w = intmat.matmul(w, s_u)
            w = intmat.matmul(w, s_t)
        if w != x or m + sum(eps) > 2 * m:
            length_ok = False
        keys.add(oracle.key(x))
    checks.append(_check("determinant_criterion_distinct", len(dets) == 2 ** m,
                         m=m, distinct=len(dets)))
    checks.append(_check("coset_keys_distinct", len(keys) == 2 ** m, m=m, distinct=len(keys)))
    checks.append(_check("word_length_at_most_2m", length_ok, m=m))
    return checks


# --- a_j dominance ------------------------------------------------------------------------------

def _y_sequence(jmax):
    out = []
    for j in range(1, jmax + 1):
        p = intmat.mat_power(HYPERBOLIC_A, j)
        out.append((p[0][1], p[1][1]))
    return out


def dominance_onset(seq):
    """Smallest J with |a_j| > sum_{i<j} |a_i| for every j >= J in seq, or None."""
    onset = None
    total = 0
    for j, a in enumerate(seq):
        if abs(a) > total:
            if onset is None:
                onset = j
        else:
            onset = None
        total += abs(a)
    return onset


def verify_aj_dominance(jmax=40, extra_xi=((1, 0), (0, 1), (1, 1), (2, 3), (1, -1), (3, -5), (5, 8))):
    xy = _y_sequence(jmax)
    rec, ok_rec = (1, 1), True
    for x, y in xy:
        if (x, y) != rec:
            ok_rec = False
            break
        rec = (2 * x + y, x + y)
    ys = [y for _, y in xy]
    dominance = all(ys[j - 1] > sum(ys[:j - 1]) for j in range(2, jmax + 1))
    checks = [
        _check("y_recursion", ok_rec, y_head=ys[:6]),
        _check("y_dominance", dominance, through=jmax),
    ]
    onsets = {}
    all_found = True
    for xi in extra_xi:
        basis = primitive_completion(xi)
        eta = (basis[0][1], basis[1][1])
        seq = []
        for j in range(jmax + 1):
            v = intmat.matvec(intmat.mat_power(HYPERBOLIC_A, j), xi)
            seq.append(v[0] * eta[1] - v[1] * eta[0])
        onset = dominance_onset(seq)
        onsets[str(list(xi))] = onset
        if onset is None or onset >= jmax:
            all_found = False
    checks.append(_check("aj_dominance_onset", all_found, onsets=onsets, through=jmax))
    return checks


# --- Heisenberg pullback ---------------------------------------------------------------------------

def verify_heisenberg_pullback(radius=14):
    q = heisenberg()
    u, v = q.gens[0], q.gens[1]
    inner = cyclic_powers(q, u)
    f2 = FreeGroup(2)
    pb = pullback(f2, Homomorphism(f2, q, [u, v]), inner)
    lifted = schreier_ball(f2, pb, radius).ball_sizes
    direct = schreier_ball(q, inner, radius).ball_sizes
    cls = growth_fit(GrowthSeries(lifted, "schreier"))
    return [
        _check("schreier_growth_agrees", lifted == direct, lifted=lifted, direct=direct),
        _check("classified_polynomial", cls.label == POLYNOMIAL, fit=cls.as_dict()),
    ]


# --- free factor ----------------------------------------------------------------------------------

def verify_free_factor_malnormal(radius=6):
    f3 = FreeGroup(3)
    h = free_subgroup(f3, ["a", "b"])
    checks = []
    for k in ("c", "C"):
        x = f3.inv(f3.parse(k))  # x^-1 g x = k g k^-1
        series = conj_intersection_growth(f3, h, x, radius)
        checks.append(_check(f"H_cap_conj_trivial_{k}", all(c == 1 for c in series.counts),
                             k=f3.format(f3.parse(k)), counts=series.counts))
    return checks


REGISTRY = {
    "sl3-ut3-transversal": verify_sl3_ut3_transversal,
    "sl3-ut3-K-growth": verify_sl3_ut3_k_growth,
    "parabolic-2m-expansion": verify_parabolic_2m_expansion,
    "aj-dominance": verify_aj_dominance,
    "heisenberg-pullback": verify_heisenberg_pullback,
    "free-factor-malnormal": verify_free_factor_malnormal,
}


def verify_named_example(example_id: str, **params) -> VerifierReport:
    fn = REGISTRY.get(example_id)
    if fn is None:
        raise UnknownExample(f"no verifier named {example_id!r}; known: {sorted(REGISTRY)}")
    start = time.perf_counter()
    checks = fn(**params)
    return VerifierReport(example_id, checks, int((time.perf_counter() - start) * 1000))
