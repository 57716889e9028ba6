"""Acceptance gate: ten numbered criteria, each reported as one PASS/FAIL line
in the terminal summary (see conftest.py).  Tolerances are the stated ones;
nothing is loosened to make a line green."""
from __future__ import annotations

import itertools
import math
import random
import time
from fractions import Fraction

import pytest

from cosetwalk import cosets, norms, walks
from cosetwalk.cosets import CosetSpace
from cosetwalk.errors import FixedSpaceTrivial, NotUnipotent
from cosetwalk.groups import (FreeAbelian, FreeGroup, ball_enumerate, heisenberg,
                              sl_elementary)
from cosetwalk.growth import covering_check
from cosetwalk.lattice import (IntLattice, hnf_rank_index, is_upper_unitriangular,
                               kolchin_triangularize, primitive_completion)
from cosetwalk import intmat
from cosetwalk.norms import FinFunc, Polynomial, PolynomialBall, RDWitness
from cosetwalk.stallings import classify_pair_free, fold, rank_index
from cosetwalk.verifiers import verify_named_example
from cosetwalk.walks import Measure

from oracles import (CosetTable, all_reduced_words, free_srw_entropy, free_srw_log_l2,
                     int_det, lattice_index_by_counting)
from test_stallings import GOLDEN

F2 = FreeGroup(2)
F3 = FreeGroup(3)
Q_SET = (Fraction(2), Fraction(4, 3), Fraction(8, 7))
WINDOW = (8, 13)


def criterion(n, title):
    return pytest.mark.criterion(n, title)


# --- 1 ---------------------------------------------------------------------------------

@criterion(1, "exact inequality suite on F2 and F2/<a>, n <= 12")
def test_c1_exact_inequalities():
    start = time.perf_counter()
    mu = Measure.srw(F2)
    h_mu = mu.entropy()
    failures = []
    for name, orc in (("F2", cosets.trivial(F2)), ("F2/<a>", cosets.cyclic_powers(F2, "a"))):
        space = CosetSpace(orc)
        lam = walks.lifted_dirac(F2)
        for nu in walks.walk(mu, space, 12, exact=True):
            if nu.n == 0:
                continue
            lam = walks.convolve_lifted(mu, lam)
            assert walks.pushforward(lam, space).as_dict().keys() == nu.as_dict().keys()
            for q in Q_SET:
                p = walks.conjugate_exponent(q)
                if not walks.entropy_dominates(nu, q):
                    failures.append((name, nu.n, str(q), "H >= H_q"))
                hq = walks.renyi(nu, float(q))
                if abs(hq - (-float(p) * walks.log_qnorm(nu, float(q)))) > 1e-10:
                    failures.append((name, nu.n, str(q), "H_q = -p log ||nu||_q"))
                if not walks.norm_lower_bound_holds(nu, q, h_mu):
                    failures.append((name, nu.n, str(q), "norm lower bound"))
                s = int(p)  # s/p = 1: the rational (exact) branch
                d = walks.weighted_diagnostic(lam, space, s, int(p), keep_maps=False)
                if not (d.exact and d.jensen_ok and d.bound_ok):
                    failures.append((name, nu.n, str(q), "Jensen diagnostic"))
    elapsed = time.perf_counter() - start
    assert not failures, failures
    assert elapsed < 120, f"runtime {elapsed:.1f}s"


# --- 2, 3, 5: shared float profiles ---------------------------------------------------------

@pytest.fixture(scope="module")
def free_profile():
    space = CosetSpace(cosets.trivial(F2))
    t = time.perf_counter()
    prof = norms.spectral_profile(space, Measure.srw(F2), [2, 1.5, Fraction(4, 3), Fraction(8, 7)],
                                  13, exact=False, window=WINDOW)
    return prof, time.perf_counter() - t


@criterion(2, "Kesten cross-check r_2 = 0.866 +- 0.018")
def test_c2_kesten(free_profile):
    prof, elapsed = free_profile
    # the walk itself against the radial oracle
    space = CosetSpace(cosets.trivial(F2))
    for nu in walks.walk(Measure.srw(F2), space, 10, exact=False):
        assert walks.log_qnorm(nu, 2) == pytest.approx(free_srw_log_l2(nu.n), abs=1e-9)
    r2 = prof.row(2)["r_q"]
    assert abs(r2 - math.sqrt(3) / 2) <= 0.018, r2
    assert elapsed < 300


@criterion(3, "entropy rate 0.549 +- 0.028 and monotone -p log r_q")
def test_c3_entropy_rate(free_profile):
    prof, _ = free_profile
    for n in (8, 13):
        nu = None
        for nu in walks.walk(Measure.srw(F2), CosetSpace(cosets.trivial(F2)), n, exact=False):
            pass
        assert walks.shannon(nu) == pytest.approx(free_srw_entropy(n), abs=1e-9)
    drift_times_growth = 0.5 * math.log(3)
    rate = prof.shannon_fit.rate
    assert abs(rate - drift_times_growth) <= 0.028, rate
    ps = [r["p"] for r in prof.rows]
    assert ps == sorted(ps) and [round(p) for p in ps] == [2, 3, 4, 8]
    assert prof.monotone, [r["minus_p_log_rq"] for r in prof.rows]


# --- 4 ------------------------------------------------------------------------------------

@criterion(4, "amenable baseline on Z^2: H/n decreasing, < 0.12 at 30; ||nu_30||_2^(1/30) >= 0.97")
def test_c4_amenable_baseline():
    z2 = FreeAbelian(2)
    space = CosetSpace(cosets.trivial(z2))
    ratios, last = [], None
    for nu in walks.walk(Measure.srw(z2), space, 30, exact=True):
        if nu.n:
            ratios.append(walks.shannon(nu) / nu.n)
        last = nu
    decreasing = all(b < a for a, b in zip(ratios, ratios[1:]))
    final = ratios[-1]
    root = math.exp(walks.log_qnorm(last, 2) / 30)
    assert decreasing, "H/n not decreasing"
    assert final < 0.12, f"H(nu_30)/30 = {final:.4f}"
    assert root >= 0.97, f"||nu_30||_2^(1/30) = {root:.4f}"


# --- 5 ------------------------------------------------------------------------------------

@criterion(5, "Renyi continuity trend on F2/<a>")
def test_c5_renyi_trend():
    space = CosetSpace(cosets.cyclic_powers(F2, "a"))
    alphas = [1.5, 1.25, 1.1]
    prof = norms.spectral_profile(space, Measure.srw(F2), alphas, 13, exact=False, window=WINDOW)
    h = prof.shannon_fit.rate
    gaps = []
    for a in alphas:
        r = prof.row(a)["r_q"]
        h_a = a / (1 - a) * math.log(r)
        gaps.append(abs(h_a - h))
    assert all(b < a for a, b in zip(gaps, gaps[1:])), gaps


# --- 6 ------------------------------------------------------------------------------------

@criterion(6, "free-group classification golden set vs coset enumeration")
def test_c6_free_classification():
    assert len(GOLDEN) >= 12
    for n, gens, verdict, rank, index in GOLDEN:
        out = classify_pair_free(n, gens)
        assert (out["verdict"], out["rank"]) == (verdict, rank), gens
        assert out["index"] == ("infinite" if index == math.inf else index), gens
        model = FreeGroup(n)
        words = [model.parse(w) for w in gens]
        letters = [tuple(c if c < 128 else c - 256 for c in w) for w in words]
        table = CosetTable(n, letters)
        r, i = rank_index(fold(n, words))
        assert i == table.index
        if i != math.inf:
            assert r == 1 + i * (n - 1)
            for w in all_reduced_words(n, 6):
                word = bytes(c if c > 0 else 256 + c for c in w)
                assert fold(n, words).accepts(word) == table.contains(w)


# --- 7 ------------------------------------------------------------------------------------

@pytest.fixture(scope="module")
def free_factor_rows():
    """(R, support radius, herz lower bound, ||f_R||_(2,1)) for R = 1..10."""
    space = CosetSpace(cosets.free_subgroup(F3, ["a", "b"]))
    rows = []
    for R in range(1, 11):
        f, phi = norms.free_factor_pair(F3, 2, "c", R)
        herz = norms.herz_lower(f, phi, space)
        assert herz.fast_path
        rows.append((R, R + 1, herz.value, norms.lorentz_norm(f, space, 2)))
    return rows


@criterion(7, "witness falsification on F3/<a,b>; index-m witness survives")
def test_c7a_polynomial_witnesses_refuted(free_factor_rows):
    for R, _, herz, lnorm in free_factor_rows:
        assert herz == pytest.approx(norms.n_r(2, R))
        assert herz >= 3 ** R
    survivors = []
    for C, D in itertools.product([1, 10, 100, 1000], range(7)):
        w = RDWitness(PolynomialBall(float(C), float(D)))
        # witness_rhs at q = 2 is C (R_supp + 1)^D ||f||_(2,1)
        refuted = any(herz > C * (rs + 1) ** D * lnorm * (1 + norms.VIOLATION_SLACK)
                      for _, rs, herz, lnorm in free_factor_rows)
        if not refuted:
            survivors.append((C, D))
        assert w.label == "PolynomialBall"
    assert not survivors, f"{len(survivors)} of 28 (C, D) witnesses survive R <= 10: {survivors[:6]}..."


@criterion(7, "witness falsification on F3/<a,b>; index-m witness survives")
def test_c7b_finite_index_witness_survives():
    sl2, sl3 = sl_elementary(2), sl_elementary(3)
    cases = [
        (F2, cosets.free_subgroup(F2, ["a", "b^2", "bab^-1"]), 2),
        (F2, cosets.free_subgroup(F2, ["a^3", "b", "aba^-1", "a^2ba^-2"]), 3),
        (sl2, cosets.congruence(sl2, 2), 6),
        (sl3, cosets.congruence(sl3, 2), 168),
    ]
    total = violations = 0
    for k, (model, orc, m) in enumerate(cases):
        space = CosetSpace(orc)
        fam = norms.random_family(model, 2, 125, seed=100 + k)
        rep = norms.rd_witness_test(space, RDWitness(Polynomial(math.sqrt(m), 0.0)), fam,
                                    q_list=(2,), opnorm=False)
        total += len(rep.rows)
        violations += rep.violations
    assert total == 500
    assert violations == 0


# --- 8 ------------------------------------------------------------------------------------

@criterion(8, "named-example verifiers")
def test_c8_verifiers():
    start = time.perf_counter()
    params = {
        "sl3-ut3-transversal": {"max_n": 8},
        "sl3-ut3-K-growth": {"radius": 10},
        "parabolic-2m-expansion": {"m": 12},
        "aj-dominance": {"jmax": 40},
        "heisenberg-pullback": {"radius": 14},
        "free-factor-malnormal": {"radius": 6},
    }
    failed = []
    for eid, kw in params.items():
        rep = verify_named_example(eid, **kw)
        if not rep.passed:
            failed.append(eid)
        if eid == "parabolic-2m-expansion":
            keys = next(c for c in rep.checks if c.name == "coset_keys_distinct")
            assert keys.details["distinct"] == 2 ** 12
        if eid == "heisenberg-pullback":
            agree = next(c for c in rep.checks if c.name == "schreier_growth_agrees")
            assert len(agree.details["lifted"]) == 15
    assert not failed, failed
    assert time.perf_counter() - start < 600


# --- 9 ------------------------------------------------------------------------------------

def _random_sl3(rng, steps=6):
    g = intmat.identity(3)
    for _ in range(steps):
        i, j = rng.sample(range(3), 2)
        g = intmat.matmul(g, intmat.elementary(3, i, j, rng.choice([-2, -1, 1, 2])))
    return g


@criterion(9, "lattice suite")
def test_c9_lattice_suite():
    rng = random.Random(2024)
    for _ in range(200):
        d = rng.randint(1, 3)
        gens = [tuple(rng.randint(-3, 3) for _ in range(d)) for _ in range(rng.randint(1, d + 1))]
        assert hnf_rank_index(IntLattice(gens, d)).index == lattice_index_by_counting(gens, d), gens
    done = 0
    while done < 500:
        n = rng.randint(2, 5)
        v = [rng.randint(-40, 40) for _ in range(n)]
        if math.gcd(*v) != 1:
            continue
        m = primitive_completion(v)
        assert int_det(m) == 1 and [r[0] for r in m] == v
        done += 1
    for _ in range(100):
        gens = [((1, rng.randint(-4, 4), rng.randint(-4, 4)), (0, 1, rng.randint(-4, 4)), (0, 0, 1))
                for _ in range(rng.randint(1, 3))]
        c = _random_sl3(rng)
        ci = intmat.inverse(c)
        conj = [intmat.matmul(intmat.matmul(c, g), ci) for g in gens]
        tri = kolchin_triangularize(conj)
        gi = intmat.inverse(tri.conjugator)
        assert all(is_upper_unitriangular(intmat.matmul(intmat.matmul(tri.conjugator, x), gi))
                   for x in conj)
    rejected = 0
    while rejected < 20:
        g = _random_sl3(rng, 8)
        n1 = intmat.sub_identity(g)
        if intmat.is_zero(intmat.matmul(n1, intmat.matmul(n1, n1))):
            continue
        with pytest.raises((NotUnipotent, FixedSpaceTrivial)):
            kolchin_triangularize([g])
        rejected += 1


# --- 10 -----------------------------------------------------------------------------------

def _covering_matrix():
    h3 = heisenberg()
    sl3 = sl_elementary(3)
    z2 = FreeAbelian(2)
    z = ((1, 0, 1), (0, 1, 0), (0, 0, 1))
    pairs = [
        (F2, cosets.cyclic_powers(F2, "a"), 3),
        (F2, cosets.free_subgroup(F2, ["a", "bab^-1"]), 3),
        (F2, cosets.free_subgroup(F2, ["a", "b^2", "bab^-1"]), 3),
        (F3, cosets.free_subgroup(F3, ["a", "b"]), 3),
        (h3, cosets.cyclic_powers(h3, h3.gens[0]), 3),
        (h3, cosets.cyclic_powers(h3, z), 3),
        (z2, cosets.cyclic_powers(z2, (1, 2)), 3),
        (sl3, cosets.upper_unitriangular(sl3), 2),
        (sl3, cosets.line_stabilizer(sl3, (1, 0, 0)), 2),
        (sl3, cosets.congruence(sl3, 2), 2),
    ]
    cases = []
    for model, orc, rmax in pairs:
        xs = ball_enumerate(model, 1).elements()[:5]
        for k, x in enumerate(xs):
            cases.append((model, orc, x, 1 + k % rmax))
    return cases


@criterion(10, "covering_check on a 50-case matrix")
def test_c10_covering_matrix():
    cases = _covering_matrix()
    assert len(cases) == 50
    bad = []
    for model, orc, x, R in cases:
        res = covering_check(model, orc, x, R)
        if not res.ok:
            bad.append((orc.family, model.format(x), R, res.failures[:3]))
    assert not bad, bad
