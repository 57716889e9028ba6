"""Exact and floating convolution of random walks on G and G/H.

States of a coset space are numbered in discovery order; every support point
of the driving measure gets a successor array over those numbers, so one step
is a handful of vectorized scatters.  Exact mode stores integer numerators
over the scale D^n, where D is the common denominator of the step weights.
"""
from __future__ import annotations

import csv
import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce

import mpmath
import numpy as np

from .cosets import CosetSpace, SubgroupOracle, key_hex, trivial
from .errors import BudgetExceeded, InsufficientData, MixedModel
from .groups import DEFAULT_BUDGET, GroupModel, word_length

INT64_SAFE = 2 ** 62


# --- measures ----------------------------------------------------------------------

@dataclass
class Measure:
    """Finitely supported probability measure on a group model."""

    model: GroupModel
    support: list  # [(g, weight)] in a fixed order
    exact: bool

    @classmethod
    def from_dict(cls, model, weights: dict, exact=None):
        items = [(g, w) for g, w in weights.items()]
        for g, _ in items:
            model.check(g)
        if exact is None:
            exact = all(isinstance(w, (int, Fraction)) for _, w in items)
        if exact:
            items = [(g, Fraction(w)) for g, w in items]
            total = sum(w for _, w in items)
            if total != 1:
                raise ValueError(f"weights sum to {total}, not 1")
        else:
            items = [(g, float(w)) for g, w in items]
            if abs(math.fsum(w for _, w in items) - 1.0) > 1e-12:
                raise ValueError("weights must sum to 1 within 1e-12")
        if any(w <= 0 for _, w in items):
            raise ValueError("weights must be positive")
        return cls(model, items, exact)

    @classmethod
    def srw(cls, model: GroupModel):
        """Uniform on the (symmetric) generating list."""
        k = len(model.gens)
        return cls(model, [(s, Fraction(1, k)) for s in model.gens], True)

    @classmethod
    def dirac(cls, model: GroupModel, g=None):
        g = model.identity() if g is None else g
        return cls(model, [(g, Fraction(1))], True)

    @property
    def elements(self):
        return [g for g, _ in self.support]

    @property
    def weights(self):
        return [w for _, w in self.support]

    @property
    def denominator(self):
        if not self.exact:
            raise ValueError("float measures have no common denominator")
        return reduce(lambda a, b: a * b // math.gcd(a, b),
                      (w.denominator for w in self.weights), 1)

    def integer_weights(self):
        d = self.denominator
        return [int(w * d) for w in self.weights]

    @property
    def symmetric(self):
        m = self.model
        table = dict(self.support)
        return all(table.get(m.inv(g)) == w for g, w in self.support)

    def radius(self, cap=64):
        out = 0
        for g in self.elements:
            ell = word_length(self.model, g, cap)
            if ell is None:
                raise BudgetExceeded(cap, cap, "radius (support element length)")
            out = max(out, ell)
        return out

    def entropy(self):
        return -math.fsum(float(w) * math.log(float(w)) for w in self.weights)

    def fingerprint(self):
        m = self.model
        return tuple((m.encode(g), str(w)) for g, w in self.support)


# --- state numbering and transitions ----------------------------------------------

class _StateIndex:
    """Numbering of the keys of one coset space plus successor tables."""

    def __init__(self, space: CosetSpace):
        self.space = space
        self.keys = []
        self.pos = {}
        self.tables = {}   # measure fingerprint -> list of int64 arrays
        self.filled = {}   # measure fingerprint -> number of rows filled
        self.maps = {}     # id(target index) -> int64 array into target
        self.lengths = None
        self.add(space.origin)

    def add(self, key):
        i = self.pos.get(key)
        if i is None:
            i = len(self.keys)
            self.pos[key] = i
            self.keys.append(key)
        return i

    def successors(self, measure: Measure, upto: int):
        fp = measure.fingerprint()
        tabs = self.tables.get(fp)
        if tabs is None:
            tabs = [np.zeros(0, dtype=np.int64) for _ in measure.support]
            self.tables[fp] = tabs
            self.filled[fp] = 0
        done = self.filled[fp]
        if done < upto:
            act = self.space.act
            new_rows = []
            for g in measure.elements:
                new_rows.append([self.add(act(g, self.keys[i])) for i in range(done, upto)])
            for j, rows in enumerate(new_rows):
                tabs[j] = np.concatenate([tabs[j], np.asarray(rows, dtype=np.int64)])
            self.filled[fp] = upto
        return tabs

    def ensure_lengths(self, upto):
        model = self.space.model
        have = 0 if self.lengths is None else len(self.lengths)
        if have >= upto:
            return self.lengths
        if model.exact_length(model.identity()) is None:
            raise MixedModel("lifted diagnostics need a model with closed-form lengths")
        extra = np.array([model.exact_length(self.space.representative(k))
                          for k in self.keys[have:upto]], dtype=np.int64)
        self.lengths = extra if self.lengths is None else np.concatenate([self.lengths, extra])
        return self.lengths

    def map_to(self, target: "_StateIndex", upto):
        arr = self.maps.get(id(target), np.zeros(0, dtype=np.int64))
        if len(arr) < upto:
            space = target.space
            rep = self.space.representative
            extra = [target.add(space.key(rep(k))) for k in self.keys[len(arr):upto]]
            arr = np.concatenate([arr, np.asarray(extra, dtype=np.int64)])
            self.maps[id(target)] = arr
        return arr


def state_index(space: CosetSpace) -> _StateIndex:
    idx = getattr(space, "_state_index", None)
    if idx is None:
        idx = _StateIndex(space)
        space._state_index = idx
    return idx


# --- distributions -------------------------------------------------------------------

@dataclass
class CosetDistribution:
    """nu on X = G/H; ``masses[i]`` belongs to state i of the space's index.

    Exact mode: true mass = masses[i] / scale (integers).  Float mode: scale
    is None and masses are probabilities.
    """

    space: CosetSpace
    masses: np.ndarray
    n: int
    scale: int | None

    @property
    def exact(self):
        return self.scale is not None

    @property
    def index(self):
        return state_index(self.space)

    def nonzero(self):
        return np.nonzero(self.masses)[0]

    @property
    def support_size(self):
        return int(np.count_nonzero(self.masses))

    def probabilities(self):
        m = self.masses[self.nonzero()]
        if not self.exact:
            return m.astype(np.float64)
        if self.scale < INT64_SAFE and m.dtype != object:
            return m.astype(np.float64) / float(self.scale)
        ls = math.log(self.scale)
        return np.exp(np.array([math.log(int(x)) for x in m]) - ls)

    def log_probabilities(self):
        m = self.masses[self.nonzero()]
        if not self.exact:
            return np.log(m.astype(np.float64))
        if m.dtype != object:
            return np.log(m.astype(np.float64)) - math.log(self.scale)
        return np.array([math.log(int(x)) for x in m]) - math.log(self.scale)

    def as_dict(self):
        keys = self.index.keys
        nz = self.nonzero()
        if self.exact:
            return {keys[i]: Fraction(int(self.masses[i]), self.scale) for i in nz}
        return {keys[i]: float(self.masses[i]) for i in nz}

    def prob(self, key):
        i = self.index.pos.get(key)
        if i is None or i >= len(self.masses):
            return Fraction(0) if self.exact else 0.0
        if self.exact:
            return Fraction(int(self.masses[i]), self.scale)
        return float(self.masses[i])

    def total(self):
        if self.exact:
            return Fraction(int(sum(int(x) for x in self.masses[self.nonzero()])), self.scale)
        return math.fsum(self.masses[self.nonzero()])

    def to_float(self):
        if not self.exact:
            return self
        out = np.zeros(len(self.masses), dtype=np.float64)
        nz = self.nonzero()
        out[nz] = self.probabilities()
        return CosetDistribution(self.space, out, self.n, None)


@dataclass
class LiftedDistribution:
    """mu^{*n} on G itself (a distribution on the trivial coset space)."""

    dist: CosetDistribution

    @property
    def model(self):
        return self.dist.space.model

    @property
    def n(self):
        return self.dist.n

    def as_dict(self):
        return self.dist.as_dict()


def dirac(space: CosetSpace, exact=True) -> CosetDistribution:
    idx = state_index(space)
    i = idx.pos[space.origin]
    m = np.zeros(len(idx.keys), dtype=np.int64 if exact else np.float64)
    m[i] = 1
    return CosetDistribution(space, m, 0, 1 if exact else None)


def _check_measure(mu: Measure, space: CosetSpace):
    if mu.model != space.model:
        raise MixedModel("measure and coset space use different models")


def convolve_step(mu: Measure, nu: CosetDistribution, budget: int = DEFAULT_BUDGET) -> CosetDistribution:
    """nu'(x) = sum_g mu(g) nu(g^-1 x), scattering x -> g x."""
    space = nu.space
    _check_measure(mu, space)
    idx = state_index(space)
    nz = np.nonzero(nu.masses)[0]
    # successor rows only for occupied states; the frontier stays untouched
    tabs = idx.successors(mu, int(nz[-1]) + 1 if len(nz) else 0)
    size = len(idx.keys)
    if size > budget:
        raise BudgetExceeded(nu.n + 1, budget, "coset states")
    src = nu.masses[nz]
    if nu.exact:
        if not mu.exact:
            raise ValueError("exact distributions need a rational measure")
        d = mu.denominator
        weights = mu.integer_weights()
        scale = nu.scale * d
        big = src.dtype == object or scale >= INT64_SAFE
        if big:
            src = src.astype(object)
            out = np.zeros(size, dtype=object)
            out[:] = 0
            for t, w in zip(tabs, weights):
                np.add.at(out, t[nz], src * w)
        else:
            out = np.zeros(size, dtype=np.int64)
            for t, w in zip(tabs, weights):
                np.add.at(out, t[nz], src * w)
        return CosetDistribution(space, out, nu.n + 1, scale)
    # float: compensated (Kahan) accumulation across support points of mu
    total = np.zeros(size, dtype=np.float64)
    comp = np.zeros(size, dtype=np.float64)
    for t, w in zip(tabs, mu.weights):
        layer = np.bincount(t[nz], weights=src * float(w), minlength=size)
        y = layer - comp
        s = total + y
        comp = (s - total) - y
        total = s
    return CosetDistribution(space, total, nu.n + 1, None)


def walk(mu: Measure, space: CosetSpace, n_max: int, exact=True, budget=DEFAULT_BUDGET):
    """Yield nu_0, nu_1, ..., nu_{n_max}."""
    nu = dirac(space, exact)
    yield nu
    for _ in range(n_max):
        nu = convolve_step(mu, nu, budget)
        yield nu


def lifted_space(model: GroupModel) -> CosetSpace:
    """Shared trivial-oracle space so lifted walks reuse one state index."""
    cache = _LIFT_SPACES.get(model.model_hash)
    if cache is None:
        cache = CosetSpace(trivial(model, check=False))
        _LIFT_SPACES[model.model_hash] = cache
    return cache


_LIFT_SPACES: dict = {}


def lifted_dirac(model: GroupModel, exact=True) -> LiftedDistribution:
    return LiftedDistribution(dirac(lifted_space(model), exact))


def convolve_lifted(mu: Measure, lam: LiftedDistribution, budget=DEFAULT_BUDGET) -> LiftedDistribution:
    return LiftedDistribution(convolve_step(mu, lam.dist, budget))


def pushforward(lam: LiftedDistribution, space: CosetSpace) -> CosetDistribution:
    """pi_# mu^{*n}: sum the lifted masses over each coset."""
    if lam.model != space.model:
        raise MixedModel("pushforward target uses another model")
    src = lam.dist
    sidx = state_index(src.space)
    tidx = state_index(space)
    nz = src.nonzero()
    mapping = sidx.map_to(tidx, len(src.masses))
    size = len(tidx.keys)
    vals = src.masses[nz]
    if src.exact:
        dtype = object if vals.dtype == object else np.int64
        out = np.zeros(size, dtype=dtype)
        if dtype == object:
            out[:] = 0
        np.add.at(out, mapping[nz], vals)
    else:
        out = np.bincount(mapping[nz], weights=vals, minlength=size)
    return CosetDistribution(space, out, src.n, src.scale)


# --- entropies ------------------------------------------------------------------------

def _logsumexp(x):
    m = float(np.max(x))
    return m + math.log(math.fsum(np.exp(x - m)))


def shannon(nu: CosetDistribution) -> float:
    lp = nu.log_probabilities()
    p = np.exp(lp)
    return -math.fsum(p * lp)


def renyi(nu: CosetDistribution, alpha: float) -> float:
    """H_alpha = log(sum nu^alpha) / (1 - alpha); alpha > 0, alpha != 1."""
    if alpha <= 0 or alpha == 1:
        raise ValueError("Renyi order must be positive and != 1")
    lp = nu.log_probabilities()
    return _logsumexp(alpha * lp) / (1.0 - alpha)


def qnorm(nu: CosetDistribution, q: float) -> float:
    return math.exp(log_qnorm(nu, q))


def log_qnorm(nu: CosetDistribution, q: float) -> float:
    lp = nu.log_probabilities()
    return _logsumexp(q * lp) / q


def conjugate_exponent(q):
    q = Fraction(q) if not isinstance(q, float) else q
    return q / (q - 1)


def entropy_profile(nu: CosetDistribution, alphas=(), qs=()):
    out = {"n": nu.n, "support_size": nu.support_size, "H": shannon(nu),
           "renyi": {}, "qnorm": {}}
    for a in alphas:
        out["renyi"][float(a)] = renyi(nu, float(a))
    for q in qs:
        out["qnorm"][float(q)] = qnorm(nu, float(q))
    return out


# --- exact decisions ---------------------------------------------------------------

_DECIDE_GAP = 1e-9
_MP_DPS = 60


def _mp_terms(nu: CosetDistribution):
    nz = nu.nonzero()
    if nu.exact:
        s = mpmath.mpf(nu.scale)
        return [mpmath.mpf(int(x)) / s for x in nu.masses[nz]]
    return [mpmath.mpf(float(x)) for x in nu.masses[nz]]


def _is_uniform(nu):
    vals = nu.masses[nu.nonzero()]
    return len(vals) > 0 and bool(np.all(vals == vals[0]))


def entropy_dominates(nu: CosetDistribution, q) -> bool:
    """H(nu) >= H_q(nu), decided at 60 digits when floats are too close.

    Uniform distributions give equality, which is accepted."""
    if _is_uniform(nu):
        return True
    q = float(q)
    gap = shannon(nu) - renyi(nu, q)
    if abs(gap) > _DECIDE_GAP:
        return gap > 0
    with mpmath.workdps(_MP_DPS):
        ps = _mp_terms(nu)
        h = -mpmath.fsum(p * mpmath.log(p) for p in ps)
        hq = mpmath.log(mpmath.fsum(p ** mpmath.mpf(q) for p in ps)) / (1 - mpmath.mpf(q))
        return h - hq >= -mpmath.mpf(10) ** (-(_MP_DPS - 20))


def norm_lower_bound_holds(nu: CosetDistribution, q, h_mu: float) -> bool:
    """||nu_n||_q^{1/n} >= exp((1-q)/q H(mu)), compared in log form."""
    if nu.n == 0:
        return True
    q = float(q)
    lhs = log_qnorm(nu, q) / nu.n
    rhs = (1 - q) / q * h_mu
    if abs(lhs - rhs) > _DECIDE_GAP:
        return lhs > rhs
    with mpmath.workdps(_MP_DPS):
        ps = _mp_terms(nu)
        qq = mpmath.mpf(q)
        l = mpmath.log(mpmath.fsum(p ** qq for p in ps)) / qq / nu.n
        return l - (1 - qq) / qq * mpmath.mpf(h_mu) >= -mpmath.mpf(10) ** (-12)


# --- rate fitting ----------------------------------------------------------------------

LINEAR = "linear_slope"
LOG_CORRECTED = "slope_with_log_correction"


@dataclass
class RateFit:
    rate: float
    stderr: float
    window: tuple
    model: str
    intercept: float
    log_coef: float | None
    cesaro: float
    points: int

    def as_dict(self):
        return {"rate": self.rate, "stderr": self.stderr, "window": list(self.window),
                "model": self.model, "intercept": self.intercept, "log_coef": self.log_coef,
                "cesaro": self.cesaro, "points": self.points}


def rate_fit(series, model=LINEAR, window=None) -> RateFit:
    """Least-squares slope of value against n over a tail window.

    ``window`` is an inclusive (n_lo, n_hi); by default the last half of the
    series with at least 5 points.
    """
    pts = sorted((int(n), float(v)) for n, v in series)
    if len(pts) < 4:
        raise InsufficientData("need at least 4 points")
    if window is None:
        k = max(5, (len(pts) + 1) // 2)
        pts = pts[-k:]
    else:
        lo, hi = window
        pts = [(n, v) for n, v in pts if lo <= n <= hi]
    if len(pts) < 4 and window is not None:
        raise InsufficientData(f"window {window} holds {len(pts)} points")
    ns = np.array([n for n, _ in pts], dtype=np.float64)
    vs = np.array([v for _, v in pts], dtype=np.float64)
    if model == LINEAR:
        X = np.column_stack([ns, np.ones_like(ns)])
    elif model == LOG_CORRECTED:
        if np.any(ns <= 0):
            raise InsufficientData("log correction needs n >= 1")
        X = np.column_stack([ns, np.log(ns), np.ones_like(ns)])
    else:
        raise ValueError(f"unknown rate model {model!r}")
    coef, *_ = np.linalg.lstsq(X, vs, rcond=None)
    resid = vs - X @ coef
    dof = len(vs) - X.shape[1]
    if dof > 0:
        sigma2 = float(resid @ resid) / dof
        cov = sigma2 * np.linalg.inv(X.T @ X)
        stderr = math.sqrt(max(cov[0, 0], 0.0))
    else:
        stderr = float("nan")
    cesaro = float((vs[-1] - vs[0]) / (ns[-1] - ns[0]))
    return RateFit(float(coef[0]), stderr, (int(ns[0]), int(ns[-1])), model,
                   float(coef[-1]), float(coef[1]) if model == LOG_CORRECTED else None,
                   cesaro, len(vs))


# --- Jensen diagnostic -----------------------------------------------------------------

@dataclass
class Diagnostic:
    n: int
    s: float
    p: float
    a: dict = field(repr=False)
    omega: dict = field(repr=False)
    jensen_ok: bool
    bound_ok: bool
    exact: bool
    violations: int


def weighted_diagnostic(lam: LiftedDistribution, space: CosetSpace, s, p, radius=1,
                        keep_maps=True) -> Diagnostic:
    """a_{n,p}(x) = sum over the fiber of mu^n(g)(1+l(g))^{s/p} and
    omega_n(x) = E[(1+l)^s | X_n = x]; checks a <= nu omega^{1/p} and
    1 <= omega <= (1+nR)^s.  Exact whenever s/p is an integer."""
    src = lam.dist
    sidx = state_index(src.space)
    tidx = state_index(space)
    n = src.n
    nz = src.nonzero()
    lengths = sidx.ensure_lengths(len(src.masses))[nz]
    mapping = sidx.map_to(tidx, len(src.masses))[nz]
    cells = len(tidx.keys)
    ratio = Fraction(s) / Fraction(p) if not isinstance(s, float) and not isinstance(p, float) else None
    exact = src.exact and ratio is not None and ratio.denominator == 1 and Fraction(s).denominator == 1
    if exact:
        k = int(ratio)
        si = int(s)
        pi = int(p)
        vals = src.masses[nz].astype(object)
        base = (lengths + 1).astype(object)
        V = np.zeros(cells, dtype=object); V[:] = 0
        A = np.zeros(cells, dtype=object); A[:] = 0
        B = np.zeros(cells, dtype=object); B[:] = 0
        np.add.at(V, mapping, vals)
        np.add.at(A, mapping, vals * base ** k)
        np.add.at(B, mapping, vals * base ** si)
        lo = np.full(cells, np.iinfo(np.int64).max, dtype=np.int64)
        hi = np.full(cells, -1, dtype=np.int64)
        np.minimum.at(lo, mapping, lengths)
        np.maximum.at(hi, mapping, lengths)
        cap = (1 + n * radius) ** si
        jensen_ok = bound_ok = True
        violations = 0
        for c in np.unique(mapping):
            v, a, b = int(V[c]), int(A[c]), int(B[c])
            if not (v <= b <= cap * v):
                bound_ok = False
                violations += 1
            # single-length fibers give equality; otherwise a^p <= v^{p-1} b
            if lo[c] != hi[c] and a ** pi > v ** (pi - 1) * b:
                jensen_ok = False
                violations += 1
        scale = src.scale
        a_map = omega_map = {}
        if keep_maps:
            keys = tidx.keys
            uniq = np.unique(mapping)
            a_map = {keys[c]: Fraction(int(A[c]), scale) for c in uniq}
            omega_map = {keys[c]: Fraction(int(B[c]), int(V[c])) for c in uniq}
        return Diagnostic(n, s, p, a_map, omega_map, jensen_ok, bound_ok, True, violations)
    probs = np.zeros(len(src.masses))
    probs[nz] = src.to_float().masses[nz]
    w = probs[nz]
    base = lengths.astype(np.float64) + 1.0
    s_f, p_f = float(s), float(p)
    V = np.bincount(mapping, weights=w, minlength=cells)
    A = np.bincount(mapping, weights=w * base ** (s_f / p_f), minlength=cells)
    B = np.bincount(mapping, weights=w * base ** s_f, minlength=cells)
    uniq = np.unique(mapping)
    omega = B[uniq] / V[uniq]
    rhs = V[uniq] * omega ** (1.0 / p_f)
    slack = 1e-12
    jensen = A[uniq] <= rhs * (1 + slack)
    cap = (1 + n * radius) ** s_f
    bound = (omega >= 1 - slack) & (omega <= cap * (1 + slack))
    keys = tidx.keys
    a_map = {keys[c]: float(A[c]) for c in uniq} if keep_maps else {}
    omega_map = {keys[c]: float(o) for c, o in zip(uniq, omega)} if keep_maps else {}
    return Diagnostic(n, s, p, a_map, omega_map, bool(jensen.all()), bool(bound.all()),
                      False, int((~jensen).sum() + (~bound).sum()))


# --- Monte Carlo collisions ----------------------------------------------------------------

@dataclass
class CollisionEstimate:
    trials: int
    collisions: int
    estimate: float | None
    ci: tuple
    lower_bound: float | None
    zero_collisions: bool


def mc_collision_renyi2(space: CosetSpace, mu: Measure, n: int, trials: int, seed: int) -> CollisionEstimate:
    """H_2(nu_n) from collisions of paired independent n-step walks."""
    if trials < 1000:
        raise ValueError("need at least 1000 trials")
    _check_measure(mu, space)
    rng = random.Random(seed)
    elems = mu.elements
    weights = [float(w) for w in mu.weights]
    cum = list(np.cumsum(weights))
    hits = 0
    o = space.origin
    act = space.act
    for _ in range(trials):
        ends = []
        for _ in range(2):
            x = o
            for g in rng.choices(elems, cum_weights=cum, k=n):
                x = act(g, x)
            ends.append(x)
        hits += ends[0] == ends[1]
    z = 1.959963984540054
    if hits == 0:
        upper = 3.0 / trials
        return CollisionEstimate(trials, 0, None, (-math.log(upper), math.inf),
                                 -math.log(upper), True)
    phat = hits / trials
    half = z * math.sqrt(phat * (1 - phat) / trials)
    lo, hi = max(phat - half, 1e-300), min(phat + half, 1.0)
    return CollisionEstimate(trials, hits, -math.log(phat), (-math.log(hi), -math.log(lo)),
                             None, False)


# --- export -----------------------------------------------------------------------------

def _fmt(x):
    return repr(float(x))


def write_walk_csv(profiles, path, alphas=(), qs=()):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n", "support_size", "H"] + [f"H_alpha_{a:g}" for a in alphas]
                   + [f"qnorm_{q:g}" for q in qs])
        for prof in profiles:
            w.writerow([prof["n"], prof["support_size"], _fmt(prof["H"])]
                       + [_fmt(prof["renyi"][float(a)]) for a in alphas]
                       + [_fmt(prof["qnorm"][float(q)]) for q in qs])


def walk_summary(profiles, fits: dict, exact: bool, extra=None):
    out = {"mode": "exact" if exact else "float", "steps": profiles[-1]["n"] if profiles else 0,
           "fits": {k: v.as_dict() for k, v in fits.items()}}
    if extra:
        out.update(extra)
    return out


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, indent=2, default=_json_default)


def _json_default(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, bytes):
        return x.hex()
    raise TypeError(f"not serializable: {type(x)}")


__all__ = [
    "Measure", "CosetDistribution", "LiftedDistribution", "convolve_step", "walk",
    "convolve_lifted", "lifted_dirac", "lifted_space", "pushforward", "dirac",
    "shannon", "renyi", "qnorm", "log_qnorm", "entropy_profile", "rate_fit", "RateFit",
    "weighted_diagnostic", "mc_collision_renyi2", "write_walk_csv", "walk_summary",
    "entropy_dominates", "norm_lower_bound_holds", "LINEAR", "LOG_CORRECTED", "key_hex",
    "SubgroupOracle", "state_index",
]
