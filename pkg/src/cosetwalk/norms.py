"""Mixed norms on G/H, Herz-norm lower bounds, operator norms and witnesses.

Nothing here computes a Herz norm exactly; ``herz_lower`` gives a certified
lower bound for a chosen test function and witnesses supply the upper side.
"""
from __future__ import annotations

import csv
import math
import random
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .cosets import CosetSpace, schreier_ball
from .errors import BudgetExceeded, InsufficientData, ZeroDenominator
from .groups import DEFAULT_BUDGET, FreeGroup, GroupModel, word_length
from .walks import (LOG_CORRECTED, Measure, conjugate_exponent, log_qnorm, rate_fit,
                    shannon, walk)


@dataclass
class FinFunc:
    """Finitely supported function on G (values int, Fraction, float or complex)."""

    model: GroupModel
    values: dict

    @classmethod
    def delta(cls, model, g=None, value=1):
        return cls(model, {model.identity() if g is None else g: value})

    @classmethod
    def indicator(cls, model, elements):
        return cls(model, {g: 1 for g in elements})

    @classmethod
    def from_measure(cls, mu: Measure):
        return cls(mu.model, dict(mu.support))

    def scaled(self, c):
        return FinFunc(self.model, {g: c * v for g, v in self.values.items()})

    def nonnegative(self):
        return all(not isinstance(v, complex) and v >= 0 for v in self.values.values())

    def radius(self, cap=64):
        out = 0
        for g in self.values:
            ell = word_length(self.model, g, cap)
            if ell is None:
                raise BudgetExceeded(cap, cap, "radius (support element length)")
            out = max(out, ell)
        return out

    def l1(self):
        return sum(abs(v) for v in self.values.values())

    def __len__(self):
        return len(self.values)


# --- Lorentz norms -------------------------------------------------------------------

def fiber_sums(f: FinFunc, space: CosetSpace) -> dict:
    """x -> sum over g in x of |f(g)| (the bucket sums pi_#|f|)."""
    out = defaultdict(int)
    key = space.key
    for g, v in f.values.items():
        if v:
            out[key(g)] += abs(v)
    return dict(out)


def lorentz_power_sum(f: FinFunc, space: CosetSpace, q: int):
    """Exact sum_x (pi_#|f|(x))^q for integer q (rational inputs stay exact)."""
    if int(q) != q or q < 1:
        raise ValueError("exact power sums need an integer q >= 1")
    return sum(s ** int(q) for s in fiber_sums(f, space).values())


def lorentz_norm(f: FinFunc, space: CosetSpace, q=2) -> float:
    """||f||_{(q,1)}: the l^q norm over cosets of the l^1 fiber sums."""
    q = float(q)
    if q < 1:
        raise ValueError("q must be >= 1")
    sums = np.array([float(s) for s in fiber_sums(f, space).values()], dtype=np.float64)
    if sums.size == 0:
        return 0.0
    m = sums.max()
    return float(m * math.fsum((sums / m) ** q) ** (1.0 / q))


# --- convolution and Herz lower bounds -------------------------------------------------

def convolve_funcs(f: FinFunc, phi: FinFunc, budget=DEFAULT_BUDGET) -> FinFunc:
    """(f * phi)(x) = sum_y f(y) phi(y^-1 x) = sum over products y z."""
    if len(f) * len(phi) > budget:
        raise BudgetExceeded(0, budget, "convolution terms")
    mul = f.model.mul
    out = defaultdict(int)
    for y, a in f.values.items():
        for z, b in phi.values.items():
            out[mul(y, z)] += a * b
    return FinFunc(f.model, {g: v for g, v in out.items() if v})


def _pushed_convolution(f: FinFunc, phi: FinFunc, space: CosetSpace) -> dict:
    """pi_#(f * phi) = lambda_X(f) pi_#(phi), valid for any f, phi."""
    pushed = defaultdict(int)
    for g, v in phi.values.items():
        pushed[space.key(g)] += v
    out = defaultdict(int)
    act = space.act
    for y, a in f.values.items():
        for x, b in pushed.items():
            out[act(y, x)] += a * b
    return out


@dataclass
class HerzBound:
    value: float
    numerator: float
    denominator: float
    fast_path: bool
    side: str = "lower"


def herz_lower(f: FinFunc, phi: FinFunc, space: CosetSpace, fast=None,
               budget=DEFAULT_BUDGET) -> HerzBound:
    """||f * phi||_{(2,1)} / ||phi||_{(2,1)}, a lower bound for ||f||_h.

    For nonnegative f and phi the fiber sums of f * phi are exactly
    pi_#(f * phi), so the convolution is never formed on G.
    """
    den = lorentz_norm(phi, space, 2)
    if den == 0:
        raise ZeroDenominator("phi has zero (2,1)-norm")
    if fast is None:
        fast = f.nonnegative() and phi.nonnegative()
    if fast:
        sums = np.array([float(v) for v in _pushed_convolution(f, phi, space).values()])
        m = sums.max() if sums.size else 0.0
        num = float(m * math.sqrt(math.fsum((sums / m) ** 2))) if m else 0.0
    else:
        num = lorentz_norm(convolve_funcs(f, phi, budget), space, 2)
    return HerzBound(num / den, num, den, bool(fast))


# --- operator norms ----------------------------------------------------------------------

def _apply(f: FinFunc, xi: dict, space: CosetSpace) -> dict:
    """(lambda(f) xi)(x) = sum_g f(g) xi(g^-1 x): mass at y moves to g y."""
    out = defaultdict(float)
    act = space.act
    for g, a in f.values.items():
        for y, b in xi.items():
            out[act(g, y)] += a * b
    return out


def _lq(vec, q):
    vals = np.abs(np.array(list(vec.values()), dtype=np.complex128 if any(
        isinstance(v, complex) for v in vec.values()) else np.float64))
    if vals.size == 0:
        return 0.0
    m = vals.max()
    if m == 0:
        return 0.0
    return float(m * math.fsum((vals / m) ** q) ** (1.0 / q))


@dataclass
class OpNormBound:
    value: float
    best: str
    tested: int
    side: str = "lower"


def opnorm_lower(f: FinFunc, space: CosetSpace, q, radius=2, trials=8, seed=0) -> OpNormBound:
    """max ||lambda_{X,q}(f) xi||_q / ||xi||_q over delta_o and seeded random
    nonnegative xi supported in B_X(radius)."""
    q = float(q)
    if not 1 < q <= 2:
        raise ValueError("q must lie in (1, 2]")
    f = FinFunc(f.model, {g: float(v) if not isinstance(v, complex) else v
                          for g, v in f.values.items()})
    tests = [("delta_o", {space.origin: 1.0})]
    if trials > 0:
        ball = schreier_ball(space.model, space.oracle, radius, space=space)
        pts = [x for sphere in ball.spheres for x in sphere]
        rng = random.Random(seed)
        for t in range(trials):
            xi = {x: rng.random() for x in pts}
            tests.append((f"random_{t}", xi))
    best, label = 0.0, ""
    for name, xi in tests:
        den = _lq(xi, q)
        val = _lq(_apply(f, xi, space), q) / den
        if val > best:
            best, label = val, name
    return OpNormBound(best, label, len(tests))


# --- spectral profile ----------------------------------------------------------------------

@dataclass
class SpectralProfile:
    rows: list
    c_estimate: float
    monotone: bool
    renyi_rates: dict
    shannon_fit: object
    window: tuple | None
    n_max: int
    clamped: list = field(default_factory=list)

    def row(self, q):
        for r in self.rows:
            if abs(r["q"] - float(q)) < 1e-12:
                return r
        raise KeyError(q)

    def as_dict(self):
        return {"rows": self.rows, "c_estimate": self.c_estimate, "monotone": self.monotone,
                "renyi_rates": {str(k): v for k, v in self.renyi_rates.items()},
                "shannon_rate": self.shannon_fit.as_dict() if self.shannon_fit else None,
                "window": list(self.window) if self.window else None, "n_max": self.n_max,
                "clamped": self.clamped}


def spectral_profile(space: CosetSpace, mu: Measure, q_list, n_max: int, exact=False,
                     window=None, fit_model=LOG_CORRECTED) -> SpectralProfile:
    """Fit log ||nu_n||_q against n for every q; r_q = exp(slope)."""
    qs = [float(q) for q in q_list]
    if not qs:
        raise InsufficientData("empty q list")
    for q in qs:
        if not 1 < q <= 2:
            raise ValueError("q must lie in (1, 2]")
    if n_max < 4:
        raise InsufficientData("need at least 4 steps")
    logs = {q: [] for q in qs}
    hs = []
    for nu in walk(mu, space, n_max, exact=exact):
        if nu.n == 0:
            continue
        for q in qs:
            logs[q].append((nu.n, log_qnorm(nu, q)))
        hs.append((nu.n, shannon(nu)))
    rows, clamped = [], []
    for q in sorted(qs, reverse=True):
        fit = rate_fit(logs[q], fit_model, window)
        slope = fit.rate
        if slope > 0:
            clamped.append(q)
            slope = 0.0
        p = float(conjugate_exponent(Fraction(q).limit_denominator(1000)))
        rq = math.exp(slope)
        rows.append({"q": q, "p": p, "r_q": rq, "stderr": rq * fit.stderr,
                     "slope": slope, "slope_stderr": fit.stderr,
                     "minus_p_log_rq": -p * slope, "window": list(fit.window)})
    monotone = True
    for a, b in zip(rows, rows[1:]):
        slack = a["p"] * a["slope_stderr"] + b["p"] * b["slope_stderr"]
        if b["minus_p_log_rq"] + slack < a["minus_p_log_rq"]:
            monotone = False
    renyi_rates = {q: q / (1 - q) * r["slope"] for q, r in ((r["q"], r) for r in rows)}
    hfit = rate_fit(hs, fit_model, window)
    return SpectralProfile(rows, rows[-1]["minus_p_log_rq"], monotone, renyi_rates, hfit,
                           tuple(window) if window else None, n_max, clamped)


def write_profile_csv(profile: SpectralProfile, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["q", "p", "r_q", "stderr", "minus_p_log_rq"])
        for r in profile.rows:
            w.writerow([repr(r["q"]), repr(r["p"]), repr(r["r_q"]), repr(r["stderr"]),
                        repr(r["minus_p_log_rq"])])


# --- witnesses -----------------------------------------------------------------------------

@dataclass(frozen=True)
class Polynomial:
    """||f||_h <= C_h ||f (1+l)^{s1}||_{(2,1)}."""
    C_h: float
    s1: float

    def weight(self, ell):
        return (1.0 + ell) ** self.s1


@dataclass(frozen=True)
class PolynomialBall:
    """||lambda(f)|| <= C^theta (R+1)^{D theta} ||f||_{(q,1)} for supp f in B(R)."""
    C: float
    D: float


@dataclass
class WeightTable:
    """||f||_h <= C_h ||f w||_{(2,1)} with w given per element and a radial
    majorant W (W[t] bounds w on B(t))."""
    weights: dict
    majorant: list
    C_h: float = 1.0

    def __post_init__(self):
        if any(w < 1 for w in self.weights.values()):
            raise ValueError("weights must be >= 1")
        if any(b < a for a, b in zip(self.majorant, self.majorant[1:])):
            raise ValueError("radial majorant must be non-decreasing")

    def weight_of(self, g, ell):
        w = self.weights.get(g)
        if w is not None:
            return w
        if ell < len(self.majorant):
            return self.majorant[ell]
        raise KeyError("element outside the weight table and its majorant")


@dataclass
class RDWitness:
    kind: object

    @property
    def label(self):
        return type(self.kind).__name__


def theta_for(q):
    """1/q = 1 - theta/2."""
    return 2.0 * (1.0 - 1.0 / float(q))


def _weighted(f: FinFunc, witness, theta, cap=64):
    model = f.model
    out = {}
    for g, v in f.values.items():
        ell = word_length(model, g, cap)
        if ell is None:
            raise BudgetExceeded(cap, cap, "radius (support element length)")
        if isinstance(witness, Polynomial):
            w = (1.0 + ell) ** (witness.s1 * theta)
        else:
            w = witness.weight_of(g, ell) ** theta
        out[g] = abs(v) * w
    return FinFunc(model, out)


def witness_rhs(witness: RDWitness, f: FinFunc, space: CosetSpace, q, radius=None):
    """Right-hand side of the witness inequality at exponent q (q = 2 is the
    Herz form)."""
    kind = witness.kind
    theta = theta_for(q)
    if isinstance(kind, PolynomialBall):
        R = f.radius() if radius is None else radius
        return kind.C ** theta * (R + 1) ** (kind.D * theta) * lorentz_norm(f, space, q)
    return kind.C_h ** theta * lorentz_norm(_weighted(f, kind, theta), space, q)


@dataclass
class WitnessRow:
    radius: int
    q: float
    lhs_lower: float
    rhs: float
    violated: bool
    bound: str

    def as_dict(self):
        return {"radius": self.radius, "q": self.q, "lhs_lower": self.lhs_lower,
                "rhs": self.rhs, "violated": self.violated, "bound": self.bound}


@dataclass
class WitnessReport:
    witness: str
    rows: list

    @property
    def violations(self):
        return sum(r.violated for r in self.rows)

    @property
    def verdict(self):
        bad = [r.radius for r in self.rows if r.violated]
        if bad:
            return f"refuted at scale R={min(bad)}"
        return "consistent"

    def as_dict(self):
        return {"witness": self.witness, "verdict": self.verdict,
                "violations": self.violations, "rows": [r.as_dict() for r in self.rows]}


VIOLATION_SLACK = 1e-9


def rd_witness_test(space: CosetSpace, witness: RDWitness, family, q_list=(2,),
                    opnorm=True, opnorm_radius=1, opnorm_trials=2, seed=0) -> WitnessReport:
    """Falsification-only comparison of lower bounds against a witness.

    ``family`` yields (f, phi or None, support radius).  Herz bounds are used
    at q = 2 whenever phi is given; operator-norm lower bounds at each q.
    """
    rows = []
    for idx, (f, phi, radius) in enumerate(family):
        for q in q_list:
            q = float(q)
            rhs = witness_rhs(witness, f, space, q, radius)
            if phi is not None and q == 2.0:
                lhs = herz_lower(f, phi, space).value
                rows.append(WitnessRow(radius, q, lhs, rhs,
                                       lhs > rhs * (1 + VIOLATION_SLACK), "herz_lower"))
            if opnorm:
                lhs = opnorm_lower(f, space, q, opnorm_radius, opnorm_trials, seed + idx).value
                rows.append(WitnessRow(radius, q, lhs, rhs,
                                       lhs > rhs * (1 + VIOLATION_SLACK), "opnorm_lower"))
    return WitnessReport(witness.label, rows)


# --- test-function families -------------------------------------------------------------------

def free_factor_ball(model: FreeGroup, r: int, R: int):
    """H_R: elements of <x_1..x_r> of length <= R, in sphere order."""
    sub = FreeGroup(r)
    spheres = [[b""]]
    for _ in range(R):
        nxt = []
        for w in spheres[-1]:
            first_inv = (256 - w[0]) & 0xFF if w else None
            for s in sub.gens:
                if s[0] != first_inv:
                    nxt.append(s + w)
        spheres.append(nxt)
    return [w for s in spheres for w in s]


def n_r(r: int, R: int) -> int:
    """|H_R| for a free group of rank r: 1 + 2r sum_{j<R} (2r-1)^j."""
    return 1 + 2 * r * sum((2 * r - 1) ** j for j in range(R))


def free_factor_pair(model: FreeGroup, r: int, k, R: int):
    """f_R = 1_{H_R k} and phi_R = 1_{k^-1 H_R^-1} for H = <x_1..x_r>."""
    if isinstance(k, str):
        k = model.parse(k)
    hr = free_factor_ball(model, r, R)
    mul, inv = model.mul, model.inv
    kinv = inv(k)
    f = FinFunc.indicator(model, [mul(h, k) for h in hr])
    phi = FinFunc.indicator(model, [mul(kinv, inv(h)) for h in hr])
    return f, phi


def free_factor_family(model: FreeGroup, r: int, k, radii):
    for R in radii:
        f, phi = free_factor_pair(model, r, k, R)
        yield f, phi, R + len(k if isinstance(k, bytes) else model.parse(k))


def random_family(model: GroupModel, radius: int, count: int, seed=0, density=0.3,
                  with_phi=True):
    """Seeded random nonnegative f (and phi) supported in B(radius)."""
    from .groups import ball_enumerate
    pts = ball_enumerate(model, radius).elements()
    rng = random.Random(seed)
    for _ in range(count):
        f = {g: rng.randint(1, 9) for g in pts if rng.random() < density} or {pts[0]: 1}
        phi = None
        if with_phi:
            phi = {g: rng.randint(1, 9) for g in pts if rng.random() < density} or {pts[0]: 1}
            phi = FinFunc(model, phi)
        yield FinFunc(model, f), phi, radius
