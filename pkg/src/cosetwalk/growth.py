"""Growth series, polynomial/exponential classification and SLC verdict rules."""
from __future__ import annotations

import csv
import hashlib
import json
import math
import random
from dataclasses import dataclass, field

import numpy as np

from .cosets import SubgroupOracle
from .errors import ConflictingEvidence, InsufficientData
from .groups import DEFAULT_BUDGET, GroupModel, ball_enumerate, word_length

R2_THRESHOLD = 0.99
SEPARATION = 2.0
BOUNDED_DEGREE = 0.1


@dataclass
class GrowthSeries:
    """Ball counts c_0, ..., c_R with a source tag."""

    counts: list
    source: str = "group"
    strict: bool = True

    def __post_init__(self):
        self.counts = [int(c) for c in self.counts]
        if self.strict:
            if not self.counts or self.counts[0] != 1:
                raise ValueError("growth series must start with c_0 = 1")
            if any(b < a for a, b in zip(self.counts, self.counts[1:])):
                raise ValueError("growth series must be non-decreasing")

    @property
    def radius(self):
        return len(self.counts) - 1

    def spheres(self):
        return [self.counts[0]] + [b - a for a, b in zip(self.counts, self.counts[1:])]


@dataclass
class _Fit:
    slope: float
    intercept: float
    r2: float
    rse: float
    stderr: float


def _ols(x, y):
    X = np.column_stack([x, np.ones_like(x)])
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ coef
    ss_res = float(resid @ resid)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else (1.0 if ss_res == 0 else 0.0)
    dof = max(len(x) - 2, 1)
    rse = math.sqrt(ss_res / dof)
    sxx = float(((x - x.mean()) ** 2).sum())
    stderr = rse / math.sqrt(sxx) if sxx > 0 else math.inf
    return _Fit(float(coef[0]), float(coef[1]), r2, rse, stderr)


POLYNOMIAL = "Polynomial"
EXPONENTIAL = "Exponential"
INCONCLUSIVE = "Inconclusive"


@dataclass
class GrowthClass:
    label: str
    degree: float | None
    rate: float | None
    r2: float
    window: tuple
    poly: dict = field(default_factory=dict)
    exp: dict = field(default_factory=dict)
    reason: str = ""

    @property
    def bounded(self):
        return self.label == POLYNOMIAL and self.degree is not None and self.degree <= BOUNDED_DEGREE

    def as_dict(self):
        return {"label": self.label, "degree": self.degree, "rate": self.rate, "r2": self.r2,
                "window": list(self.window), "poly": self.poly, "exp": self.exp,
                "reason": self.reason}


def growth_fit(series: GrowthSeries, window=None) -> GrowthClass:
    """Compare log c ~ d log R (polynomial) with log c ~ lambda R (exponential).

    The better R^2 wins.  Inconclusive when that R^2 is below 0.99 or when the
    loser's residual standard error is within a factor 2 of the winner's.
    Default window: the last half of radii >= 1, at least 5 of them.
    """
    counts = series.counts
    radii = list(range(1, len(counts)))
    if window is None:
        k = max(5, (len(radii) + 1) // 2)
        radii = radii[-k:]
    else:
        lo, hi = window
        radii = [r for r in radii if lo <= r <= hi]
    if len(radii) < 5:
        raise InsufficientData("growth fits need a window of at least 5 radii")
    win = (radii[0], radii[-1])
    R = np.array(radii, dtype=np.float64)
    y = np.log(np.array([counts[r] for r in radii], dtype=np.float64))
    if np.all(y == y[0]):
        return GrowthClass(POLYNOMIAL, 0.0, 0.0, 1.0, win, reason="constant on window")
    poly = _ols(np.log(R), y)
    expo = _ols(R, y)
    pd = {"degree": poly.slope, "r2": poly.r2, "rse": poly.rse, "stderr": poly.stderr}
    ed = {"rate": expo.slope, "r2": expo.r2, "rse": expo.rse, "stderr": expo.stderr}
    if poly.r2 >= expo.r2:
        label, win_fit, lose_fit = POLYNOMIAL, poly, expo
    else:
        label, win_fit, lose_fit = EXPONENTIAL, expo, poly
    if win_fit.r2 < R2_THRESHOLD:
        return GrowthClass(INCONCLUSIVE, poly.slope, expo.slope, win_fit.r2, win, pd, ed,
                           "best R^2 below threshold")
    if lose_fit.rse < SEPARATION * win_fit.rse:
        return GrowthClass(INCONCLUSIVE, poly.slope, expo.slope, win_fit.r2, win, pd, ed,
                           "fits not separated")
    if label == POLYNOMIAL:
        return GrowthClass(POLYNOMIAL, poly.slope, None, poly.r2, win, pd, ed)
    return GrowthClass(EXPONENTIAL, None, expo.slope, expo.r2, win, pd, ed)


# --- counts from balls ---------------------------------------------------------------------

def _cumulative(ball, pred):
    out, total = [], 0
    for sphere in ball.spheres:
        total += sum(1 for g in sphere if pred(g))
        out.append(total)
    return out


def group_growth(model: GroupModel, R: int, budget=DEFAULT_BUDGET) -> GrowthSeries:
    return GrowthSeries(ball_enumerate(model, R, budget).ball_sizes, "group")


def subgroup_growth(model: GroupModel, oracle: SubgroupOracle, R: int,
                    budget=DEFAULT_BUDGET) -> GrowthSeries:
    """|H cap B_G(r)| for r = 0..R."""
    ball = ball_enumerate(model, R, budget)
    return GrowthSeries(_cumulative(ball, oracle.membership), "subgroup")


def _in_conjugate(oracle, model, x):
    xi = model.inv(x)

    def member(g):
        return oracle.membership(g) and oracle.membership(model.mul(model.mul(xi, g), x))
    return member


def conj_intersection_growth(model: GroupModel, oracle: SubgroupOracle, x, R: int,
                             budget=DEFAULT_BUDGET) -> GrowthSeries:
    """|K_x cap B_G(r)| with K_x = H cap x H x^-1."""
    model.check(x)
    ball = ball_enumerate(model, R, budget)
    return GrowthSeries(_cumulative(ball, _in_conjugate(oracle, model, x)), "intersection")


@dataclass
class CoveringResult:
    ok: bool
    reps: int
    members: int
    failures: list


def covering_check(model: GroupModel, oracle: SubgroupOracle, x, R: int,
                   budget=DEFAULT_BUDGET) -> CoveringResult:
    """Build S_R, one representative per left K_x-coset meeting H cap B(R),
    and verify every h in H cap B(R) is s k with k in K_x, l(k) <= 2R."""
    model.check(x)
    in_k = _in_conjugate(oracle, model, x)
    ball = ball_enumerate(model, R, budget)
    members = [g for g, _ in ball if oracle.membership(g)]
    reps = []
    for h in members:
        if not any(in_k(model.mul(model.inv(s), h)) for s in reps):
            reps.append(h)
    failures = []
    for h in members:
        covered = False
        for s in reps:
            k = model.mul(model.inv(s), h)
            if in_k(k) and word_length(model, k, 2 * R, budget) is not None:
                covered = True
                break
        if not covered:
            failures.append(model.format(h))
    return CoveringResult(not failures, len(reps), len(members), failures)


@dataclass
class ProbeSample:
    x: str
    radius: int
    series: GrowthSeries
    growth: GrowthClass | None


def snormal_probe(model: GroupModel, oracle: SubgroupOracle, R: int, x_radii=(1, 2, 3),
                  samples=3, seed=0, budget=DEFAULT_BUDGET):
    """Intersection growth |K_x cap B(r)| for x sampled from spheres of
    increasing radius.  Reports only; never certifies s-normality."""
    rng = random.Random(seed)
    ball = ball_enumerate(model, max(x_radii), budget)
    out = []
    for r in x_radii:
        sphere = ball.spheres[r]
        picks = sorted(rng.sample(range(len(sphere)), min(samples, len(sphere))))
        for i in picks:
            x = sphere[i]
            series = conj_intersection_growth(model, oracle, x, R, budget)
            try:
                cls = growth_fit(series)
            except InsufficientData:
                cls = None
            out.append(ProbeSample(model.format(x), r, series, cls))
    return out


# --- verdicts --------------------------------------------------------------------------------

CONSISTENT = "ConsistentViaSubexpSchreier"
REFUTED_NON_SNORMAL = "RefutedNonSNormalSuperpoly"
REFUTED_COAMENABLE = "RefutedCoAmenableExpSchreier"
UNDETERMINED = "Undetermined"

RULE_SCHREIER = "R1-subexp-schreier-sufficient"
RULE_NON_SNORMAL = "R2-non-snormal-needs-poly-subgroup"
RULE_COAMENABLE = "R3-coamenable-exp-schreier"


@dataclass
class Verdict:
    verdict: str
    rules: list
    inputs_digest: str
    inputs: dict

    def as_dict(self):
        return {"verdict": self.verdict, "rules": self.rules,
                "inputs_digest": self.inputs_digest, "inputs": self.inputs}


def slc_verdict(schreier: GrowthClass | None = None, subgroup: GrowthClass | None = None,
                intersections=(), co_amenable=False, co_amenable_provenance="") -> Verdict:
    """Apply the sufficient and necessary growth rules; each firing rule is
    listed.  Rules firing in opposite directions raise ConflictingEvidence."""
    if schreier is None and subgroup is None and not intersections:
        raise InsufficientData("no growth evidence supplied")
    inputs = {
        "schreier": schreier.as_dict() if schreier else None,
        "subgroup": subgroup.as_dict() if subgroup else None,
        "intersections": [{"x": str(x), "growth": c.as_dict()} for x, c in intersections],
        "co_amenable": bool(co_amenable), "co_amenable_provenance": co_amenable_provenance,
    }
    digest = hashlib.sha256(json.dumps(inputs, sort_keys=True).encode()).hexdigest()[:16]
    positive, negative = [], []
    if schreier is not None and schreier.label == POLYNOMIAL:
        positive.append(RULE_SCHREIER)
    if subgroup is not None and subgroup.label == EXPONENTIAL:
        if any(c.bounded for _, c in intersections):
            negative.append((RULE_NON_SNORMAL, REFUTED_NON_SNORMAL))
    if co_amenable and schreier is not None and schreier.label == EXPONENTIAL:
        negative.append((RULE_COAMENABLE, REFUTED_COAMENABLE))
    if positive and negative:
        raise ConflictingEvidence(
            f"{positive[0]} and {negative[0][0]} fire in opposite directions")
    if positive:
        return Verdict(CONSISTENT, positive, digest, inputs)
    if negative:
        return Verdict(negative[0][1], [r for r, _ in negative], digest, inputs)
    return Verdict(UNDETERMINED, [], digest, inputs)


def write_growth_csv(series_list, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["radius", "count", "source"])
        for s in series_list:
            for r, c in enumerate(s.counts):
                w.writerow([r, c, s.source])
