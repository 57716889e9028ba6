"""Subgroup oracles, canonical coset keys and the left action on G/H.

Every oracle answers ``membership(g)`` exactly.  Most families also carry a
closed-form ``key(g)`` for the coset gH and a fast ``act(g, x)`` computing
key(g r) from x = key(r); ``Custom`` oracles without a key fall back to a
linear scan over stored representatives.
"""
from __future__ import annotations

import csv
import itertools
import math
import random
from dataclasses import dataclass, field
from typing import Callable

from . import intmat
from .errors import (BudgetExceeded, CosetWalkError, FallbackTooSlow,
                     MixedModel, UnknownKey, UnsupportedFamily)
from .groups import DEFAULT_BUDGET, FreeAbelian, FreeGroup, GroupModel, MatrixGroupZ
from .lattice import hnf, reduce_mod
from .stallings import fold

SCAN_LIMIT = 1_000_000
SPOT_CHECK_TRIPLES = 200


class OracleCheckFailed(CosetWalkError):
    pass


# --- homomorphisms for pullbacks ---------------------------------------------

class Homomorphism:
    """pi: F_r -> Q given by the images of the free generators."""

    def __init__(self, source: FreeGroup, target: GroupModel, images):
        if len(images) != source.rank:
            raise ValueError("need one image per free generator")
        self.source = source
        self.target = target
        self.images = [target.parse(x) if isinstance(x, str) else x for x in images]
        for im in self.images:
            target.check(im)
        self._letter = {}
        for i, im in enumerate(self.images, start=1):
            self._letter[i] = im
            self._letter[256 - i] = target.inv(im)

    def __call__(self, word: bytes):
        t = self.target
        out = t.identity()
        for c in word:
            out = t.mul(out, self._letter[c])
        return out

    def descriptor(self):
        return {"source": self.source.descriptor(), "target": self.target.descriptor(),
                "images": [self.target.format(x) for x in self.images]}


# --- key serialization ---------------------------------------------------------

def key_bytes(key) -> bytes:
    """Deterministic byte form of a native key (for export and hashing)."""
    def canon(k):
        if isinstance(k, (bytes, bytearray)):
            return "x" + bytes(k).hex()
        if isinstance(k, bool):
            return "T" if k else "F"
        if isinstance(k, int):
            return str(k)
        if isinstance(k, tuple):
            return "(" + ",".join(canon(v) for v in k) + ")"
        raise TypeError(f"unsupported key component {k!r}")
    return canon(key).encode()


def key_hex(key) -> str:
    return key_bytes(key).hex()


# --- the oracle ------------------------------------------------------------------

@dataclass(eq=False)
class SubgroupOracle:
    """A subgroup H of ``model`` given by an exact membership predicate.

    ``key_fn`` maps g to a canonical hashable value for gH; ``act_fn(g, x)``
    maps key(r) to key(g r) without materializing r.  Either may be None.
    """

    model: GroupModel
    family: str
    params: dict
    predicate: Callable | None
    key_fn: Callable | None = None
    act_fn: Callable | None = None
    generators: list | None = None
    congruence_level: int | None = None
    scan_limit: int = SCAN_LIMIT
    _reps: list = field(default_factory=list, repr=False)
    _rep_index: dict = field(default_factory=dict, repr=False)

    def membership(self, g) -> bool:
        if self.predicate is None:
            raise UnsupportedFamily(f"{self.family} oracle has no membership predicate")
        self.model.check(g)
        return bool(self.predicate(g))

    @property
    def has_key(self):
        return self.key_fn is not None

    def key(self, g):
        if self.key_fn is not None:
            return self.key_fn(g)
        return self._scan_key(g)

    def act(self, g, x):
        """key(g r) where key(r) = x; x must come from this oracle."""
        if self.act_fn is not None:
            return self.act_fn(g, x)
        if self.key_fn is None:
            if not isinstance(x, int) or not 0 <= x < len(self._reps):
                raise UnknownKey(f"{x!r} was never produced by this oracle")
            return self._scan_key(self.model.mul(g, self._reps[x]))
        raise UnknownKey("oracle has no action; use CosetSpace with stored representatives")

    def _scan_key(self, g):
        if self.predicate is None:
            raise UnsupportedFamily(f"{self.family} oracle has neither key nor predicate")
        hit = self._rep_index.get(g)
        if hit is not None:
            return hit
        model = self.model
        gi = model.inv(g)
        for i, r in enumerate(self._reps):
            # g^-1 r in H  <=>  gH = rH
            if self.predicate(model.mul(gi, r)):
                self._rep_index[g] = i
                return i
        if len(self._reps) >= self.scan_limit:
            raise FallbackTooSlow(f"representative table exceeds {self.scan_limit} entries")
        self._reps.append(g)
        self._rep_index[g] = len(self._reps) - 1
        return len(self._reps) - 1

    def descriptor(self):
        return {"family": self.family, "params": self.params, "model": self.model.descriptor()}


def membership(oracle: SubgroupOracle, g) -> bool:
    return oracle.membership(g)


def coset_key(oracle: SubgroupOracle, g):
    oracle.model.check(g)
    return oracle.key(g)


# --- random spot check ---------------------------------------------------------------

def _random_element(model, rng, max_len):
    k = rng.randint(0, max_len)
    return model.word([rng.randrange(len(model.gens)) for _ in range(k)])


def spot_check(oracle: SubgroupOracle, samples=SPOT_CHECK_TRIPLES, seed=0, max_len=6):
    """Closure and key-soundness checks on random triples; raises on failure."""
    if oracle.predicate is None:
        return
    model = oracle.model
    rng = random.Random(seed)
    pred = oracle.predicate
    if not pred(model.identity()):
        raise OracleCheckFailed("identity is not a member")
    members = [model.identity()]
    gens = oracle.generators or []
    for _ in range(samples):
        g = _random_element(model, rng, max_len)
        if gens:
            k = rng.randint(1, 4)
            h = model.identity()
            for _ in range(k):
                s = gens[rng.randrange(len(gens))]
                h = model.mul(h, s if rng.random() < 0.5 else model.inv(s))
            if not pred(h):
                raise OracleCheckFailed("a product of the listed generators is not a member")
            members.append(h)
        if pred(g):
            members.append(g)
            if not pred(model.inv(g)):
                raise OracleCheckFailed("membership is not closed under inversion")
        a = members[rng.randrange(len(members))]
        b = members[rng.randrange(len(members))]
        if not pred(model.mul(a, b)):
            raise OracleCheckFailed("membership is not closed under products")
        if oracle.key_fn is not None:
            h = members[rng.randrange(len(members))]
            if oracle.key_fn(g) != oracle.key_fn(model.mul(g, h)):
                raise OracleCheckFailed("key differs on g and g h with h in H")
            g2 = _random_element(model, rng, max_len)
            same = oracle.key_fn(g) == oracle.key_fn(g2)
            if same != pred(model.mul(model.inv(g), g2)):
                raise OracleCheckFailed("key equality disagrees with membership")


def _finish(oracle, check):
    if check:
        spot_check(oracle)
    return oracle


# --- families ------------------------------------------------------------------------

def trivial(model: GroupModel, check=True):
    e = model.identity()
    return _finish(SubgroupOracle(
        model, "Trivial", {}, lambda g: g == e,
        key_fn=lambda g: g, act_fn=lambda g, x: model.mul(g, x), generators=[]), check)


def whole_group(model: GroupModel, check=True):
    return _finish(SubgroupOracle(
        model, "WholeGroup", {}, lambda g: True,
        key_fn=lambda g: b"", act_fn=lambda g, x: x, generators=list(model.gens)), check)


def free_subgroup(model: FreeGroup, words, check=True):
    """Stallings-backed subgroup of a free group."""
    if not isinstance(model, FreeGroup):
        raise MixedModel("FreeGroupGens needs a free group model")
    words = [model.parse(w) if isinstance(w, str) else bytes(w) for w in words]
    graph = fold(model.rank, words)
    start = (0, b"")
    inv = model.inv

    def key(g):
        return graph.read(start, inv(g))

    def act(g, x):
        return graph.read(x, inv(g))

    oracle = SubgroupOracle(
        model, "FreeGroupGens", {"generators": [model.format(w) for w in words]},
        graph.accepts, key_fn=key, act_fn=act, generators=words)
    oracle.graph = graph
    return _finish(oracle, check)


def _cyclic_letter(model: FreeGroup, letter: int, check):
    inv_letter = 256 - letter

    def key(g):
        end = len(g)
        while end and g[end - 1] in (letter, inv_letter):
            end -= 1
        return g[:end]

    base = bytes([letter])
    oracle = SubgroupOracle(
        model, "CyclicPowers", {"base": model.format(base)},
        lambda g: all(c == g[0] for c in g) and (not g or g[0] in (letter, inv_letter)),
        key_fn=key, act_fn=lambda g, x: key(model.mul(g, x)), generators=[base])
    oracle.graph = fold(model.rank, [base])
    return _finish(oracle, check)


def _translation_reduce(g, m):
    """Canonical g + k m over k in Z: the entry at m's first nonzero position
    is brought into [0, |m_p|)."""
    p = next((i for i, x in enumerate(m) if x), None)
    if p is None:
        return tuple(g)
    mp = m[p]
    k = -(g[p] // mp) if mp > 0 else g[p] // (-mp)
    return tuple(x + k * y for x, y in zip(g, m))


def cyclic_powers(model: GroupModel, base, check=True):
    """H = <base>.  Free groups use Stallings graphs (single letters strip the
    trailing run); vectors reduce modulo Z base; matrices need (b - I)^2 = 0."""
    if isinstance(base, str):
        base = model.parse(base)
    model.check(base)
    if isinstance(model, FreeGroup):
        if len(base) == 1:
            return _cyclic_letter(model, base[0], check)
        oracle = free_subgroup(model, [base], check=False)
        oracle.family = "CyclicPowers"
        oracle.params = {"base": model.format(base)}
        return _finish(oracle, check)
    if isinstance(model, FreeAbelian):
        b = base

        def member(g):
            if not any(b):
                return not any(g)
            p = next(i for i, x in enumerate(b) if x)
            if g[p] % b[p]:
                return False
            k = g[p] // b[p]
            return all(x == k * y for x, y in zip(g, b))

        def key(g):
            return _translation_reduce(g, b)

        return _finish(SubgroupOracle(
            model, "CyclicPowers", {"base": model.format(base)}, member,
            key_fn=key, act_fn=lambda g, x: key(model.mul(g, x)), generators=[base]), check)
    if isinstance(model, MatrixGroupZ):
        n = model.n
        d = intmat.sub_identity(base)
        if not intmat.is_zero(intmat.matmul(d, d)):
            raise UnsupportedFamily("matrix CyclicPowers needs (b - I)^2 = 0")
        flat_d = [x for row in d for x in row]

        def member(g):
            gd = [x for row in intmat.sub_identity(g) for x in row]
            if not any(flat_d):
                return not any(gd)
            p = next(i for i, x in enumerate(flat_d) if x)
            if gd[p] % flat_d[p]:
                return False
            k = gd[p] // flat_d[p]
            return all(x == k * y for x, y in zip(gd, flat_d))

        def key(g):
            # g b^k = g + k g(b - I) since (b - I)^2 = 0
            m = [x for row in intmat.matmul(g, d) for x in row]
            flat = _translation_reduce([x for row in g for x in row], m)
            return tuple(tuple(flat[i * n:(i + 1) * n]) for i in range(n))

        return _finish(SubgroupOracle(
            model, "CyclicPowers", {"base": model.format(base)}, member,
            key_fn=key, act_fn=lambda g, x: key(model.mul(g, x)), generators=[base]), check)
    raise UnsupportedFamily(f"CyclicPowers not available for {model.kind}")


def _require_matrix(model):
    if not isinstance(model, MatrixGroupZ):
        raise MixedModel("matrix predicate oracles need a matrix group model")


def upper_unitriangular(model: MatrixGroupZ, check=True):
    """H = G cap UT_n(Z); keys are column-reduced representatives of gH."""
    _require_matrix(model)
    n = model.n

    def member(g):
        return all(g[i][i] == 1 for i in range(n)) and all(
            g[i][j] == 0 for i in range(n) for j in range(i))

    def key(g):
        cols = [tuple(g[i][j] for i in range(n)) for j in range(n)]
        out = [cols[0]]
        for j in range(1, n):
            basis = hnf(cols[:j], n)
            out.append(reduce_mod(cols[j], basis))
        return tuple(tuple(out[j][i] for j in range(n)) for i in range(n))

    return _finish(SubgroupOracle(
        model, "UT", {"n": n}, member, key_fn=key,
        act_fn=lambda g, x: key(intmat.matmul(g, x))), check)


def _sign_normalize(v):
    for x in v:
        if x:
            return tuple(v) if x > 0 else tuple(-y for y in v)
    return tuple(v)


def line_stabilizer(model: MatrixGroupZ, v, check=True):
    """H = {g : g v = +-v}; key(g) = +-g v with first nonzero entry positive."""
    _require_matrix(model)
    v = tuple(int(x) for x in v)
    if len(v) != model.n or not any(v):
        raise ValueError("line needs a nonzero vector of the right size")
    neg = tuple(-x for x in v)

    def member(g):
        w = intmat.matvec(g, v)
        return w == v or w == neg

    return _finish(SubgroupOracle(
        model, "LineStabilizer", {"v": list(v)}, member,
        key_fn=lambda g: _sign_normalize(intmat.matvec(g, v)),
        act_fn=lambda g, x: _sign_normalize(intmat.matvec(g, x))), check)


def _is_saturated(rows):
    k = len(rows)
    n = len(rows[0])
    g = 0
    for cols in itertools.combinations(range(n), k):
        g = math.gcd(g, intmat.det(tuple(tuple(r[c] for c in cols) for r in rows)))
        if g == 1:
            return True
    return g == 1


def subspace_stabilizer(model: MatrixGroupZ, w0, check=True):
    """H = Stab(W0) for a saturated sublattice W0; key(g) = HNF of g W0."""
    _require_matrix(model)
    rows = hnf([tuple(int(x) for x in r) for r in w0], model.n)
    if not rows or len(rows) >= model.n:
        raise ValueError("W0 must be a proper nonzero sublattice")
    if not _is_saturated(rows):
        raise ValueError("W0 must be saturated (gcd of maximal minors 1)")
    n = model.n

    def key(g):
        return hnf([intmat.matvec(g, r) for r in rows], n)

    def act(g, x):
        return hnf([intmat.matvec(g, r) for r in x], n)

    return _finish(SubgroupOracle(
        model, "SubspaceStabilizer", {"W0": [list(r) for r in rows]},
        lambda g: key(g) == rows, key_fn=key, act_fn=act), check)


def congruence(model: MatrixGroupZ, level: int, check=True):
    """H = G cap Gamma(N), the kernel of reduction mod N."""
    _require_matrix(model)
    if level < 1:
        raise ValueError("level must be >= 1")
    N = level
    n = model.n

    def key(g):
        return tuple(tuple(x % N for x in row) for row in g)

    ident = key(intmat.identity(n))
    oracle = SubgroupOracle(
        model, "CongruenceLevel", {"N": N}, lambda g: key(g) == ident,
        key_fn=key, act_fn=lambda g, x: key(intmat.matmul(g, x)), congruence_level=N)
    return _finish(oracle, check)


def pullback(model: FreeGroup, hom: Homomorphism, inner: SubgroupOracle, check=True):
    """H = pi^-1(L) for a surjection pi: F -> Q and L given by ``inner``."""
    if hom.source != model or hom.target != inner.model:
        raise MixedModel("homomorphism does not connect the two models")
    act_fn = None
    if inner.act_fn is not None:
        act_fn = lambda g, x: inner.act_fn(hom(g), x)  # noqa: E731
    key_fn = (lambda g: inner.key_fn(hom(g))) if inner.key_fn is not None else None
    oracle = SubgroupOracle(
        model, "Pullback", {"hom": hom.descriptor(), "inner": inner.descriptor()},
        lambda g: inner.predicate(hom(g)), key_fn=key_fn, act_fn=act_fn)
    oracle.hom = hom
    oracle.inner = inner
    return _finish(oracle, check)


def custom(model: GroupModel, predicate=None, key_fn=None, generators=None,
           name="Custom", scan_limit=SCAN_LIMIT, check=True):
    oracle = SubgroupOracle(model, "Custom", {"name": name}, predicate, key_fn=key_fn,
                            generators=generators, scan_limit=scan_limit)
    return _finish(oracle, check)


# --- coset space ---------------------------------------------------------------------

class CosetSpace:
    """X = G/H with base point o = eH; remembers every key it hands out."""

    def __init__(self, oracle: SubgroupOracle):
        self.oracle = oracle
        self.model = oracle.model
        self._seen = {}
        self.origin = self.key(self.model.identity())

    def key(self, g):
        k = self.oracle.key(g)
        self._seen.setdefault(k, g)
        return k

    def representative(self, x):
        try:
            return self._seen[x]
        except KeyError:
            raise UnknownKey(f"{x!r} was never produced by this coset space") from None

    def act(self, g, x):
        if x not in self._seen:
            raise UnknownKey(f"{x!r} was never produced by this coset space")
        orc = self.oracle
        if orc.act_fn is not None:
            y = orc.act_fn(g, x)
            if y not in self._seen:
                self._seen[y] = self.model.mul(g, self._seen[x])
            return y
        return self.key(self.model.mul(g, self._seen[x]))

    def generator_step(self, x):
        """[(label, s x)] for every generator s, in generator order."""
        return [(lab, self.act(s, x)) for s, lab in zip(self.model.gens, self.model.labels)]

    def __len__(self):
        return len(self._seen)


def coset_act(space: CosetSpace, g, x):
    space.model.check(g)
    return space.act(g, x)


@dataclass
class SchreierBall:
    radius: int
    spheres: list
    edges: list | None = None

    @property
    def sphere_sizes(self):
        return [len(s) for s in self.spheres]

    @property
    def ball_sizes(self):
        return list(itertools.accumulate(self.sphere_sizes))

    def growth_series(self, source="schreier"):
        from .growth import GrowthSeries
        return GrowthSeries(self.ball_sizes, source=source)


def schreier_ball(model: GroupModel, oracle: SubgroupOracle, radius: int,
                  budget: int = DEFAULT_BUDGET, edges=False, space=None) -> SchreierBall:
    """BFS in the Schreier graph from o = eH, expanding x -> s x."""
    if radius < 0:
        raise ValueError("radius must be >= 0")
    if oracle.model != model:
        raise MixedModel("oracle belongs to another model")
    space = space or CosetSpace(oracle)
    o = space.origin
    seen = {o}
    spheres = [[o]]
    edge_list = [] if edges else None
    for k in range(1, radius + 1):
        nxt = []
        for x in spheres[-1]:
            for s, lab in zip(model.gens, model.labels):
                y = space.act(s, x)
                if edge_list is not None:
                    edge_list.append((x, lab, y))
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        if len(seen) > budget:
            raise BudgetExceeded(k, budget, "cosets")
        spheres.append(nxt)
    return SchreierBall(radius, spheres, edge_list)


def write_edges_csv(ball: SchreierBall, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["src_key_hex", "gen_label", "dst_key_hex"])
        for x, lab, y in ball.edges or []:
            w.writerow([key_hex(x), lab, key_hex(y)])


def write_growth_csv(ball: SchreierBall, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["radius", "ball", "sphere"])
        for r, (b, s) in enumerate(zip(ball.ball_sizes, ball.sphere_sizes)):
            w.writerow([r, b, s])
