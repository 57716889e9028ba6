"""Concrete finitely generated groups: exact arithmetic, word length, balls.

Elements are plain hashable values so they can key dictionaries directly:

* free group words are ``bytes`` of signed letters (``i`` for x_i, ``-i``
  stored as ``256 - i`` for its inverse), always freely reduced;
* free abelian elements are ``tuple`` of ints;
* matrix elements are row-major ``tuple`` of row tuples of Python ints.

Every model exposes a symmetric generating list ``gens`` with printable
``labels``.  Balls are grown by left multiplication ``g -> s g``, which gives
the same word length as right multiplication for a symmetric generating set.
"""
from __future__ import annotations

import hashlib
import json
import os
import re
import struct
from dataclasses import dataclass, field
from pathlib import Path

from . import intmat
from .errors import BudgetExceeded, MixedModel, NonUnimodular

DEFAULT_BUDGET = 20_000_000
LETTERS = "abcdefghijklmnopqrstuvwxyz"


def _zigzag(x):
    return (x << 1) if x >= 0 else ((-x << 1) - 1)


def _varint(x):
    out = bytearray()
    while True:
        b = x & 0x7F
        x >>= 7
        if x:
            out.append(b | 0x80)
        else:
            out.append(b)
            return bytes(out)


def encode_ints(values):
    return b"".join(_varint(_zigzag(v)) for v in values)


def decode_ints(data):
    values, cur, shift = [], 0, 0
    for b in data:
        cur |= (b & 0x7F) << shift
        if b & 0x80:
            shift += 7
        else:
            values.append((cur >> 1) if not cur & 1 else -((cur + 1) >> 1))
            cur, shift = 0, 0
    return values


class GroupModel:
    """Common surface of the three concrete families."""

    kind = "abstract"
    gens: list
    labels: list

    def identity(self):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    def check(self, g):
        """Raise MixedModel unless ``g`` is an element of this model."""
        raise NotImplementedError

    def encode(self, g) -> bytes:
        raise NotImplementedError

    def decode(self, data: bytes):
        raise NotImplementedError

    def parse(self, text: str):
        raise NotImplementedError

    def format(self, g) -> str:
        raise NotImplementedError

    def descriptor(self) -> dict:
        raise NotImplementedError

    def exact_length(self, g):
        """Closed-form word length, or None when only BFS can tell."""
        return None

    @property
    def model_hash(self) -> bytes:
        blob = json.dumps(self.descriptor(), sort_keys=True).encode()
        return hashlib.sha256(blob).digest()[:8]

    def word(self, indices):
        """Multiply generators ``gens[i]`` left to right."""
        g = self.identity()
        for i in indices:
            g = self.mul(g, self.gens[i])
        return g

    def power(self, g, k):
        if k < 0:
            g, k = self.inv(g), -k
        result = self.identity()
        while k:
            if k & 1:
                result = self.mul(result, g)
            g = self.mul(g, g)
            k >>= 1
        return result

    def __eq__(self, other):
        return isinstance(other, GroupModel) and self.descriptor() == other.descriptor()

    def __hash__(self):
        return hash(self.model_hash)

    def __repr__(self):
        return f"{type(self).__name__}({self.descriptor()})"


class FreeGroup(GroupModel):
    kind = "free"

    def __init__(self, rank: int):
        if rank < 1:
            raise ValueError("free group rank must be >= 1")
        if rank > len(LETTERS):
            raise ValueError("at most 26 free generators are supported")
        self.rank = rank
        self.gens = []
        self.labels = []
        for i in range(1, rank + 1):
            self.gens += [bytes([i]), bytes([256 - i])]
            self.labels += [LETTERS[i - 1], LETTERS[i - 1] + "^-1"]

    def identity(self):
        return b""

    @staticmethod
    def letter_inverse(c):
        return (256 - c) & 0xFF

    def mul(self, a, b):
        i = 0
        la, lb = len(a), len(b)
        while i < la and i < lb and a[la - 1 - i] + b[i] == 256:
            i += 1
        if i == 0:
            return a + b
        return a[:la - i] + b[i:]

    def inv(self, a):
        return bytes(256 - c for c in reversed(a))

    def check(self, g):
        if not isinstance(g, bytes):
            raise MixedModel(f"{g!r} is not a free group word")
        r = self.rank
        prev = None
        for c in g:
            if not (1 <= c <= r or 256 - r <= c <= 255):
                raise MixedModel(f"letter {c} outside F_{r}")
            if prev is not None and prev + c == 256:
                raise MixedModel("word is not freely reduced")
            prev = c

    def encode(self, g):
        return bytes(g)

    def decode(self, data):
        return bytes(data)

    def exact_length(self, g):
        return len(g)

    def letter(self, c):
        i = c if c < 128 else 256 - c
        return LETTERS[i - 1], (1 if c < 128 else -1)

    def parse(self, text):
        text = text.strip()
        if text in ("", "1"):
            return b""
        g = b""
        pos = 0
        pattern = re.compile(r"\s*([a-zA-Z])(\^\(?(-?\d+)\)?)?")
        while pos < len(text):
            m = pattern.match(text, pos)
            if not m:
                raise ValueError(f"cannot parse free group word {text!r} at {pos}")
            ch = m.group(1)
            exp = int(m.group(3)) if m.group(3) is not None else 1
            if ch.isupper():
                ch, exp = ch.lower(), -exp
            idx = LETTERS.index(ch) + 1
            if idx > self.rank:
                raise ValueError(f"generator {ch!r} not in F_{self.rank}")
            letter = bytes([idx]) if exp > 0 else bytes([256 - idx])
            for _ in range(abs(exp)):
                g = self.mul(g, letter)
            pos = m.end()
        return g

    def format(self, g):
        if not g:
            return "1"
        parts = []
        i = 0
        while i < len(g):
            j = i
            while j < len(g) and g[j] == g[i]:
                j += 1
            name, sign = self.letter(g[i])
            k = (j - i) * sign
            parts.append(name if k == 1 else f"{name}^{k}")
            i = j
        return "".join(parts)

    def descriptor(self):
        return {"kind": "free", "rank": self.rank}


class FreeAbelian(GroupModel):
    kind = "abelian"

    def __init__(self, dim: int):
        if dim < 1:
            raise ValueError("dimension must be >= 1")
        self.dim = dim
        self.gens = []
        self.labels = []
        for i in range(dim):
            for s in (1, -1):
                self.gens.append(tuple(s if j == i else 0 for j in range(dim)))
                self.labels.append(f"e{i + 1}" if s > 0 else f"e{i + 1}^-1")

    def identity(self):
        return (0,) * self.dim

    def mul(self, a, b):
        return tuple(x + y for x, y in zip(a, b))

    def inv(self, a):
        return tuple(-x for x in a)

    def check(self, g):
        if not isinstance(g, tuple) or len(g) != self.dim or not all(isinstance(x, int) for x in g):
            raise MixedModel(f"{g!r} is not an element of Z^{self.dim}")

    def encode(self, g):
        return encode_ints(g)

    def decode(self, data):
        return tuple(decode_ints(data))

    def exact_length(self, g):
        return sum(abs(x) for x in g)

    def parse(self, text):
        vals = json.loads(text.strip().replace("(", "[").replace(")", "]"))
        g = tuple(int(x) for x in vals)
        self.check(g)
        return g

    def format(self, g):
        return "[" + ",".join(map(str, g)) + "]"

    def descriptor(self):
        return {"kind": "abelian", "dim": self.dim}


class MatrixGroupZ(GroupModel):
    """Subgroup of SL_n(Z) generated by a finite list of matrices.

    The generating list is closed under inversion on construction: missing
    inverses are appended after the given generators, in order.
    """

    kind = "matrix"

    def __init__(self, n: int, generators, labels=None, name=None):
        if n < 2:
            raise ValueError("matrix size must be >= 2")
        self.n = n
        self.name = name
        gens = [intmat.as_matrix(g) for g in generators]
        labels = list(labels) if labels is not None else [f"s{i + 1}" for i in range(len(gens))]
        for g in gens:
            self._check_shape(g)
            d = intmat.det(g)
            if d != 1:
                raise NonUnimodular(f"generator has determinant {d}")
        closed, closed_labels = list(gens), list(labels)
        for g, lab in zip(gens, labels):
            gi = intmat.inverse(g)
            if gi not in closed:
                closed.append(gi)
                closed_labels.append(lab + "^-1")
        self.gens = closed
        self.labels = closed_labels
        self._id = intmat.identity(n)

    def _check_shape(self, g):
        if not isinstance(g, tuple) or len(g) != self.n or any(
                not isinstance(r, tuple) or len(r) != self.n for r in g):
            raise MixedModel(f"not an {self.n}x{self.n} matrix: {g!r}")

    def identity(self):
        return self._id

    def mul(self, a, b):
        return intmat.matmul(a, b)

    def inv(self, a):
        return intmat.inverse(a)

    def check(self, g):
        self._check_shape(g)
        d = intmat.det(g)
        if d != 1:
            raise NonUnimodular(f"matrix has determinant {d}")

    def encode(self, g):
        return encode_ints(x for row in g for x in row)

    def decode(self, data):
        vals = decode_ints(data)
        n = self.n
        return tuple(tuple(vals[i * n:(i + 1) * n]) for i in range(n))

    def parse(self, text):
        g = intmat.as_matrix(json.loads(text))
        self.check(g)
        return g

    def format(self, g):
        return json.dumps([list(r) for r in g], separators=(",", ":"))

    def descriptor(self):
        return {"kind": "matrix", "n": self.n,
                "generators": [[list(r) for r in g] for g in self.gens]}


# --- arithmetic front door -------------------------------------------------

def group_arith(model: GroupModel, op: str, *args):
    """Checked group law: ``op`` is ``"mul"``, ``"inv"`` or ``"id"``."""
    for a in args:
        model.check(a)
    if op == "mul":
        a, b = args
        return model.mul(a, b)
    if op == "inv":
        (a,) = args
        return model.inv(a)
    if op == "id":
        return model.identity()
    raise ValueError(f"unknown op {op!r}")


# --- named constructions -----------------------------------------------------

HYPERBOLIC_A = ((2, 1), (1, 1))


def sl_elementary(n: int) -> MatrixGroupZ:
    """SL_n(Z) with generators u_ij(+-1), i != j."""
    gens, labels = [], []
    for i in range(n):
        for j in range(n):
            if i != j:
                gens.append(intmat.elementary(n, i, j, 1))
                labels.append(f"u{i + 1}{j + 1}")
    return MatrixGroupZ(n, gens, labels, name=f"SL{n}(Z)")


def heisenberg() -> MatrixGroupZ:
    """UT_3(Z) = H_3(Z) with u = I+E12, v = I+E23."""
    u = intmat.elementary(3, 0, 1)
    v = intmat.elementary(3, 1, 2)
    return MatrixGroupZ(3, [u, v], ["u", "v"], name="H3(Z)")


def lower_u(a, b):
    """The matrix u(a, b) = [[1,0,0],[a,1,0],[b,0,1]]."""
    return ((1, 0, 0), (a, 1, 0), (b, 0, 1))


def t_matrix(a=HYPERBOLIC_A):
    (p, q), (r, s) = a
    return ((1, 0, 0), (0, p, q), (0, r, s))


def solvable_k0() -> MatrixGroupZ:
    """K_0 = <u(1,0), u(0,1), t> with t = diag(1, A), A = [[2,1],[1,1]]."""
    return MatrixGroupZ(3, [lower_u(1, 0), lower_u(0, 1), t_matrix()],
                        ["u10", "u01", "t"], name="Z2xA Z")


def conjugated_model(model: MatrixGroupZ, g, name=None) -> MatrixGroupZ:
    gi = intmat.inverse(g)
    gens = [intmat.matmul(intmat.matmul(g, s), gi) for s in model.gens]
    labels = list(model.labels)
    out = MatrixGroupZ(model.n, gens, labels, name=name)
    return out


def model_from_descriptor(desc: dict) -> GroupModel:
    kind = desc["kind"]
    if kind == "free":
        return FreeGroup(int(desc["rank"]))
    if kind == "abelian":
        return FreeAbelian(int(desc["dim"]))
    if kind == "matrix":
        return MatrixGroupZ(int(desc["n"]), desc["generators"], desc.get("labels"))
    raise ValueError(f"unknown group kind {kind!r}")


# --- balls ---------------------------------------------------------------------

@dataclass
class Ball:
    """B(R) split into spheres; each sphere sorted by canonical encoding."""

    model: GroupModel
    radius: int
    spheres: list
    _index: dict | None = field(default=None, repr=False)

    @property
    def sphere_sizes(self):
        return [len(s) for s in self.spheres]

    @property
    def ball_sizes(self):
        out, total = [], 0
        for s in self.spheres:
            total += len(s)
            out.append(total)
        return out

    def __len__(self):
        return sum(len(s) for s in self.spheres)

    def __iter__(self):
        for k, sphere in enumerate(self.spheres):
            for g in sphere:
                yield g, k

    def length(self, g):
        if self._index is None:
            self._index = {h: k for h, k in self}
        return self._index.get(g)

    def elements(self):
        return [g for g, _ in self]


def _free_spheres(model: FreeGroup, radius, budget):
    spheres = [[b""]]
    total = 1
    for k in range(1, radius + 1):
        nxt = []
        for w in spheres[-1]:
            first_inv = (256 - w[0]) & 0xFF if w else None
            for s in model.gens:
                if s[0] != first_inv:
                    nxt.append(s + w)
        total += len(nxt)
        if total > budget:
            raise BudgetExceeded(k, budget)
        spheres.append(nxt)
    return spheres


def _bfs_spheres(model: GroupModel, radius, budget):
    e = model.identity()
    seen = {e}
    spheres = [[e]]
    for k in range(1, radius + 1):
        nxt = []
        for g in spheres[-1]:
            for s in model.gens:
                h = model.mul(s, g)
                if h not in seen:
                    seen.add(h)
                    nxt.append(h)
        if len(seen) > budget:
            raise BudgetExceeded(k, budget)
        spheres.append(nxt)
    return spheres


_MEMO: dict = {}


def cache_dir_default():
    return Path(os.environ.get("COSETWALK_CACHE", ".cwl-cache"))


def ball_enumerate(model: GroupModel, radius: int, budget: int = DEFAULT_BUDGET,
                   cache_dir=None) -> Ball:
    """Every element of B(radius) once, with its exact word length.

    Results are memoized per (model hash, radius) in-process, and on disk when
    ``cache_dir`` is given.
    """
    if radius < 0:
        raise ValueError("radius must be >= 0")
    key = (model.model_hash, radius)
    if key in _MEMO:
        return _MEMO[key]
    for (h, r), ball in list(_MEMO.items()):
        if h == model.model_hash and r > radius:
            out = Ball(model, radius, ball.spheres[:radius + 1])
            return out
    path = None
    if cache_dir is not None:
        path = Path(cache_dir) / f"ball-{model.model_hash.hex()}-{radius}.bin"
        if path.exists():
            ball = read_ball_cache(model, path)
            if ball is not None:
                _MEMO[key] = ball
                return ball
    if isinstance(model, FreeGroup):
        spheres = _free_spheres(model, radius, budget)
    else:
        spheres = _bfs_spheres(model, radius, budget)
    enc = model.encode
    spheres = [sorted(s, key=enc) for s in spheres]
    ball = Ball(model, radius, spheres)
    # smaller radii are served by truncation of the largest ball
    for k in [k for k in _MEMO if k[0] == model.model_hash and k[1] < radius]:
        del _MEMO[k]
    _MEMO[key] = ball
    if path is not None:
        write_ball_cache(ball, path)
    return ball


def clear_ball_memo():
    _MEMO.clear()


_MAGIC = b"CWLBALL1"


def write_ball_cache(ball: Ball, path):
    """Header (magic, model hash, radius, sphere counts) then the
    length-prefixed encodings, sphere by sphere, each sphere sorted."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    with open(tmp, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(ball.model.model_hash)
        fh.write(struct.pack("<I", ball.radius))
        for n in ball.sphere_sizes:
            fh.write(struct.pack("<Q", n))
        for g, _ in ball:
            data = ball.model.encode(g)
            fh.write(struct.pack("<I", len(data)))
            fh.write(data)
    os.replace(tmp, path)


def read_ball_cache(model: GroupModel, path):
    """Load a cache file; None if it belongs to a different model."""
    with open(path, "rb") as fh:
        if fh.read(len(_MAGIC)) != _MAGIC:
            return None
        if fh.read(8) != model.model_hash:
            return None
        (radius,) = struct.unpack("<I", fh.read(4))
        sizes = [struct.unpack("<Q", fh.read(8))[0] for _ in range(radius + 1)]
        spheres = []
        for n in sizes:
            sphere = []
            for _ in range(n):
                (ln,) = struct.unpack("<I", fh.read(4))
                sphere.append(model.decode(fh.read(ln)))
            spheres.append(sphere)
    return Ball(model, radius, spheres)


def word_length(model: GroupModel, g, cap: int, budget: int = DEFAULT_BUDGET):
    """Exact word length if it is at most ``cap``, else None (unknown)."""
    if cap < 0:
        raise ValueError("cap must be >= 0")
    model.check(g)
    exact = model.exact_length(g)
    if exact is not None:
        return exact if exact <= cap else None
    big = max((b for (h, _), b in _MEMO.items() if h == model.model_hash),
              key=lambda b: b.radius, default=None)
    if big is not None:
        ell = big.length(g)
        if ell is not None:
            return ell if ell <= cap else None
        if big.radius >= cap:
            return None
    # grow the ball by doubling so short elements never pay for B(cap)
    r = 1 if big is None else big.radius + 1
    while True:
        r = min(r, cap)
        ell = ball_enumerate(model, r, budget).length(g)
        if ell is not None or r == cap:
            return ell
        r *= 2


def length_function(model: GroupModel, radius: int, budget: int = DEFAULT_BUDGET):
    """Fast unchecked length lookup valid on B(radius)."""
    probe = model.exact_length(model.identity())
    if probe is not None:
        return model.exact_length
    ball = ball_enumerate(model, radius, budget)

    def length(g):
        ell = ball.length(g)
        if ell is None:
            raise BudgetExceeded(radius, budget, "radius (element outside cached ball)")
        return ell
    return length
