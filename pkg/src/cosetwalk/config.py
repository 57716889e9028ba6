"""JSON experiment configuration: schema, parsing with diagnostics, round trip.

Schema (all keys optional unless stated)::

    {
      "command": "walk" | "spectral" | "growth" | "classify-free" | "norms" | "verify" | "report",
      "group":    {"kind": "free", "rank": 2}
                | {"kind": "abelian", "dim": 2}
                | {"kind": "matrix", "n": 3, "generators": [[[...]]], "labels": [...]}
                | {"kind": "named", "name": "heisenberg" | "sl2" | "sl3" | "k0"},
      "subgroup": {"family": "trivial" | "whole" | "ut" | "free_gens" | "cyclic" | "line"
                   | "subspace" | "congruence" | "pullback", ...family fields},
      "measure":  "srw" | {"<element>": "<rational>", ...},
      "params":   {command specific},
      "seed": 0, "exact": true, "budget_elems": 20000000, "threads": 1,
      "example": "<verifier id>"
    }

Family fields: free_gens ``generators`` (words); cyclic ``base`` (element);
line ``v``; subspace ``W0``; congruence ``N``; pullback ``target`` (a group
spec), ``images`` (elements of the target) and ``inner`` (a subgroup spec on
the target).
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction

from . import cosets
from .errors import ConfigError
from .groups import (DEFAULT_BUDGET, FreeAbelian, FreeGroup, GroupModel, MatrixGroupZ,
                     heisenberg, sl_elementary, solvable_k0)
from .walks import Measure

COMMANDS = ("walk", "spectral", "growth", "classify-free", "norms", "verify", "report")
NAMED_GROUPS = {"heisenberg": heisenberg, "sl2": lambda: sl_elementary(2),
                "sl3": lambda: sl_elementary(3), "k0": solvable_k0}


@dataclass
class ExperimentConfig:
    command: str = "walk"
    group: dict = field(default_factory=lambda: {"kind": "free", "rank": 2})
    subgroup: dict = field(default_factory=lambda: {"family": "trivial"})
    measure: object = "srw"
    params: dict = field(default_factory=dict)
    seed: int = 0
    exact: bool = True
    budget_elems: int = DEFAULT_BUDGET
    threads: int = 1
    example: str | None = None

    def to_dict(self):
        return asdict(self)

    def emit(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, ensure_ascii=False) + "\n"

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


_FIELDS = {f for f in ExperimentConfig.__dataclass_fields__}


def parse_config(text: str) -> ExperimentConfig:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(exc.msg, line=exc.lineno) from None
    if not isinstance(raw, dict):
        raise ConfigError("top level must be an object")
    unknown = set(raw) - _FIELDS
    if unknown:
        raise ConfigError("unknown key", field=sorted(unknown)[0])
    cfg = ExperimentConfig(**raw)
    validate(cfg)
    return cfg


def load_config(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def validate(cfg: ExperimentConfig):
    if cfg.command not in COMMANDS:
        raise ConfigError(f"unknown command {cfg.command!r}", field="command")
    for name, typ in (("seed", int), ("budget_elems", int), ("threads", int)):
        if not isinstance(getattr(cfg, name), int) or isinstance(getattr(cfg, name), bool):
            raise ConfigError("must be an integer", field=name)
    if not isinstance(cfg.exact, bool):
        raise ConfigError("must be true or false", field="exact")
    if cfg.threads < 1:
        raise ConfigError("must be >= 1", field="threads")
    if not isinstance(cfg.params, dict):
        raise ConfigError("must be an object", field="params")
    if cfg.example is not None:
        from .verifiers import REGISTRY
        if cfg.example not in REGISTRY:
            raise ConfigError(f"unknown example {cfg.example!r}", field="example")
    build_group(cfg.group)


# --- builders -------------------------------------------------------------------------

def build_group(spec: dict) -> GroupModel:
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError("group needs a 'kind'", field="group")
    kind = spec["kind"]
    try:
        if kind == "free":
            return FreeGroup(int(spec["rank"]))
        if kind == "abelian":
            return FreeAbelian(int(spec["dim"]))
        if kind == "matrix":
            return MatrixGroupZ(int(spec["n"]), spec["generators"], spec.get("labels"))
        if kind == "named":
            return NAMED_GROUPS[spec["name"]]()
    except KeyError as exc:
        raise ConfigError(f"missing or unknown entry {exc}", field="group") from None
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc), field="group") from None
    raise ConfigError(f"unknown group kind {kind!r}", field="group.kind")


def parse_element(model: GroupModel, text):
    if not isinstance(text, str):
        text = json.dumps(text)
    try:
        return model.parse(text)
    except Exception as exc:  # noqa: BLE001 - surface any parse failure as config error
        raise ConfigError(f"cannot parse element {text!r}: {exc}", field="element") from None


def build_subgroup(model: GroupModel, spec: dict, check=True):
    if not isinstance(spec, dict) or "family" not in spec:
        raise ConfigError("subgroup needs a 'family'", field="subgroup")
    fam = spec["family"]
    try:
        if fam == "trivial":
            return cosets.trivial(model, check)
        if fam == "whole":
            return cosets.whole_group(model, check)
        if fam == "free_gens":
            return cosets.free_subgroup(model, spec["generators"], check)
        if fam == "cyclic":
            return cosets.cyclic_powers(model, parse_element(model, spec["base"]), check)
        if fam == "ut":
            return cosets.upper_unitriangular(model, check)
        if fam == "line":
            return cosets.line_stabilizer(model, spec["v"], check)
        if fam == "subspace":
            return cosets.subspace_stabilizer(model, spec["W0"], check)
        if fam == "congruence":
            return cosets.congruence(model, int(spec["N"]), check)
        if fam == "pullback":
            target = build_group(spec["target"])
            images = [parse_element(target, x) for x in spec["images"]]
            inner = build_subgroup(target, spec["inner"], check)
            return cosets.pullback(model, cosets.Homomorphism(model, target, images), inner, check)
    except KeyError as exc:
        raise ConfigError(f"missing entry {exc}", field=f"subgroup.{fam}") from None
    except ConfigError:
        raise
    except Exception as exc:  # noqa: BLE001
        raise ConfigError(str(exc), field=f"subgroup.{fam}") from None
    raise ConfigError(f"unknown family {fam!r}", field="subgroup.family")


def build_measure(model: GroupModel, spec) -> Measure:
    if spec == "srw":
        return Measure.srw(model)
    if not isinstance(spec, dict) or not spec:
        raise ConfigError("measure must be 'srw' or a non-empty object", field="measure")
    weights = {}
    for elem, w in spec.items():
        try:
            weights[parse_element(model, elem)] = Fraction(str(w))
        except (ValueError, ZeroDivisionError):
            raise ConfigError(f"bad weight {w!r}", field=f"measure.{elem}") from None
    try:
        return Measure.from_dict(model, weights, exact=True)
    except ValueError as exc:
        raise ConfigError(str(exc), field="measure") from None
