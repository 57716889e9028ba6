"""Command-line front end.  Exit codes: 0 ok, 1 bad config, 2 check failed, 3 budget."""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import replace
from fractions import Fraction
from pathlib import Path

from . import growth as gr
from . import norms, walks
from .config import (ExperimentConfig, build_group, build_measure, build_subgroup,
                     load_config, parse_element)
from .cosets import CosetSpace, schreier_ball, write_edges_csv
from .errors import BudgetExceeded, ConfigError, CosetWalkError, EmptyAlphabet, MixedModel
from .stallings import classify_pair_free, fold
from .verifiers import REGISTRY, verify_named_example

log = logging.getLogger("cosetwalk")

EXIT_OK, EXIT_CONFIG, EXIT_CHECK, EXIT_BUDGET = 0, 1, 2, 3


class CheckFailed(CosetWalkError):
    pass


def _dump(obj, path: Path):
    path.write_text(walks.dumps(obj) + "\n", encoding="utf-8")


def _stamp(report: dict, cfg: ExperimentConfig):
    report["config_digest"] = cfg.digest()
    report["mode"] = "exact" if cfg.exact else "float"
    return report


def _fraction_list(values):
    return [Fraction(str(v)) for v in values]


# --- commands ---------------------------------------------------------------------------

def cmd_walk(cfg: ExperimentConfig, out: Path):
    p = cfg.params
    model = build_group(cfg.group)
    space = CosetSpace(build_subgroup(model, cfg.subgroup))
    mu = build_measure(model, cfg.measure)
    n_max = int(p.get("n_max", 12))
    alphas = [float(a) for a in p.get("alphas", [2])]
    qs = _fraction_list(p.get("q_list", [2]))
    h_mu = mu.entropy()
    profiles, checks = [], []
    for nu in walks.walk(mu, space, n_max, exact=cfg.exact, budget=cfg.budget_elems):
        if nu.n == 0:
            continue
        prof = walks.entropy_profile(nu, alphas, [float(q) for q in qs])
        profiles.append(prof)
        for q in qs:
            checks.append({"n": nu.n, "q": str(q),
                           "H_ge_Hq": walks.entropy_dominates(nu, q),
                           "norm_lower_bound": walks.norm_lower_bound_holds(nu, q, h_mu)})
    walks.write_walk_csv(profiles, out / "walk.csv", alphas, [float(q) for q in qs])
    series = [(pr["n"], pr["H"]) for pr in profiles]
    fits = {}
    if len(series) >= 4:
        window = tuple(p["window"]) if "window" in p else None
        fits["H_linear"] = walks.rate_fit(series, walks.LINEAR, window)
        fits["H_log_corrected"] = walks.rate_fit(series, walks.LOG_CORRECTED, window)
    ok = all(c["H_ge_Hq"] and c["norm_lower_bound"] for c in checks)
    summary = walks.walk_summary(profiles, fits, cfg.exact, {
        "checks": checks, "checks_passed": ok, "H_mu": h_mu,
        "rules": ["entropy >= renyi entropy", "||nu_n||_q^(1/n) >= exp((1-q)/q H(mu))"]})
    _dump(_stamp(summary, cfg), out / "walk.json")
    if not ok:
        raise CheckFailed("walk inequality check failed")


def cmd_spectral(cfg: ExperimentConfig, out: Path):
    p = cfg.params
    model = build_group(cfg.group)
    space = CosetSpace(build_subgroup(model, cfg.subgroup))
    mu = build_measure(model, cfg.measure)
    q_list = [float(Fraction(str(q))) for q in p.get("q_list", ["2", "3/2", "4/3", "8/7"])]
    window = tuple(p["window"]) if "window" in p else None
    prof = norms.spectral_profile(space, mu, q_list, int(p.get("n_max", 12)),
                                  exact=cfg.exact, window=window)
    norms.write_profile_csv(prof, out / "profile.csv")
    report = prof.as_dict()
    report["rules"] = ["p -> -p log r_{p/(p-1)} non-decreasing", "h_alpha = alpha/(1-alpha) log r_alpha"]
    _dump(_stamp(report, cfg), out / "spectral.json")
    if not prof.monotone:
        raise CheckFailed("monotonicity of -p log r_q violated beyond stderr")


def cmd_growth(cfg: ExperimentConfig, out: Path):
    p = cfg.params
    model = build_group(cfg.group)
    oracle = build_subgroup(model, cfg.subgroup)
    R = int(p.get("radius", 8))
    window = tuple(p["window"]) if "window" in p else None
    budget = cfg.budget_elems
    sb = schreier_ball(model, oracle, R, budget, edges=bool(p.get("edges", False)))
    series = [sb.growth_series("schreier")]
    if p.get("edges"):
        write_edges_csv(sb, out / "schreier_edges.csv")
    if p.get("group_growth", True):
        series.append(gr.group_growth(model, R, budget))
    sub = gr.subgroup_growth(model, oracle, R, budget) if p.get("subgroup_growth", True) else None
    if sub is not None:
        series.append(sub)
    inters = []
    for x in p.get("intersections", []):
        s = gr.conj_intersection_growth(model, oracle, parse_element(model, x), R, budget)
        series.append(replace(s, source=f"intersection:{x}"))
        inters.append((x, s))
    gr.write_growth_csv(series, out / "growth.csv")

    def fit(s):
        try:
            return gr.growth_fit(s, window)
        except CosetWalkError:
            return None
    classes = {s.source: fit(s) for s in series}
    report = {"radius": R, "series": {s.source: s.counts for s in series},
              "classes": {k: (v.as_dict() if v else None) for k, v in classes.items()}}
    sch = classes.get("schreier")
    sub_cls = classes.get("subgroup")
    inter_cls = [(x, classes[f"intersection:{x}"]) for x, _ in inters
                 if classes.get(f"intersection:{x}") is not None]
    if sch or sub_cls or inter_cls:
        verdict = gr.slc_verdict(sch, sub_cls, inter_cls, bool(p.get("co_amenable", False)),
                                 str(p.get("co_amenable_provenance", "")))
        report["verdict"] = verdict.as_dict()
    _dump(_stamp(report, cfg), out / "growth.json")


def cmd_classify_free(cfg: ExperimentConfig, out: Path):
    rank = int(cfg.group.get("rank", 2))
    gens = cfg.params.get("generators") or cfg.subgroup.get("generators")
    if not gens:
        raise ConfigError("classify-free needs generator words", field="params.generators")
    try:
        result = classify_pair_free(rank, gens)
    except (ValueError, MixedModel, EmptyAlphabet) as exc:
        raise ConfigError(str(exc), field="params.generators") from None
    result["rules"] = ["finite index", "rank <= 1", "rank >= 2 and infinite index"]
    (out / "stallings.dot").write_text(fold(rank, gens).to_dot(), encoding="utf-8")
    _dump(_stamp(result, cfg), out / "classify.json")
    print(result["verdict"])


def _witness(spec: dict):
    kind = spec.get("kind", "polynomial")
    if kind == "polynomial":
        return norms.RDWitness(norms.Polynomial(float(spec["C_h"]), float(spec.get("s1", 0))))
    if kind == "polynomial_ball":
        return norms.RDWitness(norms.PolynomialBall(float(spec["C"]), float(spec["D"])))
    if kind == "weight_table":
        return norms.RDWitness(norms.WeightTable({}, [float(x) for x in spec["majorant"]],
                                                 float(spec.get("C_h", 1))))
    raise ConfigError(f"unknown witness kind {kind!r}", field="params.witness.kind")


def cmd_norms(cfg: ExperimentConfig, out: Path):
    p = cfg.params
    model = build_group(cfg.group)
    space = CosetSpace(build_subgroup(model, cfg.subgroup))
    fam = p.get("family", {"kind": "random", "radius": 2, "count": 10})
    if fam.get("kind") == "free_factor":
        family = norms.free_factor_family(model, int(fam.get("r", 2)), fam.get("k", "c"),
                                          fam.get("radii", [1, 2, 3]))
    elif fam.get("kind") == "random":
        family = norms.random_family(model, int(fam.get("radius", 2)), int(fam.get("count", 10)),
                                     cfg.seed)
    else:
        raise ConfigError("family kind must be free_factor or random", field="params.family")
    witness = _witness(p.get("witness", {"kind": "polynomial", "C_h": 1, "s1": 0}))
    rep = norms.rd_witness_test(space, witness, family, p.get("q_list", [2]),
                                opnorm=bool(p.get("opnorm", False)), seed=cfg.seed)
    report = rep.as_dict()
    report["sides"] = {"lhs_lower": "lower bound", "rhs": "witness upper bound"}
    _dump(_stamp(report, cfg), out / "norms.json")


def cmd_verify(cfg: ExperimentConfig, out: Path, timing=True):
    rep = verify_named_example(cfg.example, **cfg.params)
    report = rep.as_dict(timing=timing)
    _dump(_stamp(report, cfg), out / f"verify-{cfg.example}.json")
    print(walks.dumps(report))
    if not rep.passed:
        raise CheckFailed(f"{cfg.example} failed")


def cmd_report(cfg: ExperimentConfig, out: Path):
    merged = {"csv": {}, "json": {}}
    for path in sorted(out.glob("*.csv")):
        with open(path, newline="", encoding="utf-8") as fh:
            merged["csv"][path.name] = list(csv.DictReader(fh))
    for path in sorted(out.glob("*.json")):
        if path.name == "report.json":
            continue
        merged["json"][path.name] = json.loads(path.read_text(encoding="utf-8"))
    _dump(_stamp(merged, cfg), out / "report.json")


COMMAND_FUNCS = {"walk": cmd_walk, "spectral": cmd_spectral, "growth": cmd_growth,
                 "classify-free": cmd_classify_free, "norms": cmd_norms,
                 "verify": cmd_verify, "report": cmd_report}


# --- entry point ------------------------------------------------------------------------------

def build_parser():
    ap = argparse.ArgumentParser(prog="cosetwalk", description=__doc__)
    ap.add_argument("command", choices=sorted(COMMAND_FUNCS))
    ap.add_argument("target", nargs="?", help="example id for verify")
    ap.add_argument("--config", help="JSON experiment config")
    ap.add_argument("--out", default="out", help="output directory")
    ap.add_argument("--threads", type=int, help="worker cap (computations are sequential)")
    ap.add_argument("--seed", type=int)
    mode = ap.add_mutually_exclusive_group()
    mode.add_argument("--exact", dest="exact", action="store_true", default=None)
    mode.add_argument("--float", dest="exact", action="store_false")
    ap.add_argument("--budget-elems", type=int)
    ap.add_argument("--rank", type=int, help="classify-free: free rank")
    ap.add_argument("--gens", nargs="*", help="classify-free: generator words")
    ap.add_argument("--no-timing", action="store_true", help="omit elapsed_ms from verify")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def _resolve_config(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig(command=args.command)
    cfg.command = args.command
    if args.seed is not None:
        cfg.seed = args.seed
    if args.exact is not None:
        cfg.exact = args.exact
    if args.budget_elems is not None:
        cfg.budget_elems = args.budget_elems
    if args.threads is not None:
        if args.threads < 1:
            raise ConfigError("must be >= 1", field="threads")
        cfg.threads = args.threads
    if args.command == "verify":
        cfg.example = args.target or cfg.example
        if cfg.example not in REGISTRY:
            raise ConfigError(f"unknown example {cfg.example!r}", field="example")
    if args.command == "classify-free":
        if args.rank is not None:
            cfg.group = {"kind": "free", "rank": args.rank}
        if args.gens:
            cfg.params = dict(cfg.params, generators=list(args.gens))
    elif args.command not in ("verify", "report") and not args.config:
        raise ConfigError(f"{args.command} needs --config")
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = _resolve_config(args)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        if args.command == "verify":
            cmd_verify(cfg, out, timing=not args.no_timing)
        else:
            COMMAND_FUNCS[args.command](cfg, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except CheckFailed as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return EXIT_CHECK
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
