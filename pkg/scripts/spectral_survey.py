"""Spectral profiles of simple random walks on a few coset spaces.

Usage: python scripts/spectral_survey.py [--n-max 13] [--out out/spectral]
"""
import argparse
import math
from pathlib import Path

from cosetwalk import cosets, norms
from cosetwalk.cosets import CosetSpace
from cosetwalk.groups import FreeGroup, heisenberg
from cosetwalk.walks import Measure

F2 = FreeGroup(2)
H3 = heisenberg()
PAIRS = {
    "F2": lambda: cosets.trivial(F2),
    "F2_mod_a": lambda: cosets.cyclic_powers(F2, "a"),
    "F2_mod_a_bAB": lambda: cosets.free_subgroup(F2, ["a", "bab^-1"]),
    "H3_mod_u": lambda: cosets.cyclic_powers(H3, H3.gens[0]),
}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n-max", type=int, default=13)
    ap.add_argument("--out", default="out/spectral")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    window = (max(4, args.n_max - 5), args.n_max)
    for name, make in PAIRS.items():
        orc = make()
        prof = norms.spectral_profile(CosetSpace(orc), Measure.srw(orc.model),
                                      [2, 1.5, 4 / 3, 8 / 7], args.n_max, window=window)
        norms.write_profile_csv(prof, out / f"{name}.csv")
        rows = "  ".join(f"q={r['q']:.3g}: r={r['r_q']:.4f}" for r in prof.rows)
        print(f"{name:14s} h~{prof.shannon_fit.rate:.4f} c~{prof.c_estimate:.4f} "
              f"monotone={prof.monotone}  {rows}")
    print(f"reference: sqrt(3)/2 = {math.sqrt(3) / 2:.4f}, log(3)/2 = {math.log(3) / 2:.4f}")


if __name__ == "__main__":
    main()
