"""Smallest radius at which the free-factor family refutes each polynomial
witness (C, D) on F3/<a,b>.  The Herz lower bound is N_R and the witness
side is C (R+2)^D sqrt(N_R); both are closed forms here, and the script
confirms them by direct computation up to --check-radius."""
import argparse
import math

from cosetwalk import cosets, norms
from cosetwalk.cosets import CosetSpace
from cosetwalk.groups import FreeGroup


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--check-radius", type=int, default=6)
    ap.add_argument("--max-radius", type=int, default=200)
    args = ap.parse_args()
    f3 = FreeGroup(3)
    space = CosetSpace(cosets.free_subgroup(f3, ["a", "b"]))
    for R in range(1, args.check_radius + 1):
        f, phi = norms.free_factor_pair(f3, 2, "c", R)
        herz = norms.herz_lower(f, phi, space).value
        assert math.isclose(herz, norms.n_r(2, R))
        assert math.isclose(norms.lorentz_norm(f, space, 2), math.sqrt(norms.n_r(2, R)))
    print(f"closed forms confirmed through R={args.check_radius}")
    print("C \\ D " + "".join(f"{d:>6d}" for d in range(7)))
    for C in (1, 10, 100, 1000):
        cells = []
        for D in range(7):
            hit = next((R for R in range(1, args.max_radius + 1)
                        if math.sqrt(norms.n_r(2, R)) > C * (R + 2) ** D), None)
            cells.append(f"{hit:>6d}" if hit else "     -")
        print(f"{C:>6d}" + "".join(cells))


if __name__ == "__main__":
    main()
