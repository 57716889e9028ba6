"""Growth classes and verdicts for named (G, H) pairs."""
import argparse

from cosetwalk import cosets
from cosetwalk import growth as gr
from cosetwalk.groups import FreeGroup, heisenberg, sl_elementary

F2, F3 = FreeGroup(2), FreeGroup(3)
H3 = heisenberg()
SL3 = sl_elementary(3)


def pairs():
    yield "F2 / <a>", F2, cosets.cyclic_powers(F2, "a"), [F2.parse("b")]
    yield "F3 / <a,b>", F3, cosets.free_subgroup(F3, ["a", "b"]), [F3.parse("c")]
    yield "H3 / <u>", H3, cosets.cyclic_powers(H3, H3.gens[0]), [H3.gens[1]]
    yield "SL3 / line", SL3, cosets.line_stabilizer(SL3, (1, 0, 0)), []


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--radius", type=int, default=8)
    args = ap.parse_args()
    R = args.radius
    for name, model, orc, xs in pairs():
        r = R if model.kind != "matrix" or name.startswith("H3") else min(R, 6)
        sch = gr.growth_fit(cosets.schreier_ball(model, orc, r).growth_series())
        sub = gr.growth_fit(gr.subgroup_growth(model, orc, r))
        inter = [(model.format(x), gr.growth_fit(gr.conj_intersection_growth(model, orc, x, r)))
                 for x in xs]
        try:
            verdict = gr.slc_verdict(sch, sub, inter).verdict
        except gr.ConflictingEvidence as exc:
            verdict = f"conflict: {exc}"
        print(f"{name:12s} R={r:2d} schreier={sch.label:12s} subgroup={sub.label:12s} -> {verdict}")


if __name__ == "__main__":
    main()
