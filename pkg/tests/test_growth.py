import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cosetwalk import cosets
from cosetwalk import growth as gr
from cosetwalk.errors import ConflictingEvidence, InsufficientData
from cosetwalk.groups import FreeAbelian, FreeGroup, heisenberg, sl_elementary, solvable_k0
from cosetwalk.growth import GrowthClass, GrowthSeries, growth_fit

F2 = FreeGroup(2)
F3 = FreeGroup(3)
H3 = heisenberg()


def _series(counts):
    return GrowthSeries(counts, "test", strict=False)


@given(st.floats(0.5, 6.0))
def test_exact_power_law(d):
    cls = growth_fit(_series([max(1, round(n ** d * 1e6)) if n else 1 for n in range(31)]), (10, 30))
    assert cls.label == gr.POLYNOMIAL and cls.degree == pytest.approx(d, abs=1e-3)


@given(st.floats(0.2, 2.0))
def test_exact_exponential(lam):
    cls = growth_fit(_series([round(math.exp(lam * n) * 1e9) for n in range(21)]))
    assert cls.label == gr.EXPONENTIAL and cls.rate == pytest.approx(lam, rel=1e-6)


def test_constant_is_degree_zero():
    cls = growth_fit(GrowthSeries([1] * 12))
    assert cls.label == gr.POLYNOMIAL and cls.degree == 0 and cls.bounded


def test_inconclusive_when_fits_not_separated():
    # a staircase fits neither model well
    cls = growth_fit(_series([1, 2, 2, 2, 2, 50, 50, 50, 50, 2000, 2000]))
    assert cls.label == gr.INCONCLUSIVE


def test_short_window_rejected():
    with pytest.raises(InsufficientData):
        growth_fit(GrowthSeries([1, 2, 3, 4]))


def test_series_validation():
    with pytest.raises(ValueError):
        GrowthSeries([2, 3])
    with pytest.raises(ValueError):
        GrowthSeries([1, 3, 2])
    assert GrowthSeries([1, 3, 6]).spheres() == [1, 2, 3]


def test_calibration_groups():
    z2 = gr.group_growth(FreeAbelian(2), 20)
    assert growth_fit(z2).label == gr.POLYNOMIAL
    h = growth_fit(gr.group_growth(H3, 12))
    assert h.label == gr.POLYNOMIAL and 3.5 < h.degree < 4.5
    assert growth_fit(gr.group_growth(F2, 10)).label == gr.EXPONENTIAL
    k = growth_fit(gr.group_growth(solvable_k0(), 10))
    assert k.label == gr.EXPONENTIAL


def test_schreier_growth_classes():
    sb = cosets.schreier_ball(H3, cosets.cyclic_powers(H3, H3.gens[0]), 14)
    cls = growth_fit(sb.growth_series())
    assert cls.label == gr.POLYNOMIAL and 2.5 < cls.degree < 3.5
    sb = cosets.schreier_ball(F2, cosets.cyclic_powers(F2, "a"), 10)
    assert growth_fit(sb.growth_series()).label == gr.EXPONENTIAL


def test_intersections():
    h = cosets.free_subgroup(F3, ["a", "b"])
    for k in ("c", "C", "cac"):
        s = gr.conj_intersection_growth(F3, h, F3.parse(k), 5)
        assert s.counts == [1] * 6
    # conjugating by a member gives H itself
    s = gr.conj_intersection_growth(F3, h, F3.parse("ab"), 4)
    assert s.counts == gr.subgroup_growth(F3, h, 4).counts
    # central z: every conjugate of <z> is <z>
    z = cosets.cyclic_powers(H3, ((1, 0, 1), (0, 1, 0), (0, 0, 1)))
    assert (gr.conj_intersection_growth(H3, z, H3.gens[1], 6).counts
            == gr.subgroup_growth(H3, z, 6).counts)
    # u is not normal: <u> meets v<u>v^-1 trivially
    u = cosets.cyclic_powers(H3, H3.gens[0])
    assert gr.conj_intersection_growth(H3, u, H3.gens[1], 6).counts == [1] * 7


def test_covering_small():
    h = cosets.free_subgroup(F2, ["a", "bab^-1"])
    res = gr.covering_check(F2, h, F2.parse("b"), 3)
    assert res.ok and res.members >= res.reps >= 1


def _cls(label, degree=None, rate=None):
    return GrowthClass(label, degree, rate, 0.999, (5, 10))


def test_verdict_rules():
    poly, expo = _cls(gr.POLYNOMIAL, 2.0), _cls(gr.EXPONENTIAL, rate=1.0)
    bounded = _cls(gr.POLYNOMIAL, 0.0)
    v = gr.slc_verdict(schreier=poly)
    assert v.verdict == gr.CONSISTENT and v.rules == [gr.RULE_SCHREIER]
    v = gr.slc_verdict(subgroup=expo, intersections=[("c", bounded)])
    assert v.verdict == gr.REFUTED_NON_SNORMAL and v.rules == [gr.RULE_NON_SNORMAL]
    v = gr.slc_verdict(schreier=expo, co_amenable=True, co_amenable_provenance="normal core")
    assert v.verdict == gr.REFUTED_COAMENABLE
    assert gr.slc_verdict(schreier=expo).verdict == gr.UNDETERMINED
    with pytest.raises(ConflictingEvidence):
        gr.slc_verdict(schreier=poly, subgroup=expo, intersections=[("c", bounded)])
    with pytest.raises(InsufficientData):
        gr.slc_verdict()
    a = gr.slc_verdict(schreier=poly).inputs_digest
    assert a == gr.slc_verdict(schreier=poly).inputs_digest
    assert a != gr.slc_verdict(schreier=expo).inputs_digest


def test_snormal_probe_runs():
    out = gr.snormal_probe(F3, cosets.free_subgroup(F3, ["a", "b"]), 5, x_radii=(1,), samples=2)
    assert len(out) == 2 and all(s.series.counts[0] == 1 for s in out)


def test_growth_csv(tmp_path):
    gr.write_growth_csv([GrowthSeries([1, 3], "a"), GrowthSeries([1, 2], "b")], tmp_path / "g.csv")
    assert (tmp_path / "g.csv").read_text().splitlines() == [
        "radius,count,source", "0,1,a", "1,3,a", "0,1,b", "1,2,b"]


def test_sl3_line_growth_exponential():
    sb = cosets.schreier_ball(sl_elementary(3), cosets.line_stabilizer(sl_elementary(3), (1, 0, 0)), 7)
    assert sb.ball_sizes[:4] == [1, 5, 19, 61]
