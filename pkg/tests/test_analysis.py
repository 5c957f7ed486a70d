import math
from fractions import Fraction

import numpy as np
import pytest

import scaleop.analysis as an
from scaleop.analysis import ExponentPair, RegionSpec
from scaleop.field import get_field
from scaleop.grid import GridFunction, lp_norm, sphere, sphere_sizes
from scaleop.transform import s_apply, s_norm_ratio

from oracles import hull_contains

INF = float("inf")


# -- exponent pairs -----------------------------------------------------------------


def test_exponent_pair_from_ps():
    e = ExponentPair.from_ps(2, INF)
    assert e.x == Fraction(1, 2) and e.y == 0
    assert e.p == Fraction(2) and e.s == INF
    e2 = ExponentPair.from_ps(Fraction(4, 3), 2)
    assert e2.x == Fraction(3, 4) and e2.y == Fraction(1, 2)


def test_exponent_pair_validation():
    with pytest.raises(ValueError):
        ExponentPair(Fraction(3, 2), Fraction(0))
    with pytest.raises(ValueError):
        ExponentPair(Fraction(1, 2), Fraction(-1, 4))


# -- regions ------------------------------------------------------------------------


def test_general_region_examples():
    general = RegionSpec("general")
    assert general.contains(ExponentPair(Fraction(1, 2), Fraction(1, 2)))
    assert not general.contains(ExponentPair(Fraction(1), Fraction(3, 5)))
    assert general.contains(ExponentPair(Fraction(1), Fraction(1, 2)))
    assert not general.contains(ExponentPair(Fraction(1, 4), Fraction(1, 2)))


def test_radial_region_examples():
    r3 = RegionSpec("radial", 3)
    assert r3.contains(ExponentPair(Fraction(1), Fraction(3, 4)))
    assert not r3.contains(ExponentPair(Fraction(1), Fraction(4, 5)))
    r2 = RegionSpec("radial", 2)
    assert (Fraction(1), Fraction(2, 3)) in r2.vertices()


def test_region_requires_d_for_radial():
    with pytest.raises(ValueError):
        RegionSpec("radial")
    with pytest.raises(ValueError):
        RegionSpec("elliptic")


@pytest.mark.parametrize("region", [RegionSpec("general"), RegionSpec("radial", 2), RegionSpec("radial", 3)])
def test_halfspaces_match_hull_on_33_grid(region):
    verts = region.vertices()
    for i in range(33):
        for j in range(33):
            pt = (Fraction(i, 32), Fraction(j, 32))
            assert region.contains(ExponentPair(*pt)) == hull_contains(verts, pt)


# -- certified upper bound -----------------------------------------------------------


def test_certified_upper_bound_examples():
    e_mid = ExponentPair(Fraction(1, 2), Fraction(1, 2))
    assert an.certified_upper_bound(e_mid, 7) == pytest.approx(math.sqrt(6 / 7), rel=1e-12)
    e_corner = ExponentPair(Fraction(0), Fraction(0))
    for q in (3, 11):
        assert an.certified_upper_bound(e_corner, q) == pytest.approx((q - 1) / q, rel=1e-12)
    e_edge = ExponentPair(Fraction(1), Fraction(1, 2))
    assert an.certified_upper_bound(e_edge, 5) == pytest.approx(math.sqrt(4 / 5), rel=1e-12)


def test_certified_upper_bound_outside_rejected():
    with pytest.raises(ValueError):
        an.certified_upper_bound(ExponentPair(Fraction(1), Fraction(3, 4)), 5)


# -- closed-form lower bounds -----------------------------------------------------------


def test_delta_bound_examples():
    e = ExponentPair.from_ps(1, 2)
    assert an.lower_bound_delta(e, 3) == pytest.approx(math.sqrt(2 / 3), rel=1e-12)
    e1 = ExponentPair.from_ps(1, 1)
    assert an.lower_bound_delta(e1, 11) == pytest.approx(10.0, rel=1e-12)
    e7 = ExponentPair.from_ps(1, 2)
    assert an.lower_bound_delta(e7, 7) == pytest.approx(an.certified_upper_bound(ExponentPair(Fraction(1), Fraction(1, 2)), 7), rel=1e-12)
    e_inf = ExponentPair.from_ps(1, INF)
    assert an.lower_bound_delta(e_inf, 5) == pytest.approx(1 / 5, rel=1e-12)


def test_subspace_bound_examples():
    e = ExponentPair.from_ps(2, 2)
    assert an.lower_bound_subspace(e, 3, 2, k=1) == pytest.approx(math.sqrt(2) / math.sqrt(3), rel=1e-12)
    with pytest.raises(ValueError):
        an.lower_bound_subspace(e, 3, 2, k=3)


def test_sphere_bound_j0_display_equality():
    # with a full-size isotropic sphere the bound reduces to the classical display
    spec = get_field(5)
    d, s = 3, 2
    assert int(sphere_sizes(spec, d)[0]) == 25
    e = ExponentPair.from_ps(INF, s)
    display = 5.0 ** ((d - 1) / s - 1) * ((5 - 1) ** s + 5 - 1) ** (1 / s)
    assert an.lower_bound_sphere_radial(e, spec, d, 0) == pytest.approx(display, rel=1e-9)


def test_sphere_bound_matches_dense_operator(spec):
    d = 2
    for j in (0, 1):
        g = GridFunction.indicator(sphere(spec, j, d))
        for p, s in ((1, 1), (1, 2), (2, 4)):
            e = ExponentPair.from_ps(p, s)
            assert an.lower_bound_sphere_radial(e, spec, d, j) == pytest.approx(
                s_norm_ratio(g, p, s), rel=1e-9
            )


def test_sphere_bound_rejects_other_j(spec):
    with pytest.raises(ValueError):
        an.lower_bound_sphere_radial(ExponentPair.from_ps(1, 2), spec, 2, 2)


def test_formula_vs_operator_consistency(spec):
    d = 2
    delta_g = GridFunction.delta(spec, d, spec.q)
    sub_g = GridFunction.constant(spec, d, 1.0)
    for p, s in ((1, 2), (2, 2), (Fraction(4, 3), 4), (1, INF)):
        e = ExponentPair.from_ps(p, s)
        assert an.lower_bound_delta(e, spec.q, d) == pytest.approx(
            s_norm_ratio(delta_g, float(p), float(s)), rel=1e-9
        )
        assert an.lower_bound_subspace(e, spec.q, d) == pytest.approx(
            s_norm_ratio(sub_g, float(p), float(s)), rel=1e-9
        )


def test_exponential_family_values():
    spec = get_field(5)
    l2, restricted = an.lower_bound_exponential(spec, 2, 1)
    assert l2 == pytest.approx(math.sqrt(20), rel=1e-9)
    # in the plane the ratio of the two norms is exactly sqrt(q)
    assert restricted / l2 == pytest.approx(math.sqrt(5), rel=1e-9)
    # brute force at q = 3
    spec3 = get_field(3)
    g0, _ = an.exponential_witness(spec3, 2, 1)
    sg = s_apply(g0)
    assert an.lower_bound_exponential(spec3, 2, 1)[0] == pytest.approx(lp_norm(sg, 2), rel=1e-12)
    with pytest.raises(ValueError):
        an.lower_bound_exponential(spec3, 2, 0)


def test_exponential_ratio_equals_full_subspace(spec):
    e = ExponentPair.from_ps(Fraction(4, 3), 2)
    assert an.lower_bound_exponential_ratio(e, spec.q, 2) == pytest.approx(
        an.lower_bound_subspace(e, spec.q, 2, k=2), rel=1e-12
    )


# -- radial extremes ---------------------------------------------------------------------


def test_radial_p1_norm_matches_enumeration():
    spec = get_field(3)
    d, s = 2, 1.5
    best = 0.0
    for j in range(3):
        g = GridFunction.indicator(sphere(spec, j, d))
        best = max(best, lp_norm(s_apply(g), s) / lp_norm(g, 1))
    assert an.radial_p1_norm_exact(spec, d, Fraction(3, 2)) == pytest.approx(best, rel=1e-9)


def test_radial_p1_monotone_in_s(spec):
    v1 = an.radial_p1_norm_exact(spec, 2, 1)
    vinf = an.radial_p1_norm_exact(spec, 2, INF)
    assert vinf <= v1 + 1e-12


def test_radial_extreme_is_lower_bound(spec):
    # any shell indicator ratio is dominated by the extreme-point maximum
    e = ExponentPair.from_ps(1, 2)
    best = an.radial_extreme_ratio(e, spec, 2)
    for j in range(spec.q):
        g = GridFunction.indicator(sphere(spec, j, 2))
        assert s_norm_ratio(g, 1, 2) <= best + 1e-9


# -- homogeneous class -------------------------------------------------------------------


def test_homogeneous_p2_is_exact(spec):
    r = an.homogeneous_class_ratio(spec, 2, 2, trials=5, seed=1)
    assert r == pytest.approx(math.sqrt((spec.q - 1) / spec.q), rel=1e-9)


def test_homogeneous_pinf_contraction(spec):
    r = an.homogeneous_class_ratio(spec, 2, INF, trials=5, seed=2)
    assert r <= 1.0 + 1e-12


def test_homogeneous_sample_is_homogeneous(spec):
    from scaleop.grid import scalar_mult_perm

    g = an.sample_homogeneous(spec, 2, np.random.default_rng(3))
    for t in range(2, spec.q):
        perm = scalar_mult_perm(spec, 2, t)
        assert np.array_equal(g.values[perm], g.values)


# -- scans and fits -----------------------------------------------------------------------


def test_scan_row_counts_and_order():
    rows = an.scan(d=2, qs=(3, 5), grid_resolution=3, families=("delta", "subspace"))
    assert len(rows) == 9 * 2 * 2
    keys = [(r["p_inv"], r["s_inv"], r["q"], r["family"]) for r in rows]
    assert keys == sorted(keys)
    # upper bound present exactly inside the general region
    for r in rows:
        e = ExponentPair(Fraction(r["p_inv"]).limit_denominator(64), Fraction(r["s_inv"]).limit_denominator(64))
        if RegionSpec("general").contains(e):
            assert r["upper"] is not None
            assert r["lower"] <= r["upper"] + 1e-9
        else:
            assert r["upper"] is None


def test_scan_thread_determinism():
    kw = dict(d=2, qs=(3, 5, 7), grid_resolution=5, families=("delta", "radial", "random"), trials=3, seed=9)
    rows1 = an.scan(threads=1, **kw)
    rows4 = an.scan(threads=4, **kw)
    assert rows1 == rows4


def test_scan_flags_exceptional():
    rows = an.scan(d=2, qs=(3, 5), grid_resolution=2, families=("delta",))
    flags = {r["q"]: r["flags"] for r in rows}
    assert flags[3] == "exceptional"
    assert flags[5] == ""


def test_scan_rejects_unknown_family():
    with pytest.raises(ValueError):
        an.scan(d=2, qs=(3,), grid_resolution=3, families=("bogus",))
    with pytest.raises(ValueError):
        an.rational_grid(1)


def test_fit_growth_example_and_validation():
    rows = an.scan(d=2, qs=(3, 5, 7, 11, 13), grid_resolution=5, families=("delta",))
    fits = an.fit_growth(rows, d=2)
    by_point = {(f.x, f.y): f for f in fits}
    f = by_point[(Fraction(1, 2), Fraction(3, 4))]
    assert f.predicted == Fraction(1, 2)
    assert f.residual < 0.05
    with pytest.raises(ValueError):
        an.fit_growth(an.scan(d=2, qs=(3, 5), grid_resolution=2, families=("delta",)))


def test_predicted_slopes():
    e = ExponentPair(Fraction(1, 2), Fraction(3, 4))
    assert an.predicted_slope("delta", e, 2) == Fraction(1, 2)
    assert an.predicted_slope("subspace", e, 2) == Fraction(1, 2)
    assert an.predicted_slope("sphere0", e, 3) == Fraction(1, 2)
    assert an.predicted_slope("sphere1", e, 3) == Fraction(4) * Fraction(3, 4) - 1 - 2 * Fraction(1, 2)
    assert an.predicted_slope("random", e, 2) is None


def test_is_exceptional():
    assert an.is_exceptional(2, 3)
    assert an.is_exceptional(2, 11)
    assert not an.is_exceptional(2, 5)
    assert not an.is_exceptional(3, 3)
