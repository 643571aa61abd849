import math
from fractions import Fraction

import numpy as np
import pytest

from radmix import (
    ExponentFit,
    ExponentPair,
    Monomial,
    NormCache,
    QuadratureConfig,
    TaylorPolynomial,
    compactness_witness_scan,
    evaluation_functional_fit,
    fejer_riesz_ratio,
    inclusion_is_compact,
    inclusion_region_contains,
    inclusion_witness_scan,
    mixed_norm,
    noncompactness_witness,
    nontangential_decay_check,
    power_singularity,
)
from radmix.theorems import classify_ratio_trace, inclusion_holds

GRID5 = [1, Fraction(4, 3), 2, 4, "inf"]
CFG = QuadratureConfig(refine_max=8, rel_tol=0.02)


def test_region_membership_examples():
    contained, excluded = inclusion_region_contains(2, 2, 2, 2)
    assert contained and not excluded
    # the excluded boundary pair of a finite source
    contained, excluded = inclusion_region_contains(2, 2, 1, "inf")
    assert contained and excluded
    assert not inclusion_holds(2, 2, 1, "inf")
    # sup-type source keeps its boundary pair
    contained, excluded = inclusion_region_contains("inf", 2, 2, "inf")
    assert contained and not excluded
    # leaving the region
    contained, _ = inclusion_region_contains(2, 2, 4, 4)
    assert not contained
    contained, _ = inclusion_region_contains(2, 2, 2, 4)
    assert not contained


def test_excluded_point_needs_exact_equality():
    # beta = p0 q0 / (p0 + q0) only
    _, excluded = inclusion_region_contains(4, 4, 2, "inf")
    assert excluded
    _, excluded = inclusion_region_contains(4, 4, Fraction(4, 3), "inf")
    assert not excluded


def test_region_transitivity_on_grid():
    pairs = [(p, q) for p in GRID5 for q in GRID5]
    hold = {}
    for a in pairs:
        for b in pairs:
            hold[a, b] = inclusion_holds(*a, *b)
    for a in pairs:
        for b in pairs:
            if not hold[a, b]:
                continue
            for c in pairs:
                if hold[b, c]:
                    assert hold[a, c], (a, b, c)


def test_compactness_predicate_examples():
    assert inclusion_is_compact(4, 4, 2, 2)
    assert not inclusion_is_compact(2, 2, 2, 1)      # equal radial exponents
    assert not inclusion_is_compact(2, 2, 4, 1)      # equal reciprocal sums
    assert not inclusion_is_compact("inf", 2, "inf", 1)


def test_compact_implies_included():
    for p0 in GRID5:
        for q0 in GRID5:
            for p in GRID5:
                for q in GRID5:
                    if inclusion_is_compact(p0, q0, p, q):
                        assert inclusion_holds(p0, q0, p, q)


def test_classify_ratio_trace():
    assert classify_ratio_trace([1, 1.1, 2.5, 2.6, 2.7]) == "unbounded"
    assert classify_ratio_trace([1, 1.1, 1.2, 1.1, 1.0]) == "bounded"
    assert classify_ratio_trace([1, 3.0, 2.5, 2.2, 2.1]) == "inconclusive"
    assert classify_ratio_trace([1, 2]) == "inconclusive"


def test_witness_scan_monomial_route():
    v = inclusion_witness_scan(2, 2, 4, 4, CFG)
    assert not v.included
    assert v.witness_conclusion() == "excluded"
    assert any(r.name == "monomial" and r.conclusion == "unbounded"
               for r in v.witness_report)


def test_witness_scan_separating_route():
    v = inclusion_witness_scan(2, 2, 2, 4, CFG)
    assert not v.included
    assert any(r.conclusion == "separating" for r in v.witness_report)
    assert v.agreement() is True


def test_witness_scan_excluded_point_is_flagged_not_silently_decided():
    v = inclusion_witness_scan(2, 2, 1, "inf", CFG)
    assert v.excluded_point and not v.included
    # the log-rate witness cannot clear the growth bar at this budget
    assert v.witness_conclusion() in ("excluded", "inconclusive")
    assert all(r.conclusion != "bounded" for r in v.witness_report
               if r.name == "cesaro_power")


def test_witness_scan_included_cell():
    v = inclusion_witness_scan(2, 2, 2, 2, CFG)
    assert v.included and v.agreement() is True
    v = inclusion_witness_scan(4, 4, 2, 2, CFG)
    assert v.included and v.agreement() is True


def test_monomial_ratio_bounded_by_closed_form_supremum():
    cache = NormCache(CFG)
    for (p0, q0), (p, q) in (((4, 4), (2, 2)), ((4, 2), (2, 4)), ((2, 2), (1, 1))):
        assert inclusion_holds(p0, q0, p, q)
        ns = np.arange(0, 65)
        closed = (1 + ns * p) ** (-1 / p) / (1 + ns * p0) ** (-1 / p0)
        # the discrete maximum is close to the analytic supremum over real n
        ngrid = np.logspace(0, 6, 4000)
        analytic = np.max((1 + ngrid * p) ** (-1 / p) / (1 + ngrid * p0) ** (-1 / p0))
        analytic = max(analytic, 1.0)
        assert closed.max() <= 1.05 * analytic
        for n in (1, 4, 16, 64):
            a = cache.norm(("mon", n), Monomial(n), ExponentPair.of(p, q)).value
            b = cache.norm(("mon", n), Monomial(n), ExponentPair.of(p0, q0)).value
            assert a / b <= closed.max() * 1.01


def test_noncompactness_witness_rows():
    rows = noncompactness_witness(2, 2, 4, [1, 4, 16], CFG)
    for n, src, dst, small in rows:
        assert src == pytest.approx(1.0, rel=CFG.rel_tol)
        assert dst == pytest.approx(1.0, rel=CFG.rel_tol)
    # uniform decay on |z| <= 1/2
    smalls = [row[3] for row in rows]
    assert smalls[0] > smalls[1] > smalls[2]
    assert smalls[-1] < 1e-3
    with pytest.raises(ValueError):
        noncompactness_witness("inf", 2, 2, [1], CFG)


def test_compactness_scan_spot_checks():
    cache = NormCache(CFG)
    rep = compactness_witness_scan(4, 4, 2, 2, CFG, cache)
    assert rep["predicted"] and rep["verdict"] == "compact-consistent"
    rep = compactness_witness_scan(2, 2, 2, 1, CFG, cache)
    assert not rep["predicted"] and rep["verdict"] == "noncompact"
    # equal-sum line: excluded by the strict inequality
    rep = compactness_witness_scan(2, 2, 4, 1, CFG, cache)
    assert not rep["predicted"] and rep["verdict"] == "noncompact"


def test_exponent_fit_garbage_rejected():
    with pytest.raises(ValueError):
        ExponentFit.fit([(0.0, 1.0), (1.0, 2.0)])
    fit = ExponentFit.fit([(x, 2 * x + 1) for x in (0.0, 1.0, 2.0, 3.0)])
    assert fit.slope == pytest.approx(2.0)
    assert fit.residual < 1e-12


def test_point_functional_slopes():
    zs = [1 - 2.0 ** -k for k in range(3, 9)]
    cfg = QuadratureConfig(radial_levels=14, refine_max=8, rel_tol=5e-3)
    cache = NormCache(cfg)
    fit = evaluation_functional_fit((2, 2), "point", zs, cfg, cache=cache)
    assert fit.slope == pytest.approx(1.0, abs=0.1)
    fitd = evaluation_functional_fit((2, 2), "derivative", zs, cfg, cache=cache)
    assert fitd.slope - fit.slope == pytest.approx(1.0, abs=0.1)
    with pytest.raises(ValueError):
        evaluation_functional_fit((2, 2), "nope", zs, cfg)


def test_point_functional_sup_space_is_flat():
    zs = [1 - 2.0 ** -k for k in range(3, 9)]
    fit = evaluation_functional_fit(("inf", "inf"), "point", zs, CFG)
    assert abs(fit.slope) < 0.02


def test_point_functional_slope_rotation_invariant():
    zs = [1 - 2.0 ** -k for k in range(3, 8)]
    cfg = QuadratureConfig(radial_levels=14, refine_max=8, rel_tol=5e-3)
    base = evaluation_functional_fit((2, 2), "point", zs, cfg)
    rot = evaluation_functional_fit((2, 2), "point", zs, cfg, rotation=0.77)
    assert abs(rot.slope - base.slope) <= 0.02


def test_nontangential_decay():
    rs = [1 - 2.0 ** -k for k in range(2, 10)]
    # polynomial: product vanishes trivially
    vals = nontangential_decay_check(TaylorPolynomial([1, 1]), 2, rs)
    assert vals[-1][1] < 0.1
    # alpha = 0.8/p decays like (1-r)^(1/p - alpha)
    vals = nontangential_decay_check(power_singularity(0.4), 2, rs)
    seq = [v for _, v in vals]
    assert all(a > b for a, b in zip(seq, seq[1:]))
    # boundary case alpha = 1/p: stays pinned at one (negative control)
    vals = nontangential_decay_check(power_singularity(0.5), 2, rs)
    assert all(abs(v - 1.0) < 1e-9 for _, v in vals)


def test_fejer_riesz_ratio():
    thetas = np.linspace(0, 2 * np.pi, 13)
    assert fejer_riesz_ratio(TaylorPolynomial([1]), 2, thetas, CFG) == \
        pytest.approx(1.0, rel=1e-6)
    v = fejer_riesz_ratio(Monomial(3), 2, thetas, CFG)
    assert v == pytest.approx((1 + 3 * 2) ** -0.5, rel=1e-3)
    assert v <= 1.0
    # family-wide boundedness for random polynomials, stable under refinement
    rng = np.random.default_rng(6)
    cfg2 = QuadratureConfig(theta_count=128, radial_levels=14,
                            refine_max=8, rel_tol=0.02)
    worst = []
    for cfg in (CFG, cfg2):
        vals = []
        for _ in range(5):
            f = TaylorPolynomial(rng.standard_normal(11) + 1j * rng.standard_normal(11))
            vals.append(fejer_riesz_ratio(f, 2, thetas, cfg))
        worst.append(max(vals))
    assert worst[0] <= 2.0 and worst[1] <= 2.0
