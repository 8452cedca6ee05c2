import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cieig.contours import (
    Contour,
    SpectrumPrediction,
    construct_contours,
    contour_area,
    contours_from_json,
    contours_to_json,
    find_cut,
    kde_sparsity,
    quadrature_for,
    random_contours,
)
from cieig.errors import (
    CutUndefinedError,
    EmptyPredictionError,
    ParameterError,
)


def _pred(values):
    return SpectrumPrediction(values=np.asarray(values, dtype=float))


# ---------------------------------------------------------------------------
# KDE sparsity and cuts


def test_kde_at_kernel_center():
    assert kde_sparsity(0.0, 1.0, [0.5], 7.0, 0.5) == pytest.approx(1.0)


def test_kde_empty():
    assert kde_sparsity(0.0, 1.0, [], 10.0, 0.3) == 0.0


def test_kde_hand_value():
    # two kernels at 0 and 1, t=0.5, w=10: 2 exp(-10 * 0.25)
    got = kde_sparsity(0.0, 1.0, [0.0, 1.0], 10.0, 0.5)
    assert got == pytest.approx(2.0 * np.exp(-2.5), rel=1e-14)


def test_find_cut_symmetric_pair():
    assert find_cut(0.0, 1.0, [0.0, 1.0], 10.0) == pytest.approx(0.5, abs=1e-8)


def test_find_cut_generic_pair_midpoint():
    # tight interval around a generic pair: symmetry puts the cut at the
    # midpoint of the two kernels
    got = find_cut(0.3, 0.7, [0.3, 0.7], 25.0)
    assert got == pytest.approx(0.5, abs=1e-8)


def test_find_cut_three_kernels_frozen_oracle():
    # dense million-point scan puts the minimizer at 0.5998453835765787
    got = find_cut(0.0, 1.0, [0.1, 0.2, 0.9], 10.0)
    assert got == pytest.approx(0.5998453835765787, abs=1e-6)
    assert 0.2 < got < 0.9


def test_find_cut_needs_two_values():
    with pytest.raises(CutUndefinedError):
        find_cut(0.0, 1.0, [0.5], 10.0)


# ---------------------------------------------------------------------------
# construct_contours


def test_single_contour_when_under_nmax():
    values = np.linspace(0.0, 1.0, 30)
    part, contours = construct_contours(_pred(values))
    assert len(contours) == 1
    assert contours[0].expected_count == 30
    lo, hi = contours[0].real_interval()
    assert lo < values[0] and hi > values[-1]


def test_two_clusters_split():
    values = np.concatenate([np.linspace(0.0, 1.0, 30),
                             np.linspace(9.0, 10.0, 30)])
    part, contours = construct_contours(_pred(values), n_min=10, n_max=50,
                                        w=10.0)
    assert len(contours) == 2
    cut = part.intervals[0].end
    assert 1.0 < cut < 9.0
    assert [iv.count for iv in part.intervals] == [30, 30]


def test_partition_counts_sum():
    values = np.linspace(0.0, 1.0, 100)
    part, contours = construct_contours(_pred(values), n_min=10, n_max=50)
    counts = [iv.count for iv in part.intervals]
    assert sum(counts) == 100
    assert all(10 <= c <= 50 for c in counts)


def test_coverage_strict_containment():
    rng = np.random.default_rng(0)
    values = np.sort(rng.uniform(-3.0, 5.0, 120))
    _, contours = construct_contours(_pred(values), n_min=10, n_max=50)
    for v in values:
        assert any(c.contains(complex(v, 0.0)) for c in contours)


def test_partition_determinism():
    values = np.sort(np.random.default_rng(1).uniform(0, 1, 80))
    p1, c1 = construct_contours(_pred(values))
    p2, c2 = construct_contours(_pred(values))
    assert p1 == p2
    assert c1 == c2


@settings(deadline=None, max_examples=25)
@given(st.lists(st.floats(min_value=-100.0, max_value=100.0,
                          allow_nan=False), min_size=2, max_size=150),
       st.integers(min_value=0, max_value=10))
def test_partition_invariants_random(values, nmin):
    values = np.sort(np.asarray(values))
    n_min = max(1, nmin)
    n_max = max(n_min, 40)
    part, contours = construct_contours(_pred(values), n_min=n_min,
                                        n_max=n_max)
    counts = [iv.count for iv in part.intervals]
    assert sum(counts) == len(values)
    # at most one undersized remainder
    assert sum(1 for c in counts if c < n_min) <= 1
    assert all(c <= n_max for c in counts)
    for v in values:
        assert any(c.contains(complex(v, 0.0)) for c in contours)


def test_empty_prediction_rejected():
    with pytest.raises(EmptyPredictionError):
        SpectrumPrediction(values=np.array([]))


# ---------------------------------------------------------------------------
# quadrature


def test_circle_quadrature_centered_pole():
    c = Contour(shape="circle", center=2.0 + 0.0j, radius=1.5,
                expected_count=1)
    rule = quadrature_for(c, 8)
    s = np.sum(rule.weights / (rule.nodes - c.center))
    assert abs(s - 1.0) <= 1e-14


def test_circle_quadrature_weight_sum():
    c = Contour(shape="circle", center=-1.0 + 0.5j, radius=0.7,
                expected_count=1)
    for n_q in (4, 8, 32):
        rule = quadrature_for(c, n_q)
        assert abs(np.sum(rule.weights)) <= 1e-14


def test_circle_quadrature_outside_pole_decay():
    c = Contour(shape="circle", center=0.0 + 0.0j, radius=1.0,
                expected_count=1)
    pole = 2.0  # distance ratio d = 2
    errs = []
    for n_q in (8, 16, 32):
        rule = quadrature_for(c, n_q)
        errs.append(abs(np.sum(rule.weights / (rule.nodes - pole))))
    assert errs[0] > errs[1] > errs[2]
    for n_q, err in zip((8, 16, 32), errs):
        assert err <= (1.0 / 2.0) ** n_q * 10


def test_rect_quadrature_pole_inside():
    # Gauss-Legendre on the edges converges geometrically but much slower
    # than the circle trapezoid; check convergence plus accuracy at n_q=128
    c = Contour(shape="rect", re_min=0.0, re_max=4.0, im_min=-1.0, im_max=1.0,
                expected_count=1)
    pole = 2.0 + 0.1j
    errs = []
    for n_q in (32, 64, 128):
        rule = quadrature_for(c, n_q)
        errs.append(abs(np.sum(rule.weights / (rule.nodes - pole)) - 1.0))
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] <= 1e-10
    rule = quadrature_for(c, 32)
    s_out = np.sum(rule.weights / (rule.nodes - (7.0 + 0.0j)))
    assert abs(s_out) <= 1e-8


def test_quadrature_parameter_errors():
    c = Contour(shape="circle", center=0.0j, radius=1.0, expected_count=1)
    with pytest.raises(ParameterError):
        quadrature_for(c, 5)
    r = Contour(shape="rect", re_min=0.0, re_max=1.0, im_min=-1.0, im_max=1.0,
                expected_count=1)
    with pytest.raises(ParameterError):
        quadrature_for(r, 6)


# ---------------------------------------------------------------------------
# random contours and areas


def test_random_contours_deterministic():
    truth = np.linspace(1.0, 50.0, 20)
    assert random_contours(truth, 7) == random_contours(truth, 7)


def test_random_contours_count_and_centers():
    truth = np.linspace(1.0, 50.0, 20)
    for seed in range(1000):
        cs = random_contours(truth, seed)
        assert 1 <= len(cs) <= 16
        for c in cs:
            assert truth[0] <= c.center.real <= truth[-1]


def test_contour_area():
    circ = Contour(shape="circle", center=0.0j, radius=1.0, expected_count=1)
    rect = Contour(shape="rect", re_min=0.0, re_max=2.0, im_min=0.0,
                   im_max=3.0, expected_count=1)
    assert contour_area([]) == 0.0
    assert contour_area([circ]) == pytest.approx(np.pi)
    assert contour_area([circ, rect]) == pytest.approx(np.pi + 6.0)


def test_contour_json_round_trip():
    cs = [
        Contour(shape="circle", center=1.0 + 0.0j, radius=2.0,
                expected_count=3, source="kde"),
        Contour(shape="rect", re_min=0.0, re_max=1.0, im_min=-0.1,
                im_max=0.1, expected_count=2, source="scout"),
    ]
    assert contours_from_json(contours_to_json(cs)) == cs
