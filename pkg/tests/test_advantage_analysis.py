import numpy as np
import pytest
from numpy.testing import assert_allclose

from cvdcnet.advantage_analysis import (
    SEARCH_CAP_NBAR,
    NoAdvantageError,
    RegionScan,
    asymptotic_ratio,
    break_even_squeezing,
    classical_capacity,
    min_threshold_energy,
    quantum_advantage,
    region_scan,
    tau_boundaries,
    threshold_energy,
)

from helpers import (
    BREAK_EVEN3,
    BREAK_EVEN4,
    CAP3_BALANCED_815,
    CLASSICAL_2_815,
    CLASSICAL_3_AT_3,
    MIN_TH3,
    MIN_TH4,
    RATIO3_R20,
    RATIO4_R20,
    TH3_BALANCED,
    TH4_BALANCED,
    bisect_root,
    boundary3_tau1_literal,
    boundary3_tau2_literal,
    boundary4_tau1_literal,
    boundary4_tau2_literal,
    boundary4_tau3_literal,
    classical_literal,
    classical_stable,
)


# --- classical benchmark --------------------------------------------------------

def test_classical_capacity_frozen_points():
    assert classical_capacity(2, 8.15) == pytest.approx(CLASSICAL_2_815, rel=1e-13)
    assert classical_capacity(3, 3.0) == pytest.approx(CLASSICAL_3_AT_3, rel=1e-13)
    assert classical_capacity(2, 0.0) == 0.0
    assert classical_capacity(1, 1.0) == pytest.approx(2.0 * np.log(2.0), rel=1e-13)


def test_classical_capacity_array_input():
    budgets = np.array([0.0, 0.5, 3.0, 8.15, 120.0])
    vec = classical_capacity(2, budgets)
    assert vec.shape == budgets.shape
    for b, v in zip(budgets, vec):
        assert v == classical_capacity(2, float(b))


def test_classical_capacity_increasing_and_concave():
    grid = np.linspace(0.1, 80.0, 200)
    vals = classical_capacity(3, grid)
    first = np.diff(vals)
    assert np.all(first > 0)
    assert np.all(np.diff(first) < 0)


def test_classical_capacity_stable_at_extreme_budgets():
    # the textbook arrangement loses about one nat per sender out at
    # x ~ 1e17 where (1+x)ln(1+x) - x ln x cancels; the log1p form keeps it
    for n_s in (2, 3):
        big = 1e17 * n_s
        assert classical_capacity(n_s, big) > classical_literal(n_s, big) + 0.9 * n_s
        for nbar in (0.5, 3.0, 8.15, 50.0):
            assert classical_capacity(n_s, nbar) == pytest.approx(
                classical_literal(n_s, nbar), rel=1e-12
            )
            assert classical_capacity(n_s, nbar) == pytest.approx(
                classical_stable(n_s, nbar), rel=1e-14
            )


def test_classical_capacity_rejects_bad_input():
    with pytest.raises(ValueError, match="sender"):
        classical_capacity(0, 1.0)
    with pytest.raises(ValueError, match="finite"):
        classical_capacity(2, -1.0)
    with pytest.raises(ValueError, match="finite"):
        classical_capacity(2, np.array([1.0, np.inf]))


# --- advantage and thresholds ---------------------------------------------------

def test_quantum_advantage_frozen_point_and_sign_flip():
    d = quantum_advantage(3, (0.5, 0.5), 8.15)
    assert d == pytest.approx(CAP3_BALANCED_815 - CLASSICAL_2_815, abs=1e-13)
    assert d < 0
    assert quantum_advantage(3, (0.5, 0.5), 8.16) > 0


def test_threshold_energy_balanced_chains():
    assert threshold_energy(3, (0.5, 0.5)) == pytest.approx(TH3_BALANCED, abs=2e-6)
    assert threshold_energy(4, (0.5, 0.5, 0.5)) == pytest.approx(TH4_BALANCED, abs=2e-6)


def test_threshold_energy_brackets_the_sign_change():
    rng = np.random.default_rng(77)
    cases = [(3, tuple(rng.uniform(0.2, 0.8, size=2))) for _ in range(5)]
    cases += [(4, tuple(rng.uniform(0.2, 0.8, size=3))) for _ in range(3)]
    for n, taus in cases:
        th = threshold_energy(n, taus)
        assert quantum_advantage(n, taus, th - 0.01) < 0
        assert quantum_advantage(n, taus, th + 0.01) > 0


def test_threshold_energy_no_advantage_configuration():
    with pytest.raises(NoAdvantageError) as exc:
        threshold_energy(3, (0.0, 0.0))
    assert exc.value.search_cap == SEARCH_CAP_NBAR


def test_threshold_energy_input_validation():
    with pytest.raises(ValueError, match="transmissivities"):
        threshold_energy(3, (0.5,))
    with pytest.raises(ValueError, match="lie in"):
        threshold_energy(3, (0.5, 1.2))


def test_min_threshold_three_modes():
    result = min_threshold_energy(3)
    assert result.nbar_th == pytest.approx(MIN_TH3, abs=1e-6)
    assert abs(result.taus[0] - 0.5) <= 1e-3
    assert result.taus[1] <= 1e-3
    assert len(result.ties) >= 2  # tau2 in {0, 1} give the same chain
    nbar_th, taus = result  # tuple-style unpacking
    assert nbar_th == result.nbar_th and taus == result.taus


def test_min_threshold_four_modes():
    result = min_threshold_energy(4)
    assert result.nbar_th == pytest.approx(MIN_TH4, abs=1e-6)
    assert abs(result.taus[0] - 0.5) <= 1e-3
    assert max(result.taus[1:]) <= 1e-3
    assert len(result.ties) >= 2


def test_min_threshold_rejects_tiny_grids():
    with pytest.raises(ValueError, match="grid_resolution"):
        min_threshold_energy(3, grid_resolution=4)


def test_break_even_squeezing_frozen_values():
    assert break_even_squeezing(3, (0.5, 0.5)) == pytest.approx(BREAK_EVEN3, abs=2e-7)
    assert break_even_squeezing(4, (0.5, 0.5, 0.5)) == pytest.approx(
        BREAK_EVEN4, abs=2e-7
    )


def test_asymptotic_ratio_frozen_and_monotone():
    assert asymptotic_ratio(3, (0.5, 0.5), 20.0) == pytest.approx(RATIO3_R20, rel=1e-12)
    assert asymptotic_ratio(4, (0.5, 0.5, 0.5), 20.0) == pytest.approx(
        RATIO4_R20, rel=1e-12
    )
    r3 = [asymptotic_ratio(3, (0.5, 0.5), r) for r in (15.0, 20.0, 25.0)]
    assert r3[0] < r3[1] < r3[2] < 1.5
    r4 = [asymptotic_ratio(4, (0.5, 0.5, 0.5), r) for r in (15.0, 20.0, 25.0)]
    assert r4[0] < r4[1] < r4[2] < 4.0 / 3.0
    with pytest.raises(ValueError, match="r_large"):
        asymptotic_ratio(3, (0.5, 0.5), 9.0)


def test_advantage_grows_with_budget_past_the_thresholds():
    # delta is not monotone near its dip at small nbar, so start at 3
    grid = np.linspace(3.0, 200.0, 60)
    configs = [
        (3, (0.5, 0.5)),
        (3, (0.5, 0.0)),
        (3, (0.3, 0.6)),
        (4, (0.5, 0.5, 0.5)),
        (4, (0.5, 0.0, 0.0)),
        (4, (0.4, 0.3, 0.2)),
    ]
    for n, taus in configs:
        deltas = [quantum_advantage(n, taus, nb) for nb in grid]
        assert all(b > a for a, b in zip(deltas, deltas[1:]))


# --- region boundaries ----------------------------------------------------------

def test_boundary_intervals_match_bisected_roots():
    cases = [
        (3, 7.0, ()),
        (3, 12.0, ()),
        (4, 15.0, ()),
        (4, 30.0, ()),
        (3, 7.0, (0.5,)),
        (3, 10.0, (0.35,)),
        (4, 15.0, (0.5,)),
        (4, 15.0, (0.5, 0.2)),
        (4, 25.0, (0.6, 0.4)),
    ]
    for n, nbar, prefix in cases:
        interval = tau_boundaries(n, nbar, prefix)
        assert not interval.empty
        axis = len(prefix)
        pad = n - 2 - axis  # zero-filled completion after the free axis

        def delta_along(t):
            return quantum_advantage(n, prefix + (t,) + (0.0,) * pad, nbar)

        if axis == 0:
            assert 0.0 < interval.lo < interval.hi < 1.0
            mid = 0.5 * (interval.lo + interval.hi)
            lo_root = bisect_root(delta_along, 0.0, mid)
            hi_root = bisect_root(delta_along, mid, 1.0)
            assert interval.lo == pytest.approx(lo_root, abs=1e-8)
            assert interval.hi == pytest.approx(hi_root, abs=1e-8)
        else:
            assert interval.lo == 0.0
            assert delta_along(interval.lo) > 0
            root = bisect_root(delta_along, interval.lo, 1.0)
            assert interval.hi == pytest.approx(root, abs=1e-8)


def test_boundary_interval_consistent_with_sign_probes():
    for n, nbar, prefix in ((3, 8.0, ()), (4, 14.0, (0.45,)), (4, 20.0, (0.5, 0.3))):
        interval = tau_boundaries(n, nbar, prefix)
        pad = n - 2 - len(prefix)
        inside = 0.5 * (interval.lo + interval.hi)
        assert quantum_advantage(n, prefix + (inside,) + (0.0,) * pad, nbar) > 0
        if interval.hi < 1.0:
            past = prefix + (interval.hi + 1e-3,) + (0.0,) * pad
            assert quantum_advantage(n, past, nbar) < 0


def test_boundary_matches_literal_formulas_at_moderate_budgets():
    # the power-form excess overflows past nbar ~ 80; agree where it exists
    for nbar in (7.0, 10.0, 20.0, 35.0, 50.0):
        lo, hi = boundary3_tau1_literal(nbar)
        interval = tau_boundaries(3, nbar)
        assert interval.lo == pytest.approx(max(lo, 0.0), rel=1e-10)
        assert interval.hi == pytest.approx(min(hi, 1.0), rel=1e-10)
        for tau1 in (0.4, 0.5, 0.6):
            hi2 = boundary3_tau2_literal(nbar, tau1)
            got = tau_boundaries(3, nbar, (tau1,))
            assert got.hi == pytest.approx(min(hi2, 1.0), rel=1e-10)
    for nbar in (13.0, 20.0, 35.0, 50.0):
        lo, hi = boundary4_tau1_literal(nbar)
        interval = tau_boundaries(4, nbar)
        assert interval.lo == pytest.approx(max(lo, 0.0), rel=1e-10)
        assert interval.hi == pytest.approx(min(hi, 1.0), rel=1e-10)
        got2 = tau_boundaries(4, nbar, (0.5,))
        assert got2.hi == pytest.approx(
            min(boundary4_tau2_literal(nbar, 0.5), 1.0), rel=1e-10
        )
        got3 = tau_boundaries(4, nbar, (0.5, 0.2))
        hi3 = boundary4_tau3_literal(nbar, 0.5, 0.2)
        if hi3 < 0.0:  # slice closed at this budget (happens at nbar = 13)
            assert got3.empty
        else:
            assert got3.hi == pytest.approx(min(hi3, 1.0), rel=1e-10)


def test_boundary_empty_exactly_below_minimum_threshold():
    for nbar in np.linspace(5.0, 5.8, 9):
        assert tau_boundaries(3, float(nbar)).empty == (nbar < MIN_TH3)
    for nbar in np.linspace(11.0, 12.0, 9):
        assert tau_boundaries(4, float(nbar)).empty == (nbar < MIN_TH4)


def test_boundary_empty_interval_is_nan():
    interval = tau_boundaries(3, 2.0)
    assert interval.empty
    assert np.isnan(interval.lo) and np.isnan(interval.hi)
    assert isinstance(interval.lo, float) and isinstance(interval.empty, bool)


def test_boundary_second_axis_widest_near_balanced_split():
    widths = {
        t1: tau_boundaries(3, 7.0, (t1,)).hi for t1 in (0.3, 0.45, 0.5, 0.55, 0.7)
    }
    assert all(widths[0.5] > widths[t] for t in widths if t != 0.5)


def test_boundary_degenerate_prefix_gives_empty_slice():
    interval = tau_boundaries(3, 7.0, (0.0,))  # first splitter closed
    assert interval.empty


def test_boundary_region_projection_grows_with_budget():
    small = tau_boundaries(3, 7.0)
    large = tau_boundaries(3, 10.0)
    assert large.lo < small.lo and large.hi > small.hi


def test_boundary_input_validation():
    with pytest.raises(ValueError, match="3- and 4-mode"):
        tau_boundaries(5, 7.0)
    with pytest.raises(ValueError, match="pins every"):
        tau_boundaries(3, 7.0, (0.5, 0.5))
    with pytest.raises(ValueError, match="nbar"):
        tau_boundaries(3, 0.0)
    with pytest.raises(ValueError, match="lie in"):
        tau_boundaries(3, 7.0, (1.5,))


# --- region scans ---------------------------------------------------------------

def test_region_scan_grid_layout():
    scan = region_scan(3, 7.0, 20)
    assert scan.n_points == 400
    assert scan.taus.shape == (400, 2)
    rows = [tuple(r) for r in scan.taus]
    assert rows == sorted(rows)  # lexicographic, first axis slowest
    assert_allclose(np.unique(scan.taus[:, 0]), np.linspace(0.0, 1.0, 20))
    assert not scan.taus.flags.writeable


def test_region_scan_flags_and_counts():
    below = region_scan(3, 5.0, 20)
    assert below.n_advantage == 0
    above = region_scan(3, 7.0, 64)
    assert above.n_advantage > 0
    hits = above.taus[above.flags]
    near_balanced = (np.abs(hits[:, 0] - 0.5) < 0.05) & (hits[:, 1] < 0.1)
    assert near_balanced.any()
    assert np.all(above.deltas[above.flags] > 0)
    assert np.all(above.deltas[~above.flags] <= 0)


def test_region_scan_nesting_in_budget():
    low = region_scan(3, 7.0, 32)
    high = region_scan(3, 10.0, 32)
    assert np.all(low.flags <= high.flags)
    assert high.n_advantage > low.n_advantage


def test_region_scan_four_modes():
    assert region_scan(4, 11.0, 12).n_advantage == 0
    scan = region_scan(4, 15.0, 12)
    assert scan.taus.shape == (12**3, 3)
    assert scan.n_advantage > 0


def test_region_scan_validation_and_strict_flags():
    with pytest.raises(ValueError, match="grid_resolution"):
        region_scan(3, 7.0, 4)
    with pytest.raises(ValueError, match="nbar"):
        region_scan(3, -1.0, 16)
    good = region_scan(3, 7.0, 8)
    with pytest.raises(ValueError, match="flags"):
        RegionScan(
            n_modes=3,
            nbar=7.0,
            grid_resolution=8,
            taus=good.taus.copy(),
            deltas=good.deltas.copy(),
            flags=~good.flags,
        )
