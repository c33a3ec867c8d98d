"""Quantum advantage: classical benchmark, thresholds, region geometry.

The benchmark is the best classical strategy at the same photon budget:
n_senders independent coherent-state channels sharing nbar photons. The
advantage delta(taus, nbar) = C_quantum - C_classical is negative at
small nbar (squeezing photons are pure overhead there) and grows without
bound, so each network has a threshold photon number where delta crosses
zero, and for fixed nbar the set {taus : delta > 0} is a bounded region
whose axis-aligned boundaries have closed forms for 3- and 4-mode chains.

All closed forms here are written against logs of the determinant
factors. The textbook-style expanded expressions contain nbar^(2 nbar)
powers that overflow beyond nbar ~ 75 even though every final result is
modest; the log forms are algebraically identical and safe everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from .dc_protocol import capacity, channel_matrix_batch

__all__ = [
    "SEARCH_CAP_NBAR",
    "BISECT_TOL",
    "COARSE_RESOLUTION",
    "TIE_TOL",
    "NoAdvantageError",
    "TauInterval",
    "MinThresholdResult",
    "RegionScan",
    "classical_capacity",
    "quantum_advantage",
    "threshold_energy",
    "min_threshold_energy",
    "tau_boundaries",
    "break_even_squeezing",
    "asymptotic_ratio",
    "region_scan",
]

SEARCH_CAP_NBAR = 1e4     # photon budgets beyond this are treated as "never"
BISECT_TOL = 1e-6         # absolute nbar tolerance for threshold roots
COARSE_RESOLUTION = 64    # grid axis size for the global threshold search
TIE_TOL = 1e-4            # coarse-grid thresholds within this of the best are ties


class NoAdvantageError(RuntimeError):
    """No photon budget up to the search cap yields a positive advantage."""

    def __init__(self, message: str, search_cap: float = SEARCH_CAP_NBAR):
        super().__init__(message)
        self.search_cap = float(search_cap)


def classical_capacity(n_senders: int, nbar):
    """Best classical rate for n_senders coherent channels sharing nbar.

    Equals n_senders * [(1+x) ln(1+x) - x ln x] with x = nbar/n_senders,
    evaluated as n_senders * [x ln(1 + 1/x) + ln(1 + x)]; the two are
    identical algebraically but the first cancels catastrophically for
    x beyond ~1e15. Continuous extension 0 at nbar = 0. Accepts a scalar
    or an array of budgets.
    """
    if n_senders < 1:
        raise ValueError(f"need at least one sender, got {n_senders}")
    arr = np.asarray(nbar, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr < 0):
        raise ValueError("photon budgets must be finite and >= 0")
    x = arr / n_senders
    with np.errstate(divide="ignore", invalid="ignore"):
        val = n_senders * (x * np.log1p(1.0 / x) + np.log1p(x))
    val = np.where(x > 0, val, 0.0)
    return float(val) if arr.ndim == 0 else val


def _signal_gain(n_modes: int, nbar):
    """e^{2r} sigma^2 at the optimal working point: the single scalar the
    channel determinant depends on besides the transmissivities."""
    nb = np.asarray(nbar, dtype=float)
    gain = 2.0 * nb * (nb + n_modes - 1) / ((n_modes - 1) * n_modes)
    return float(gain) if nb.ndim == 0 else gain


def _grams(n_modes: int, taus_grid: np.ndarray) -> np.ndarray:
    m = channel_matrix_batch(n_modes, taus_grid)
    return np.einsum("gij,gkj->gik", m, m)


def _delta_batch(n_modes: int, grams: np.ndarray, nbar) -> np.ndarray:
    """delta = C_quantum - C_classical for stacked channel Grams.

    nbar may be a scalar (shared budget) or one budget per Gram.
    """
    gain = np.asarray(_signal_gain(n_modes, nbar), dtype=float)
    eye = np.eye(n_modes)
    mats = eye + gain[..., None, None] * grams
    _, logdet = np.linalg.slogdet(mats)
    return 0.5 * logdet - classical_capacity(n_modes - 1, nbar)


def _validated_taus(n_modes: int, taus) -> tuple[float, ...]:
    out = tuple(float(t) for t in taus)
    if len(out) != n_modes - 1:
        raise ValueError(f"{n_modes}-mode chain needs {n_modes - 1} transmissivities")
    for t in out:
        if not 0.0 <= t <= 1.0:
            raise ValueError(f"transmissivity must lie in [0, 1], got {t}")
    return out


def quantum_advantage(n_modes: int, taus: Sequence[float], nbar: float) -> float:
    """delta(taus, nbar) = C_quantum - C_classical in nats."""
    return capacity(n_modes, _validated_taus(n_modes, taus), nbar).delta


def threshold_energy(
    n_modes: int, taus: Sequence[float], tol: float = BISECT_TOL
) -> float:
    """Photon budget where the advantage turns positive for fixed taus.

    Brackets the root inside [1e-6, SEARCH_CAP_NBAR] by geometric
    expansion, then bisects to absolute tolerance tol. delta is strictly
    increasing in nbar over the relevant range, so the root is unique.
    Raises NoAdvantageError if delta never turns positive below the cap.
    """
    taus = _validated_taus(n_modes, taus)
    gram = _grams(n_modes, np.array([taus]))

    def delta(nb: float) -> float:
        return float(_delta_batch(n_modes, gram, nb)[0])

    if delta(SEARCH_CAP_NBAR) <= 0.0:
        raise NoAdvantageError(
            f"no quantum advantage up to nbar = {SEARCH_CAP_NBAR:g} "
            f"for {n_modes}-mode taus {taus}"
        )
    lo = 1e-6
    if delta(lo) > 0.0:  # root sits below the floor of the search range
        return lo
    hi = 2.0 * lo
    while hi < SEARCH_CAP_NBAR and delta(hi) <= 0.0:
        lo = hi
        hi *= 2.0
    hi = min(hi, SEARCH_CAP_NBAR)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if delta(mid) > 0.0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class MinThresholdResult:
    """Global minimum threshold budget and where it is attained.

    ties lists the coarse-grid points whose thresholds came within
    TIE_TOL of the best one (symmetric minima show up here). Iterating
    yields (nbar_th, taus) for tuple-style unpacking.
    """

    nbar_th: float
    taus: tuple[float, ...]
    ties: tuple[tuple[float, ...], ...]

    def __iter__(self):
        yield self.nbar_th
        yield self.taus


def min_threshold_energy(
    n_modes: int, grid_resolution: int = COARSE_RESOLUTION
) -> MinThresholdResult:
    """Minimize the threshold budget over all chain transmissivities.

    Stage 1 solves the threshold root for every point of a full
    grid_resolution^(n-1) grid at once (shared vector bisection over the
    stacked channel Grams). Stage 2 polishes the best grid point with
    bounds-respecting Nelder-Mead. Grid points that never reach a
    positive advantage are left out; if none do, NoAdvantageError.
    """
    if grid_resolution < 8:
        raise ValueError("grid_resolution must be at least 8")
    axes = [np.linspace(0.0, 1.0, grid_resolution)] * (n_modes - 1)
    mesh = np.meshgrid(*axes, indexing="ij")
    taus_grid = np.stack([m.ravel() for m in mesh], axis=1)
    grams = _grams(n_modes, taus_grid)

    alive = _delta_batch(n_modes, grams, SEARCH_CAP_NBAR) > 0.0
    if not alive.any():
        raise NoAdvantageError(
            f"no transmissivity choice gives an advantage below "
            f"nbar = {SEARCH_CAP_NBAR:g} for {n_modes} modes"
        )
    g_alive = grams[alive]
    lo = np.full(g_alive.shape[0], 1e-6)
    hi = np.full(g_alive.shape[0], SEARCH_CAP_NBAR)
    for _ in range(50):  # 1e4 / 2^50 ~ 1e-11, well past BISECT_TOL
        mid = 0.5 * (lo + hi)
        above = _delta_batch(n_modes, g_alive, mid) > 0.0
        hi = np.where(above, mid, hi)
        lo = np.where(above, lo, mid)
    thresholds = np.full(taus_grid.shape[0], np.inf)
    thresholds[alive] = 0.5 * (lo + hi)

    best = int(np.argmin(thresholds))
    best_nbar = float(thresholds[best])
    tie_mask = thresholds <= best_nbar + TIE_TOL
    ties = tuple(tuple(row) for row in taus_grid[tie_mask])

    def objective(t: np.ndarray) -> float:
        try:
            return threshold_energy(n_modes, np.clip(t, 0.0, 1.0), tol=1e-9)
        except NoAdvantageError:
            return np.inf

    res = minimize(
        objective,
        x0=taus_grid[best],
        method="Nelder-Mead",
        bounds=[(0.0, 1.0)] * (n_modes - 1),
        options={"xatol": 1e-6, "fatol": 1e-9},
    )
    if np.isfinite(res.fun) and res.fun < best_nbar:
        return MinThresholdResult(float(res.fun), tuple(float(v) for v in res.x), ties)
    return MinThresholdResult(best_nbar, tuple(taus_grid[best]), ties)


@dataclass(frozen=True)
class TauInterval:
    """One axis-aligned slice of the advantage region.

    empty means no value of the free transmissivity gives an advantage
    (lo and hi are NaN then); clamped means the analytic boundary fell
    outside [0, 1] and was cut back to the physical range.
    """

    lo: float
    hi: float
    empty: bool
    clamped: bool


def _interval(lo: float, hi: float) -> TauInterval:
    lo, hi = float(lo), float(hi)
    if not hi >= lo:
        return TauInterval(np.nan, np.nan, empty=True, clamped=False)
    clamped = bool(lo < 0.0 or hi > 1.0)
    lo_c, hi_c = max(lo, 0.0), min(hi, 1.0)
    if hi_c < lo_c:
        return TauInterval(np.nan, np.nan, empty=True, clamped=True)
    return TauInterval(lo_c, hi_c, empty=False, clamped=clamped)


def _degenerate_interval(n_modes: int, prefix: tuple[float, ...], nbar) -> TauInterval:
    # the free tau has no effect here; the region slice is all or nothing
    axis = len(prefix)
    probe = prefix + (0.0,) * (n_modes - 1 - axis)
    gram = _grams(n_modes, np.array([probe]))
    if float(_delta_batch(n_modes, gram, nbar)[0]) > 0.0:
        return TauInterval(0.0, 1.0, empty=False, clamped=False)
    return TauInterval(np.nan, np.nan, empty=True, clamped=False)


def tau_boundaries(
    n_modes: int, nbar: float, fixed_prefix: Sequence[float] = ()
) -> TauInterval:
    """Closed-form extent of the advantage region along one tau axis.

    With the first len(fixed_prefix) transmissivities pinned, returns
    the interval of the next one for which some completion of the chain
    has delta > 0. Later transmissivities only ever shrink the
    advantage, so "some completion" means "the all-zeros completion",
    and the interval is exactly the region's projection onto this axis
    through the prefix. Implemented for 3- and 4-mode chains.
    """
    if n_modes not in (3, 4):
        raise ValueError("closed-form boundaries cover 3- and 4-mode chains only")
    if not np.isfinite(nbar) or nbar <= 0.0:
        raise ValueError(f"nbar must be finite and > 0, got {nbar}")
    prefix = tuple(float(t) for t in fixed_prefix)
    if len(prefix) >= n_modes - 1:
        raise ValueError("fixed_prefix pins every transmissivity; none left to bound")
    for t in prefix:
        if not 0.0 <= t <= 1.0:
            raise ValueError(f"transmissivity must lie in [0, 1], got {t}")

    g = _signal_gain(n_modes, nbar)
    log_excess = 2.0 * classical_capacity(n_modes - 1, nbar)
    # the receiver-side factor (1 + 2g) appears once for 3 modes, twice for 4
    tail_logs = (n_modes - 2) * np.log1p(2.0 * g)
    axis = len(prefix)

    if axis == 0:
        # symmetric bounds 1/2 +- sqrt(disc)/(2g) around the balanced split
        disc = (1.0 + g) ** 2 - np.exp(log_excess - tail_logs)
        if disc < 0.0:
            return TauInterval(np.nan, np.nan, empty=True, clamped=False)
        half_width = np.sqrt(disc) / (2.0 * g)
        return _interval(0.5 - half_width, 0.5 + half_width)

    if axis == 1:
        tau1 = prefix[0]
        if g * tau1 == 0.0:
            return _degenerate_interval(n_modes, prefix, nbar)
        excess = np.exp(log_excess - tail_logs - np.log1p(2.0 * g * (1.0 - tau1)))
        return _interval(0.0, 1.0 + (1.0 - excess) / (2.0 * g * tau1))

    # axis == 2, four-mode chain
    tau1, tau2 = prefix
    shared = 1.0 + 2.0 * g * (1.0 - tau1)
    slope = 2.0 * g * (shared - tau1 * (1.0 - tau2))
    if slope <= 0.0:
        return _degenerate_interval(n_modes, prefix, nbar)
    excess = np.exp(
        log_excess - np.log1p(2.0 * g) - np.log1p(2.0 * g * tau1 * (1.0 - tau2))
    )
    return _interval(0.0, (shared * (1.0 + 2.0 * g) - excess) / slope)


def break_even_squeezing(n_modes: int, taus: Sequence[float]) -> float:
    """Squeezing strength in use exactly at the threshold budget: the
    optimal r evaluated at threshold_energy(n_modes, taus)."""
    from .dc_protocol import optimal_params

    return optimal_params(n_modes, threshold_energy(n_modes, taus)).r


def asymptotic_ratio(n_modes: int, taus: Sequence[float], r_large: float) -> float:
    """C_quantum / C_classical at the budget nbar = (n-1) e^r sinh r.

    At that budget the optimal squeezing equals r_large itself. The
    ratio approaches n/(n-1) from below as r grows; the approach is
    slow, the gap falls off like 1/r.
    """
    if r_large < 10.0:
        raise ValueError("asymptotic regime starts at r_large >= 10")
    taus = _validated_taus(n_modes, taus)
    nbar = (n_modes - 1) * np.expm1(2.0 * r_large) / 2.0
    report = capacity(n_modes, taus, nbar)
    return report.c_quantum / report.c_classical


@dataclass(frozen=True)
class RegionScan:
    """delta evaluated over a full lexicographic tau grid at one budget."""

    n_modes: int
    nbar: float
    grid_resolution: int
    taus: np.ndarray     # (G, n_modes - 1)
    deltas: np.ndarray   # (G,), nats
    flags: np.ndarray    # (G,), bool, flags == (deltas > 0)

    def __post_init__(self):
        taus = np.asarray(self.taus, dtype=float)
        deltas = np.asarray(self.deltas, dtype=float)
        flags = np.asarray(self.flags, dtype=bool)
        g = taus.shape[0]
        if taus.shape != (g, self.n_modes - 1):
            raise ValueError(f"taus shape {taus.shape} inconsistent with n_modes")
        if deltas.shape != (g,) or flags.shape != (g,):
            raise ValueError("deltas/flags length mismatch")
        if not np.array_equal(flags, deltas > 0):
            raise ValueError("flags must equal (deltas > 0) exactly")
        for arr in (taus, deltas, flags):
            arr.flags.writeable = False
        object.__setattr__(self, "nbar", float(self.nbar))
        object.__setattr__(self, "taus", taus)
        object.__setattr__(self, "deltas", deltas)
        object.__setattr__(self, "flags", flags)

    @property
    def n_points(self) -> int:
        return self.taus.shape[0]

    @property
    def n_advantage(self) -> int:
        return int(np.count_nonzero(self.flags))


def region_scan(n_modes: int, nbar: float, grid_resolution: int) -> RegionScan:
    """Evaluate delta on the full [0,1]^(n-1) grid, lexicographic order.

    Rows are ordered with the first transmissivity slowest, matching
    sorted-tuple order, so serialized scans are directly comparable.
    """
    if grid_resolution < 8:
        raise ValueError("grid_resolution must be at least 8")
    if not np.isfinite(nbar) or nbar < 0.0:
        raise ValueError(f"nbar must be finite and >= 0, got {nbar}")
    axes = [np.linspace(0.0, 1.0, grid_resolution)] * (n_modes - 1)
    mesh = np.meshgrid(*axes, indexing="ij")
    taus_grid = np.stack([m.ravel() for m in mesh], axis=1)
    deltas = _delta_batch(n_modes, _grams(n_modes, taus_grid), nbar)
    return RegionScan(
        n_modes=n_modes,
        nbar=nbar,
        grid_resolution=grid_resolution,
        taus=taus_grid,
        deltas=deltas,
        flags=deltas > 0,
    )
