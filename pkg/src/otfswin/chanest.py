"""Embedded-pilot channel estimation and its interference/error-floor analysis.

A single pilot of power |x_p|^2 sits at (k_p, l_p) inside a zeroed guard
rectangle: Doppler rows k_p +/- (2 k_max + 2 k_hat) (wrapped modulo N) by
delay columns l_p +/- l_max (not wrapped; rejected at configuration time if
the span would leave the grid).  The estimator reads the received window
k_p +/- (k_max + k_hat) by [l_p, l_p + l_max] and thresholds:

    h_hat[k - k_p, l - l_p] = y[k, l] / x_p   if |y[k, l]| >= 3 sqrt(N0)
                              0               otherwise.

Data symbols outside the guard leak into the window whenever fractional
Doppler spreads the effective channel, producing an interference term whose
power sets the high-SNR error floor

    MSE_floor = (N - 4 k_max - 4 k_hat - 1) (2 k_max + 2 k_hat + 1)
                (l_max + 1) SL^2 / |x_p|^2

with SL the window's sidelobe level (1/N for the rectangular window's
sidelobe plateau, the measured peak sidelobe otherwise).  The estimation
MSE is a *sum* over the window cells, not a mean; per-cell means are
offered separately as a convenience.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channel import DDChannel, EffectiveChannel
from .grids import DDGrid, GridDims
from .windows import SeparableWindow, doppler_filter_response

__all__ = [
    "PilotConfig",
    "EstimationReport",
    "centered_pilot",
    "embed_pilot",
    "estimate",
    "empirical_mse",
    "empirical_mse_per_cell",
    "interference_exact",
    "interference_power_exact",
    "interference_power_approx",
    "mse_floor",
    "mse_floor_per_cell",
    "khat_mse_trend",
    "KhatTrend",
]


@dataclass(frozen=True)
class PilotConfig:
    """Pilot placement and guard geometry.

    ``k_hat`` is the extra Doppler guard on top of the 2*k_max needed for
    integer Doppler; it may not exceed floor((N - 4 k_max - 1) / 4) so the
    guard fits the grid.
    """

    k_p: int
    l_p: int
    pilot_power: float
    k_max: int
    l_max: int
    k_hat: int = 0

    def __post_init__(self) -> None:
        if self.pilot_power <= 0:
            raise ValueError("pilot power must be positive")
        if self.k_max < 0 or self.l_max < 0 or self.k_hat < 0:
            raise ValueError("guard parameters must be non-negative")

    def validate_against(self, dims: GridDims) -> None:
        n, m = dims.shape
        max_khat = (n - 4 * self.k_max - 1) // 4
        if max_khat < 0 or self.k_hat > max_khat:
            raise ValueError(
                f"k_hat={self.k_hat} exceeds floor((N-4k_max-1)/4)={max_khat}"
            )
        if not 0 <= self.k_p < n or not 0 <= self.l_p < m:
            raise ValueError("pilot cell outside the grid")
        if self.l_p - self.l_max < 0 or self.l_p + self.l_max >= m:
            raise ValueError("delay guard would wrap around the grid edge")

    @property
    def pilot_amplitude(self) -> float:
        return float(np.sqrt(self.pilot_power))

    @property
    def doppler_guard_halfwidth(self) -> int:
        return 2 * self.k_max + 2 * self.k_hat

    @property
    def window_doppler_halfwidth(self) -> int:
        return self.k_max + self.k_hat

    @property
    def overhead_symbols(self) -> int:
        return (2 * self.l_max + 1) * (4 * self.k_max + 4 * self.k_hat + 1)

    def guard_rows(self, n_doppler: int) -> list[int]:
        """Doppler guard set K, wrapped modulo N."""
        g = self.doppler_guard_halfwidth
        return sorted({(self.k_p + d) % n_doppler for d in range(-g, g + 1)})

    def data_rows(self, n_doppler: int) -> list[int]:
        guard = set(self.guard_rows(n_doppler))
        return [k for k in range(n_doppler) if k not in guard]

    def window_offsets(self):
        """Signed (dk, dl) offsets of the estimation window cells relative to
        the pilot: dk in [-(k_max+k_hat), k_max+k_hat], dl in [0, l_max]."""
        w = self.window_doppler_halfwidth
        return [
            (dk, dl)
            for dk in range(-w, w + 1)
            for dl in range(self.l_max + 1)
        ]


@dataclass(frozen=True)
class EstimationReport:
    """Thresholded estimate over the window, keyed by signed pilot-relative
    offsets, plus bookkeeping filled in by the experiment runner."""

    estimate: dict = field(repr=False)
    overhead_symbols: int
    empirical_mse: float | None = None
    analytic_floor: float | None = None


def centered_pilot(
    dims: GridDims,
    pilot_power: float,
    k_max: int,
    l_max: int,
    k_hat: int = 0,
) -> PilotConfig:
    """Default placement at the grid center, keeping the delay guard away
    from the wrap-around edge."""
    cfg = PilotConfig(
        k_p=dims.n_doppler // 2,
        l_p=dims.m_delay // 2,
        pilot_power=pilot_power,
        k_max=k_max,
        l_max=l_max,
        k_hat=k_hat,
    )
    cfg.validate_against(dims)
    return cfg


def embed_pilot(data: DDGrid, cfg: PilotConfig) -> DDGrid:
    """Overwrite the guard rectangle of a data grid with zeros and place the
    pilot sqrt(|x_p|^2) at (k_p, l_p); cells outside the guard are untouched."""
    cfg.validate_against(data.dims)
    n, _ = data.dims.shape
    out = data.values.copy()
    rows = cfg.guard_rows(n)
    cols = slice(cfg.l_p - cfg.l_max, cfg.l_p + cfg.l_max + 1)
    out[np.ix_(rows, range(cols.start, cols.stop))] = 0.0
    out[cfg.k_p, cfg.l_p] = cfg.pilot_amplitude
    return DDGrid(data.dims, out)


def estimate(rx: DDGrid, cfg: PilotConfig, noise_variance: float) -> EstimationReport:
    """Threshold estimator over the estimation window of a received frame."""
    if noise_variance < 0:
        raise ValueError("noise variance must be non-negative")
    cfg.validate_against(rx.dims)
    n, _ = rx.dims.shape
    threshold = 3.0 * np.sqrt(noise_variance)
    amp = cfg.pilot_amplitude
    est: dict[tuple[int, int], complex] = {}
    for dk, dl in cfg.window_offsets():
        y = rx.values[(cfg.k_p + dk) % n, cfg.l_p + dl]
        est[(dk, dl)] = complex(y / amp) if abs(y) >= threshold else 0.0j
    return EstimationReport(estimate=est, overhead_symbols=cfg.overhead_symbols)


def empirical_mse(
    true_heff: EffectiveChannel, report: EstimationReport, cfg: PilotConfig
) -> float:
    """Squared estimation error summed over the window cells (a sum, not a
    mean), comparing against the circularly indexed true kernel."""
    if set(report.estimate) != set(cfg.window_offsets()):
        raise ValueError("report window does not match the pilot configuration")
    total = 0.0
    for (dk, dl), h_hat in report.estimate.items():
        total += abs(true_heff.tap(dk, dl) - h_hat) ** 2
    return float(total)


def empirical_mse_per_cell(
    true_heff: EffectiveChannel, report: EstimationReport, cfg: PilotConfig
) -> float:
    """Convenience per-cell mean of :func:`empirical_mse` (not part of the
    windowed-estimation analysis, which sums)."""
    return empirical_mse(true_heff, report, cfg) / len(report.estimate)


def interference_exact(
    x: DDGrid, heff: EffectiveChannel, cfg: PilotConfig, k: int, l: int
) -> complex:
    """Data-symbol interference reaching window cell (k, l):

    I[k, l] = sum_{k' not in K} sum_{l'=0}^{l_max}
              x[k', (l - l')_M] h_w[(k - k')_N, l'].
    """
    cfg.validate_against(x.dims)
    n, m = x.dims.shape
    dk = (k - cfg.k_p) % n
    if dk > cfg.window_doppler_halfwidth and n - dk > cfg.window_doppler_halfwidth:
        raise ValueError("Doppler index outside the estimation window")
    if not cfg.l_p <= l <= cfg.l_p + cfg.l_max:
        raise ValueError("delay index outside the estimation window")
    total = 0.0 + 0.0j
    for kp in cfg.data_rows(n):
        for lag in range(cfg.l_max + 1):
            total += x.values[kp, (l - lag) % m] * heff.tap(k - kp, lag)
    return complex(total)


def _require_rect_delay(tx: SeparableWindow, rx: SeparableWindow) -> None:
    if not (tx.has_rectangular_delay_axis() and rx.has_rectangular_delay_axis()):
        raise ValueError("interference power analysis assumes rectangular delay windows")


def interference_power_exact(
    ch: DDChannel,
    tx: SeparableWindow,
    rx: SeparableWindow,
    cfg: PilotConfig,
    k: int,
) -> float:
    """Expected interference power at window row k, averaging over the data
    symbols (unit power, uncorrelated) and the path-gain ensemble:

    E|I|^2 = sum_{k' not in K} sum_i E|h_i|^2 |G_N((k-k')_N - k_i - kappa_i)|^2.
    """
    _require_rect_delay(tx, rx)
    cfg.validate_against(ch.dims)
    n = ch.dims.n_doppler
    total = 0.0
    for kp in cfg.data_rows(n):
        d = (k - kp) % n
        for p in ch.paths:
            g = doppler_filter_response(tx, rx, d - p.doppler_shift_bins)
            total += p.power * abs(g) ** 2
    return float(total)


def interference_power_approx(
    cfg: PilotConfig, dims: GridDims, sidelobe_level: float
) -> float:
    """Sidelobe-plateau approximation of the interference power:

    E|I|^2 ~= (N - 4 k_max - 4 k_hat - 1) SL^2.
    """
    if not 0 < sidelobe_level <= 1:
        raise ValueError("sidelobe level must be a linear value in (0, 1]")
    n = dims.n_doppler
    return (
        max(n - 4 * cfg.k_max - 4 * cfg.k_hat - 1, 0) * sidelobe_level**2
    )


def mse_floor(cfg: PilotConfig, dims: GridDims, sidelobe_level: float) -> float:
    """High-SNR estimation error floor: the plateau interference power summed
    over the window cells and divided by the pilot power."""
    per_cell = interference_power_approx(cfg, dims, sidelobe_level)
    n_cells = (2 * cfg.k_max + 2 * cfg.k_hat + 1) * (cfg.l_max + 1)
    return per_cell * n_cells / cfg.pilot_power


def mse_floor_per_cell(
    cfg: PilotConfig, dims: GridDims, sidelobe_level: float
) -> float:
    """Per-cell mean variant of :func:`mse_floor` (convenience only)."""
    n_cells = (2 * cfg.k_max + 2 * cfg.k_hat + 1) * (cfg.l_max + 1)
    return mse_floor(cfg, dims, sidelobe_level) / n_cells


@dataclass(frozen=True)
class KhatTrend:
    """Floor-vs-extra-guard table.  ``regime_boundary`` = (N - 8 k_max - 3)/4:
    non-positive means the floor only falls as k_hat grows; at or above one
    the floor first rises, peaks, then falls."""

    rows: tuple
    regime_boundary: float


def khat_mse_trend(
    dims: GridDims,
    k_max: int,
    l_max: int,
    sidelobe_level: float,
    pilot_power: float = 1.0,
    k_p: int | None = None,
    l_p: int | None = None,
) -> KhatTrend:
    """Tabulate (k_hat, overhead_symbols, mse_floor) over every admissible
    extra-guard value."""
    n = dims.n_doppler
    max_khat = (n - 4 * k_max - 1) // 4
    if max_khat < 0:
        raise ValueError("grid too small for this k_max")
    rows = []
    for k_hat in range(max_khat + 1):
        cfg = PilotConfig(
            k_p=dims.n_doppler // 2 if k_p is None else k_p,
            l_p=dims.m_delay // 2 if l_p is None else l_p,
            pilot_power=pilot_power,
            k_max=k_max,
            l_max=l_max,
            k_hat=k_hat,
        )
        cfg.validate_against(dims)
        rows.append((k_hat, cfg.overhead_symbols, mse_floor(cfg, dims, sidelobe_level)))
    boundary = (n - 8 * k_max - 3) / 4.0
    return KhatTrend(rows=tuple(rows), regime_boundary=boundary)
