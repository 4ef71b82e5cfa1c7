"""Delay-Doppler / time-frequency grids and the 2D transform pair between them.

The delay-Doppler (DD) grid holds N x M symbols indexed ``[k, l]`` with
Doppler bin ``k`` along rows and delay bin ``l`` along columns.  The
time-frequency (TF) grid holds N x M samples indexed ``[n, m]`` with time
slot ``n`` along rows and subcarrier ``m`` along columns.  The two domains
are connected by the inverse/forward symplectic finite Fourier transforms:

    X[n, m] = (NM)^(-1/2) sum_k sum_l x[k, l] exp(+j2pi nk/N) exp(-j2pi ml/M)
    y[k, l] = (NM)^(-1/2) sum_n sum_m Y[n, m] exp(-j2pi kn/N) exp(+j2pi lm/M)

Both transforms are unitary and mutually inverse.  They are evaluated with
FFTs along each axis, which reproduces the double sums exactly up to float
rounding.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "GridDims",
    "DDGrid",
    "TFGrid",
    "isfft",
    "sfft",
    "apply_tf_window",
]


@dataclass(frozen=True)
class GridDims:
    """Dimensions of one frame: N Doppler bins / time slots, M delay bins /
    subcarriers, and the subcarrier spacing.  The slot duration is tied to
    the subcarrier spacing by T * df = 1 (critically sampled grid)."""

    n_doppler: int
    m_delay: int
    subcarrier_spacing_hz: float = 5e3

    def __post_init__(self) -> None:
        if self.n_doppler < 1 or self.m_delay < 1:
            raise ValueError("grid dimensions must be positive")
        if self.subcarrier_spacing_hz <= 0:
            raise ValueError("subcarrier spacing must be positive")

    @property
    def slot_duration_s(self) -> float:
        return 1.0 / self.subcarrier_spacing_hz

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_doppler, self.m_delay)

    @property
    def bandwidth_hz(self) -> float:
        return self.m_delay * self.subcarrier_spacing_hz

    @property
    def frame_duration_s(self) -> float:
        return self.n_doppler * self.slot_duration_s


def _as_grid_values(dims: GridDims, values: np.ndarray) -> np.ndarray:
    values = np.asarray(values, dtype=np.complex128)
    if values.shape != dims.shape:
        raise ValueError(
            f"grid values have shape {values.shape}, expected {dims.shape}"
        )
    if not np.all(np.isfinite(values.view(np.float64))):
        raise ValueError("grid values must be finite")
    values = values.copy()
    values.flags.writeable = False
    return values


@dataclass(frozen=True)
class DDGrid:
    """N x M complex symbols in the delay-Doppler domain, indexed [k, l]."""

    dims: GridDims
    values: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", _as_grid_values(self.dims, self.values))

    @classmethod
    def zeros(cls, dims: GridDims) -> "DDGrid":
        return cls(dims, np.zeros(dims.shape, dtype=np.complex128))

    def energy(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2))


@dataclass(frozen=True)
class TFGrid:
    """N x M complex samples in the time-frequency domain, indexed [n, m]."""

    dims: GridDims
    values: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", _as_grid_values(self.dims, self.values))

    @classmethod
    def zeros(cls, dims: GridDims) -> "TFGrid":
        return cls(dims, np.zeros(dims.shape, dtype=np.complex128))

    def energy(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2))


def isfft(x: DDGrid) -> TFGrid:
    """Map a DD grid to the TF domain (inverse symplectic FFT).

    Implements ``X[n,m] = (NM)^(-1/2) sum_{k,l} x[k,l] e^{j2pi(nk/N - ml/M)}``:
    an inverse DFT along the Doppler axis and a forward DFT along the delay
    axis, with the unitary 1/sqrt(NM) factor kept inside the transform.
    """
    n, m = x.dims.shape
    out = np.fft.fft(np.fft.ifft(x.values, axis=0), axis=1) * np.sqrt(n / m)
    return TFGrid(x.dims, out)


def sfft(y_tf: TFGrid) -> DDGrid:
    """Map a TF grid back to the DD domain (symplectic FFT).

    Implements ``y[k,l] = (NM)^(-1/2) sum_{n,m} Y[n,m] e^{-j2pi(kn/N - lm/M)}``,
    the exact inverse of :func:`isfft`.
    """
    n, m = y_tf.dims.shape
    out = np.fft.ifft(np.fft.fft(y_tf.values, axis=0), axis=1) * np.sqrt(m / n)
    return DDGrid(y_tf.dims, out)


def apply_tf_window(g: TFGrid, win) -> TFGrid:
    """Point-wise multiply a TF grid by a separable window.

    ``out[n,m] = win.doppler[n] * win.delay[m] * g[n,m]``.
    """
    n, m = g.dims.shape
    if len(win.doppler) != n or len(win.delay) != m:
        raise ValueError(
            f"window axes ({len(win.doppler)}, {len(win.delay)}) do not match "
            f"grid dims {g.dims.shape}"
        )
    out = g.values * np.outer(win.doppler, win.delay)
    return TFGrid(g.dims, out)
