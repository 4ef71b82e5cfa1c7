"""Separable TX/RX window synthesis and their delay-Doppler filter responses.

A TF-domain window ``W[n, m] = W_dopp[n] * W_delay[m]`` shapes the effective
channel through the product of the TX and RX weights.  The induced DD-domain
filter separates into a Doppler response

    G_N(v) = (1/N) sum_n V[n] U[n] exp(-j2pi n v / N)

and a delay response

    F_M(u) = (1/M) sum_m V[m] U[m] exp(+j2pi m u / M),

both periodic (period N and M respectively) and evaluated at real-valued
fractional offsets.  All built-in windows are normalized to unit DC gain on
the Doppler axis, (1/N) sum_n w[n] = 1, so that G_N(0) = 1 and sidelobe
levels are directly comparable across window kinds.

The delay axis is always rectangular here; shaping happens on the Doppler
axis only, where fractional Doppler causes the leakage worth suppressing.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.signal.windows import chebwin

from .grids import GridDims

__all__ = [
    "SeparableWindow",
    "DCWindowSpec",
    "WindowScan",
    "rectangular_window",
    "sine_window",
    "dc_window",
    "custom_window",
    "dc_sidelobe_for_mainlobe",
    "doppler_filter_response",
    "delay_filter_response",
    "rect_doppler_response",
    "rect_delay_response",
    "noise_filter_vz",
    "noise_filter_table",
    "ideal_window_response",
    "scan_doppler_response",
    "window_response_rows",
]

RECTANGULAR = "rectangular"
SINE = "sine"
DOLPH_CHEBYSHEV = "dolph-chebyshev"
CUSTOM = "custom"


@dataclass(frozen=True)
class DCWindowSpec:
    """Dolph-Chebyshev design point: sidelobe level (dB, negative) and the
    mainlobe width in Doppler bins it trades against."""

    sidelobe_level_db: float
    mainlobe_width_bins: float

    def __post_init__(self) -> None:
        if self.sidelobe_level_db >= 0:
            raise ValueError("sidelobe level must be negative (dB)")
        if self.mainlobe_width_bins <= 1:
            raise ValueError("mainlobe width must exceed one bin")


@dataclass(frozen=True)
class SeparableWindow:
    """Per-axis window weights: Doppler axis (length N) and delay axis
    (length M).  Immutable after construction."""

    doppler: np.ndarray = field(repr=False)
    delay: np.ndarray = field(repr=False)
    kind: str = CUSTOM

    def __post_init__(self) -> None:
        dopp = np.asarray(self.doppler, dtype=np.complex128).copy()
        dely = np.asarray(self.delay, dtype=np.complex128).copy()
        for v in (dopp, dely):
            if v.ndim != 1 or v.size == 0:
                raise ValueError("window axes must be non-empty 1D vectors")
            if not np.all(np.isfinite(v.view(np.float64))):
                raise ValueError("window weights must be finite")
        if self.kind == RECTANGULAR and not (
            np.all(dopp == 1.0) and np.all(dely == 1.0)
        ):
            raise ValueError("rectangular window must have all-ones weights")
        dopp.flags.writeable = False
        dely.flags.writeable = False
        object.__setattr__(self, "doppler", dopp)
        object.__setattr__(self, "delay", dely)

    @property
    def n_doppler(self) -> int:
        return len(self.doppler)

    @property
    def m_delay(self) -> int:
        return len(self.delay)

    def doppler_dc_gain(self) -> complex:
        return complex(np.mean(self.doppler))

    def has_rectangular_delay_axis(self, tol: float = 0.0) -> bool:
        return bool(np.all(np.abs(self.delay - 1.0) <= tol))


def _dc_gain_normalized(weights: np.ndarray) -> np.ndarray:
    mean = np.mean(weights)
    if np.abs(mean) < 1e-300:
        raise ValueError("window has zero DC gain; cannot normalize")
    return weights / mean


def rectangular_window(dims: GridDims) -> SeparableWindow:
    """All-ones window on both axes (the no-window baseline)."""
    return SeparableWindow(
        np.ones(dims.n_doppler), np.ones(dims.m_delay), kind=RECTANGULAR
    )


def sine_window(dims: GridDims) -> SeparableWindow:
    """Half-sine taper sin(pi n / (N-1)) on the Doppler axis, rescaled to
    unit DC gain; delay axis is all-ones.  Endpoint weights are zero."""
    n = dims.n_doppler
    if n < 2:
        raise ValueError("sine window needs at least 2 Doppler bins")
    raw = np.sin(np.pi * np.arange(n) / (n - 1))
    return SeparableWindow(
        _dc_gain_normalized(raw), np.ones(dims.m_delay), kind=SINE
    )


def dc_window(dims: GridDims, sidelobe_level_db: float) -> SeparableWindow:
    """Dolph-Chebyshev taper on the Doppler axis with equiripple sidelobes at
    the requested level below the mainlobe peak; delay axis all-ones.

    Built with the Chebyshev-polynomial frequency-sampling construction and
    rescaled to unit DC gain; the delivered sidelobe level is validated by
    measurement (:func:`scan_doppler_response`), not by coefficient tables.
    """
    n = dims.n_doppler
    if n < 2:
        raise ValueError("Dolph-Chebyshev window needs at least 2 Doppler bins")
    if sidelobe_level_db >= 0:
        raise ValueError("sidelobe level must be negative (dB)")
    with warnings.catch_warnings():
        # scipy warns about ENBW non-monotonicity below ~45 dB attenuation;
        # irrelevant here, the design target is the sidelobe level itself.
        warnings.simplefilter("ignore", UserWarning)
        raw = chebwin(n, at=abs(sidelobe_level_db))
    return SeparableWindow(
        _dc_gain_normalized(raw), np.ones(dims.m_delay), kind=DOLPH_CHEBYSHEV
    )


def custom_window(doppler: np.ndarray, delay: np.ndarray) -> SeparableWindow:
    return SeparableWindow(doppler, delay, kind=CUSTOM)


def dc_sidelobe_for_mainlobe(
    k_main: float, n_doppler: int, angle_convention: str = "bins"
) -> float:
    """Closed-form lowest sidelobe level (dB) a Dolph-Chebyshev window of
    length N can reach for a given mainlobe width.

    SL[dB] = -20 log10 cosh( (N/2) acosh( (3 - cos t)/(1 + cos t) ) )

    With ``angle_convention="bins"`` the mainlobe half-width of k_main/2
    Doppler bins maps to the angle t = (k_main/2) * (2 pi / N); with
    ``"radians"`` t = k_main/2 is used as-is.
    """
    if n_doppler < 2:
        raise ValueError("need at least 2 Doppler bins")
    if k_main <= 1:
        raise ValueError("mainlobe width must exceed one bin")
    if angle_convention == "bins":
        theta = (k_main / 2.0) * (2.0 * np.pi / n_doppler)
    elif angle_convention == "radians":
        theta = k_main / 2.0
    else:
        raise ValueError(f"unknown angle convention {angle_convention!r}")
    denom = 1.0 + np.cos(theta)
    if denom <= 0.0:
        raise ValueError("mainlobe too wide for the formula domain")
    ratio = (3.0 - np.cos(theta)) / denom
    if ratio < 1.0:
        raise ValueError("mainlobe too narrow for the formula domain")
    return float(-20.0 * np.log10(np.cosh(n_doppler / 2.0 * np.arccosh(ratio))))


def _product_weights(tx: SeparableWindow, rx: SeparableWindow, axis: str) -> np.ndarray:
    a = tx.doppler if axis == "doppler" else tx.delay
    b = rx.doppler if axis == "doppler" else rx.delay
    if len(a) != len(b):
        raise ValueError(f"TX/RX {axis} axis lengths differ: {len(a)} vs {len(b)}")
    return a * b


def doppler_filter_response(tx: SeparableWindow, rx: SeparableWindow, offset):
    """Doppler-axis DD filter G_N at a real (possibly fractional) offset.

    G_N(v) = (1/N) sum_n V[n] U[n] exp(-j2pi n v / N).  Accepts a scalar or
    an array of offsets; the response is periodic with period N and depends
    only on the TX*RX product, so swapping TX and RX leaves it unchanged.
    """
    w = _product_weights(tx, rx, "doppler")
    n = len(w)
    off = np.asarray(offset, dtype=np.float64)
    phase = np.exp(-2j * np.pi * np.multiply.outer(off, np.arange(n)) / n)
    out = phase @ w / n
    return complex(out) if np.ndim(offset) == 0 else out


def delay_filter_response(tx: SeparableWindow, rx: SeparableWindow, offset):
    """Delay-axis DD filter F_M(u) = (1/M) sum_m V[m] U[m] exp(+j2pi m u / M)."""
    w = _product_weights(tx, rx, "delay")
    m = len(w)
    off = np.asarray(offset, dtype=np.float64)
    phase = np.exp(2j * np.pi * np.multiply.outer(off, np.arange(m)) / m)
    out = phase @ w / m
    return complex(out) if np.ndim(offset) == 0 else out


def rect_doppler_response(n_doppler: int, offset):
    """Closed-form G_N for the rectangular window (Dirichlet kernel):

    G_N(v) = (1/N) exp(-j(N-1) pi v / N) sin(pi v) / sin(pi v / N)

    with the removable singularity at v = 0 (mod N) evaluated as 1.
    """
    return _dirichlet(n_doppler, offset, sign=-1.0)


def rect_delay_response(m_delay: int, offset):
    """Closed-form F_M for the rectangular window.  The geometric sum of
    exp(+j2pi m u / M) gives the conjugate-phase Dirichlet kernel

    F_M(u) = (1/M) exp(+j(M-1) pi u / M) sin(pi u) / sin(pi u / M).
    """
    return _dirichlet(m_delay, offset, sign=+1.0)


def _dirichlet(n: int, offset, sign: float):
    off = np.asarray(offset, dtype=np.float64)
    scalar = off.ndim == 0
    off = np.atleast_1d(off)
    wrapped = np.mod(off, n)
    out = np.empty(off.shape, dtype=np.complex128)
    # only the exact 0/0 singularity needs the limit value; the sin ratio is
    # numerically stable arbitrarily close to it
    at_zero = (wrapped == 0.0) | (wrapped == float(n))
    out[at_zero] = 1.0
    v = off[~at_zero]
    out[~at_zero] = (
        np.exp(sign * 1j * (n - 1) * np.pi * v / n)
        * np.sin(np.pi * v)
        / (n * np.sin(np.pi * v / n))
    )
    return complex(out[0]) if scalar else out


def noise_filter_vz(rx: SeparableWindow, k: int, l: int) -> complex:
    """Noise-shaping DD filter induced by the RX window alone:

    v_z[k, l] = (1/NM) sum_n sum_m V[n, m] exp(-j2pi nk/N) exp(+j2pi ml/M).
    """
    n, m = rx.n_doppler, rx.m_delay
    dopp = np.exp(-2j * np.pi * np.arange(n) * k / n) @ rx.doppler / n
    dely = np.exp(2j * np.pi * np.arange(m) * l / m) @ rx.delay / m
    return complex(dopp * dely)


def noise_filter_table(rx: SeparableWindow) -> np.ndarray:
    """Full N x M table of v_z at integer lags, computed via per-axis FFTs.

    Equals :func:`noise_filter_vz` evaluated on every (k, l) pair.
    """
    n, m = rx.n_doppler, rx.m_delay
    dopp = np.fft.fft(rx.doppler) / n
    dely = np.fft.ifft(rx.delay)  # ifft carries 1/M
    return np.outer(dopp, dely)


def ideal_window_response(offset: float) -> float:
    """Brick-wall Doppler response: 1 for -0.5 <= offset <= 0.5, else 0.

    Analysis/plotting reference only; not realizable by any finite-length
    window.
    """
    return 1.0 if -0.5 <= offset <= 0.5 else 0.0


@dataclass(frozen=True)
class WindowScan:
    """Fine-lattice scan of |G_N| for a window pair: mainlobe boundary (first
    local minimum on each side of zero) and the peak sidelobe beyond it."""

    offsets: np.ndarray = field(repr=False)
    magnitude: np.ndarray = field(repr=False)
    mainlobe_halfwidth_bins: float
    peak_sidelobe: float

    @property
    def mainlobe_width_bins(self) -> float:
        return 2.0 * self.mainlobe_halfwidth_bins

    @property
    def peak_sidelobe_db(self) -> float:
        return float(20.0 * np.log10(self.peak_sidelobe))


def scan_doppler_response(
    tx: SeparableWindow, rx: SeparableWindow, step: float = 0.01
) -> WindowScan:
    """Measure mainlobe width and peak sidelobe of the pair's G_N response.

    Scans one full period on a ``step``-bin lattice; the mainlobe boundary is
    the first local minimum of |G_N| on each side of offset 0, robust for
    equiripple responses without true nulls.
    """
    n = tx.n_doppler
    half = np.arange(0.0, n / 2.0 + step, step)
    offsets = np.concatenate((-half[:0:-1], half))
    mag = np.abs(doppler_filter_response(tx, rx, offsets))
    center = len(half) - 1  # index of offset 0

    def first_min(direction: int) -> int:
        i = center + direction
        while 0 < i < len(mag) - 1:
            if mag[i] <= mag[i - 1] and mag[i] <= mag[i + 1]:
                return i
            i += direction
        return i

    lo, hi = first_min(-1), first_min(+1)
    halfwidth = 0.5 * (offsets[hi] - offsets[lo])
    outside = np.concatenate((mag[: lo + 1], mag[hi:]))
    peak = float(outside.max() / mag[center])
    return WindowScan(offsets, mag, float(halfwidth), peak)


def window_response_rows(
    tx: SeparableWindow, rx: SeparableWindow, resolution: float = 0.01
):
    """(offset_bins, magnitude, magnitude_db, phase_rad) rows over one period,
    the dump format consumed by the experiment runner's CSV writer."""
    n = tx.n_doppler
    offsets = np.arange(-n / 2.0, n / 2.0 + resolution, resolution)
    resp = doppler_filter_response(tx, rx, offsets)
    mag = np.abs(resp)
    with np.errstate(divide="ignore"):
        mag_db = 20.0 * np.log10(mag)
    return [
        (float(o), float(a), float(db), float(p))
        for o, a, db, p in zip(offsets, mag, mag_db, np.angle(resp))
    ]
