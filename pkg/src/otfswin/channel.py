"""Sparse doubly-dispersive channels on the DD grid and their windowed
effective-channel kernels.

A channel is a list of P discrete paths, each with a complex gain, an
integer delay index, and a Doppler shift split into an integer index plus a
fractional residue in (-1/2, 1/2).  Path gains are circular complex Gaussian
with variances following a normalized exponential power delay profile, so
the total expected channel power is 1 per realization.

The effective channel seen after OTFS demodulation folds the TX*RX window
response into each path:

    h_w[k, l] = sum_i h_i G_N(k - k_i - kappa_i) F_M(l - l_i)
                * exp(-j2pi (k_i + kappa_i) l_i / (NM))

for k in [0, N), l in [0, M), with circular (modulo-N, modulo-M) indexing.
With rectangular windows and integer Doppler this collapses to P isolated
phase-rotated taps; fractional Doppler spreads every path across all Doppler
bins, and window design controls that spread.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .grids import DDGrid, GridDims, TFGrid
from .windows import (
    SeparableWindow,
    delay_filter_response,
    doppler_filter_response,
)

__all__ = [
    "ChannelPath",
    "DDChannel",
    "ChannelGenConfig",
    "EffectiveChannel",
    "gen_channel",
    "effective_channel",
    "tf_effective_channel",
    "write_channel_csv",
    "read_channel_csv",
]


@dataclass(frozen=True)
class ChannelPath:
    """One propagation path: complex gain, integer delay bin, integer Doppler
    bin, fractional Doppler residue, and the generator-assigned expected
    power E|h|^2 (the power-delay-profile variance of the gain draw)."""

    gain: complex
    delay_idx: int
    doppler_idx: int
    doppler_frac: float
    power: float = 1.0

    def __post_init__(self) -> None:
        if not abs(self.doppler_frac) < 0.5:
            raise ValueError("fractional Doppler must lie strictly in (-0.5, 0.5)")
        if self.delay_idx < 0:
            raise ValueError("delay index must be non-negative")
        if self.power <= 0:
            raise ValueError("expected path power must be positive")

    @property
    def doppler_shift_bins(self) -> float:
        return self.doppler_idx + self.doppler_frac


@dataclass(frozen=True)
class DDChannel:
    """A P-path channel realization tied to a grid."""

    dims: GridDims
    paths: tuple[ChannelPath, ...]

    def __post_init__(self) -> None:
        paths = tuple(self.paths)
        cells = [(p.delay_idx, p.doppler_idx) for p in paths]
        if len(set(cells)) != len(cells):
            raise ValueError("paths must occupy distinct (delay, Doppler) cells")
        for p in paths:
            if p.delay_idx >= self.dims.m_delay:
                raise ValueError("path delay index exceeds grid")
            if abs(p.doppler_idx) >= self.dims.n_doppler:
                raise ValueError("path Doppler index exceeds grid")
        object.__setattr__(self, "paths", paths)

    @property
    def num_paths(self) -> int:
        return len(self.paths)


@dataclass(frozen=True)
class ChannelGenConfig:
    """Random-channel generator settings: P paths over the (delay, Doppler)
    rectangle [0, l_max] x [-k_max, k_max], exponential power delay profile
    exp(-pdp_decay * l) normalized over the drawn paths."""

    num_paths: int
    k_max: int
    l_max: int
    pdp_decay: float = 0.1
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.num_paths < 1:
            raise ValueError("need at least one path")
        if self.k_max < 0 or self.l_max < 0:
            raise ValueError("index bounds must be non-negative")
        if self.pdp_decay < 0:
            raise ValueError("profile decay must be non-negative")

    def validate_against(self, dims: GridDims) -> None:
        if 2 * self.k_max + 1 > dims.n_doppler:
            raise ValueError("Doppler span 2*k_max+1 exceeds N")
        if self.l_max + 1 > dims.m_delay:
            raise ValueError("delay span l_max+1 exceeds M")


def gen_channel(
    dims: GridDims, cfg: ChannelGenConfig, rng: np.random.Generator | None = None
) -> DDChannel:
    """Draw a random channel: P distinct (delay, Doppler-integer) cells
    uniformly without replacement, fractional Doppler uniform on (-0.5, 0.5),
    gains CN(0, q^l) with q the normalized exponential profile over the
    drawn delays."""
    cfg.validate_against(dims)
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    n_delay = cfg.l_max + 1
    n_dopp = 2 * cfg.k_max + 1
    n_cells = n_delay * n_dopp
    if cfg.num_paths > n_cells:
        raise ValueError(
            f"{cfg.num_paths} paths cannot occupy {n_cells} distinct cells"
        )
    cells = rng.choice(n_cells, size=cfg.num_paths, replace=False)
    delays = cells // n_dopp
    dopplers = cells % n_dopp - cfg.k_max

    fracs = rng.uniform(-0.5, 0.5, size=cfg.num_paths)
    while np.any(np.abs(fracs) >= 0.5):  # endpoints excluded
        bad = np.abs(fracs) >= 0.5
        fracs[bad] = rng.uniform(-0.5, 0.5, size=int(bad.sum()))

    profile = np.exp(-cfg.pdp_decay * delays)
    profile = profile / profile.sum()
    gains = np.sqrt(profile / 2.0) * (
        rng.standard_normal(cfg.num_paths) + 1j * rng.standard_normal(cfg.num_paths)
    )
    paths = tuple(
        ChannelPath(
            gain=complex(g),
            delay_idx=int(l),
            doppler_idx=int(k),
            doppler_frac=float(f),
            power=float(q),
        )
        for g, l, k, f, q in zip(gains, delays, dopplers, fracs, profile)
    )
    return DDChannel(dims, paths)


@dataclass(frozen=True)
class EffectiveChannel:
    """N x M circular-convolution kernel h_w[k, l] of the windowed channel."""

    dims: GridDims
    values: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.complex128)
        if values.shape != self.dims.shape:
            raise ValueError("effective channel shape does not match dims")
        values = values.copy()
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    def tap(self, k: int, l: int) -> complex:
        """Circularly indexed kernel value h_w[(k)_N, (l)_M]."""
        return complex(
            self.values[k % self.dims.n_doppler, l % self.dims.m_delay]
        )

    def nonzero_count(self, tol: float = 1e-12) -> int:
        return int(np.count_nonzero(np.abs(self.values) > tol))


def effective_channel(
    ch: DDChannel, tx: SeparableWindow, rx: SeparableWindow
) -> EffectiveChannel:
    """Assemble h_w by summing each path's separable window response, scaled
    by the path gain and its delay-Doppler phase rotation."""
    n, m = ch.dims.shape
    if tx.n_doppler != n or tx.m_delay != m or rx.n_doppler != n or rx.m_delay != m:
        raise ValueError("window axes do not match channel dims")
    k_axis = np.arange(n, dtype=np.float64)
    l_axis = np.arange(m, dtype=np.float64)
    out = np.zeros((n, m), dtype=np.complex128)
    for p in ch.paths:
        nu = p.doppler_shift_bins
        g = doppler_filter_response(tx, rx, k_axis - nu)
        f = delay_filter_response(tx, rx, l_axis - p.delay_idx)
        phase = np.exp(-2j * np.pi * nu * p.delay_idx / (n * m))
        out += p.gain * phase * np.outer(g, f)
    return EffectiveChannel(ch.dims, out)


def tf_effective_channel(ch: DDChannel, dims: GridDims) -> TFGrid:
    """TF-domain effective channel under ideal pulses:

    H[n, m] = sum_i h_i exp(-j2pi nu_i l_i / (NM))
              * exp(+j2pi (n nu_i / N - m l_i / M)).
    """
    n, m = dims.shape
    n_axis = np.arange(n).reshape(-1, 1)
    m_axis = np.arange(m).reshape(1, -1)
    out = np.zeros((n, m), dtype=np.complex128)
    for p in ch.paths:
        nu = p.doppler_shift_bins
        phase = np.exp(-2j * np.pi * nu * p.delay_idx / (n * m))
        out += (
            p.gain
            * phase
            * np.exp(2j * np.pi * (n_axis * nu / n - m_axis * p.delay_idx / m))
        )
    return TFGrid(dims, out)


_CSV_HEADER = [
    "path_idx",
    "gain_re",
    "gain_im",
    "delay_idx",
    "doppler_idx",
    "doppler_frac",
]


def write_channel_csv(ch: DDChannel, path) -> None:
    """Dump path parameters for reproducibility audits."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_CSV_HEADER)
        for i, p in enumerate(ch.paths):
            writer.writerow(
                [
                    i,
                    repr(p.gain.real),
                    repr(p.gain.imag),
                    p.delay_idx,
                    p.doppler_idx,
                    repr(p.doppler_frac),
                ]
            )


def read_channel_csv(path, dims: GridDims) -> DDChannel:
    """Inverse of :func:`write_channel_csv`; expected powers are not stored
    in the dump and default to |gain|^2."""
    paths = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != _CSV_HEADER:
            raise ValueError(f"unexpected channel CSV header: {header}")
        for row in reader:
            gain = complex(float(row[1]), float(row[2]))
            paths.append(
                ChannelPath(
                    gain=gain,
                    delay_idx=int(row[3]),
                    doppler_idx=int(row[4]),
                    doppler_frac=float(row[5]),
                    power=abs(gain) ** 2 or 1.0,
                )
            )
    return DDChannel(dims, tuple(paths))
