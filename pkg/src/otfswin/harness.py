"""Monte Carlo experiment runner: MSE sweeps, window-response dumps, floor
tables, deterministic seeding, and the flat config-file format.

Every frame gets its own RNG stream derived from (master seed, cell index,
frame index), so results are byte-reproducible regardless of worker count or
scheduling order; per-frame results are aggregated in frame-index order.
"""

from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .channel import ChannelGenConfig, effective_channel, gen_channel
from .chanest import (
    PilotConfig,
    centered_pilot,
    empirical_mse,
    estimate,
    khat_mse_trend,
    mse_floor,
    embed_pilot,
)
from .grids import DDGrid, GridDims
from .linksim import FrameConfig, simulate_frame_dd, simulate_frame_tf
from .windows import (
    SeparableWindow,
    dc_window,
    ideal_window_response,
    rectangular_window,
    scan_doppler_response,
    sine_window,
    window_response_rows,
)

__all__ = [
    "WindowSpec",
    "SimConfig",
    "SweepRow",
    "SweepResult",
    "resolve_seed",
    "qpsk_data_grid",
    "floor_sidelobe_level",
    "run_mse_sweep",
    "run_window_response_dump",
    "run_floor_table",
    "sweep_to_csv",
    "write_estimation_csv",
    "parse_config_file",
    "default_sim_config",
]

QPSK = np.array([1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j]) / np.sqrt(2.0)


@dataclass(frozen=True)
class WindowSpec:
    """Window selection for one side of the link: rect, sine, or dc (with a
    sidelobe target in dB for the latter)."""

    kind: str = "rect"
    sl_db: float = -40.0

    def __post_init__(self) -> None:
        if self.kind not in ("rect", "sine", "dc"):
            raise ValueError(f"unknown window kind {self.kind!r}")

    def build(self, dims: GridDims) -> SeparableWindow:
        if self.kind == "rect":
            return rectangular_window(dims)
        if self.kind == "sine":
            return sine_window(dims)
        return dc_window(dims, self.sl_db)


@dataclass(frozen=True)
class SimConfig:
    dims: GridDims
    channel: ChannelGenConfig
    pilot: PilotConfig
    tx_window: WindowSpec = WindowSpec("rect")
    rx_window: WindowSpec = WindowSpec("rect")
    snr_db_list: tuple = (60.0,)
    pilot_dbw_list: tuple = (30.0,)
    frames: int = 2000
    master_seed: int = 0
    sim_path: str = "dd"
    workers: int = 1
    # metadata only: maps Doppler bins to physical speeds, enters no
    # computation on the normalized grid
    carrier_frequency_hz: float = 3e9

    def __post_init__(self) -> None:
        if self.frames < 1:
            raise ValueError("need at least one frame")
        if not self.snr_db_list or not self.pilot_dbw_list:
            raise ValueError("SNR and pilot power lists must be non-empty")
        if self.sim_path not in ("dd", "tf"):
            raise ValueError("sim_path must be 'dd' or 'tf'")
        if self.workers < 1:
            raise ValueError("workers must be positive")
        self.channel.validate_against(self.dims)
        self.pilot.validate_against(self.dims)

    @property
    def window_label(self) -> str:
        return f"{self.tx_window.kind}/{self.rx_window.kind}"


@dataclass(frozen=True)
class SweepRow:
    snr_db: float
    pilot_dbw: float
    window_kind: str
    k_hat: int
    empirical_mse_mean: float
    empirical_mse_stderr: float
    analytic_floor: float
    frames: int


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]


def resolve_seed(master_seed: int, *indices: int) -> np.random.Generator:
    """Deterministic, injective mapping from (master seed, stream indices) to
    an independent RNG stream."""
    if master_seed < 0 or any(i < 0 for i in indices):
        raise ValueError("seed components must be non-negative integers")
    return np.random.default_rng(np.random.SeedSequence([master_seed, *indices]))


def qpsk_data_grid(dims: GridDims, rng: np.random.Generator) -> DDGrid:
    """Unit-average-power QPSK symbols filling the grid."""
    return DDGrid(dims, QPSK[rng.integers(0, 4, size=dims.shape)])


def floor_sidelobe_level(
    dims: GridDims, tx: SeparableWindow, rx: SeparableWindow
) -> float:
    """Sidelobe level fed to the floor formula: the rectangular window uses
    its 1/N sidelobe plateau; any other pair uses the measured peak sidelobe
    of the constructed response."""
    if np.all(tx.doppler == 1.0) and np.all(rx.doppler == 1.0):
        return 1.0 / dims.n_doppler
    return scan_doppler_response(tx, rx).peak_sidelobe


def _frame_mse(
    cfg: SimConfig, cell_idx: int, frame_idx: int, snr_db: float, pilot_dbw: float
) -> float:
    rng = resolve_seed(cfg.master_seed, cell_idx, frame_idx)
    noise_var = 10.0 ** (-snr_db / 10.0)
    pilot = replace(cfg.pilot, pilot_power=10.0 ** (pilot_dbw / 10.0))
    tx = cfg.tx_window.build(cfg.dims)
    rx = cfg.rx_window.build(cfg.dims)

    ch = gen_channel(cfg.dims, cfg.channel, rng)
    x = embed_pilot(qpsk_data_grid(cfg.dims, rng), pilot)
    frame_cfg = FrameConfig(cfg.dims, tx, rx, noise_var)
    heff = effective_channel(ch, tx, rx)
    if cfg.sim_path == "dd":
        frame = simulate_frame_dd(x, ch, frame_cfg, rng, heff=heff)
    else:
        frame = simulate_frame_tf(x, ch, frame_cfg, rng)
    report = estimate(frame.dd_received, pilot, noise_var)
    return empirical_mse(heff, report, pilot)


def _frame_mse_batch(args) -> list[tuple[int, float]]:
    cfg, cell_idx, frame_indices, snr_db, pilot_dbw = args
    return [
        (i, _frame_mse(cfg, cell_idx, i, snr_db, pilot_dbw)) for i in frame_indices
    ]


def run_mse_sweep(cfg: SimConfig) -> SweepResult:
    """Frame-averaged estimation MSE over the (SNR, pilot power) grid, with
    the analytic floor attached to every row."""
    tx = cfg.tx_window.build(cfg.dims)
    rx = cfg.rx_window.build(cfg.dims)
    sl = floor_sidelobe_level(cfg.dims, tx, rx)

    cells = [
        (snr, dbw) for snr in cfg.snr_db_list for dbw in cfg.pilot_dbw_list
    ]
    rows = []
    for cell_idx, (snr_db, pilot_dbw) in enumerate(cells):
        per_frame = np.empty(cfg.frames)
        if cfg.workers == 1:
            for i in range(cfg.frames):
                per_frame[i] = _frame_mse(cfg, cell_idx, i, snr_db, pilot_dbw)
        else:
            chunks = [
                (cfg, cell_idx, list(rng_ids), snr_db, pilot_dbw)
                for rng_ids in np.array_split(np.arange(cfg.frames), cfg.workers)
                if len(rng_ids)
            ]
            with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
                for batch in pool.map(_frame_mse_batch, chunks):
                    for i, value in batch:
                        per_frame[i] = value
        mean = float(per_frame.mean())
        stderr = float(per_frame.std(ddof=1) / np.sqrt(cfg.frames)) if cfg.frames > 1 else 0.0
        pilot = replace(cfg.pilot, pilot_power=10.0 ** (pilot_dbw / 10.0))
        rows.append(
            SweepRow(
                snr_db=snr_db,
                pilot_dbw=pilot_dbw,
                window_kind=cfg.window_label,
                k_hat=cfg.pilot.k_hat,
                empirical_mse_mean=mean,
                empirical_mse_stderr=stderr,
                analytic_floor=mse_floor(pilot, cfg.dims, sl),
                frames=cfg.frames,
            )
        )
    return SweepResult(rows=tuple(rows))


def sweep_to_csv(result: SweepResult, out=None) -> str:
    """Serialize a sweep result; returns the CSV text and optionally writes
    it to ``out``."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        [
            "snr_db",
            "pilot_dbw",
            "window_kind",
            "k_hat",
            "empirical_mse_mean",
            "empirical_mse_stderr",
            "analytic_floor",
            "frames",
        ]
    )
    for r in result.rows:
        writer.writerow(
            [
                repr(r.snr_db),
                repr(r.pilot_dbw),
                r.window_kind,
                r.k_hat,
                repr(r.empirical_mse_mean),
                repr(r.empirical_mse_stderr),
                repr(r.analytic_floor),
                r.frames,
            ]
        )
    text = buf.getvalue()
    if out is not None:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    return text


def write_estimation_csv(rows, out) -> None:
    """Per-frame estimation log: (frame_idx, snr_db, window_kind, k_hat,
    pilot_dbw, empirical_mse, analytic_floor)."""
    with open(out, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            [
                "frame_idx",
                "snr_db",
                "window_kind",
                "k_hat",
                "pilot_dbw",
                "empirical_mse",
                "analytic_floor",
            ]
        )
        for row in rows:
            writer.writerow(list(row))


def run_window_response_dump(
    kind: str,
    n_doppler: int,
    resolution: float = 0.01,
    sl_db: float = -40.0,
    out=None,
) -> str:
    """|G_N| of the selected window (against an all-ones partner) on a fine
    offset lattice, as CSV with columns offset_bins, magnitude, magnitude_db,
    phase_rad.  ``kind`` may also be "ideal" for the brick-wall reference."""
    if resolution <= 0:
        raise ValueError("resolution must be positive")
    dims = GridDims(n_doppler, 1, 5e3)
    if kind == "ideal":
        offsets = np.arange(-n_doppler / 2.0, n_doppler / 2.0 + resolution, resolution)
        rows = []
        for o in offsets:
            mag = ideal_window_response(float(o))
            db = 20.0 * np.log10(mag) if mag > 0 else -np.inf
            rows.append((float(o), mag, db, 0.0))
    else:
        win = WindowSpec(kind, sl_db).build(dims)
        rows = window_response_rows(win, rectangular_window(dims), resolution)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["offset_bins", "magnitude", "magnitude_db", "phase_rad"])
    for row in rows:
        writer.writerow([repr(v) for v in row])
    text = buf.getvalue()
    if out is not None:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    return text


def run_floor_table(
    dims: GridDims,
    k_max: int,
    l_max: int,
    window_specs=(WindowSpec("rect"), WindowSpec("sine"), WindowSpec("dc", -40.0)),
    pilot_dbw_list=(0.0,),
    out=None,
) -> str:
    """Analytic floor across windows, every admissible extra guard, and pilot
    powers, flagging the guard-growth regime boundary."""
    rect = rectangular_window(dims)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        [
            "window_kind",
            "sidelobe_level",
            "k_hat",
            "pilot_dbw",
            "overhead_symbols",
            "mse_floor",
            "regime_boundary",
        ]
    )
    for spec in window_specs:
        win = spec.build(dims)
        sl = floor_sidelobe_level(dims, win, rect)
        for pilot_dbw in pilot_dbw_list:
            trend = khat_mse_trend(
                dims, k_max, l_max, sl, pilot_power=10.0 ** (pilot_dbw / 10.0)
            )
            for k_hat, overhead, floor in trend.rows:
                writer.writerow(
                    [
                        spec.kind,
                        repr(sl),
                        k_hat,
                        repr(pilot_dbw),
                        overhead,
                        repr(floor),
                        repr(trend.regime_boundary),
                    ]
                )
    text = buf.getvalue()
    if out is not None:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    return text


# --- flat key=value config files -------------------------------------------

_CONFIG_KEYS = {
    "n_doppler": int,
    "m_delay": int,
    "subcarrier_spacing_hz": float,
    "carrier_frequency_hz": float,
    "num_paths": int,
    "k_max": int,
    "l_max": int,
    "pdp_decay": float,
    "pilot_k": int,
    "pilot_l": int,
    "k_hat": int,
    "tx_window": str,
    "rx_window": str,
    "sl_db": float,
    "snr_db_list": str,
    "pilot_dbw_list": str,
    "frames": int,
    "master_seed": int,
    "sim_path": str,
    "workers": int,
}


def parse_config_file(path) -> dict:
    """Read a flat ``key = value`` file (# comments allowed); unknown keys are
    rejected."""
    values: dict = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            key, _, val = line.partition("=")
            key, val = key.strip(), val.strip()
            if key not in _CONFIG_KEYS:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = _CONFIG_KEYS[key](val)
    return values


def default_sim_config(**overrides) -> SimConfig:
    """Baseline simulation setup (N=20, M=30, 5 kHz spacing, P=5 paths,
    k_max=3, l_max=4, exponential profile 0.1) with flat-key overrides as
    accepted by :func:`parse_config_file`."""
    opts = {
        "n_doppler": 20,
        "m_delay": 30,
        "subcarrier_spacing_hz": 5e3,
        "carrier_frequency_hz": 3e9,
        "num_paths": 5,
        "k_max": 3,
        "l_max": 4,
        "pdp_decay": 0.1,
        "pilot_k": None,
        "pilot_l": None,
        "k_hat": 0,
        "tx_window": "rect",
        "rx_window": "rect",
        "sl_db": -40.0,
        "snr_db_list": "0,5,10,15,20,25,30,35,40,45,50,55,60",
        "pilot_dbw_list": "30",
        "frames": 2000,
        "master_seed": 0,
        "sim_path": "dd",
        "workers": 1,
    }
    unknown = set(overrides) - set(opts)
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    opts.update(overrides)

    dims = GridDims(opts["n_doppler"], opts["m_delay"], opts["subcarrier_spacing_hz"])
    channel = ChannelGenConfig(
        num_paths=opts["num_paths"],
        k_max=opts["k_max"],
        l_max=opts["l_max"],
        pdp_decay=opts["pdp_decay"],
    )
    pilot = PilotConfig(
        k_p=dims.n_doppler // 2 if opts["pilot_k"] is None else opts["pilot_k"],
        l_p=dims.m_delay // 2 if opts["pilot_l"] is None else opts["pilot_l"],
        pilot_power=1.0,  # replaced per pilot_dbw cell during the sweep
        k_max=opts["k_max"],
        l_max=opts["l_max"],
        k_hat=opts["k_hat"],
    )

    def _parse_list(text):
        return tuple(float(v) for v in str(text).split(",") if str(v).strip())

    return SimConfig(
        dims=dims,
        channel=channel,
        pilot=pilot,
        tx_window=WindowSpec(opts["tx_window"], opts["sl_db"]),
        rx_window=WindowSpec(opts["rx_window"], opts["sl_db"]),
        snr_db_list=_parse_list(opts["snr_db_list"]),
        pilot_dbw_list=_parse_list(opts["pilot_dbw_list"]),
        frames=opts["frames"],
        master_seed=opts["master_seed"],
        sim_path=opts["sim_path"],
        workers=opts["workers"],
        carrier_frequency_hz=opts["carrier_frequency_hz"],
    )
