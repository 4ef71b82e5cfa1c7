"""OTFS delay-Doppler simulation with TX/RX window design and embedded-pilot
channel estimation."""

from .grids import DDGrid, GridDims, TFGrid, apply_tf_window, isfft, sfft
from .windows import (
    DCWindowSpec,
    SeparableWindow,
    WindowScan,
    dc_sidelobe_for_mainlobe,
    dc_window,
    delay_filter_response,
    doppler_filter_response,
    ideal_window_response,
    noise_filter_table,
    noise_filter_vz,
    rect_delay_response,
    rect_doppler_response,
    rectangular_window,
    scan_doppler_response,
    sine_window,
)
from .channel import (
    ChannelGenConfig,
    ChannelPath,
    DDChannel,
    EffectiveChannel,
    effective_channel,
    gen_channel,
    read_channel_csv,
    tf_effective_channel,
    write_channel_csv,
)
from .linksim import (
    FrameConfig,
    RxFrame,
    circular_convolve2,
    draw_noise_grid,
    simulate_frame_dd,
    simulate_frame_tf,
)
from .chanest import (
    EstimationReport,
    KhatTrend,
    PilotConfig,
    centered_pilot,
    embed_pilot,
    empirical_mse,
    empirical_mse_per_cell,
    estimate,
    interference_exact,
    interference_power_approx,
    interference_power_exact,
    khat_mse_trend,
    mse_floor,
    mse_floor_per_cell,
)
from .harness import (
    SimConfig,
    SweepResult,
    SweepRow,
    WindowSpec,
    default_sim_config,
    floor_sidelobe_level,
    qpsk_data_grid,
    resolve_seed,
    run_floor_table,
    run_mse_sweep,
    run_window_response_dump,
    sweep_to_csv,
)

__version__ = "0.1.0"
