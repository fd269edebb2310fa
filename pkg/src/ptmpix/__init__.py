"""ptmpix: device-to-image simulator for a hysteretic threshold-switch pixel
front end.

The package models a two-state phase-transition resistor stacked with a PMOS
follower (a HyperFET) inside an active pixel, extracts the pixel's 8-bit
transfer curve, applies it as a look-up-table model to whole images, and
quantifies the enhancement via histograms and the Michelson contrast ratio,
including inverse design and seeded Monte-Carlo variation studies.
"""

from .circuit import (
    AstableConfiguration,
    FrameSample,
    FrameTrace,
    LatchMode,
    NoConvergence,
    OperatingPoint,
    PixelConfig,
    ResetMode,
    SolverError,
    TcStage,
    ThreeTConfig,
    frame_trace_csv,
    integrate_pd,
    simulate_3t_frame,
    simulate_frame,
    solve_stack_dc,
    three_t_reset_level,
)
from .config import (
    ConfigError,
    ConfigSyntaxError,
    InvalidValue,
    RunConfig,
    UnknownKey,
    dump_config,
    parse_config,
    ref_a,
)
from .curve import (
    CurveError,
    CurveFeatures,
    FixedRange,
    InvalidParamValue,
    NoTransition,
    Normalization,
    PER_CURVE_MIN_MAX,
    PerCurveMinMax,
    TransferCurve,
    Unreachable,
    curve_csv,
    curve_features,
    design_threshold,
    extract_curve,
    normalize_curve,
    sweep_parameter,
    vgt_family,
)
from .devices import (
    MosfetParams,
    PhotodiodeParams,
    PtmParams,
    PtmState,
    PTM_PRESETS,
    mosfet_drain_current,
    photocurrent,
    ptm_contrast_stretch,
    ptm_foreground,
    ptm_nbo2,
    ptm_resistance,
    ptm_transition,
    ptm_voltage_sweep,
)
from .errors import PtmpixError
from .image import (
    BadHeader,
    BadMagic,
    ContrastReport,
    GrayImage,
    Histogram,
    MaxvalTooLarge,
    PgmError,
    TruncatedData,
    ZeroBaseContrast,
    apply_lut,
    enhancement_report,
    histogram,
    histogram_json,
    michelson_cr,
    read_pgm,
    report_json,
    synth_low_contrast,
    write_pgm,
)
from .montecarlo import (
    McRow,
    McSummary,
    NoSuccessfulRows,
    ResampleExhausted,
    VariationSpec,
    mc_csv,
    mc_summary,
    run_monte_carlo,
    sample_variant,
    summary_json,
)

__version__ = "0.1.0"
