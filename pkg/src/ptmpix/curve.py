"""Transfer-curve extraction and shaping tools.

Sweeps the photodiode-node voltage drop through the DC solver to build the
pixel's input/output curve, quantizes it to an 8-bit LUT, detects the abrupt
threshold step, and provides the design-phase (parameter), inverse-design,
and gate-bias sweep helpers.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .circuit import PixelConfig, TcStage, solve_stack_dc
from .devices import PtmState
from .errors import PtmpixError

JUMP_QUALIFY_CODES = 8  # minimum LUT step that counts as a transition


class CurveError(PtmpixError):
    pass


class NoTransition(CurveError):
    """The LUT has no step large enough to qualify as a transition."""


class InvalidParamValue(CurveError):
    """A sweep value violates positivity or the r_hrs > r_lrs ordering."""


class Unreachable(CurveError):
    """design_threshold exhausted its bracket without hitting the target."""


@dataclass(frozen=True)
class PerCurveMinMax:
    """Map each curve's own [min, max] onto [0, 255]; a flat curve maps to 0."""


@dataclass(frozen=True)
class FixedRange:
    """Map a fixed voltage window [lo, hi] onto [0, 255], clamping outside."""

    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not self.hi > self.lo:
            raise ValueError("FixedRange requires hi > lo")


Normalization = PerCurveMinMax | FixedRange
PER_CURVE_MIN_MAX = PerCurveMinMax()


@dataclass(frozen=True, eq=False)
class TransferCurve:
    """Raw and quantized pixel response versus input code.

    ``v_drop[k] = k / (n - 1) * vdd`` is the photodiode-node voltage drop;
    ``lut`` holds output codes 0..255; ``state_seq`` is the switch state per
    code after the (latching) solve.
    """

    n: int
    input_codes: np.ndarray
    v_drop: np.ndarray
    v_out_raw: np.ndarray
    lut: np.ndarray
    state_seq: tuple[PtmState, ...] | None = None


@dataclass(frozen=True)
class CurveFeatures:
    """Location and levels of the abrupt step.

    ``threshold_code`` is the input code whose LUT increment is largest (the
    last code before the jump lands).  The step is a single-code event, so
    both tuning points share that x-coordinate: ``ax = bx = threshold_code``,
    with ``ay = lut[threshold_code]`` (where the jump starts) and
    ``by = lut[threshold_code + 1]`` (where it lands).
    """

    threshold_code: int
    ax: int
    ay: int
    bx: int
    by: int
    stage1_max: int
    stage2_span: tuple[int, int]


def normalize_curve(v_out_raw, norm: Normalization = PER_CURVE_MIN_MAX) -> np.ndarray:
    """Quantize raw output voltages to 0..255 codes.

    Rounding is half-away-from-zero so golden files are bit-stable.  A
    degenerate per-curve range (max == min) maps everything to 0.
    """
    raw = np.asarray(v_out_raw, dtype=float)
    if raw.size == 0:
        raise ValueError("v_out_raw must be non-empty")
    if isinstance(norm, PerCurveMinMax):
        lo = float(raw.min())
        hi = float(raw.max())
        if hi == lo:
            return np.zeros(raw.size, dtype=np.int64)
    else:
        lo, hi = norm.lo, norm.hi
    scaled = 255.0 * (raw - lo) / (hi - lo)
    codes = np.floor(scaled + 0.5).astype(np.int64)
    return np.clip(codes, 0, 255)


def extract_curve(
    cfg: PixelConfig, n: int = 256, norm: Normalization = PER_CURVE_MIN_MAX
) -> TransferCurve:
    """Sweep the drop at the photodiode node and record the pixel response.

    The sweep ascends (mirroring the monotone discharge within a frame) with
    the switch starting in HRS and its state carried code to code, so the
    state sequence contains at most the single HRS->LRS flip.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    codes = np.arange(n, dtype=np.int64)
    v_drop = cfg.vdd * codes / (n - 1)
    raw = np.empty(n, dtype=float)
    states: list[PtmState] = []
    state = PtmState.HRS
    for k in range(n):
        op = solve_stack_dc(cfg, cfg.vdd - float(v_drop[k]), state)
        state = op.ptm_state
        raw[k] = op.v_out
        states.append(state)
    lut = normalize_curve(raw, norm)
    return TransferCurve(n, codes, v_drop, raw, lut, tuple(states))


def curve_features(curve: TransferCurve) -> CurveFeatures:
    """Detect the abrupt step; raises NoTransition when the largest LUT
    increment is below the qualification threshold."""
    lut = np.asarray(curve.lut, dtype=np.int64)
    diffs = lut[1:] - lut[:-1]
    j = int(np.argmax(diffs))  # ties resolve to the smallest code
    if int(diffs[j]) < JUMP_QUALIFY_CODES:
        raise NoTransition(
            f"largest LUT increment is {int(diffs[j])} codes "
            f"(< {JUMP_QUALIFY_CODES})"
        )
    if curve.state_seq is not None and any(
        s is PtmState.LRS for s in curve.state_seq
    ):
        hrs = [int(lut[k]) for k, s in enumerate(curve.state_seq) if s is PtmState.HRS]
        lrs = [int(lut[k]) for k, s in enumerate(curve.state_seq) if s is PtmState.LRS]
        stage1_max = max(hrs) if hrs else int(lut[j])
        stage2 = (min(lrs), max(lrs))
    else:
        stage1_max = int(lut[: j + 1].max())
        stage2 = (int(lut[j + 1 :].min()), int(lut[j + 1 :].max()))
    return CurveFeatures(
        threshold_code=j,
        ax=j,
        ay=int(lut[j]),
        bx=j,
        by=int(lut[j + 1]),
        stage1_max=stage1_max,
        stage2_span=stage2,
    )


_SWEEP_PARAMS = ("r_lrs", "r_hrs", "ic_hlt")


def sweep_parameter(
    cfg: PixelConfig,
    param: str,
    values,
    n: int = 256,
    norm: Normalization = PER_CURVE_MIN_MAX,
) -> list[TransferCurve]:
    """One extraction per switch-parameter value, everything else fixed."""
    if param not in _SWEEP_PARAMS:
        raise InvalidParamValue(f"unknown sweep parameter {param!r}")
    values = list(values)
    for v in values:
        if v <= 0.0:
            raise InvalidParamValue(f"{param} value {v!r} must be positive")
        if param == "r_lrs" and v >= cfg.ptm.r_hrs:
            raise InvalidParamValue(f"r_lrs value {v!r} must stay below r_hrs")
        if param == "r_hrs" and v <= cfg.ptm.r_lrs:
            raise InvalidParamValue(f"r_hrs value {v!r} must stay above r_lrs")
    curves = []
    for v in values:
        if param == "ic_hlt":
            ptm = replace(cfg.ptm, i_c_hlt=v)
        else:
            ptm = replace(cfg.ptm, **{param: v})
        curves.append(extract_curve(replace(cfg, ptm=ptm), n, norm))
    return curves


def design_threshold(
    cfg: PixelConfig,
    target_code: int,
    free_param: str,
    n: int = 256,
    norm: Normalization = PER_CURVE_MIN_MAX,
) -> float:
    """Bisect the free parameter until the extracted threshold code hits the
    target within one code.

    The search bracket is [0.1x, 10x] of the nominal value (clipped to keep
    the resistance ordering valid).  The threshold code is non-decreasing in
    both ``ic_hlt`` and ``r_hrs``, so plain bisection applies; a parameter
    value whose curve never transitions counts as "beyond every code".
    """
    if free_param not in ("ic_hlt", "r_hrs"):
        raise InvalidParamValue(f"free parameter must be ic_hlt or r_hrs, got {free_param!r}")
    if not 0 <= target_code <= 255:
        raise ValueError("target_code must lie in 0..255")

    nominal = cfg.ptm.i_c_hlt if free_param == "ic_hlt" else cfg.ptm.r_hrs
    lo, hi = 0.1 * nominal, 10.0 * nominal
    if free_param == "r_hrs":
        lo = max(lo, cfg.ptm.r_lrs * (1.0 + 1e-9))

    def threshold_at(p: float) -> int | None:
        try:
            return curve_features(sweep_parameter(cfg, free_param, [p], n, norm)[0]).threshold_code
        except NoTransition:
            return None

    t_lo = threshold_at(lo)
    if t_lo is None:
        raise NoTransition("no transition anywhere in the design bracket")
    if target_code < t_lo:
        raise Unreachable(f"threshold {target_code} below the achievable minimum {t_lo}")
    if abs(t_lo - target_code) <= 1:
        return lo
    t_hi = threshold_at(hi)
    if t_hi is not None and target_code > t_hi:
        raise Unreachable(f"threshold {target_code} above the achievable maximum {t_hi}")
    if t_hi is not None and abs(t_hi - target_code) <= 1:
        return hi

    for _ in range(80):
        mid = 0.5 * (lo + hi)
        t_mid = threshold_at(mid)
        if t_mid is not None and abs(t_mid - target_code) <= 1:
            return mid
        if t_mid is None or t_mid > target_code:
            hi = mid
        else:
            lo = mid
        if hi - lo <= 1e-12 * nominal:
            break
    t_final = threshold_at(lo)
    if t_final is not None and abs(t_final - target_code) <= 1:
        return lo
    raise Unreachable(f"no parameter value reaches threshold {target_code} +/- 1")


def vgt_family(cfg: PixelConfig, vgt_values, n: int = 256,
               norm: Normalization = PER_CURVE_MIN_MAX) -> list[TransferCurve]:
    """One extraction per tuning-gate bias; requires the tuning stage."""
    if cfg.tc is None:
        raise ValueError("vgt_family requires a config with the tuning stage enabled")
    values = list(vgt_values)
    for v in values:
        if not 0.0 <= v <= cfg.vdd:
            raise ValueError(f"v_gt value {v!r} must lie in [0, vdd]")
    return [
        extract_curve(replace(cfg, tc=TcStage(cfg.tc.params, v)), n, norm)
        for v in values
    ]


def curve_csv(curve: TransferCurve) -> str:
    """Curve as CSV (LF endings, volts at 9 significant digits)."""
    lines = ["input_code,v_drop_v,v_out_raw_v,output_code,ptm_state"]
    states = curve.state_seq or tuple([PtmState.HRS] * curve.n)
    for k in range(curve.n):
        lines.append(
            f"{int(curve.input_codes[k])},{curve.v_drop[k]:.9g},"
            f"{curve.v_out_raw[k]:.9g},{int(curve.lut[k])},{states[k].value}"
        )
    return "\n".join(lines) + "\n"
