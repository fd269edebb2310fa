"""Device-level evaluators: two-state threshold-switch resistor (PTM),
behavioral square-law MOSFET, and the photodiode current source.

All functions here are pure; stateful behaviour (latching, transients) lives
in :mod:`ptmpix.circuit`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import PtmpixError


class PtmState(Enum):
    """Resistance state of the phase-transition material."""

    HRS = "HRS"
    LRS = "LRS"


@dataclass(frozen=True)
class PtmParams:
    """Two-state threshold switch.

    Resistances in ohms, critical currents in amperes.  ``l_ptm`` (film
    length, m) and ``a_ptm`` (cross-section, m^2) are metadata only and never
    enter the electrical model.
    """

    r_hrs: float
    r_lrs: float
    i_c_hlt: float
    i_c_lht: float
    l_ptm: float = 5e-9
    a_ptm: float = 7.5625e-16  # 27.5 nm x 27.5 nm

    def __post_init__(self) -> None:
        if not (self.r_hrs > self.r_lrs > 0.0):
            raise ValueError("PTM resistances must satisfy r_hrs > r_lrs > 0")
        if self.i_c_hlt <= 0.0:
            raise ValueError("i_c_hlt must be positive")
        if self.i_c_lht <= 0.0:
            raise ValueError("i_c_lht must be positive")
        if self.l_ptm <= 0.0 or self.a_ptm <= 0.0:
            raise ValueError("PTM geometry metadata must be positive")


@dataclass(frozen=True)
class MosfetParams:
    """Level-1 square-law transistor; ``kp`` already folds in W/L.

    ``vth`` is a magnitude (polarity handled by the caller's sign
    convention), so the same evaluator serves N and P devices.
    """

    polarity: str
    vth: float
    kp: float

    def __post_init__(self) -> None:
        if self.polarity not in ("N", "P"):
            raise ValueError("polarity must be 'N' or 'P'")
        if self.vth < 0.0:
            raise ValueError("vth is a magnitude and must be >= 0")
        if self.kp <= 0.0:
            raise ValueError("kp must be positive")


@dataclass(frozen=True)
class PhotodiodeParams:
    """Photodiode storage node: capacitance, exposure window, full-scale current."""

    c_pd: float
    t_int: float
    i_pd_max: float

    def __post_init__(self) -> None:
        if self.c_pd <= 0.0 or self.t_int <= 0.0 or self.i_pd_max <= 0.0:
            raise ValueError("photodiode parameters must be strictly positive")


def ptm_nbo2() -> PtmParams:
    """NbO2-class switch preset (5 nm film, 27.5 nm x 27.5 nm cross-section)."""
    return PtmParams(r_hrs=120_500.0, r_lrs=6_500.0, i_c_hlt=7.4e-6, i_c_lht=100e-6)


def ptm_contrast_stretch() -> PtmParams:
    """Low-ratio switch preset producing a two-slope, contrast-stretch curve."""
    return PtmParams(r_hrs=80_000.0, r_lrs=40_000.0, i_c_hlt=4e-6, i_c_lht=6.8e-6)


def ptm_foreground() -> PtmParams:
    """High-ratio switch preset used by the shipped reference pixel.

    Tuned so the transfer-curve threshold lands mid-range and the
    post-transition output pins at full scale (background suppression mode).
    """
    return PtmParams(r_hrs=180_000.0, r_lrs=10_000.0, i_c_hlt=3e-6, i_c_lht=6.8e-6)


PTM_PRESETS = {
    "nbo2": ptm_nbo2,
    "contrast-stretch": ptm_contrast_stretch,
    "foreground": ptm_foreground,
}


def ptm_resistance(state: PtmState, params: PtmParams) -> float:
    """Ohmic resistance of the switch in the given state."""
    return params.r_hrs if state is PtmState.HRS else params.r_lrs


def ptm_transition(state: PtmState, params: PtmParams, branch_current: float) -> PtmState:
    """One application of the current-triggered transition rule.

    HRS -> LRS when the current exceeds ``i_c_hlt``; LRS -> HRS when it falls
    below ``i_c_lht``; otherwise unchanged.  This is the bare rule: latching
    policy and re-solves belong to the circuit engine.
    """
    if branch_current < 0.0:
        raise ValueError("branch_current must be >= 0")
    if state is PtmState.HRS and branch_current > params.i_c_hlt:
        return PtmState.LRS
    if state is PtmState.LRS and branch_current < params.i_c_lht:
        return PtmState.HRS
    return state


def mosfet_drain_current(params: MosfetParams, v_gs_eff: float, v_ds_eff: float) -> float:
    """Drain current for polarity-normalized terminal magnitudes.

    Hard cutoff below ``vth``, square-law triode/saturation above; the
    boundary ``v_ds_eff == v_gs_eff - vth`` resolves to the saturation branch
    (both branches agree there, so the curve is continuous).
    """
    if v_ds_eff < 0.0:
        raise ValueError("v_ds_eff must be >= 0")
    ov = v_gs_eff - params.vth
    if ov <= 0.0:
        return 0.0
    if v_ds_eff < ov:
        return params.kp * (ov * v_ds_eff - 0.5 * v_ds_eff * v_ds_eff)
    return 0.5 * params.kp * ov * ov


def photocurrent(illum: float, pd: PhotodiodeParams) -> float:
    """Linear illumination-to-current map; ``illum`` in [0, 1]."""
    if not 0.0 <= illum <= 1.0:
        raise ValueError("illum must lie in [0, 1]")
    return illum * pd.i_pd_max


def ptm_voltage_sweep(
    params: PtmParams, v_peak: float = 1.2, steps_per_leg: int = 4800
) -> list[tuple[float, float, PtmState]]:
    """Standalone triangular voltage sweep of the bare switch.

    Drives the device 0 -> v_peak -> 0 with persistent state, applying the
    transition rule at every point.  Returns (voltage, current, state) with
    current evaluated in the post-transition state; sweep resolution is
    ``v_peak / steps_per_leg``.
    """
    if v_peak <= 0.0 or steps_per_leg < 1:
        raise ValueError("v_peak must be > 0 and steps_per_leg >= 1")
    points = [v_peak * k / steps_per_leg for k in range(steps_per_leg + 1)]
    trace: list[tuple[float, float, PtmState]] = []
    state = PtmState.HRS
    for v in points + points[-2::-1]:
        i = v / ptm_resistance(state, params)
        state = ptm_transition(state, params, i)
        trace.append((v, v / ptm_resistance(state, params), state))
    return trace
