"""DC operating-point solver for the series pixel stack and the
reset/integrate/readout frame engine (plus the plain 3-transistor baseline).

Stack topology, top to bottom, one shared branch current I:

    vdd -- PTM(R of current state) -- X2 (PMOS, gate on the photodiode
    node, source on the PTM's lower node) -- optional series tuning PMOS
    (gate at v_gt) -- selector on-resistance -- output node -- load
    resistance -- ground.

The solve is a scalar bisection on I.  For a trial current the chain is
walked top-down: each resistor drops I*R exactly, and each transistor
contributes the *minimum* source-drain voltage that lets it carry I at its
locally-known gate drive (triode inversion; infeasible once I exceeds the
square-law saturation cap).  The resulting head-room function

    f(I) = (top-down node above the selector) - I * (selector + load)

is strictly decreasing, positive at I = 0 and negative at the resistive
upper bound, so bisection always converges.  When a transistor saturates,
f jumps through zero and the bisection pins the saturation root instead;
either way the interval is shrunk to ~1e-16 A (far inside the 1 pA
contract) so that per-device current consistency holds to sub-picoamp
level.  Node voltages are then reassigned bottom-up so that a saturated
upper device absorbs the KVL slack while every lower device carries the
branch current exactly.

After each solve the transition rule is applied once; a fired transition
triggers exactly one re-solve in the new state.  In ``LATCHING`` mode that
is the end of it (a flip holds until the caller resets), while
``BISTABLE_STRICT`` re-checks the rule after the re-solve and raises
``AstableConfiguration`` if the flip immediately re-arms the reverse
condition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .devices import (
    MosfetParams,
    PhotodiodeParams,
    PtmParams,
    PtmState,
    photocurrent,
    ptm_resistance,
    ptm_transition,
)
from .errors import PtmpixError

MAX_ITERATIONS = 200
CURRENT_INTERVAL_TOL = 1e-16  # amperes; well below the 1 pA contract


class SolverError(PtmpixError):
    """Base class for operating-point failures."""


class NoConvergence(SolverError):
    """Bisection failed to shrink the current interval within the cap."""


class AstableConfiguration(SolverError):
    """Strict mode only: a transition immediately re-arms its reverse."""


class LatchMode(Enum):
    LATCHING = "latching"
    BISTABLE_STRICT = "bistable-strict"


class ResetMode(Enum):
    SOFT = "soft"
    HARD = "hard"


@dataclass(frozen=True)
class TcStage:
    """Optional series tuning transistor and its gate bias."""

    params: MosfetParams
    v_gt: float


@dataclass(frozen=True)
class PixelConfig:
    """Full description of the enhanced pixel stack."""

    vdd: float
    ptm: PtmParams
    x2: MosfetParams
    tc: TcStage | None
    selector_r_on: float
    r_load: float
    pd: PhotodiodeParams
    latch_mode: LatchMode = LatchMode.LATCHING

    def __post_init__(self) -> None:
        if self.vdd <= 0.0:
            raise ValueError("vdd must be positive")
        if self.selector_r_on < 0.0:
            raise ValueError("selector_r_on must be >= 0")
        if self.r_load <= 0.0:
            raise ValueError("r_load must be positive")
        if self.tc is not None and not 0.0 <= self.tc.v_gt <= self.vdd:
            raise ValueError("tc.v_gt must lie in [0, vdd]")


@dataclass(frozen=True)
class OperatingPoint:
    branch_current: float
    v_out: float
    node_voltages: dict[str, float]
    ptm_state: PtmState
    transitioned: bool


@dataclass(frozen=True)
class FrameSample:
    time: float
    v_pd: float
    branch_current: float
    ptm_state: PtmState
    v_out: float


@dataclass(frozen=True)
class FrameTrace:
    samples: tuple[FrameSample, ...]
    readout_v_out: float
    final_state: PtmState


@dataclass(frozen=True)
class ThreeTConfig:
    """Plain 3-transistor pixel used as the unenhanced baseline."""

    vdd: float
    reset_mode: ResetMode
    vth_x1: float
    sf: MosfetParams
    pd: PhotodiodeParams

    def __post_init__(self) -> None:
        if not self.vdd > self.vth_x1 >= 0.0:
            raise ValueError("requires vdd > vth_x1 >= 0")


def _vds_needed(kp: float, ov: float, i: float) -> float | None:
    # Minimum source-drain drop for a square-law device to carry i at
    # overdrive ov; None when it cannot (cutoff, or beyond the saturation cap).
    if i <= 0.0:
        return 0.0
    if ov <= 0.0:
        return None
    cap = 0.5 * kp * ov * ov
    if i > cap:
        return None
    disc = ov * ov - 2.0 * i / kp
    return ov - math.sqrt(disc if disc > 0.0 else 0.0)


def _source_from_drain(p: MosfetParams, v_gate: float, v_drain: float, i: float) -> float:
    # Source node that lets a P device carry i into a known drain voltage.
    if i <= 0.0:
        return v_drain
    ov_sat = math.sqrt(2.0 * i / p.kp)
    src = v_gate + p.vth + ov_sat
    if src - v_drain >= ov_sat:
        return src  # saturated: source pinned by gate drive alone
    g = v_drain - v_gate - p.vth
    return v_drain + (-g + math.sqrt(g * g + 2.0 * i / p.kp))


def _zero_op(cfg: PixelConfig, state: PtmState, x2_conducts: bool) -> OperatingPoint:
    # At I = 0 every conducting device drops 0 V; the first cutoff device
    # (top-down) absorbs the whole supply so device currents stay consistent.
    if x2_conducts:
        nodes = {"ptm_low": cfg.vdd, "x2_drain": cfg.vdd, "out": 0.0}
        if cfg.tc is not None:
            nodes["tc_drain"] = 0.0
    else:
        nodes = {"ptm_low": cfg.vdd, "x2_drain": 0.0, "out": 0.0}
        if cfg.tc is not None:
            nodes["tc_drain"] = 0.0
    return OperatingPoint(0.0, 0.0, nodes, state, False)


def _solve_fixed(cfg: PixelConfig, v_pd: float, state: PtmState) -> OperatingPoint:
    r_ptm = ptm_resistance(state, cfg.ptm)
    vdd = cfg.vdd
    x2 = cfg.x2
    tc = cfg.tc
    r_tail = cfg.selector_r_on + cfg.r_load

    if vdd - v_pd <= x2.vth:
        return _zero_op(cfg, state, x2_conducts=False)
    if tc is not None and vdd - tc.v_gt <= tc.params.vth:
        return _zero_op(cfg, state, x2_conducts=True)

    def headroom(i: float) -> float:
        n = vdd - i * r_ptm
        d = _vds_needed(x2.kp, (n - v_pd) - x2.vth, i)
        if d is None:
            return -math.inf
        n -= d
        if tc is not None:
            d = _vds_needed(tc.params.kp, (n - tc.v_gt) - tc.params.vth, i)
            if d is None:
                return -math.inf
            n -= d
        return n - i * r_tail

    lo = 0.0
    hi = vdd / (r_ptm + r_tail)
    for _ in range(MAX_ITERATIONS):
        if hi - lo < CURRENT_INTERVAL_TOL:
            break
        mid = 0.5 * (lo + hi)
        f = headroom(mid)
        if math.isnan(f):
            raise NoConvergence("head-room function returned NaN")
        if f > 0.0:
            lo = mid
        else:
            hi = mid
    else:
        raise NoConvergence(f"no convergence after {MAX_ITERATIONS} iterations")

    i = 0.5 * (lo + hi)
    v_out = i * cfg.r_load
    n3 = v_out + i * cfg.selector_r_on
    n2 = _source_from_drain(tc.params, tc.v_gt, n3, i) if tc is not None else n3
    n1 = vdd - i * r_ptm
    nodes = {"ptm_low": n1, "x2_drain": n2, "out": v_out}
    if tc is not None:
        nodes["tc_drain"] = n3
    return OperatingPoint(i, v_out, nodes, state, False)


def solve_stack_dc(cfg: PixelConfig, v_pd: float, state_in: PtmState) -> OperatingPoint:
    """Operating point of the stack for a given photodiode-node voltage.

    Solves in ``state_in``, applies the transition rule once to the solved
    current and, if it fires, re-solves exactly once in the new state (see
    the module docstring for the latch-mode semantics).
    """
    if not 0.0 <= v_pd <= cfg.vdd:
        raise ValueError("v_pd must lie in [0, vdd]")
    op = _solve_fixed(cfg, v_pd, state_in)
    new_state = ptm_transition(state_in, cfg.ptm, op.branch_current)
    if new_state is state_in:
        return op
    op2 = _solve_fixed(cfg, v_pd, new_state)
    if cfg.latch_mode is LatchMode.BISTABLE_STRICT:
        again = ptm_transition(new_state, cfg.ptm, op2.branch_current)
        if again is not new_state:
            raise AstableConfiguration(
                f"{state_in.value}->{new_state.value} flip at v_pd={v_pd:.6g} V "
                f"immediately re-arms the reverse transition "
                f"(I={op2.branch_current:.6g} A)"
            )
    return OperatingPoint(
        op2.branch_current, op2.v_out, op2.node_voltages, new_state, True
    )


def integrate_pd(v0: float, i_pd: float, c_pd: float, dt: float) -> float:
    """Linear photodiode discharge over dt, clamped at ground."""
    if v0 < 0.0 or i_pd < 0.0 or dt < 0.0:
        raise ValueError("v0, i_pd and dt must be >= 0")
    return max(0.0, v0 - i_pd * dt / c_pd)


def simulate_frame(cfg: PixelConfig, illum: float, n_steps: int) -> FrameTrace:
    """One reset/integrate/readout cycle.

    Reset charges the photodiode node to vdd (branch current collapses, so a
    low-to-high transition restores HRS).  Integration discharges the node in
    ``n_steps`` equal steps with persistent switch state; readout reports the
    output voltage at the end of the exposure.  ``final_state`` is the state
    after the next cycle's reset.
    """
    if n_steps < 2:
        raise ValueError("n_steps must be >= 2")
    i_pd = photocurrent(illum, cfg.pd)
    dt = cfg.pd.t_int / n_steps

    op = solve_stack_dc(cfg, cfg.vdd, PtmState.LRS)  # reset fires LHT
    state = op.ptm_state
    samples = [FrameSample(0.0, cfg.vdd, op.branch_current, state, op.v_out)]

    v_pd = cfg.vdd
    for k in range(1, n_steps + 1):
        v_pd = integrate_pd(v_pd, i_pd, cfg.pd.c_pd, dt)
        op = solve_stack_dc(cfg, v_pd, state)
        state = op.ptm_state
        samples.append(FrameSample(k * dt, v_pd, op.branch_current, state, op.v_out))

    readout = samples[-1].v_out
    final = solve_stack_dc(cfg, cfg.vdd, state).ptm_state
    return FrameTrace(tuple(samples), readout, final)


def three_t_reset_level(cfg: ThreeTConfig) -> float:
    """Photodiode-node voltage right after reset: a soft reset loses the reset
    transistor's threshold, a hard reset charges to the full supply."""
    return cfg.vdd - cfg.vth_x1 if cfg.reset_mode is ResetMode.SOFT else cfg.vdd


def simulate_3t_frame(cfg: ThreeTConfig, illum: float) -> float:
    """Readout of the plain 3-T pixel: reset level, linear discharge, then a
    source-follower threshold drop (clamped at ground)."""
    v0 = three_t_reset_level(cfg)
    v_end = integrate_pd(v0, photocurrent(illum, cfg.pd), cfg.pd.c_pd, cfg.pd.t_int)
    return max(0.0, v_end - cfg.sf.vth)


def frame_trace_csv(trace: FrameTrace) -> str:
    """Transient trace as CSV (LF line endings, 9 significant digits)."""
    lines = ["time_s,v_pd_v,i_branch_a,ptm_state,v_out_v"]
    for s in trace.samples:
        lines.append(
            f"{s.time:.9g},{s.v_pd:.9g},{s.branch_current:.9g},"
            f"{s.ptm_state.value},{s.v_out:.9g}"
        )
    return "\n".join(lines) + "\n"
