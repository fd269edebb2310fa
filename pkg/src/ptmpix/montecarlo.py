"""Seeded device-variation studies over the full curve-to-contrast pipeline.

Every sample's randomness comes from a substream derived from
``(seed, index)``, never from a shared stream position, so results are
byte-identical no matter how the batch is scheduled or parallelized.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .circuit import PixelConfig
from .curve import Normalization, PER_CURVE_MIN_MAX, extract_curve
from .errors import PtmpixError
from .image import GrayImage, apply_lut, michelson_cr

MAX_REDRAWS = 100


class McError(PtmpixError):
    pass


class ResampleExhausted(McError):
    """A parameter failed truncation/validity redraws too many times."""


class NoSuccessfulRows(McError):
    pass


@dataclass(frozen=True)
class VariationSpec:
    """Gaussian spreads, truncated at +/-3 sigma by resampling.

    Switch parameters vary relatively (fraction of nominal); the follower
    threshold varies absolutely (volts).  Redraws also enforce positivity and
    the r_hrs > r_lrs ordering.
    """

    sigma_rel_r_hrs: float = 0.05
    sigma_rel_r_lrs: float = 0.05
    sigma_rel_i_c_hlt: float = 0.05
    sigma_abs_vth_x2: float = 0.03

    def __post_init__(self) -> None:
        for name in (
            "sigma_rel_r_hrs",
            "sigma_rel_r_lrs",
            "sigma_rel_i_c_hlt",
            "sigma_abs_vth_x2",
        ):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be >= 0")


@dataclass(frozen=True)
class McRow:
    index: int
    r_hrs: float | None
    r_lrs: float | None
    i_c_hlt: float | None
    vth_x2: float | None
    cr: float | None
    status: str


@dataclass(frozen=True)
class McSummary:
    n: int
    cr_min: float
    cr_max: float
    cr_mean: float
    cr_std: float


def _draw(rng, mean: float, sigma: float, relative: bool, valid) -> float:
    # Truncation (|z| <= 3) and constraint violations are both handled by
    # redrawing, never by clamping, so the distribution keeps its shape.
    for _ in range(MAX_REDRAWS):
        z = float(rng.standard_normal())
        if abs(z) > 3.0:
            continue
        value = mean * (1.0 + sigma * z) if relative else mean + sigma * z
        if valid(value):
            return value
    raise ResampleExhausted(
        f"no valid draw after {MAX_REDRAWS} attempts (mean={mean!r}, sigma={sigma!r})"
    )


def sample_variant(
    nominal: PixelConfig, spec: VariationSpec, index: int, seed: int
) -> PixelConfig:
    """Deterministic variant of the nominal config for one sample index."""
    rng = np.random.default_rng(np.random.SeedSequence((seed, index)))
    r_hrs = _draw(rng, nominal.ptm.r_hrs, spec.sigma_rel_r_hrs, True,
                  lambda v: v > 0.0)
    r_lrs = _draw(rng, nominal.ptm.r_lrs, spec.sigma_rel_r_lrs, True,
                  lambda v: 0.0 < v < r_hrs)
    i_c_hlt = _draw(rng, nominal.ptm.i_c_hlt, spec.sigma_rel_i_c_hlt, True,
                    lambda v: v > 0.0)
    vth = _draw(rng, nominal.x2.vth, spec.sigma_abs_vth_x2, False,
                lambda v: v >= 0.0)
    ptm = replace(nominal.ptm, r_hrs=r_hrs, r_lrs=r_lrs, i_c_hlt=i_c_hlt)
    return replace(nominal, ptm=ptm, x2=replace(nominal.x2, vth=vth))


def _mc_row(args) -> McRow:
    nominal, spec, index, seed, image, n_points, norm = args
    try:
        cfg = sample_variant(nominal, spec, index, seed)
    except ResampleExhausted as exc:
        return McRow(index, None, None, None, None, None, type(exc).__name__)
    try:
        curve = extract_curve(cfg, n_points, norm)
        cr = michelson_cr(apply_lut(image, curve.lut))
    except PtmpixError as exc:
        return McRow(index, cfg.ptm.r_hrs, cfg.ptm.r_lrs, cfg.ptm.i_c_hlt,
                     cfg.x2.vth, None, type(exc).__name__)
    return McRow(index, cfg.ptm.r_hrs, cfg.ptm.r_lrs, cfg.ptm.i_c_hlt,
                 cfg.x2.vth, cr, "ok")


def run_monte_carlo(
    nominal: PixelConfig,
    spec: VariationSpec,
    n: int,
    seed: int,
    image: GrayImage,
    n_points: int = 256,
    norm: Normalization = PER_CURVE_MIN_MAX,
    workers: int = 1,
) -> list[McRow]:
    """Sample -> extract -> apply -> score, for indices 0..n-1.

    Per-row failures are recorded in ``status`` rather than aborting the
    batch.  The result is a pure function of (nominal, spec, n, seed, image):
    worker count only affects wall time.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    jobs = [(nominal, spec, i, seed, image, n_points, norm) for i in range(n)]
    if workers <= 1 or n <= 1:
        return [_mc_row(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        rows = list(pool.map(_mc_row, jobs, chunksize=max(1, n // (workers * 4))))
    return rows


def mc_summary(rows) -> McSummary:
    """min / max / mean / population std of the successful rows' CR."""
    crs = [r.cr for r in rows if r.status == "ok" and r.cr is not None]
    if not crs:
        raise NoSuccessfulRows("no successful rows to summarize")
    arr = np.asarray(crs, dtype=float)
    return McSummary(
        n=len(crs),
        cr_min=float(arr.min()),
        cr_max=float(arr.max()),
        cr_mean=float(arr.mean()),
        cr_std=float(arr.std()),
    )


def mc_csv(rows) -> str:
    """Batch results as CSV; failed rows leave cr empty and carry the reason."""
    lines = ["index,r_hrs_ohm,r_lrs_ohm,ic_hlt_a,vth_x2_v,cr,status"]
    for r in rows:
        fmt = lambda v: "" if v is None else f"{v:.9g}"
        cr = "" if r.cr is None else f"{r.cr:.6f}"
        lines.append(
            f"{r.index},{fmt(r.r_hrs)},{fmt(r.r_lrs)},{fmt(r.i_c_hlt)},"
            f"{fmt(r.vth_x2)},{cr},{r.status}"
        )
    return "\n".join(lines) + "\n"


def summary_json(s: McSummary) -> str:
    return (
        f'{{"n":{s.n},"cr_min":{s.cr_min:.6f},"cr_max":{s.cr_max:.6f},'
        f'"cr_mean":{s.cr_mean:.6f},"cr_std":{s.cr_std:.6f}}}\n'
    )
