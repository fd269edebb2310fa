"""Run-configuration parsing, validation, and canonical serialization.

The config is a strict JSON document: unknown keys are rejected and every
violation names the full key path.  All fields except ``schema_version``
have defaults, and the defaults *are* the shipped reference configuration
(``configs/ref-A.json``), so ``{"schema_version": 1}`` normalizes to it.

Schema (SI units throughout):

    schema_version   int, must be 1
    vdd              supply voltage (V)
    ptm              {r_hrs, r_lrs (ohm), i_c_hlt, i_c_lht (A), l_ptm (m), a_ptm (m^2)}
    x2               {polarity ("P"), vth (V), kp (A/V^2)}
    tc               null, or {polarity ("P"), vth, kp, v_gt (V)}
    selector_r_on    selector on-resistance (ohm)
    r_load           load resistance (ohm)
    pd               {c_pd (F), t_int (s), i_pd_max (A)}
    latch_mode       "latching" | "bistable-strict"
    normalization    {"mode": "per-curve-min-max"} | {"mode": "fixed-range", lo, hi}
    curve_points     extraction points (>= 2)
    mc               {sigma_rel_r_hrs, sigma_rel_r_lrs, sigma_rel_i_c_hlt, sigma_abs_vth_x2}
    three_t          {reset_mode ("soft"|"hard"), vth_x1, sf {polarity, vth, kp}}
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .circuit import (
    LatchMode,
    PixelConfig,
    ResetMode,
    TcStage,
    ThreeTConfig,
)
from .curve import FixedRange, Normalization, PER_CURVE_MIN_MAX, PerCurveMinMax
from .devices import MosfetParams, PhotodiodeParams, PtmParams, ptm_foreground
from .errors import PtmpixError
from .montecarlo import VariationSpec

SCHEMA_VERSION = 1


class ConfigError(PtmpixError):
    pass


class ConfigSyntaxError(ConfigError):
    pass


class UnknownKey(ConfigError):
    def __init__(self, path: str):
        self.path = path
        super().__init__(f"unknown key: {path}")


class InvalidValue(ConfigError):
    def __init__(self, path: str, reason: str):
        self.path = path
        super().__init__(f"{path}: {reason}")


@dataclass(frozen=True)
class RunConfig:
    schema_version: int
    pixel: PixelConfig
    normalization: Normalization
    curve_points: int
    mc: VariationSpec
    three_t: ThreeTConfig


def ref_a() -> RunConfig:
    """The shipped reference configuration (all config defaults)."""
    pd = PhotodiodeParams(c_pd=1e-14, t_int=1e-5, i_pd_max=1.2e-9)
    pixel = PixelConfig(
        vdd=1.2,
        ptm=ptm_foreground(),
        x2=MosfetParams("P", vth=0.2, kp=0.03),
        tc=None,
        selector_r_on=500.0,
        r_load=40_000.0,
        pd=pd,
        latch_mode=LatchMode.LATCHING,
    )
    return RunConfig(
        schema_version=SCHEMA_VERSION,
        pixel=pixel,
        normalization=PER_CURVE_MIN_MAX,
        curve_points=256,
        mc=VariationSpec(),
        three_t=ThreeTConfig(
            vdd=1.2,
            reset_mode=ResetMode.SOFT,
            vth_x1=0.4,
            sf=MosfetParams("N", vth=0.4, kp=3e-4),
            pd=pd,
        ),
    )


def _require_mapping(obj, path: str) -> dict:
    if not isinstance(obj, dict):
        raise InvalidValue(path, f"expected an object, got {type(obj).__name__}")
    return obj


def _check_keys(d: dict, path: str, known: tuple[str, ...]) -> None:
    for key in d:
        if key not in known:
            raise UnknownKey(f"{path}.{key}" if path else key)


def _number(d: dict, path: str, key: str, default: float) -> float:
    if key not in d:
        return default
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise InvalidValue(f"{path}.{key}" if path else key, "expected a number")
    return float(v)


def _integer(d: dict, path: str, key: str, default: int) -> int:
    if key not in d:
        return default
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise InvalidValue(f"{path}.{key}" if path else key, "expected an integer")
    return v


def _string(d: dict, path: str, key: str, default: str, choices: tuple[str, ...]) -> str:
    v = d.get(key, default)
    full = f"{path}.{key}" if path else key
    if not isinstance(v, str):
        raise InvalidValue(full, "expected a string")
    if v not in choices:
        raise InvalidValue(full, f"must be one of {', '.join(choices)}")
    return v


def _parse_mosfet(d: dict, path: str, default: MosfetParams,
                  polarity: tuple[str, ...]) -> MosfetParams:
    d = _require_mapping(d, path)
    _check_keys(d, path, ("polarity", "vth", "kp"))
    pol = _string(d, path, "polarity", default.polarity, polarity)
    vth = _number(d, path, "vth", default.vth)
    kp = _number(d, path, "kp", default.kp)
    if vth < 0.0:
        raise InvalidValue(f"{path}.vth", "must be >= 0 (magnitude convention)")
    if kp <= 0.0:
        raise InvalidValue(f"{path}.kp", "must be positive")
    return MosfetParams(pol, vth, kp)


def parse_config(data: bytes | str) -> RunConfig:
    """Validate a JSON config document; defaults fill every omitted field."""
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ConfigSyntaxError(f"invalid JSON: {exc}") from None
    base = ref_a()
    root = _require_mapping(doc, "<root>")
    _check_keys(root, "", (
        "schema_version", "vdd", "ptm", "x2", "tc", "selector_r_on", "r_load",
        "pd", "latch_mode", "normalization", "curve_points", "mc", "three_t",
    ))

    if "schema_version" not in root:
        raise InvalidValue("schema_version", "required")
    version = _integer(root, "", "schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise InvalidValue("schema_version", f"unsupported version {version}")

    vdd = _number(root, "", "vdd", base.pixel.vdd)
    if vdd <= 0.0:
        raise InvalidValue("vdd", "must be positive")

    p = _require_mapping(root.get("ptm", {}), "ptm")
    _check_keys(p, "ptm", ("r_hrs", "r_lrs", "i_c_hlt", "i_c_lht", "l_ptm", "a_ptm"))
    dp = base.pixel.ptm
    r_hrs = _number(p, "ptm", "r_hrs", dp.r_hrs)
    r_lrs = _number(p, "ptm", "r_lrs", dp.r_lrs)
    i_c_hlt = _number(p, "ptm", "i_c_hlt", dp.i_c_hlt)
    i_c_lht = _number(p, "ptm", "i_c_lht", dp.i_c_lht)
    l_ptm = _number(p, "ptm", "l_ptm", dp.l_ptm)
    a_ptm = _number(p, "ptm", "a_ptm", dp.a_ptm)
    if r_hrs <= 0.0:
        raise InvalidValue("ptm.r_hrs", "must be positive")
    if not 0.0 < r_lrs < r_hrs:
        raise InvalidValue("ptm.r_lrs", "ordering violated: requires 0 < r_lrs < r_hrs")
    if i_c_hlt <= 0.0:
        raise InvalidValue("ptm.i_c_hlt", "must be positive")
    if i_c_lht <= 0.0:
        raise InvalidValue("ptm.i_c_lht", "must be positive")
    if l_ptm <= 0.0:
        raise InvalidValue("ptm.l_ptm", "must be positive")
    if a_ptm <= 0.0:
        raise InvalidValue("ptm.a_ptm", "must be positive")
    ptm = PtmParams(r_hrs, r_lrs, i_c_hlt, i_c_lht, l_ptm, a_ptm)

    x2 = _parse_mosfet(root.get("x2", {}), "x2", base.pixel.x2, ("P",))

    tc = None
    if root.get("tc") is not None:
        t = _require_mapping(root["tc"], "tc")
        _check_keys(t, "tc", ("polarity", "vth", "kp", "v_gt"))
        tc_default = MosfetParams("P", vth=0.2, kp=0.03)
        tc_params = _parse_mosfet(
            {k: v for k, v in t.items() if k != "v_gt"}, "tc", tc_default, ("P",)
        )
        v_gt = _number(t, "tc", "v_gt", 0.0)
        if not 0.0 <= v_gt <= vdd:
            raise InvalidValue("tc.v_gt", "must lie in [0, vdd]")
        tc = TcStage(tc_params, v_gt)

    selector_r_on = _number(root, "", "selector_r_on", base.pixel.selector_r_on)
    if selector_r_on < 0.0:
        raise InvalidValue("selector_r_on", "must be >= 0")
    r_load = _number(root, "", "r_load", base.pixel.r_load)
    if r_load <= 0.0:
        raise InvalidValue("r_load", "must be positive")

    pdm = _require_mapping(root.get("pd", {}), "pd")
    _check_keys(pdm, "pd", ("c_pd", "t_int", "i_pd_max"))
    c_pd = _number(pdm, "pd", "c_pd", base.pixel.pd.c_pd)
    t_int = _number(pdm, "pd", "t_int", base.pixel.pd.t_int)
    i_pd_max = _number(pdm, "pd", "i_pd_max", base.pixel.pd.i_pd_max)
    for name, v in (("c_pd", c_pd), ("t_int", t_int), ("i_pd_max", i_pd_max)):
        if v <= 0.0:
            raise InvalidValue(f"pd.{name}", "must be positive")
    pd = PhotodiodeParams(c_pd, t_int, i_pd_max)

    latch = _string(root, "", "latch_mode", base.pixel.latch_mode.value,
                    ("latching", "bistable-strict"))

    norm_doc = _require_mapping(
        root.get("normalization", {"mode": "per-curve-min-max"}), "normalization"
    )
    _check_keys(norm_doc, "normalization", ("mode", "lo", "hi"))
    mode = _string(norm_doc, "normalization", "mode", "per-curve-min-max",
                   ("per-curve-min-max", "fixed-range"))
    if mode == "per-curve-min-max":
        if "lo" in norm_doc or "hi" in norm_doc:
            raise InvalidValue("normalization.lo", "only valid for fixed-range mode")
        norm: Normalization = PER_CURVE_MIN_MAX
    else:
        lo = _number(norm_doc, "normalization", "lo", 0.0)
        hi = _number(norm_doc, "normalization", "hi", vdd)
        if not hi > lo:
            raise InvalidValue("normalization.hi", "must be greater than lo")
        norm = FixedRange(lo, hi)

    curve_points = _integer(root, "", "curve_points", base.curve_points)
    if curve_points < 2:
        raise InvalidValue("curve_points", "must be >= 2")

    m = _require_mapping(root.get("mc", {}), "mc")
    _check_keys(m, "mc", ("sigma_rel_r_hrs", "sigma_rel_r_lrs",
                          "sigma_rel_i_c_hlt", "sigma_abs_vth_x2"))
    sigmas = {}
    for name in ("sigma_rel_r_hrs", "sigma_rel_r_lrs",
                 "sigma_rel_i_c_hlt", "sigma_abs_vth_x2"):
        val = _number(m, "mc", name, getattr(base.mc, name))
        if val < 0.0:
            raise InvalidValue(f"mc.{name}", "must be >= 0")
        sigmas[name] = val
    mc = VariationSpec(**sigmas)

    t3 = _require_mapping(root.get("three_t", {}), "three_t")
    _check_keys(t3, "three_t", ("reset_mode", "vth_x1", "sf"))
    reset = _string(t3, "three_t", "reset_mode", base.three_t.reset_mode.value,
                    ("soft", "hard"))
    vth_x1 = _number(t3, "three_t", "vth_x1", base.three_t.vth_x1)
    if not vdd > vth_x1 >= 0.0:
        raise InvalidValue("three_t.vth_x1", "requires vdd > vth_x1 >= 0")
    sf = _parse_mosfet(t3.get("sf", {}), "three_t.sf", base.three_t.sf, ("N", "P"))

    pixel = PixelConfig(vdd, ptm, x2, tc, selector_r_on, r_load, pd,
                        LatchMode(latch))
    three_t = ThreeTConfig(vdd, ResetMode(reset), vth_x1, sf, pd)
    return RunConfig(version, pixel, norm, curve_points, mc, three_t)


def dump_config(rc: RunConfig) -> str:
    """Canonical JSON rendering; parse(dump(x)) == x and output is stable."""
    px = rc.pixel
    doc: dict = {
        "schema_version": rc.schema_version,
        "vdd": px.vdd,
        "ptm": {
            "r_hrs": px.ptm.r_hrs,
            "r_lrs": px.ptm.r_lrs,
            "i_c_hlt": px.ptm.i_c_hlt,
            "i_c_lht": px.ptm.i_c_lht,
            "l_ptm": px.ptm.l_ptm,
            "a_ptm": px.ptm.a_ptm,
        },
        "x2": {"polarity": px.x2.polarity, "vth": px.x2.vth, "kp": px.x2.kp},
        "tc": None if px.tc is None else {
            "polarity": px.tc.params.polarity,
            "vth": px.tc.params.vth,
            "kp": px.tc.params.kp,
            "v_gt": px.tc.v_gt,
        },
        "selector_r_on": px.selector_r_on,
        "r_load": px.r_load,
        "pd": {"c_pd": px.pd.c_pd, "t_int": px.pd.t_int, "i_pd_max": px.pd.i_pd_max},
        "latch_mode": px.latch_mode.value,
        "normalization": (
            {"mode": "per-curve-min-max"}
            if isinstance(rc.normalization, PerCurveMinMax)
            else {"mode": "fixed-range", "lo": rc.normalization.lo,
                  "hi": rc.normalization.hi}
        ),
        "curve_points": rc.curve_points,
        "mc": {
            "sigma_rel_r_hrs": rc.mc.sigma_rel_r_hrs,
            "sigma_rel_r_lrs": rc.mc.sigma_rel_r_lrs,
            "sigma_rel_i_c_hlt": rc.mc.sigma_rel_i_c_hlt,
            "sigma_abs_vth_x2": rc.mc.sigma_abs_vth_x2,
        },
        "three_t": {
            "reset_mode": rc.three_t.reset_mode.value,
            "vth_x1": rc.three_t.vth_x1,
            "sf": {
                "polarity": rc.three_t.sf.polarity,
                "vth": rc.three_t.sf.vth,
                "kp": rc.three_t.sf.kp,
            },
        },
    }
    return json.dumps(doc, indent=2) + "\n"
