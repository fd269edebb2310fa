import math

import numpy as np
import pytest

from ptmpix.devices import (
    MosfetParams,
    PhotodiodeParams,
    PtmParams,
    PtmState,
    mosfet_drain_current,
    photocurrent,
    ptm_contrast_stretch,
    ptm_foreground,
    ptm_nbo2,
    ptm_resistance,
    ptm_transition,
    ptm_voltage_sweep,
)

ALL_PRESETS = [ptm_nbo2(), ptm_contrast_stretch(), ptm_foreground()]


class TestPtmResistance:
    def test_nbo2_preset_resistances(self):
        p = ptm_nbo2()
        assert ptm_resistance(PtmState.HRS, p) == 120_500.0
        assert ptm_resistance(PtmState.LRS, p) == 6_500.0

    def test_contrast_stretch_preset_hrs(self):
        assert ptm_resistance(PtmState.HRS, ptm_contrast_stretch()) == 80_000.0

    def test_metadata_never_affects_resistance(self):
        a = PtmParams(1e5, 1e4, 1e-6, 2e-6, l_ptm=5e-9, a_ptm=7.5625e-16)
        b = PtmParams(1e5, 1e4, 1e-6, 2e-6, l_ptm=9e-9, a_ptm=1e-15)
        for s in PtmState:
            assert ptm_resistance(s, a) == ptm_resistance(s, b)

    def test_invalid_ordering_rejected(self):
        with pytest.raises(ValueError):
            PtmParams(r_hrs=1e4, r_lrs=1e5, i_c_hlt=1e-6, i_c_lht=1e-6)


class TestPtmTransition:
    def test_hlt_fires_above_critical(self):
        assert ptm_transition(PtmState.HRS, ptm_nbo2(), 8.0e-6) is PtmState.LRS

    def test_lht_fires_below_critical(self):
        assert ptm_transition(PtmState.LRS, ptm_nbo2(), 50e-6) is PtmState.HRS

    def test_hrs_holds_below_both(self):
        assert ptm_transition(PtmState.HRS, ptm_nbo2(), 1e-6) is PtmState.HRS

    def test_negative_current_rejected(self):
        with pytest.raises(ValueError):
            ptm_transition(PtmState.HRS, ptm_nbo2(), -1e-9)

    @pytest.mark.parametrize("params", ALL_PRESETS)
    def test_idempotent_outside_bistable_band(self, params):
        # Between the two critical currents both rules can fire in turn, so
        # idempotence of the bare rule only holds outside that band.
        currents = [0.0, 0.5 * params.i_c_hlt, params.i_c_hlt,
                    params.i_c_lht, 2.0 * params.i_c_lht]
        for i in currents:
            for s in PtmState:
                once = ptm_transition(s, params, i)
                assert ptm_transition(once, params, i) is once

    @pytest.mark.parametrize("params", ALL_PRESETS)
    def test_never_lrs_below_both_criticals_from_hrs(self, params):
        ceiling = min(params.i_c_hlt, params.i_c_lht)
        for frac in np.linspace(0.0, 0.999, 25):
            assert ptm_transition(PtmState.HRS, params, frac * ceiling) is PtmState.HRS


class TestMosfet:
    P = MosfetParams("P", vth=0.4, kp=3e-3)

    def test_cutoff(self):
        assert mosfet_drain_current(self.P, 0.1, 0.5) == 0.0

    def test_saturation_value(self):
        # (kp/2) * (0.6 - 0.4)^2 = 60 uA
        assert mosfet_drain_current(self.P, 0.6, 0.5) == pytest.approx(60e-6, rel=1e-12)

    def test_triode_value(self):
        # kp * (0.2*0.1 - 0.1^2/2) = 45 uA
        assert mosfet_drain_current(self.P, 0.6, 0.1) == pytest.approx(45e-6, rel=1e-12)

    def test_continuous_at_region_boundary(self):
        ov = 0.2
        below = mosfet_drain_current(self.P, 0.4 + ov, ov * (1 - 1e-12))
        at = mosfet_drain_current(self.P, 0.4 + ov, ov)
        assert abs(below - at) < 1e-12

    def test_monotone_in_vgs(self):
        vgs = np.linspace(0.0, 1.2, 200)
        for vds in (0.05, 0.2, 1.0):
            ids = [mosfet_drain_current(self.P, v, vds) for v in vgs]
            assert all(b - a >= -1e-18 for a, b in zip(ids, ids[1:]))

    def test_monotone_in_vds(self):
        vds = np.linspace(0.0, 1.2, 200)
        for vgs in (0.3, 0.5, 0.9):
            ids = [mosfet_drain_current(self.P, vgs, v) for v in vds]
            assert all(b - a >= -1e-18 for a, b in zip(ids, ids[1:]))

    def test_negative_vds_rejected(self):
        with pytest.raises(ValueError):
            mosfet_drain_current(self.P, 0.6, -0.1)


class TestPhotocurrent:
    PD = PhotodiodeParams(c_pd=1e-14, t_int=1e-5, i_pd_max=1.2e-9)

    def test_zero_illumination(self):
        assert photocurrent(0.0, self.PD) == 0.0

    def test_full_scale(self):
        # i_pd_max chosen so illum = 1 discharges c_pd by vdd over t_int
        assert photocurrent(1.0, self.PD) == pytest.approx(1.2e-9, rel=1e-12)
        assert self.PD.i_pd_max * self.PD.t_int / self.PD.c_pd == pytest.approx(1.2)

    def test_linearity(self):
        assert photocurrent(0.5, self.PD) == pytest.approx(0.6e-9, rel=1e-12)

    @pytest.mark.parametrize("bad", [-0.1, 1.5])
    def test_domain_error(self, bad):
        with pytest.raises(ValueError):
            photocurrent(bad, self.PD)


class TestHysteresisCorners:
    @pytest.mark.parametrize("params", ALL_PRESETS)
    def test_strict_corner_ordering_all_presets(self, params):
        v_hlt = params.i_c_hlt * params.r_hrs
        v_lht = params.i_c_lht * params.r_lrs
        assert v_hlt > v_lht

    def test_nbo2_corner_products(self):
        p = ptm_nbo2()
        assert p.i_c_hlt * p.r_hrs == pytest.approx(0.8917, abs=5e-5)
        assert p.i_c_lht * p.r_lrs == pytest.approx(0.6500, abs=5e-5)

    def test_voltage_sweep_corners(self):
        trace = ptm_voltage_sweep(ptm_nbo2(), v_peak=1.2, steps_per_leg=4800)
        states = [s for _, _, s in trace]
        volts = [v for v, _, _ in trace]
        up_flip = next(k for k in range(1, len(states))
                       if states[k] is PtmState.LRS and states[k - 1] is PtmState.HRS)
        down_flip = next(k for k in range(up_flip + 1, len(states))
                         if states[k] is PtmState.HRS)
        assert volts[up_flip] == pytest.approx(0.8917, abs=1e-3)
        assert volts[down_flip] == pytest.approx(0.6500, abs=1e-3)
        assert volts[up_flip] > volts[down_flip]
