from dataclasses import replace

import numpy as np
import pytest

from ptmpix.circuit import LatchMode
from ptmpix.curve import extract_curve
from ptmpix.devices import ptm_nbo2
from ptmpix.image import apply_lut, michelson_cr, synth_low_contrast
from ptmpix.montecarlo import (
    McSummary,
    NoSuccessfulRows,
    VariationSpec,
    mc_csv,
    mc_summary,
    run_monte_carlo,
    sample_variant,
    summary_json,
)

ZERO = VariationSpec(0.0, 0.0, 0.0, 0.0)


@pytest.fixture(scope="module")
def image():
    return synth_low_contrast(64, 64, 131, 176, seed=7)


class TestSampleVariant:
    def test_zero_sigmas_return_nominal_exactly(self, ref_a_pixel):
        cfg = sample_variant(ref_a_pixel, ZERO, 3, 42)
        assert cfg == ref_a_pixel

    def test_same_seed_and_index_identical(self, ref_a_pixel):
        spec = VariationSpec()
        a = sample_variant(ref_a_pixel, spec, 11, 42)
        b = sample_variant(ref_a_pixel, spec, 11, 42)
        assert a == b

    def test_different_indices_differ(self, ref_a_pixel):
        spec = VariationSpec()
        assert sample_variant(ref_a_pixel, spec, 0, 42) != sample_variant(
            ref_a_pixel, spec, 1, 42
        )

    def test_three_sigma_truncation_brute_force(self, ref_a_pixel):
        spec = VariationSpec(sigma_rel_r_hrs=0.05)
        nominal = ref_a_pixel.ptm.r_hrs
        for idx in range(10_000):
            r = sample_variant(ref_a_pixel, spec, idx, 9).ptm.r_hrs
            assert abs(r - nominal) <= 0.15 * nominal + 1e-9

    def test_ordering_preserved_under_heavy_spread(self, ref_a_pixel):
        spec = VariationSpec(sigma_rel_r_hrs=0.3, sigma_rel_r_lrs=0.3)
        for idx in range(500):
            cfg = sample_variant(ref_a_pixel, spec, idx, 3)
            assert cfg.ptm.r_hrs > cfg.ptm.r_lrs > 0.0


class TestRunMonteCarlo:
    def test_row_count_and_order(self, ref_a_pixel, image):
        rows = run_monte_carlo(ref_a_pixel, ZERO, 7, 42, image)
        assert [r.index for r in rows] == list(range(7))

    def test_empty_batch(self, ref_a_pixel, image):
        assert run_monte_carlo(ref_a_pixel, ZERO, 0, 42, image) == []

    def test_zero_sigma_rows_equal_nominal_cr(self, ref_a_pixel, image):
        nominal_cr = michelson_cr(apply_lut(image, extract_curve(ref_a_pixel).lut))
        rows = run_monte_carlo(ref_a_pixel, ZERO, 5, 42, image)
        assert all(r.status == "ok" and r.cr == nominal_cr for r in rows)

    def test_worker_counts_agree_byte_for_byte(self, ref_a_pixel, image):
        spec = VariationSpec()
        serial = mc_csv(run_monte_carlo(ref_a_pixel, spec, 12, 42, image, workers=1))
        parallel = mc_csv(run_monte_carlo(ref_a_pixel, spec, 12, 42, image, workers=3))
        assert serial == parallel

    def test_failed_rows_recorded_not_raised(self, ref_a_pixel, image):
        # The NbO2-class switch in the strict-latch pixel flips into an
        # immediately re-armed reverse condition, so every row must fail
        # with a recorded reason instead of aborting the batch.
        astable = replace(ref_a_pixel, ptm=ptm_nbo2(),
                          latch_mode=LatchMode.BISTABLE_STRICT)
        rows = run_monte_carlo(astable, ZERO, 3, 42, image)
        assert [r.status for r in rows] == ["AstableConfiguration"] * 3
        assert all(r.cr is None for r in rows)
        with pytest.raises(NoSuccessfulRows):
            mc_summary(rows)


class TestSummary:
    def test_single_row(self, ref_a_pixel, image):
        rows = run_monte_carlo(ref_a_pixel, ZERO, 1, 1, image)
        s = mc_summary(rows)
        assert s.n == 1
        assert s.cr_min == s.cr_max == s.cr_mean == rows[0].cr
        assert s.cr_std == 0.0

    def test_hand_arithmetic(self):
        from ptmpix.montecarlo import McRow

        rows = [McRow(0, 1, 1, 1, 1, 0.2, "ok"), McRow(1, 1, 1, 1, 1, 0.4, "ok")]
        s = mc_summary(rows)
        assert s.cr_mean == pytest.approx(0.3, rel=1e-12)
        assert s.cr_std == pytest.approx(0.1, rel=1e-12)
        assert s.cr_min == 0.2 and s.cr_max == 0.4

    def test_summary_orders(self, ref_a_pixel, image):
        rows = run_monte_carlo(ref_a_pixel, VariationSpec(), 20, 42, image)
        s = mc_summary(rows)
        assert s.cr_min <= s.cr_mean <= s.cr_max
        assert all(0.0 <= r.cr <= 1.0 for r in rows if r.cr is not None)


class TestSerialization:
    def test_csv_header_and_failed_row_shape(self):
        from ptmpix.montecarlo import McRow

        rows = [
            McRow(0, 1000.0, 100.0, 1e-6, 0.2, 0.5, "ok"),
            McRow(1, None, None, None, None, None, "ResampleExhausted"),
        ]
        text = mc_csv(rows)
        lines = text.splitlines()
        assert lines[0] == "index,r_hrs_ohm,r_lrs_ohm,ic_hlt_a,vth_x2_v,cr,status"
        assert lines[1] == "0,1000,100,1e-06,0.2,0.500000,ok"
        assert lines[2] == "1,,,,,,ResampleExhausted"

    def test_summary_json_six_decimals(self):
        s = McSummary(5, 0.1, 0.9, 0.5, 0.2)
        assert summary_json(s) == (
            '{"n":5,"cr_min":0.100000,"cr_max":0.900000,'
            '"cr_mean":0.500000,"cr_std":0.200000}\n'
        )
