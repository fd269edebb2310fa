import json

import pytest

from ptmpix.config import (
    ConfigSyntaxError,
    InvalidValue,
    UnknownKey,
    dump_config,
    parse_config,
    ref_a,
)
from ptmpix.curve import FixedRange

from conftest import REF_A_JSON


class TestShippedConfig:
    def test_golden_file_equals_documented_defaults(self):
        assert parse_config(REF_A_JSON.read_bytes()) == ref_a()

    def test_golden_file_is_canonical(self):
        assert REF_A_JSON.read_text() == dump_config(ref_a())


class TestParsing:
    def test_minimal_config_fills_defaults(self):
        assert parse_config(b'{"schema_version": 1}') == ref_a()

    def test_round_trip_is_deterministic(self):
        text = dump_config(ref_a())
        again = dump_config(parse_config(text))
        assert text == again

    def test_schema_version_required(self):
        with pytest.raises(InvalidValue) as exc:
            parse_config(b"{}")
        assert exc.value.path == "schema_version"

    def test_invalid_json_is_syntax_error(self):
        with pytest.raises(ConfigSyntaxError):
            parse_config(b"{nope")

    def test_unknown_top_level_key(self):
        with pytest.raises(UnknownKey) as exc:
            parse_config(b'{"schema_version": 1, "vddd": 1.0}')
        assert exc.value.path == "vddd"

    def test_unknown_nested_key_names_full_path(self):
        with pytest.raises(UnknownKey) as exc:
            parse_config(b'{"schema_version": 1, "ptm": {"r_weird": 1}}')
        assert exc.value.path == "ptm.r_weird"

    def test_resistance_ordering_violation_names_path(self):
        doc = {"schema_version": 1, "ptm": {"r_hrs": 1000.0, "r_lrs": 5000.0}}
        with pytest.raises(InvalidValue) as exc:
            parse_config(json.dumps(doc))
        assert exc.value.path == "ptm.r_lrs"
        assert "ordering" in str(exc.value)

    def test_non_numeric_value_rejected(self):
        with pytest.raises(InvalidValue) as exc:
            parse_config(b'{"schema_version": 1, "vdd": "high"}')
        assert exc.value.path == "vdd"

    def test_bool_is_not_a_number(self):
        with pytest.raises(InvalidValue):
            parse_config(b'{"schema_version": 1, "r_load": true}')

    def test_unsupported_schema_version(self):
        with pytest.raises(InvalidValue):
            parse_config(b'{"schema_version": 2}')

    def test_tc_section_enables_tuning_stage(self):
        rc = parse_config(
            b'{"schema_version": 1, "tc": {"vth": 0.2, "kp": 0.03, "v_gt": 0.25}}'
        )
        assert rc.pixel.tc is not None
        assert rc.pixel.tc.v_gt == 0.25
        assert rc.pixel.tc.params.polarity == "P"

    def test_tc_gate_above_supply_rejected(self):
        with pytest.raises(InvalidValue) as exc:
            parse_config(b'{"schema_version": 1, "tc": {"v_gt": 1.5}}')
        assert exc.value.path == "tc.v_gt"

    def test_fixed_range_normalization(self):
        rc = parse_config(
            b'{"schema_version": 1,'
            b' "normalization": {"mode": "fixed-range", "lo": 0.0, "hi": 1.0}}'
        )
        assert rc.normalization == FixedRange(0.0, 1.0)

    def test_fixed_range_needs_hi_above_lo(self):
        with pytest.raises(InvalidValue) as exc:
            parse_config(
                b'{"schema_version": 1,'
                b' "normalization": {"mode": "fixed-range", "lo": 1.0, "hi": 0.5}}'
            )
        assert exc.value.path == "normalization.hi"

    def test_latch_mode_choices(self):
        rc = parse_config(b'{"schema_version": 1, "latch_mode": "bistable-strict"}')
        assert rc.pixel.latch_mode.value == "bistable-strict"
        with pytest.raises(InvalidValue):
            parse_config(b'{"schema_version": 1, "latch_mode": "sticky"}')

    def test_curve_points_floor(self):
        with pytest.raises(InvalidValue):
            parse_config(b'{"schema_version": 1, "curve_points": 1}')

    def test_negative_sigma_rejected(self):
        with pytest.raises(InvalidValue) as exc:
            parse_config(b'{"schema_version": 1, "mc": {"sigma_rel_r_hrs": -0.1}}')
        assert exc.value.path == "mc.sigma_rel_r_hrs"
