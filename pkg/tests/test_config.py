"""
Tests for configuration parsing and presets.
"""

import pytest

from perisobolev.config import coerce_value, parse_config, parse_text, render_config
from perisobolev.errors import ConfigError
from perisobolev.presets import list_presets, load_preset, preset_text

BBM = """
[run]
command = bbm

[grid]
lo = -6
hi = 6
cells = 600

[function]
kind = gaussian

[params]
s = 0.5
p = 2
delta = 0.2

[sweep]
deltas = 0.2, 0.1, 0.05, 0.025
"""

SOLVE = """
[run]
command = solve

[grid]
lo = 0
hi = 1
cells = 16

[domain]
lo = 0
hi = 1

[params]
s = 0.5
p = 2
delta = 0
"""


def errors_of(text: str):
    with pytest.raises(ConfigError) as info:
        parse_text(text)
    return info.value.errors


class TestParse:
    """Tests for parse_text and parse_config."""

    def test_valid_file_fills_defaults(self):
        """Test coercion and default filling."""
        config = parse_text(BBM)

        assert config.command == "bbm"
        assert config.section('grid')['cells'] == [600]
        assert config.section('params')['p'] == [2.0]
        assert config.section('params')['axis'] == 0
        assert config.section('function')['center'] == [0.0]
        assert config.section('sweep')['mode'] == "delta"
        assert config.has('quadrature') and config.has('solver') and config.has('check')
        assert config.threads == 1

    def test_threads_stay_out_of_digest(self):
        """Test that [run] threads is read but neither hashed nor echoed."""
        text = BBM.replace("command = bbm", "command = bbm\nthreads = {}")
        one, eight = parse_text(text.format(1)), parse_text(text.format(8))

        assert (one.threads, eight.threads) == (1, 8)
        assert one.digest == eight.digest == parse_text(BBM).digest
        assert 'threads' not in eight.section('run')

    def test_order_out_of_range(self):
        """Test the message for s = 1.2."""
        errors = errors_of(BBM.replace("s = 0.5", "s = 1.2"))

        assert len(errors) == 1
        assert errors[0].startswith("[params] s")
        assert "order in (0, 1)" in errors[0]

    def test_every_error_reported(self):
        """Test that several problems are collected at once."""
        text = BBM.replace("s = 0.5", "s = 1.2").replace("p = 2", "p = 0.5")
        errors = errors_of(text)

        assert len(errors) == 2

    def test_missing_section(self):
        """Test that a command names the sections it needs."""
        errors = errors_of(SOLVE)

        assert "[source]: section required by command 'solve'" in errors

    def test_duplicate_section(self):
        """Test that repeated sections are malformed."""
        errors = errors_of(BBM + "\n[grid]\ncells = 10\n")

        assert errors[0].startswith("Malformed configuration")

    def test_default_section_rejected(self):
        """Test that [DEFAULT] is not supported."""
        errors = errors_of("[DEFAULT]\nthreads = 2\n" + BBM)

        assert any(e.startswith("[DEFAULT]") for e in errors)

    def test_unreadable_number(self):
        """Test the coercion message."""
        errors = errors_of(BBM.replace("cells = 600", "cells = many"))

        assert "[grid] cells: cannot read 'many' as array" in errors

    def test_dimension_cross_check(self):
        """Test that vectors must match the grid dimension."""
        errors = errors_of(BBM.replace("lo = -6", "lo = -6 -6"))

        assert any(e.startswith("[grid] lo: has 2 coordinates") for e in errors)

    def test_s_sweep_needs_orders(self):
        """Test the mode-dependent requirement."""
        errors = errors_of(BBM.replace("deltas = 0.2, 0.1, 0.05, 0.025", "mode = s"))

        assert "[sweep] s_values: required when mode = s" in errors

    def test_parse_config_from_file(self, tmp_path):
        """Test reading a file and the missing-file error."""
        path = tmp_path / "bbm.ini"
        path.write_text(BBM, encoding='utf-8')

        assert parse_config(path).path == str(path)
        with pytest.raises(ConfigError, match="1 configuration error"):
            parse_config(tmp_path / "missing.ini")


class TestDigest:
    """Tests for the configuration digest."""

    def test_defaults_do_not_change_digest(self):
        """Test that spelling out a default gives the same digest."""
        plain = parse_text(BBM)
        explicit = parse_text(BBM.replace("[sweep]", "[sweep]\nmode = delta"))

        assert plain.digest == explicit.digest
        assert len(plain.digest) == 64

    def test_values_change_digest(self):
        """Test that a different horizon changes the digest."""
        assert parse_text(BBM).digest != parse_text(BBM.replace("delta = 0.2", "delta = 0.3")).digest

    def test_render_round_trip(self):
        """Test that rendered sections parse back to the same digest."""
        config = parse_text(BBM)

        assert parse_text(render_config(config.sections)).digest == config.digest


class TestCoercion:
    """Tests for coerce_value."""

    def test_array_separators(self):
        """Test commas and spaces in lists."""
        spec = {'type': 'array', 'items': {'type': 'number'}}

        assert coerce_value("1, 2 3", spec) == [1.0, 2.0, 3.0]

    def test_boolean(self):
        """Test boolean spellings."""
        assert coerce_value("yes", {'type': 'boolean'}) is True
        assert coerce_value("off", {'type': 'boolean'}) is False
        with pytest.raises(ValueError):
            coerce_value("maybe", {'type': 'boolean'})


class TestPresets:
    """Tests for the named presets."""

    @pytest.mark.parametrize("name", list_presets())
    def test_every_preset_validates(self, name):
        """Test that presets pass file validation."""
        config = load_preset(name)

        assert config.path == f"preset:{name}"
        assert preset_text(name).startswith("[run]")

    def test_command_mismatch(self):
        """Test that a preset only runs its own command."""
        with pytest.raises(ConfigError):
            load_preset("bbm_gaussian", "solve")

    def test_unknown_preset(self):
        """Test the unknown-name error."""
        with pytest.raises(ConfigError) as info:
            load_preset("nope")
        assert "Unknown preset 'nope'" in info.value.errors[0]

    def test_overrides(self):
        """Test that overrides replace preset values."""
        config = load_preset("dirichlet_p2", overrides={'grid': {'cells': [32]}})

        assert config.section('grid')['cells'] == [32]
