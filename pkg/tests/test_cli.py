"""
Tests for the command-line interface.
"""

import json

from click.testing import CliRunner

from perisobolev import __version__
from perisobolev.cli import main

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

[source]
value = 1

[params]
s = 0.5
p = 2
delta = 0
"""


class TestCli:
    """Tests for the click group."""

    def test_version(self):
        """Test --version."""
        result = CliRunner().invoke(main, ['--version'])

        assert result.exit_code == 0
        assert __version__ in result.output

    def test_schema_is_json(self):
        """Test that `schema` prints the configuration schema."""
        result = CliRunner().invoke(main, ['schema'])

        assert result.exit_code == 0
        assert json.loads(result.output)['title'] == "RunConfig"

    def test_presets_listing(self):
        """Test the preset table."""
        result = CliRunner().invoke(main, ['presets'])

        assert result.exit_code == 0
        assert "bbm_gaussian" in result.output

    def test_preset_text(self):
        """Test printing one preset as INI."""
        result = CliRunner().invoke(main, ['presets', 'eigen_p2'])

        assert result.exit_code == 0
        assert "command = eigen" in result.output

    def test_unknown_preset(self):
        """Test exit code 2 for an unknown preset name."""
        result = CliRunner().invoke(main, ['presets', 'nope'])

        assert result.exit_code == 2

    def test_solve_from_file(self, tmp_path):
        """Test a full run from a configuration file."""
        config = tmp_path / "solve.ini"
        config.write_text(SOLVE, encoding='utf-8')
        out = tmp_path / "results"
        result = CliRunner().invoke(main, ['solve', '--config', str(config), '--out', str(out)])

        assert result.exit_code == 0
        assert (out / "solve.json").exists()

    def test_invalid_file(self, tmp_path):
        """Test exit code 2 for a configuration error."""
        config = tmp_path / "bad.ini"
        config.write_text(SOLVE.replace("s = 0.5", "s = 1.2"), encoding='utf-8')
        result = CliRunner().invoke(main, ['solve', '--config', str(config), '-o', str(tmp_path)])

        assert result.exit_code == 2
        assert not (tmp_path / "solve.json").exists()

    def test_command_mismatch(self, tmp_path):
        """Test that a solve file cannot run as eigen."""
        config = tmp_path / "solve.ini"
        config.write_text(SOLVE, encoding='utf-8')
        result = CliRunner().invoke(main, ['eigen', '--config', str(config), '-o', str(tmp_path)])

        assert result.exit_code == 2

    def test_needs_config_or_preset(self, tmp_path):
        """Test that a command without input is a configuration error."""
        result = CliRunner().invoke(main, ['bbm', '-o', str(tmp_path)])

        assert result.exit_code == 2
