"""
Tests for JSON schema validation.
"""

import pytest
import jsonschema

from perisobolev.schema import (
    ALL_SCHEMAS,
    CONFIG_SCHEMA,
    EIGEN_RESULT_SCHEMA,
    ENERGY_REPORT_SCHEMA,
    SWEEP_RESULT_SCHEMA,
    validate_config_schema,
)
from perisobolev.models import EnergyReport, SweepResult


class TestSchema:
    """Tests for the configuration and result schemas."""

    def test_schemas_are_valid(self):
        """Test that every schema is valid JSON Schema."""
        assert validate_config_schema()

        for schema in ALL_SCHEMAS.values():
            jsonschema.Draft7Validator.check_schema(schema)

    def test_config_requires_run(self):
        """Test that the [run] section is required."""
        assert CONFIG_SCHEMA['required'] == ['run']

        with pytest.raises(jsonschema.ValidationError):
            jsonschema.validate({'grid': {'lo': [0.0], 'hi': [1.0], 'cells': [8]}}, CONFIG_SCHEMA)

    def test_order_out_of_range(self):
        """Test that s = 1.2 violates the schema."""
        data = {
            'run': {'command': 'seminorm'},
            'params': {'s': [1.2], 'p': [2.0], 'delta': [0.1]},
        }

        with pytest.raises(jsonschema.ValidationError):
            jsonschema.validate(data, CONFIG_SCHEMA)

    def test_unknown_key_rejected(self):
        """Test that sections do not accept unknown keys."""
        data = {'run': {'command': 'bbm', 'colour': 'blue'}}

        with pytest.raises(jsonschema.ValidationError):
            jsonschema.validate(data, CONFIG_SCHEMA)

    def test_energy_report_matches_model(self):
        """Test that a serialized EnergyReport validates."""
        report = EnergyReport(value=1.5, error_estimate=1e-6, convention="peridynamic_const",
                              params={'s': 0.5})

        jsonschema.validate(report.to_dict(), ENERGY_REPORT_SCHEMA)

    def test_sweep_result_matches_model(self):
        """Test that a serialized SweepResult validates."""
        sweep = SweepResult(parameter="delta", values=[0.2, 0.1], ratios=[2.4, 2.49],
                            target=2.5, extrapolated=2.58, relative_error=0.032)

        jsonschema.validate(sweep.to_dict(), SWEEP_RESULT_SCHEMA)

    def test_eigen_index_is_one(self):
        """Test that only the first eigenvalue is described."""
        data = {
            'index': 2, 'lambda1': 1.0, 'residual': 0.0, 'S_of_u': 1.0, 'k_of_u': 1.0,
            'iterations': 3, 'converged': True, 'flags': [],
        }

        with pytest.raises(jsonschema.ValidationError):
            jsonschema.validate(data, EIGEN_RESULT_SCHEMA)
