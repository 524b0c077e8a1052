"""
Check reports for property verification.

Every operation that verifies an inequality or identity returns a
CheckReport: a list of named checks with the measured value, the bound it
was compared against and whether it passed.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Any
import logging

logger = logging.getLogger(__name__)


@dataclass
class CheckReport:
    """
    Named collection of pass/fail checks plus free-form data.
    """
    name: str
    checks: List[Dict[str, Any]] = field(default_factory=list)
    data: Dict[str, Any] = field(default_factory=dict)

    def add_check(
        self,
        name: str,
        passed: bool,
        value: Optional[float] = None,
        bound: Optional[float] = None,
        detail: str = ""
    ):
        """Record the outcome of one check."""
        self.checks.append({
            'name': name,
            'passed': bool(passed),
            'value': value,
            'bound': bound,
            'detail': detail,
        })
        if not passed:
            logger.warning(f"{self.name}: check '{name}' failed (value={value}, bound={bound})")

    @property
    def passed(self) -> bool:
        return all(c['passed'] for c in self.checks)

    @property
    def failed_checks(self) -> List[str]:
        return [c['name'] for c in self.checks if not c['passed']]

    def merge(self, other: "CheckReport", prefix: Optional[str] = None):
        """Append the checks of another report, prefixing their names."""
        prefix = prefix if prefix is not None else other.name
        for c in other.checks:
            entry = dict(c)
            entry['name'] = f"{prefix}.{c['name']}"
            self.checks.append(entry)

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary."""
        return {
            'name': self.name,
            'passed': self.passed,
            'failed': self.failed_checks,
            'checks': self.checks,
            'data': self.data,
        }
