"""
Run configuration files.

A run is described by an INI file with one section per concern:

    [run]
    command = bbm

    [grid]
    lo = -6
    hi = 6
    cells = 1200

Values are coerced with the types declared in CONFIG_SCHEMA, omitted keys
take the schema defaults, and every problem found is reported at once in a
single ConfigError.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union
import configparser
import copy
import hashlib
import json
import logging

from jsonschema import Draft7Validator

from .errors import ConfigError
from .schema import CONFIG_SCHEMA

logger = logging.getLogger(__name__)

# Sections each command cannot run without
COMMAND_SECTIONS: Dict[str, Tuple[str, ...]] = {
    'norms': ('grid', 'function', 'exponent', 'norms'),
    'seminorm': ('grid', 'function', 'params'),
    'bbm': ('grid', 'function', 'params', 'sweep'),
    'gamma': ('grid', 'function', 'params', 'sweep'),
    'solve': ('grid', 'domain', 'source', 'params'),
    'eigen': ('grid', 'domain', 'exponent', 'eigen'),
    'check': ('grid', 'function', 'params'),
}

# Sections filled from defaults when absent
DEFAULTED_SECTIONS = ('quadrature', 'solver', 'check')


@dataclass
class RunConfig:
    """
    A validated run configuration.

    Attributes:
        command: Command to run
        sections: Validated sections with defaults filled in
        path: File the configuration came from
        out: Output directory (command line)
        threads: Worker threads; the command line overrides [run] threads
    """
    command: str
    sections: Dict[str, Dict[str, Any]]
    path: Optional[str] = None
    out: str = "."
    threads: int = 1
    _digest: Optional[str] = field(default=None, repr=False)

    def section(self, name: str) -> Dict[str, Any]:
        return self.sections.get(name, {})

    def has(self, name: str) -> bool:
        return name in self.sections

    @property
    def digest(self) -> str:
        """SHA-256 of the canonical JSON of the validated sections."""
        if self._digest is None:
            canonical = json.dumps(self.sections, sort_keys=True, separators=(',', ':'))
            self._digest = hashlib.sha256(canonical.encode('utf-8')).hexdigest()
        return self._digest

    def to_dict(self) -> Dict[str, Any]:
        return {'command': self.command, 'digest': self.digest, 'sections': self.sections}


def _split(text: str) -> List[str]:
    return [t for t in text.replace(',', ' ').split() if t]


def _coerce_scalar(text: str, kind: Optional[str]) -> Any:
    if kind == 'integer':
        return int(text)
    if kind == 'number':
        return float(text)
    if kind == 'boolean':
        lowered = text.strip().lower()
        if lowered in ('true', 'yes', 'on', '1'):
            return True
        if lowered in ('false', 'no', 'off', '0'):
            return False
        raise ValueError(f"not a boolean: {text!r}")
    return text.strip()


def coerce_value(text: str, spec: Dict[str, Any]) -> Any:
    """Convert an INI string to the type a schema property declares."""
    kind = spec.get('type')
    if kind == 'array':
        item_kind = spec.get('items', {}).get('type')
        return [_coerce_scalar(t, item_kind) for t in _split(text)]
    return _coerce_scalar(text, kind)


def _read(text: str, source: str) -> configparser.ConfigParser:
    parser = configparser.ConfigParser(strict=True, interpolation=None)
    try:
        parser.read_string(text, source=source)
    except configparser.Error as e:
        raise ConfigError([f"Malformed configuration: {e}"], source) from e
    return parser


def _format_error(error) -> str:
    path = list(error.absolute_path)
    if not path:
        where = "config"
    else:
        where = f"[{path[0]}]"
        if len(path) > 1:
            where += " " + ".".join(str(p) for p in path[1:])
    message = f"{where}: {error.message}"
    description = error.schema.get('description') if isinstance(error.schema, dict) else None
    if description and error.validator not in ('additionalProperties', 'required'):
        message += f" (expected {description})"
    return message


def _fill_defaults(data: Dict[str, Dict[str, Any]]):
    sections = CONFIG_SCHEMA['properties']
    for name in DEFAULTED_SECTIONS:
        data.setdefault(name, {})
    for name, values in data.items():
        props = sections.get(name, {}).get('properties', {})
        for key, spec in props.items():
            if key not in values and 'default' in spec:
                values[key] = copy.deepcopy(spec['default'])


def _cross_checks(data: Dict[str, Dict[str, Any]], command: str) -> List[str]:
    errors = []
    grid = data.get('grid', {})
    dim = len(grid.get('cells', []))
    for key in ('lo', 'hi'):
        if key in grid and len(grid[key]) != dim:
            errors.append(f"[grid] {key}: has {len(grid[key])} coordinates, cells has {dim}")
    params = data.get('params')
    if params and dim:
        for key in ('s', 'p', 'delta'):
            if key in params and len(params[key]) != dim:
                errors.append(f"[params] {key}: needs one entry per grid direction ({dim}), "
                              f"got {len(params[key])}")
        if params.get('axis', 0) >= dim:
            errors.append(f"[params] axis: {params['axis']} out of range for a {dim}-D grid")
    domain = data.get('domain')
    if domain and dim:
        for key in ('lo', 'hi'):
            if key in domain and len(domain[key]) != dim:
                errors.append(f"[domain] {key}: needs {dim} coordinates")
    if command == 'bbm' and 'sweep' in data:
        sweep = data['sweep']
        if sweep.get('mode') == 's' and 's_values' not in sweep:
            errors.append("[sweep] s_values: required when mode = s")
        if sweep.get('mode') == 's' and 'exponent' not in data:
            errors.append("[exponent]: section required by an s sweep")
        if sweep.get('mode') == 'delta' and 'deltas' not in sweep:
            errors.append("[sweep] deltas: required when mode = delta")
    if command == 'gamma' and 'sweep' in data and 'deltas' not in data['sweep']:
        errors.append("[sweep] deltas: required by command 'gamma'")
    if command == 'solve' and data.get('source', {}).get('kind') == 'function' \
            and 'function' not in data:
        errors.append("[function]: section required by source kind 'function'")
    return errors


def parse_text(text: str, source: str = "<string>") -> RunConfig:
    """
    Parse and validate configuration text.

    Raises:
        ConfigError: With every problem found
    """
    parser = _read(text, source)
    schema_sections = CONFIG_SCHEMA['properties']
    errors: List[str] = []
    if parser.defaults():
        errors.append("[DEFAULT]: shared defaults are not supported; repeat keys per section")

    data: Dict[str, Dict[str, Any]] = {}
    for name in parser.sections():
        props = schema_sections.get(name, {}).get('properties', {})
        values: Dict[str, Any] = {}
        for key, raw in parser.items(name, raw=True):
            if key in parser.defaults():
                continue
            spec = props.get(key)
            if spec is None:
                values[key] = raw
                continue
            try:
                values[key] = coerce_value(raw, spec)
            except ValueError:
                errors.append(f"[{name}] {key}: cannot read {raw!r} as {spec.get('type')}")
        data[name] = values

    _fill_defaults(data)
    validator = Draft7Validator(CONFIG_SCHEMA)
    for error in sorted(validator.iter_errors(data), key=lambda e: list(map(str, e.absolute_path))):
        errors.append(_format_error(error))

    command = data.get('run', {}).get('command')
    if command in COMMAND_SECTIONS:
        for needed in COMMAND_SECTIONS[command]:
            if needed not in data:
                errors.append(f"[{needed}]: section required by command '{command}'")
        errors.extend(_cross_checks(data, command))

    if errors:
        for message in errors:
            logger.debug(f"config error: {message}")
        raise ConfigError(errors, source)

    # threads never reach the digest or the echoed configuration
    threads = data['run'].pop('threads')
    return RunConfig(command=command, sections=data, path=source, threads=threads)


def parse_config(path: Union[str, Path]) -> RunConfig:
    """
    Read and validate a configuration file.

    Args:
        path: INI file

    Returns:
        RunConfig with defaults filled in

    Raises:
        ConfigError: If the file cannot be read or fails validation
    """
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as e:
        raise ConfigError([f"Cannot read configuration: {e}"], str(path)) from e
    config = parse_text(text, str(path))
    logger.info(f"Loaded {config.command} configuration from {path} (digest {config.digest[:12]})")
    return config


def render_config(sections: Dict[str, Dict[str, Any]]) -> str:
    """Write sections back as INI text; lists become space-separated values."""
    lines = []
    for name, values in sections.items():
        lines.append(f"[{name}]")
        for key, value in values.items():
            if isinstance(value, (list, tuple)):
                value = " ".join(str(v) for v in value)
            lines.append(f"{key} = {value}")
        lines.append("")
    return "\n".join(lines)
