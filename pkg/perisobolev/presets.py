"""
Named experiment presets.

Each preset is a complete set of configuration sections; it goes through
the same validation as a file (see config.parse_text) so presets and files
cannot drift apart.
"""

from typing import Any, Dict, List, Optional
import copy
import logging

from .config import RunConfig, parse_text, render_config
from .errors import ConfigError

logger = logging.getLogger(__name__)

PRESETS: Dict[str, Dict[str, Any]] = {
    'bbm_gaussian': {
        'description': "delta -> 0 limit for exp(-x^2), s = 0.5, p = 2",
        'sections': {
            'run': {'command': 'bbm'},
            'grid': {'lo': [-6.0], 'hi': [6.0], 'cells': [1200]},
            'function': {'kind': 'gaussian', 'center': [0.0], 'width': 1.0},
            'params': {'s': [0.5], 'p': [2.0], 'delta': [0.2]},
            'sweep': {'mode': 'delta', 'deltas': [0.2, 0.1, 0.05, 0.025]},
        },
    },
    'bbm_gaussian_p3': {
        'description': "delta -> 0 limit for exp(-x^2), s = 0.25, p = 3",
        'sections': {
            'run': {'command': 'bbm'},
            'grid': {'lo': [-6.0], 'hi': [6.0], 'cells': [1200]},
            'function': {'kind': 'gaussian', 'center': [0.0], 'width': 1.0},
            'params': {'s': [0.25], 'p': [3.0], 'delta': [0.2]},
            'sweep': {'mode': 'delta', 'deltas': [0.2, 0.1, 0.05, 0.025]},
        },
    },
    'bbm_varexp': {
        'description': "s -> 1 limit for a bump with p(x,y) in [1.8, 2.2]",
        'sections': {
            'run': {'command': 'bbm'},
            'grid': {'lo': [-1.5], 'hi': [1.5], 'cells': [600]},
            'function': {'kind': 'bump', 'center': [0.0], 'width': 1.0},
            'exponent': {'kind': 'separable_sum', 'base': 2.0, 'amplitude': 0.2, 'slope': 1.0},
            'params': {'s': [0.9], 'p': [2.0], 'delta': [1.0]},
            'quadrature': {'levels': 40},
            'sweep': {'mode': 's', 's_values': [0.9, 0.95, 0.99], 'rtol': 0.03},
        },
    },
    'gamma_2d': {
        'description': "recovery sequence with a vanishing horizon along x1",
        'sections': {
            'run': {'command': 'gamma'},
            'grid': {'lo': [-1.5, -1.5], 'hi': [1.5, 1.5], 'cells': [96, 96]},
            'function': {'kind': 'bump', 'center': [0.0, 0.0], 'width': 1.0},
            'params': {'s': [0.5, 0.6], 'p': [2.0, 2.5], 'delta': [0.0, 0.4]},
            'sweep': {'deltas': [0.4, 0.2, 0.1, 0.05]},
        },
    },
    'dirichlet_p2': {
        'description': "p = 2 Dirichlet problem on [0, 1], 64 nodes, delta = 0.5",
        'sections': {
            'run': {'command': 'solve'},
            'grid': {'lo': [0.0], 'hi': [1.0], 'cells': [64]},
            'domain': {'lo': [0.0], 'hi': [1.0]},
            'source': {'kind': 'constant', 'value': 1.0},
            'params': {'s': [0.5], 'p': [2.0], 'delta': [0.5]},
        },
    },
    'delta_study': {
        'description': "solutions converge to the local problem as delta = 2^-k -> 0",
        'sections': {
            'run': {'command': 'solve'},
            'grid': {'lo': [0.0], 'hi': [1.0], 'cells': [64]},
            'domain': {'lo': [0.0], 'hi': [1.0]},
            'source': {'kind': 'constant', 'value': 1.0},
            'params': {'s': [0.5], 'p': [2.0], 'delta': [0.5]},
            'solver': {'study_deltas': [0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625],
                       'vanishing': [0]},
        },
    },
    'eigen_p2': {
        'description': "first eigenvalue on [0, 1], s = 0.5, p = 2, 48 nodes",
        'sections': {
            'run': {'command': 'eigen'},
            'grid': {'lo': [0.0], 'hi': [1.0], 'cells': [48]},
            'domain': {'lo': [0.0], 'hi': [1.0]},
            'exponent': {'kind': 'constant', 'base': 2.0},
            'eigen': {'s': 0.5},
        },
    },
    'eigen_varexp': {
        'description': "first eigenvalue on [0, 1], s = 0.3, p(x,y) in [1.8, 2.2]",
        'sections': {
            'run': {'command': 'eigen'},
            'grid': {'lo': [0.0], 'hi': [1.0], 'cells': [40]},
            'domain': {'lo': [0.0], 'hi': [1.0]},
            'exponent': {'kind': 'separable_sum', 'base': 2.0, 'amplitude': 0.2, 'slope': 2.0},
            'eigen': {'s': 0.3},
        },
    },
    'checks_gaussian': {
        'description': "regularization and a-priori bounds for exp(-x^2)",
        'sections': {
            'run': {'command': 'check'},
            'grid': {'lo': [-6.0], 'hi': [6.0], 'cells': [600]},
            'function': {'kind': 'gaussian', 'center': [0.0], 'width': 1.0},
            'exponent': {'kind': 'separable_sum', 'base': 2.0, 'amplitude': 0.2, 'slope': 1.0},
            'params': {'s': [0.5], 'p': [2.0], 'delta': [0.2]},
        },
    },
}


def list_presets() -> List[str]:
    return sorted(PRESETS)


def preset_text(name: str) -> str:
    """INI text of a preset."""
    if name not in PRESETS:
        raise ConfigError([f"Unknown preset '{name}'; available: {', '.join(list_presets())}"])
    return render_config(PRESETS[name]['sections'])


def load_preset(name: str, command: Optional[str] = None,
                overrides: Optional[Dict[str, Dict[str, Any]]] = None) -> RunConfig:
    """
    Validated RunConfig for a preset.

    Args:
        name: Preset name
        command: Command the caller runs; must match the preset's
        overrides: Section values replacing the preset's

    Raises:
        ConfigError: For an unknown preset, a command mismatch or invalid overrides
    """
    if name not in PRESETS:
        raise ConfigError([f"Unknown preset '{name}'; available: {', '.join(list_presets())}"])
    sections = copy.deepcopy(PRESETS[name]['sections'])
    for section, values in (overrides or {}).items():
        sections.setdefault(section, {}).update(values)
    preset_command = sections['run']['command']
    if command is not None and command != preset_command:
        raise ConfigError([f"Preset '{name}' is for command '{preset_command}', not '{command}'"])
    logger.debug(f"Loading preset {name}")
    return parse_text(render_config(sections), source=f"preset:{name}")
