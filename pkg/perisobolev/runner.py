"""
Command registry and run driver.

Every command takes a validated RunConfig and returns a CommandOutcome; the
driver writes `<command>.json` plus the command's CSV files and maps the
outcome to an exit code:

    0  success, every embedded check passed
    1  computation finished but a check failed
    2  configuration or input error
    3  numerical failure (non-convergence, divergent quadrature)
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple
import json
import logging

import numpy as np

from . import __version__
from .bbm import bbm_delta_sweep, bbm_s_sweep_varexp, gamma_energy_convergence
from .config import RunConfig
from .dirichlet import DirichletProblem, delta_convergence_study, solve, weak_residual
from .eigen import EigenProblem, kk_inequalities, minimize_rayleigh, residual_check
from .energies.checks import inclusion_check, mollify_monotonicity_check, truncation_check
from .energies.directional import (
    anisotropic_peridynamic_norm,
    directional_modular_varexp,
    lemma_bound,
    local_energy,
    peridynamic_energy,
    peridynamic_seminorm,
)
from .energies.quadrature import SingularQuadSpec
from .errors import (
    ConfigError,
    NonConvergenceError,
    QuadratureError,
    RejectionError,
    SupercriticalError,
)
from .exponents import (
    AnisotropyParams,
    ExponentField,
    ScalarExponentField,
    critical_exponent,
    validate_P,
)
from .grids.csv_io import write_grid_function, write_table
from .grids.functions import GridFunction, TestFunction
from .grids.lattice import Box, UniformGrid
from .grids.operations import sample
from .luxemburg import luxemburg_norm, modular, norm_modular_relations
from .modular import ModularKind
from .performance import PerformanceMonitor, profile_run
from .settings import MONOTONICITY_RTOL
from .validation import CheckReport

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


@dataclass
class CommandOutcome:
    """
    What a command produced.

    Attributes:
        summary: JSON-serializable results
        passed: Every embedded check passed
        converged: Iterative parts converged
        tables: CSV name -> (header, rows)
        functions: CSV name -> grid function
        iterations: Solver iterations, for profiling
        evaluations: Sweep points evaluated, for profiling
    """
    summary: Dict[str, Any]
    passed: bool = True
    converged: bool = True
    tables: Dict[str, Tuple[List[str], List[Sequence[Any]]]] = field(default_factory=dict)
    functions: Dict[str, GridFunction] = field(default_factory=dict)
    iterations: int = 0
    evaluations: int = 0

    @property
    def exit_code(self) -> int:
        if not self.converged:
            return EXIT_NUMERICAL
        return EXIT_OK if self.passed else EXIT_CHECK_FAILED


class CommandRegistry:
    """
    Registry of runnable commands.
    """

    _commands: Dict[str, Callable[[RunConfig], CommandOutcome]] = {}

    @classmethod
    def register(cls, name: str, func: Callable[[RunConfig], CommandOutcome]) -> None:
        if name in cls._commands:
            raise ValueError(f"Command '{name}' is already registered")
        cls._commands[name] = func

    @classmethod
    def get(cls, name: str) -> Optional[Callable[[RunConfig], CommandOutcome]]:
        return cls._commands.get(name)

    @classmethod
    def list_commands(cls) -> List[str]:
        return list(cls._commands.keys())


def register_command(name: str):
    """
    Decorator registering a command function.

    Usage:
        @register_command("bbm")
        def run_bbm(config: RunConfig) -> CommandOutcome:
            ...
    """
    def decorator(func: Callable[[RunConfig], CommandOutcome]):
        CommandRegistry.register(name, func)
        return func
    return decorator


# ----------------------------------------------------------------------
# builders

def build_grid(config: RunConfig) -> UniformGrid:
    g = config.section('grid')
    return UniformGrid(Box(g['lo'], g['hi']), g['cells'])


def build_function(config: RunConfig, grid: UniformGrid) -> GridFunction:
    spec = dict(config.section('function'))
    return sample(TestFunction(**spec), grid)


def build_field(config: RunConfig) -> ExponentField:
    if config.has('exponent'):
        return ExponentField(**config.section('exponent'))
    params = config.section('params')
    return ExponentField.constant(params['p'][params.get('axis', 0)])


def build_params(config: RunConfig) -> AnisotropyParams:
    p = config.section('params')
    return AnisotropyParams(tuple(p['s']), tuple(p['p']), tuple(p['delta']))


def build_quad(config: RunConfig) -> SingularQuadSpec:
    return SingularQuadSpec(**config.section('quadrature'))


def build_domain(config: RunConfig) -> Box:
    d = config.section('domain')
    return Box(d['lo'], d['hi'])


def _rows(table: Sequence[Dict[str, Any]]) -> Tuple[List[str], List[List[Any]]]:
    if not table:
        return [], []
    header = list(table[0].keys())
    return header, [[row[k] for k in header] for row in table]


# ----------------------------------------------------------------------
# commands

@register_command("norms")
def run_norms(config: RunConfig) -> CommandOutcome:
    """Modular, Luxemburg norm and norm-modular relations of one function."""
    grid = build_grid(config)
    u = build_function(config, grid)
    field = build_field(config)
    kind = ModularKind(config.section('norms')['kind'])
    params: Dict[str, Any] = {}
    if kind in (ModularKind.LEBESGUE_PLAIN, ModularKind.LEBESGUE_WEIGHTED):
        exponent: Any = ScalarExponentField.diagonal_of(field)
        if config.has('domain'):
            params['omega'] = build_domain(config)
    else:
        if not config.has('params'):
            raise RejectionError(f"Modular kind '{kind.value}' needs a [params] section")
        p = config.section('params')
        axis = p['axis']
        exponent = field
        params.update(s=p['s'][axis], quad=build_quad(config))
        if kind == ModularKind.GAGLIARDO:
            params['omega'] = build_domain(config) if config.has('domain') else grid.box
        else:
            params['axis'] = axis
        if kind == ModularKind.PERIDYNAMIC_CONST:
            params['delta'] = p['delta'][axis]
    report = modular(u, kind, exponent, **params)
    norm = luxemburg_norm(u, kind, exponent, rtol=config.section('norms')['rtol'], **params)
    relations = norm_modular_relations(u, kind, exponent, **params)
    valid, errors = report.validate()
    norm_valid, norm_errors = norm.validate()
    return CommandOutcome(
        summary={
            'modular': report.to_dict(),
            'luxemburg': norm.to_dict(),
            'relations': relations.to_dict(),
            'errors': errors + norm_errors,
        },
        passed=valid and norm_valid and relations.passed and not report.flagged,
    )


@register_command("seminorm")
def run_seminorm(config: RunConfig) -> CommandOutcome:
    """Directional seminorms and energies for every direction."""
    grid = build_grid(config)
    u = build_function(config, grid)
    params = build_params(config)
    quad = build_quad(config)
    field = ExponentField(**config.section('exponent')) if config.has('exponent') else None

    reports, rows = [], []
    passed = True
    for i, (s, p, d) in enumerate(zip(params.svec, params.pvec, params.dvec)):
        entry: Dict[str, Any] = {'axis': i, 's': s, 'p': p, 'delta': d,
                                 'local_energy': local_energy(u, i, s, p)}
        if d > 0:
            report = peridynamic_seminorm(u, i, s, p, d, quad)
            valid, _ = report.validate()
            passed = passed and valid and not report.flagged
            entry['seminorm'] = report.to_dict()
            entry['energy'] = peridynamic_energy(u, i, s, p, d, quad)
            rows.append([i, 'peridynamic_const', report.value, report.error_estimate])
        if field is not None:
            varexp = directional_modular_varexp(u, i, s, field, quad)
            valid, _ = varexp.validate()
            passed = passed and valid and not varexp.flagged
            entry['varexp'] = varexp.to_dict()
            rows.append([i, 'directional_varexp', varexp.value, varexp.error_estimate])
        reports.append(entry)

    summary: Dict[str, Any] = {'directions': reports}
    try:
        summary['critical_exponent'] = critical_exponent(params, grid.dim).to_dict()
    except SupercriticalError as e:
        summary['critical_exponent'] = {'error': str(e)}
    if all(d > 0 for d in params.dvec):
        summary['anisotropic_norm'] = anisotropic_peridynamic_norm(u, params, quad)
    return CommandOutcome(
        summary=summary,
        passed=passed,
        tables={'seminorms': (['axis', 'convention', 'value', 'error_estimate'], rows)},
    )


@register_command("bbm")
def run_bbm(config: RunConfig) -> CommandOutcome:
    """delta -> 0 or s -> 1 sweep against the local limit."""
    grid = build_grid(config)
    u = build_function(config, grid)
    p = config.section('params')
    sweep = config.section('sweep')
    quad = build_quad(config)
    axis = p['axis']
    if sweep['mode'] == 'delta':
        result = bbm_delta_sweep(u, axis, p['s'][axis], p['p'][axis], sweep['deltas'], quad,
                                 rtol=sweep['rtol'], threads=config.threads)
    else:
        result = bbm_s_sweep_varexp(u, build_field(config), sweep['s_values'], axis, quad,
                                    rtol=sweep['rtol'], threads=config.threads)
    valid, errors = result.validate()
    summary = result.to_dict()
    summary['errors'] = errors
    return CommandOutcome(
        summary=summary,
        passed=valid and result.passed,
        tables={'sweep': _rows(result.rows())},
        evaluations=len(result.rows()),
    )


@register_command("gamma")
def run_gamma(config: RunConfig) -> CommandOutcome:
    """Recovery-sequence energies along vanishing horizons."""
    grid = build_grid(config)
    u = build_function(config, grid)
    params = build_params(config)
    sweep = config.section('sweep')
    report = gamma_energy_convergence(u, params, sweep['deltas'], build_quad(config),
                                      rtol=sweep['gamma_rtol'], threads=config.threads)
    header = ['delta'] + [f"J{i + 1}" for i in range(params.dim)] + ['total']
    rows = [[d] + list(terms) + [total] for d, terms, total in
            zip(report.data['deltas'], report.data['terms'], report.data['totals'])]
    return CommandOutcome(summary=report.to_dict(), passed=report.passed,
                          tables={'gamma': (header, rows)},
                          evaluations=len(rows))


def _source(config: RunConfig, grid: UniformGrid, omega: Box) -> GridFunction:
    src = config.section('source')
    if src['kind'] == 'function':
        return build_function(config, grid)
    inside = omega.contains(grid.nodes()).reshape(grid.shape)
    return GridFunction(grid, np.where(inside, src['value'], 0.0), provenance="constant_source")


@register_command("solve")
def run_solve(config: RunConfig) -> CommandOutcome:
    """Dirichlet problem, optionally followed by a delta -> 0 convergence study."""
    grid = build_grid(config)
    omega = build_domain(config)
    opts = config.section('solver')
    prob = DirichletProblem(grid, omega, _source(config, grid, omega), build_params(config),
                            build_quad(config), opts['composition'], opts.get('mu'),
                            opts['interpolation'])
    solve_kw = {'tol': opts['tol'], 'max_iter': opts['max_iter'],
                'stagnation_rtol': opts['stagnation_rtol']}
    result = solve(prob, **solve_kw)
    valid, errors = result.validate(opts['tol'])
    summary = {'problem': prob.to_dict(), 'result': result.to_dict(),
               'weak_residual': weak_residual(result.u, prob), 'errors': errors}
    passed = valid
    if 'study_deltas' in opts:
        vanishing = opts.get('vanishing') or list(range(grid.dim))
        study = delta_convergence_study(prob, vanishing, opts['study_deltas'],
                                        rtol=opts['study_rtol'], threads=config.threads,
                                        **solve_kw)
        summary['delta_study'] = study.to_dict()
        passed = passed and study.passed
    history = [[k, e, g] for k, (e, g) in
               enumerate(zip(result.energy_history, result.grad_norm_history))]
    return CommandOutcome(
        summary=summary,
        passed=passed,
        converged=result.converged,
        tables={'history': (['iteration', 'energy', 'grad_norm'], history)},
        functions={'solution': result.u},
        iterations=result.iterations,
    )


@register_command("eigen")
def run_eigen(config: RunConfig) -> CommandOutcome:
    """First eigenvalue of the homogeneous Rayleigh quotient."""
    grid = build_grid(config)
    opts = config.section('eigen')
    prob = EigenProblem(grid, build_domain(config), opts['s'], build_field(config),
                        build_quad(config))
    result = minimize_rayleigh(prob, tol=opts['tol'], max_iter=opts['max_iter'])
    residual = residual_check(result.u, result.lambda1, prob)
    rng = np.random.default_rng(0)
    probe = prob.lift(rng.standard_normal(prob.free.size))
    kk = kk_inequalities(prob, result.u, probe)
    valid, errors = result.validate(opts['tol'])
    history = [[k, h, t] for k, (h, t) in
               enumerate(zip(result.history, [0.0] + result.step_sizes))]
    return CommandOutcome(
        summary={'problem': prob.to_dict(), 'result': result.to_dict(),
                 'residual_check': residual.to_dict(), 'kk_inequalities': kk.to_dict(),
                 'errors': errors},
        passed=valid and residual.passed and kk.passed,
        converged=result.converged,
        tables={'history': (['iteration', 'rayleigh', 'step'], history)},
        functions={'eigenfunction': result.u},
        iterations=result.iterations,
    )


@register_command("check")
def run_check(config: RunConfig) -> CommandOutcome:
    """Property checks on one function."""
    grid = build_grid(config)
    u = build_function(config, grid)
    params = build_params(config)
    quad = build_quad(config)
    field = build_field(config)
    axis = config.section('params')['axis']
    s, p, d = params.svec[axis], params.pvec[axis], params.dvec[axis]
    combined = CheckReport(name="check")

    for name in config.section('check')['checks']:
        if name == "condition_P":
            combined.merge(validate_P(field, s, grid.dim))
        elif name == "critical_exponent":
            report = CheckReport(name="critical_exponent")
            try:
                crit = critical_exponent(params, grid.dim)
                report.add_check("subcritical", True, value=crit.spbar, bound=float(grid.dim))
                report.add_check("pmax_below_pstar", crit.pmax_subcritical,
                                 value=params.p_max, bound=crit.pstar)
            except SupercriticalError as e:
                report.add_check("subcritical", False, value=params.mean_sp,
                                 bound=float(grid.dim), detail=str(e))
            combined.merge(report)
        elif name == "norm_modular":
            combined.merge(norm_modular_relations(u, ModularKind.LEBESGUE_WEIGHTED,
                                                  ScalarExponentField.diagonal_of(field)))
        elif name == "mollify":
            combined.merge(mollify_monotonicity_check(u, axis, s, p, d, quad=quad))
        elif name == "truncation":
            combined.merge(truncation_check(u, axis, s, p, d, quad=quad))
        elif name == "inclusion":
            combined.merge(inclusion_check(u, axis, s, field, quad))
        elif name == "lemma_bound":
            report = CheckReport(name="lemma_bound")
            value = peridynamic_seminorm(u, axis, s, p, d, quad).value
            bound = lemma_bound(u, axis, s, p, d)
            report.add_check("seminorm_below_bound", value <= bound * (1.0 + MONOTONICITY_RTOL),
                             value=value, bound=bound)
            combined.merge(report)

    rows = [[c['name'], c['passed'], c['value'], c['bound']] for c in combined.checks]
    return CommandOutcome(summary=combined.to_dict(), passed=combined.passed,
                          tables={'checks': (['check', 'passed', 'value', 'bound'], rows)})


# ----------------------------------------------------------------------
# driver

def _jsonable(obj: Any) -> Any:
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (tuple, set)):
        return list(obj)
    raise TypeError(f"Object of type {type(obj).__name__} is not JSON serializable")


def dump_json(data: Dict[str, Any]) -> str:
    """Stable JSON: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(data, sort_keys=True, indent=2, default=_jsonable) + "\n"


def write_outputs(config: RunConfig, outcome: CommandOutcome, exit_code: int) -> List[Path]:
    """
    Write `<command>.json` and the command's CSV files into config.out.

    Returns:
        Paths written
    """
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    comments = [f"digest={config.digest}", f"version={__version__}",
                f"command={config.command}"]
    written = []

    payload = {
        'command': config.command,
        'digest': config.digest,
        'version': __version__,
        'exit_code': exit_code,
        'passed': outcome.passed,
        'converged': outcome.converged,
        'config': config.sections,
        'result': outcome.summary,
    }
    path = out / f"{config.command}.json"
    path.write_text(dump_json(payload), encoding='utf-8')
    written.append(path)

    for name, (header, rows) in outcome.tables.items():
        path = out / f"{config.command}_{name}.csv"
        write_table(path, header, rows, header_comments=comments)
        written.append(path)
    for name, u in outcome.functions.items():
        path = out / f"{config.command}_{name}.csv"
        write_grid_function(u, path, header_comments=comments)
        written.append(path)
    return written


def run(config: RunConfig, monitor: Optional[PerformanceMonitor] = None) -> int:
    """
    Run a configuration and write its outputs.

    Returns:
        Exit code (0 ok, 1 check failed, 2 configuration error, 3 numerical failure)
    """
    command = CommandRegistry.get(config.command)
    if command is None:
        logger.error(f"Unknown command '{config.command}'")
        return EXIT_CONFIG
    monitor = monitor or PerformanceMonitor()
    try:
        with profile_run(config.command, monitor):
            outcome = command(config)
            monitor.update_metrics(config.command, evaluations=outcome.evaluations,
                                   iterations=outcome.iterations)
    except (ConfigError, RejectionError) as e:
        logger.error(f"{config.command}: invalid input: {e}")
        return EXIT_CONFIG
    except (NonConvergenceError, QuadratureError) as e:
        logger.error(f"{config.command}: numerical failure: {e}")
        return EXIT_NUMERICAL

    exit_code = outcome.exit_code
    paths = write_outputs(config, outcome, exit_code)
    for path in paths:
        logger.info(f"Wrote {path}")
    return exit_code
