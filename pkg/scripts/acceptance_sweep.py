#!/usr/bin/env python3
"""
Acceptance sweep over the named presets.

Runs every preset (or a chosen subset) through the run driver, writes each
run's outputs under its own directory and logs a pass/fail summary.

Usage:
    python scripts/acceptance_sweep.py
    python scripts/acceptance_sweep.py --preset bbm_gaussian --preset eigen_p2
    python scripts/acceptance_sweep.py --out acceptance --threads 4
"""

import sys
import argparse
import logging
from pathlib import Path
import json

sys.path.insert(0, str(Path(__file__).parent.parent))

from perisobolev.errors import ConfigError
from perisobolev.performance import PerformanceMonitor
from perisobolev.presets import PRESETS, list_presets, load_preset
from perisobolev.runner import run

LOG_FILE = "acceptance_sweep.log"
SUMMARY_FILE = "acceptance_summary.json"


def setup_logging(verbose=False):
    """Configure logging."""
    level = logging.DEBUG if verbose else logging.INFO

    logging.basicConfig(
        level=level,
        format='%(asctime)s [%(levelname)s] %(message)s',
        handlers=[
            logging.FileHandler(LOG_FILE),
            logging.StreamHandler()
        ]
    )

    return logging.getLogger(__name__)


def run_preset(name: str, out: Path, threads: int, monitor: PerformanceMonitor, logger):
    """
    Run one preset into out/<name>.

    Returns:
        Tuple of (exit_code, message)
    """
    try:
        config = load_preset(name)
    except ConfigError as e:
        logger.error(f"❌ {name}: {e} {e.errors}")
        return 2, "; ".join(e.errors)

    config.out = str(out / name)
    config.threads = threads
    logger.info(f"Running {name} ({config.command}, digest {config.digest[:12]})")
    code = run(config, monitor)
    messages = {0: "passed", 1: "check failed", 2: "invalid input", 3: "numerical failure"}
    return code, messages.get(code, f"exit {code}")


def main():
    """Main entry point."""
    parser = argparse.ArgumentParser(description="Run the acceptance presets")
    parser.add_argument(
        '--preset', '-p',
        action='append',
        choices=list_presets(),
        help='Preset to run (repeatable; default: all)'
    )
    parser.add_argument(
        '--out', '-o',
        default='acceptance',
        help='Output directory (default: acceptance)'
    )
    parser.add_argument(
        '--threads', '-t',
        type=int,
        default=1,
        help='Worker threads per run (default: 1)'
    )
    parser.add_argument(
        '--verbose', '-v',
        action='store_true',
        help='Verbose logging'
    )

    args = parser.parse_args()

    logger = setup_logging(args.verbose)
    logger.info("=" * 60)
    logger.info("Starting acceptance sweep")
    logger.info("=" * 60)

    names = args.preset or list_presets()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    monitor = PerformanceMonitor()

    results = []
    for name in names:
        code, message = run_preset(name, out, args.threads, monitor, logger)
        metrics = monitor.get_metrics(PRESETS[name]['sections']['run']['command'])
        results.append({
            'preset': name,
            'exit_code': code,
            'message': message,
            'seconds': round(metrics.duration_seconds, 2) if metrics else None,
        })

    logger.info("=" * 60)
    logger.info("Acceptance Summary")
    logger.info("=" * 60)

    passed = sum(1 for r in results if r['exit_code'] == 0)
    logger.info(f"Presets passed: {passed}/{len(results)}")

    for result in results:
        status = "✅" if result['exit_code'] == 0 else "❌"
        logger.info(f"{status} {result['preset']}: {result['message']}")

    (out / SUMMARY_FILE).write_text(json.dumps(results, indent=2) + "\n", encoding='utf-8')
    logger.info("=" * 60)

    sys.exit(0 if passed == len(results) else 1)


if __name__ == '__main__':
    main()
