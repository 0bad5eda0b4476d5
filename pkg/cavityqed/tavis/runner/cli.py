"""

Copyright (c) 2026 cavityqed-tavis developers

Permission is hereby granted, free of charge, to any person obtaining a copy
of this software and associated documentation files (the "Software"), to deal
in the Software without restriction, including without limitation the rights
to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
copies of the Software, and to permit persons to whom the Software is
furnished to do so, subject to the following conditions:

The above copyright notice and this permission notice shall be included in
all copies or substantial portions of the Software.

THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY
FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM,
OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN
THE SOFTWARE.

"""

import argparse
import json
import logging
import sys

from ..core.errors import ConfigError, TavisError
from ..core.utils import ordered_map
from ..core.version import __version__
from ..hp.perturbation import CorrectedVariant
from .config import FORMATS, expand_sweep, load_config, validate
from .experiments import run_experiment
from .report import dump_json, report, write_result

log = logging.getLogger("cavityqed.tavis.cli")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def build_parser():
    parser = argparse.ArgumentParser(prog="tavis",
            description="Tavis-Cummings dynamics: exact oracle, bosonized approximations and cat-state moments")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default="warning",
            choices=["debug", "info", "warning", "error"], help="logging verbosity")

    sub = parser.add_subparsers(dest="command", required=True)

    def add_overrides(p):
        p.add_argument("--format", choices=FORMATS, default=None, help="output format")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--threads", type=int, default=None, help="worker threads; results do not depend on it")
        p.add_argument("--corrected-variant", choices=[v.value for v in CorrectedVariant], default=None,
                help="reading of the corrected mean photon number")

    p = sub.add_parser("run", help="run one experiment")
    p.add_argument("config", help="key = value configuration file")
    add_overrides(p)

    p = sub.add_parser("validate", help="resolve and check a configuration without running it")
    p.add_argument("config", help="key = value configuration file")
    add_overrides(p)

    p = sub.add_parser("sweep", help="run the cartesian product of comma-separated values")
    p.add_argument("config", help="key = value configuration file")
    add_overrides(p)

    p = sub.add_parser("report", help="recompute deviation summaries from data files")
    p.add_argument("files", nargs="+", help="CSV or JSON data files")

    return parser


def overrides_from(args):
    return {
        "format": args.format,
        "out": args.out,
        "threads": args.threads,
        "corrected_variant": args.corrected_variant,
    }


def print_diagnostics(ex):
    for d in ex.diagnostics:
        print(str(d), file=sys.stderr)


def load_configs(args, sweep=False):
    raw, diags = load_config(args.config)
    members = expand_sweep(raw)[0] if sweep else [raw]
    # resolve everything before any computation starts
    return [validate(member, overrides_from(args), diags) for member in members]


def run_configs(configs):
    # sweep members run concurrently, files are written in member order
    threads = max(c.threads for c in configs) if len(configs) > 1 else 1
    results = ordered_map(run_experiment, configs, threads)

    code = EXIT_OK
    for config, result in zip(configs, results):
        for path in write_result(result, config.out, config.format):
            print(path)
        if not result.valid:
            code = EXIT_NUMERICAL
    return code


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level.upper()),
            format="%(levelname)s %(name)s: %(message)s")

    try:
        if args.command == "report":
            dump_json(report(args.files), sys.stdout)
            return EXIT_OK

        configs = load_configs(args, sweep=args.command == "sweep")

        if args.command == "validate":
            dump_json([c.as_dict() for c in configs] if len(configs) > 1 else configs[0].as_dict(), sys.stdout)
            return EXIT_OK

        return run_configs(configs)

    except ConfigError as ex:
        print_diagnostics(ex)
        return EXIT_CONFIG
    except (OSError, ValueError, KeyError) as ex:
        log.error("%s", ex)
        return EXIT_CONFIG
    except TavisError as ex:
        log.error("%s: %s", type(ex).__name__, ex)
        return EXIT_NUMERICAL
