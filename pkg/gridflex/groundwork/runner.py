# This file is part of gridflex.
#
# gridflex is free software: you can redistribute it and/or modify
# it under the terms of the GNU Lesser General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# gridflex is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU Lesser General Public License for more details.
#
# You should have received a copy of the GNU Lesser General Public License
# along with gridflex.  If not, see <http://www.gnu.org/licenses/>.
import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

import coloredlogs

from gridflex.core.validation import validate_case
from gridflex.exc import GridflexError
from gridflex.groundwork.study import (
    StudyConfig,
    explain_lmp,
    format_explanation,
    load_config,
    load_study_case,
    run_study,
    summarize_report,
    with_overrides,
)
from gridflex.util import dump_json

stock_config = """
### Initial config for a gridflex study.
### Edit as appropriate.

[study]

## The case file to solve. Relative paths are resolved against this file.
## Use "builtin:<name>" for a built-in fixture: one_bus, three_bus, five_bus_congested,
## two_area_priced or two_period.
case = "builtin:five_bus_congested"

## Where report.json, report.csv, the per-scenario tables and the figure data go.
output_dir = "study-out"

## The scenario every delta is taken against.
baseline = "without_fs"

## Solve scenarios in worker threads. The report is identical either way.
parallel = false

## The anyio backend used for parallel runs.
backend = "asyncio"

## Also write every scenario's LP as fixed-format MPS under lp/.
export_lp = false

## The share of a line rating at which a line counts as stressed.
stress_threshold = 0.9

## The bus shown in lmp_compare.csv. Defaults to the bus of the largest data center.
# lmp_bus = 3

## A JSON or TOML file of HTP factors (pollutant = lbs toluene per lb).
# htp_table = "htp.toml"

[load_split]
## Remove this section to keep the data-center profiles of the case file.
server_fraction = 0.6
lc_fraction_mean = 0.3
lc_fraction_halfwidth = 0.1
rng_seed = 0

## Average consumption as a share of peak. At 1.0 BE power has no room to move.
utilization = 0.8

[clusters]
## The number of capacity-balanced clusters. Clamped to the data-center count.
k = 3

[solver]
feas_tol = 1e-7
opt_tol = 1e-7
comp_tol = 1e-6
refactor_every = 100
stall_limit = 50
## Columns priced per iteration on large programs. 0 prices every column.
pricing_block = 2000

[htp]
## HTP factors for every pollutant named by a generator's pollutant_rates.
## These are data from your HTP source, not defaults.
# NOx = 0.0
# SO2 = 0.0

## Scenarios. Leave out to run the baseline, whole-system and per-cluster study.
## flexible is "all", "none", {{ cluster = 1 }} or a list of data center ids.
# [[scenarios]]
# name = "without_fs"
# flexible = "none"
"""

logger = logging.getLogger(__name__)


def init(path: str, force: bool = False) -> int:
    """
    Writes the stock study config.
    """
    path = Path(path)
    if path.is_dir():
        path = path / "study.toml"

    if path.exists() and not force:
        logger.error(f"{path} already exists, pass --force to overwrite")
        return 1

    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(stock_config.format(), encoding="utf-8")
    print(f"Written config to {path.resolve()}")
    return 0


def run(args: argparse.Namespace) -> int:
    """
    Runs a study.
    """
    if args.config:
        config = load_config(args.config)
    elif args.case:
        config = StudyConfig(case_path=args.case)
    else:
        logger.error("Either --config or --case is needed")
        return 2

    config = with_overrides(
        config,
        case_path=args.case,
        output_dir=Path(args.out) if args.out else None,
        parallel_scenarios=True if args.parallel else None,
        export_lp=True if args.export_lp else None,
        backend=args.backend,
    )
    result = run_study(config)
    print(summarize_report(result.report))
    return 0


def explain(args: argparse.Namespace) -> int:
    info = explain_lmp(args.out, args.bus, args.t, scenario=args.scenario)
    if args.json:
        print(dump_json(info), end="")
    else:
        print(format_explanation(info))
    return 0


def validate(args: argparse.Namespace) -> int:
    """
    Validates a case file, printing every violation.
    """
    case = load_study_case(args.case, validate=False)
    violations = validate_case(case)
    if args.json:
        print(json.dumps([str(v) for v in violations], indent=2))
    else:
        for violation in violations:
            print(violation)
        if not violations:
            print(f"{case.name}: valid")

    return 1 if violations else 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="study", description="DC-OPF dispatch studies with flexible data-center loads."
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="Log at DEBUG level.")
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("run", help="Run a study.")
    p.add_argument("--config", help="A TOML or JSON study config.")
    p.add_argument("--case", help="A case file, or builtin:<fixture>. Overrides the config.")
    p.add_argument("--out", help="The output directory. Overrides the config.")
    p.add_argument("--parallel", action="store_true", help="Solve scenarios concurrently.")
    p.add_argument("--export-lp", action="store_true", help="Also write every LP as MPS.")
    p.add_argument("--backend", help="The anyio backend for parallel runs.")
    p.set_defaults(handler=run)

    p = commands.add_parser("explain-lmp", help="Explain an LMP from a finished study.")
    p.add_argument("--out", required=True, help="The output directory of the study.")
    p.add_argument("--bus", required=True, type=int)
    p.add_argument("--t", required=True, type=int, help="The 1-based interval.")
    p.add_argument("--scenario", help="The scenario; defaults to the baseline.")
    p.add_argument("--json", action="store_true", help="Print JSON instead of text.")
    p.set_defaults(handler=explain)

    p = commands.add_parser("validate", help="Validate a case file.")
    p.add_argument("--case", required=True, help="A case file, or builtin:<fixture>.")
    p.add_argument("--json", action="store_true", help="Print JSON instead of text.")
    p.set_defaults(handler=validate)

    p = commands.add_parser("init", help="Write a stock study config.")
    p.add_argument("path", nargs="?", default="study.toml")
    p.add_argument("--force", action="store_true", help="Overwrite an existing file.")
    p.set_defaults(handler=lambda a: init(a.path, a.force))

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = make_parser().parse_args(argv)
    coloredlogs.install(level="DEBUG" if args.verbose else "INFO", stream=sys.stderr)

    try:
        return args.handler(args)
    except GridflexError as e:
        logger.error(str(e))
        print(dump_json(e.to_dict()), end="")
        return 1


if __name__ == "__main__":
    sys.exit(main())
