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

"""
The study runner: loads a case, builds the flexibility scenarios, solves them and writes
the comparative report plus the figure data.

.. currentmodule:: gridflex.groundwork.study
"""
import json
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import anyio
from anyio import to_thread
import numpy as np
import outcome
import pandas as pd
import toml

from gridflex.core.casefile import load_case, save_case
from gridflex.core.fixtures import builtin_fixture
from gridflex.core.scenario import (
    Cluster,
    LoadSplitPolicy,
    Scenario,
    apply_load_split,
    cluster_by_capacity,
    default_study_scenarios,
    scenario_from_spec,
)
from gridflex.dataclasses.case import DispatchCase
from gridflex.dispatch.builder import build_lp
from gridflex.dispatch.export import SEGMENT_TOLERANCE, export_solution, write_csv
from gridflex.dispatch.solution import DispatchSolution, solve_dispatch
from gridflex.exc import ErrorCode, GridflexError, StudyError
from gridflex.lp.mps import write_mps
from gridflex.lp.program import SolverOptions
from gridflex.metrics.congestion import STRESS_THRESHOLD
from gridflex.metrics.emissions import HtpTable, ghg_by_interval, tox_by_interval
from gridflex.metrics.report import StudyReport, build_report
from gridflex.util import PathLike, write_text

logger = logging.getLogger(__name__)

#: Prefix of a case path that names a built-in fixture instead of a file.
BUILTIN_PREFIX = "builtin:"

#: Distance from a line limit under which the line counts as binding.
BINDING_TOLERANCE = 1e-6


@dataclass(frozen=True)
class StudyConfig:
    """
    The settings of one study run.
    """

    #: The case file, or ``builtin:<fixture>``.
    case_path: str

    #: Where outputs are written.
    output_dir: Path = Path("study-out")

    #: Scenario specs (``{"name": ..., "flexible": ...}``). Empty means the default
    #: baseline / whole-system / per-cluster study.
    scenarios: Tuple[Mapping[str, Any], ...] = ()

    #: The load split to apply. None keeps the data-center profiles of the case file.
    load_split: Optional[LoadSplitPolicy] = None

    #: The requested cluster count. Clamped to the data-center count.
    clusters_k: int = 3

    htp: HtpTable = field(default_factory=HtpTable)
    baseline: str = "without_fs"
    solver: SolverOptions = field(default_factory=SolverOptions)
    parallel_scenarios: bool = False
    export_lp: bool = False

    #: The anyio backend used for parallel runs.
    backend: str = "asyncio"

    #: The bus shown in ``lmp_compare.csv``. None picks the bus of the largest data center.
    lmp_bus: Optional[int] = None

    stress_threshold: float = STRESS_THRESHOLD


_CONFIG_KEYS = {"study", "load_split", "clusters", "solver", "htp", "scenarios"}
_STUDY_KEYS = {
    "case", "output_dir", "baseline", "parallel", "export_lp", "backend", "htp_table",
    "lmp_bus", "stress_threshold",
}


def _resolve(base: Path, value: str) -> str:
    if value.startswith(BUILTIN_PREFIX):
        return value

    path = Path(value)
    return str(path if path.is_absolute() else base / path)


def config_from_dict(doc: Mapping[str, Any], base_dir: PathLike = ".") -> StudyConfig:
    """
    Builds a :class:`.StudyConfig` from its file form. Relative paths are resolved
    against ``base_dir``.

    :raises StudyError: If the document has unknown sections or bad values.
    """
    base = Path(base_dir)

    def fail(message: str):
        return StudyError(message, code=ErrorCode.CONFIG_INVALID)

    extra = sorted(set(doc) - _CONFIG_KEYS)
    if extra:
        raise fail(f"unknown config section(s): {', '.join(extra)}")

    study = dict(doc.get("study", {}))
    extra = sorted(set(study) - _STUDY_KEYS)
    if extra:
        raise fail(f"unknown [study] key(s): {', '.join(extra)}")

    try:
        load_split = LoadSplitPolicy.from_dict(doc["load_split"]) if "load_split" in doc else None
        solver = SolverOptions.from_dict(dict(doc.get("solver", {})))
    except (TypeError, GridflexError) as e:
        raise fail(f"bad config value: {e}") from e

    htp_factors: Dict[str, float] = {}
    try:
        if study.get("htp_table"):
            htp_factors.update(HtpTable.load(_resolve(base, study["htp_table"])).factors)
        htp_factors.update(doc.get("htp", {}))
        htp = HtpTable(htp_factors)
    except GridflexError as e:
        raise fail(f"bad htp table: {e.error_message}") from e

    scenarios = doc.get("scenarios", [])
    if not isinstance(scenarios, list):
        raise fail("scenarios must be a list of tables")

    k = doc.get("clusters", {}).get("k", 3)
    if not isinstance(k, int) or k < 1:
        raise fail(f"clusters.k must be a positive integer, got {k!r}")

    return StudyConfig(
        case_path=_resolve(base, study.get("case", f"{BUILTIN_PREFIX}three_bus")),
        output_dir=Path(_resolve(base, study.get("output_dir", "study-out"))),
        scenarios=tuple(scenarios),
        load_split=load_split,
        clusters_k=k,
        htp=htp,
        baseline=study.get("baseline", "without_fs"),
        solver=solver,
        parallel_scenarios=bool(study.get("parallel", False)),
        export_lp=bool(study.get("export_lp", False)),
        backend=study.get("backend", "asyncio"),
        lmp_bus=study.get("lmp_bus"),
        stress_threshold=float(study.get("stress_threshold", STRESS_THRESHOLD)),
    )


def load_config(path: PathLike) -> StudyConfig:
    """
    Loads a study config from a ``.toml`` or ``.json`` file.

    :raises StudyError: If the file cannot be read or parsed.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise StudyError(f"{path}: {e.strerror or e}", code=ErrorCode.CONFIG_INVALID) from e

    try:
        if path.suffix.lower() == ".toml":
            doc = toml.loads(text)
        else:
            doc = json.loads(text)
    except (ValueError, toml.TomlDecodeError) as e:
        raise StudyError(f"{path}: {e}", code=ErrorCode.CONFIG_INVALID) from e

    return config_from_dict(doc, path.parent)


def load_study_case(case_path: str, *, validate: bool = True) -> DispatchCase:
    """
    Loads a case file, or a built-in fixture given as ``builtin:<name>``.
    """
    if case_path.startswith(BUILTIN_PREFIX):
        return builtin_fixture(case_path[len(BUILTIN_PREFIX):])

    return load_case(case_path, validate=validate)


@dataclass
class StudyResult:
    """
    Everything a study run produced.
    """

    #: The case as solved, with the load split applied.
    case: DispatchCase
    clusters: List[Cluster]
    scenarios: List[Scenario]
    solutions: List[DispatchSolution]
    report: StudyReport
    output_dir: Path


def prepare(config: StudyConfig) -> Tuple[DispatchCase, List[Cluster], List[Scenario]]:
    """
    Loads the case, applies the load split and builds the scenario list.
    """
    case = load_study_case(config.case_path)
    if config.load_split is not None:
        case = apply_load_split(case, config.load_split)

    clusters: List[Cluster] = []
    count = len(case.data_centers)
    if count:
        k = config.clusters_k
        if k > count:
            logger.warning(f"Requested {k} clusters but the case has {count} data center(s)")
            k = count
        clusters = cluster_by_capacity(case, k)

    if config.scenarios:
        scenarios = [scenario_from_spec(case, spec, clusters) for spec in config.scenarios]
    else:
        scenarios = default_study_scenarios(case, clusters)

    names = [s.name for s in scenarios]
    if config.baseline not in names:
        raise StudyError(
            f"baseline {config.baseline!r} is not one of the scenarios {names}",
            code=ErrorCode.CONFIG_INVALID,
        )

    return case, clusters, scenarios


def _solve_logged(
    case: DispatchCase, scenario: Scenario, options: SolverOptions
) -> DispatchSolution:
    logger.info(f"Scenario {scenario.name}: solving")
    sol = solve_dispatch(case, scenario, options)
    logger.info(f"Scenario {scenario.name}: done, cost {sol.objective_cost:.2f}")
    return sol


async def _solve_concurrently(
    case: DispatchCase, scenarios: Sequence[Scenario], options: SolverOptions
) -> List[outcome.Outcome]:
    results: List[Optional[outcome.Outcome]] = [None] * len(scenarios)

    async def _solve_one(n: int, scenario: Scenario):
        results[n] = await to_thread.run_sync(
            outcome.capture, _solve_logged, case, scenario, options
        )

    async with anyio.create_task_group() as tg:
        for n, scenario in enumerate(scenarios):
            tg.start_soon(_solve_one, n, scenario)

    return results


def solve_scenarios(
    case: DispatchCase,
    scenarios: Sequence[Scenario],
    options: SolverOptions,
    *,
    parallel: bool = False,
    backend: str = "asyncio",
) -> List[outcome.Outcome]:
    """
    Solves every scenario, serially or in worker threads.

    :return: One :class:`outcome.Outcome` per scenario, in input order.
    """
    if parallel and len(scenarios) > 1:
        return anyio.run(_solve_concurrently, case, scenarios, options, backend=backend)

    return [outcome.capture(_solve_logged, case, s, options) for s in scenarios]


# figure data
def _pick_lmp_bus(case: DispatchCase, requested: Optional[int]) -> int:
    if requested is not None:
        if requested not in case.bus_ids:
            raise StudyError(f"lmp_bus {requested} is not a bus of the case",
                             code=ErrorCode.CONFIG_INVALID)
        return requested

    if case.data_centers:
        largest = max(case.data_centers, key=lambda dc: (dc.peak_mw, -dc.id))
        return largest.bus

    return case.slack_bus.id


def figure_tables(
    case: DispatchCase,
    solutions: Sequence[DispatchSolution],
    report: StudyReport,
    htp: HtpTable,
    lmp_bus: int,
) -> Dict[str, pd.DataFrame]:
    """
    :return: file stem -> figure data table.
    """
    steps = range(case.horizon)
    names = [sol.scenario_name for sol in solutions]

    lmp_compare = pd.DataFrame({"t": [t + 1 for t in steps], "bus": lmp_bus})
    for sol in solutions:
        lmp_compare[sol.scenario_name] = [sol.lmp_at(lmp_bus, t) for t in steps]

    dc_rows = []
    for dc in case.data_centers:
        for t in steps:
            row = {"data_center": dc.id, "bus": dc.bus, "t": t + 1}
            for sol in solutions:
                row[sol.scenario_name] = (
                    dc.lc_profile[t] + dc.aux_profile[t] + float(sol.be_schedule[dc.id][t])
                )
            dc_rows.append(row)
    dc_load_compare = pd.DataFrame(dc_rows, columns=["data_center", "bus", "t"] + names)

    renewables = [gen for gen in case.generators if gen.is_renewable]
    system_profile = pd.DataFrame({
        "t": [t + 1 for t in steps],
        "non_dc_load_mw": [sum(bus.base_load[t] for bus in case.buses) for t in steps],
        "renewable_mw": [sum(gen.fixed_output[t] for gen in renewables) for t in steps],
        "dc_fixed_load_mw": [
            sum(dc.lc_profile[t] + dc.aux_profile[t] for dc in case.data_centers) for t in steps
        ],
    })

    costs = pd.DataFrame(
        [
            {
                "scenario": m.name,
                "objective_cost": m.objective_cost,
                "delta": report.deltas[m.name]["objective_cost"],
            }
            for m in report.scenarios
        ],
        columns=["scenario", "objective_cost", "delta"],
    )

    stressed = pd.DataFrame(
        [
            {"scenario": m.name, "t": t + 1, "stressed": m.stressed_per_interval[t]}
            for m in report.scenarios
            for t in range(len(m.stressed_per_interval))
        ],
        columns=["scenario", "t", "stressed"],
    )

    ghg_rows, tox_rows = [], []
    for sol in solutions:
        ghg = ghg_by_interval(sol, case.generators)
        tox = tox_by_interval(sol, case.generators, htp)
        for t in steps:
            ghg_rows.append({"scenario": sol.scenario_name, "t": t + 1, "ghg_lbs": float(ghg[t])})
            tox_rows.append(
                {"scenario": sol.scenario_name, "t": t + 1, "tox_lbs_toluene_eq": float(tox[t])}
            )

    return {
        "lmp_compare": lmp_compare,
        "dc_load_compare": dc_load_compare,
        "system_profile": system_profile,
        "costs": costs,
        "stressed": stressed,
        "ghg": pd.DataFrame(ghg_rows, columns=["scenario", "t", "ghg_lbs"]),
        "tox": pd.DataFrame(tox_rows, columns=["scenario", "t", "tox_lbs_toluene_eq"]),
    }


def clusters_table(clusters: Sequence[Cluster], report: StudyReport) -> pd.DataFrame:
    gammas = {c.id: c.gamma for c in report.clusters}
    return pd.DataFrame(
        [
            {
                "cluster": c.id,
                "first_bus": c.bus_range[0],
                "last_bus": c.bus_range[1],
                "data_centers": " ".join(str(i) for i in c.dc_ids),
                "total_capacity_mw": c.total_capacity_mw,
                "gamma": gammas.get(c.id),
            }
            for c in clusters
        ],
        columns=["cluster", "first_bus", "last_bus", "data_centers", "total_capacity_mw", "gamma"],
    )


def run_study(config: StudyConfig) -> StudyResult:
    """
    Runs a complete study and writes its outputs into ``config.output_dir``:

    - ``report.json`` and ``report.csv``
    - ``case.json`` (the case as solved) and ``clusters.csv``
    - ``scenarios/<name>/`` with the per-scenario solution tables
    - ``lmp_compare.csv``, ``dc_load_compare.csv``, ``system_profile.csv``, ``costs.csv``,
      ``stressed.csv``, ``ghg.csv`` and ``tox.csv``
    - ``lp/<name>.mps`` when ``export_lp`` is set

    :raises StudyError: If a scenario fails. Solutions of the other scenarios are still
        written; the error names the failed scenario and chains its cause.
    """
    out = Path(config.output_dir)
    case, clusters, scenarios = prepare(config)
    lmp_bus = _pick_lmp_bus(case, config.lmp_bus)
    out.mkdir(parents=True, exist_ok=True)
    save_case(case, out / "case.json")

    if config.export_lp:
        for scenario in scenarios:
            lp, _ = build_lp(case, scenario)
            write_mps(lp, out / "lp" / f"{scenario.name}.mps")

    outcomes = solve_scenarios(
        case, scenarios, config.solver,
        parallel=config.parallel_scenarios, backend=config.backend,
    )

    solutions: List[DispatchSolution] = []
    failure: Optional[Tuple[Scenario, BaseException]] = None
    for scenario, result in zip(scenarios, outcomes):
        if isinstance(result, outcome.Error):
            logger.error(f"Scenario {scenario.name} failed: {result.error}")
            failure = failure or (scenario, result.error)
            continue

        sol = result.unwrap()
        solutions.append(sol)
        export_solution(sol, case, out / "scenarios" / scenario.name)

    if failure is not None:
        scenario, error = failure
        raise StudyError(
            f"scenario {scenario.name!r} failed: {error}", scenario=scenario.name
        ) from error

    report = build_report(
        case, solutions, config.baseline, config.htp,
        clusters=clusters, threshold=config.stress_threshold,
    )
    write_text(out / "report.json", report.to_json())
    write_csv(report.to_frame(), out / "report.csv")
    write_csv(clusters_table(clusters, report), out / "clusters.csv")
    for name, frame in figure_tables(case, solutions, report, config.htp, lmp_bus).items():
        write_csv(frame, out / f"{name}.csv")

    logger.info(f"Study of {case.name} written to {out}")
    return StudyResult(
        case=case,
        clusters=clusters,
        scenarios=scenarios,
        solutions=solutions,
        report=report,
        output_dir=out,
    )


def with_overrides(config: StudyConfig, **overrides: Any) -> StudyConfig:
    """
    :return: ``config`` with every non-None override applied.
    """
    return replace(config, **{k: v for k, v in overrides.items() if v is not None})


# explain-lmp
def _read_csv(path: Path) -> pd.DataFrame:
    if not path.exists():
        raise StudyError(f"{path} is missing", code=ErrorCode.NO_PRIOR_RUN)

    return pd.read_csv(path)


def explain_lmp(
    output_dir: PathLike, bus: int, t: int, scenario: Optional[str] = None
) -> Dict[str, Any]:
    """
    Explains how the LMP of one bus in one interval was formed in a finished study.

    :param output_dir: The output directory of a previous :func:`.run_study`.
    :param bus: The bus id.
    :param t: The 1-based interval.
    :param scenario: The scenario to inspect; defaults to the study baseline.
    :return: A JSON-ready dict with the price, the binding lines, the marginal
        generator segments and the BE allocation of any data center at the bus.
    :raises StudyError: If no study exists in ``output_dir``, or the bus, interval or
        scenario is unknown.
    """
    out = Path(output_dir)
    report_path = out / "report.json"
    if not report_path.exists():
        raise StudyError(f"no study found in {out}", code=ErrorCode.NO_PRIOR_RUN)

    report = json.loads(report_path.read_text(encoding="utf-8"))
    scenario = scenario or report["baseline"]
    known = [s["name"] for s in report["scenarios"]]
    if scenario not in known:
        raise StudyError(
            f"unknown scenario {scenario!r}, expected one of {known}",
            code=ErrorCode.UNKNOWN_BUS_OR_INTERVAL,
        )

    case = load_case(out / "case.json", validate=False)
    if bus not in case.bus_ids or not 1 <= t <= case.horizon:
        raise StudyError(
            f"bus {bus} / interval {t} not in case (buses 1..{len(case.buses)}, "
            f"intervals 1..{case.horizon})",
            code=ErrorCode.UNKNOWN_BUS_OR_INTERVAL,
        )

    directory = out / "scenarios" / scenario
    lmp = _read_csv(directory / "lmp.csv")
    flows = _read_csv(directory / "flows.csv")
    segments = _read_csv(directory / "segment_generation.csv")
    be = _read_csv(directory / "be_schedule.csv")

    now = lmp[lmp["t"] == t]
    price = float(now.loc[now["bus"] == bus, "usd_per_mwh"].iloc[0])
    low, high = float(now["usd_per_mwh"].min()), float(now["usd_per_mwh"].max())

    binding = []
    for row in flows[flows["t"] == t].itertuples(index=False):
        at_max = row.flow_max > 0 and abs(row.mw - row.flow_max) <= BINDING_TOLERANCE
        at_min = row.flow_min < 0 and abs(row.mw - row.flow_min) <= BINDING_TOLERANCE
        if at_max or at_min:
            binding.append({
                "line": int(row.line),
                "from_bus": int(row.from_bus),
                "to_bus": int(row.to_bus),
                "mw": float(row.mw),
                "limit": float(row.flow_max if at_max else row.flow_min),
                "incident": bus in (row.from_bus, row.to_bus),
            })

    marginal = []
    for row in segments[segments["t"] == t].itertuples(index=False):
        if row.status != "marginal" and abs(row.cost_per_mwh - price) > SEGMENT_TOLERANCE:
            continue
        marginal.append({
            "generator": int(row.generator),
            "bus": int(row.bus),
            "segment": int(row.segment),
            "cost_per_mwh": float(row.cost_per_mwh),
            "mw": float(row.mw),
            "cap_mw": float(row.cap_mw),
            "status": row.status,
            "sets_price": abs(row.cost_per_mwh - price) <= SEGMENT_TOLERANCE,
        })

    data_center = None
    here = be[(be["bus"] == bus) & (be["t"] == t)]
    if not here.empty:
        row = here.iloc[0]
        data_center = {
            "id": int(row["data_center"]),
            "be_mw": float(row["mw"]),
            "uniform_mw": float(row["uniform_mw"]),
            "flexible": bool(row["flexible"]),
            "above_uniform": bool(row["mw"] > row["uniform_mw"] + SEGMENT_TOLERANCE),
        }

    return {
        "scenario": scenario,
        "bus": bus,
        "t": t,
        "lmp": price,
        "lmp_range": [low, high],
        "uniform_prices": bool(np.isclose(low, high, rtol=0.0, atol=1e-6)),
        "binding_lines": binding,
        "marginal_segments": marginal,
        "data_center": data_center,
    }


def format_explanation(info: Mapping[str, Any]) -> str:
    """
    Renders an :func:`.explain_lmp` result as text.
    """
    lines = [
        f"Scenario {info['scenario']}, bus {info['bus']}, interval {info['t']}",
        f"  LMP: {info['lmp']:.4f} $/MWh "
        f"(system range {info['lmp_range'][0]:.4f} .. {info['lmp_range'][1]:.4f})",
    ]
    if info["uniform_prices"]:
        lines.append("  Prices are uniform across the network; no congestion at this interval.")

    if info["binding_lines"]:
        lines.append("  Binding lines:")
        for line in info["binding_lines"]:
            mark = " (incident)" if line["incident"] else ""
            lines.append(
                f"    line {line['line']} {line['from_bus']}->{line['to_bus']}: "
                f"{line['mw']:.3f} MW at limit {line['limit']:.3f}{mark}"
            )
    else:
        lines.append("  No binding lines.")

    if info["marginal_segments"]:
        lines.append("  Marginal segments:")
        for seg in info["marginal_segments"]:
            mark = " *sets price*" if seg["sets_price"] else ""
            lines.append(
                f"    gen {seg['generator']} (bus {seg['bus']}) segment {seg['segment']} @ "
                f"{seg['cost_per_mwh']:.2f} $/MWh: {seg['mw']:.3f}/{seg['cap_mw']:.3f} MW "
                f"[{seg['status']}]{mark}"
            )

    dc = info["data_center"]
    if dc is not None:
        kind = "flexible" if dc["flexible"] else "fixed"
        lines.append(
            f"  Data center {dc['id']} ({kind}): BE {dc['be_mw']:.3f} MW vs uniform "
            f"{dc['uniform_mw']:.3f} MW"
        )

    return "\n".join(lines)


def summarize_report(report: StudyReport) -> str:
    """
    Renders the scenario table of a report as text.
    """
    rows = [f"{'scenario':<24}{'cost ($)':>16}{'delta':>14}{'gamma':>12}{'stressed':>10}"]
    for m in report.scenarios:
        delta = report.deltas[m.name]["objective_cost"]
        rows.append(
            f"{m.name:<24}{m.objective_cost:>16.2f}{delta:>14.2f}{m.gamma:>12.4f}"
            f"{m.stressed_line_total:>10d}"
        )
    return "\n".join(rows)
