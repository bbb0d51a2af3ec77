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
The comparative study report.

.. currentmodule:: gridflex.metrics.report
"""
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Sequence, Tuple

import pandas as pd

from gridflex.core.scenario import Cluster
from gridflex.dataclasses.case import DispatchCase
from gridflex.dispatch.solution import DispatchSolution
from gridflex.exc import ErrorCode, MetricsError
from gridflex.metrics.congestion import STRESS_THRESHOLD, congestion_metric, stressed_lines
from gridflex.metrics.emissions import HtpTable, ghg_total, tox_total
from gridflex.util import dump_json

logger = logging.getLogger(__name__)

#: The scalar metrics reported for every scenario, in report order.
METRICS = ("objective_cost", "gamma", "stressed_line_total", "ghg_lbs", "tox_lbs_toluene_eq")


@dataclass(frozen=True)
class ScenarioMetrics:
    """
    The evaluation quantities of one solved scenario.
    """

    name: str

    #: Total generation cost, in $.
    objective_cost: float

    #: The congestion metric over every bus, in ($/MWh)^2.
    gamma: float

    stressed_line_total: int
    stressed_per_interval: Tuple[int, ...]

    #: CO2-equivalent emission, in lbs.
    ghg_lbs: float

    #: Toxic emission, in lbs of toluene equivalent.
    tox_lbs_toluene_eq: float

    flexible_dc_ids: Tuple[int, ...] = ()
    degenerate: bool = False

    def value(self, metric: str) -> float:
        return float(getattr(self, metric))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "objective_cost": self.objective_cost,
            "gamma": self.gamma,
            "stressed_line_total": self.stressed_line_total,
            "stressed_per_interval": list(self.stressed_per_interval),
            "ghg_lbs": self.ghg_lbs,
            "tox_lbs_toluene_eq": self.tox_lbs_toluene_eq,
            "flexible_dc_ids": list(self.flexible_dc_ids),
            "degenerate": self.degenerate,
        }


@dataclass(frozen=True)
class ClusterMetrics:
    """
    A cluster and its congestion metric on the baseline dispatch.
    """

    id: int
    bus_range: Tuple[int, int]
    dc_ids: Tuple[int, ...]
    total_capacity_mw: float
    gamma: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "id": self.id,
            "bus_range": list(self.bus_range),
            "dc_ids": list(self.dc_ids),
            "total_capacity_mw": self.total_capacity_mw,
            "gamma": self.gamma,
        }


@dataclass(frozen=True)
class StudyReport:
    """
    Per-scenario metrics plus their differences from a baseline scenario.
    """

    case_name: str
    baseline: str
    scenarios: Tuple[ScenarioMetrics, ...]

    #: scenario name -> metric -> value minus the baseline's value.
    deltas: Dict[str, Dict[str, float]] = field(default_factory=dict)

    clusters: Tuple[ClusterMetrics, ...] = ()
    stress_threshold: float = STRESS_THRESHOLD

    def scenario(self, name: str) -> ScenarioMetrics:
        for metrics in self.scenarios:
            if metrics.name == name:
                return metrics

        raise KeyError(name)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "case": self.case_name,
            "baseline": self.baseline,
            "stress_threshold": self.stress_threshold,
            "scenarios": [s.to_dict() for s in self.scenarios],
            "deltas": {name: dict(d) for name, d in self.deltas.items()},
            "clusters": [c.to_dict() for c in self.clusters],
        }

    def to_json(self) -> str:
        return dump_json(self.to_dict())

    def to_csv_rows(self) -> List[Dict[str, Any]]:
        """
        :return: One row per (scenario, metric), with the value and the baseline delta.
        """
        return [
            {
                "scenario": s.name,
                "metric": metric,
                "value": s.value(metric),
                "delta": self.deltas[s.name][metric],
            }
            for s in self.scenarios
            for metric in METRICS
        ]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.to_csv_rows(), columns=["scenario", "metric", "value", "delta"])


def scenario_metrics(
    case: DispatchCase,
    sol: DispatchSolution,
    htp: HtpTable,
    threshold: float = STRESS_THRESHOLD,
) -> ScenarioMetrics:
    stress = stressed_lines(sol.flows, case.lines, threshold)
    return ScenarioMetrics(
        name=sol.scenario_name,
        objective_cost=sol.objective_cost,
        gamma=congestion_metric(sol.lmp, case.bus_ids),
        stressed_line_total=stress.total,
        stressed_per_interval=stress.per_interval,
        ghg_lbs=ghg_total(sol, case.generators),
        tox_lbs_toluene_eq=tox_total(sol, case.generators, htp),
        flexible_dc_ids=tuple(sorted(sol.flexible_dc_ids)),
        degenerate=sol.degenerate,
    )


def build_report(
    case: DispatchCase,
    solutions: Sequence[DispatchSolution],
    baseline: str,
    htp: HtpTable,
    *,
    clusters: Sequence[Cluster] = (),
    threshold: float = STRESS_THRESHOLD,
) -> StudyReport:
    """
    Evaluates every solution and compares it to the baseline.

    :param case: The solved case.
    :param solutions: One :class:`.DispatchSolution` per scenario, in report order.
    :param baseline: The scenario name deltas are taken against.
    :param htp: The :class:`.HtpTable` for toxic totals.
    :param clusters: Clusters whose congestion metric is taken on the baseline dispatch.
    :raises MetricsError: If the baseline is missing, a scenario name repeats, or the
        solutions come from different cases.
    """
    names = [sol.scenario_name for sol in solutions]
    if len(set(names)) != len(names):
        raise MetricsError(f"repeated scenario names in {names}")
    if baseline not in names:
        raise MetricsError(
            f"baseline {baseline!r} not among scenarios {names}", code=ErrorCode.UNKNOWN_BASELINE
        )
    if len({sol.case_signature for sol in solutions}) > 1:
        raise MetricsError("solutions were solved on different cases", code=ErrorCode.CASE_MISMATCH)

    metrics = tuple(scenario_metrics(case, sol, htp, threshold) for sol in solutions)
    base = metrics[names.index(baseline)]
    deltas = {
        m.name: {metric: m.value(metric) - base.value(metric) for metric in METRICS}
        for m in metrics
    }

    base_sol = solutions[names.index(baseline)]
    cluster_metrics = []
    for cluster in clusters:
        buses = [b for b in case.bus_ids if cluster.contains_bus(b)]
        cluster_metrics.append(
            ClusterMetrics(
                id=cluster.id,
                bus_range=cluster.bus_range,
                dc_ids=cluster.dc_ids,
                total_capacity_mw=cluster.total_capacity_mw,
                gamma=congestion_metric(base_sol.lmp, buses),
            )
        )

    logger.info(f"Built report over {len(metrics)} scenario(s) against {baseline!r}")
    return StudyReport(
        case_name=case.name,
        baseline=baseline,
        scenarios=metrics,
        deltas=deltas,
        clusters=tuple(cluster_metrics),
        stress_threshold=threshold,
    )
