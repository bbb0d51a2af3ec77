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
CSV and JSON export of dispatch solutions.

Every table has one row per (entity, interval); the ``t`` column is 1-based.

.. currentmodule:: gridflex.dispatch.export
"""
import logging
from pathlib import Path
from typing import Dict

import pandas as pd

from gridflex.dataclasses.case import DispatchCase
from gridflex.dispatch.solution import DispatchSolution
from gridflex.util import PathLike, dump_json, write_text

logger = logging.getLogger(__name__)

#: Distance from a segment bound under which the segment counts as empty or full.
SEGMENT_TOLERANCE = 1e-6


def segment_status(value: float, cap_mw: float) -> str:
    """
    :return: ``empty``, ``full`` or ``marginal``.
    """
    if value <= SEGMENT_TOLERANCE:
        return "empty"
    if value >= cap_mw - SEGMENT_TOLERANCE:
        return "full"
    return "marginal"


def write_csv(frame: pd.DataFrame, path: PathLike) -> Path:
    """
    Writes ``frame`` without its index and with ``\\n`` line endings.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, lineterminator="\n")
    return path


def solution_tables(sol: DispatchSolution, case: DispatchCase) -> Dict[str, pd.DataFrame]:
    """
    :return: A mapping of table name -> :class:`pandas.DataFrame`.
    """
    steps = range(sol.horizon)
    generation = pd.DataFrame(
        [
            {"generator": gen_id, "t": t + 1, "mw": float(series[t])}
            for gen_id, series in sorted(sol.generation.items())
            for t in steps
        ],
        columns=["generator", "t", "mw"],
    )

    segment_rows = []
    for gen in case.dispatchable_generators:
        values = sol.segment_generation[gen.id]
        for s, seg in enumerate(gen.segments):
            for t in steps:
                value = float(values[s, t])
                segment_rows.append({
                    "generator": gen.id,
                    "bus": gen.bus,
                    "segment": s + 1,
                    "t": t + 1,
                    "mw": value,
                    "cap_mw": seg.cap_mw,
                    "cost_per_mwh": seg.cost_per_mwh,
                    "status": segment_status(value, seg.cap_mw),
                })
    segment_generation = pd.DataFrame(
        segment_rows,
        columns=["generator", "bus", "segment", "t", "mw", "cap_mw", "cost_per_mwh", "status"],
    )

    flows = pd.DataFrame(
        [
            {
                "line": line.id,
                "from_bus": line.from_bus,
                "to_bus": line.to_bus,
                "t": t + 1,
                "mw": float(sol.flows[line.id][t]),
                "flow_min": line.flow_min,
                "flow_max": line.flow_max,
            }
            for line in case.lines
            for t in steps
        ],
        columns=["line", "from_bus", "to_bus", "t", "mw", "flow_min", "flow_max"],
    )

    angles = pd.DataFrame(
        [
            {"bus": bus_id, "t": t + 1, "rad": float(series[t])}
            for bus_id, series in sorted(sol.angles.items())
            for t in steps
        ],
        columns=["bus", "t", "rad"],
    )

    be_schedule = pd.DataFrame(
        [
            {
                "data_center": dc.id,
                "bus": dc.bus,
                "t": t + 1,
                "mw": float(sol.be_schedule[dc.id][t]),
                "uniform_mw": dc.be_energy_mwh / (case.horizon * case.dt_hours),
                "flexible": dc.id in sol.flexible_dc_ids,
            }
            for dc in case.data_centers
            for t in steps
        ],
        columns=["data_center", "bus", "t", "mw", "uniform_mw", "flexible"],
    )

    lmp = pd.DataFrame(
        [
            {"bus": bus_id, "t": t + 1, "usd_per_mwh": float(series[t])}
            for bus_id, series in sorted(sol.lmp.items())
            for t in steps
        ],
        columns=["bus", "t", "usd_per_mwh"],
    )

    return {
        "generation": generation,
        "segment_generation": segment_generation,
        "flows": flows,
        "angles": angles,
        "be_schedule": be_schedule,
        "lmp": lmp,
    }


def solution_summary(sol: DispatchSolution) -> dict:
    return {
        "case": sol.case_name,
        "scenario": sol.scenario_name,
        "case_signature": sol.case_signature,
        "objective_cost": sol.objective_cost,
        "no_load_offset": sol.no_load_offset,
        "flexible_data_centers": sorted(sol.flexible_dc_ids),
        "degenerate": sol.degenerate,
        "iteration_count": sol.iteration_count,
        "stats": dict(sol.stats),
    }


def export_solution(sol: DispatchSolution, case: DispatchCase, directory: PathLike) -> Path:
    """
    Writes ``generation.csv``, ``segment_generation.csv``, ``flows.csv``, ``angles.csv``,
    ``be_schedule.csv``, ``lmp.csv`` and ``summary.json`` into ``directory``.
    """
    directory = Path(directory)
    for name, frame in solution_tables(sol, case).items():
        write_csv(frame, directory / f"{name}.csv")

    write_text(directory / "summary.json", dump_json(solution_summary(sol)))
    logger.debug(f"Exported {sol.scenario_name} to {directory}")
    return directory
