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
Solving a dispatch scenario and reading the results back out of the LP.

.. currentmodule:: gridflex.dispatch.solution
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Mapping, Optional

import numpy as np

from gridflex.core.casefile import case_signature
from gridflex.core.scenario import Scenario
from gridflex.dataclasses.case import DispatchCase
from gridflex.dispatch.builder import build_lp, check_feasibility
from gridflex.dispatch.index import FAMILIES, VariableIndex, family_of
from gridflex.exc import DispatchError, DispatchInfeasible, DispatchUnbounded, ErrorCode
from gridflex.lp.program import LinearProgram, LpSolution, LpStatus, SolverOptions
from gridflex.lp.simplex import solve

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DispatchSolution:
    """
    The optimal dispatch of one scenario. Every per-interval series is a numpy array of
    length ``horizon``, keyed by the id of its entity.

    LMPs are the nodal balance duals of the optimal basis divided by the interval length.
    When :attr:`degenerate` is set the LMPs are one valid choice among several.
    """

    case_name: str
    scenario_name: str

    #: A digest of the solved case, used to check that two solutions are comparable.
    case_signature: str

    horizon: int
    dt_hours: float

    #: generator id -> output in MW. Non-dispatchable units report their fixed output.
    generation: Mapping[int, np.ndarray]

    #: generator id -> segment outputs in MW, shaped ``(segments, horizon)``.
    segment_generation: Mapping[int, np.ndarray]

    #: line id -> flow in MW, positive from ``from_bus`` to ``to_bus``.
    flows: Mapping[int, np.ndarray]

    #: bus id -> voltage angle in radians.
    angles: Mapping[int, np.ndarray]

    #: data center id -> BE power in MW, for flexible and fixed data centers alike.
    be_schedule: Mapping[int, np.ndarray]

    #: bus id -> locational marginal price in $/MWh.
    lmp: Mapping[int, np.ndarray]

    #: Total cost in $, including the no-load offset.
    objective_cost: float

    #: The constant no-load part of :attr:`objective_cost`.
    no_load_offset: float

    flexible_dc_ids: FrozenSet[int] = frozenset()
    degenerate: bool = False
    iteration_count: int = 0

    #: Extra solver statistics.
    stats: Dict[str, float] = field(default_factory=dict)

    def lmp_at(self, bus_id: int, t: int) -> float:
        return float(self.lmp[bus_id][t])

    def total_generation(self) -> np.ndarray:
        """
        :return: The summed output of every unit, per interval.
        """
        total = np.zeros(self.horizon)
        for series in self.generation.values():
            total += series

        return total


def _extract(
    case: DispatchCase,
    scenario: Scenario,
    lp: LinearProgram,
    index: VariableIndex,
    sol: LpSolution,
) -> DispatchSolution:
    horizon = case.horizon
    x = sol.x
    dt = case.dt_hours

    generation = {}
    segments = {}
    for gen in case.generators:
        if gen.dispatchable:
            generation[gen.id] = np.array([x[index.generation[gen.id, t]] for t in range(horizon)])
            segments[gen.id] = np.array([
                [x[index.segment[gen.id, s, t]] for t in range(horizon)]
                for s in range(len(gen.segments))
            ]).reshape(len(gen.segments), horizon)
        else:
            generation[gen.id] = np.asarray(gen.fixed_output, dtype=float)
            segments[gen.id] = np.zeros((0, horizon))

    flows = {
        line.id: np.array([x[index.flow[line.id, t]] for t in range(horizon)])
        for line in case.lines
    }
    angles = {
        bus.id: np.array([x[index.angle[bus.id, t]] for t in range(horizon)])
        for bus in case.buses
    }

    be_schedule = {}
    for dc in case.data_centers:
        if dc.id in scenario.flexible_dc_ids:
            be_schedule[dc.id] = np.array([x[index.be[dc.id, t]] for t in range(horizon)])
        else:
            be_schedule[dc.id] = np.asarray(scenario.fixed_be_profiles[dc.id], dtype=float)

    lmp = {
        bus.id: np.array([sol.duals[index.balance[bus.id, t]] / dt for t in range(horizon)])
        for bus in case.buses
    }

    return DispatchSolution(
        case_name=case.name,
        scenario_name=scenario.name,
        case_signature=case_signature(case),
        horizon=horizon,
        dt_hours=dt,
        generation=generation,
        segment_generation=segments,
        flows=flows,
        angles=angles,
        be_schedule=be_schedule,
        lmp=lmp,
        objective_cost=sol.objective_value + lp.objective_offset,
        no_load_offset=lp.objective_offset,
        flexible_dc_ids=frozenset(scenario.flexible_dc_ids),
        degenerate=sol.degenerate,
        iteration_count=sol.iteration_count,
        stats={
            "variables": lp.num_vars,
            "rows": lp.num_rows,
            "refactorizations": sol.diagnostics.get("refactorizations", 0),
        },
    )


def solve_dispatch(
    case: DispatchCase, scenario: Scenario, options: Optional[SolverOptions] = None
) -> DispatchSolution:
    """
    Builds and solves one scenario.

    :param case: The case, with its data-center split already applied.
    :param scenario: The :class:`.Scenario` to solve.
    :param options: The :class:`.SolverOptions` for the simplex solver.
    :raises DispatchInfeasible: If the scenario has no feasible dispatch. The error names
        the constraint family responsible when it can be identified.
    :raises DispatchUnbounded: If the program is unbounded.
    """
    lp, index = build_lp(case, scenario)
    check_feasibility(case, scenario)

    sol = solve(lp, options)
    if sol.status is LpStatus.INFEASIBLE:
        rows = sol.diagnostics.get("infeasible_rows", [])
        family = family_of(rows[0]) if rows else None
        described = FAMILIES.get(family, "unknown")
        raise DispatchInfeasible(
            f"scenario {scenario.name!r} is infeasible ({described} constraints"
            + (f", first at {rows[0]})" if rows else ")"),
            family=family,
            rows=rows,
        )

    if sol.status is LpStatus.UNBOUNDED:
        raise DispatchUnbounded(f"scenario {scenario.name!r} is unbounded")

    result = _extract(case, scenario, lp, index, sol)
    logger.info(
        f"Solved {case.name}/{scenario.name}: cost {result.objective_cost:.2f} in "
        f"{sol.iteration_count} iterations" + (" (degenerate)" if sol.degenerate else "")
    )
    return result


def be_shift_profile(
    sol_flexible: DispatchSolution, sol_fixed: DispatchSolution, dc_id: int
) -> np.ndarray:
    """
    :return: How far the flexible schedule of data center ``dc_id`` moves its BE power
        from the fixed schedule, per interval, in MW.
    :raises DispatchError: If the solutions come from different cases, or the data center
        is unknown.
    """
    if sol_flexible.case_signature != sol_fixed.case_signature:
        raise DispatchError(
            f"solutions {sol_flexible.scenario_name!r} and {sol_fixed.scenario_name!r} were "
            f"solved on different cases",
            code=ErrorCode.CASE_MISMATCH,
        )

    try:
        return sol_flexible.be_schedule[dc_id] - sol_fixed.be_schedule[dc_id]
    except KeyError:
        raise DispatchError(
            f"unknown data center {dc_id}", code=ErrorCode.UNKNOWN_DATA_CENTER
        ) from None
