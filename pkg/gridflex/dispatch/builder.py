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
Assembly of the multi-period DC-OPF dispatch as a :class:`.LinearProgram`.

For every interval ``t`` the program holds:

- segment outputs ``0 <= pseg[g,s,t] <= cap`` and a free total output ``p[g,t]`` for
  every dispatchable generator, tied by ``p - sum(pseg) = 0``;
- ramp rows ``p[g,t] - p[g,t-1] <= ramp_up`` and ``p[g,t-1] - p[g,t] <= ramp_down``
  from the second interval on, with no initial condition;
- flows bounded by the line limits, tied to angles by
  ``f + b*S*theta_from - b*S*theta_to = 0``;
- angles bounded by the bus limits, with the slack angle pinned at zero;
- a nodal balance row per bus with the non-schedulable demand on the right-hand side
  and flexible BE power as a variable on the left;

plus one energy row per flexible data center. Segment costs enter the objective as
``cost * dt``; the no-load cost is a constant carried as the objective offset.

.. currentmodule:: gridflex.dispatch.builder
"""
import logging
from typing import Dict, List, Tuple

from gridflex.core.scenario import Scenario
from gridflex.dataclasses.case import DispatchCase
from gridflex.dispatch.index import VariableIndex
from gridflex.exc import DispatchError, DispatchInfeasible, ErrorCode, ScenarioError
from gridflex.lp.program import INF, LinearProgram

logger = logging.getLogger(__name__)

#: Slack allowed by the pre-solve checks before a shortfall is reported.
PRESOLVE_TOLERANCE = 1e-9


def nodal_demand(case: DispatchCase, scenario: Scenario) -> Dict[Tuple[int, int], float]:
    """
    :return: (bus id, t) -> the fixed right-hand side of the nodal balance: base load,
        data-center LC and auxiliary power and fixed BE power, less non-dispatchable
        output.
    """
    demand = {}
    injected = case.fixed_injection()
    for bus in case.buses:
        for t in range(case.horizon):
            demand[bus.id, t] = bus.base_load[t] - injected[bus.id][t]

    for dc in case.data_centers:
        fixed = scenario.fixed_be_profiles.get(dc.id)
        for t in range(case.horizon):
            extra = dc.lc_profile[t] + dc.aux_profile[t]
            if fixed is not None:
                extra += fixed[t]
            demand[dc.bus, t] += extra

    return demand


def check_feasibility(case: DispatchCase, scenario: Scenario):
    """
    Catches the infeasibilities that can be named without solving.

    :raises DispatchInfeasible: If a flexible data center needs more BE energy than fits
        under its peak rating (``energy`` family), or if some interval's demand exceeds
        the total dispatchable capacity (``balance`` family).
    """
    for dc in case.data_centers:
        if dc.id not in scenario.flexible_dc_ids:
            continue

        room = dc.total_headroom_mwh(case.dt_hours)
        if dc.be_energy_mwh > room + PRESOLVE_TOLERANCE * max(1.0, room):
            raise DispatchInfeasible(
                f"data center {dc.id} needs {dc.be_energy_mwh} MWh of BE energy but its "
                f"peak-limit headroom only fits {room} MWh",
                family="energy",
                rows=[f"energy[dc{dc.id}]"],
            )

    capacity = sum(gen.capacity_mw for gen in case.dispatchable_generators)
    demand = nodal_demand(case, scenario)
    for t in range(case.horizon):
        total = sum(demand[bus.id, t] for bus in case.buses)
        if total > capacity + PRESOLVE_TOLERANCE * max(1.0, capacity):
            raise DispatchInfeasible(
                f"interval {t + 1}: net demand {total} MW exceeds dispatchable capacity "
                f"{capacity} MW",
                family="balance",
                rows=[f"balance[b{bus.id},t{t + 1}]" for bus in case.buses],
            )


def build_lp(case: DispatchCase, scenario: Scenario) -> Tuple[LinearProgram, VariableIndex]:
    """
    Builds the dispatch program for one scenario.

    :param case: The case, with its data-center split already applied.
    :param scenario: The :class:`.Scenario` naming the flexible data centers.
    :return: The program and the :class:`.VariableIndex` describing it.
    :raises DispatchError: If the scenario does not fit the case.
    """
    try:
        scenario.check(case)
    except ScenarioError as e:
        raise DispatchError(str(e.error_message), code=ErrorCode.CASE_MISMATCH) from e

    lp = LinearProgram(f"{case.name}:{scenario.name}")
    index = VariableIndex()
    dt = case.dt_hours
    horizon = case.horizon
    dispatchable = case.dispatchable_generators
    slack = case.slack_bus.id
    flexible = [dc for dc in case.data_centers if dc.id in scenario.flexible_dc_ids]

    # variables
    for t in range(horizon):
        tag = f"t{t + 1}"
        for gen in dispatchable:
            for s, seg in enumerate(gen.segments):
                index.segment[gen.id, s, t] = lp.add_variable(
                    f"pseg[g{gen.id},s{s + 1},{tag}]",
                    lower=0.0, upper=seg.cap_mw, cost=seg.cost_per_mwh * dt,
                )
            index.generation[gen.id, t] = lp.add_variable(
                f"p[g{gen.id},{tag}]", lower=-INF, upper=INF
            )

        for line in case.lines:
            index.flow[line.id, t] = lp.add_variable(
                f"f[l{line.id},{tag}]", lower=line.flow_min, upper=line.flow_max
            )

        for bus in case.buses:
            if bus.id == slack:
                low, high = 0.0, 0.0
            else:
                low, high = bus.angle_min, bus.angle_max
            index.angle[bus.id, t] = lp.add_variable(
                f"theta[b{bus.id},{tag}]", lower=low, upper=high
            )

        for dc in flexible:
            index.be[dc.id, t] = lp.add_variable(
                f"be[dc{dc.id},{tag}]", lower=0.0, upper=max(dc.headroom(t), 0.0)
            )

    # rows
    for t in range(horizon):
        tag = f"t{t + 1}"
        for gen in dispatchable:
            coeffs = [(index.generation[gen.id, t], 1.0)]
            coeffs += [(index.segment[gen.id, s, t], -1.0) for s in range(len(gen.segments))]
            index.gen_def[gen.id, t] = lp.add_row(
                f"gen_def[g{gen.id},{tag}]", coeffs, lower=0.0, upper=0.0
            )

            if t > 0:
                now, before = index.generation[gen.id, t], index.generation[gen.id, t - 1]
                index.ramp_up[gen.id, t] = lp.add_row(
                    f"ramp_up[g{gen.id},{tag}]", [(now, 1.0), (before, -1.0)], upper=gen.ramp_up
                )
                index.ramp_down[gen.id, t] = lp.add_row(
                    f"ramp_down[g{gen.id},{tag}]", [(before, 1.0), (now, -1.0)],
                    upper=gen.ramp_down,
                )

        for line in case.lines:
            weight = line.susceptance * case.s_base
            index.flow_def[line.id, t] = lp.add_row(
                f"flow_def[l{line.id},{tag}]",
                [
                    (index.flow[line.id, t], 1.0),
                    (index.angle[line.from_bus, t], weight),
                    (index.angle[line.to_bus, t], -weight),
                ],
                lower=0.0, upper=0.0,
            )

    demand = nodal_demand(case, scenario)
    gens_at = case.generators_at()
    dcs_at = case.data_centers_at()
    lines_at = case.lines_at()
    for t in range(horizon):
        for bus in case.buses:
            coeffs: Dict[int, float] = {}
            for gen in gens_at.get(bus.id, []):
                if gen.dispatchable:
                    coeffs[index.generation[gen.id, t]] = 1.0
            for line, sign in lines_at[bus.id]:
                coeffs[index.flow[line.id, t]] = sign
            dc = dcs_at.get(bus.id)
            if dc is not None and (dc.id, t) in index.be:
                coeffs[index.be[dc.id, t]] = -1.0

            rhs = demand[bus.id, t]
            index.balance[bus.id, t] = lp.add_row(
                f"balance[b{bus.id},t{t + 1}]", sorted(coeffs.items()), lower=rhs, upper=rhs
            )

    for dc in flexible:
        coeffs: List[Tuple[int, float]] = [(index.be[dc.id, t], dt) for t in range(horizon)]
        index.energy[dc.id] = lp.add_row(
            f"energy[dc{dc.id}]", coeffs, lower=dc.be_energy_mwh, upper=dc.be_energy_mwh
        )

    lp.objective_offset = sum(gen.no_load_cost for gen in dispatchable) * dt * horizon

    logger.info(
        f"Built dispatch LP for {case.name}/{scenario.name}: {lp.num_vars} variables, "
        f"{lp.num_rows} rows, {len(flexible)} flexible data center(s)"
    )
    return lp, index
