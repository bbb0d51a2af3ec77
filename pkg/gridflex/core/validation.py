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
Invariant checking for :class:`.DispatchCase`.

Violations are returned as data. Every type invariant maps to exactly one
:class:`.ViolationCode`.

.. currentmodule:: gridflex.core.validation
"""
import enum
import logging
import math
from collections import Counter
from dataclasses import dataclass
from typing import List, Optional

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from gridflex.dataclasses.case import DispatchCase

logger = logging.getLogger(__name__)

#: Slack allowed when comparing energies and powers.
TOLERANCE = 1e-9


class ViolationCode(enum.Enum):
    """
    Represents one invariant of the data model.
    """

    CASE_HORIZON = "horizon must be at least 1"
    CASE_DT = "dt_hours must be positive"
    CASE_S_BASE = "s_base must be positive"
    DUPLICATE_ID = "ids must be unique within an entity kind"
    BUS_IDS_NOT_CONTIGUOUS = "bus ids must be 1..|B|"
    SLACK_COUNT = "exactly one bus must be the slack bus"
    BUS_ANGLE_RANGE = "angle_min <= 0 <= angle_max"
    SLACK_ANGLE_NONZERO = "slack bus angle limits must both be 0"
    BUS_LOAD_LENGTH = "base_load length must equal the horizon"
    BUS_LOAD_NEGATIVE = "base_load entries must be >= 0"

    SEGMENT_CAP_NEGATIVE = "segment cap_mw must be >= 0"
    SEGMENT_COST_ORDER = "segment costs must be nondecreasing (convex cost curve)"
    GEN_NO_SEGMENTS = "dispatchable generators need at least one segment"
    GEN_RAMP_NEGATIVE = "ramp limits must be >= 0"
    GEN_NO_LOAD_NEGATIVE = "no_load_cost must be >= 0"
    GEN_EMISSION_NEGATIVE = "emission rates must be >= 0"
    GEN_FIXED_OUTPUT_LENGTH = "non-dispatchable fixed_output length must equal the horizon"
    GEN_FIXED_OUTPUT_NEGATIVE = "fixed_output entries must be >= 0"
    GEN_UNKNOWN_BUS = "generator bus must exist"

    LINE_FLOW_RANGE = "flow_min <= 0 <= flow_max"
    LINE_SELF_LOOP = "from_bus must differ from to_bus"
    LINE_UNKNOWN_BUS = "line end buses must exist"
    NETWORK_DISCONNECTED = "the network must be connected"

    DC_PEAK_NONPOSITIVE = "peak_mw must be > 0"
    DC_PROFILE_LENGTH = "lc_profile and aux_profile lengths must equal the horizon"
    DC_PROFILE_NEGATIVE = "lc_profile and aux_profile entries must be >= 0"
    DC_PEAK_EXCEEDED = "lc + aux must not exceed peak_mw (peak limit infeasible)"
    DC_ENERGY_NEGATIVE = "be_energy_mwh must be >= 0"
    DC_ENERGY_EXCEEDS_HEADROOM = "be_energy_mwh must fit under the peak-limit headroom"
    DC_UNKNOWN_BUS = "data center bus must exist"
    DC_SHARED_BUS = "at most one data center per bus"

    NON_FINITE = "numeric fields must be finite"


@dataclass(frozen=True)
class Violation:
    """
    A single broken invariant.
    """

    code: ViolationCode

    #: The entity kind, e.g. ``bus`` or ``data_center``. ``case`` for case-level rules.
    entity: str

    #: The entity id, if any.
    entity_id: Optional[int] = None

    #: Extra detail, e.g. the offending interval.
    detail: str = ""

    def __str__(self) -> str:
        who = self.entity if self.entity_id is None else f"{self.entity} {self.entity_id}"
        extra = f" ({self.detail})" if self.detail else ""
        return f"{self.code.name}: {who}: {self.code.value}{extra}"


def _nonfinite(values) -> bool:
    try:
        return any(not math.isfinite(float(v)) for v in values)
    except (TypeError, ValueError):
        return True


class _Checker(object):
    """
    Accumulates violations for one case.
    """

    def __init__(self, case: DispatchCase):
        self.case = case
        self.violations: List[Violation] = []

    def add(self, code: ViolationCode, entity: str, entity_id: int = None, detail: str = ""):
        self.violations.append(Violation(code, entity, entity_id, detail))

    def check_case(self):
        case = self.case
        if not isinstance(case.horizon, int) or case.horizon < 1:
            self.add(ViolationCode.CASE_HORIZON, "case")
        if not case.dt_hours > 0:
            self.add(ViolationCode.CASE_DT, "case")
        if not case.s_base > 0:
            self.add(ViolationCode.CASE_S_BASE, "case")

        for kind, items in (
            ("bus", case.buses),
            ("generator", case.generators),
            ("line", case.lines),
            ("data_center", case.data_centers),
        ):
            counts = Counter(item.id for item in items)
            for item_id, count in sorted(counts.items()):
                if count > 1:
                    self.add(ViolationCode.DUPLICATE_ID, kind, item_id, f"{count} copies")

    def check_buses(self):
        case = self.case
        ids = sorted(bus.id for bus in case.buses)
        if ids != list(range(1, len(case.buses) + 1)):
            self.add(ViolationCode.BUS_IDS_NOT_CONTIGUOUS, "case")

        slack_count = sum(1 for bus in case.buses if bus.is_slack)
        if slack_count != 1:
            self.add(ViolationCode.SLACK_COUNT, "case", detail=f"found {slack_count}")

        for bus in case.buses:
            if _nonfinite((bus.angle_min, bus.angle_max)) or _nonfinite(bus.base_load):
                self.add(ViolationCode.NON_FINITE, "bus", bus.id)
                continue

            if not bus.angle_min <= 0 <= bus.angle_max:
                self.add(ViolationCode.BUS_ANGLE_RANGE, "bus", bus.id)
            if bus.is_slack and (bus.angle_min != 0 or bus.angle_max != 0):
                self.add(ViolationCode.SLACK_ANGLE_NONZERO, "bus", bus.id)
            if len(bus.base_load) != case.horizon:
                self.add(ViolationCode.BUS_LOAD_LENGTH, "bus", bus.id)
            if any(v < 0 for v in bus.base_load):
                self.add(ViolationCode.BUS_LOAD_NEGATIVE, "bus", bus.id)

    def check_generators(self):
        case = self.case
        bus_ids = set(case.bus_ids)
        for gen in case.generators:
            numbers = [gen.no_load_cost, gen.ramp_up, gen.ramp_down, gen.ghg_rate, gen.tox_rate]
            numbers += [seg.cap_mw for seg in gen.segments]
            numbers += [seg.cost_per_mwh for seg in gen.segments]
            numbers += [rate for _, rate in gen.pollutant_rates]
            if _nonfinite(numbers) or _nonfinite(gen.fixed_output):
                self.add(ViolationCode.NON_FINITE, "generator", gen.id)
                continue

            if gen.bus not in bus_ids:
                self.add(ViolationCode.GEN_UNKNOWN_BUS, "generator", gen.id, f"bus {gen.bus}")
            if gen.ramp_up < 0 or gen.ramp_down < 0:
                self.add(ViolationCode.GEN_RAMP_NEGATIVE, "generator", gen.id)
            if gen.no_load_cost < 0:
                self.add(ViolationCode.GEN_NO_LOAD_NEGATIVE, "generator", gen.id)
            if gen.ghg_rate < 0 or gen.tox_rate < 0 or any(r < 0 for _, r in gen.pollutant_rates):
                self.add(ViolationCode.GEN_EMISSION_NEGATIVE, "generator", gen.id)
            if any(seg.cap_mw < 0 for seg in gen.segments):
                self.add(ViolationCode.SEGMENT_CAP_NEGATIVE, "generator", gen.id)

            costs = [seg.cost_per_mwh for seg in gen.segments]
            if any(b < a for a, b in zip(costs, costs[1:])):
                self.add(ViolationCode.SEGMENT_COST_ORDER, "generator", gen.id)

            if gen.dispatchable:
                if not gen.segments:
                    self.add(ViolationCode.GEN_NO_SEGMENTS, "generator", gen.id)
            else:
                if len(gen.fixed_output) != case.horizon:
                    self.add(ViolationCode.GEN_FIXED_OUTPUT_LENGTH, "generator", gen.id)
                if any(v < 0 for v in gen.fixed_output):
                    self.add(ViolationCode.GEN_FIXED_OUTPUT_NEGATIVE, "generator", gen.id)

    def check_lines(self):
        bus_ids = set(self.case.bus_ids)
        for line in self.case.lines:
            if _nonfinite((line.susceptance, line.flow_min, line.flow_max)):
                self.add(ViolationCode.NON_FINITE, "line", line.id)
                continue

            if not line.flow_min <= 0 <= line.flow_max:
                self.add(ViolationCode.LINE_FLOW_RANGE, "line", line.id)
            if line.from_bus == line.to_bus:
                self.add(ViolationCode.LINE_SELF_LOOP, "line", line.id)
            if line.from_bus not in bus_ids or line.to_bus not in bus_ids:
                self.add(ViolationCode.LINE_UNKNOWN_BUS, "line", line.id)

    def check_connectivity(self):
        case = self.case
        position = {bus_id: n for n, bus_id in enumerate(case.bus_ids)}
        if len(position) < 2:
            return

        edges = [
            (position[line.from_bus], position[line.to_bus])
            for line in case.lines
            if line.from_bus in position and line.to_bus in position
        ]
        rows = np.array([e[0] for e in edges], dtype=int)
        cols = np.array([e[1] for e in edges], dtype=int)
        graph = coo_matrix(
            (np.ones(len(edges)), (rows, cols)), shape=(len(position), len(position))
        )
        count, _ = connected_components(graph, directed=False)
        if count > 1:
            self.add(ViolationCode.NETWORK_DISCONNECTED, "case", detail=f"{count} islands")

    def check_data_centers(self):
        case = self.case
        bus_ids = set(case.bus_ids)
        seen_buses = Counter(dc.bus for dc in case.data_centers)
        for dc in case.data_centers:
            if _nonfinite((dc.peak_mw, dc.be_energy_mwh)) or _nonfinite(
                tuple(dc.lc_profile) + tuple(dc.aux_profile)
            ):
                self.add(ViolationCode.NON_FINITE, "data_center", dc.id)
                continue

            if dc.bus not in bus_ids:
                self.add(ViolationCode.DC_UNKNOWN_BUS, "data_center", dc.id, f"bus {dc.bus}")
            if seen_buses[dc.bus] > 1:
                self.add(ViolationCode.DC_SHARED_BUS, "data_center", dc.id, f"bus {dc.bus}")
            if not dc.peak_mw > 0:
                self.add(ViolationCode.DC_PEAK_NONPOSITIVE, "data_center", dc.id)
            if dc.be_energy_mwh < 0:
                self.add(ViolationCode.DC_ENERGY_NEGATIVE, "data_center", dc.id)

            lengths_ok = len(dc.lc_profile) == case.horizon == len(dc.aux_profile)
            if not lengths_ok:
                self.add(ViolationCode.DC_PROFILE_LENGTH, "data_center", dc.id)
            if any(v < 0 for v in dc.lc_profile) or any(v < 0 for v in dc.aux_profile):
                self.add(ViolationCode.DC_PROFILE_NEGATIVE, "data_center", dc.id)
            if not lengths_ok:
                continue

            over = [
                t for t in range(case.horizon)
                if dc.lc_profile[t] + dc.aux_profile[t] > dc.peak_mw + TOLERANCE
            ]
            if over:
                self.add(
                    ViolationCode.DC_PEAK_EXCEEDED, "data_center", dc.id,
                    "intervals " + ", ".join(str(t + 1) for t in over),
                )
            elif case.dt_hours > 0:
                room = dc.total_headroom_mwh(case.dt_hours)
                if dc.be_energy_mwh > room * (1 + TOLERANCE) + TOLERANCE:
                    self.add(
                        ViolationCode.DC_ENERGY_EXCEEDS_HEADROOM, "data_center", dc.id,
                        f"{dc.be_energy_mwh} MWh > {room} MWh",
                    )

    def run(self) -> List[Violation]:
        self.check_case()
        self.check_buses()
        self.check_generators()
        self.check_lines()
        self.check_connectivity()
        self.check_data_centers()
        return self.violations


def validate_case(case: DispatchCase) -> List[Violation]:
    """
    Checks every type invariant of ``case``.

    :param case: The :class:`.DispatchCase` to check.
    :return: A list of :class:`.Violation`; empty iff the case is valid.
    """
    violations = _Checker(case).run()
    if violations:
        logger.debug(f"Case {case.name!r} has {len(violations)} violation(s)")

    return violations
