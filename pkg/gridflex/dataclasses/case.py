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
Defines :class:`.DispatchCase`.

.. currentmodule:: gridflex.dataclasses.case
"""
from dataclasses import dataclass, replace
from typing import Dict, List, Tuple

from gridflex.dataclasses.bus import Bus
from gridflex.dataclasses.datacenter import DataCenter
from gridflex.dataclasses.generator import Generator
from gridflex.dataclasses.line import Line


@dataclass(frozen=True)
class DispatchCase:
    """
    A complete grid and data-center description over a dispatch horizon.
    """

    name: str

    #: The system base, in MVA.
    s_base: float

    #: The length of one dispatch interval, in hours.
    dt_hours: float

    #: The number of dispatch intervals.
    horizon: int

    buses: Tuple[Bus, ...]
    generators: Tuple[Generator, ...]
    lines: Tuple[Line, ...]
    data_centers: Tuple[DataCenter, ...] = ()

    # lookups
    @property
    def bus_ids(self) -> List[int]:
        return [bus.id for bus in self.buses]

    @property
    def slack_bus(self) -> Bus:
        """
        :return: The slack :class:`.Bus`. If no bus is flagged, the first bus.
        """
        return next((bus for bus in self.buses if bus.is_slack), self.buses[0])

    @property
    def dispatchable_generators(self) -> List[Generator]:
        return [gen for gen in self.generators if gen.dispatchable]

    @property
    def fixed_generators(self) -> List[Generator]:
        return [gen for gen in self.generators if not gen.dispatchable]

    def data_center(self, dc_id: int) -> DataCenter:
        """
        Finds a data center by ID.

        :raises KeyError: If no such data center exists.
        """
        for dc in self.data_centers:
            if dc.id == dc_id:
                return dc

        raise KeyError(dc_id)

    def data_centers_at(self) -> Dict[int, DataCenter]:
        """
        :return: A mapping of bus id -> :class:`.DataCenter` hosted there.
        """
        return {dc.bus: dc for dc in self.data_centers}

    def generators_at(self) -> Dict[int, List[Generator]]:
        """
        :return: A mapping of bus id -> generators connected there (possibly empty).
        """
        at = {bus.id: [] for bus in self.buses}
        for gen in self.generators:
            at.setdefault(gen.bus, []).append(gen)

        return at

    def lines_at(self) -> Dict[int, List[Tuple[Line, float]]]:
        """
        :return: A mapping of bus id -> ``(line, sign)`` for every line touching the bus.
            The sign is ``+1`` where the line's flow arrives and ``-1`` where it leaves.
        """
        at = {bus.id: [] for bus in self.buses}
        for line in self.lines:
            at.setdefault(line.from_bus, []).append((line, -1.0))
            at.setdefault(line.to_bus, []).append((line, 1.0))

        return at

    def fixed_injection(self) -> Dict[int, List[float]]:
        """
        :return: A mapping of bus id -> the total non-dispatchable output injected there,
            per interval.
        """
        totals = {bus.id: [0.0] * self.horizon for bus in self.buses}
        for gen in self.fixed_generators:
            row = totals.setdefault(gen.bus, [0.0] * self.horizon)
            for t in range(self.horizon):
                row[t] += gen.fixed_output[t]

        return totals

    def with_data_centers(self, data_centers) -> "DispatchCase":
        """
        :return: A copy of this case with its data centers replaced.
        """
        return replace(self, data_centers=tuple(data_centers))
