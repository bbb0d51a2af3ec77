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
Wrappers for Generator objects.

.. currentmodule:: gridflex.dataclasses.generator
"""
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

#: Fuel tags counted as renewable output in the system profile.
RENEWABLE_FUELS = frozenset({"wind", "solar", "hydro", "renewable"})


@dataclass(frozen=True)
class CostSegment:
    """
    One piece of a generator's piecewise-linear cost curve.
    """

    #: The segment width, in MW.
    cap_mw: float

    #: The marginal cost of this segment, in $/MWh.
    cost_per_mwh: float


@dataclass(frozen=True)
class Generator:
    """
    Represents a generating unit.

    Non-dispatchable units (nuclear, wind, solar) inject ``fixed_output`` and have no
    decision variables; dispatchable units are scheduled over their cost ``segments``.
    """

    id: int

    #: The bus this unit is connected to.
    bus: int

    #: The no-load cost, in $/h.
    no_load_cost: float

    #: The piecewise-linear cost segments, in nondecreasing cost order.
    segments: Tuple[CostSegment, ...]

    #: The ramp-up limit, in MW per interval.
    ramp_up: float

    #: The ramp-down limit, in MW per interval.
    ramp_down: float

    dispatchable: bool = True

    #: The injected output per interval, in MW. Only used when not dispatchable.
    fixed_output: Tuple[float, ...] = ()

    #: The CO2-equivalent GHG emission rate, in lbs/MWh.
    ghg_rate: float = 0.0

    #: The pre-combined toluene-equivalent toxic emission rate, in lbs/MWh.
    tox_rate: float = 0.0

    #: Per-pollutant emission rates (pollutant, lbs/MWh), sorted by pollutant name.
    pollutant_rates: Tuple[Tuple[str, float], ...] = ()

    #: An optional fuel tag, e.g. ``coal``, ``nuclear`` or ``wind``.
    fuel: Optional[str] = None

    #: An optional human-readable name.
    name: Optional[str] = None

    @property
    def capacity_mw(self) -> float:
        """
        :return: The total width of all cost segments.
        """
        return sum(seg.cap_mw for seg in self.segments)

    @property
    def pollutants(self) -> Dict[str, float]:
        """
        :return: A dict of pollutant -> lbs/MWh.
        """
        return dict(self.pollutant_rates)

    @property
    def is_renewable(self) -> bool:
        """
        :return: If this unit counts as renewable output. Untagged non-dispatchable units
            count as renewable.
        """
        if self.dispatchable:
            return False

        if self.fuel is None:
            return True

        return self.fuel.lower() in RENEWABLE_FUELS
