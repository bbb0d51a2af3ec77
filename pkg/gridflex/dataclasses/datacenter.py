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
Wrappers for DataCenter objects.

.. currentmodule:: gridflex.dataclasses.datacenter
"""
from dataclasses import dataclass
from typing import Tuple


@dataclass(frozen=True)
class DataCenter:
    """
    Represents a data center, whose consumption is split into latency-critical (LC),
    auxiliary and best-effort (BE) parts. Only the BE part may be rescheduled, subject to
    a daily energy requirement.
    """

    id: int

    #: The bus this data center draws from.
    bus: int

    #: The peak power rating, in MW.
    peak_mw: float

    #: The non-schedulable LC power per interval, in MW.
    lc_profile: Tuple[float, ...]

    #: The non-schedulable auxiliary power per interval, in MW.
    aux_profile: Tuple[float, ...]

    #: The BE energy that must be served over the horizon, in MWh.
    be_energy_mwh: float

    def headroom(self, t: int) -> float:
        """
        :return: The most BE power that fits under the peak rating at interval ``t``.
        """
        return self.peak_mw - self.lc_profile[t] - self.aux_profile[t]

    def total_headroom_mwh(self, dt_hours: float) -> float:
        """
        :return: The most BE energy that fits under the peak rating over the horizon.
        """
        return sum(self.headroom(t) for t in range(len(self.lc_profile))) * dt_hours
