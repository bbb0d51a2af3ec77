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
Wrappers for Bus objects.

.. currentmodule:: gridflex.dataclasses.bus
"""
from dataclasses import dataclass
from typing import Tuple


@dataclass(frozen=True)
class Bus:
    """
    Represents a network bus.
    """

    #: The 1-based contiguous index of this bus.
    id: int

    #: The lower voltage-angle limit, in radians.
    angle_min: float

    #: The upper voltage-angle limit, in radians.
    angle_max: float

    #: If this is the reference bus whose angle is held at zero.
    is_slack: bool

    #: The non-data-center demand at this bus, in MW, one entry per interval.
    base_load: Tuple[float, ...]

    def load_at(self, t: int) -> float:
        """
        :param t: The 0-based interval index.
        :return: The base load at interval ``t``.
        """
        return self.base_load[t]
