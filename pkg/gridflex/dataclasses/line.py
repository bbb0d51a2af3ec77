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
Wrappers for Line objects.

.. currentmodule:: gridflex.dataclasses.line
"""
from dataclasses import dataclass


@dataclass(frozen=True)
class Line:
    """
    Represents a transmission line. Positive flow runs from ``from_bus`` to ``to_bus``.
    """

    id: int
    from_bus: int
    to_bus: int

    #: The per-unit susceptance. Inductive lines have negative susceptance, so that
    #: ``flow = -susceptance * s_base * (angle_from - angle_to)`` is positive when the
    #: sending end leads.
    susceptance: float

    #: The lower flow limit, in MW (non-positive).
    flow_min: float

    #: The upper flow limit, in MW (non-negative).
    flow_max: float
