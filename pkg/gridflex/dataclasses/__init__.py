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
The immutable data model for a dispatch case.

Every class in this package is a frozen :func:`dataclasses.dataclass`; per-interval series
are stored as tuples so that a :class:`.DispatchCase` can be shared freely between
concurrently solved scenarios.

Units follow the power-system conventions used throughout: MW, MWh, $/MWh, lbs/MWh,
radians and hours. Only line susceptance is per-unit.

.. currentmodule:: gridflex.dataclasses

.. autosummary::
    :toctree: dataclasses

    bus
    generator
    line
    datacenter
    case
"""
