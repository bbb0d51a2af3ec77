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
Case handling and scenario construction.

This package loads, validates and saves case files, provides the built-in fixtures, and
turns a case into the scenarios that the dispatch model solves.

.. currentmodule:: gridflex.core

.. autosummary::
    :toctree: core

    casefile
    validation
    fixtures
    scenario
"""
