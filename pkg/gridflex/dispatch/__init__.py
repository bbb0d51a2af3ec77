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
The dispatch model: LP assembly, solving and result export.

.. currentmodule:: gridflex.dispatch

.. autosummary::
    :toctree: dispatch

    index
    builder
    solution
    export
"""
from gridflex.dispatch.builder import build_lp, check_feasibility, nodal_demand
from gridflex.dispatch.export import export_solution, solution_tables
from gridflex.dispatch.index import VariableIndex
from gridflex.dispatch.solution import DispatchSolution, be_shift_profile, solve_dispatch

__all__ = (
    "DispatchSolution",
    "VariableIndex",
    "be_shift_profile",
    "build_lp",
    "check_feasibility",
    "export_solution",
    "nodal_demand",
    "solution_tables",
    "solve_dispatch",
)
