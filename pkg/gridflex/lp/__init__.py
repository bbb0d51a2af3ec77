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
A self-contained linear programming layer: the program container, a two-phase bounded
revised simplex solver, KKT verification and MPS export.

.. currentmodule:: gridflex.lp

.. autosummary::
    :toctree: lp

    program
    simplex
    kkt
    mps
"""
from gridflex.lp.kkt import KktReport, check_kkt, dual_objective
from gridflex.lp.mps import to_mps, write_mps
from gridflex.lp.program import INF, LinearProgram, LpRow, LpSolution, LpStatus, SolverOptions
from gridflex.lp.simplex import solve

__all__ = (
    "INF",
    "KktReport",
    "LinearProgram",
    "LpRow",
    "LpSolution",
    "LpStatus",
    "SolverOptions",
    "check_kkt",
    "dual_objective",
    "solve",
    "to_mps",
    "write_mps",
)
