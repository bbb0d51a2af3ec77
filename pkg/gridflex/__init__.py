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
gridflex - Multi-period DC optimal power flow with flexibly scheduled data-center loads.

.. currentmodule:: gridflex

.. autosummary::
    :toctree:

    core
    dataclasses
    lp
    dispatch
    metrics
    groundwork

    exc
    util
"""
from pkg_resources import DistributionNotFound, get_distribution

try:
    __version__ = get_distribution("gridflex").version
except DistributionNotFound:
    __version__ = "0.0.0"


from gridflex.core.casefile import case_signature, load_case, save_case
from gridflex.core.fixtures import builtin_fixture, random_case
from gridflex.core.scenario import (
    Cluster,
    LoadSplitPolicy,
    Scenario,
    apply_load_split,
    cluster_by_capacity,
    default_study_scenarios,
    make_scenario,
    scenario_from_spec,
    uniform_be_profile,
)
from gridflex.core.validation import Violation, ViolationCode, validate_case
from gridflex.dataclasses.bus import Bus
from gridflex.dataclasses.case import DispatchCase
from gridflex.dataclasses.datacenter import DataCenter
from gridflex.dataclasses.generator import CostSegment, Generator
from gridflex.dataclasses.line import Line
from gridflex.dispatch import (
    DispatchSolution,
    VariableIndex,
    be_shift_profile,
    build_lp,
    export_solution,
    solve_dispatch,
)
from gridflex.exc import ErrorCode, GridflexError
from gridflex.lp import LinearProgram, LpSolution, LpStatus, SolverOptions, check_kkt, solve
from gridflex.metrics import (
    HtpTable,
    StudyReport,
    build_report,
    congestion_metric,
    ghg_total,
    stressed_lines,
    tox_total,
)
