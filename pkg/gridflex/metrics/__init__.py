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
Evaluation metrics: congestion, stressed lines, emissions and the study report.

.. currentmodule:: gridflex.metrics

.. autosummary::
    :toctree: metrics

    congestion
    emissions
    report
"""
from gridflex.metrics.congestion import StressedLines, congestion_metric, stressed_lines
from gridflex.metrics.emissions import HtpTable, ghg_total, tox_total
from gridflex.metrics.report import ScenarioMetrics, StudyReport, build_report

__all__ = (
    "HtpTable",
    "ScenarioMetrics",
    "StressedLines",
    "StudyReport",
    "build_report",
    "congestion_metric",
    "ghg_total",
    "stressed_lines",
    "tox_total",
)
