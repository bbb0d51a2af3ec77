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
Transmission congestion measures: the LMP dispersion metric and stressed-line counts.

.. currentmodule:: gridflex.metrics.congestion
"""
from dataclasses import dataclass
from typing import Dict, Iterable, Mapping, Sequence, Tuple

import numpy as np

from gridflex.dataclasses.line import Line
from gridflex.exc import ErrorCode, MetricsError
from gridflex.util import population_variance

#: Default share of a line rating at which the line counts as stressed.
STRESS_THRESHOLD = 0.9

#: Absolute slack, in MW, applied to the stress boundary.
STRESS_TOLERANCE = 1e-6


def congestion_metric(lmp: Mapping[int, Sequence[float]], buses: Iterable[int]) -> float:
    """
    Computes the time average of the cross-sectional LMP variance over ``buses``.

    The variance is the population variance (divided by the number of buses).

    :param lmp: A mapping of bus id -> LMP per interval, in $/MWh.
    :param buses: The bus ids to include.
    :return: The metric, in ($/MWh)^2 per interval averaged over the horizon.
    :raises MetricsError: If ``buses`` is empty or names a bus without LMPs.
    """
    subset = sorted(set(buses))
    if not subset:
        raise MetricsError("congestion metric over an empty bus subset",
                           code=ErrorCode.EMPTY_BUS_SUBSET)

    missing = [b for b in subset if b not in lmp]
    if missing:
        raise MetricsError(f"no LMPs for bus(es) {missing}")

    matrix = np.array([np.asarray(lmp[b], dtype=float) for b in subset])
    if matrix.shape[1] == 0:
        return 0.0

    return float(np.mean([population_variance(matrix[:, t]) for t in range(matrix.shape[1])]))


@dataclass(frozen=True)
class StressedLines:
    """
    Stressed (line, interval) pairs.
    """

    total: int

    #: The stressed-line count of every interval.
    per_interval: Tuple[int, ...]

    #: line id -> if that line was stressed in any interval.
    per_line: Dict[int, bool]


def stressed_lines(
    flows: Mapping[int, Sequence[float]],
    lines: Sequence[Line],
    threshold: float = STRESS_THRESHOLD,
) -> StressedLines:
    """
    Counts the (line, interval) pairs with ``flow >= threshold * flow_max`` or
    ``flow <= threshold * flow_min``. The boundary counts as stressed. A zero limit
    never marks its direction as stressed.

    :raises MetricsError: If ``threshold`` is not in (0, 1].
    """
    if not 0 < threshold <= 1:
        raise MetricsError(f"stress threshold {threshold} not in (0, 1]")

    horizon = max((len(flows[line.id]) for line in lines), default=0)
    per_interval = np.zeros(horizon, dtype=int)
    per_line = {}
    for line in lines:
        series = np.asarray(flows[line.id], dtype=float)
        stressed = np.zeros(len(series), dtype=bool)
        if line.flow_max > 0:
            stressed |= series >= threshold * line.flow_max - STRESS_TOLERANCE
        if line.flow_min < 0:
            stressed |= series <= threshold * line.flow_min + STRESS_TOLERANCE
        per_interval[:len(series)] += stressed
        per_line[line.id] = bool(stressed.any())

    return StressedLines(
        total=int(per_interval.sum()),
        per_interval=tuple(int(c) for c in per_interval),
        per_line=per_line,
    )
