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
Shared helpers for the test modules.
"""
import numpy as np

from gridflex.core.scenario import cluster_by_capacity, default_study_scenarios, make_scenario
from gridflex.lp.program import LinearProgram


def study_scenarios(case, k=3):
    """
    The default scenario set of a study on ``case``, with ``k`` clamped.
    """
    k = min(k, len(case.data_centers))
    clusters = cluster_by_capacity(case, k) if k else []
    return default_study_scenarios(case, clusters)


def fixed(case):
    return make_scenario(case, (), "without_fs")


def flexible(case):
    return make_scenario(case, (dc.id for dc in case.data_centers), "fs_whole_system")


def random_bounded_lp(rng, num_vars, num_rows, *, density=0.7):
    """
    A random LP with finite variable bounds around an interior point, so it is always
    feasible and bounded.
    """
    lp = LinearProgram("random")
    center = rng.uniform(-5.0, 5.0, num_vars)
    for j in range(num_vars):
        lp.add_variable(
            f"x{j}",
            lower=float(center[j] - rng.uniform(0.5, 3.0)),
            upper=float(center[j] + rng.uniform(0.5, 3.0)),
            cost=float(rng.normal()),
        )

    for i in range(num_rows):
        coeffs = [
            (j, float(rng.integers(-3, 4)))
            for j in range(num_vars)
            if rng.random() < density
        ]
        coeffs = [(j, v) for j, v in coeffs if v != 0.0] or [(int(rng.integers(num_vars)), 1.0)]
        activity = sum(v * center[j] for j, v in coeffs)
        kind = rng.integers(4)
        if kind == 0 and i == 0:
            lower = upper = float(activity)
        elif kind == 1:
            lower, upper = -np.inf, float(activity + rng.uniform(0.0, 2.0))
        elif kind == 2:
            lower, upper = float(activity - rng.uniform(0.0, 2.0)), np.inf
        else:
            lower = float(activity - rng.uniform(0.0, 2.0))
            upper = float(activity + rng.uniform(0.0, 2.0))
        lp.add_row(f"r{i}", coeffs, lower=lower, upper=upper)

    return lp
