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
Independent optimality checks for LP solutions.

.. currentmodule:: gridflex.lp.kkt
"""
from dataclasses import dataclass

import numpy as np

from gridflex.lp.program import LinearProgram, LpSolution, SolverOptions


@dataclass(frozen=True)
class KktReport:
    """
    Residuals of the Karush-Kuhn-Tucker conditions for a solution.
    """

    #: The largest violation of a variable bound or row bound.
    primal_residual: float

    #: The largest violation of a dual sign condition, or mismatch between the reported
    #: reduced costs and ``c - A.T @ duals``.
    dual_residual: float

    #: The largest complementary-slackness product.
    complementarity: float

    #: ``|c @ x - dual objective|``.
    duality_gap: float

    def within(self, options: SolverOptions = None) -> bool:
        """
        :return: True if all residuals are inside the tolerances of ``options``.
        """
        options = options or SolverOptions()
        return (
            self.primal_residual <= options.feas_tol
            and self.dual_residual <= options.opt_tol
            and self.complementarity <= options.comp_tol
        )

    @property
    def worst(self) -> float:
        return max(self.primal_residual, self.dual_residual, self.complementarity)


def _bound_terms(value: np.ndarray, lower: np.ndarray, upper: np.ndarray, mult: np.ndarray):
    """
    Sign violation and complementarity of multipliers ``mult`` on ``lower <= value <=
    upper``. A positive multiplier belongs to the lower bound, a negative one to the upper.
    """
    positive = np.maximum(mult, 0.0)
    negative = np.maximum(-mult, 0.0)
    has_lower = np.isfinite(lower)
    has_upper = np.isfinite(upper)

    sign = np.where(has_lower, 0.0, positive) + np.where(has_upper, 0.0, negative)
    slack_lower = np.where(has_lower, value - np.where(has_lower, lower, 0.0), 0.0)
    slack_upper = np.where(has_upper, np.where(has_upper, upper, 0.0) - value, 0.0)
    comp = positive * np.abs(slack_lower) + negative * np.abs(slack_upper)
    return sign, comp


def dual_objective(lp: LinearProgram, duals: np.ndarray, reduced_costs: np.ndarray) -> float:
    """
    The Lagrangian dual objective. Terms whose bound is infinite are skipped; their sign
    violation is reported by :func:`.check_kkt` instead.
    """

    def side(mult, lower, upper):
        has_lower = np.isfinite(lower)
        has_upper = np.isfinite(upper)
        low = np.where(has_lower, np.maximum(mult, 0.0) * np.where(has_lower, lower, 0.0), 0.0)
        high = np.where(has_upper, np.minimum(mult, 0.0) * np.where(has_upper, upper, 0.0), 0.0)
        return float(np.sum(low) + np.sum(high))

    return side(duals, lp.row_lower(), lp.row_upper()) + side(
        reduced_costs, lp.var_lower(), lp.var_upper()
    )


def check_kkt(lp: LinearProgram, sol: LpSolution) -> KktReport:
    """
    Recomputes the KKT residuals of ``sol`` from the program data.

    Reduced costs are rederived as ``c - A.T @ duals``; their disagreement with
    ``sol.reduced_costs`` is part of the dual residual.
    """
    x = np.asarray(sol.x, dtype=float)
    y = np.asarray(sol.duals, dtype=float)
    c = lp.cost_vector()
    a = lp.matrix()
    var_lower, var_upper = lp.var_lower(), lp.var_upper()
    row_lower, row_upper = lp.row_lower(), lp.row_upper()

    activity = a @ x if lp.num_rows else np.zeros(0)
    primal = np.concatenate([
        np.maximum(var_lower - x, 0.0),
        np.maximum(x - var_upper, 0.0),
        np.maximum(row_lower - activity, 0.0),
        np.maximum(activity - row_upper, 0.0),
    ])

    reduced = c - a.T @ y if lp.num_rows else c.copy()
    mismatch = np.abs(reduced - np.asarray(sol.reduced_costs, dtype=float))

    var_sign, var_comp = _bound_terms(x, var_lower, var_upper, reduced)
    row_sign, row_comp = _bound_terms(activity, row_lower, row_upper, y)

    def peak(*arrays) -> float:
        return float(max((np.max(arr, initial=0.0) for arr in arrays), default=0.0))

    gap = abs(float(c @ x) - dual_objective(lp, y, reduced))
    return KktReport(
        primal_residual=peak(primal),
        dual_residual=peak(mismatch, var_sign, row_sign),
        complementarity=peak(var_comp, row_comp),
        duality_gap=gap,
    )
