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
The linear program container and its solution.

Programs are in bounded-row, bounded-variable form::

    minimize    c @ x
    subject to  row_lower <= A @ x <= row_upper
                var_lower <= x <= var_upper

with ``-inf`` / ``+inf`` marking absent bounds and ``row_lower == row_upper`` marking
equality rows. ``A`` is stored sparsely, one ``(index, value)`` list per row.

.. currentmodule:: gridflex.lp.program
"""
import enum
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Tuple

import numpy as np
from scipy.sparse import csr_matrix

from gridflex.exc import InvalidProgram

INF = math.inf


class LpStatus(enum.Enum):
    """
    Represents the outcome of a solve.
    """

    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class SolverOptions:
    """
    Tolerances and limits for :func:`.solve`.
    """

    #: Primal feasibility tolerance.
    feas_tol: float = 1e-7

    #: Reduced-cost optimality tolerance.
    opt_tol: float = 1e-7

    #: Complementarity tolerance used by KKT checks.
    comp_tol: float = 1e-6

    #: The iteration limit. ``None`` means ``50 * (rows + vars)``.
    max_iters: Optional[int] = None

    #: Refactorize the basis after this many updates.
    refactor_every: int = 100

    #: Iterations without objective improvement before Bland's rule is engaged.
    stall_limit: int = 50

    #: The basis residual that triggers an early refactorization.
    residual_tol: float = 1e-9

    #: Programs with more columns than this are priced block by block, taking the best
    #: candidate of the first block that has one. ``0`` always prices every column.
    pricing_block: int = 2000

    @classmethod
    def from_dict(cls, doc: Dict[str, Any]) -> "SolverOptions":
        return cls(**doc)


@dataclass
class LpRow:
    """
    One constraint row.
    """

    #: The sparse coefficients, as ``(variable index, value)`` pairs.
    coefficients: List[Tuple[int, float]]
    lower: float
    upper: float
    name: str = ""

    @property
    def is_equality(self) -> bool:
        return self.lower == self.upper


class LinearProgram(object):
    """
    A minimization LP, built up variable by variable and row by row.

    .. code-block:: python3

        lp = LinearProgram()
        x = lp.add_variable("x", lower=-INF, upper=INF, cost=1.0)
        lp.add_row("x_min", [(x, 1.0)], lower=3.0)

    """

    def __init__(self, name: str = "lp"):
        self.name = name

        #: The cost coefficient of every variable.
        self.objective: List[float] = []

        #: The ``(lower, upper)`` bounds of every variable.
        self.var_bounds: List[Tuple[float, float]] = []

        #: Variable name tags, for diagnostics.
        self.var_names: List[str] = []

        #: The constraint rows.
        self.rows: List[LpRow] = []

        #: A constant added to the objective when reporting. Not seen by the solver.
        self.objective_offset: float = 0.0

    @property
    def num_vars(self) -> int:
        return len(self.objective)

    @property
    def num_rows(self) -> int:
        return len(self.rows)

    @property
    def row_names(self) -> List[str]:
        return [row.name for row in self.rows]

    def add_variable(
        self, name: str = "", *, lower: float = 0.0, upper: float = INF, cost: float = 0.0
    ) -> int:
        """
        Adds a variable.

        :return: The index of the new variable.
        """
        self.objective.append(float(cost))
        self.var_bounds.append((float(lower), float(upper)))
        self.var_names.append(name or f"x{len(self.var_names)}")
        return len(self.objective) - 1

    def add_row(
        self,
        name: str,
        coefficients: Iterable[Tuple[int, float]],
        *,
        lower: float = -INF,
        upper: float = INF,
    ) -> int:
        """
        Adds a row ``lower <= sum(value * x[index]) <= upper``.

        :return: The index of the new row.
        """
        coefficients = [(int(j), float(v)) for j, v in coefficients]
        self.rows.append(LpRow(coefficients, float(lower), float(upper), name))
        return len(self.rows) - 1

    def set_cost(self, index: int, cost: float):
        self.objective[index] = float(cost)

    def validate(self):
        """
        :raises InvalidProgram: If a bound pair is inverted, a value is NaN, or a row
            repeats a variable index.
        """
        for j, (low, high) in enumerate(self.var_bounds):
            if math.isnan(low) or math.isnan(high) or low > high:
                raise InvalidProgram(f"variable {self.var_names[j]}: bounds [{low}, {high}]")
            if math.isnan(self.objective[j]) or math.isinf(self.objective[j]):
                raise InvalidProgram(f"variable {self.var_names[j]}: cost {self.objective[j]}")

        for i, row in enumerate(self.rows):
            if math.isnan(row.lower) or math.isnan(row.upper) or row.lower > row.upper:
                raise InvalidProgram(f"row {row.name or i}: bounds [{row.lower}, {row.upper}]")

            seen = set()
            for j, value in row.coefficients:
                if j in seen:
                    raise InvalidProgram(f"row {row.name or i}: repeated variable index {j}")
                if not 0 <= j < self.num_vars:
                    raise InvalidProgram(f"row {row.name or i}: variable index {j} out of range")
                if not math.isfinite(value):
                    raise InvalidProgram(f"row {row.name or i}: coefficient {value}")

                seen.add(j)

    # array views
    def matrix(self) -> csr_matrix:
        """
        :return: The constraint matrix as a ``num_rows x num_vars`` CSR matrix.
        """
        indptr = [0]
        indices = []
        data = []
        for row in self.rows:
            for j, value in row.coefficients:
                indices.append(j)
                data.append(value)
            indptr.append(len(indices))

        return csr_matrix(
            (np.asarray(data, dtype=float), np.asarray(indices, dtype=np.int64), indptr),
            shape=(self.num_rows, self.num_vars),
        )

    def cost_vector(self) -> np.ndarray:
        return np.asarray(self.objective, dtype=float)

    def var_lower(self) -> np.ndarray:
        return np.asarray([b[0] for b in self.var_bounds], dtype=float)

    def var_upper(self) -> np.ndarray:
        return np.asarray([b[1] for b in self.var_bounds], dtype=float)

    def row_lower(self) -> np.ndarray:
        return np.asarray([row.lower for row in self.rows], dtype=float)

    def row_upper(self) -> np.ndarray:
        return np.asarray([row.upper for row in self.rows], dtype=float)

    def scaled(self, factor: float) -> "LinearProgram":
        """
        :return: A copy of this program with the objective multiplied by ``factor``.
        """
        copy = LinearProgram(self.name)
        copy.objective = [c * factor for c in self.objective]
        copy.var_bounds = list(self.var_bounds)
        copy.var_names = list(self.var_names)
        copy.rows = [LpRow(list(r.coefficients), r.lower, r.upper, r.name) for r in self.rows]
        copy.objective_offset = self.objective_offset * factor
        return copy

    def __repr__(self) -> str:
        nnz = sum(len(row.coefficients) for row in self.rows)
        return f"<LinearProgram {self.name!r} vars={self.num_vars} rows={self.num_rows} nnz={nnz}>"


@dataclass
class LpSolution:
    """
    The result of :func:`.solve`.

    Duals follow the minimization convention: the dual of a row is the rate of change of
    the optimal objective per unit increase of the row's binding bound, so a binding
    lower bound has a non-negative dual and a binding upper bound a non-positive one.
    Degenerate optima have basis-dependent duals.
    """

    status: LpStatus

    #: The value of every variable.
    x: np.ndarray

    #: ``c @ x``, excluding :attr:`.LinearProgram.objective_offset`.
    objective_value: float

    #: The dual value of every row.
    duals: np.ndarray

    #: The reduced cost ``c - A.T @ duals`` of every variable.
    reduced_costs: np.ndarray

    iteration_count: int

    #: The indices of the basic structural variables (row logicals excluded).
    basis: Tuple[int, ...] = ()

    #: If any basic variable sits at one of its bounds.
    degenerate: bool = False

    #: Extra details: ``infeasible_rows`` for infeasible programs, ``ray`` for unbounded
    #: ones, ``phase1_objective`` and ``refactorizations`` always.
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    @property
    def is_optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL
