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
A two-phase bounded revised simplex solver.

The program ``row_lower <= A @ x <= row_upper`` is solved in the computational form
``A @ x - s (+ artificials) = 0`` where every row gets a logical variable ``s`` bounded by
its row bounds. Nonbasic variables sit at one of their bounds (or at zero when free).

The basis is held as a sparse LU factorization with sparse product-form updates, refreshed
every :attr:`.SolverOptions.refactor_every` updates or when the basic solution residual
grows. Programs wider than :attr:`.SolverOptions.pricing_block` columns use partial
pricing: blocks of columns are scanned in turn, starting after the block that supplied
the last entering variable.

.. currentmodule:: gridflex.lp.simplex
"""
import logging
import math
from typing import List, Optional, Tuple

import numpy as np
from scipy.sparse import csc_matrix, csr_matrix, hstack, identity
from scipy.sparse.linalg import splu

from gridflex.exc import IterationLimitExceeded, NumericalBreakdown
from gridflex.lp.program import LinearProgram, LpSolution, LpStatus, SolverOptions

logger = logging.getLogger(__name__)

#: Smallest pivot element accepted by the ratio test.
PIVOT_TOL = 1e-9

#: How often (in iterations) the basic solution residual is checked.
RESIDUAL_CHECK_EVERY = 20

AT_LOWER = 0
AT_UPPER = 1
FREE = 2
BASIC = 3


class _Basis(object):
    """
    An LU factorization of the basis matrix plus a list of eta updates.
    """

    def __init__(self, matrix: csc_matrix, columns: np.ndarray):
        self._matrix = matrix
        #: The column of the computational matrix that is basic in each position.
        self.columns = columns
        self._etas: List[Tuple[int, np.ndarray, np.ndarray, float]] = []
        self._lu = None
        self.refactorizations = 0
        self.refactor()

    @property
    def eta_count(self) -> int:
        return len(self._etas)

    def refactor(self):
        self._etas = []
        self.refactorizations += 1
        if len(self.columns) == 0:
            return

        block = self._matrix[:, self.columns].tocsc()
        error = None
        for permc_spec in ("COLAMD", "NATURAL"):
            try:
                self._lu = splu(block, permc_spec=permc_spec)
                return
            except RuntimeError as e:
                logger.debug(f"Basis factorization with {permc_spec} failed: {e}")
                error = e

        raise NumericalBreakdown(f"singular basis after refactorization retry: {error}")

    def ftran(self, v: np.ndarray) -> np.ndarray:
        """
        Solves ``B z = v``.
        """
        if len(self.columns) == 0:
            return np.zeros(0)

        z = self._lu.solve(np.asarray(v, dtype=float))
        for r, index, values, pivot in self._etas:
            zr = z[r] / pivot
            z[index] -= values * zr
            z[r] = zr

        return z

    def btran(self, c: np.ndarray) -> np.ndarray:
        """
        Solves ``B.T w = c``.
        """
        if len(self.columns) == 0:
            return np.zeros(0)

        w = np.array(c, dtype=float)
        for r, index, values, pivot in reversed(self._etas):
            w[r] = (w[r] - values @ w[index]) / pivot

        return self._lu.solve(w, trans="T")

    def update(self, r: int, alpha: np.ndarray, entering: int):
        # only the off-pivot nonzeros are kept
        index = np.flatnonzero(alpha)
        index = index[index != r]
        self._etas.append((r, index, alpha[index].copy(), float(alpha[r])))
        self.columns[r] = entering


class _Simplex(object):
    """
    Holds the state of one solve.
    """

    def __init__(self, lp: LinearProgram, options: SolverOptions):
        self.lp = lp
        self.options = options
        self.n = n = lp.num_vars
        self.m = m = lp.num_rows

        a = lp.matrix()
        var_lower, var_upper = lp.var_lower(), lp.var_upper()
        row_lower, row_upper = lp.row_lower(), lp.row_upper()

        x0 = np.where(
            np.isfinite(var_lower), var_lower, np.where(np.isfinite(var_upper), var_upper, 0.0)
        )
        activity = a @ x0 if m else np.zeros(0)

        logicals = activity.copy()
        logical_state = np.full(m, BASIC)
        art_rows: List[int] = []
        art_signs: List[float] = []
        tol = options.feas_tol
        for i in range(m):
            if activity[i] < row_lower[i] - tol:
                logicals[i] = row_lower[i]
                logical_state[i] = AT_LOWER
                art_rows.append(i)
                art_signs.append(1.0)
            elif activity[i] > row_upper[i] + tol:
                logicals[i] = row_upper[i]
                logical_state[i] = AT_UPPER if row_lower[i] < row_upper[i] else AT_LOWER
                art_rows.append(i)
                art_signs.append(-1.0)

        k = len(art_rows)
        self.art_rows = art_rows
        self.art_start = n + m

        # [A, -I, sigma * e_i]
        art = csc_matrix(
            (np.asarray(art_signs), (np.asarray(art_rows, dtype=np.int64), np.arange(k))),
            shape=(m, k),
        )
        self.matrix = hstack([a, -identity(m, format="csc"), art], format="csc")
        self.matrix.sum_duplicates()
        self.matrix_t = self.matrix.T.tocsr()

        self.lower = np.concatenate([var_lower, row_lower, np.zeros(k)])
        self.upper = np.concatenate([var_upper, row_upper, np.full(k, math.inf)])

        art_values = np.abs(logicals[art_rows] - activity[art_rows]) if k else np.zeros(0)
        self.z = np.concatenate([x0, logicals, art_values])

        self.state = np.empty(n + m + k, dtype=np.int8)
        self.state[:n] = np.where(
            np.isfinite(var_lower), AT_LOWER, np.where(np.isfinite(var_upper), AT_UPPER, FREE)
        )
        self.state[n:n + m] = logical_state
        self.state[n + m:] = BASIC

        columns = np.arange(n, n + m, dtype=np.int64)
        for j, i in enumerate(art_rows):
            columns[i] = n + m + j

        self.basis = _Basis(self.matrix, columns)
        self.iterations = 0

        width = len(self.z)
        block = options.pricing_block
        self._blocks: List[Tuple[int, int, csr_matrix]] = []
        if block and width > block:
            for start in range(0, width, block):
                stop = min(start + block, width)
                self._blocks.append((start, stop, self.matrix_t[start:stop]))
        self._next_block = 0
        self.max_iters = options.max_iters or 50 * (m + n)

    # helpers
    @property
    def basic(self) -> np.ndarray:
        return self.basis.columns

    def _column(self, j: int) -> np.ndarray:
        column = np.zeros(self.m)
        begin, end = self.matrix.indptr[j], self.matrix.indptr[j + 1]
        column[self.matrix.indices[begin:end]] = self.matrix.data[begin:end]
        return column

    def _recompute_basics(self):
        nonbasic = self.z.copy()
        nonbasic[self.basic] = 0.0
        self.z[self.basic] = self.basis.ftran(-(self.matrix @ nonbasic))

    def _residual(self) -> float:
        if self.m == 0:
            return 0.0
        return float(np.max(np.abs(self.matrix @ self.z)))

    def _refactor(self):
        self.basis.refactor()
        self._recompute_basics()

    def _maybe_refactor(self):
        if self.basis.eta_count >= self.options.refactor_every:
            logger.debug(f"Refactorizing after {self.basis.eta_count} updates")
            self._refactor()
        elif self.iterations % RESIDUAL_CHECK_EVERY == 0:
            scale = 1.0 + float(np.max(np.abs(self.z), initial=0.0))
            residual = self._residual()
            if residual > self.options.residual_tol * scale:
                logger.debug(f"Refactorizing on residual {residual:.3e}")
                self._refactor()

    def duals(self, costs: np.ndarray) -> np.ndarray:
        return self.basis.btran(costs[self.basic])

    def _price(self, costs: np.ndarray, bland: bool) -> Optional[Tuple[int, float]]:
        """
        :return: The entering variable and its direction of movement, or None if the
            current basis is optimal.
        """
        y = self.duals(costs)
        if bland or not self._blocks:
            d = costs - self.matrix_t @ y if self.m else costs.copy()
            return self._choose(d, 0, bland)

        count = len(self._blocks)
        for offset in range(count):
            b = (self._next_block + offset) % count
            start, stop, rows = self._blocks[b]
            d = costs[start:stop] - rows @ y if self.m else costs[start:stop].copy()
            entering = self._choose(d, start, bland)
            if entering is not None:
                self._next_block = (b + 1) % count
                return entering

        return None

    def _choose(self, d: np.ndarray, start: int, bland: bool) -> Optional[Tuple[int, float]]:
        """
        Picks the entering variable among the columns ``start:start + len(d)`` whose
        reduced costs are ``d``.
        """
        stop = start + len(d)
        state = self.state[start:stop]
        tol = self.options.opt_tol
        movable = self.upper[start:stop] > self.lower[start:stop]

        increase = (state == AT_LOWER) & movable & (d < -tol)
        decrease = (state == AT_UPPER) & movable & (d > tol)
        free = (state == FREE) & (np.abs(d) > tol)
        eligible = np.flatnonzero(increase | decrease | free)
        if eligible.size == 0:
            return None

        if bland:
            k = int(eligible[0])
        else:
            k = int(eligible[np.argmax(np.abs(d[eligible]))])

        return start + k, (1.0 if d[k] < 0 else -1.0)

    def _step(self, q: int, direction: float, bland: bool) -> Optional[np.ndarray]:
        """
        Moves variable ``q`` in ``direction`` until a bound blocks it.

        :return: None, or the ray direction (over all variables) if nothing blocks.
        """
        alpha = self.basis.ftran(self._column(q))
        delta = -direction * alpha
        basic = self.basic
        values = self.z[basic]
        lower = self.lower[basic]
        upper = self.upper[basic]

        theta = np.full(self.m, math.inf)
        falling = delta < -PIVOT_TOL
        rising = delta > PIVOT_TOL
        with np.errstate(invalid="ignore"):
            theta[falling] = (values[falling] - lower[falling]) / -delta[falling]
            theta[rising] = (upper[rising] - values[rising]) / delta[rising]
        theta = np.maximum(theta, 0.0)
        theta[np.isnan(theta)] = math.inf

        theta_min = float(theta.min()) if self.m else math.inf
        span = self.upper[q] - self.lower[q] if self.state[q] != FREE else math.inf

        if span <= theta_min:
            # bound flip, no basis change
            if math.isinf(span):
                ray = np.zeros_like(self.z)
                ray[q] = direction
                ray[basic] = delta
                return ray

            self.z[q] = self.upper[q] if direction > 0 else self.lower[q]
            self.z[basic] += delta * span
            self.state[q] = AT_UPPER if direction > 0 else AT_LOWER
            return None

        ties = np.flatnonzero(theta <= theta_min + 1e-12)
        if bland:
            r = int(ties[np.argmin(basic[ties])])
        else:
            r = int(ties[np.argmax(np.abs(alpha[ties]))])

        step = float(theta[r])
        leaving = int(basic[r])
        self.z[q] += direction * step
        self.z[basic] += delta * step
        if delta[r] < 0:
            self.z[leaving] = self.lower[leaving]
            self.state[leaving] = AT_LOWER
        else:
            self.z[leaving] = self.upper[leaving]
            fixed = self.lower[leaving] == self.upper[leaving]
            self.state[leaving] = AT_LOWER if fixed else AT_UPPER

        self.state[q] = BASIC
        self.basis.update(r, alpha, q)
        return None

    def run_phase(self, costs: np.ndarray, phase: int) -> Optional[np.ndarray]:
        """
        Iterates until optimal (returns None) or unbounded (returns the ray).
        """
        bland = False
        best = float(costs @ self.z)
        stalled = 0

        while True:
            if phase == 1 and self.artificial_sum() <= self.options.feas_tol:
                return None

            entering = self._price(costs, bland)
            if entering is None:
                return None

            if self.iterations >= self.max_iters:
                raise IterationLimitExceeded(self.iterations, phase)

            q, direction = entering
            ray = self._step(q, direction, bland)
            self.iterations += 1
            if ray is not None:
                return ray

            self._maybe_refactor()

            objective = float(costs @ self.z)
            if objective < best - 1e-12 * (1.0 + abs(best)):
                best = objective
                stalled = 0
            else:
                stalled += 1
                if not bland and stalled >= self.options.stall_limit:
                    logger.debug(
                        f"No improvement in {stalled} iterations, switching to Bland's rule"
                    )
                    bland = True

    def artificial_sum(self) -> float:
        return float(np.sum(self.z[self.art_start:]))

    def degenerate(self) -> bool:
        basic = self.basic
        values = self.z[basic]
        tol = self.options.feas_tol
        at_lower = np.abs(values - self.lower[basic]) <= tol
        at_upper = np.abs(self.upper[basic] - values) <= tol
        return bool(np.any(at_lower | at_upper))


def _costs(simplex: _Simplex, phase: int) -> np.ndarray:
    costs = np.zeros(len(simplex.z))
    if phase == 1:
        costs[simplex.art_start:] = 1.0
    else:
        costs[:simplex.n] = simplex.lp.cost_vector()

    return costs


def solve(lp: LinearProgram, options: SolverOptions = None) -> LpSolution:
    """
    Solves a linear program.

    :param lp: The :class:`.LinearProgram` to solve.
    :param options: The :class:`.SolverOptions` to use.
    :return: An :class:`.LpSolution`; check its ``status`` before reading values.
    :raises IterationLimitExceeded: If the iteration limit is reached.
    :raises NumericalBreakdown: If the basis cannot be factorized.
    """
    options = options or SolverOptions()
    lp.validate()

    simplex = _Simplex(lp, options)
    n, m = simplex.n, simplex.m
    logger.debug(f"Solving {lp!r} with {len(simplex.art_rows)} artificial(s)")

    diagnostics = {"phase1_objective": 0.0}
    if simplex.art_rows:
        phase1 = _costs(simplex, 1)
        ray = simplex.run_phase(phase1, 1)
        if ray is not None:
            raise NumericalBreakdown("phase 1 reported an unbounded direction")

        infeasibility = simplex.artificial_sum()
        diagnostics["phase1_objective"] = infeasibility
        logger.debug(
            f"Phase 1 finished after {simplex.iterations} iterations, "
            f"infeasibility {infeasibility:.3e}"
        )
        if infeasibility > options.feas_tol:
            art_values = simplex.z[simplex.art_start:]
            names = [
                lp.rows[i].name or f"row{i}"
                for i, value in zip(simplex.art_rows, art_values)
                if value > options.feas_tol
            ]
            diagnostics["infeasible_rows"] = names
            diagnostics["refactorizations"] = simplex.basis.refactorizations
            return LpSolution(
                status=LpStatus.INFEASIBLE,
                x=simplex.z[:n].copy(),
                objective_value=float(lp.cost_vector() @ simplex.z[:n]),
                duals=np.zeros(m),
                reduced_costs=np.zeros(n),
                iteration_count=simplex.iterations,
                diagnostics=diagnostics,
            )

        # artificials are pinned at zero from here on
        simplex.upper[simplex.art_start:] = 0.0
        nonbasic = simplex.state[simplex.art_start:] != BASIC
        simplex.state[simplex.art_start:][nonbasic] = AT_LOWER
        simplex.z[simplex.art_start:][nonbasic] = 0.0

    phase2 = _costs(simplex, 2)
    ray = simplex.run_phase(phase2, 2)
    diagnostics["refactorizations"] = simplex.basis.refactorizations
    x = simplex.z[:n].copy()
    c = lp.cost_vector()

    if ray is not None:
        diagnostics["ray"] = ray[:n].tolist()
        logger.debug(f"Unbounded after {simplex.iterations} iterations")
        return LpSolution(
            status=LpStatus.UNBOUNDED,
            x=x,
            objective_value=-math.inf,
            duals=np.zeros(m),
            reduced_costs=np.zeros(n),
            iteration_count=simplex.iterations,
            diagnostics=diagnostics,
        )

    # final clean-up of accumulated update error
    simplex._refactor()
    x = simplex.z[:n].copy()
    y = simplex.duals(phase2)
    a = lp.matrix()
    reduced = c - a.T @ y if m else c.copy()

    basis = tuple(sorted(int(j) for j in simplex.basic if j < n))
    logger.debug(f"Optimal after {simplex.iterations} iterations")
    return LpSolution(
        status=LpStatus.OPTIMAL,
        x=x,
        objective_value=float(c @ x),
        duals=np.asarray(y, dtype=float),
        reduced_costs=np.asarray(reduced, dtype=float),
        iteration_count=simplex.iterations,
        basis=basis,
        degenerate=simplex.degenerate(),
        diagnostics=diagnostics,
    )
