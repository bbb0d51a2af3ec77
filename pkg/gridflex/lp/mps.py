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
Export of linear programs in fixed-format MPS, for cross-checking against external
solvers.

Rows and columns are written as ``R0000001`` / ``C0000001``; a comment block at the top of
the file maps these back to the program's names.

.. currentmodule:: gridflex.lp.mps
"""
import logging
import math
from typing import List

from gridflex.lp.program import LinearProgram
from gridflex.util import PathLike, write_text

logger = logging.getLogger(__name__)

OBJECTIVE_ROW = "COST"


def _number(value: float) -> str:
    """
    Formats a number into the 12-character MPS field, keeping as many digits as fit.
    """
    text = repr(float(value))
    if len(text) <= 12:
        return text

    for digits in range(12, 0, -1):
        text = f"{value:.{digits}g}"
        if len(text) <= 12:
            return text

    raise ValueError(f"cannot format {value} in 12 characters")


def _line(kind: str, name: str, first: str = "", value: float = None) -> str:
    """
    Lays out one fixed-format record: type in columns 2-3, names in 5-12 and 15-22, and
    the number in 25-36.
    """
    text = f" {kind:<2} {name:<8}"
    if first:
        text += f"  {first:<8}"
    if value is not None:
        text += f"  {_number(value):>12}"
    return text.rstrip()


def _row_name(i: int) -> str:
    return f"R{i + 1:07d}"


def _col_name(j: int) -> str:
    return f"C{j + 1:07d}"


def to_mps(lp: LinearProgram) -> str:
    """
    :return: The fixed-format MPS text for ``lp``.
    """
    lines: List[str] = [f"* gridflex export of {lp.name}"]
    for i, row in enumerate(lp.rows):
        lines.append(f"* {_row_name(i)} {row.name}")
    for j, name in enumerate(lp.var_names):
        lines.append(f"* {_col_name(j)} {name}")

    lines.append(f"NAME          {lp.name[:8].upper()}")

    lines.append("ROWS")
    lines.append(_line("N", OBJECTIVE_ROW))
    for i, row in enumerate(lp.rows):
        if row.lower == row.upper:
            kind = "E"
        elif math.isfinite(row.lower):
            kind = "G"
        elif math.isfinite(row.upper):
            kind = "L"
        else:
            kind = "N"
        lines.append(_line(kind, _row_name(i)))

    # column-major view of the rows
    columns: List[List[tuple]] = [[] for _ in range(lp.num_vars)]
    for i, row in enumerate(lp.rows):
        for j, value in row.coefficients:
            if value != 0.0:
                columns[j].append((_row_name(i), value))

    lines.append("COLUMNS")
    for j in range(lp.num_vars):
        name = _col_name(j)
        if lp.objective[j] != 0.0:
            lines.append(_line("", name, OBJECTIVE_ROW, lp.objective[j]))
        for row_name, value in columns[j]:
            lines.append(_line("", name, row_name, value))

    lines.append("RHS")
    if lp.objective_offset:
        lines.append(_line("", "RHS", OBJECTIVE_ROW, -lp.objective_offset))
    for i, row in enumerate(lp.rows):
        if math.isfinite(row.lower):
            rhs = row.lower
        elif math.isfinite(row.upper):
            rhs = row.upper
        else:
            continue
        if rhs != 0.0:
            lines.append(_line("", "RHS", _row_name(i), rhs))

    ranged = [
        (i, row.upper - row.lower)
        for i, row in enumerate(lp.rows)
        if math.isfinite(row.lower) and math.isfinite(row.upper) and row.lower < row.upper
    ]
    if ranged:
        lines.append("RANGES")
        for i, width in ranged:
            lines.append(_line("", "RNG", _row_name(i), width))

    bounds: List[str] = []
    for j, (lower, upper) in enumerate(lp.var_bounds):
        name = _col_name(j)
        if lower == upper:
            bounds.append(_line("FX", "BND", name, lower))
        elif math.isinf(lower) and math.isinf(upper):
            bounds.append(_line("FR", "BND", name))
        else:
            if math.isinf(lower):
                bounds.append(_line("MI", "BND", name))
            elif lower != 0.0:
                bounds.append(_line("LO", "BND", name, lower))
            if math.isfinite(upper):
                bounds.append(_line("UP", "BND", name, upper))

    if bounds:
        lines.append("BOUNDS")
        lines.extend(bounds)

    lines.append("ENDATA")
    return "\n".join(lines) + "\n"


def write_mps(lp: LinearProgram, path: PathLike):
    """
    Writes ``lp`` to ``path`` in fixed-format MPS.
    """
    path = write_text(path, to_mps(lp))
    logger.info(f"Wrote {lp!r} to {path}")
    return path
