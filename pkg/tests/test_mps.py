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
import math

import pytest

from gridflex.core.fixtures import builtin_fixture
from gridflex.dispatch import build_lp
from gridflex.lp import INF, LinearProgram, solve, to_mps, write_mps
from gridflex.lp.mps import _number
from helpers import fixed


def read_mps(text):
    """
    Reads back the fixed-format subset written by ``to_mps``.
    """
    section = None
    kinds, order, costs, entries, rhs, ranges, bounds = {}, [], {}, {}, {}, {}, {}
    offset = 0.0
    for line in text.splitlines():
        if line.startswith("*"):
            continue
        if not line.startswith(" "):
            section = line.split()[0]
            continue

        kind, name = line[1:3].strip(), line[4:12].strip()
        first, value = line[14:22].strip(), line[24:36].strip()
        if section == "ROWS":
            if kind != "N" or name != "COST":
                kinds[name] = kind
                order.append(name)
        elif section == "COLUMNS":
            if first == "COST":
                costs[name] = float(value)
            else:
                entries.setdefault(first, []).append((name, float(value)))
        elif section == "RHS":
            if first == "COST":
                offset = -float(value)
            else:
                rhs[first] = float(value)
        elif section == "RANGES":
            ranges[first] = float(value)
        elif section == "BOUNDS":
            bounds.setdefault(first, []).append((kind, float(value) if value else None))

    return kinds, order, costs, entries, rhs, ranges, bounds, offset


def rebuild(original, text):
    kinds, order, costs, entries, rhs, ranges, bounds, offset = read_mps(text)
    lp = LinearProgram("rebuilt")
    columns = [f"C{j + 1:07d}" for j in range(original.num_vars)]
    for name in columns:
        lower, upper = 0.0, INF
        for kind, value in bounds.get(name, []):
            if kind == "FX":
                lower = upper = value
            elif kind == "FR":
                lower, upper = -INF, INF
            elif kind == "MI":
                lower = -INF
            elif kind == "LO":
                lower = value
            elif kind == "UP":
                upper = value
        lp.add_variable(name, lower=lower, upper=upper, cost=costs.get(name, 0.0))

    position = {name: j for j, name in enumerate(columns)}
    for row in order:
        value = rhs.get(row, 0.0)
        kind = kinds[row]
        if kind == "E":
            lower = upper = value
        elif kind == "G":
            lower, upper = value, value + ranges.get(row, INF)
        elif kind == "L":
            lower, upper = value - ranges.get(row, INF), value
        else:
            lower, upper = -INF, INF
        coeffs = [(position[c], v) for c, v in entries.get(row, [])]
        lp.add_row(row, coeffs, lower=lower, upper=upper)

    lp.objective_offset = offset
    return lp


def test_number_field_width():
    assert _number(1.5) == "1.5"
    assert _number(-0.0001234567891234) == "-0.000123457"
    assert len(_number(math.pi * 1e6)) <= 12
    assert float(_number(123456789.25)) == pytest.approx(123456789.25, rel=1e-9)


def test_small_program_layout():
    lp = LinearProgram("tiny")
    x = lp.add_variable("x", lower=-INF, upper=INF, cost=2.0)
    y = lp.add_variable("y", lower=1.0, upper=4.0, cost=-1.0)
    z = lp.add_variable("z", lower=3.0, upper=3.0)
    lp.add_row("eq", [(x, 1.0), (y, 1.0)], lower=5.0, upper=5.0)
    lp.add_row("range", [(y, 2.0), (z, -1.0)], lower=-1.0, upper=6.0)
    lp.add_row("cap", [(x, 1.0)], upper=8.0)
    lp.objective_offset = 10.0

    text = to_mps(lp)
    lines = text.splitlines()
    sections = [line for line in lines if line and not line.startswith((" ", "*"))]
    assert sections == [
        "NAME          TINY", "ROWS", "COLUMNS", "RHS", "RANGES", "BOUNDS", "ENDATA",
    ]
    assert "* R0000001 eq" in lines
    assert "* C0000002 y" in lines
    assert " E  R0000001" in lines
    assert " G  R0000002" in lines
    assert " L  R0000003" in lines
    assert " FR BND       C0000001" in lines
    assert " FX BND       C0000003           3.0" in lines
    assert "    RHS       COST             -10.0" in lines
    assert "    RNG       R0000002           7.0" in lines


def test_dispatch_program_reads_back(tmp_path):
    case = builtin_fixture("three_bus")
    lp, _ = build_lp(case, fixed(case))
    path = write_mps(lp, tmp_path / "three_bus.mps")
    text = path.read_text(encoding="utf-8")

    rebuilt = rebuild(lp, text)
    assert rebuilt.num_vars == lp.num_vars
    assert rebuilt.num_rows == lp.num_rows
    assert rebuilt.objective_offset == pytest.approx(lp.objective_offset)
    assert solve(rebuilt).objective_value == pytest.approx(solve(lp).objective_value, rel=1e-9)
