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
Bookkeeping between dispatch quantities and LP variables and rows.

Intervals are 0-based throughout the Python API. Row and variable names carry the
1-based interval number, e.g. ``balance[b3,t2]`` for bus 3 in the second interval; the
text before the bracket names the constraint family.

.. currentmodule:: gridflex.dispatch.index
"""
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Mapping, Tuple

#: Constraint family of each row-name prefix, for diagnostics.
FAMILIES = {
    "gen_def": "segment sum",
    "ramp_up": "ramp-up limit",
    "ramp_down": "ramp-down limit",
    "flow_def": "DC power flow",
    "balance": "nodal balance",
    "energy": "BE energy requirement",
}


def family_of(row_name: str) -> str:
    """
    :return: The family prefix of a row name, e.g. ``balance`` for ``balance[b3,t2]``.
    """
    return row_name.split("[", 1)[0]


@dataclass
class VariableIndex:
    """
    Maps dispatch quantities to LP variable and row indices.
    """

    #: (generator id, segment position, t) -> segment output variable.
    segment: Dict[Tuple[int, int, int], int] = field(default_factory=dict)

    #: (generator id, t) -> total output variable.
    generation: Dict[Tuple[int, int], int] = field(default_factory=dict)

    #: (line id, t) -> flow variable.
    flow: Dict[Tuple[int, int], int] = field(default_factory=dict)

    #: (bus id, t) -> angle variable.
    angle: Dict[Tuple[int, int], int] = field(default_factory=dict)

    #: (data center id, t) -> BE power variable. Flexible data centers only.
    be: Dict[Tuple[int, int], int] = field(default_factory=dict)

    #: (bus id, t) -> nodal balance row.
    balance: Dict[Tuple[int, int], int] = field(default_factory=dict)

    #: (generator id, t) -> row tying total output to its segments.
    gen_def: Dict[Tuple[int, int], int] = field(default_factory=dict)

    #: (generator id, t) -> ramp rows, for t >= 1.
    ramp_up: Dict[Tuple[int, int], int] = field(default_factory=dict)
    ramp_down: Dict[Tuple[int, int], int] = field(default_factory=dict)

    #: (line id, t) -> row tying flow to angles.
    flow_def: Dict[Tuple[int, int], int] = field(default_factory=dict)

    #: data center id -> BE energy row.
    energy: Dict[int, int] = field(default_factory=dict)

    def variable_maps(self) -> Mapping[str, Mapping]:
        return {
            "segment": self.segment,
            "generation": self.generation,
            "flow": self.flow,
            "angle": self.angle,
            "be": self.be,
        }

    def row_maps(self) -> Mapping[str, Mapping]:
        return {
            "gen_def": self.gen_def,
            "ramp_up": self.ramp_up,
            "ramp_down": self.ramp_down,
            "flow_def": self.flow_def,
            "balance": self.balance,
            "energy": self.energy,
        }

    @staticmethod
    def _covers(maps: Mapping[str, Mapping], count: int) -> bool:
        seen: List[int] = []
        for mapping in maps.values():
            seen.extend(mapping.values())

        return sorted(seen) == list(range(count))

    def is_bijective(self, num_vars: int, num_rows: int) -> bool:
        """
        :return: True if every variable and every row is owned by exactly one entry.
        """
        return self._covers(self.variable_maps(), num_vars) and self._covers(
            self.row_maps(), num_rows
        )

    def rows_of(self, family: str) -> Iterator[int]:
        return iter(self.row_maps()[family].values())
