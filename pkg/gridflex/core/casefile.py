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
Reading and writing case files.

A case file is a UTF-8 JSON object:

.. code-block:: json

    {
      "version": "gridflex_case_v1",
      "name": "three_bus", "s_base_mva": 100.0, "dt_hours": 1.0, "horizon": 4,
      "buses": [{"id": 1, "angle_min": 0.0, "angle_max": 0.0, "is_slack": true,
                 "base_load": [0.0, 0.0, 0.0, 0.0]}],
      "generators": [{"id": 1, "bus": 1, "no_load_cost": 50.0,
                      "segments": [{"cap_mw": 50.0, "cost_per_mwh": 10.0}],
                      "ramp_up": 100.0, "ramp_down": 100.0, "dispatchable": true}],
      "lines": [],
      "data_centers": []
    }

Generators may also carry ``fixed_output``, ``ghg_rate``, ``tox_rate``,
``pollutant_rates``, ``fuel`` and ``name``. Any other key is a schema error.

Bus ids may be sparse in the file; they are renumbered ``1..|B|`` in ascending order and
every reference is remapped.

.. currentmodule:: gridflex.core.casefile
"""
import hashlib
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Mapping, Sequence, Tuple

from gridflex.core.validation import validate_case
from gridflex.dataclasses.bus import Bus
from gridflex.dataclasses.case import DispatchCase
from gridflex.dataclasses.datacenter import DataCenter
from gridflex.dataclasses.generator import CostSegment, Generator
from gridflex.dataclasses.line import Line
from gridflex.exc import CaseParseError, CaseSchemaError, CaseValidationError
from gridflex.util import PathLike, dump_json, pack_json, write_text

logger = logging.getLogger(__name__)

CASE_VERSION = "gridflex_case_v1"

_TOP_KEYS = {
    "version", "name", "s_base_mva", "dt_hours", "horizon",
    "buses", "generators", "lines", "data_centers",
}
_BUS_KEYS = {"id", "angle_min", "angle_max", "is_slack", "base_load"}
_GEN_REQUIRED = {"id", "bus", "no_load_cost", "segments", "ramp_up", "ramp_down", "dispatchable"}
_GEN_OPTIONAL = {"fixed_output", "ghg_rate", "tox_rate", "pollutant_rates", "fuel", "name"}
_SEGMENT_KEYS = {"cap_mw", "cost_per_mwh"}
_LINE_KEYS = {"id", "from_bus", "to_bus", "susceptance", "flow_min", "flow_max"}
_DC_KEYS = {"id", "bus", "peak_mw", "lc_profile", "aux_profile", "be_energy_mwh"}


# reading
class _Reader(object):
    """
    Type-checks a decoded document, tracking the path for error messages.
    """

    def __init__(self, doc: Any, pointer: str = "$"):
        self.doc = doc
        self.pointer = pointer

    def _fail(self, message: str, key: str = None):
        where = self.pointer if key is None else f"{self.pointer}.{key}"
        raise CaseSchemaError(where, message)

    def require_object(self, required: set, optional: set = frozenset()) -> "_Reader":
        if not isinstance(self.doc, dict):
            self._fail(f"expected an object, got {type(self.doc).__name__}")

        missing = sorted(required - self.doc.keys())
        if missing:
            self._fail(f"missing field(s): {', '.join(missing)}")

        extra = sorted(self.doc.keys() - required - optional)
        if extra:
            self._fail(f"unknown field(s): {', '.join(extra)}")

        return self

    def child(self, key) -> "_Reader":
        if isinstance(key, int):
            return _Reader(self.doc[key], f"{self.pointer}[{key}]")

        return _Reader(self.doc[key], f"{self.pointer}.{key}")

    def has(self, key: str) -> bool:
        return key in self.doc

    def number(self, key: str, default: float = None) -> float:
        if key not in self.doc and default is not None:
            return default

        value = self.doc[key]
        # bool is an int subclass
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            self._fail(f"expected a number, got {type(value).__name__}", key)

        return float(value)

    def integer(self, key: str) -> int:
        value = self.doc[key]
        if isinstance(value, bool) or not isinstance(value, int):
            self._fail(f"expected an integer, got {type(value).__name__}", key)

        return value

    def boolean(self, key: str) -> bool:
        value = self.doc[key]
        if not isinstance(value, bool):
            self._fail(f"expected a boolean, got {type(value).__name__}", key)

        return value

    def string(self, key: str, optional: bool = False):
        if optional and self.doc.get(key) is None:
            return None

        value = self.doc[key]
        if not isinstance(value, str):
            self._fail(f"expected a string, got {type(value).__name__}", key)

        return value

    def items(self, key: str) -> List["_Reader"]:
        if key not in self.doc:
            self._fail("missing field", key)

        value = self.doc[key]
        if not isinstance(value, list):
            self._fail(f"expected an array, got {type(value).__name__}", key)

        reader = self.child(key)
        return [reader.child(n) for n in range(len(value))]

    def series(self, key: str, length: int = None) -> Tuple[float, ...]:
        if key not in self.doc and length is None:
            return ()

        items = self.items(key)
        out = []
        for item in items:
            value = item.doc
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                item._fail(f"expected a number, got {type(value).__name__}")

            out.append(float(value))

        if length is not None and len(out) != length:
            self._fail(f"expected {length} interval values, got {len(out)}", key)

        return tuple(out)


def _renumber(buses: Sequence[_Reader]) -> Dict[int, int]:
    """
    Maps file bus ids onto ``1..|B|``, preserving ascending id order.
    """
    seen = {}
    for reader in buses:
        bus_id = reader.integer("id")
        if bus_id in seen:
            raise CaseSchemaError(f"{reader.pointer}.id", f"duplicate bus id {bus_id}")

        seen[bus_id] = reader

    return {old: new for new, old in enumerate(sorted(seen), start=1)}


def _remap(reader: _Reader, key: str, mapping: Mapping[int, int]) -> int:
    bus_id = reader.integer(key)
    try:
        return mapping[bus_id]
    except KeyError:
        raise CaseSchemaError(f"{reader.pointer}.{key}", f"unknown bus id {bus_id}") from None


def _check_unique(readers: Sequence[_Reader], kind: str):
    seen = set()
    for reader in readers:
        item_id = reader.integer("id")
        if item_id in seen:
            raise CaseSchemaError(f"{reader.pointer}.id", f"duplicate {kind} id {item_id}")

        seen.add(item_id)


def case_from_dict(doc: Any) -> DispatchCase:
    """
    Builds a :class:`.DispatchCase` from a decoded case document.

    :raises CaseSchemaError: If the document does not follow the case schema.
    """
    top = _Reader(doc).require_object(_TOP_KEYS)
    if top.doc["version"] != CASE_VERSION:
        top._fail(f"unsupported version {top.doc['version']!r}, expected {CASE_VERSION!r}",
                  "version")

    horizon = top.integer("horizon")
    bus_readers = top.items("buses")
    for reader in bus_readers:
        reader.require_object(_BUS_KEYS)

    mapping = _renumber(bus_readers)
    buses = sorted(
        (
            Bus(
                id=mapping[reader.integer("id")],
                angle_min=reader.number("angle_min"),
                angle_max=reader.number("angle_max"),
                is_slack=reader.boolean("is_slack"),
                base_load=reader.series("base_load", horizon),
            )
            for reader in bus_readers
        ),
        key=lambda b: b.id,
    )
    if buses and not any(bus.is_slack for bus in buses):
        logger.info("No slack bus flagged, using bus 1")
        first = buses[0]
        buses[0] = Bus(first.id, 0.0, 0.0, True, first.base_load)

    gen_readers = top.items("generators")
    for reader in gen_readers:
        reader.require_object(_GEN_REQUIRED, _GEN_OPTIONAL)
    _check_unique(gen_readers, "generator")

    generators = []
    for reader in gen_readers:
        segments = []
        for seg in reader.items("segments"):
            seg.require_object(_SEGMENT_KEYS)
            segments.append(CostSegment(seg.number("cap_mw"), seg.number("cost_per_mwh")))

        dispatchable = reader.boolean("dispatchable")
        rates = ()
        if reader.has("pollutant_rates"):
            rates_reader = reader.child("pollutant_rates")
            if not isinstance(rates_reader.doc, dict):
                rates_reader._fail("expected an object")

            rates = tuple(
                (name, rates_reader.number(name)) for name in sorted(rates_reader.doc)
            )

        generators.append(
            Generator(
                id=reader.integer("id"),
                bus=_remap(reader, "bus", mapping),
                no_load_cost=reader.number("no_load_cost"),
                segments=tuple(segments),
                ramp_up=reader.number("ramp_up"),
                ramp_down=reader.number("ramp_down"),
                dispatchable=dispatchable,
                fixed_output=reader.series(
                    "fixed_output", None if dispatchable else horizon
                ),
                ghg_rate=reader.number("ghg_rate", 0.0),
                tox_rate=reader.number("tox_rate", 0.0),
                pollutant_rates=rates,
                fuel=reader.string("fuel", optional=True),
                name=reader.string("name", optional=True),
            )
        )

    line_readers = top.items("lines")
    for reader in line_readers:
        reader.require_object(_LINE_KEYS)
    _check_unique(line_readers, "line")
    lines = [
        Line(
            id=reader.integer("id"),
            from_bus=_remap(reader, "from_bus", mapping),
            to_bus=_remap(reader, "to_bus", mapping),
            susceptance=reader.number("susceptance"),
            flow_min=reader.number("flow_min"),
            flow_max=reader.number("flow_max"),
        )
        for reader in line_readers
    ]

    dc_readers = top.items("data_centers")
    for reader in dc_readers:
        reader.require_object(_DC_KEYS)
    _check_unique(dc_readers, "data_center")
    data_centers = [
        DataCenter(
            id=reader.integer("id"),
            bus=_remap(reader, "bus", mapping),
            peak_mw=reader.number("peak_mw"),
            lc_profile=reader.series("lc_profile", horizon),
            aux_profile=reader.series("aux_profile", horizon),
            be_energy_mwh=reader.number("be_energy_mwh"),
        )
        for reader in dc_readers
    ]

    return DispatchCase(
        name=top.string("name"),
        s_base=top.number("s_base_mva"),
        dt_hours=top.number("dt_hours"),
        horizon=horizon,
        buses=tuple(buses),
        generators=tuple(generators),
        lines=tuple(lines),
        data_centers=tuple(data_centers),
    )


def load_case(path: PathLike, *, validate: bool = True) -> DispatchCase:
    """
    Loads a case file.

    :param path: The path of the case JSON file.
    :param validate: If the loaded case should be checked with :func:`.validate_case`.
    :raises CaseParseError: If the file is not valid JSON.
    :raises CaseSchemaError: If the document does not follow the case schema.
    :raises CaseValidationError: If the case breaks a type invariant.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise CaseParseError(str(path), e.strerror or str(e)) from e
    except UnicodeDecodeError as e:
        raise CaseParseError(str(path), f"not valid UTF-8 at byte {e.start}") from e

    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise CaseParseError(str(path), e.msg, line=e.lineno, column=e.colno) from e

    case = case_from_dict(doc)
    if validate:
        violations = validate_case(case)
        if violations:
            raise CaseValidationError(violations)

    logger.info(
        f"Loaded case {case.name!r}: {len(case.buses)} buses, {len(case.generators)} generators, "
        f"{len(case.lines)} lines, {len(case.data_centers)} data centers, horizon {case.horizon}"
    )
    return case


# writing
def case_to_dict(case: DispatchCase) -> Dict[str, Any]:
    """
    :return: The case schema document for ``case``.
    """

    def gen_doc(gen: Generator) -> Dict[str, Any]:
        doc = {
            "id": gen.id,
            "bus": gen.bus,
            "no_load_cost": gen.no_load_cost,
            "segments": [
                {"cap_mw": seg.cap_mw, "cost_per_mwh": seg.cost_per_mwh} for seg in gen.segments
            ],
            "ramp_up": gen.ramp_up,
            "ramp_down": gen.ramp_down,
            "dispatchable": gen.dispatchable,
            "fixed_output": list(gen.fixed_output),
            "ghg_rate": gen.ghg_rate,
            "tox_rate": gen.tox_rate,
        }
        if gen.pollutant_rates:
            doc["pollutant_rates"] = dict(gen.pollutant_rates)
        if gen.fuel is not None:
            doc["fuel"] = gen.fuel
        if gen.name is not None:
            doc["name"] = gen.name

        return doc

    return {
        "version": CASE_VERSION,
        "name": case.name,
        "s_base_mva": case.s_base,
        "dt_hours": case.dt_hours,
        "horizon": case.horizon,
        "buses": [
            {
                "id": bus.id,
                "angle_min": bus.angle_min,
                "angle_max": bus.angle_max,
                "is_slack": bus.is_slack,
                "base_load": list(bus.base_load),
            }
            for bus in case.buses
        ],
        "generators": [gen_doc(gen) for gen in case.generators],
        "lines": [
            {
                "id": line.id,
                "from_bus": line.from_bus,
                "to_bus": line.to_bus,
                "susceptance": line.susceptance,
                "flow_min": line.flow_min,
                "flow_max": line.flow_max,
            }
            for line in case.lines
        ],
        "data_centers": [
            {
                "id": dc.id,
                "bus": dc.bus,
                "peak_mw": dc.peak_mw,
                "lc_profile": list(dc.lc_profile),
                "aux_profile": list(dc.aux_profile),
                "be_energy_mwh": dc.be_energy_mwh,
            }
            for dc in case.data_centers
        ],
    }


def save_case(case: DispatchCase, path: PathLike) -> Path:
    """
    Writes ``case`` to ``path`` in the case schema. Floats are written with shortest
    round-trip precision, so :func:`.load_case` reproduces the case exactly.
    """
    path = write_text(path, dump_json(case_to_dict(case)))
    logger.debug(f"Saved case {case.name!r} to {path}")
    return path


def case_signature(case: DispatchCase) -> str:
    """
    :return: A digest identifying the content of ``case``, used to pair solutions.
    """
    return hashlib.sha256(pack_json(case_to_dict(case)).encode("utf-8")).hexdigest()[:16]
