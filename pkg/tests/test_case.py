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
import json
from dataclasses import replace

import pytest

from gridflex.core.casefile import case_signature, case_to_dict, load_case, save_case
from gridflex.core.fixtures import FIXTURES, builtin_fixture, random_case
from gridflex.core.validation import ViolationCode, validate_case
from gridflex.dataclasses.line import Line
from gridflex.exc import (
    CaseParseError,
    CaseSchemaError,
    CaseValidationError,
    ErrorCode,
    UnknownFixtureError,
)


def codes(case):
    return {v.code for v in validate_case(case)}


def test_fixtures_are_valid(fixture_case):
    assert validate_case(fixture_case) == []


@pytest.mark.parametrize("seed", range(10))
def test_random_cases_are_valid(seed):
    case = random_case(seed, num_buses=5, horizon=4, num_data_centers=3, extra_lines=2)
    assert validate_case(case) == []
    assert case == random_case(seed, num_buses=5, horizon=4, num_data_centers=3, extra_lines=2)


def test_bus_incidence_and_fixed_injection():
    case = builtin_fixture("five_bus_congested")
    lines_at = case.lines_at()
    assert [(line.id, sign) for line, sign in lines_at[2]] == [(1, 1.0), (3, -1.0), (4, -1.0)]
    assert sum(len(touching) for touching in lines_at.values()) == 2 * len(case.lines)

    injected = case.fixed_injection()
    assert set(injected) == set(case.bus_ids)
    assert injected[4] == [10.0, 5.0, 15.0]
    assert injected[1] == [0.0, 0.0, 0.0]


def test_unknown_fixture():
    with pytest.raises(UnknownFixtureError) as info:
        builtin_fixture("ten_bus")

    assert info.value.error_code == ErrorCode.UNKNOWN_FIXTURE
    assert "three_bus" in str(info.value)


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_save_and_load_is_exact(tmp_path, name):
    case = builtin_fixture(name)
    path = save_case(case, tmp_path / f"{name}.json")

    loaded = load_case(path)
    assert loaded == case
    assert case_signature(loaded) == case_signature(case)


def test_signature_tracks_content():
    case = builtin_fixture("one_bus")
    changed = replace(case, dt_hours=0.5)
    assert case_signature(case) != case_signature(changed)


def test_bus_ids_are_renumbered(tmp_path):
    doc = case_to_dict(builtin_fixture("two_area_priced"))
    mapping = {1: 10, 2: 20, 3: 30, 4: 40}
    for bus in doc["buses"]:
        bus["id"] = mapping[bus["id"]]
    for gen in doc["generators"]:
        gen["bus"] = mapping[gen["bus"]]
    for line in doc["lines"]:
        line["from_bus"] = mapping[line["from_bus"]]
        line["to_bus"] = mapping[line["to_bus"]]
    for dc in doc["data_centers"]:
        dc["bus"] = mapping[dc["bus"]]

    path = tmp_path / "renumbered.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    assert load_case(path) == builtin_fixture("two_area_priced")


def test_malformed_json_names_the_location(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"version": "gridflex_case_v1",\n  "name": }', encoding="utf-8")

    with pytest.raises(CaseParseError) as info:
        load_case(path)

    assert info.value.path == str(path)
    assert info.value.line == 2
    assert str(path) in str(info.value)


def test_undecodable_bytes_are_a_parse_error(tmp_path):
    path = tmp_path / "latin.json"
    path.write_bytes(b'{"name": "\xff\xfe"}')

    with pytest.raises(CaseParseError) as info:
        load_case(path)

    assert info.value.path == str(path)
    assert info.value.error_code == ErrorCode.CASE_PARSE
    assert "UTF-8" in str(info.value)


def test_missing_file(tmp_path):
    with pytest.raises(CaseParseError) as info:
        load_case(tmp_path / "nowhere.json")

    assert "nowhere.json" in info.value.path


@pytest.mark.parametrize("edit, pointer", [
    (lambda d: d["buses"][1].__setitem__("base_load", [1.0]), "$.buses[1].base_load"),
    (lambda d: d["buses"][0].__setitem__("is_slack", "yes"), "$.buses[0].is_slack"),
    (lambda d: d["generators"][0].__setitem__("colour", "red"), "$.generators[0]"),
    (lambda d: d["lines"][0].__setitem__("to_bus", 9), "$.lines[0].to_bus"),
    (lambda d: d["buses"][2].__setitem__("id", 1), "$.buses[2].id"),
    (lambda d: d.__setitem__("version", "v0"), "$.version"),
    (lambda d: d.pop("data_centers"), "$.data_centers"),
])
def test_schema_errors_carry_a_pointer(tmp_path, edit, pointer):
    doc = case_to_dict(builtin_fixture("three_bus"))
    edit(doc)
    path = tmp_path / "case.json"
    path.write_text(json.dumps(doc), encoding="utf-8")

    with pytest.raises(CaseSchemaError) as info:
        load_case(path)

    assert info.value.pointer.startswith(pointer) or pointer.startswith(info.value.pointer)
    assert info.value.to_dict()["code"] == int(ErrorCode.CASE_SCHEMA)


def test_invalid_case_lists_violations(tmp_path):
    doc = case_to_dict(builtin_fixture("three_bus"))
    doc["lines"][0]["flow_min"] = 5.0
    doc["data_centers"][0]["be_energy_mwh"] = 1e6
    path = tmp_path / "case.json"
    path.write_text(json.dumps(doc), encoding="utf-8")

    with pytest.raises(CaseValidationError) as info:
        load_case(path)

    found = {v.code for v in info.value.violations}
    assert found == {ViolationCode.LINE_FLOW_RANGE, ViolationCode.DC_ENERGY_EXCEEDS_HEADROOM}

    # still loadable for inspection
    assert load_case(path, validate=False).lines[0].flow_min == 5.0


def test_missing_slack_defaults_to_first_bus(tmp_path):
    doc = case_to_dict(builtin_fixture("three_bus"))
    for bus in doc["buses"]:
        bus["is_slack"] = False
    path = tmp_path / "case.json"
    path.write_text(json.dumps(doc), encoding="utf-8")

    case = load_case(path)
    assert case.slack_bus.id == 1
    assert (case.slack_bus.angle_min, case.slack_bus.angle_max) == (0.0, 0.0)


def test_validation_codes():
    case = builtin_fixture("five_bus_congested")
    gen = case.generators[0]
    bad_gen = replace(gen, segments=tuple(reversed(gen.segments)), ramp_up=-1.0)
    assert codes(replace(case, generators=(bad_gen,) + case.generators[1:])) == {
        ViolationCode.SEGMENT_COST_ORDER, ViolationCode.GEN_RAMP_NEGATIVE,
    }

    kept = tuple(ln for ln in case.lines if 5 not in (ln.from_bus, ln.to_bus))
    islanded = replace(case, lines=kept)
    assert codes(islanded) == {ViolationCode.NETWORK_DISCONNECTED}

    loop = Line(id=99, from_bus=2, to_bus=2, susceptance=-10.0, flow_min=-1.0, flow_max=1.0)
    assert codes(replace(case, lines=case.lines + (loop,))) == {ViolationCode.LINE_SELF_LOOP}

    dc = case.data_centers[0]
    shared = replace(case.data_centers[1], bus=dc.bus)
    assert ViolationCode.DC_SHARED_BUS in codes(
        replace(case, data_centers=(dc, shared, case.data_centers[2]))
    )

    crowded = replace(dc, lc_profile=(dc.peak_mw, 0.0, 0.0))
    assert codes(case.with_data_centers((crowded,) + case.data_centers[1:])) == {
        ViolationCode.DC_PEAK_EXCEEDED,
    }

    two_slacks = replace(case, buses=(case.buses[0], replace(case.buses[1], angle_min=0.0,
                                                              angle_max=0.0, is_slack=True))
                         + case.buses[2:])
    assert codes(two_slacks) == {ViolationCode.SLACK_COUNT}

    wind = case.fixed_generators[0]
    short = replace(wind, fixed_output=(1.0,))
    others = tuple(g for g in case.generators if g.id != wind.id)
    assert codes(replace(case, generators=others + (short,))) == {
        ViolationCode.GEN_FIXED_OUTPUT_LENGTH,
    }


def test_peak_violation_names_one_based_intervals():
    case = builtin_fixture("five_bus_congested")
    dc = case.data_centers[0]
    crowded = replace(dc, lc_profile=(dc.lc_profile[0], dc.lc_profile[1], dc.peak_mw))
    violations = validate_case(case.with_data_centers((crowded,) + case.data_centers[1:]))

    assert len(violations) == 1
    assert violations[0].code == ViolationCode.DC_PEAK_EXCEEDED
    assert violations[0].detail == "intervals 3"
    assert str(violations[0]).endswith("(intervals 3)")


def test_nan_is_reported_once():
    case = builtin_fixture("one_bus")
    bus = replace(case.buses[0], base_load=(float("nan"), 1.0, 1.0))
    violations = validate_case(replace(case, buses=(bus,)))
    assert [v.code for v in violations] == [ViolationCode.NON_FINITE]
    assert "bus 1" in str(violations[0])
