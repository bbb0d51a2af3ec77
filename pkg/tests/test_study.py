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
import logging
from dataclasses import replace

import pandas as pd
import pytest

from gridflex.core.casefile import load_case, save_case
from gridflex.core.fixtures import builtin_fixture
from gridflex.exc import DispatchInfeasible, ErrorCode, MetricsError, StudyError
from gridflex.groundwork.runner import main
from gridflex.groundwork.study import (
    config_from_dict,
    explain_lmp,
    format_explanation,
    load_config,
    prepare,
    run_study,
    with_overrides,
)

FIGURES = ["lmp_compare", "dc_load_compare", "system_profile", "costs", "stressed", "ghg", "tox"]
TABLES = ["generation", "segment_generation", "flows", "angles", "be_schedule", "lmp"]


def study(tmp_path, case="builtin:five_bus_congested", **sections):
    doc = {"study": {"case": case, "output_dir": str(tmp_path / "out")}}
    doc.update(sections)
    return config_from_dict(doc, tmp_path)


def test_five_bus_study(tmp_path):
    config = study(tmp_path, load_split={"utilization": 0.8})
    result = run_study(config)
    out = result.output_dir

    names = [m.name for m in result.report.scenarios]
    assert names == [
        "without_fs", "fs_whole_system", "fs_cluster_1", "fs_cluster_2", "fs_cluster_3",
    ]
    for name in ["report.json", "report.csv", "case.json", "clusters.csv"]:
        assert (out / name).exists()
    for name in FIGURES:
        assert (out / f"{name}.csv").exists()
    for scenario in names:
        for table in TABLES:
            assert (out / "scenarios" / scenario / f"{table}.csv").exists()
        assert (out / "scenarios" / scenario / "summary.json").exists()

    costs = {m.name: m.objective_cost for m in result.report.scenarios}
    for name in names[2:]:
        assert costs["fs_whole_system"] <= costs[name] + 1e-6
        assert costs[name] <= costs["without_fs"] + 1e-6

    clusters = pd.read_csv(out / "clusters.csv")
    assert list(clusters["cluster"]) == [1, 2, 3]
    assert len(result.report.clusters) == 3

    lmp = pd.read_csv(out / "scenarios" / "without_fs" / "lmp.csv")
    assert list(lmp.columns) == ["bus", "t", "usd_per_mwh"]
    assert sorted(lmp["t"].unique()) == [1, 2, 3]

    # the solved case is the split one, and reloads
    solved = load_case(out / "case.json")
    assert solved == result.case
    assert solved.data_centers != builtin_fixture("five_bus_congested").data_centers


def test_study_is_deterministic(tmp_path):
    first = run_study(study(tmp_path / "a", load_split={"rng_seed": 3, "utilization": 0.8}))
    second = run_study(study(tmp_path / "b", load_split={"rng_seed": 3, "utilization": 0.8}))
    names = ["report.json", "report.csv", "lmp_compare.csv", "scenarios/fs_cluster_2/flows.csv"]
    for name in names:
        assert (first.output_dir / name).read_bytes() == (second.output_dir / name).read_bytes()


def test_parallel_matches_serial(tmp_path):
    serial = run_study(study(tmp_path / "serial", load_split={"utilization": 0.8}))
    config = study(tmp_path / "parallel", load_split={"utilization": 0.8})
    parallel = run_study(with_overrides(config, parallel_scenarios=True))

    assert (serial.output_dir / "report.json").read_bytes() == (
        parallel.output_dir / "report.json"
    ).read_bytes()
    assert [s.scenario_name for s in parallel.solutions] == [
        s.scenario_name for s in serial.solutions
    ]


def test_cluster_count_is_clamped(tmp_path, caplog):
    with caplog.at_level(logging.WARNING):
        case, clusters, scenarios = prepare(study(tmp_path, case="builtin:three_bus"))

    assert len(clusters) == 1
    assert [s.name for s in scenarios] == ["without_fs", "fs_whole_system", "fs_cluster_1"]
    assert "Requested 3 clusters" in caplog.text


def test_explicit_scenarios_and_lp_export(tmp_path):
    config = study(
        tmp_path,
        case="builtin:two_period",
        scenarios=[
            {"name": "rigid", "flexible": "none"},
            {"name": "shifted", "flexible": [1]},
        ],
    )
    config = with_overrides(config, baseline="rigid", export_lp=True)
    result = run_study(config)

    assert [m.name for m in result.report.scenarios] == ["rigid", "shifted"]
    assert result.report.deltas["shifted"]["objective_cost"] == pytest.approx(-150.0)
    assert (result.output_dir / "lp" / "rigid.mps").read_text().startswith("* gridflex export")
    assert (result.output_dir / "lp" / "shifted.mps").exists()


def test_pollutant_rates_use_the_htp_table(tmp_path):
    case = builtin_fixture("five_bus_congested")
    gens = list(case.generators)
    gens[0] = replace(gens[0], pollutant_rates=(("NOx", 3.0), ("SO2", 4.5)))
    save_case(replace(case, generators=tuple(gens)), tmp_path / "case.json")
    (tmp_path / "htp.toml").write_text("NOx = 2.0\nSO2 = 3.0\n", encoding="utf-8")

    config = study(tmp_path, case="case.json")
    with pytest.raises(MetricsError) as info:
        run_study(config)
    assert info.value.error_code == ErrorCode.MISSING_HTP_FACTOR

    doc = {"study": {"case": "case.json", "output_dir": "out", "htp_table": "htp.toml"}}
    result = run_study(config_from_dict(doc, tmp_path))
    base = result.solutions[0]
    energy = float(base.generation[1].sum()) * base.dt_hours
    others = sum(
        float(base.generation[g.id].sum()) * g.tox_rate for g in result.case.generators[1:]
    )
    expected = energy * (3.0 * 2.0 + 4.5 * 3.0) + others
    assert result.report.scenario("without_fs").tox_lbs_toluene_eq == pytest.approx(expected)


def test_failed_scenario_is_named(tmp_path):
    case = builtin_fixture("two_period")
    buses = (replace(case.buses[0], base_load=(20.0, 130.0)),)
    save_case(replace(case, buses=buses), tmp_path / "tight.json")

    config = study(tmp_path, case="tight.json")
    with pytest.raises(StudyError) as info:
        run_study(config)

    error = info.value
    assert error.scenario == "without_fs"
    assert isinstance(error.__cause__, DispatchInfeasible)
    assert error.to_dict()["cause"]["error"] == "DISPATCH_INFEASIBLE"
    # the other scenarios were still written
    assert (config.output_dir / "scenarios" / "fs_whole_system" / "lmp.csv").exists()


@pytest.mark.parametrize("doc, message", [
    ({"colour": {}}, "section"),
    ({"study": {"cases": "x"}}, "cases"),
    ({"clusters": {"k": 0}}, "clusters.k"),
    ({"load_split": {"seed": 1}}, "seed"),
    ({"solver": {"tolerance": 1.0}}, "bad config value"),
    ({"scenarios": {"name": "x"}}, "list"),
])
def test_bad_configs(doc, message):
    with pytest.raises(StudyError, match=message) as info:
        config_from_dict(doc)
    assert info.value.error_code == ErrorCode.CONFIG_INVALID


def test_unknown_baseline(tmp_path):
    config = with_overrides(study(tmp_path), baseline="nothing")
    with pytest.raises(StudyError) as info:
        prepare(config)
    assert info.value.error_code == ErrorCode.CONFIG_INVALID


def test_explain_congested_price(tmp_path):
    result = run_study(study(tmp_path, case="builtin:two_area_priced"))
    info = explain_lmp(result.output_dir, bus=3, t=1)

    assert info["scenario"] == "without_fs"
    assert info["lmp"] == pytest.approx(40.0)
    assert info["lmp_range"] == pytest.approx([11.0, 40.0])
    assert not info["uniform_prices"]
    assert [line["line"] for line in info["binding_lines"]] == [2]
    assert info["binding_lines"][0]["incident"]
    assert info["data_center"] is None

    near = explain_lmp(result.output_dir, bus=1, t=2)
    assert near["data_center"]["id"] == 1
    assert not near["data_center"]["flexible"]
    assert any(seg["sets_price"] and seg["generator"] == 1 for seg in near["marginal_segments"])

    text = format_explanation(info)
    assert "line 2 2->3" in text
    assert "(incident)" in text


def test_explain_uniform_price(tmp_path):
    result = run_study(study(tmp_path, case="builtin:three_bus"))
    info = explain_lmp(result.output_dir, bus=2, t=2)

    assert info["uniform_prices"]
    assert info["binding_lines"] == []
    setters = [seg for seg in info["marginal_segments"] if seg["sets_price"]]
    assert [(seg["generator"], seg["segment"]) for seg in setters] == [(2, 1)]
    assert "uniform" in format_explanation(info)


def test_explain_flexible_allocation(tmp_path):
    result = run_study(study(tmp_path, case="builtin:two_period"))
    info = explain_lmp(result.output_dir, bus=1, t=1, scenario="fs_whole_system")
    dc = info["data_center"]
    assert dc["flexible"]
    assert dc["above_uniform"]
    assert dc["be_mw"] == pytest.approx(20.0)
    assert dc["uniform_mw"] == pytest.approx(10.0)


def test_explain_errors(tmp_path):
    with pytest.raises(StudyError) as info:
        explain_lmp(tmp_path, bus=1, t=1)
    assert info.value.error_code == ErrorCode.NO_PRIOR_RUN

    result = run_study(study(tmp_path, case="builtin:two_period"))
    for kwargs in ({"bus": 9, "t": 1}, {"bus": 1, "t": 0}, {"bus": 1, "t": 3},
                   {"bus": 1, "t": 1, "scenario": "nope"}):
        with pytest.raises(StudyError) as info:
            explain_lmp(result.output_dir, **kwargs)
        assert info.value.error_code == ErrorCode.UNKNOWN_BUS_OR_INTERVAL


def test_cli_run_and_explain(tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["run", "--case", "builtin:two_period", "--out", str(out)]) == 0
    assert "fs_whole_system" in capsys.readouterr().out

    assert main(["explain-lmp", "--out", str(out), "--bus", "1", "--t", "2", "--json"]) == 0
    info = json.loads(capsys.readouterr().out)
    assert info["bus"] == 1 and info["t"] == 2


def test_cli_missing_case(tmp_path, capsys):
    missing = tmp_path / "missing.json"
    assert main(["run", "--case", str(missing), "--out", str(tmp_path / "out")]) == 1
    error = json.loads(capsys.readouterr().out)
    assert error["error"] == "CASE_PARSE"
    assert "missing.json" in error["message"]


def test_cli_missing_htp_table(tmp_path, capsys):
    config = tmp_path / "study.json"
    config.write_text(json.dumps({
        "study": {"case": "builtin:three_bus", "output_dir": "out", "htp_table": "nope.toml"},
    }), encoding="utf-8")

    assert main(["run", "--config", str(config)]) == 1
    error = json.loads(capsys.readouterr().out)
    assert error["error"] == "CONFIG_INVALID"
    assert "nope.toml" in error["message"]
    assert not (tmp_path / "out").exists()


def test_cli_validate(tmp_path, capsys):
    assert main(["validate", "--case", "builtin:three_bus"]) == 0
    assert "valid" in capsys.readouterr().out

    case = builtin_fixture("three_bus")
    broken = replace(case, lines=(replace(case.lines[0], flow_min=5.0),) + case.lines[1:])
    save_case(broken, tmp_path / "broken.json")
    assert main(["validate", "--case", str(tmp_path / "broken.json"), "--json"]) == 1
    violations = json.loads(capsys.readouterr().out)
    assert len(violations) == 1
    assert violations[0].startswith("LINE_FLOW_RANGE")


def test_cli_init(tmp_path, capsys):
    path = tmp_path / "study.toml"
    assert main(["init", str(path)]) == 0
    assert main(["init", str(path)]) == 1
    assert main(["init", str(path), "--force"]) == 0

    config = load_config(path)
    assert config.case_path == "builtin:five_bus_congested"
    assert config.output_dir == tmp_path / "study-out"
    assert config.load_split.utilization == 0.8
    assert config.clusters_k == 3
    assert config.htp.factors == {}

    config = with_overrides(config, output_dir=tmp_path / "run")
    assert len(run_study(config).report.scenarios) == 5
