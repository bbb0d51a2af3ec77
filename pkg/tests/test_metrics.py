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

import numpy as np
import pytest

from gridflex.core.fixtures import builtin_fixture
from gridflex.core.scenario import cluster_by_capacity
from gridflex.dataclasses.generator import CostSegment, Generator
from gridflex.dataclasses.line import Line
from gridflex.dispatch import DispatchSolution, solve_dispatch
from gridflex.exc import ErrorCode, MetricsError
from gridflex.metrics import (
    HtpTable,
    build_report,
    congestion_metric,
    ghg_total,
    stressed_lines,
    tox_total,
)
from gridflex.metrics.emissions import ghg_by_interval, pollutant_totals, toxic_rate
from gridflex.util import make_rng
from helpers import fixed, flexible


def unit(gen_id, **rates):
    return Generator(
        id=gen_id, bus=1, no_load_cost=0.0, segments=(CostSegment(200.0, 10.0),),
        ramp_up=200.0, ramp_down=200.0, **rates,
    )


def solution(generation, dt_hours=1.0):
    horizon = len(next(iter(generation.values())))
    return DispatchSolution(
        case_name="synthetic",
        scenario_name="s",
        case_signature="0",
        horizon=horizon,
        dt_hours=dt_hours,
        generation={k: np.asarray(v, dtype=float) for k, v in generation.items()},
        segment_generation={},
        flows={},
        angles={},
        be_schedule={},
        lmp={},
        objective_cost=0.0,
        no_load_offset=0.0,
    )


def line(limit, lower=None):
    return Line(id=1, from_bus=1, to_bus=2, susceptance=-10.0,
                flow_min=-limit if lower is None else lower, flow_max=limit)


def test_congestion_metric_averages_variance():
    lmp = {1: [10.0, 15.0], 2: [20.0, 15.0]}
    assert congestion_metric(lmp, [1, 2]) == pytest.approx(12.5)
    assert congestion_metric(lmp, [1]) == 0.0


def test_congestion_metric_needs_buses():
    with pytest.raises(MetricsError) as info:
        congestion_metric({1: [1.0]}, [])
    assert info.value.error_code == ErrorCode.EMPTY_BUS_SUBSET

    with pytest.raises(MetricsError, match="bus"):
        congestion_metric({1: [1.0]}, [1, 2])


def test_stress_boundary_counts():
    result = stressed_lines({1: [89.9, 90.0, 95.0]}, [line(100.0)])
    assert result.total == 2
    assert result.per_interval == (0, 1, 1)
    assert result.per_line == {1: True}


def test_stress_in_reverse_direction():
    assert stressed_lines({1: [-90.0, -50.0]}, [line(100.0)]).total == 1
    # a zero lower limit never stresses the reverse direction
    assert stressed_lines({1: [0.0, 0.0]}, [line(100.0, lower=0.0)]).total == 0


def test_stress_threshold_range():
    with pytest.raises(MetricsError):
        stressed_lines({1: [1.0]}, [line(1.0)], threshold=0.0)
    assert stressed_lines({1: [50.0]}, [line(100.0)], threshold=0.5).total == 1


def test_ghg_of_one_unit():
    sol = solution({1: [100.0]})
    assert ghg_total(sol, [unit(1, ghg_rate=1000.0)]) == pytest.approx(100000.0)


def test_emissions_scale_with_output_and_interval():
    gens = [unit(1, ghg_rate=1000.0, tox_rate=0.5), unit(2, ghg_rate=500.0, tox_rate=0.2)]
    base = solution({1: [100.0, 50.0], 2: [20.0, 0.0]})
    doubled = solution({1: [200.0, 100.0], 2: [40.0, 0.0]})
    half_hours = solution({1: [100.0, 50.0], 2: [20.0, 0.0]}, dt_hours=0.5)

    assert ghg_total(doubled, gens) == pytest.approx(2 * ghg_total(base, gens))
    assert ghg_total(half_hours, gens) == pytest.approx(0.5 * ghg_total(base, gens))
    assert tox_total(base, gens, HtpTable()) == pytest.approx(150 * 0.5 + 20 * 0.2)
    assert ghg_by_interval(base, gens) == pytest.approx([110000.0, 50000.0])


def test_pollutants_are_converted_with_htp_factors():
    gen = unit(1, pollutant_rates=(("NOx", 2.0), ("SO2", 1.0)), tox_rate=99.0)
    htp = HtpTable({"NOx": 3.0, "SO2": 0.5})
    assert toxic_rate(gen, htp) == pytest.approx(6.5)

    sol = solution({1: [10.0, 10.0]})
    assert tox_total(sol, [gen], htp) == pytest.approx(130.0)
    assert pollutant_totals(sol, [gen]) == {"NOx": 40.0, "SO2": 20.0}

    with pytest.raises(MetricsError) as info:
        tox_total(sol, [gen], HtpTable({"NOx": 3.0}))
    assert info.value.error_code == ErrorCode.MISSING_HTP_FACTOR


def test_output_without_rates_is_an_error():
    sol = solution({1: [10.0], 2: [5.0]})
    with pytest.raises(MetricsError) as info:
        ghg_total(sol, [unit(1, ghg_rate=1.0)])
    assert info.value.error_code == ErrorCode.MISSING_RATE

    idle = solution({1: [10.0], 2: [0.0]})
    assert ghg_total(idle, [unit(1, ghg_rate=1.0)]) == pytest.approx(10.0)


def test_htp_table_files(tmp_path):
    as_json = tmp_path / "htp.json"
    as_json.write_text(json.dumps({"NOx": 2.5, "SO2": 1}), encoding="utf-8")
    as_toml = tmp_path / "htp.toml"
    as_toml.write_text('NOx = 2.5\nSO2 = 1.0\n', encoding="utf-8")

    assert HtpTable.load(as_json).factor("SO2") == 1.0
    assert HtpTable.load(as_toml).factors == {"NOx": 2.5, "SO2": 1.0}

    with pytest.raises(MetricsError, match="positive"):
        HtpTable({"NOx": -1.0})

    with pytest.raises(MetricsError, match="missing.toml"):
        HtpTable.load(tmp_path / "missing.toml")


POLLUTANTS = ("Hg", "NOx", "PM", "SO2")


def random_lines(rng, count):
    return [
        Line(id=n, from_bus=1, to_bus=2, susceptance=-10.0,
             flow_min=-float(rng.uniform(10.0, 100.0)), flow_max=float(rng.uniform(10.0, 100.0)))
        for n in range(1, count + 1)
    ]


def random_units(rng, count):
    """
    Units with random GHG rates; every other one carries per-pollutant rates instead of a
    pre-combined toxic rate.
    """
    units = []
    for n in range(1, count + 1):
        rates = {"ghg_rate": float(rng.uniform(500.0, 2500.0))}
        if n % 2:
            rates["pollutant_rates"] = tuple(
                (p, float(rng.uniform(0.0, 3.0))) for p in POLLUTANTS if rng.random() < 0.7
            ) or (("NOx", 1.0),)
        else:
            rates["tox_rate"] = float(rng.uniform(0.0, 2.0))
        units.append(unit(n, **rates))
    return units


@pytest.mark.parametrize("seed", range(20))
def test_congestion_metric_ignores_a_common_price_shift(seed):
    rng = make_rng(seed)
    buses, horizon = int(rng.integers(1, 9)), int(rng.integers(1, 25))
    prices = rng.uniform(-50.0, 200.0, size=(buses, horizon))
    shift = rng.uniform(-100.0, 100.0, size=horizon)

    lmp = {b + 1: prices[b] for b in range(buses)}
    shifted = {b + 1: prices[b] + shift for b in range(buses)}
    expected = congestion_metric(lmp, lmp)
    assert congestion_metric(shifted, shifted) == pytest.approx(expected, rel=1e-9, abs=1e-9)


@pytest.mark.parametrize("seed", range(10))
def test_stress_count_never_rises_with_the_threshold(seed):
    rng = make_rng(seed)
    lines = random_lines(rng, 6)
    flows = {
        line.id: rng.uniform(line.flow_min, line.flow_max, size=12) for line in lines
    }

    counts = [stressed_lines(flows, lines, threshold=t) for t in np.linspace(0.05, 1.0, 20)]
    for low, high in zip(counts, counts[1:]):
        assert high.total <= low.total
        assert all(h <= lo for h, lo in zip(high.per_interval, low.per_interval))


@pytest.mark.parametrize("seed", range(10))
def test_full_threshold_counts_pairs_at_their_limit(seed):
    rng = make_rng(100 + seed)
    lines = random_lines(rng, 6)
    at_limit = rng.random((6, 12)) < 0.3
    upper_side = rng.random((6, 12)) < 0.5

    flows = {}
    for k, line in enumerate(lines):
        inside = 0.99 * rng.uniform(line.flow_min, line.flow_max, size=12)
        limit = np.where(upper_side[k], line.flow_max, line.flow_min)
        flows[line.id] = np.where(at_limit[k], limit, inside)

    result = stressed_lines(flows, lines, threshold=1.0)
    assert result.total == int(at_limit.sum())
    assert result.per_interval == tuple(int(c) for c in at_limit.sum(axis=0))
    assert result.per_line == {line.id: bool(at_limit[k].any()) for k, line in enumerate(lines)}


@pytest.mark.parametrize("seed", range(10))
def test_emission_totals_ignore_generator_order(seed):
    rng = make_rng(seed)
    gens = random_units(rng, 7)
    output = {gen.id: rng.uniform(0.0, 200.0, size=4) for gen in gens}
    htp = HtpTable({p: 1.0 + k for k, p in enumerate(POLLUTANTS)})

    shuffled = [gens[i] for i in rng.permutation(len(gens))]
    sol = solution(output)
    reordered = solution({gen.id: output[gen.id] for gen in shuffled})
    assert ghg_total(reordered, shuffled) == ghg_total(sol, gens)
    assert tox_total(reordered, shuffled, htp) == tox_total(sol, gens, htp)


@pytest.mark.parametrize("seed", range(10))
def test_uniform_rate_scales_served_energy(seed):
    rng = make_rng(seed)
    rate = float(rng.uniform(100.0, 2000.0))
    dt = float(rng.choice([0.25, 0.5, 1.0]))
    gens = [unit(n, ghg_rate=rate, tox_rate=rate) for n in range(1, 6)]
    sol = solution({gen.id: rng.uniform(0.0, 150.0, size=6) for gen in gens}, dt_hours=dt)

    served = sum(float(out.sum()) for out in sol.generation.values()) * dt
    assert ghg_total(sol, gens) == pytest.approx(rate * served, rel=1e-12)
    assert tox_total(sol, gens, HtpTable()) == pytest.approx(rate * served, rel=1e-12)


@pytest.mark.parametrize("seed", range(10))
def test_toxic_total_distributes_over_pollutants(seed):
    rng = make_rng(seed)
    htp = HtpTable({p: float(rng.uniform(0.1, 10.0)) for p in POLLUTANTS})
    gens = [gen for gen in random_units(rng, 8) if gen.pollutant_rates]
    sol = solution(
        {gen.id: rng.uniform(0.0, 200.0, size=5) for gen in gens},
        dt_hours=float(rng.choice([0.5, 1.0])),
    )

    masses = pollutant_totals(sol, gens)
    expected = sum(htp.factor(p) * mass for p, mass in masses.items())
    assert tox_total(sol, gens, htp) == pytest.approx(expected, rel=1e-12)


def test_report_against_baseline():
    case = builtin_fixture("two_area_priced")
    solutions = [solve_dispatch(case, fixed(case)), solve_dispatch(case, flexible(case))]
    report = build_report(case, solutions, "without_fs", HtpTable())

    base = report.scenario("without_fs")
    assert base.gamma == pytest.approx(210.25)
    assert base.stressed_line_total == 2
    assert base.stressed_per_interval == (1, 1)
    assert report.deltas["without_fs"] == {
        "objective_cost": 0.0, "gamma": 0.0, "stressed_line_total": 0.0,
        "ghg_lbs": 0.0, "tox_lbs_toluene_eq": 0.0,
    }
    assert report.deltas["fs_whole_system"]["objective_cost"] <= 1e-6

    frame = report.to_frame()
    assert list(frame.columns) == ["scenario", "metric", "value", "delta"]
    assert len(frame) == 2 * 5

    doc = json.loads(report.to_json())
    assert doc["baseline"] == "without_fs"
    assert [s["name"] for s in doc["scenarios"]] == ["without_fs", "fs_whole_system"]


def test_report_cluster_gamma_uses_baseline():
    case = builtin_fixture("five_bus_congested")
    clusters = cluster_by_capacity(case, 2)
    solutions = [solve_dispatch(case, fixed(case)), solve_dispatch(case, flexible(case))]
    report = build_report(case, solutions, "without_fs", HtpTable(), clusters=clusters)

    base = solutions[0]
    assert [c.id for c in report.clusters] == [1, 2]
    assert report.clusters[0].gamma == pytest.approx(congestion_metric(base.lmp, [1, 2, 3]))
    assert report.clusters[1].gamma == pytest.approx(congestion_metric(base.lmp, [4, 5]))


def test_report_errors():
    case = builtin_fixture("two_period")
    sol = solve_dispatch(case, fixed(case))
    with pytest.raises(MetricsError) as info:
        build_report(case, [sol], "fs_whole_system", HtpTable())
    assert info.value.error_code == ErrorCode.UNKNOWN_BASELINE

    with pytest.raises(MetricsError, match="repeated"):
        build_report(case, [sol, sol], "without_fs", HtpTable())

    other = builtin_fixture("one_bus")
    stranger = solve_dispatch(other, flexible(other))
    with pytest.raises(MetricsError) as info:
        build_report(case, [sol, stranger], "without_fs", HtpTable())
    assert info.value.error_code == ErrorCode.CASE_MISMATCH
