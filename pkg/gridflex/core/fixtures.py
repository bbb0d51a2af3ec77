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
Built-in desk-scale cases, and a seeded generator of small random cases.

All fixtures use 1 h intervals and a 100 MVA base. Lines have a susceptance of
``-10`` p.u., so 0.01 rad of angle difference carries 10 MW.

.. currentmodule:: gridflex.core.fixtures
"""
import logging
from typing import Callable, Dict, List, Sequence, Tuple

from gridflex.dataclasses.bus import Bus
from gridflex.dataclasses.case import DispatchCase
from gridflex.dataclasses.datacenter import DataCenter
from gridflex.dataclasses.generator import CostSegment, Generator
from gridflex.dataclasses.line import Line
from gridflex.exc import UnknownFixtureError
from gridflex.util import as_series, constant_series, make_rng

logger = logging.getLogger(__name__)

ANGLE_LIMIT = 0.5
SUSCEPTANCE = -10.0


def _buses(loads: Sequence[Sequence[float]], slack: int = 1) -> Tuple[Bus, ...]:
    return tuple(
        Bus(
            id=n,
            angle_min=0.0 if n == slack else -ANGLE_LIMIT,
            angle_max=0.0 if n == slack else ANGLE_LIMIT,
            is_slack=n == slack,
            base_load=as_series(load),
        )
        for n, load in enumerate(loads, start=1)
    )


def _segments(*pairs: Tuple[float, float]) -> Tuple[CostSegment, ...]:
    return tuple(CostSegment(cap_mw=float(cap), cost_per_mwh=float(cost)) for cap, cost in pairs)


def _lines(*spec: Tuple[int, int, float]) -> Tuple[Line, ...]:
    return tuple(
        Line(
            id=n,
            from_bus=a,
            to_bus=b,
            susceptance=SUSCEPTANCE,
            flow_min=-float(limit),
            flow_max=float(limit),
        )
        for n, (a, b, limit) in enumerate(spec, start=1)
    )


def _dc(dc_id: int, bus: int, peak: float, lc: float, aux: float, energy: float, horizon: int):
    return DataCenter(
        id=dc_id,
        bus=bus,
        peak_mw=float(peak),
        lc_profile=constant_series(lc, horizon),
        aux_profile=constant_series(aux, horizon),
        be_energy_mwh=float(energy),
    )


def one_bus() -> DispatchCase:
    """
    One bus, a cheap capacity-limited unit and an expensive peaker, one data center,
    three intervals.
    """
    return DispatchCase(
        name="one_bus",
        s_base=100.0,
        dt_hours=1.0,
        horizon=3,
        buses=_buses([[30.0, 55.0, 40.0]]),
        generators=(
            Generator(id=1, bus=1, no_load_cost=50.0, segments=_segments((30, 10), (20, 12)),
                      ramp_up=50.0, ramp_down=50.0, ghg_rate=2000.0, tox_rate=0.5,
                      fuel="coal", name="baseload"),
            Generator(id=2, bus=1, no_load_cost=100.0, segments=_segments((40, 30), (40, 45)),
                      ramp_up=40.0, ramp_down=40.0, ghg_rate=1200.0, tox_rate=0.1,
                      fuel="gas", name="peaker"),
        ),
        lines=(),
        data_centers=(_dc(1, 1, peak=20, lc=3, aux=5, energy=18, horizon=3),),
    )


def three_bus() -> DispatchCase:
    """
    An uncongested triangle over four intervals, with the data center next to the
    expensive unit.
    """
    return DispatchCase(
        name="three_bus",
        s_base=100.0,
        dt_hours=1.0,
        horizon=4,
        buses=_buses([
            [0.0, 0.0, 0.0, 0.0],
            [40.0, 50.0, 60.0, 45.0],
            [30.0, 35.0, 40.0, 35.0],
        ]),
        generators=(
            Generator(id=1, bus=1, no_load_cost=80.0,
                      segments=_segments((25, 8), (25, 9), (25, 10), (25, 11)),
                      ramp_up=60.0, ramp_down=60.0, ghg_rate=2100.0,
                      tox_rate=0.9, fuel="coal"),
            Generator(id=2, bus=3, no_load_cost=40.0,
                      segments=_segments((25, 20), (25, 22), (25, 25), (25, 30)),
                      ramp_up=60.0, ramp_down=60.0, ghg_rate=1100.0,
                      tox_rate=0.2, fuel="gas"),
        ),
        lines=_lines((1, 2, 100), (1, 3, 100), (2, 3, 100)),
        data_centers=(_dc(1, 3, peak=30, lc=4, aux=8, energy=40, horizon=4),),
    )


def five_bus_congested() -> DispatchCase:
    """
    A cheap unit at bus 1 that can only export through two 60 MW lines, so at least one
    of them binds at the optimum. Three data centers sit at buses 3, 4 and 5.
    """
    return DispatchCase(
        name="five_bus_congested",
        s_base=100.0,
        dt_hours=1.0,
        horizon=3,
        buses=_buses([
            [0.0, 0.0, 0.0],
            [60.0, 70.0, 50.0],
            [50.0, 60.0, 45.0],
            [50.0, 55.0, 45.0],
            [40.0, 45.0, 40.0],
        ]),
        generators=(
            Generator(id=1, bus=1, no_load_cost=120.0,
                      segments=_segments((125, 10), (125, 11), (125, 12), (125, 13)),
                      ramp_up=200.0, ramp_down=200.0, ghg_rate=2100.0,
                      tox_rate=0.9, fuel="coal"),
            Generator(id=2, bus=4, no_load_cost=60.0,
                      segments=_segments((50, 40), (50, 42), (50, 45), (50, 50)),
                      ramp_up=100.0, ramp_down=100.0, ghg_rate=1300.0,
                      tox_rate=0.4, fuel="oil"),
            Generator(id=3, bus=5, no_load_cost=50.0,
                      segments=_segments((50, 25), (50, 27), (50, 30), (50, 32)),
                      ramp_up=100.0, ramp_down=100.0, ghg_rate=1000.0,
                      tox_rate=0.2, fuel="gas"),
            Generator(id=4, bus=4, no_load_cost=0.0, segments=(), ramp_up=0.0, ramp_down=0.0,
                      dispatchable=False, fixed_output=(10.0, 5.0, 15.0), fuel="wind",
                      name="wind farm"),
        ),
        lines=_lines((1, 2, 60), (1, 3, 60), (2, 3, 200), (2, 4, 200), (3, 5, 200), (4, 5, 200)),
        data_centers=(
            _dc(1, 3, peak=20, lc=3, aux=6, energy=24, horizon=3),
            _dc(2, 4, peak=25, lc=4, aux=8, energy=30, horizon=3),
            _dc(3, 5, peak=15, lc=2, aux=5, energy=15, horizon=3),
        ),
    )


def two_area_priced() -> DispatchCase:
    """
    Two areas joined by a 30 MW tie-line between buses 2 and 3. The tie binds in every
    interval, pricing the cheap area at 11 $/MWh and the expensive area at 40 $/MWh.
    """
    return DispatchCase(
        name="two_area_priced",
        s_base=100.0,
        dt_hours=1.0,
        horizon=2,
        buses=_buses([[20.0, 25.0], [0.0, 0.0], [0.0, 0.0], [80.0, 70.0]]),
        generators=(
            Generator(id=1, bus=1, no_load_cost=30.0, segments=_segments((40, 10), (60, 11)),
                      ramp_up=100.0, ramp_down=100.0, ghg_rate=1900.0, fuel="coal"),
            Generator(id=2, bus=4, no_load_cost=20.0, segments=_segments((30, 35), (50, 40)),
                      ramp_up=80.0, ramp_down=80.0, ghg_rate=1100.0, fuel="gas"),
        ),
        lines=_lines((1, 2, 200), (2, 3, 30), (3, 4, 200)),
        data_centers=(_dc(1, 1, peak=10, lc=2, aux=2, energy=8, horizon=2),),
    )


def two_period() -> DispatchCase:
    """
    One bus over two intervals with a cheap first interval and an expensive second one.
    The data center has room to move all of its BE energy into the first interval.
    """
    return DispatchCase(
        name="two_period",
        s_base=100.0,
        dt_hours=1.0,
        horizon=2,
        buses=_buses([[20.0, 45.0]]),
        generators=(
            Generator(id=1, bus=1, no_load_cost=20.0, segments=_segments((40, 10)),
                      ramp_up=40.0, ramp_down=40.0, ghg_rate=2000.0, fuel="coal"),
            Generator(id=2, bus=1, no_load_cost=40.0, segments=_segments((10, 30), (90, 35)),
                      ramp_up=100.0, ramp_down=100.0, ghg_rate=1100.0, fuel="gas"),
        ),
        lines=(),
        data_centers=(_dc(1, 1, peak=30, lc=2, aux=3, energy=20, horizon=2),),
    )


FIXTURES: Dict[str, Callable[[], DispatchCase]] = {
    "one_bus": one_bus,
    "three_bus": three_bus,
    "five_bus_congested": five_bus_congested,
    "two_area_priced": two_area_priced,
    "two_period": two_period,
}


def builtin_fixture(name: str) -> DispatchCase:
    """
    Gets a built-in case by name.

    :raises UnknownFixtureError: If no fixture has that name.
    """
    try:
        factory = FIXTURES[name]
    except KeyError:
        raise UnknownFixtureError(
            f"unknown fixture {name!r}, expected one of {', '.join(sorted(FIXTURES))}"
        ) from None

    return factory()


def random_case(
    seed: int,
    *,
    num_buses: int = 4,
    horizon: int = 3,
    num_data_centers: int = 2,
    extra_lines: int = 1,
) -> DispatchCase:
    """
    Generates a small valid case that is always feasible.

    Every bus has a local unit large enough for its own demand, so the zero-flow dispatch
    is feasible whatever the line limits; cheaper units at random buses then push power
    through the network, which is where congestion comes from.
    """
    rng = make_rng(seed)
    num_data_centers = min(num_data_centers, num_buses)

    loads: List[List[float]] = [
        [round(float(rng.uniform(0.0, 30.0)), 3) for _ in range(horizon)]
        for _ in range(num_buses)
    ]
    buses = _buses(loads)

    picks = rng.choice(num_buses, size=num_data_centers, replace=False)
    dc_buses = sorted(int(b) + 1 for b in picks)
    data_centers = []
    for n, bus in enumerate(dc_buses, start=1):
        peak = round(float(rng.uniform(10.0, 30.0)), 3)
        lc = [round(peak * float(rng.uniform(0.05, 0.2)), 3) for _ in range(horizon)]
        aux = [round(peak * float(rng.uniform(0.1, 0.3)), 3) for _ in range(horizon)]
        headroom = sum(peak - a - b for a, b in zip(lc, aux))
        data_centers.append(
            DataCenter(
                id=n,
                bus=bus,
                peak_mw=peak,
                lc_profile=as_series(lc),
                aux_profile=as_series(aux),
                be_energy_mwh=round(headroom * float(rng.uniform(0.2, 0.8)), 3),
            )
        )

    peaks = {dc.bus: dc.peak_mw for dc in data_centers}
    generators = []
    for bus in range(1, num_buses + 1):
        capacity = max(loads[bus - 1]) + peaks.get(bus, 0.0) + 10.0
        costs = sorted(round(float(c), 2) for c in rng.uniform(30.0, 60.0, size=2))
        generators.append(
            Generator(
                id=len(generators) + 1,
                bus=bus,
                no_load_cost=round(float(rng.uniform(0.0, 50.0)), 2),
                segments=_segments((capacity / 2, costs[0]), (capacity / 2, costs[1])),
                ramp_up=capacity,
                ramp_down=capacity,
                ghg_rate=round(float(rng.uniform(800.0, 2200.0)), 1),
                tox_rate=round(float(rng.uniform(0.0, 1.0)), 3),
            )
        )

    for _ in range(max(1, num_buses // 2)):
        bus = int(rng.integers(1, num_buses + 1))
        costs = sorted(round(float(c), 2) for c in rng.uniform(5.0, 25.0, size=2))
        width = round(float(rng.uniform(10.0, 40.0)), 3)
        ramp = round(float(rng.uniform(5.0, 2 * width)), 3)
        generators.append(
            Generator(
                id=len(generators) + 1,
                bus=bus,
                no_load_cost=round(float(rng.uniform(0.0, 50.0)), 2),
                segments=_segments((width, costs[0]), (width, costs[1])),
                ramp_up=ramp,
                ramp_down=ramp,
                ghg_rate=round(float(rng.uniform(800.0, 2200.0)), 1),
                tox_rate=round(float(rng.uniform(0.0, 1.0)), 3),
            )
        )

    # a random spanning tree keeps the network connected
    pairs = []
    for bus in range(2, num_buses + 1):
        pairs.append((int(rng.integers(1, bus)), bus))
    candidates = [
        (a, b) for a in range(1, num_buses + 1) for b in range(a + 1, num_buses + 1)
        if (a, b) not in pairs
    ]
    for index in rng.permutation(len(candidates))[:extra_lines]:
        pairs.append(candidates[int(index)])

    lines = _lines(*((a, b, round(float(rng.uniform(10.0, 60.0)), 3)) for a, b in pairs))

    return DispatchCase(
        name=f"random_{seed}",
        s_base=100.0,
        dt_hours=1.0,
        horizon=horizon,
        buses=buses,
        generators=tuple(generators),
        lines=lines,
        data_centers=tuple(data_centers),
    )
