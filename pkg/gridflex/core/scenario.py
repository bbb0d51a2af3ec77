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
Scenario construction: data-center load splits, fixed-baseline BE profiles,
capacity-balanced clusters and named scenarios.

.. currentmodule:: gridflex.core.scenario
"""
import logging
from dataclasses import dataclass, field, replace
from typing import Any, Dict, FrozenSet, Iterable, List, Mapping, Sequence, Tuple

from gridflex.dataclasses.case import DispatchCase
from gridflex.dataclasses.datacenter import DataCenter
from gridflex.exc import ErrorCode, ScenarioError
from gridflex.util import constant_series, make_rng

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LoadSplitPolicy:
    """
    How each data center's consumption is divided into LC, auxiliary and BE parts.

    One LC fraction is drawn per data center, uniformly on
    ``[lc_fraction_mean - lc_fraction_halfwidth, lc_fraction_mean + lc_fraction_halfwidth]``,
    from a ``PCG64`` generator seeded with ``rng_seed``; draws are made in data-center id
    order and the fraction is held constant over the horizon.
    """

    #: The share of consumption attributed to servers.
    server_fraction: float = 0.60

    #: The mean share of server power that is latency-critical.
    lc_fraction_mean: float = 0.30

    #: The half-width of the uniform LC-share draw.
    lc_fraction_halfwidth: float = 0.10

    rng_seed: int = 0

    #: The average consumption as a share of the peak rating. At 1.0 the uniform BE
    #: level exactly fills the peak-limit headroom; below 1.0 BE power has room to move.
    utilization: float = 1.0

    def validate(self):
        """
        :raises ScenarioError: If a fraction lies outside its range.
        """
        low = self.lc_fraction_mean - self.lc_fraction_halfwidth
        high = self.lc_fraction_mean + self.lc_fraction_halfwidth
        if not 0 <= self.server_fraction <= 1:
            raise ScenarioError(
                f"server_fraction {self.server_fraction} not in [0, 1]",
                code=ErrorCode.POLICY_INVALID,
            )
        if self.lc_fraction_halfwidth < 0 or low < 0 or high > 1:
            raise ScenarioError(
                f"LC fraction range [{low}, {high}] not within [0, 1]",
                code=ErrorCode.POLICY_INVALID,
            )
        if not 0 < self.utilization <= 1:
            raise ScenarioError(
                f"utilization {self.utilization} not in (0, 1]", code=ErrorCode.POLICY_INVALID
            )

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "LoadSplitPolicy":
        known = {"server_fraction", "lc_fraction_mean", "lc_fraction_halfwidth", "rng_seed",
                 "utilization"}
        extra = sorted(set(doc) - known)
        if extra:
            raise ScenarioError(
                f"unknown load_split field(s): {', '.join(extra)}", code=ErrorCode.POLICY_INVALID
            )

        return cls(**doc)


def draw_lc_fractions(case: DispatchCase, policy: LoadSplitPolicy) -> Dict[int, float]:
    """
    :return: A mapping of data center id -> drawn LC fraction.
    """
    policy.validate()
    rng = make_rng(policy.rng_seed)
    low = policy.lc_fraction_mean - policy.lc_fraction_halfwidth
    high = policy.lc_fraction_mean + policy.lc_fraction_halfwidth
    fractions = {}
    for dc in sorted(case.data_centers, key=lambda d: d.id):
        fractions[dc.id] = float(rng.uniform(low, high))

    return fractions


def apply_load_split(case: DispatchCase, policy: LoadSplitPolicy) -> DispatchCase:
    """
    Populates every data center's LC and auxiliary profiles and BE energy.

    For a data center with peak ``P`` and drawn LC fraction ``f``, and with ``s`` the
    server fraction and ``u`` the utilization, every interval gets
    ``LC = f * s * u * P`` and ``aux = (1 - s) * u * P``, and
    ``E_BE = (1 - f) * s * u * P * horizon * dt``.

    :raises ScenarioError: If the policy is invalid.
    """
    fractions = draw_lc_fractions(case, policy)
    server = policy.server_fraction
    scale = policy.utilization
    horizon = case.horizon

    updated = []
    for dc in case.data_centers:
        lc_fraction = fractions[dc.id]
        average = scale * dc.peak_mw
        updated.append(
            replace(
                dc,
                lc_profile=constant_series(lc_fraction * server * average, horizon),
                aux_profile=constant_series((1 - server) * average, horizon),
                be_energy_mwh=(1 - lc_fraction) * server * average * horizon * case.dt_hours,
            )
        )

    logger.debug(f"Applied load split {policy} to {len(updated)} data centers")
    return case.with_data_centers(updated)


def uniform_be_profile(dc: DataCenter, horizon: int, dt_hours: float) -> Tuple[float, ...]:
    """
    Spreads a data center's BE energy evenly over the horizon.

    :return: The constant BE power per interval, in MW.
    """
    return constant_series(dc.be_energy_mwh / (horizon * dt_hours), horizon)


@dataclass(frozen=True)
class Scenario:
    """
    Represents which data centers are scheduled flexibly. Every other data center draws a
    fixed BE profile.
    """

    name: str
    flexible_dc_ids: FrozenSet[int]

    #: A mapping of data center id -> fixed BE power per interval, in MW.
    fixed_be_profiles: Mapping[int, Tuple[float, ...]] = field(default_factory=dict)

    def check(self, case: DispatchCase, rel_tol: float = 1e-9):
        """
        Checks this scenario against ``case``.

        :raises ScenarioError: If an id is unknown, the fixed profiles do not cover exactly
            the non-flexible data centers, or a fixed profile misses its energy.
        """
        known = {dc.id for dc in case.data_centers}
        unknown = sorted(set(self.flexible_dc_ids) - known)
        if unknown:
            raise ScenarioError(
                f"scenario {self.name!r}: unknown data center id(s) {unknown}",
                code=ErrorCode.UNKNOWN_DATA_CENTER,
            )

        expected = known - set(self.flexible_dc_ids)
        if set(self.fixed_be_profiles) != expected:
            raise ScenarioError(
                f"scenario {self.name!r}: fixed profiles cover {sorted(self.fixed_be_profiles)}"
                f", expected {sorted(expected)}"
            )

        for dc_id, profile in self.fixed_be_profiles.items():
            dc = case.data_center(dc_id)
            if len(profile) != case.horizon:
                raise ScenarioError(f"scenario {self.name!r}: profile length for dc {dc_id}")

            energy = sum(profile) * case.dt_hours
            if abs(energy - dc.be_energy_mwh) > rel_tol * max(1.0, dc.be_energy_mwh):
                raise ScenarioError(
                    f"scenario {self.name!r}: dc {dc_id} fixed profile serves {energy} MWh, "
                    f"needs {dc.be_energy_mwh} MWh"
                )


def make_scenario(case: DispatchCase, flexible_dc_ids: Iterable[int], name: str) -> Scenario:
    """
    Makes a scenario where ``flexible_dc_ids`` are flexible and every other data center
    follows its uniform BE profile.

    :raises ScenarioError: If an id is not a data center of ``case``.
    """
    flexible = frozenset(int(i) for i in flexible_dc_ids)
    known = {dc.id for dc in case.data_centers}
    unknown = sorted(flexible - known)
    if unknown:
        raise ScenarioError(
            f"scenario {name!r}: unknown data center id(s) {unknown}",
            code=ErrorCode.UNKNOWN_DATA_CENTER,
        )

    fixed = {
        dc.id: uniform_be_profile(dc, case.horizon, case.dt_hours)
        for dc in case.data_centers
        if dc.id not in flexible
    }
    return Scenario(name=name, flexible_dc_ids=flexible, fixed_be_profiles=fixed)


@dataclass(frozen=True)
class Cluster:
    """
    A set of data centers whose buses lie in one contiguous bus-id range.
    """

    id: int

    #: The inclusive (first, last) bus-id range.
    bus_range: Tuple[int, int]

    dc_ids: Tuple[int, ...]
    total_capacity_mw: float

    def contains_bus(self, bus_id: int) -> bool:
        return self.bus_range[0] <= bus_id <= self.bus_range[1]


def _balanced_cuts(capacities: Sequence[float], k: int) -> List[int]:
    """
    Splits ``capacities`` into ``k`` non-empty contiguous groups, minimising the largest
    absolute deviation of a group total from the mean group total.

    :return: The start index of every group after the first.
    """
    n = len(capacities)
    prefix = [0.0]
    for cap in capacities:
        prefix.append(prefix[-1] + cap)

    target = prefix[-1] / k
    inf = float("inf")
    # best[c][j]: the smallest worst deviation placing the first j items in c groups
    best = [[inf] * (n + 1) for _ in range(k + 1)]
    choice = [[0] * (n + 1) for _ in range(k + 1)]
    best[0][0] = 0.0
    for c in range(1, k + 1):
        for j in range(c, n - (k - c) + 1):
            for i in range(c - 1, j):
                if best[c - 1][i] == inf:
                    continue

                worst = max(best[c - 1][i], abs(prefix[j] - prefix[i] - target))
                if worst < best[c][j]:
                    best[c][j] = worst
                    choice[c][j] = i

    cuts = []
    j = n
    for c in range(k, 1, -1):
        j = choice[c][j]
        cuts.append(j)

    return sorted(cuts)


def cluster_by_capacity(case: DispatchCase, k: int) -> List[Cluster]:
    """
    Partitions the bus-id axis into ``k`` contiguous ranges whose data-center capacities
    are as equal as possible (min-max deviation from the mean).

    Each range runs up to the bus before the first data center of the next range; the
    last range ends at the highest bus id.

    :raises ScenarioError: If ``k`` is below 1 or exceeds the number of data centers.
    """
    ordered = sorted(case.data_centers, key=lambda d: (d.bus, d.id))
    if k < 1 or k > len(ordered):
        raise ScenarioError(
            f"cannot form {k} cluster(s) from {len(ordered)} data center(s)",
            code=ErrorCode.TOO_MANY_CLUSTERS,
        )

    starts = [0] + _balanced_cuts([dc.peak_mw for dc in ordered], k) + [len(ordered)]
    last_bus = max(case.bus_ids)
    clusters = []
    for n in range(k):
        members = ordered[starts[n]:starts[n + 1]]
        first = 1 if n == 0 else clusters[-1].bus_range[1] + 1
        last = last_bus if n == k - 1 else ordered[starts[n + 1]].bus - 1
        clusters.append(
            Cluster(
                id=n + 1,
                bus_range=(first, last),
                dc_ids=tuple(sorted(dc.id for dc in members)),
                total_capacity_mw=sum(dc.peak_mw for dc in members),
            )
        )

    ranges = ", ".join(
        f"{c.bus_range[0]}-{c.bus_range[1]} ({c.total_capacity_mw:.2f} MW)" for c in clusters
    )
    logger.info(f"Clustered {len(ordered)} data centers into {k}: {ranges}")
    return clusters


def scenario_from_spec(
    case: DispatchCase, spec: Mapping[str, Any], clusters: Sequence[Cluster] = ()
) -> Scenario:
    """
    Builds a scenario from its config form. ``flexible`` may be ``"all"``, ``"none"``,
    ``{"cluster": k}`` (1-based) or a list of data center ids.

    :raises ScenarioError: If the form is not recognised or refers to unknown entities.
    """
    try:
        name = spec["name"]
        flexible = spec["flexible"]
    except KeyError as e:
        raise ScenarioError(f"scenario spec missing {e.args[0]!r}") from None

    if flexible == "all":
        ids = [dc.id for dc in case.data_centers]
    elif flexible == "none":
        ids = []
    elif isinstance(flexible, dict) and set(flexible) == {"cluster"}:
        by_id = {c.id: c for c in clusters}
        try:
            ids = by_id[flexible["cluster"]].dc_ids
        except KeyError:
            raise ScenarioError(
                f"scenario {name!r}: unknown cluster {flexible['cluster']!r}"
            ) from None
    elif isinstance(flexible, list) and all(isinstance(i, int) for i in flexible):
        ids = flexible
    else:
        raise ScenarioError(f"scenario {name!r}: unrecognised flexible form {flexible!r}")

    return make_scenario(case, ids, name)


def default_study_scenarios(case: DispatchCase, clusters: Sequence[Cluster]) -> List[Scenario]:
    """
    :return: The fixed baseline, whole-system flexibility, and one scenario per cluster.
    """
    scenarios = [
        make_scenario(case, (), "without_fs"),
        make_scenario(case, (dc.id for dc in case.data_centers), "fs_whole_system"),
    ]
    for cluster in clusters:
        scenarios.append(make_scenario(case, cluster.dc_ids, f"fs_cluster_{cluster.id}"))

    return scenarios
