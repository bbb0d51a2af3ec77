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
Emission totals: CO2-equivalent GHG and toluene-equivalent toxic releases.

Human toxicity potential (HTP) factors are configuration data, loaded from a JSON or
TOML file of ``pollutant = factor`` pairs.

.. currentmodule:: gridflex.metrics.emissions
"""
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Mapping, Sequence

import numpy as np
import toml

from gridflex.dataclasses.generator import Generator
from gridflex.dispatch.solution import DispatchSolution
from gridflex.exc import ErrorCode, MetricsError
from gridflex.util import PathLike


@dataclass(frozen=True)
class HtpTable:
    """
    Converts pollutant masses into toluene-equivalent masses.
    """

    #: pollutant -> lbs of toluene per lb of pollutant.
    factors: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        for name, factor in self.factors.items():
            if not (isinstance(factor, (int, float)) and math.isfinite(factor) and factor > 0):
                raise MetricsError(f"HTP factor for {name!r} must be positive, got {factor!r}")

    def factor(self, pollutant: str) -> float:
        """
        :raises MetricsError: If there is no factor for ``pollutant``.
        """
        try:
            return float(self.factors[pollutant])
        except KeyError:
            raise MetricsError(
                f"no HTP factor for pollutant {pollutant!r}", code=ErrorCode.MISSING_HTP_FACTOR
            ) from None

    def combine(self, rates: Mapping[str, float]) -> float:
        """
        :return: The toluene-equivalent rate of a set of per-pollutant rates.
        """
        return sum(rate * self.factor(pollutant) for pollutant, rate in sorted(rates.items()))

    @classmethod
    def load(cls, path: PathLike) -> "HtpTable":
        """
        Loads a table from a ``.json`` or ``.toml`` file.

        :raises MetricsError: If the file cannot be read or is not a table of positive factors.
        """
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as e:
            raise MetricsError(f"{path}: {getattr(e, 'strerror', None) or e}") from e

        try:
            if path.suffix.lower() == ".toml":
                doc = toml.loads(text)
            else:
                doc = json.loads(text)
        except (ValueError, toml.TomlDecodeError) as e:
            raise MetricsError(f"{path}: {e}") from e

        if not isinstance(doc, dict):
            raise MetricsError(f"{path}: expected a table of pollutant factors")

        return cls({str(k): v for k, v in doc.items()})


def _output_of(sol: DispatchSolution, gen_id: int) -> np.ndarray:
    return np.asarray(sol.generation[gen_id], dtype=float)


def _by_interval(sol: DispatchSolution, generators: Sequence[Generator], rate_of) -> np.ndarray:
    known = {gen.id: gen for gen in generators}
    total = np.zeros(sol.horizon)
    for gen_id in sorted(sol.generation):
        output = _output_of(sol, gen_id)
        gen = known.get(gen_id)
        if gen is None:
            if np.any(output != 0):
                raise MetricsError(
                    f"generator {gen_id} has output but no emission rates",
                    code=ErrorCode.MISSING_RATE,
                )
            continue

        rate = rate_of(gen)
        if rate is None or not math.isfinite(rate):
            if np.any(output != 0):
                raise MetricsError(
                    f"generator {gen_id} has output but no emission rate",
                    code=ErrorCode.MISSING_RATE,
                )
            continue

        total += output * rate * sol.dt_hours

    return total


def ghg_by_interval(sol: DispatchSolution, generators: Sequence[Generator]) -> np.ndarray:
    """
    :return: The CO2-equivalent GHG emission of every interval, in lbs.
    """
    return _by_interval(sol, generators, lambda gen: gen.ghg_rate)


def ghg_total(sol: DispatchSolution, generators: Sequence[Generator]) -> float:
    """
    Sums output times GHG rate times interval length over every unit and interval.

    :return: The total CO2-equivalent emission, in lbs.
    :raises MetricsError: If a unit with nonzero output has no rate.
    """
    return float(ghg_by_interval(sol, generators).sum())


def toxic_rate(gen: Generator, htp: HtpTable) -> float:
    """
    :return: The toluene-equivalent rate of ``gen``: its per-pollutant rates combined
        with ``htp`` if it has any, otherwise its pre-combined ``tox_rate``.
    """
    if gen.pollutant_rates:
        return htp.combine(gen.pollutants)

    return gen.tox_rate


def tox_by_interval(
    sol: DispatchSolution, generators: Sequence[Generator], htp: HtpTable
) -> np.ndarray:
    return _by_interval(sol, generators, lambda gen: toxic_rate(gen, htp))


def tox_total(sol: DispatchSolution, generators: Sequence[Generator], htp: HtpTable) -> float:
    """
    Sums output times toluene-equivalent rate times interval length.

    :return: The total toxic emission, in lbs of toluene equivalent.
    :raises MetricsError: If a pollutant has no HTP factor.
    """
    return float(tox_by_interval(sol, generators, htp).sum())


def pollutant_totals(sol: DispatchSolution, generators: Sequence[Generator]) -> Dict[str, float]:
    """
    :return: pollutant -> total mass in lbs, before HTP conversion.
    """
    totals: Dict[str, float] = {}
    for gen in generators:
        if gen.id not in sol.generation:
            continue
        energy = float(_output_of(sol, gen.id).sum()) * sol.dt_hours
        for pollutant, rate in gen.pollutant_rates:
            totals[pollutant] = totals.get(pollutant, 0.0) + rate * energy

    return dict(sorted(totals.items()))
