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
Misc utilities shared throughout the library.

.. currentmodule:: gridflex.util
"""
import json
from pathlib import Path
from typing import Any, Iterable, Sequence, Tuple, Union

import numpy as np

PathLike = Union[str, Path]


def pack_json(data: Any) -> str:
    """
    Packs JSON in a compact representation.

    :param data: The data to pack.
    """
    return json.dumps(data, indent=None, separators=(",", ":"), sort_keys=True)


def dump_json(data: Any) -> str:
    """
    Dumps JSON in a stable, human-readable representation.

    Keys are sorted and floats are written with ``repr`` so that output is byte-identical
    across runs and reloads bit-identically.
    """
    return json.dumps(data, indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_text(path: PathLike, text: str) -> Path:
    """
    Writes ``text`` to ``path`` as UTF-8 with ``\\n`` line endings, creating parent
    directories as needed.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as f:
        f.write(text)

    return path


def make_rng(seed: int) -> np.random.Generator:
    """
    Makes the portable random generator used for every seeded draw in the library: a
    :class:`numpy.random.Generator` over the 64-bit permuted-congruential ``PCG64``
    bit generator.
    """
    return np.random.Generator(np.random.PCG64(seed))


def as_series(values: Iterable[float]) -> Tuple[float, ...]:
    """
    Freezes a per-interval series into a tuple of floats.
    """
    return tuple(float(v) for v in values)


def constant_series(value: float, horizon: int) -> Tuple[float, ...]:
    """
    :return: A series holding ``value`` for every one of ``horizon`` intervals.
    """
    return (float(value),) * horizon


def population_variance(values: Sequence[float]) -> float:
    """
    :return: The population variance (divide by ``len(values)``) of ``values``.
    """
    arr = np.asarray(values, dtype=float)
    return float(np.mean((arr - arr.mean()) ** 2))
