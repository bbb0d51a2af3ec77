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
import pytest

from gridflex.core.fixtures import FIXTURES, builtin_fixture

FIXTURE_NAMES = sorted(FIXTURES)


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running randomized or grid-search checks")


@pytest.fixture(params=FIXTURE_NAMES)
def fixture_case(request):
    """
    Every built-in case.
    """
    return builtin_fixture(request.param)
